"""Flat binary and CSV serialisation of labeled batches."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .sampler import LabeledBatch, SampleType

# packed little-endian record: 3 f8 p, 3 f8 v, u1 xi, f8 d, 3 f8 n, u1 type (82 bytes)
RECORD_DTYPE = np.dtype(
    [("p", "<f8", (3,)), ("v", "<f8", (3,)), ("xi", "u1"), ("d", "<f8"), ("n", "<f8", (3,)), ("stype", "u1")]
)


def to_records(batch: LabeledBatch) -> np.ndarray:
    rec = np.zeros(len(batch), dtype=RECORD_DTYPE)
    rec["p"] = batch.p
    rec["v"] = batch.v
    rec["xi"] = (np.asarray(batch.xi) > 0.5).astype(np.uint8)
    rec["d"] = batch.d
    rec["n"] = batch.n
    rec["stype"] = batch.stype
    return rec


def from_records(rec: np.ndarray) -> LabeledBatch:
    return LabeledBatch(
        rec["p"].astype(np.float64), rec["v"].astype(np.float64), rec["xi"].astype(np.float64),
        rec["d"].astype(np.float64), rec["n"].astype(np.float64), rec["stype"].astype(np.uint8),
    )


def write_binary(batch: LabeledBatch, path: str | Path) -> None:
    Path(path).write_bytes(to_records(batch).tobytes())


def read_binary(path: str | Path) -> LabeledBatch:
    return from_records(np.frombuffer(Path(path).read_bytes(), dtype=RECORD_DTYPE))


CSV_HEADER = ["px", "py", "pz", "vx", "vy", "vz", "xi", "d", "nx", "ny", "nz", "type"]


def write_csv(batch: LabeledBatch, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for i in range(len(batch)):
            w.writerow(
                [repr(float(x)) for x in batch.p[i]]
                + [repr(float(x)) for x in batch.v[i]]
                + [int(batch.xi[i] > 0.5), repr(float(batch.d[i]))]
                + [repr(float(x)) for x in batch.n[i]]
                + [SampleType(int(batch.stype[i])).name]
            )


def read_csv(path: str | Path) -> LabeledBatch:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    f = lambda k: np.array([float(r[k]) for r in rows])
    p = np.stack([f("px"), f("py"), f("pz")], axis=1) if rows else np.empty((0, 3))
    v = np.stack([f("vx"), f("vy"), f("vz")], axis=1) if rows else np.empty((0, 3))
    n = np.stack([f("nx"), f("ny"), f("nz")], axis=1) if rows else np.empty((0, 3))
    stype = np.array([SampleType[r["type"]] for r in rows], dtype=np.uint8)
    return LabeledBatch(p, v, f("xi"), f("d"), n, stype)
