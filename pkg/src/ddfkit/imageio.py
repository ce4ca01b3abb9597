"""PFM (float HDR) and binary PPM (8-bit preview) images."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def write_pfm(path: str | Path, image) -> None:
    """Little-endian PFM (scale ``-1.0``); rows are stored bottom to top as the format requires.

    ``(H, W)`` images are written greyscale (``Pf``), ``(H, W, 3)`` as colour (``PF``).
    Values are stored as float32; ``inf`` and ``nan`` survive unchanged.
    """
    img = np.asarray(image, dtype="<f4")
    if img.ndim == 2:
        tag = b"Pf"
    elif img.ndim == 3 and img.shape[2] == 3:
        tag = b"PF"
    else:
        raise ValueError("PFM images must be (H, W) or (H, W, 3)")
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(tag + b"\n" + f"{w} {h}\n".encode() + b"-1.0\n")
        fh.write(np.ascontiguousarray(img[::-1]).tobytes())


def read_pfm(path: str | Path) -> np.ndarray:
    """Inverse of :func:`write_pfm`; accepts either byte order. Returns float32, top row first."""
    with open(path, "rb") as fh:
        tag = fh.readline().strip()
        if tag not in (b"PF", b"Pf"):
            raise ValueError(f"{path}: not a PFM file")
        dims = fh.readline().split()
        while not dims:  # tolerate blank lines
            dims = fh.readline().split()
        w, h = int(dims[0]), int(dims[1])
        scale = float(fh.readline().strip())
        dtype = "<f4" if scale < 0 else ">f4"
        channels = 3 if tag == b"PF" else 1
        data = np.frombuffer(fh.read(), dtype=dtype)
    if data.size != w * h * channels:
        raise ValueError(f"{path}: expected {w * h * channels} floats, found {data.size}")
    shape = (h, w, 3) if channels == 3 else (h, w)
    return data.reshape(shape)[::-1].astype(np.float32)


def to_uint8(image) -> np.ndarray:
    """Clip to ``[0, 1]`` and quantise; ``nan`` becomes 0."""
    img = np.nan_to_num(np.asarray(image, dtype=np.float64), nan=0.0)
    return np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_ppm(path: str | Path, image) -> None:
    """Binary P6 PPM from values in ``[0, 1]``; greyscale input is replicated to RGB."""
    img = to_uint8(image)
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError("PPM images must be (H, W) or (H, W, 3)")
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode())
        fh.write(np.ascontiguousarray(img).tobytes())


def read_ppm(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        end = pos
        while not raw[end:end + 1].isspace():
            end += 1
        tokens.append(raw[pos:end])
        pos = end
    if tokens[0] != b"P6" or int(tokens[3]) != 255:
        raise ValueError(f"{path}: only 8-bit binary P6 is supported")
    w, h = int(tokens[1]), int(tokens[2])
    data = np.frombuffer(raw[pos + 1: pos + 1 + w * h * 3], dtype=np.uint8)
    return data.reshape(h, w, 3)
