"""Display transform for HDR traces: Gaussian denoise, joint min-max, gamma."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter


def postprocess(image, blur_sigma: float = 1.0, gamma: float = 2.2) -> np.ndarray:
    """Blur each channel, normalise all channels jointly to ``[0, 1]``, apply ``x^(1/gamma)``.

    A constant image has no range to normalise and maps to zeros.
    """
    img = np.asarray(image, dtype=np.float64)
    if img.ndim not in (2, 3):
        raise ValueError("image must be (H, W) or (H, W, C)")
    if blur_sigma > 0:
        sigma = (blur_sigma, blur_sigma) + ((0,) if img.ndim == 3 else ())
        img = gaussian_filter(img, sigma=sigma, mode="nearest")
    lo, hi = float(img.min()), float(img.max())
    if hi - lo <= 0:
        return np.zeros_like(img)
    return ((img - lo) / (hi - lo)) ** (1.0 / gamma)
