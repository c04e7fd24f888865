"""Vectorized numpy implementation of the compiled kernels.

Used when the compiled ``_kernels`` extension is unavailable. Both
implementations must agree to ~1e-12.
"""

import numpy as np
from scipy.special import erfc

_INV_SQRT2 = 0.7071067811865476


def _cell_masses(centers, sd, thresholds):
    """Masses of ``N(center, sd^2)`` in the cells cut by ``thresholds``.

    Output shape ``centers.shape + (len(thresholds) + 1,)``.
    """
    centers = np.asarray(centers, dtype=float)
    th = np.asarray(thresholds, dtype=float)
    # upper-tail probabilities Q((T - m)/sd), padded with 1 (T=-inf) and 0 (T=+inf)
    q = 0.5 * erfc((th - centers[..., None]) * (_INV_SQRT2 / sd))
    ones = np.ones(centers.shape + (1,))
    zeros = np.zeros(centers.shape + (1,))
    q = np.concatenate([ones, q, zeros], axis=-1)
    return q[..., :-1] - q[..., 1:]


def _entropy_bits(p):
    p = np.clip(p, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, -p * np.log2(p), 0.0)
    return terms.sum(axis=-1)


def quantized_entropy_gaussian(centers, sd, thresholds):
    """Entropy (bits) of the quantized ``N(center, sd^2)`` for each center."""
    centers = np.ascontiguousarray(centers, dtype=float)
    if len(thresholds) == 0:
        return np.zeros(centers.shape)
    if sd <= 0.0:
        return np.zeros(centers.shape)
    return _entropy_bits(_cell_masses(centers, sd, thresholds))


def quantized_entropy_mixture(centers, offsets, weights, sd, thresholds):
    """Entropy (bits) of a quantized Gaussian mixture, one per center.

    For center ``b`` the mixture is ``sum_j weights[j] N(b + offsets[j], sd^2)``.
    """
    centers = np.ascontiguousarray(centers, dtype=float)
    if len(thresholds) == 0:
        return np.zeros(centers.shape)
    offsets = np.asarray(offsets, dtype=float)
    weights = np.asarray(weights, dtype=float)
    pts = centers[:, None] + offsets[None, :]
    if sd > 0.0:
        masses = _cell_masses(pts, sd, thresholds)
    else:
        cell = np.searchsorted(np.asarray(thresholds, dtype=float), pts, side="left")
        masses = np.zeros(pts.shape + (len(thresholds) + 1,))
        np.put_along_axis(masses, cell[..., None], 1.0, axis=-1)
    pmf = np.einsum("j,bjm->bm", weights, masses)
    return _entropy_bits(pmf)


def box_muller(uniforms):
    """Complex normals from uniform pairs: ``sqrt(-ln(1 - u1)) exp(2 pi i u2)``."""
    u = np.ascontiguousarray(uniforms, dtype=np.float64).reshape(-1, 2)
    r = np.sqrt(-np.log1p(-u[:, 0]))
    th = 2 * np.pi * u[:, 1]
    out = np.empty(u.shape[0], dtype=np.complex128)
    out.real = r * np.cos(th)
    out.imag = r * np.sin(th)
    return out
