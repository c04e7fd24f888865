"""Information measures for zero-mean circularly-symmetric complex Gaussians.

Differential entropy is ``log det(pi e R)`` (no factor 1/2), so every
quantity here counts both real and imaginary parts. Results are in bits.

A block whose covariance is singular (for instance several noise-free copies
of the same channel) is replaced by its coordinates on the range of the
covariance before any determinant is taken; information measures are
invariant under that change of variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InternalConsistencyError, SingularMatrix
from .numerics import MAX_CONDITION, as_hermitian, condition_number, hermitian_ops, support_basis

LN2 = math.log(2.0)
#: Negative results closer to zero than this are floating-point noise.
CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class JointGaussian:
    """Covariance of a stacked Gaussian vector and its block partition."""

    cov: np.ndarray
    block_sizes: tuple = ()

    def __post_init__(self):
        cov = as_hermitian(self.cov, "joint covariance", psd=True)
        object.__setattr__(self, "cov", cov)
        sizes = tuple(int(s) for s in self.block_sizes) or (1,) * cov.shape[0]
        if any(s < 1 for s in sizes) or sum(sizes) != cov.shape[0]:
            raise ValueError(f"block sizes {sizes} do not partition dimension {cov.shape[0]}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def dim(self) -> int:
        return self.cov.shape[0]

    def block(self, i: int) -> list[int]:
        """Scalar indices of block ``i``."""
        start = sum(self.block_sizes[:i])
        return list(range(start, start + self.block_sizes[i]))

    def indices(self, blocks: Iterable[int]) -> list[int]:
        out = []
        for b in blocks:
            out.extend(self.block(b))
        return out


def _as_index(idx) -> list[int]:
    if isinstance(idx, (int, np.integer)):
        return [int(idx)]
    return [int(i) for i in idx]


def _unit_scale(sub: np.ndarray) -> np.ndarray:
    """Inverse standard deviations (1 for zero-variance entries)."""
    d = np.sqrt(np.clip(np.real(np.diag(sub)), 0.0, None))
    return np.where(d > 0.0, 1.0 / np.where(d > 0.0, d, 1.0), 1.0)


def reduce_block(cov: np.ndarray, idx: list[int]) -> np.ndarray:
    """Linear map taking the variables ``idx`` to well-conditioned coordinates.

    Returns a ``(len(idx), rank)`` matrix ``U``; the reduced variables are
    ``U^H v[idx]``. Variables are first scaled to unit variance, so the
    conditioning test does not depend on units; the scaling cancels in
    every mutual information.
    """
    sub = cov[np.ix_(idx, idx)]
    s = _unit_scale(sub)
    norm = s[:, None] * sub * s[None, :]
    if condition_number(norm) <= MAX_CONDITION:
        return np.diag(s)
    return s[:, None] * support_basis(norm)


def _gauss_logdet_terms(cov: np.ndarray, a: list[int], b: list[int]):
    """(logdet R_A, logdet R_B, logdet R_AB) in nats after support reduction.

    ``logdet R_AB`` is ``-inf`` when the reduced joint is singular.
    """
    ua = reduce_block(cov, a)
    ub = reduce_block(cov, b)
    if ua.shape[1] == 0 or ub.shape[1] == 0:
        return None
    n_a, n_b = ua.shape[1], ub.shape[1]
    t = np.zeros((len(a) + len(b), n_a + n_b), dtype=np.result_type(cov, ua, ub))
    t[:len(a), :n_a] = ua
    t[len(a):, n_a:] = ub
    ab = a + b
    joint = t.conj().T @ cov[np.ix_(ab, ab)] @ t
    joint = 0.5 * (joint + joint.conj().T)
    ld_a = hermitian_ops(joint[:n_a, :n_a], "marginal block A").logdet
    ld_b = hermitian_ops(joint[n_a:, n_a:], "marginal block B").logdet
    try:
        ld_ab = hermitian_ops(joint, "joint block AB").logdet
    except SingularMatrix:
        ld_ab = -math.inf
    return ld_a, ld_b, ld_ab


def clamp_nonneg(value: float, what: str, scale: float = 1.0) -> float:
    """Clamp tiny negatives to zero; raise on clearly negative values."""
    if value >= 0.0 or math.isinf(value):
        return value
    if value >= -CLAMP_TOL * max(1.0, abs(scale)):
        return 0.0
    raise InternalConsistencyError(f"{what} is negative: {value:.3g}")


def mutual_information(j, block_a, block_b) -> float:
    """``I(A; B)`` in bits for disjoint index sets of a joint Gaussian.

    ``j`` is a :class:`JointGaussian` or a covariance matrix; ``block_a`` and
    ``block_b`` are scalar index sets into it. Returns ``math.inf`` when the
    joint covariance is singular on the support of the marginals (a
    deterministic link between the blocks).
    """
    cov = j.cov if isinstance(j, JointGaussian) else as_hermitian(j, "joint covariance")
    a, b = _as_index(block_a), _as_index(block_b)
    if set(a) & set(b):
        raise ValueError("mutual_information needs disjoint blocks")
    if not a or not b:
        return 0.0
    if b < a:
        # canonical order makes I(A;B) == I(B;A) bit for bit
        a, b = b, a
    terms = _gauss_logdet_terms(cov, a, b)
    if terms is None:
        # one block is almost surely zero: nothing to share
        return 0.0
    ld_a, ld_b, ld_ab = terms
    if ld_ab == -math.inf:
        return math.inf
    value = (ld_a + ld_b - ld_ab) / LN2
    return clamp_nonneg(value, "mutual information", ld_a / LN2)


def conditional_mi(j, a, b, c) -> float:
    """``I(A; B | C) = I(A; B, C) - I(A; C)`` in bits."""
    a, b, c = _as_index(a), _as_index(b), _as_index(c)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise ValueError("conditional_mi needs pairwise disjoint blocks")
    if not c:
        return mutual_information(j, a, b)
    i_abc = mutual_information(j, a, b + c)
    i_ac = mutual_information(j, a, c)
    if math.isinf(i_ac):
        if math.isinf(i_abc):
            raise ValueError("conditional mutual information is undefined: "
                             "A is a deterministic function of C")
        raise InternalConsistencyError("I(A;C) infinite while I(A;B,C) is finite")
    if math.isinf(i_abc):
        return math.inf
    return clamp_nonneg(i_abc - i_ac, "conditional mutual information", i_abc)


def kl_zero_mean_gaussians(p_cov, q_cov) -> float:
    """``D(N(0, P) || N(0, Q))`` in bits for circularly-symmetric complex Gaussians.

    ``[tr(Q^-1 P) - k - ln det(P Q^-1)] / ln 2``. A singular ``P`` gives
    ``math.inf``.
    """
    p = as_hermitian(p_cov, "KL first argument", psd=True)
    q = as_hermitian(q_cov, "KL second argument")
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    q_ops = hermitian_ops(q, "KL reference covariance")
    try:
        ld_p = hermitian_ops(p, "KL first argument").logdet
    except SingularMatrix:
        return math.inf
    k = p.shape[0]
    tr = float(np.trace(q_ops.inverse @ p).real)
    value = (tr - k - (ld_p - q_ops.logdet)) / LN2
    return clamp_nonneg(value, "KL divergence", tr)


def kl_from_precision(p_cov, q_precision) -> float:
    """KL divergence when the second Gaussian is given by its precision matrix.

    ``[tr(V P) - k - ln det(P V)] / ln 2`` with ``V = Q^-1``.
    """
    p = as_hermitian(p_cov, "KL first argument", psd=True)
    v = as_hermitian(q_precision, "KL reference precision")
    if p.shape != v.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {v.shape}")
    ld_v = hermitian_ops(v, "KL reference precision").logdet
    try:
        ld_p = hermitian_ops(p, "KL first argument").logdet
    except SingularMatrix:
        return math.inf
    k = p.shape[0]
    tr = float(np.trace(v @ p).real)
    value = (tr - k - (ld_p + ld_v)) / LN2
    return clamp_nonneg(value, "KL divergence", tr)


def gaussian_entropy_bits(cov) -> float:
    """Differential entropy ``log2 det(pi e R)``."""
    c = as_hermitian(cov, "entropy covariance")
    k = c.shape[0]
    return (k * math.log(math.pi * math.e) + hermitian_ops(c, "entropy covariance").logdet) / LN2
