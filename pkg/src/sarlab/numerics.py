"""Special functions, Gauss-Hermite quadrature and small Hermitian linear algebra.

All matrices handled here are tiny (a few tens of rows at most), so plain
dense factorizations are used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
import scipy.linalg
import scipy.special
from scipy import integrate

from .errors import QuadratureError, SingularMatrix

#: Condition number above which a matrix is treated as singular.
MAX_CONDITION = 1e12

_SQRT2 = math.sqrt(2.0)


def _require_finite(x, name="x"):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x}")
    return x


def q_function(x: float) -> float:
    """Gaussian tail probability ``P(N(0, 1) > x)``.

    Evaluated through the complementary error function so that the upper
    tail keeps full relative precision down to the underflow limit.
    """
    x = _require_finite(x)
    return 0.5 * float(scipy.special.erfc(x / _SQRT2))


def q_inverse(p: float) -> float:
    """Inverse of :func:`q_function` on ``(0, 1)``."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"q_inverse needs p in (0, 1), got {p}")
    # Q(x) = Phi(-x), and ndtri is accurate in the small-p tail
    x = -float(scipy.special.ndtri(p))
    # one Newton step on log Q tightens the round trip to ~1 ulp
    q = q_function(x)
    if q > 0.0:
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        x += (q - p) / pdf
    return x


def bessel_j0(x: float) -> float:
    """Zero-order Bessel function of the first kind."""
    x = _require_finite(x)
    return float(scipy.special.j0(x))


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for Gaussian-weighted integrals.

    Attributes
    ----------
    hermite_order : int
        Number of Gauss-Hermite nodes.
    tail_bound : float
        Truncation, in standard deviations, for adaptive (non Gauss-Hermite)
        integration of Gaussian-weighted integrands.
    rel_tol : float
        Relative tolerance for convergence checks.
    max_order : int
        Largest node count a doubling refinement may reach.
    """

    hermite_order: int = 96
    tail_bound: float = 12.0
    rel_tol: float = 1e-4
    max_order: int = 3072

    def __post_init__(self):
        if int(self.hermite_order) != self.hermite_order or self.hermite_order < 8:
            raise ValueError("hermite_order must be an integer >= 8")
        if not self.tail_bound > 0:
            raise ValueError("tail_bound must be > 0")
        if not 0.0 < self.rel_tol <= 1e-2:
            raise ValueError("rel_tol must lie in (0, 1e-2]")
        if self.max_order < 2 * self.hermite_order:
            raise ValueError("max_order must allow at least one doubling")

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.hermite_order, self.tail_bound, self.rel_tol,
                              max(self.max_order, 4 * self.hermite_order))


@lru_cache(maxsize=32)
def hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for expectations under a standard normal.

    Returns ``(u, w)`` such that ``E[f(N(0,1))] ~= sum(w * f(u))``.
    """
    x, w = scipy.special.roots_hermite(order)
    u = x * _SQRT2
    w = w / math.sqrt(math.pi)
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w


def gauss_hermite(f: Callable, mean: float, variance: float,
                  spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Approximate ``E[f(H)]`` for ``H ~ N(mean, variance)``.

    ``f`` is called once with the full array of nodes and must be vectorized.
    """
    if not variance > 0:
        raise ValueError(f"variance must be > 0, got {variance}")
    u, w = hermite_rule(spec.hermite_order)
    vals = np.asarray(f(mean + math.sqrt(variance) * u), dtype=float)
    return float(np.dot(w, vals))


def gaussian_expectation_adaptive(f: Callable[[float], float], mean: float,
                                  variance: float,
                                  spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Adaptive-quadrature counterpart of :func:`gauss_hermite`.

    Integrates over ``mean +- tail_bound`` standard deviations with
    ``scipy.integrate.quad``. Slower, but makes no smoothness assumption.
    """
    if not variance > 0:
        raise ValueError(f"variance must be > 0, got {variance}")
    sd = math.sqrt(variance)

    def integrand(s):
        return f(mean + sd * s) * math.exp(-0.5 * s * s) / math.sqrt(2 * math.pi)

    val, err = integrate.quad(integrand, -spec.tail_bound, spec.tail_bound,
                              epsabs=0.0, epsrel=spec.rel_tol * 1e-3, limit=400)
    if not math.isfinite(val):
        raise QuadratureError("adaptive integration returned a non-finite value")
    return float(val)


# ---------------------------------------------------------------------------
# Hermitian matrices


def as_hermitian(m, role: str = "matrix", psd: bool = False) -> np.ndarray:
    """Validate ``m`` as a square Hermitian matrix and return it as an array.

    With ``psd=True`` the smallest eigenvalue must be no lower than
    ``-1e-9`` times the largest.
    """
    a = np.atleast_2d(np.asarray(m))
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"{role}: expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{role}: non-finite entries")
    scale = max(float(np.max(np.abs(a))), 1e-300)
    if np.max(np.abs(a - a.conj().T)) > 1e-12 * scale:
        raise ValueError(f"{role}: matrix is not Hermitian")
    if psd:
        ev = np.linalg.eigvalsh(a)
        if ev[0] < -1e-9 * max(ev[-1], 0.0):
            raise ValueError(f"{role}: matrix is not positive semidefinite "
                             f"(min eigenvalue {ev[0]:.3g})")
    return a


class HermitianOps(NamedTuple):
    logdet: float
    inverse: np.ndarray
    trace: float


def condition_number(m: np.ndarray) -> float:
    ev = np.linalg.eigvalsh(m)
    if ev[0] <= 0.0:
        return math.inf
    return float(ev[-1] / ev[0])


def hermitian_ops(m, role: str = "matrix") -> HermitianOps:
    """Natural-log determinant, inverse and trace of a positive definite matrix.

    Raises
    ------
    SingularMatrix
        If the condition number exceeds :data:`MAX_CONDITION` or the
        Cholesky factorization fails. The exception carries ``role``.
    """
    a = as_hermitian(m, role)
    cond = condition_number(a)
    if not cond <= MAX_CONDITION:
        raise SingularMatrix(role, cond)
    try:
        c, low = scipy.linalg.cho_factor(a, lower=True)
    except np.linalg.LinAlgError:
        raise SingularMatrix(role, cond) from None
    logdet = 2.0 * float(np.sum(np.log(np.diag(c).real)))
    inv = scipy.linalg.cho_solve((c, low), np.eye(a.shape[0], dtype=a.dtype))
    inv = 0.5 * (inv + inv.conj().T)
    return HermitianOps(logdet, inv, float(np.trace(a).real))


def logdet(m, role: str = "matrix") -> float:
    return hermitian_ops(m, role).logdet


def support_basis(m: np.ndarray, rel_tol: float = 1.0 / MAX_CONDITION) -> np.ndarray:
    """Orthonormal basis of the range of a PSD matrix.

    Eigen-directions whose eigenvalue is below ``rel_tol`` times the largest
    are dropped. Returns a ``(dim, rank)`` matrix ``U`` with ``U^H m U``
    diagonal and well conditioned.
    """
    ev, vec = np.linalg.eigh(m)
    top = ev[-1]
    if top <= 0.0:
        return vec[:, :0]
    keep = ev > rel_tol * top
    return vec[:, keep]
