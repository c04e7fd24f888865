"""Eve's linear processing: unit-gain MMSE combining of her channel estimates.

Eve writes ``z = beta h(k) + s`` with ``beta = E[z h(k)^*]`` and a residual
``s`` uncorrelated with ``h(k)`` whose covariance is ``R_s = R_z - beta beta^H``.
The combiner ``c`` minimizing ``E|c z - h(k)|^2`` subject to ``c beta = 1`` is

    c = beta^H R_s^-1 / (beta^H R_s^-1 beta),   sigma_z^2 = 1 / (beta^H R_s^-1 beta)

so that ``z_hat = c z = h(k) + e`` with ``E|e|^2 = sigma_z^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    ScenarioParams,
    build_covariances,
    eve_descriptor,
    rho_eval,
)
from .errors import NoObservableSignal, UnsupportedModel
from .gaussian_info import LN2

# eigenvalues of R_s below this fraction of the largest one are treated as
# exactly zero, i.e. noise-free directions Eve can exploit perfectly
_NULL_TOL = 1e-12


@dataclass(frozen=True)
class LepEstimate:
    """Statistics of Eve's scalar estimate ``z_hat = c z``.

    Attributes
    ----------
    target_frame : int
        Frame ``k`` of the channel ``h(k)`` being estimated (1 or 2).
    combiner : ndarray
        Row vector ``c`` with ``c beta(k) = 1``.
    sigma_z2 : float
        Residual power ``E|z_hat - h(k)|^2``.
    corr_to_y2, corr_to_x1, corr_to_x2t1 : float
        ``E[z_hat y(2)^*]``, ``E[z_hat x(1)^*]`` and ``E[z_hat x(2t+1)^*]``.
    """

    target_frame: int
    combiner: np.ndarray
    sigma_z2: float
    corr_to_y2: complex
    corr_to_x1: complex
    corr_to_x2t1: complex = 0.0
    t: int = 1

    @property
    def variance(self) -> float:
        return 1.0 + self.sigma_z2

    def mi_with(self, corr: complex, var_other: float) -> float:
        """``I(u; z_hat)`` in bits for a scalar ``u`` with ``E[z_hat u^*] = corr``."""
        r = abs(corr) ** 2 / (var_other * self.variance)
        if r >= 1.0:
            return math.inf
        return -math.log1p(-r) / LN2


@dataclass(frozen=True)
class LepAdjustment:
    """Post-transform of Eve's scalar estimate: residual power times ``noise_scale``."""

    noise_scale: float = 1.0

    @property
    def is_identity(self) -> bool:
        return self.noise_scale == 1.0


def beta_vector(params: ScenarioParams, n_obs: int, k: int) -> np.ndarray:
    """``beta_l(k) = E[z_l h(k)^*]`` for ``l = 1 .. n_obs``."""
    out = np.empty(n_obs)
    for i in range(n_obs):
        frame = i + 1
        kind, _ = eve_descriptor(frame)
        a = params.alpha_A if kind == "vA" else params.alpha_B
        out[i] = a * rho_eval(params.correlation, k - frame)
    return out


def unit_gain_combiner(Rs: np.ndarray, beta: np.ndarray) -> tuple[np.ndarray, float]:
    """Minimize ``c Rs c^H`` subject to ``c beta = 1``.

    Returns ``(c, c Rs c^H)``. If ``beta`` has a component in the null space
    of ``Rs`` the combiner lives in that null space and the residual is zero.
    """
    ev, vec = np.linalg.eigh(Rs)
    top = max(ev[-1], 0.0)
    null = ev <= _NULL_TOL * max(top, 1.0)
    proj = vec.conj().T @ beta
    if np.any(null) and np.linalg.norm(proj[null]) > 1e-9 * np.linalg.norm(beta):
        pn = vec[:, null] @ proj[null]
        c = pn.conj() / np.vdot(pn, beta).real
    else:
        inv_ev = np.where(null, 0.0, 1.0 / np.where(null, 1.0, ev))
        w = vec @ (inv_ev * proj)
        c = w.conj() / np.vdot(w, beta).real
    resid = float(np.real(c @ Rs @ c.conj()))
    return c, max(resid, 0.0)


def lep_combine(params: ScenarioParams, t: int, k: int, eve_t: int | None = None) -> LepEstimate:
    """Unit-gain MMSE estimate of ``h(k)`` from ``z(2 eve_t)``.

    Raises
    ------
    NoObservableSignal
        When ``beta(k)`` is the zero vector, or so small that the unit-gain
        combiner overflows.
    """
    if k not in (1, 2):
        raise ValueError("target frame k must be 1 or 2")
    b = build_covariances(params, t, eve_t)
    beta = beta_vector(params, b.n_obs, k)
    if np.max(np.abs(beta)) == 0.0:
        raise NoObservableSignal(f"Eve's observations are uncorrelated with h({k})")
    Rs = b.Rz - np.outer(beta, beta.conj())
    Rs = 0.5 * (Rs + Rs.conj().T)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        c, sz2 = unit_gain_combiner(Rs, beta)
    if not (math.isfinite(sz2) and np.all(np.isfinite(c))):
        # the signal direction is lost below double precision
        raise NoObservableSignal(f"h({k}) is numerically unobservable from Eve's observations")
    # E[z_hat u^*] = c E[z u^*] = c conj(r_u) with r_u = E[u z^*]
    return LepEstimate(
        target_frame=k,
        combiner=c,
        sigma_z2=sz2,
        corr_to_y2=complex(c @ np.conj(b.ry2)),
        corr_to_x1=complex(c @ np.conj(b.rx1)),
        corr_to_x2t1=complex(c @ np.conj(b.rx2t1)),
        t=b.t,
    )


def lep_pick_for_scbca(params: ScenarioParams, t: int, eve_t: int | None = None) -> LepEstimate:
    """Candidate (k = 1 or 2) that minimizes ``min{I(x(1); z_hat), I(y(2); z_hat)}``.

    Ties go to ``k = 1``.
    """
    best, best_score = None, math.inf
    for k in (1, 2):
        est = lep_combine(params, t, k, eve_t)
        score = min(est.mi_with(est.corr_to_x1, params.var_x),
                    est.mi_with(est.corr_to_y2, params.var_y))
        if best is None or score < best_score - 1e-12:
            best, best_score = est, score
    return best


def lep_time_invariant_limit(params: ScenarioParams) -> dict:
    """Residual ``q_A``/``q_B`` coefficients of ``z_hat`` as ``t -> infinity``.

    With time-invariant channels Eve's averaged observations become noise free,
    ``v_bar = alpha h + sqrt(1 - alpha^2) q``, and the unit-gain combiner over
    the two averages leaves ``z_hat = h + c_A q_A + c_B q_B``.
    """
    if not params.correlation.is_time_invariant:
        raise UnsupportedModel("the t -> infinity limit is defined for time-invariant channels")
    a = np.array([params.alpha_A, params.alpha_B])
    if np.max(np.abs(a)) == 0.0:
        raise NoObservableSignal("alpha_A = alpha_B = 0")
    g = np.sqrt(1.0 - a * a)
    Rs = np.diag(g * g)
    c, _ = unit_gain_combiner(Rs, a)
    coeff = c * g
    return {"residual_qA_coeff": float(coeff[0]), "residual_qB_coeff": float(coeff[1])}


def averaged_time_invariant_estimate(params: ScenarioParams, t: int) -> float:
    """Residual power of the average-then-combine construction (time-invariant only).

    Eve first averages her ``t`` estimates of each link, shrinking the noise
    power to ``sigma_v^2 / t``, then combines the two averages with the
    unit-gain MMSE combiner. Equivalent to :func:`lep_combine` on those channels.
    """
    if not params.correlation.is_time_invariant:
        raise UnsupportedModel("averaging is only sufficient for time-invariant channels")
    a = np.array([params.alpha_A, params.alpha_B])
    if np.max(np.abs(a)) == 0.0:
        raise NoObservableSignal("alpha_A = alpha_B = 0")
    Rs = np.diag([1.0 - a[0] ** 2 + params.sigma_vA2 / t,
                  1.0 - a[1] ** 2 + params.sigma_vB2 / t])
    _, sz2 = unit_gain_combiner(Rs, a)
    return sz2


__all__ = [
    "LepEstimate", "LepAdjustment", "lep_combine", "lep_pick_for_scbca",
    "lep_time_invariant_limit", "averaged_time_invariant_estimate",
    "beta_vector", "unit_gain_combiner",
]
