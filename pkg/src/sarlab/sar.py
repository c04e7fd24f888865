"""Secure authentication rates at IDV frame ``2t + 1``.

All rates are in bits per channel use. Eve's knowledge enters either as her
full observation vector ``z(2t)`` (``eve="full_z"``) or as the scalar output
of her linear processing (``eve="lep"``).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import X1, X2T1, Y2, Z0, ScenarioParams, build_covariances
from .errors import NoObservableSignal, QuadratureError, UnsupportedModel
from .gaussian_info import (
    JointGaussian,
    clamp_nonneg,
    conditional_mi,
    kl_from_precision,
    mutual_information,
    reduce_block,
)
from .kernels import quantized_entropy_gaussian, quantized_entropy_mixture
from .lep import LepAdjustment, LepEstimate, lep_combine, lep_pick_for_scbca
from .numerics import (
    QuadratureSpec,
    hermite_rule,
    hermitian_ops,
    q_inverse,
)

SCBCA = "SCBCA"
ACBCA = "ACBCA"
PLA = "PLA"

EVE_FULL = "full_z"
EVE_LEP = "lep"


@functools.total_ordering
@dataclass(frozen=True)
class SarResult:
    """A rate at one IDV frame: a point value or a (lower, upper) pair.

    ``math.inf`` is the sentinel for an unbounded rate; it orders above every
    finite result and serializes as ``inf``.
    """

    scheme: str
    frame: Optional[int]
    value: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None

    def __post_init__(self):
        if self.value is None and (self.lower is None or self.upper is None):
            raise ValueError("SarResult needs a value or a (lower, upper) pair")
        if self.lower is not None and self.upper is not None and self.lower > self.upper + 1e-9:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        for v in (self.value, self.lower, self.upper):
            if v is not None and not v >= 0:
                raise ValueError(f"rates must be >= 0, got {v}")

    @property
    def is_pair(self) -> bool:
        return self.value is None

    @property
    def is_infinite(self) -> bool:
        return self.value is not None and math.isinf(self.value)

    def _key(self) -> float:
        return self.lower if self.is_pair else self.value

    def __lt__(self, other):
        if not isinstance(other, SarResult):
            return NotImplemented
        return self._key() < other._key()

    def __eq__(self, other):
        if not isinstance(other, SarResult):
            return NotImplemented
        return (self.scheme, self.frame, self.value, self.lower, self.upper) == \
            (other.scheme, other.frame, other.value, other.lower, other.upper)

    __hash__ = object.__hash__


@dataclass(frozen=True)
class QuantizerSpec:
    """Uniform scalar quantizer with ``M = 2**bits`` levels.

    Interior thresholds sit at ``-v_sat + i * delta`` (``i = 1 .. M-1``) with
    ``delta = 2 v_sat / M``; the two edge cells are unbounded.
    """

    bits: int
    v_sat: float

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 0:
            raise ValueError("bits must be a non-negative integer")
        if not self.v_sat > 0:
            raise ValueError("v_sat must be > 0")

    @property
    def levels(self) -> int:
        return 2 ** int(self.bits)

    @property
    def delta(self) -> float:
        return 2.0 * self.v_sat / self.levels

    @property
    def thresholds(self) -> np.ndarray:
        """Interior thresholds ``T_1 .. T_{M-1}``."""
        i = np.arange(1, self.levels)
        return -self.v_sat + i * self.delta


def choose_vsat(params: ScenarioParams, p_sat: float) -> float:
    """Saturation value with ``P(|Re y(2)| > v_sat) = p_sat``."""
    if not 0.0 < p_sat < 1.0:
        raise ValueError(f"p_sat must lie in (0, 1), got {p_sat}")
    return q_inverse(p_sat / 2.0) * math.sqrt(params.var_y / 2.0)


def quantizer_for(params: ScenarioParams, bits: int, p_sat: float) -> QuantizerSpec:
    return QuantizerSpec(bits, choose_vsat(params, p_sat))


# ---------------------------------------------------------------------------
# Eve's view of the legitimate variables


def _check_eve(eve: str, adjustment: Optional[LepAdjustment]):
    if eve not in (EVE_FULL, EVE_LEP):
        raise ValueError(f"eve must be {EVE_FULL!r} or {EVE_LEP!r}, got {eve!r}")
    if adjustment is not None and not adjustment.is_identity and eve != EVE_LEP:
        raise ValueError("a LEP adjustment only applies with eve='lep'")


def lep_joint(params: ScenarioParams, t: int, est: LepEstimate,
              adjustment: Optional[LepAdjustment] = None,
              eve_t: Optional[int] = None) -> JointGaussian:
    """Joint covariance of ``[x(1), y(2), x(2t+1), z_hat]``."""
    b = build_covariances(params, t, eve_t)
    scale = 1.0 if adjustment is None else adjustment.noise_scale
    c = np.empty((4, 4))
    c[:3, :3] = b.joint_cov()[:3, :3]
    # C[u, z_hat] = E[u z_hat^*] = conj(E[z_hat u^*]); all real in this model
    c[X1, 3] = c[3, X1] = np.real(est.corr_to_x1)
    c[Y2, 3] = c[3, Y2] = np.real(est.corr_to_y2)
    c[X2T1, 3] = c[3, X2T1] = np.real(est.corr_to_x2t1)
    c[3, 3] = 1.0 + est.sigma_z2 * scale
    return JointGaussian(c)


def eve_view(params: ScenarioParams, t: int, eve: str = EVE_FULL,
             adjustment: Optional[LepAdjustment] = None,
             eve_t: Optional[int] = None, lep_target: int = 1):
    """Joint covariance of legitimate estimates and Eve's observation.

    Returns ``(joint, obs)`` where ``obs`` lists Eve's indices in ``joint``.
    ``lep_target`` selects ``h(k)`` for the LEP estimate; ``0`` means the
    S-CBCA selection rule.
    """
    _check_eve(eve, adjustment)
    if eve == EVE_FULL:
        b = build_covariances(params, t, eve_t)
        j = JointGaussian(b.joint_cov())
        return j, list(range(Z0, j.dim))
    try:
        if lep_target == 0:
            est = lep_pick_for_scbca(params, t, eve_t)
        else:
            est = lep_combine(params, t, lep_target, eve_t)
    except NoObservableSignal:
        # Eve's scalar carries no information: model it as independent
        est = LepEstimate(lep_target or 1, np.zeros(0), 0.0, 0.0, 0.0, 0.0, t)
    return lep_joint(params, t, est, adjustment, eve_t), [3]


# ---------------------------------------------------------------------------
# S-CBCA


def scbca_sar_bounds(params: ScenarioParams, t: int, eve: str = EVE_FULL,
                     adjustment: Optional[LepAdjustment] = None,
                     eve_t: Optional[int] = None) -> SarResult:
    """Lower and upper bounds on the secret-key capacity behind S-CBCA.

    lower = I(x(1); y(2)) - min{I(x(1); z), I(y(2); z)}, clamped at 0
    upper = min{I(x(1); y(2)), I(x(1); y(2) | z)}
    """
    j, obs = eve_view(params, t, eve, adjustment, eve_t, lep_target=0)
    i_xy = mutual_information(j, [X1], [Y2])
    i_xz = mutual_information(j, [X1], obs)
    i_yz = mutual_information(j, [Y2], obs)
    i_xy_z = conditional_mi(j, [X1], [Y2], obs)
    lower = max(0.0, i_xy - min(i_xz, i_yz))
    upper = min(i_xy, i_xy_z)
    # the two bounds can cross by rounding only
    lower = min(lower, upper)
    return SarResult(SCBCA, 2 * t + 1, lower=lower, upper=upper)


# ---------------------------------------------------------------------------
# A-CBCA


def acbca_sar_continuous(t: Optional[int] = None) -> SarResult:
    """Unquantized channel estimates give an unbounded rate."""
    return SarResult(ACBCA, None if t is None else 2 * t + 1, value=math.inf)


def quantized_entropy(params: ScenarioParams, quant: QuantizerSpec) -> float:
    """``H(<y(2)>)`` in bits, both components: ``2 H(<Re y(2)>)``."""
    sd = math.sqrt(params.var_y / 2.0)
    return 2.0 * float(quantized_entropy_gaussian(np.zeros(1), sd, quant.thresholds)[0])


def _acbca_integral(sz2: float, sy2: float, thresholds: np.ndarray, order: int) -> float:
    """``2 H(<Re y> | Re z_hat)`` with ``z_hat = h + e``, ``E|e|^2 = sz2``.

    Outer Gauss-Hermite over ``b = Re z_hat ~ N(0, (1 + sz2)/2)``. For each
    ``b`` the conditional cell masses integrate ``P(Re h + noise_y in cell | h)``
    against the density of ``Re h`` given ``b``, i.e. the normalized product of
    the channel density ``N(0, 1/2)`` and the estimation-error density
    ``N(b, sz2/2)`` in ``h``; that inner integral is Gauss-Hermite too.
    """
    u, w = hermite_rule(order)
    b = math.sqrt((1.0 + sz2) / 2.0) * u
    centers = b / (1.0 + sz2)
    post_sd = math.sqrt(sz2 / (2.0 * (1.0 + sz2)))
    if post_sd > 0.0:
        offsets, inner_w = post_sd * u, w
    else:
        offsets, inner_w = np.zeros(1), np.ones(1)
    h = quantized_entropy_mixture(centers, offsets, inner_w, math.sqrt(sy2 / 2.0), thresholds)
    return 2.0 * float(np.dot(w, h))


def acbca_sar_quantized(params: ScenarioParams, t: int, quant: QuantizerSpec,
                        quad: QuadratureSpec = QuadratureSpec(),
                        adjustment: Optional[LepAdjustment] = None,
                        eve_t: Optional[int] = None) -> SarResult:
    """``2 H(<Re y(2)> | Re z_hat(2t))`` with Eve's LEP estimate of ``h(2)``.

    Raises
    ------
    UnsupportedModel
        For time-varying channel models.
    QuadratureError
        If no doubling of the Gauss-Hermite order up to ``quad.max_order``
        moves the result by less than ``quad.rel_tol`` (relative).
    """
    if not params.correlation.is_time_invariant:
        raise UnsupportedModel("quantized A-CBCA rate is derived for time-invariant channels")
    frame = 2 * t + 1
    if quant.levels == 1:
        return SarResult(ACBCA, frame, value=0.0)
    try:
        est = lep_combine(params, t, 2, eve_t)
    except NoObservableSignal:
        # nothing to condition on
        return SarResult(ACBCA, frame, value=quantized_entropy(params, quant))
    scale = 1.0 if adjustment is None else adjustment.noise_scale
    sz2 = est.sigma_z2 * scale
    th = quant.thresholds
    order = quad.hermite_order
    v1 = _acbca_integral(sz2, params.sigma_y2, th, order)
    while True:
        v2 = _acbca_integral(sz2, params.sigma_y2, th, 2 * order)
        if abs(v1 - v2) <= quad.rel_tol * abs(v2) + 1e-12:
            break
        if 4 * order > quad.max_order:
            raise QuadratureError(
                f"A-CBCA integral not converged: order {order} -> {v1:.10g}, "
                f"order {2 * order} -> {v2:.10g}")
        order *= 2
        v1 = v2
    value = min(max(v2, 0.0), 2.0 * quant.bits)
    return SarResult(ACBCA, frame, value=value)


def acbca_sar_lower_bound(params: ScenarioParams, t: int, quant: QuantizerSpec,
                          eve: str = EVE_FULL,
                          adjustment: Optional[LepAdjustment] = None,
                          eve_t: Optional[int] = None) -> SarResult:
    """``max{0, H(<y(2)>) - I(y(2); z)}``, valid for any channel model."""
    j, obs = eve_view(params, t, eve, adjustment, eve_t, lep_target=2)
    h = quantized_entropy(params, quant)
    i_yz = mutual_information(j, [Y2], obs)
    return SarResult(ACBCA, 2 * t + 1, value=max(0.0, h - i_yz))


# ---------------------------------------------------------------------------
# PLA


def pla_precision(joint: JointGaussian, obs: list[int]) -> np.ndarray:
    """Precision matrix of ``[x(2t+1), x(1)]`` when Eve forges ``x(2t+1)``.

    Under attack ``x(2t+1)`` is drawn from its legitimate conditional law given
    ``z`` and is conditionally independent of ``x(1)``. With
    ``S = R[x(1), z]^-1`` and ``T = R[x(2t+1), z]^-1`` partitioned with scalar
    leading corners, integrating ``z`` out gives the precision

        [[T11 - T12 E^-1 T21,      -T12 E^-1 S21],
         [    -S12 E^-1 T21,  S11 - S12 E^-1 S21]],   E = S22 + T22 - R_z^-1.
    """
    cov = joint.cov
    u = reduce_block(cov, obs)
    n = u.shape[1]
    if n == 0:
        # Eve sees nothing: x(2t+1) is forged from its marginal
        return np.diag([1.0 / cov[X2T1, X2T1].real, 1.0 / cov[X1, X1].real])

    def reduced(var_idx):
        m = np.empty((1 + n, 1 + n), dtype=cov.dtype)
        m[0, 0] = cov[var_idx, var_idx]
        cross = cov[var_idx, obs] @ u
        m[0, 1:] = cross
        m[1:, 0] = np.conj(cross)
        m[1:, 1:] = u.conj().T @ cov[np.ix_(obs, obs)] @ u
        return 0.5 * (m + m.conj().T)

    r_x1 = reduced(X1)
    r_xl = reduced(X2T1)
    S = hermitian_ops(r_x1, "R[x(1), z]").inverse
    T = hermitian_ops(r_xl, "R[x(2t+1), z]").inverse
    rz_inv = hermitian_ops(r_x1[1:, 1:], "R_z").inverse
    E = S[1:, 1:] + T[1:, 1:] - rz_inv
    e_inv = hermitian_ops(0.5 * (E + E.conj().T), "PLA matrix E").inverse
    T12, T21 = T[0, 1:], T[1:, 0]
    S12, S21 = S[0, 1:], S[1:, 0]
    P = np.empty((2, 2), dtype=np.result_type(S, T))
    P[0, 0] = T[0, 0] - T12 @ e_inv @ T21
    P[0, 1] = -T12 @ e_inv @ S21
    P[1, 0] = -S12 @ e_inv @ T21
    P[1, 1] = S[0, 0] - S12 @ e_inv @ S21
    return 0.5 * (P + P.conj().T)


def pla_sar(params: ScenarioParams, t: int, eve: str = EVE_FULL,
            adjustment: Optional[LepAdjustment] = None,
            eve_t: Optional[int] = None) -> SarResult:
    """KL exponent ``D(p_H0 || p_H1)`` of ``(x(2t+1), x(1))`` in bits."""
    j, obs = eve_view(params, t, eve, adjustment, eve_t, lep_target=1)
    legit = j.cov[np.ix_([X2T1, X1], [X2T1, X1])]
    P = pla_precision(j, obs)
    hermitian_ops(P, "PLA precision V")
    value = kl_from_precision(legit, P)
    return SarResult(PLA, 2 * t + 1, value=clamp_nonneg(value, "PLA rate"))


def pla_sar_upper(params: ScenarioParams, t: int, eve: str = EVE_FULL,
                  adjustment: Optional[LepAdjustment] = None,
                  eve_t: Optional[int] = None) -> SarResult:
    """``I(x(1); x(2t+1) | z)``, the rate bound for Eve's conditional forgery."""
    j, obs = eve_view(params, t, eve, adjustment, eve_t, lep_target=1)
    return SarResult(PLA, 2 * t + 1, value=conditional_mi(j, [X1], [X2T1], obs))
