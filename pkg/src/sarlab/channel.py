"""Scenario description and second-order statistics of all channel estimates.

Frame ``l`` (1-based) of Eve's observation vector ``z`` holds her estimate of
the Alice channel when ``l`` is odd and of the Bob channel when ``l`` is even.
Every covariance entry is derived from the generative model

    x(t)  = h(t) + sigma_x w_x(t)
    y(t)  = h(t) + sigma_y w_y(t)
    vA(t) = aA h(t) + sqrt(1 - aA^2) qA(t) + sigma_vA w_vA(t)
    vB(t) = aB h(t) + sqrt(1 - aB^2) qB(t) + sigma_vB w_vB(t)

with ``E[h(m) h(n)^*] = rho(m - n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .numerics import bessel_j0

TIME_INVARIANT = "time_invariant"
JAKES = "jakes"
TABLE = "table"

Q_CONSTANT = "constant"
Q_IID = "iid_per_frame"

# positions in the stacked legitimate + Eve vector returned by joint_cov()
X1, Y2, X2T1 = 0, 1, 2
Z0 = 3


@dataclass(frozen=True)
class CorrelationModel:
    """Time correlation ``rho(lag)`` of the legitimate channel."""

    kind: str = TIME_INVARIANT
    fdT: float = 0.0
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in (TIME_INVARIANT, JAKES, TABLE):
            raise ValueError(f"unknown correlation kind {self.kind!r}")
        if self.kind == JAKES and not (self.fdT >= 0 and math.isfinite(self.fdT)):
            raise ValueError("jakes model needs a finite fdT >= 0")
        if self.kind == TABLE:
            tab = tuple(float(v) for v in self.table)
            object.__setattr__(self, "table", tab)
            if not tab or tab[0] != 1.0:
                raise ValueError("table correlation must start with rho(0) = 1")
            if any(abs(v) > 1.0 for v in tab):
                raise ValueError("table correlation entries must satisfy |rho| <= 1")

    @classmethod
    def jakes(cls, fdT: float) -> "CorrelationModel":
        return cls(JAKES, fdT=float(fdT))

    @classmethod
    def from_table(cls, values: Sequence[float]) -> "CorrelationModel":
        return cls(TABLE, table=tuple(values))

    @property
    def is_time_invariant(self) -> bool:
        return self.kind == TIME_INVARIANT


TIME_INVARIANT_MODEL = CorrelationModel()


def rho_eval(model: CorrelationModel, lag: int) -> float:
    """Correlation ``rho(lag) = E[h(t) h(t + lag)^*]``; even in ``lag``."""
    lag = abs(int(lag))
    if model.kind == TIME_INVARIANT:
        return 1.0
    if model.kind == JAKES:
        if lag == 0:
            return 1.0
        return bessel_j0(2.0 * math.pi * model.fdT * lag)
    if lag >= len(model.table):
        raise ValueError(f"lag {lag} outside correlation table of length {len(model.table)}")
    return model.table[lag]


@dataclass(frozen=True)
class ScenarioParams:
    """Noise powers (linear), Eve correlations and time-correlation model.

    ``q_mode`` defaults to ``"constant"`` for time-invariant channels and to
    ``"iid_per_frame"`` otherwise.
    """

    sigma_x2: float = 0.1
    sigma_y2: float = 0.1
    sigma_vA2: float = 0.1
    sigma_vB2: float = 0.1
    alpha_A: float = 0.4
    alpha_B: float = 0.4
    correlation: CorrelationModel = field(default_factory=CorrelationModel)
    q_mode: Optional[str] = None

    def __post_init__(self):
        for name in ("sigma_x2", "sigma_y2", "sigma_vA2", "sigma_vB2"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)
        for name in ("alpha_A", "alpha_B"):
            v = float(getattr(self, name))
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [-1, 1], got {v}")
            object.__setattr__(self, name, v)
        mode = self.q_mode
        if mode is None:
            mode = Q_CONSTANT if self.correlation.is_time_invariant else Q_IID
        if mode not in (Q_CONSTANT, Q_IID):
            raise ValueError(f"unknown q_mode {mode!r}")
        if self.correlation.is_time_invariant and mode != Q_CONSTANT:
            raise ValueError("time-invariant channels require q_mode='constant'")
        object.__setattr__(self, "q_mode", mode)

    def replace(self, **changes) -> "ScenarioParams":
        if "correlation" in changes and "q_mode" not in changes:
            changes["q_mode"] = None
        return replace(self, **changes)

    @property
    def var_x(self) -> float:
        return 1.0 + self.sigma_x2

    @property
    def var_y(self) -> float:
        return 1.0 + self.sigma_y2


# Generative descriptors: (kind, frame) with kind in {"x", "y", "vA", "vB"}.

def _h_gain(p: ScenarioParams, kind: str) -> float:
    if kind in ("x", "y"):
        return 1.0
    return p.alpha_A if kind == "vA" else p.alpha_B


def _noise_power(p: ScenarioParams, kind: str) -> float:
    return {"x": p.sigma_x2, "y": p.sigma_y2, "vA": p.sigma_vA2, "vB": p.sigma_vB2}[kind]


def generative_cov(p: ScenarioParams, u: tuple, v: tuple) -> float:
    """``E[u v^*]`` for two estimate descriptors ``(kind, frame)``."""
    (ku, mu), (kv, mv) = u, v
    c = _h_gain(p, ku) * _h_gain(p, kv) * rho_eval(p.correlation, mu - mv)
    if ku == kv and ku in ("vA", "vB") and (mu == mv or p.q_mode == Q_CONSTANT):
        a = p.alpha_A if ku == "vA" else p.alpha_B
        c += 1.0 - a * a
    if ku == kv and mu == mv:
        c += _noise_power(p, ku)
    return c


def eve_descriptor(frame: int) -> tuple:
    return ("vA", frame) if frame % 2 == 1 else ("vB", frame)


@dataclass(frozen=True)
class CovarianceBundle:
    """Covariances among ``x(1)``, ``y(2)``, ``x(2t+1)`` and ``z(2 eve_t)``.

    ``rx1[l] = E[x(1) z_l^*]``, likewise ``ry2`` and ``rx2t1``.
    """

    t: int
    eve_t: int
    Rz: np.ndarray
    rx1: np.ndarray
    ry2: np.ndarray
    rx2t1: np.ndarray
    rho_xy: float
    rho_xx: float
    var_x: float
    var_y: float
    rho_x2t1_y2: float = 0.0

    @property
    def frame(self) -> int:
        return 2 * self.t + 1

    @property
    def n_obs(self) -> int:
        return self.Rz.shape[0]

    def joint_cov(self) -> np.ndarray:
        """Covariance of the stacked vector ``[x(1), y(2), x(2t+1), z...]``."""
        n = self.n_obs
        c = np.empty((Z0 + n, Z0 + n), dtype=np.result_type(self.Rz, float))
        c[X1, X1] = self.var_x
        c[Y2, Y2] = self.var_y
        c[X2T1, X2T1] = self.var_x
        c[X1, Y2] = self.rho_xy
        c[Y2, X1] = np.conj(self.rho_xy)
        c[X2T1, X1] = self.rho_xx
        c[X1, X2T1] = np.conj(self.rho_xx)
        c[X2T1, Y2] = self.rho_x2t1_y2
        c[Y2, X2T1] = np.conj(self.rho_x2t1_y2)
        for row, r in ((X1, self.rx1), (Y2, self.ry2), (X2T1, self.rx2t1)):
            c[row, Z0:] = r
            c[Z0:, row] = np.conj(r)
        c[Z0:, Z0:] = self.Rz
        return c


def build_covariances(params: ScenarioParams, t: int,
                      eve_t: Optional[int] = None) -> CovarianceBundle:
    """All second-order statistics needed at IDV frame ``2t + 1``.

    Parameters
    ----------
    params : ScenarioParams
    t : int
        Frame parameter, ``t >= 1``.
    eve_t : int, optional
        Eve observes frames ``1 .. 2 * eve_t``; defaults to ``t``.
    """
    t = int(t)
    if t < 1:
        raise ValueError("t must be >= 1")
    eve_t = t if eve_t is None else int(eve_t)
    if not 1 <= eve_t <= t:
        raise ValueError("eve_t must satisfy 1 <= eve_t <= t")
    frames = range(1, 2 * eve_t + 1)
    desc = [eve_descriptor(f) for f in frames]
    n = len(desc)
    Rz = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            Rz[i, j] = Rz[j, i] = generative_cov(params, desc[i], desc[j])
    x1, y2, xl = ("x", 1), ("y", 2), ("x", 2 * t + 1)
    rx1 = np.array([generative_cov(params, x1, d) for d in desc])
    ry2 = np.array([generative_cov(params, y2, d) for d in desc])
    rx2t1 = np.array([generative_cov(params, xl, d) for d in desc])
    return CovarianceBundle(
        t=t, eve_t=eve_t, Rz=Rz, rx1=rx1, ry2=ry2, rx2t1=rx2t1,
        rho_xy=generative_cov(params, x1, y2),
        rho_xx=generative_cov(params, xl, x1),
        var_x=params.var_x, var_y=params.var_y,
        rho_x2t1_y2=generative_cov(params, xl, y2),
    )
