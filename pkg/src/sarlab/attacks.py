"""Active attacks during the identification-association phase.

Both attacks act on the analysis only through variance changes, so each is a
transform of :class:`ScenarioParams` plus an optional rescaling of Eve's LEP
residual.
"""

from __future__ import annotations

from dataclasses import dataclass

from .channel import ScenarioParams
from .errors import UnsupportedModel
from .lep import LepAdjustment

NONE = "none"
PILOT_CONTAMINATION = "pilot_contamination"
ARTIFICIAL_NOISE = "artificial_noise"
KINDS = (NONE, PILOT_CONTAMINATION, ARTIFICIAL_NOISE)


@dataclass(frozen=True)
class AttackSpec:
    """Attack selector.

    Attributes
    ----------
    kind : str
        ``"none"``, ``"pilot_contamination"`` or ``"artificial_noise"``.
    sigma_G2 : float
        Power of the superimposed channel ``G`` (pilot contamination).
    sigma_N2 : float
        Added noise power at each legitimate receiver (artificial noise).
    """

    kind: str = NONE
    sigma_G2: float = 0.0
    sigma_N2: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if self.sigma_G2 < 0 or self.sigma_N2 < 0:
            raise ValueError("attack powers must be >= 0")

    @classmethod
    def pilot_contamination(cls, sigma_G2: float) -> "AttackSpec":
        return cls(PILOT_CONTAMINATION, sigma_G2=sigma_G2)

    @classmethod
    def artificial_noise(cls, sigma_N2: float) -> "AttackSpec":
        return cls(ARTIFICIAL_NOISE, sigma_N2=sigma_N2)

    @property
    def power(self) -> float:
        if self.kind == PILOT_CONTAMINATION:
            return self.sigma_G2
        if self.kind == ARTIFICIAL_NOISE:
            return self.sigma_N2
        return 0.0


def apply_attack(params: ScenarioParams, atk: AttackSpec) -> tuple[ScenarioParams, LepAdjustment]:
    """Scenario seen by the rate formulas under attack ``atk``.

    Pilot contamination divides ``sigma_x2``, ``sigma_y2`` and Eve's LEP
    residual power by ``1 + sigma_G2``. Artificial noise adds ``sigma_N2`` to
    ``sigma_x2`` and ``sigma_y2``. Eve's own estimation noise is left alone.

    Raises
    ------
    UnsupportedModel
        For a time-varying correlation model.
    """
    if atk.kind == NONE:
        return params, LepAdjustment()
    if not params.correlation.is_time_invariant:
        raise UnsupportedModel("attacks are analysed for time-invariant channels only")
    if atk.kind == PILOT_CONTAMINATION:
        g = 1.0 + atk.sigma_G2
        out = params.replace(sigma_x2=params.sigma_x2 / g, sigma_y2=params.sigma_y2 / g)
        return out, LepAdjustment(noise_scale=1.0 / g)
    out = params.replace(sigma_x2=params.sigma_x2 + atk.sigma_N2,
                         sigma_y2=params.sigma_y2 + atk.sigma_N2)
    return out, LepAdjustment()


def eve_for(atk: AttackSpec, default: str) -> str:
    """Eve model to use with ``atk``: PC is only defined on the LEP scalar."""
    return "lep" if atk.kind == PILOT_CONTAMINATION else default
