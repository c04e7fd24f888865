"""Secure authentication rates of channel-based user authentication schemes."""

from .attacks import AttackSpec, apply_attack
from .channel import CorrelationModel, CovarianceBundle, ScenarioParams, build_covariances, rho_eval
from .errors import (
    ConfigError,
    InternalConsistencyError,
    NoObservableSignal,
    QuadratureError,
    SarlabError,
    SingularMatrix,
    UnsupportedModel,
)
from .gaussian_info import JointGaussian, conditional_mi, kl_zero_mean_gaussians, mutual_information
from .lep import LepAdjustment, LepEstimate, lep_combine, lep_pick_for_scbca, lep_time_invariant_limit
from .numerics import QuadratureSpec, bessel_j0, gauss_hermite, hermitian_ops, q_function, q_inverse
from .sar import (
    QuantizerSpec,
    SarResult,
    acbca_sar_continuous,
    acbca_sar_lower_bound,
    acbca_sar_quantized,
    choose_vsat,
    quantizer_for,
    pla_sar,
    pla_sar_upper,
    scbca_sar_bounds,
)

__version__ = "0.1.0"
