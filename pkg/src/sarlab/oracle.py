"""Seeded Monte-Carlo sampler and plug-in estimators.

The sampler draws every latent variable of the generative model explicitly
and builds the estimates from them, so it shares no algebra with
:mod:`sarlab.channel`. Estimators fit sample covariances and push them
through the closed forms of :mod:`sarlab.gaussian_info`.

Random streams
--------------
Each latent variable ``name`` (``h``, ``qA``, ``qB``, ``wx``, ``wy``,
``wvA``, ``wvB``, ``wfresh``) has a column id in :data:`STREAM_IDS`. Shard
``s`` of that column uses a Philox generator seeded with
``SeedSequence(seed, spawn_key=(column_id, s))``; shards hold
:data:`SHARD_SIZE` samples. Within a shard, a column of ``m`` complex values
per sample consumes ``2 m`` uniforms per sample in row-major order, two per
complex value (Box-Muller). Results do not depend on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channel import Q_CONSTANT, ScenarioParams, build_covariances, eve_descriptor, rho_eval
from .errors import SingularMatrix
from .gaussian_info import JointGaussian, conditional_mi, kl_zero_mean_gaussians, mutual_information
from .kernels import box_muller, quantized_entropy_gaussian
from .lep import LepEstimate
from .numerics import MAX_CONDITION, condition_number

SHARD_SIZE = 1 << 17
N_BATCHES = 10
STREAM_IDS = {"h": 0, "qA": 1, "qB": 2, "wx": 3, "wy": 4, "wvA": 5, "wvB": 6, "wfresh": 7}


def _stream(seed: int, column: str, shard: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(STREAM_IDS[column], shard))
    return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """ZMUPCG samples from exactly two uniforms each.

    ``|w|^2 = -ln(1 - u1)`` is unit-mean exponential and ``arg w = 2 pi u2``.
    """
    shape = tuple(np.atleast_1d(shape))
    u = rng.random(shape + (2,))
    return box_muller(u.reshape(-1, 2)).reshape(shape)


def _draw(seed: int, column: str, n: int, width: int, workers: int = 1) -> np.ndarray:
    n_shards = -(-n // SHARD_SIZE)

    def shard(s):
        m = min(SHARD_SIZE, n - s * SHARD_SIZE)
        return complex_normal(_stream(seed, column, s), (m, width))

    if workers > 1 and n_shards > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(shard, range(n_shards)))
    else:
        parts = [shard(s) for s in range(n_shards)]
    return np.concatenate(parts, axis=0)


def channel_sqrt(params: ScenarioParams, n_frames: int) -> np.ndarray:
    """``L`` with ``L L^H`` the Toeplitz covariance of ``h(1 .. n_frames)``.

    Raises
    ------
    SingularMatrix
        When the correlation sequence is not positive semidefinite.
    """
    r = np.array([[rho_eval(params.correlation, i - j) for j in range(n_frames)]
                  for i in range(n_frames)])
    ev, vec = np.linalg.eigh(r)
    if ev[0] < -1e-10 * max(ev[-1], 1.0):
        raise SingularMatrix("channel Toeplitz covariance", math.inf)
    return vec * np.sqrt(np.clip(ev, 0.0, None))


@dataclass
class SampleSet:
    """Monte-Carlo draws of one scenario.

    ``columns`` maps names to ``(n_samples, width)`` complex arrays:
    ``x1``, ``y2``, ``x2t1`` (width 1), ``z`` (width ``2 eve_t``) and the
    latents ``h`` (frames ``1 .. 2t+1``), ``qA``, ``qB``.
    """

    seed: int
    n_samples: int
    t: int
    params: ScenarioParams
    columns: dict = field(default_factory=dict)

    def stacked(self, names: Sequence[str]) -> np.ndarray:
        return np.concatenate([self.columns[n] for n in names], axis=1)

    def with_column(self, name: str, values: np.ndarray) -> "SampleSet":
        cols = dict(self.columns)
        cols[name] = np.asarray(values).reshape(self.n_samples, -1)
        return SampleSet(self.seed, self.n_samples, self.t, self.params, cols)


def sample_scenario(params: ScenarioParams, t: int, n_samples: int, seed: int,
                    eve_t: Optional[int] = None, workers: int = 1) -> SampleSet:
    """Draw ``n_samples`` independent realizations of every estimate."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    t = int(t)
    eve_t = t if eve_t is None else int(eve_t)
    if not 1 <= eve_t <= t:
        raise ValueError("eve_t must satisfy 1 <= eve_t <= t")
    n_frames = 2 * t + 1
    n_eve = 2 * eve_t
    n = int(n_samples)

    if params.correlation.is_time_invariant:
        h = np.repeat(_draw(seed, "h", n, 1, workers), n_frames, axis=1)
    else:
        w = _draw(seed, "h", n, n_frames, workers)
        h = w @ channel_sqrt(params, n_frames).T
    q_width = 1 if params.q_mode == Q_CONSTANT else n_eve
    qA = _draw(seed, "qA", n, q_width, workers)
    qB = _draw(seed, "qB", n, q_width, workers)
    wx = _draw(seed, "wx", n, 2, workers)
    wy = _draw(seed, "wy", n, 1, workers)
    wvA = _draw(seed, "wvA", n, n_eve, workers)
    wvB = _draw(seed, "wvB", n, n_eve, workers)

    sx, sy = math.sqrt(params.sigma_x2), math.sqrt(params.sigma_y2)
    x1 = h[:, 0:1] + sx * wx[:, 0:1]
    y2 = h[:, 1:2] + sy * wy[:, 0:1]
    x2t1 = h[:, n_frames - 1:n_frames] + sx * wx[:, 1:2]
    z = np.empty((n, n_eve), dtype=complex)
    for i in range(n_eve):
        frame = i + 1
        kind, _ = eve_descriptor(frame)
        if kind == "vA":
            a, q, s2, wv = params.alpha_A, qA, params.sigma_vA2, wvA
        else:
            a, q, s2, wv = params.alpha_B, qB, params.sigma_vB2, wvB
        qi = q[:, 0] if q_width == 1 else q[:, i]
        z[:, i] = a * h[:, i] + math.sqrt(max(1.0 - a * a, 0.0)) * qi + math.sqrt(s2) * wv[:, i]
    cols = {"x1": x1, "y2": y2, "x2t1": x2t1, "z": z, "h": h, "qA": qA, "qB": qB}
    return SampleSet(int(seed), n, t, params, cols)


def sample_cov(data: np.ndarray) -> np.ndarray:
    """Zero-mean plug-in covariance ``E[u u^H]`` of the rows of ``data``."""
    return data.T @ data.conj() / data.shape[0]


# ---------------------------------------------------------------------------
# covariance fidelity


@dataclass(frozen=True)
class EntryCheck:
    name: str
    analytic: float
    estimate: float
    std_err: float

    @property
    def z_score(self) -> float:
        if self.std_err == 0.0:
            return 0.0 if self.estimate == self.analytic else math.inf
        return (self.estimate - self.analytic) / self.std_err


def covariance_checks(s: SampleSet, eve_t: Optional[int] = None) -> list[EntryCheck]:
    """Compare every bundle entry with its sample estimate.

    The model covariances are real, so the real part of each sample moment
    is the estimator; the standard error is that of a sample mean of the
    per-draw products.
    """
    b = build_covariances(s.params, s.t, eve_t)
    names = ["x1", "y2", "x2t1"] + [f"z{i + 1}" for i in range(b.n_obs)]
    data = s.stacked(["x1", "y2", "x2t1", "z"])
    analytic = b.joint_cov()
    out = []
    n = data.shape[0]
    for i in range(len(names)):
        for j in range(i, len(names)):
            prod = (data[:, i] * data[:, j].conj()).real
            out.append(EntryCheck(f"{names[i]},{names[j]}", float(analytic[i, j].real),
                                  float(prod.mean()), float(prod.std(ddof=1) / math.sqrt(n))))
    return out


# ---------------------------------------------------------------------------
# Gaussian measures


@dataclass(frozen=True)
class MeasureRequest:
    """Which measure to estimate.

    ``mi``: ``I(a; b)``. ``cond_mi``: ``I(a; b | c)``. ``kl``:
    ``D(N(0, cov[a]) || N(0, cov[b]))`` with ``a`` and ``b`` of equal width.
    Entries are column names of the sample set.
    """

    kind: str
    a: tuple
    b: tuple
    c: tuple = ()

    def __post_init__(self):
        if self.kind not in ("mi", "cond_mi", "kl"):
            raise ValueError(f"unknown measure {self.kind!r}")
        if self.kind == "cond_mi" and not self.c:
            raise ValueError("cond_mi needs a conditioning block")


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_err: float


def _measure_on(data_cols: dict, req: MeasureRequest) -> float:
    if req.kind == "kl":
        p = sample_cov(np.concatenate([data_cols[n] for n in req.a], axis=1))
        q = sample_cov(np.concatenate([data_cols[n] for n in req.b], axis=1))
        for m in (p, q):
            if condition_number(m) > MAX_CONDITION:
                raise SingularMatrix("sample covariance", condition_number(m))
        return kl_zero_mean_gaussians(p, q)
    names = list(dict.fromkeys(req.a + req.b + req.c))
    widths = [data_cols[n].shape[1] for n in names]
    offsets = np.cumsum([0] + widths)
    pos = {n: list(range(offsets[k], offsets[k + 1])) for k, n in enumerate(names)}
    cov = sample_cov(np.concatenate([data_cols[n] for n in names], axis=1))
    if condition_number(cov) > MAX_CONDITION:
        raise SingularMatrix("sample covariance", condition_number(cov))
    j = JointGaussian(cov)

    def idx(block):
        return [i for n in block for i in pos[n]]

    if req.kind == "mi":
        return mutual_information(j, idx(req.a), idx(req.b))
    return conditional_mi(j, idx(req.a), idx(req.b), idx(req.c))


def _quad_forms(u: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Per-row ``u^H M u`` matching the ``E[u u^H]`` layout of :func:`sample_cov`."""
    return ((u.conj() @ m) * u).sum(axis=1).real


def _influence(data_cols: dict, req: MeasureRequest) -> np.ndarray:
    """Per-sample first-order influence of the plug-in measure (nats, up to a constant).

    A log-determinant of a fitted block ``S`` has influence ``u_S^H S^-1 u_S``.
    """
    if req.kind == "kl":
        a = np.concatenate([data_cols[n] for n in req.a], axis=1)
        b = np.concatenate([data_cols[n] for n in req.b], axis=1)
        p, q = sample_cov(a), sample_cov(b)
        qi, pi = np.linalg.inv(q), np.linalg.inv(p)
        return _quad_forms(a, qi - pi) + _quad_forms(b, qi - qi @ p @ qi)
    names = list(dict.fromkeys(req.a + req.b + req.c))
    u_all = {n: data_cols[n] for n in names}

    def logdet_term(block):
        if not block:
            return 0.0
        u = np.concatenate([u_all[n] for n in dict.fromkeys(block)], axis=1)
        return _quad_forms(u, np.linalg.inv(sample_cov(u)))

    a, b, c = req.a, req.b, req.c
    return logdet_term(a + c) + logdet_term(b + c) - logdet_term(c) - logdet_term(a + b + c)


def mc_gaussian_measures(s: SampleSet, request: MeasureRequest, se_method: str = "delta") -> McEstimate:
    """Plug-in estimate of a Gaussian measure with its standard error.

    ``se_method="delta"`` (default) uses the per-sample influence of the
    plug-in functional. ``"batch"`` uses the spread of the estimate over
    ten equal batches, which carries chi-square noise with nine degrees of
    freedom.

    Raises
    ------
    SingularMatrix
        If a fitted sample covariance is rank deficient.
    """
    if se_method not in ("delta", "batch"):
        raise ValueError(f"unknown se_method {se_method!r}")
    est = _measure_on(s.columns, request)
    n = s.n_samples
    if se_method == "delta":
        if n < 2:
            return McEstimate(est, math.nan)
        psi = _influence(s.columns, request)
        return McEstimate(est, float(psi.std(ddof=1) / math.sqrt(n) / math.log(2)))
    if n < 2 * N_BATCHES:
        return McEstimate(est, math.nan)
    edges = np.linspace(0, n, N_BATCHES + 1).astype(int)
    vals = []
    for k in range(N_BATCHES):
        sl = slice(edges[k], edges[k + 1])
        vals.append(_measure_on({name: col[sl] for name, col in s.columns.items()}, request))
    return McEstimate(est, float(np.std(vals, ddof=1) / math.sqrt(N_BATCHES)))


def forge_attack(s: SampleSet, observed: Sequence[str], target: str = "x2t1",
                 train: Optional[SampleSet] = None, name: str = "x_attack") -> SampleSet:
    """Add Eve's forgery of ``target`` drawn from its fitted law given ``observed``.

    The regression ``target ~ g observed`` and the residual power are fitted
    on ``train`` (an independent sample set); fresh noise comes from the
    ``wfresh`` stream of ``s``.
    """
    train = s if train is None else train
    zt = train.stacked(list(observed))
    yt = train.columns[target]
    rz = sample_cov(zt)
    r = zt.T @ yt.conj() / zt.shape[0]
    g = np.linalg.solve(rz, r)
    resid = float((sample_cov(yt) - r.conj().T @ g).real[0, 0])
    fresh = _draw(s.seed, "wfresh", s.n_samples, 1)
    forged = s.stacked(list(observed)) @ g.conj() + math.sqrt(max(resid, 0.0)) * fresh
    return s.with_column(name, forged)


def lep_column(s: SampleSet, lep: LepEstimate, name: str = "z_hat") -> SampleSet:
    """Add Eve's scalar estimate ``c z`` as a column."""
    return s.with_column(name, s.columns["z"] @ lep.combiner)


# ---------------------------------------------------------------------------
# quantized conditional entropy


def mc_quantized_cond_entropy(s: SampleSet, quant, lep: LepEstimate) -> McEstimate:
    """``2 H(<Re y(2)> | Re z_hat)`` averaged over sampled ``z``.

    For each draw ``b = Re(c z)``; the cell masses of ``Re y(2)`` given ``b``
    come from the Gaussian law of ``Re y(2) = Re h(2) + Re(noise)`` after
    integrating ``h`` against its conditional density given ``b``.
    """
    if quant.levels == 1:
        return McEstimate(0.0, 0.0)
    b = (s.columns["z"] @ lep.combiner).real
    var_b = lep.variance / 2.0
    cov_yb = np.real(lep.corr_to_y2) / 2.0
    var_y = s.params.var_y / 2.0
    centers = (cov_yb / var_b) * b
    sd = math.sqrt(max(var_y - cov_yb ** 2 / var_b, 0.0))
    h = 2.0 * quantized_entropy_gaussian(centers, sd, quant.thresholds)
    return McEstimate(float(h.mean()), float(h.std(ddof=1) / math.sqrt(len(h))))


__all__ = [
    "SampleSet", "sample_scenario", "sample_cov", "complex_normal", "channel_sqrt",
    "EntryCheck", "covariance_checks", "MeasureRequest", "McEstimate",
    "mc_gaussian_measures", "forge_attack", "lep_column", "mc_quantized_cond_entropy",
    "STREAM_IDS", "SHARD_SIZE",
]
