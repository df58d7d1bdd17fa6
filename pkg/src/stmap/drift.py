"""Drift evaluators: empirical, particle-approximated, and closed-form.

Every drift here is a weighted ratio of expectations over a bank of draws,
computed in the log domain with a max shift so that the unbounded raw
exponentials in the particle formulas can never overflow. The closed-form
mixture drift shares the same ratio kernel over components instead of draws.

Evaluation is pure given (t, x, scheme state); banks are immutable snapshots,
so drifts may be evaluated concurrently across particles.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _kernels
from .distributions import DensityTarget, Funnel, GaussianMixture, SampleBank
from .errors import CapabilityError, ConfigError, DegenerateWeightsError
from .schedule import NoiseConfig, Schedule, ScheduleValues, evaluate

FIXED_PER_RUN = "fixed"
PER_STEP = "per-step"

SCHEME_KINDS = (
    "ode",
    "zero",
    "first",
    "second",
    "piecewise",
    "mixture-closed",
    "funnel-reduced",
)

# pairwise problem size above which the compiled kernels take over
_KERNEL_THRESHOLD = 1 << 22

# chunk budget (doubles) for the dense probe tensors of the generic paths
_CHUNK_BUDGET = 1 << 24


# ---------------------------------------------------------------------------
# Weighted-ratio kernel


def weighted_ratio(log_weights, values) -> np.ndarray:
    """Log-domain weighted mean sum_i e^{l_i - L} v_i / sum_i e^{l_i - L}.

    L is the max log-weight, so adding any constant to all log-weights leaves
    the output unchanged up to rounding. Raises DegenerateWeightsError when
    every log-weight is -inf.
    """
    log_weights = np.asarray(log_weights, dtype=float)
    values = np.asarray(values, dtype=float)
    if log_weights.ndim != 1 or log_weights.size < 1:
        raise ValueError("log_weights must be a nonempty vector")
    if values.shape[0] != log_weights.shape[0]:
        raise ValueError("values must have one row per log-weight")
    shift = np.max(log_weights)
    if not np.isfinite(shift):
        if np.isnan(shift):
            raise ValueError("log_weights contain NaN")
        raise DegenerateWeightsError()
    w = np.exp(log_weights - shift)
    den = w.sum()
    if values.ndim == 1:
        return float(w @ values) / den
    return (w @ values) / den


def _batch_ratio(log_weights: np.ndarray, values: np.ndarray, base_index: int):
    """Row-wise weighted_ratio for (P, N) log-weights and (N, d) values."""
    shift = log_weights.max(axis=1, keepdims=True)
    bad = ~np.isfinite(shift[:, 0])
    if bad.any():
        raise DegenerateWeightsError(particle=base_index + int(np.argmax(bad)))
    w = np.exp(log_weights - shift)
    den = w.sum(axis=1)
    return (w @ values) / den[:, None]


def _as_batch(x, dim: int):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        if x.shape[0] != dim:
            raise ValueError(f"point has dim {x.shape[0]}, expected {dim}")
        return x[None, :], True
    if x.ndim != 2 or x.shape[1] != dim:
        raise ValueError(f"positions must be (n, {dim}), got {x.shape}")
    return x, False


def _check_time(t: float, lo_open: bool, hi_open: bool, what: str):
    lo_bad = t < 0.0 or (lo_open and t == 0.0)
    hi_bad = t > 1.0 or (hi_open and t == 1.0)
    if lo_bad or hi_bad:
        lo, hi = ("(" if lo_open else "["), (")" if hi_open else "]")
        raise ValueError(f"{what} is defined for t in {lo}0, 1{hi}, got {t}")


def _mixing_scalar(vals: ScheduleValues, noise: NoiseConfig, gamma: Optional[float]):
    g = noise.gamma if gamma is None else gamma
    return noise.epsilon * vals.beta + g * vals.sigma


# ---------------------------------------------------------------------------
# Banks


@dataclass(frozen=True)
class GaussianBank:
    """I.i.d. N(0, I_d / lam) draws used by the first/second order drifts."""

    draws: np.ndarray
    lam: float
    policy: str = FIXED_PER_RUN

    def __post_init__(self):
        draws = np.asarray(self.draws, dtype=float)
        if draws.ndim == 1:
            draws = draws[:, None]
        if draws.ndim != 2 or draws.shape[0] < 1:
            raise ConfigError("gaussian bank must be a nonempty (N, d) matrix")
        if not self.lam > 0:
            raise ConfigError(f"lambda must be > 0, got {self.lam}")
        if self.policy not in (FIXED_PER_RUN, PER_STEP):
            raise ConfigError(f"unknown bank policy {self.policy!r}")
        object.__setattr__(self, "draws", draws)

    @property
    def size(self) -> int:
        return self.draws.shape[0]

    @property
    def dim(self) -> int:
        return self.draws.shape[1]

    @staticmethod
    def draw(n: int, dim: int, lam: float, rng: np.random.Generator,
             policy: str = FIXED_PER_RUN) -> "GaussianBank":
        draws = rng.standard_normal((n, dim)) / np.sqrt(lam)
        return GaussianBank(draws, lam=lam, policy=policy)


# ---------------------------------------------------------------------------
# Sample-bank drifts (target samples only)


def drift_ode(t, x, bank: SampleBank, rho0, schedule: Schedule) -> np.ndarray:
    """Transport ODE drift from an initial density and a target sample bank.

    Monte Carlo realization of (log sigma)'[x - D(x)] where D is the bank mean
    weighted by rho0((x - beta*eta_i)/sigma).
    """
    _check_time(t, lo_open=False, hi_open=True, what="the transport ODE drift")
    vals = evaluate(schedule, t)
    X, squeeze = _as_batch(x, bank.dim)
    atoms = bank.samples

    if (
        isinstance(rho0, DensityTarget)
        and rho0.name == "cauchy1d"
        and bank.dim == 1
        and X.shape[0] * bank.size >= _KERNEL_THRESHOLD
    ):
        mean, ok = _kernels.cauchy_bank_mean_1d(
            np.ascontiguousarray(X[:, 0]), np.ascontiguousarray(atoms[:, 0]),
            vals.sigma, vals.beta,
        )
        if not ok.all():
            raise DegenerateWeightsError(particle=int(np.argmin(ok)))
        weighted = mean[:, None]
    else:
        weighted = np.empty_like(X)
        chunk = max(1, _CHUNK_BUDGET // (bank.size * bank.dim))
        for lo in range(0, X.shape[0], chunk):
            xc = X[lo : lo + chunk]
            probes = (xc[:, None, :] - vals.beta * atoms[None, :, :]) / vals.sigma
            logw = rho0.log_density(probes)
            weighted[lo : lo + chunk] = _batch_ratio(logw, atoms, lo)

    out = (vals.sigma_prime / vals.sigma) * (X - weighted)
    return out[0] if squeeze else out


def drift_zero_order(
    t, x, bank: SampleBank, schedule: Schedule, noise: NoiseConfig,
    gamma: Optional[float] = None,
) -> np.ndarray:
    """Particle drift needing only target samples (Gaussian kernel weights).

    Log-weights -|x - beta*eta_i|^2 / (2 l_t sigma_t), values
    sigma'_t (x - eta_i) / sigma_t. Undefined at the endpoints t = 0, 1.
    """
    if t in (0.0, 1.0):
        raise ValueError(
            "the zero-order drift is undefined at t = 0 and t = 1 "
            "(the endpoint kernels collapse)"
        )
    _check_time(t, lo_open=True, hi_open=True, what="the zero-order drift")
    vals = evaluate(schedule, t)
    ell_t = _mixing_scalar(vals, noise, gamma)
    ls = ell_t * vals.sigma
    if not ls > 0:
        raise ValueError(f"mixing scale l_t sigma_t = {ls} must be positive")
    X, squeeze = _as_batch(x, bank.dim)
    atoms = bank.samples

    if X.shape[0] * bank.size >= _KERNEL_THRESHOLD:
        mean, ok = _kernels.zero_order_bank_mean(
            np.ascontiguousarray(X), np.ascontiguousarray(atoms),
            vals.beta, 0.5 / ls,
        )
        if not ok.all():
            raise DegenerateWeightsError(particle=int(np.argmin(ok)))
        weighted = mean
    else:
        weighted = _zero_order_bank_mean_np(X, atoms, vals.beta, ls)

    out = (vals.sigma_prime / vals.sigma) * (X - weighted)
    return out[0] if squeeze else out


def _zero_order_bank_mean_np(X, atoms, beta, ls):
    # |x|^2 is constant per particle and cancels in the ratio
    atom_sq = np.sum(atoms * atoms, axis=1)
    logw = (2.0 * beta * (X @ atoms.T) - beta * beta * atom_sq) / (2.0 * ls)
    return _batch_ratio(logw, atoms, 0)


# ---------------------------------------------------------------------------
# Density-based drifts (auxiliary Gaussian banks)


def _first_order_weights_setup(t, gbank, schedule, noise, gamma):
    vals = evaluate(schedule, t)
    if abs(gbank.lam - noise.lam) > 1e-12:
        raise ConfigError(
            f"gaussian bank was drawn with lambda={gbank.lam}, noise has {noise.lam}"
        )
    ell_t = _mixing_scalar(vals, noise, gamma)
    s = np.sqrt(ell_t * vals.sigma)
    return vals, ell_t, s


def drift_first_order(
    t, x, gbank: GaussianBank, target, schedule: Schedule, noise: NoiseConfig,
    gamma: Optional[float] = None,
) -> np.ndarray:
    """Particle drift needing the target density.

    Log-weights beta|x - s xi_i|^2/(2 l) + (lam - beta)|xi_i|^2/2
    + log rho1(x - s xi_i) with s = sqrt(l_t sigma_t); values
    sqrt(l_t/sigma_t) sigma'_t xi_i. When s = 0 the value prefactor vanishes
    and the drift is identically zero.
    """
    _check_time(t, lo_open=False, hi_open=True, what="the first-order drift")
    vals, ell_t, s = _first_order_weights_setup(t, gbank, schedule, noise, gamma)
    X, squeeze = _as_batch(x, gbank.dim)
    if s == 0.0:
        out = np.zeros_like(X)
        return out[0] if squeeze else out

    ratio = _first_order_ratio(X, gbank, target, vals, ell_t, s, noise.lam)
    out = np.sqrt(ell_t / vals.sigma) * vals.sigma_prime * ratio
    return out[0] if squeeze else out


def _first_order_ratio(X, gbank, target, vals, ell_t, s, lam):
    """Weighted mean of the auxiliary draws; dispatches to compiled kernels."""
    xi = gbank.draws
    big = X.shape[0] * gbank.size >= _KERNEL_THRESHOLD
    c1 = vals.beta / (2.0 * ell_t)
    half_lmb = 0.5 * (lam - vals.beta)

    if big and isinstance(target, Funnel):
        xi1 = np.ascontiguousarray(xi[:, 0])
        xi_sq = np.sum(xi * xi, axis=1)
        xi_star_sq = xi_sq - xi1 * xi1
        exp_2as_xi1 = np.exp(2.0 * target.alpha * s * xi1)
        ratio, ok = _kernels.first_order_funnel_ratio(
            np.ascontiguousarray(X), np.ascontiguousarray(xi),
            xi1, xi_sq, xi_star_sq, exp_2as_xi1,
            s, c1, half_lmb, target.alpha, target.dim - 1,
        )
        if not ok.all():
            raise DegenerateWeightsError(particle=int(np.argmin(ok)))
        return ratio

    if big and isinstance(target, DensityTarget) and target.name == "sinusoid1d":
        ratio, ok = _kernels.first_order_sin1d_ratio(
            np.ascontiguousarray(X[:, 0]), np.ascontiguousarray(xi[:, 0]),
            s, c1, half_lmb,
        )
        if not ok.all():
            raise DegenerateWeightsError(particle=int(np.argmin(ok)))
        return ratio[:, None]

    xi_sq = np.sum(xi * xi, axis=1)
    out = np.empty_like(X)
    chunk = max(1, _CHUNK_BUDGET // (gbank.size * gbank.dim))
    for lo in range(0, X.shape[0], chunk):
        xc = X[lo : lo + chunk]
        probes = xc[:, None, :] - s * xi[None, :, :]
        dist_sq = np.sum((xc[:, None, :] - s * xi[None, :, :]) ** 2, axis=2)
        logw = c1 * dist_sq + half_lmb * xi_sq + target.log_density(probes)
        out[lo : lo + chunk] = _batch_ratio(logw, xi, lo)
    return out


def drift_second_order(
    t, x, gbank: GaussianBank, target, schedule: Schedule, noise: NoiseConfig,
    gamma: Optional[float] = None,
) -> np.ndarray:
    """Particle drift needing the target score.

    (beta'/beta)(x + (l_t/beta) R) where R averages grad log rho1 at the probe
    points under the first-order weights. Undefined at t = 0 (beta_0 = 0).
    """
    _check_time(t, lo_open=True, hi_open=False, what="the second-order drift")
    vals, ell_t, s = _first_order_weights_setup(t, gbank, schedule, noise, gamma)
    X, squeeze = _as_batch(x, gbank.dim)
    if getattr(target, "grad_log_density", None) is None:
        raise CapabilityError("the second-order drift needs grad_log_density")

    xi = gbank.draws
    xi_sq = np.sum(xi * xi, axis=1)
    c1 = vals.beta / (2.0 * ell_t)
    half_lmb = 0.5 * (noise.lam - vals.beta)
    ratio = np.empty_like(X)
    chunk = max(1, _CHUNK_BUDGET // (gbank.size * gbank.dim))
    for lo in range(0, X.shape[0], chunk):
        xc = X[lo : lo + chunk]
        probes = xc[:, None, :] - s * xi[None, :, :]
        dist_sq = np.sum((xc[:, None, :] - s * xi[None, :, :]) ** 2, axis=2)
        logw = c1 * dist_sq + half_lmb * xi_sq + target.log_density(probes)
        grads = target.grad_log_density(probes)
        shift = logw.max(axis=1, keepdims=True)
        bad = ~np.isfinite(shift[:, 0])
        if bad.any():
            raise DegenerateWeightsError(particle=lo + int(np.argmax(bad)))
        w = np.exp(logw - shift)
        ratio[lo : lo + chunk] = (
            np.einsum("pn,pnd->pd", w, grads) / w.sum(axis=1)[:, None]
        )
    out = (vals.beta_prime / vals.beta) * (X + (ell_t / vals.beta) * ratio)
    return out[0] if squeeze else out


def drift_piecewise(
    t, x, gbank: GaussianBank, target, schedule: Schedule, noise: NoiseConfig,
    gamma: Optional[float] = None,
) -> np.ndarray:
    """First-order drift on [0, 1/2), second-order on [1/2, 1]."""
    if t < 0.5:
        return drift_first_order(t, x, gbank, target, schedule, noise, gamma)
    return drift_second_order(t, x, gbank, target, schedule, noise, gamma)


# ---------------------------------------------------------------------------
# Closed-form drifts


def _mixture_component_terms(comp, vals, ell_t, X):
    """Log-weight and value row of one mixture component at positions X."""
    ls = ell_t * vals.sigma
    b2 = vals.beta * vals.beta
    d = X.shape[1]
    y = X - vals.beta * comp.mean
    if comp.diag is not None:
        av = ls + b2 * comp.diag
        quad = np.sum(y * y / av, axis=1)
        logdet = float(np.log(av).sum())
        value = ((ell_t - vals.beta * comp.diag) * X - ell_t * comp.mean) / av
    else:
        av = ls + b2 * comp.evals
        yq = y @ comp.evecs
        quad = np.sum(yq * yq / av, axis=1)
        logdet = float(np.log(av).sum())
        xq = X @ comp.evecs
        mq = comp.mean @ comp.evecs
        vq = ((ell_t - vals.beta * comp.evals) * xq - ell_t * mq) / av
        value = vq @ comp.evecs.T
    logw = np.log(comp.weight) - 0.5 * (d * np.log(2.0 * np.pi) + logdet + quad)
    return logw, value


def drift_mixture_closed(
    t, x, mixture: GaussianMixture, schedule: Schedule, noise: NoiseConfig,
    gamma: Optional[float] = None,
) -> np.ndarray:
    """Exact drift for a Gaussian-mixture target (no Monte Carlo).

    Component i enters with weight w_i N(x | beta m_i, A_i) and value
    sigma' A_i^{-1}[(l I - beta Cov_i) x - l m_i], A_i = l sigma I + beta^2
    Cov_i. A_i stays SPD for degenerate covariances whenever l sigma > 0.
    """
    _check_time(t, lo_open=False, hi_open=True, what="the mixture closed-form drift")
    vals = evaluate(schedule, t)
    ell_t = _mixing_scalar(vals, noise, gamma)
    if not ell_t * vals.sigma > 0:
        raise ValueError(f"mixing scale l_t sigma_t = {ell_t * vals.sigma} must be positive")
    X, squeeze = _as_batch(x, mixture.dim)

    logws = np.stack(
        [_mixture_component_terms(c, vals, ell_t, X)[0] for c in mixture.components],
        axis=1,
    )
    shift = logws.max(axis=1, keepdims=True)
    w = np.exp(logws - shift)
    den = w.sum(axis=1)
    num = np.zeros_like(X)
    for i, comp in enumerate(mixture.components):
        _, value = _mixture_component_terms(comp, vals, ell_t, X)
        num += w[:, i : i + 1] * value
    out = vals.sigma_prime * num / den[:, None]
    return out[0] if squeeze else out


def drift_funnel_reduced(
    t, x, funnel: Funnel, xi_bank: np.ndarray, schedule: Schedule,
    noise: NoiseConfig, gamma: Optional[float] = None,
) -> np.ndarray:
    """Semi-analytic funnel drift: Monte Carlo only over the first coordinate.

    The tail block is integrated in closed form, leaving a 1-D bank average
    with per-draw tail variance V_i = l sigma + beta^2 e^{2 alpha xi_i}.
    """
    _check_time(t, lo_open=False, hi_open=True, what="the reduced funnel drift")
    vals = evaluate(schedule, t)
    ell_t = _mixing_scalar(vals, noise, gamma)
    ls = ell_t * vals.sigma
    if not ls > 0:
        raise ValueError(f"mixing scale l_t sigma_t = {ls} must be positive")
    X, squeeze = _as_batch(x, funnel.dim)
    xi = np.ascontiguousarray(np.asarray(xi_bank, dtype=float).reshape(-1))
    if xi.size < 1:
        raise ConfigError("the reduced funnel drift needs a nonempty 1-D bank")

    x1 = np.ascontiguousarray(X[:, 0])
    xstar = X[:, 1:]
    xstar_sq = np.ascontiguousarray(np.sum(xstar * xstar, axis=1))
    exp_2a_xi = np.exp(2.0 * funnel.alpha * xi)
    dm1 = funnel.dim - 1

    if X.shape[0] * xi.size >= _KERNEL_THRESHOLD:
        r1, g, ok = _kernels.funnel_reduced_ratio(
            x1, xstar_sq, xi, exp_2a_xi, ls, vals.beta, ell_t, dm1
        )
        if not ok.all():
            raise DegenerateWeightsError(particle=int(np.argmin(ok)))
    else:
        v = ls + vals.beta * vals.beta * exp_2a_xi
        z = x1[:, None] - vals.beta * xi[None, :]
        logw = (
            -z * z / (2.0 * ls)
            - xstar_sq[:, None] / (2.0 * v[None, :])
            - 0.5 * dm1 * np.log(v)[None, :]
        )
        shift = logw.max(axis=1, keepdims=True)
        w = np.exp(logw - shift)
        den = w.sum(axis=1)
        r1 = (w @ (-xi) + x1 * den) / den
        g = (w @ ((ell_t - vals.beta * exp_2a_xi) / v)) / den

    out = np.empty_like(X)
    out[:, 0] = (vals.sigma_prime / vals.sigma) * r1
    out[:, 1:] = vals.sigma_prime * g[:, None] * xstar
    return out[0] if squeeze else out


def score_relation_check(
    t, x, mixture: GaussianMixture, schedule: Schedule, noise: NoiseConfig,
    gamma: Optional[float] = None,
) -> float:
    """Residual of the drift/score identity for a single-Gaussian target.

    Compares the closed-form drift against (beta'/beta)[l_t grad log phi_t(x)
    + x], where phi_t is the known Gaussian marginal at time t. Returns
    |difference| / (1 + |x|).
    """
    if mixture.n_components != 1:
        raise ValueError("the score relation check needs a single-Gaussian target")
    _check_time(t, lo_open=True, hi_open=True, what="the score relation check")
    vals = evaluate(schedule, t)
    ell_t = _mixing_scalar(vals, noise, gamma)
    comp = mixture.components[0]
    x = np.atleast_1d(np.asarray(x, dtype=float))

    b = drift_mixture_closed(t, x, mixture, schedule, noise, gamma)
    ls = ell_t * vals.sigma
    b2 = vals.beta * vals.beta
    y = x - vals.beta * comp.mean
    if comp.diag is not None:
        score = -y / (ls + b2 * comp.diag)
    else:
        av = ls + b2 * comp.evals
        score = -((y @ comp.evecs) / av) @ comp.evecs.T
    rhs = (vals.beta_prime / vals.beta) * (ell_t * score + x)
    return float(np.linalg.norm(b - rhs) / (1.0 + np.linalg.norm(x)))


# ---------------------------------------------------------------------------
# Scheme binding


@dataclass(frozen=True)
class DriftScheme:
    """Binds one drift formula to its target data, schedule and noise.

    ``ell_gamma`` overrides the gamma entering the mixing scalar (0 for a
    point-mass initial law); None means ``noise.gamma``. For integration the
    zero-order scheme evaluates its exact t = 0 limit, where the kernel
    weights are constant and the drift is sigma'_0 (x - bank mean).
    """

    kind: str
    schedule: Schedule
    noise: NoiseConfig
    target: object = None
    rho0: Optional[DensityTarget] = None
    bank: Optional[SampleBank] = None
    gbank: Optional[GaussianBank] = None
    xi_bank: Optional[np.ndarray] = field(default=None, repr=False)
    ell_gamma: Optional[float] = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ConfigError(f"unknown scheme {self.kind!r}; expected {SCHEME_KINDS}")
        need = {
            "ode": self.bank is not None and self.rho0 is not None,
            "zero": self.bank is not None,
            "first": self.gbank is not None and self.target is not None,
            "second": self.gbank is not None and self.target is not None,
            "piecewise": self.gbank is not None and self.target is not None,
            "mixture-closed": isinstance(self.target, GaussianMixture),
            "funnel-reduced": isinstance(self.target, Funnel)
            and self.xi_bank is not None,
        }[self.kind]
        if not need:
            raise ConfigError(f"scheme {self.kind!r} is missing required components")
        if self.kind in ("second", "piecewise"):
            if getattr(self.target, "grad_log_density", None) is None:
                raise ConfigError(f"scheme {self.kind!r} needs grad_log_density")

    @property
    def dim(self) -> int:
        if self.bank is not None:
            return self.bank.dim
        if self.gbank is not None:
            return self.gbank.dim
        return self.target.dim

    @property
    def per_step(self) -> bool:
        return self.gbank is not None and self.gbank.policy == PER_STEP

    def drift(self, t: float, x) -> np.ndarray:
        kind = self.kind
        if kind == "ode":
            return drift_ode(t, x, self.bank, self.rho0, self.schedule)
        if kind == "zero":
            if t == 0.0:
                vals = evaluate(self.schedule, 0.0)
                X, squeeze = _as_batch(x, self.dim)
                out = vals.sigma_prime * (X - self.bank.samples.mean(axis=0))
                return out[0] if squeeze else out
            return drift_zero_order(
                t, x, self.bank, self.schedule, self.noise, self.ell_gamma
            )
        if kind == "first":
            return drift_first_order(
                t, x, self.gbank, self.target, self.schedule, self.noise, self.ell_gamma
            )
        if kind == "second":
            return drift_second_order(
                t, x, self.gbank, self.target, self.schedule, self.noise, self.ell_gamma
            )
        if kind == "piecewise":
            return drift_piecewise(
                t, x, self.gbank, self.target, self.schedule, self.noise, self.ell_gamma
            )
        if kind == "mixture-closed":
            return drift_mixture_closed(
                t, x, self.target, self.schedule, self.noise, self.ell_gamma
            )
        return drift_funnel_reduced(
            t, x, self.target, self.xi_bank, self.schedule, self.noise, self.ell_gamma
        )

    def resampled(self, rng: np.random.Generator) -> "DriftScheme":
        """Fresh bank snapshot of the same shape (per-step policy)."""
        if self.gbank is not None:
            gbank = GaussianBank.draw(
                self.gbank.size, self.gbank.dim, self.gbank.lam, rng,
                policy=self.gbank.policy,
            )
            return replace(self, gbank=gbank)
        if self.bank is not None:
            if self.target is None or not hasattr(self.target, "sample"):
                raise ConfigError("resampling a sample bank needs a target sampler")
            bank = SampleBank.from_target(
                self.target, self.bank.size, rng, source=self.bank.source
            )
            return replace(self, bank=bank)
        if self.xi_bank is not None:
            return replace(self, xi_bank=rng.standard_normal(self.xi_bank.shape[0]))
        return self
