"""Initial and target distributions: samplers, densities, gradients.

Targets come in four concrete representations: Gaussian mixtures, the
anisotropic funnel, generic density targets (log-density plus optional
gradient and sampler), and plain sample banks. Density targets may be
unnormalized; every drift in :mod:`stmap.drift` is a ratio of expectations,
so normalizing constants cancel.

All distribution objects are immutable after construction and shareable
across threads; sampling takes an explicit per-call random stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import logsumexp

from .errors import CapabilityError, ConfigError

_LOG_2PI = math.log(2.0 * math.pi)

GAUSSIAN = "gaussian"
DIRAC = "dirac"
DENSITY = "density"


# ---------------------------------------------------------------------------
# Gaussian mixture


@dataclass(frozen=True)
class Component:
    """One mixture component with a precomputed symmetric factorization.

    ``diag`` holds the diagonal entries when the covariance is diagonal,
    otherwise ``evals``/``evecs`` hold the (clipped) eigendecomposition of the
    full matrix. Degenerate (PSD, singular) covariances are allowed; only the
    density/score queries reject them.
    """

    weight: float
    mean: np.ndarray
    diag: Optional[np.ndarray]
    evals: np.ndarray
    evecs: Optional[np.ndarray]

    @property
    def degenerate(self) -> bool:
        top = float(self.evals.max()) if self.evals.size else 0.0
        return bool((self.evals <= 1e-12 * max(top, 1.0)).any())


class GaussianMixture:
    """Mixture of Gaussians sum_i w_i N(x | mean_i, cov_i).

    ``covs`` entries are either 1-D arrays (diagonal, entries >= 0) or 2-D
    symmetric PSD matrices (possibly degenerate).
    """

    def __init__(self, weights, means, covs):
        weights = np.asarray(weights, dtype=float)
        means = np.asarray(means, dtype=float)
        if means.ndim != 2:
            raise ConfigError("means must be an (n, d) array")
        n, d = means.shape
        problems = []
        if weights.shape != (n,):
            problems.append(f"weights shape {weights.shape} != ({n},)")
        elif (weights <= 0).any():
            problems.append("every mixture weight must be > 0")
        elif abs(weights.sum() - 1.0) > 1e-12:
            problems.append(f"weights sum to {weights.sum()!r}, not 1")
        if len(covs) != n:
            problems.append(f"{len(covs)} covariances for {n} components")
        if problems:
            raise ConfigError(problems)

        comps: List[Component] = []
        for i, cov in enumerate(covs):
            cov = np.asarray(cov, dtype=float)
            if cov.ndim == 1:
                if cov.shape != (d,):
                    raise ConfigError(f"component {i}: diagonal has shape {cov.shape}")
                if (cov < 0).any():
                    raise ConfigError(f"component {i}: negative diagonal entry")
                comps.append(Component(float(weights[i]), means[i], cov, cov, None))
            elif cov.ndim == 2:
                if cov.shape != (d, d):
                    raise ConfigError(f"component {i}: matrix has shape {cov.shape}")
                if np.abs(cov - cov.T).max() > 1e-10:
                    raise ConfigError(f"component {i}: matrix not symmetric to 1e-10")
                evals, evecs = np.linalg.eigh(0.5 * (cov + cov.T))
                if evals.min() < -1e-10:
                    raise ConfigError(
                        f"component {i}: not PSD (min eigenvalue {evals.min():.3e})"
                    )
                evals = np.clip(evals, 0.0, None)
                comps.append(Component(float(weights[i]), means[i], None, evals, evecs))
            else:
                raise ConfigError(f"component {i}: covariance must be 1-D or 2-D")

        self.weights = weights
        self.means = means
        self.components = tuple(comps)
        self.dim = d
        self.n_components = n

    @staticmethod
    def single(mean, cov) -> "GaussianMixture":
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        return GaussianMixture([1.0], mean[None, :], [cov])

    # -- density ------------------------------------------------------------

    def _component_log_density(self, x: np.ndarray) -> np.ndarray:
        """Per-component log N(x | m_i, cov_i); x has shape (..., d)."""
        out = []
        for comp in self.components:
            if comp.degenerate:
                raise CapabilityError(
                    "log-density undefined for a degenerate covariance component"
                )
            y = x - comp.mean
            if comp.diag is not None:
                quad = np.sum(y * y / comp.diag, axis=-1)
                logdet = float(np.log(comp.diag).sum())
            else:
                yq = y @ comp.evecs
                quad = np.sum(yq * yq / comp.evals, axis=-1)
                logdet = float(np.log(comp.evals).sum())
            out.append(-0.5 * (self.dim * _LOG_2PI + logdet + quad))
        return np.stack(out, axis=-1)

    def log_density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        comp_ld = self._component_log_density(x)
        return logsumexp(comp_ld + np.log(self.weights), axis=-1)

    def grad_log_density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        comp_ld = self._component_log_density(x) + np.log(self.weights)
        shift = comp_ld.max(axis=-1, keepdims=True)
        resp = np.exp(comp_ld - shift)
        resp /= resp.sum(axis=-1, keepdims=True)
        grad = np.zeros_like(x)
        for i, comp in enumerate(self.components):
            y = x - comp.mean
            if comp.diag is not None:
                g = -y / comp.diag
            else:
                g = -((y @ comp.evecs) / comp.evals) @ comp.evecs.T
            grad += resp[..., i : i + 1] * g
        return grad

    # -- sampling -----------------------------------------------------------

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        idx = rng.choice(self.n_components, size=n, p=self.weights)
        z = rng.standard_normal((n, self.dim))
        out = np.empty((n, self.dim))
        for i, comp in enumerate(self.components):
            rows = idx == i
            if not rows.any():
                continue
            if comp.diag is not None:
                out[rows] = comp.mean + z[rows] * np.sqrt(comp.diag)
            else:
                half = comp.evecs * np.sqrt(comp.evals)
                out[rows] = comp.mean + z[rows] @ half.T
        return out


# ---------------------------------------------------------------------------
# Funnel


@dataclass(frozen=True)
class Funnel:
    """Anisotropic funnel: x_1 ~ N(0,1), the remaining block ~ N(0, e^{2 alpha x_1} I)."""

    dim: int
    alpha: float

    def __post_init__(self):
        problems = []
        if self.dim < 2:
            problems.append(f"funnel dim must be >= 2, got {self.dim}")
        if not self.alpha > 0:
            problems.append(f"funnel alpha must be > 0, got {self.alpha}")
        if problems:
            raise ConfigError(problems)

    def log_density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        x1 = x[..., 0]
        tail = x[..., 1:]
        dm1 = self.dim - 1
        tail_sq = np.sum(tail * tail, axis=-1)
        return (
            -0.5 * self.dim * _LOG_2PI
            - 0.5 * x1 * x1
            - dm1 * self.alpha * x1
            - 0.5 * np.exp(-2.0 * self.alpha * x1) * tail_sq
        )

    def grad_log_density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        x1 = x[..., 0]
        tail = x[..., 1:]
        dm1 = self.dim - 1
        scale = np.exp(-2.0 * self.alpha * x1)
        tail_sq = np.sum(tail * tail, axis=-1)
        grad = np.empty_like(x)
        grad[..., 0] = -x1 - dm1 * self.alpha + self.alpha * scale * tail_sq
        grad[..., 1:] = -tail * scale[..., None]
        return grad

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        x1 = rng.standard_normal(n)
        tail = rng.standard_normal((n, self.dim - 1)) * np.exp(self.alpha * x1)[:, None]
        return np.column_stack([x1, tail])


# ---------------------------------------------------------------------------
# Generic density targets


@dataclass(frozen=True)
class DensityTarget:
    """Target known through a (possibly unnormalized) log-density.

    ``log_density_fn`` maps (..., d) arrays to (...) arrays and returns -inf
    outside the support. The gradient and sampler are optional capabilities.
    """

    dim: int
    log_density_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    grad_log_density_fn: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, repr=False
    )
    sampler: Optional[Callable[[int, np.random.Generator], np.ndarray]] = field(
        default=None, repr=False
    )
    name: str = "density"
    compact_support: bool = False

    def log_density(self, x) -> np.ndarray:
        return self.log_density_fn(np.asarray(x, dtype=float))

    def grad_log_density(self, x) -> np.ndarray:
        if self.grad_log_density_fn is None:
            raise CapabilityError(f"target {self.name!r} has no gradient")
        return self.grad_log_density_fn(np.asarray(x, dtype=float))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.sampler is None:
            raise CapabilityError(f"target {self.name!r} has no sampler")
        return self.sampler(n, rng)


def _cauchy1d_logpdf(x):
    return -np.log1p(np.squeeze(x, axis=-1) ** 2)


def _cauchy1d_grad(x):
    return -2.0 * x / (1.0 + x * x)


def cauchy1d() -> DensityTarget:
    """1-D heavy-tailed density proportional to (1 + x^2)^{-1} (unnormalized)."""
    return DensityTarget(
        dim=1,
        log_density_fn=_cauchy1d_logpdf,
        grad_log_density_fn=_cauchy1d_grad,
        sampler=lambda n, rng: rng.standard_cauchy((n, 1)),
        name="cauchy1d",
    )


def _sinusoid_raw(u):
    return 1.0 + 0.5 * (np.sin(2.0 * np.pi * u) + np.sin(4.0 * np.pi * u))


def _sinusoid1d_logpdf(x):
    u = np.squeeze(x, axis=-1)
    inside = (u >= 0.0) & (u <= 1.0)
    vals = _sinusoid_raw(np.where(inside, u, 0.5))
    return np.where(inside, np.log(vals), -np.inf)


def _sinusoid1d_grad(x):
    u = np.squeeze(x, axis=-1)
    inside = (u >= 0.0) & (u <= 1.0)
    us = np.where(inside, u, 0.5)
    slope = np.pi * np.cos(2.0 * np.pi * us) + 2.0 * np.pi * np.cos(4.0 * np.pi * us)
    g = np.where(inside, slope / _sinusoid_raw(us), 0.0)
    return g[..., None]

_SINUSOID_BOUND = 1.8801  # upper bound of the density on [0, 1]


def _sinusoid1d_sample(n, rng):
    out = np.empty(n)
    have = 0
    while have < n:
        m = max(2 * (n - have), 64)
        u = rng.random(m)
        accept = rng.random(m) * _SINUSOID_BOUND <= _sinusoid_raw(u)
        took = u[accept][: n - have]
        out[have : have + took.size] = took
        have += took.size
    return out[:, None]


def sinusoid1d() -> DensityTarget:
    """Sinusoidal density 1 + (sin 2 pi x + sin 4 pi x)/2 on [0, 1] (normalized)."""
    return DensityTarget(
        dim=1,
        log_density_fn=_sinusoid1d_logpdf,
        grad_log_density_fn=_sinusoid1d_grad,
        sampler=_sinusoid1d_sample,
        name="sinusoid1d",
        compact_support=True,
    )


# mean of the sinusoid density: 1/2 - 3/(8 pi)
SINUSOID_MEAN = 0.5 - 3.0 / (8.0 * math.pi)


# ---------------------------------------------------------------------------
# Sample banks and initial distributions


@dataclass(frozen=True)
class SampleBank:
    """A fixed matrix of target samples plus a provenance tag."""

    samples: np.ndarray
    source: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[0] < 1:
            raise ConfigError("sample bank must be a nonempty (N, d) matrix")
        if not np.isfinite(samples).all():
            raise ConfigError("sample bank contains non-finite entries")
        object.__setattr__(self, "samples", samples)

    @property
    def size(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @staticmethod
    def from_target(target, n: int, rng: np.random.Generator, source: str = "") -> "SampleBank":
        return SampleBank(target.sample(n, rng), source=source)


@dataclass(frozen=True)
class InitialDistribution:
    """Initial law: isotropic Gaussian, point mass, or a density with sampler."""

    kind: str
    gamma: Optional[float] = None
    point: Optional[np.ndarray] = None
    density: Optional[DensityTarget] = None

    @staticmethod
    def isotropic_gaussian(gamma: float) -> "InitialDistribution":
        if not gamma > 0:
            raise ConfigError(f"gaussian initial requires gamma > 0, got {gamma}")
        return InitialDistribution(GAUSSIAN, gamma=float(gamma))

    @staticmethod
    def dirac_at(point) -> "InitialDistribution":
        point = np.atleast_1d(np.asarray(point, dtype=float))
        return InitialDistribution(DIRAC, point=point)

    @staticmethod
    def from_density(target: DensityTarget) -> "InitialDistribution":
        if target.sampler is None:
            raise ConfigError("density initial must supply a sampler")
        return InitialDistribution(DENSITY, density=target)

    def ell_gamma(self) -> Optional[float]:
        """Effective gamma entering the mixing scalar (0 for a point mass)."""
        if self.kind == GAUSSIAN:
            return self.gamma
        if self.kind == DIRAC:
            return 0.0
        return None

    def sample(self, n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == GAUSSIAN:
            return math.sqrt(self.gamma) * rng.standard_normal((n, dim))
        if self.kind == DIRAC:
            if self.point.shape[0] != dim:
                raise ConfigError(
                    f"dirac point has dim {self.point.shape[0]}, run has dim {dim}"
                )
            return np.tile(self.point, (n, 1))
        draws = self.density.sample(n, rng)
        if draws.shape[1] != dim:
            raise ConfigError(
                f"initial density has dim {draws.shape[1]}, run has dim {dim}"
            )
        return draws


def sample(source, n: int, rng: np.random.Generator, dim: Optional[int] = None) -> np.ndarray:
    """Draw n i.i.d. rows from a target or initial distribution.

    Deterministic given the stream. A DensityTarget without a sampler raises
    CapabilityError. Initial distributions need the ambient dimension.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if isinstance(source, InitialDistribution):
        if dim is None:
            raise ValueError("sampling an initial distribution requires dim")
        return source.sample(n, dim, rng)
    return source.sample(n, rng)


# ---------------------------------------------------------------------------
# Gaussian affine convolution


def gaussian_affine_convolution(m, Sigma, beta, sigma, a, b, x):
    """Closed form of E[(a xi + b) phi_sigma(x - beta xi)] for xi ~ N(m, Sigma).

    Returns the pair ``(density, vector)`` whose elementwise product equals the
    expectation: density = N(x | beta m, A) and vector = a A^{-1}(beta Sigma x
    + sigma m) + b with A = sigma I + beta^2 Sigma. Valid for degenerate PSD
    Sigma since A is SPD whenever sigma > 0.
    """
    m = np.atleast_1d(np.asarray(m, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    b = np.broadcast_to(np.asarray(b, dtype=float), m.shape)
    d = m.shape[0]
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")

    Sigma = np.asarray(Sigma, dtype=float)
    if Sigma.ndim == 1:
        if (Sigma < 0).any():
            raise ValueError("diagonal Sigma must be nonnegative")
        av = sigma + beta * beta * Sigma
        y = x - beta * m
        log_density = -0.5 * (d * _LOG_2PI + np.log(av).sum() + np.sum(y * y / av))
        vector = a * (beta * Sigma * x + sigma * m) / av + b
        return float(np.exp(log_density)), vector

    if np.abs(Sigma - Sigma.T).max() > 1e-10:
        raise ValueError("Sigma must be symmetric to 1e-10")
    if np.linalg.eigvalsh(Sigma).min() < -1e-10:
        raise ValueError("Sigma must be PSD")
    A = sigma * np.eye(d) + beta * beta * Sigma
    factor = cho_factor(A, lower=True)
    y = x - beta * m
    quad = float(y @ cho_solve(factor, y))
    logdet = 2.0 * float(np.log(np.diag(factor[0])).sum())
    log_density = -0.5 * (d * _LOG_2PI + logdet + quad)
    vector = a * cho_solve(factor, beta * (Sigma @ x) + sigma * m) + b
    return float(np.exp(log_density)), vector


# ---------------------------------------------------------------------------
# JSON descriptors


def _reject_unknown_keys(desc: dict, allowed: Sequence[str], where: str):
    unknown = sorted(set(desc) - set(allowed))
    if unknown:
        raise ConfigError([f"{where}: unknown key {k!r}" for k in unknown])


def target_from_descriptor(desc: dict):
    """Build a target from its JSON descriptor (strict schema)."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("target descriptor must be an object with a 'kind'")
    kind = desc["kind"]
    if kind == "mixture":
        _reject_unknown_keys(desc, ("kind", "weights", "means", "covs"), "target")
        for key in ("weights", "means", "covs"):
            if key not in desc:
                raise ConfigError(f"target: mixture needs {key!r}")
        covs_desc = desc["covs"]
        if not isinstance(covs_desc, dict) or len(covs_desc) != 1 or next(
            iter(covs_desc)
        ) not in ("diag", "full"):
            raise ConfigError("target: covs must be {'diag': [...]} or {'full': [...]}")
        style, data = next(iter(covs_desc.items()))
        covs = [np.asarray(c, dtype=float) for c in data]
        if style == "diag" and any(c.ndim != 1 for c in covs):
            raise ConfigError("target: diag covariances must be 1-D lists")
        if style == "full" and any(c.ndim != 2 for c in covs):
            raise ConfigError("target: full covariances must be 2-D lists")
        return GaussianMixture(desc["weights"], desc["means"], covs)
    if kind == "funnel":
        _reject_unknown_keys(desc, ("kind", "dim", "alpha"), "target")
        return Funnel(dim=int(desc.get("dim", 2)), alpha=float(desc.get("alpha", 1.0)))
    if kind == "sinusoid1d":
        _reject_unknown_keys(desc, ("kind",), "target")
        return sinusoid1d()
    if kind == "cauchy1d":
        _reject_unknown_keys(desc, ("kind",), "target")
        return cauchy1d()
    raise ConfigError(f"target: unknown kind {kind!r}")


def initial_from_descriptor(desc: dict) -> InitialDistribution:
    """Build an initial distribution from its JSON descriptor (strict schema)."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("initial descriptor must be an object with a 'kind'")
    kind = desc["kind"]
    if kind == "gaussian":
        _reject_unknown_keys(desc, ("kind", "gamma"), "initial")
        return InitialDistribution.isotropic_gaussian(float(desc["gamma"]))
    if kind == "dirac":
        _reject_unknown_keys(desc, ("kind", "point"), "initial")
        return InitialDistribution.dirac_at(desc["point"])
    if kind in ("cauchy1d", "sinusoid1d"):
        _reject_unknown_keys(desc, ("kind",), "initial")
        return InitialDistribution.from_density(target_from_descriptor(desc))
    raise ConfigError(f"initial: unknown kind {kind!r}")
