"""Randomly weighted averages of Dirichlet vectors.

A scenario is z = sum_j w_j * x_j where the x_j are independent Dirichlet
vectors and the weight vector w is an independent Dirichlet point.  For the
main construction the weight concentrations are the row sums of the alpha
matrix and the law of z is Dirichlet of the column sums.  Two sampling paths
are kept deliberately separate (direct Dirichlet draws vs. normalized-gamma
weights) so that path-equivalence tests have independent failure modes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import (
    DirichletParams,
    RngStream,
    SimplexPoint,
    dirichlet_mixed_moment,
    sample_dirichlet_batch,
)

__all__ = [
    "RwaSpec",
    "RwaSample",
    "WeightedAverageScenario",
    "weight_params",
    "target_params",
    "sample_rwa_direct",
    "sample_rwa_gamma_path",
    "sample_rwa_direct_batch",
    "sample_rwa_gamma_path_batch",
    "variant_scenario",
    "resolve_variant_reading",
    "RECOMBINE_TOL",
]

# Max componentwise discrepancy between z and the recombination sum(w_j x_j).
RECOMBINE_TOL = 1e-10


@dataclass(frozen=True)
class RwaSpec:
    """n x k matrix of concentration parameters; row j parameterizes x_j."""

    alphas: tuple  # tuple of row tuples

    def __init__(self, alphas):
        a = np.asarray(alphas, dtype=float)
        if a.ndim != 2:
            raise ValueError("alphas must be a 2-d matrix")
        n, k = a.shape
        if n < 2 or k < 2:
            raise ValueError(f"need n >= 2 and k >= 2, got shape {a.shape}")
        if not np.all(a > 0):
            raise ValueError("all matrix entries must be > 0")
        object.__setattr__(self, "alphas", tuple(tuple(row) for row in a))

    @property
    def n(self) -> int:
        return len(self.alphas)

    @property
    def k(self) -> int:
        return len(self.alphas[0])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.alphas, dtype=float)


@dataclass(frozen=True)
class RwaSample:
    """One draw: the average z, the weights w and the n summand vectors."""

    z: SimplexPoint
    w: SimplexPoint
    xs: tuple

    def __post_init__(self):
        recombined = sum(
            wj * xj.as_array() for wj, xj in zip(self.w.coords, self.xs)
        )
        if np.max(np.abs(recombined - self.z.as_array())) > RECOMBINE_TOL:
            raise ValueError("z does not recombine from w and xs")


@dataclass(frozen=True)
class WeightedAverageScenario:
    """General weighted-average setup: arbitrary weight concentrations, one
    Dirichlet parameter row per summand, and the claimed law of z."""

    w_alpha: tuple
    x_alphas: tuple
    target_alpha: tuple

    def __init__(self, w_alpha, x_alphas, target_alpha):
        w = np.asarray(w_alpha, dtype=float)
        x = np.asarray(x_alphas, dtype=float)
        t = np.asarray(target_alpha, dtype=float)
        if x.ndim != 2 or len(w) != x.shape[0]:
            raise ValueError("x_alphas must be (n, k) with n matching w_alpha")
        if not (np.all(w > 0) and np.all(x > 0) and np.all(t > 0)):
            raise ValueError("all concentration parameters must be > 0")
        if len(t) != x.shape[1]:
            raise ValueError("target dimension must match k")
        object.__setattr__(self, "w_alpha", tuple(w))
        object.__setattr__(self, "x_alphas", tuple(tuple(r) for r in x))
        object.__setattr__(self, "target_alpha", tuple(t))

    @property
    def n(self) -> int:
        return len(self.w_alpha)

    @property
    def k(self) -> int:
        return len(self.target_alpha)


def weight_params(spec: RwaSpec) -> DirichletParams:
    """Row sums: concentrations of the weight vector w."""
    return DirichletParams(spec.as_array().sum(axis=1))


def target_params(spec: RwaSpec) -> DirichletParams:
    """Column sums: concentrations of the claimed law of z."""
    return DirichletParams(spec.as_array().sum(axis=0))


def scenario_of(spec: RwaSpec) -> WeightedAverageScenario:
    a = spec.as_array()
    return WeightedAverageScenario(a.sum(axis=1), a, a.sum(axis=0))


def _sample_xs_batch(x_alphas: np.ndarray, n_samples: int, rng: RngStream) -> np.ndarray:
    """(n_samples, n, k) block of Dirichlet draws, one substream per row."""
    n, k = x_alphas.shape
    xs = np.empty((n_samples, n, k))
    for j in range(n):
        xs[:, j, :] = sample_dirichlet_batch(
            DirichletParams(x_alphas[j]), n_samples, rng.child(1 + j)
        )
    return xs


def _direct_batch(sc: WeightedAverageScenario, n_samples: int, rng: RngStream):
    w = sample_dirichlet_batch(DirichletParams(sc.w_alpha), n_samples, rng.child(0))
    xs = _sample_xs_batch(np.asarray(sc.x_alphas), n_samples, rng)
    z = np.einsum("ij,ijk->ik", w, xs)
    return z, w, xs

def _gamma_path_batch(sc: WeightedAverageScenario, n_samples: int, rng: RngStream):
    # weights built from independent gammas with the weight concentrations as
    # shapes, normalized by their sum (common rate cancels; rate 1 used)
    g = rng.child(0).generator()
    y = g.gamma(np.asarray(sc.w_alpha), size=(n_samples, sc.n))
    w = y / y.sum(axis=1, keepdims=True)
    xs = _sample_xs_batch(np.asarray(sc.x_alphas), n_samples, rng)
    z = np.einsum("ij,ijk->ik", w, xs)
    return z, w, xs


def _as_sample(z, w, xs) -> RwaSample:
    return RwaSample(
        z=SimplexPoint(z),
        w=SimplexPoint(w),
        xs=tuple(SimplexPoint(row) for row in xs),
    )


def sample_rwa_direct(spec: RwaSpec, rng: RngStream) -> RwaSample:
    """One draw: w ~ Dirichlet(row sums), x_j ~ Dirichlet(row j), z = sum w_j x_j."""
    z, w, xs = _direct_batch(scenario_of(spec), 1, rng)
    return _as_sample(z[0], w[0], xs[0])


def sample_rwa_gamma_path(spec: RwaSpec, rng: RngStream) -> RwaSample:
    """One draw with the weights formed as normalized gamma variables."""
    z, w, xs = _gamma_path_batch(scenario_of(spec), 1, rng)
    return _as_sample(z[0], w[0], xs[0])


def sample_rwa_direct_batch(spec, n_samples: int, rng: RngStream) -> np.ndarray:
    """(n_samples, k) array of z draws via the direct path.  Accepts an
    RwaSpec or a WeightedAverageScenario."""
    sc = scenario_of(spec) if isinstance(spec, RwaSpec) else spec
    return _direct_batch(sc, n_samples, rng)[0]


def sample_rwa_gamma_path_batch(spec, n_samples: int, rng: RngStream) -> np.ndarray:
    """(n_samples, k) array of z draws via the normalized-gamma weight path."""
    sc = scenario_of(spec) if isinstance(spec, RwaSpec) else spec
    return _gamma_path_batch(sc, n_samples, rng)[0]


def variant_scenario(alpha, reading: str = "symmetric") -> WeightedAverageScenario:
    """Two-dimensional variant: x_j ~ Dirichlet built from 1/2 + alpha_j,
    w ~ Dirichlet(alpha), claimed target built from 1/2 + sum(alpha).

    ``reading`` selects how the scalar 1/2 + alpha_j is expanded to a
    two-dimensional parameter vector: "symmetric" gives
    (1/2 + alpha_j, 1/2 + alpha_j); "asymmetric" gives (1/2 + alpha_j, 1/2).
    Only the symmetric reading survives the moment oracle (see
    resolve_variant_reading); the asymmetric one is kept for the comparison.
    """
    a = np.asarray(alpha, dtype=float)
    if a.ndim != 1 or len(a) < 2:
        raise ValueError("need at least two positive weight parameters")
    if not np.all(a > 0):
        raise ValueError("all alpha_j must be > 0")
    if reading == "symmetric":
        x = np.stack([0.5 + a, 0.5 + a], axis=1)
        target = (0.5 + a.sum(), 0.5 + a.sum())
    elif reading == "asymmetric":
        x = np.stack([0.5 + a, np.full_like(a, 0.5)], axis=1)
        target = (0.5 + a.sum(), 0.5)
    else:
        raise ValueError(f"unknown reading {reading!r}")
    return WeightedAverageScenario(a, x, target)


def resolve_variant_reading(alpha, max_order: int = 3, rtol: float = 1e-9):
    """Decide which expansion of the variant's scalar notation is consistent,
    by exact moment comparison against the claimed target.

    Returns the name of the verified reading, or None if neither matches all
    mixed moments of total order <= max_order within rtol.
    """
    from .moments import MomentIndex, weighted_average_moment

    for reading in ("symmetric", "asymmetric"):
        sc = variant_scenario(alpha, reading)
        target = DirichletParams(sc.target_alpha)
        ok = True
        for s1 in range(max_order + 1):
            for s2 in range(max_order + 1 - s1):
                if s1 == s2 == 0:
                    continue
                s = MomentIndex((s1, s2))
                lhs = weighted_average_moment(sc, s)
                rhs = dirichlet_mixed_moment(target, s.s)
                if abs(lhs - rhs) > rtol * abs(rhs):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return reading
    return None
