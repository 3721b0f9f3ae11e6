"""Exact moment machinery for the weighted-average construction.

The mixed moment E[prod_j z_j^{s_j}] of z = sum_i w_i x_i expands, by the
multinomial theorem applied per coordinate, into a sum over composition
tables: for each coordinate j a composition (h_1j, ..., h_nj) of s_j.  Each
term factors into multinomial coefficients, a weight moment at the row sums
h_i* and per-summand Dirichlet moments.  The expansion must agree with the
closed-form moment of the target Dirichlet; that equality is the computable
core this module exists to check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .distributions import DirichletParams, dirichlet_mixed_moment
from .rwa import RwaSpec, WeightedAverageScenario, scenario_of

__all__ = [
    "MomentIndex",
    "CompositionTable",
    "DirMultParams",
    "DEFAULT_ORDER_CAP",
    "compositions",
    "rwa_moment_expansion",
    "rwa_moment_closed_form",
    "weighted_average_moment",
    "weight_moment",
    "dirmult_pmf",
    "dirmult_log_pmf_batch",
    "dirmult_normalization_check",
    "kerov_tsilevich_check",
]

# Total-order cap on moment indices; beyond this the number of composition
# tuples explodes combinatorially.
DEFAULT_ORDER_CAP = 8

# Trial cap for explicit enumeration of the Dirichlet-multinomial support.
DIRMULT_TRIALS_CAP = 64


class OrderCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class MomentIndex:
    """Vector of non-negative integer exponents for a mixed moment."""

    s: tuple
    order_cap: int = DEFAULT_ORDER_CAP

    def __init__(self, s, order_cap: int = DEFAULT_ORDER_CAP):
        s = tuple(int(v) for v in s)
        if any(v < 0 for v in s):
            raise ValueError("exponents must be non-negative")
        if sum(s) > order_cap:
            raise OrderCapExceeded(
                f"total order {sum(s)} exceeds the cap of {order_cap}"
            )
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "order_cap", order_cap)

    @property
    def total(self) -> int:
        return sum(self.s)

    @property
    def k(self) -> int:
        return len(self.s)


def compositions(total: int, parts: int):
    """All tuples of `parts` non-negative integers summing to `total`,
    lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class CompositionTable:
    """Per-coordinate compositions of s_j into n parts; the index set of the
    moment expansion."""

    n: int
    s: tuple
    columns: tuple  # columns[j] = tuple of compositions of s[j] into n parts

    def __init__(self, n: int, s):
        s = tuple(int(v) for v in s)
        cols = tuple(tuple(compositions(sj, n)) for sj in s)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "columns", cols)

    @property
    def size(self) -> int:
        return math.prod(len(c) for c in self.columns)

    @property
    def expected_size(self) -> int:
        return math.prod(math.comb(sj + self.n - 1, self.n - 1) for sj in self.s)

    def tuples(self):
        """Iterate over full tables, one composition per coordinate, columns
        nested outer-to-inner in coordinate order."""
        return itertools.product(*self.columns)


def _dirichlet_log_moment(alpha, s) -> float:
    # math.lgamma beats vectorized gammaln at these tiny lengths
    a = sum(alpha)
    out = math.lgamma(a) - math.lgamma(a + sum(s))
    for ai, si in zip(alpha, s):
        out += math.lgamma(ai + si) - math.lgamma(ai)
    return out


def _log_multinomial(total: int, parts) -> float:
    return math.lgamma(total + 1) - sum(math.lgamma(h + 1) for h in parts)


def weighted_average_moment(sc: WeightedAverageScenario, s: MomentIndex) -> float:
    """E[prod_j z_j^{s_j}] by full enumeration of composition tables.

    Terms are accumulated in enumeration order with math.fsum (compensated),
    so results are deterministic and rounding-controlled up to ~1e5 terms.
    """
    if s.k != sc.k:
        raise ValueError(f"moment index length {s.k} != scenario dimension {sc.k}")
    w_alpha = np.asarray(sc.w_alpha)
    x_alphas = np.asarray(sc.x_alphas)
    table = CompositionTable(sc.n, s.s)
    terms = []
    for cols in table.tuples():
        h = np.asarray(cols, dtype=float).T  # (n, k): h[i, j]
        h_star = h.sum(axis=1)
        log_term = sum(
            _log_multinomial(sj, col) for sj, col in zip(s.s, cols)
        )
        log_term += _dirichlet_log_moment(w_alpha, h_star)
        for i in range(sc.n):
            log_term += _dirichlet_log_moment(x_alphas[i], h[i])
        terms.append(math.exp(log_term))
    return math.fsum(terms)


def rwa_moment_expansion(spec: RwaSpec, s: MomentIndex) -> float:
    """Mixed moment of z for a row-sum/column-sum instance, via the
    composition-table expansion."""
    return weighted_average_moment(scenario_of(spec), s)


def rwa_moment_closed_form(spec: RwaSpec, s: MomentIndex) -> float:
    """Mixed moment of z from the closed form: the target Dirichlet of the
    column sums, evaluated directly in log space (independent arithmetic from
    both the expansion and dirichlet_mixed_moment's code path)."""
    a = spec.as_array()
    if s.k != spec.k:
        raise ValueError("moment index length does not match spec dimension")
    col = a.sum(axis=0)
    total = a.sum()
    sv = np.asarray(s.s, dtype=float)
    log_m = gammaln(total) - gammaln(total + sv.sum())
    log_m += np.sum(gammaln(col + sv) - gammaln(col))
    return float(np.exp(log_m))


def weight_moment(spec: RwaSpec, h_star) -> float:
    """E[prod_i w_i^{h_i}] for the weight Dirichlet (row sums)."""
    rows = spec.as_array().sum(axis=1)
    h = np.asarray(h_star, dtype=float)
    if h.shape != rows.shape:
        raise ValueError("exponent vector must have one entry per row")
    return dirichlet_mixed_moment(DirichletParams(rows), h)


@dataclass(frozen=True)
class DirMultParams:
    """Dirichlet-multinomial: multinomial counts with Dirichlet cell
    probabilities."""

    alpha: DirichletParams
    trials: int

    def __post_init__(self):
        if self.trials < 0:
            raise ValueError("trials must be >= 0")


def dirmult_pmf(p: DirMultParams, counts) -> float:
    counts = tuple(int(c) for c in counts)
    if len(counts) != p.alpha.k:
        raise ValueError("counts length must match number of cells")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be non-negative")
    if sum(counts) != p.trials:
        raise ValueError(f"counts sum to {sum(counts)}, expected trials={p.trials}")
    return float(np.exp(dirmult_log_pmf_batch(p, np.asarray([counts]))[0]))


def dirmult_log_pmf_batch(p: DirMultParams, counts: np.ndarray) -> np.ndarray:
    """Vectorized log pmf over an (m, k) array of count vectors."""
    alpha = p.alpha.as_array()
    c = np.asarray(counts, dtype=float)
    a = alpha.sum()
    n = p.trials
    return (
        math.lgamma(n + 1)
        - gammaln(c + 1).sum(axis=1)
        + gammaln(a)
        - gammaln(a + n)
        + (gammaln(c + alpha) - gammaln(alpha)).sum(axis=1)
    )


def dirmult_normalization_check(p: DirMultParams) -> float:
    """Sum of the pmf over the whole support; contract: 1 within 1e-10."""
    if p.trials > DIRMULT_TRIALS_CAP:
        raise OrderCapExceeded(
            f"trials={p.trials} exceeds the enumeration cap of {DIRMULT_TRIALS_CAP}"
        )
    support = np.asarray(list(compositions(p.trials, p.alpha.k)), dtype=float)
    return float(math.fsum(np.exp(dirmult_log_pmf_batch(p, support))))


def kerov_tsilevich_check(alpha, t, order: int = 12):
    """Moment-series check of E[(1 - t'x)^{-A}] = prod_i (1 - t_i)^{-alpha_i}
    for x ~ Dirichlet(alpha), A = sum(alpha).

    The left side is expanded as sum_m (A)_m/m! E[(t'x)^m] with the inner
    moments exact via dirichlet_mixed_moment, truncated at `order`.  Returns
    (series, product, tail_bound); |series - product| <= tail_bound + eps is
    the success criterion.  The tail bound is exact for the dominating series
    with |t'x| <= max|t_i|: it is the full geometric-type sum minus its own
    truncation, computed in closed form.
    """
    p = DirichletParams(alpha)
    t = np.asarray(t, dtype=float)
    if t.shape != (p.k,):
        raise ValueError("t must have one entry per coordinate")
    if np.max(np.abs(t)) >= 1:
        raise ValueError("need |t_i| < 1 for convergence")
    a_total = p.total
    series_terms = [1.0]
    log_poch = 0.0  # log (A)_m / m!
    for m in range(1, order + 1):
        log_poch += math.log(a_total + m - 1) - math.log(m)
        # E[(t'x)^m] = sum over compositions of m of multinomial * prod t^h * E[prod x^h]
        inner = []
        for h in compositions(m, p.k):
            coef = math.exp(_log_multinomial(m, h))
            inner.append(coef * np.prod(t ** np.asarray(h)) * dirichlet_mixed_moment(p, h))
        series_terms.append(math.exp(log_poch) * math.fsum(inner))
    series = math.fsum(series_terms)
    product = float(np.prod((1 - t) ** (-p.as_array())))
    # dominating tail: sum_{m>order} (A)_m/m! tau^m with tau = max|t_i|
    tau = float(np.max(np.abs(t)))
    if tau == 0.0:
        tail = 0.0
    else:
        dom_total = (1 - tau) ** (-a_total)
        dom_partial = [1.0]
        lp = 0.0
        for m in range(1, order + 1):
            lp += math.log(a_total + m - 1) - math.log(m)
            dom_partial.append(math.exp(lp) * tau**m)
        tail = dom_total - math.fsum(dom_partial)
    return series, product, abs(tail)
