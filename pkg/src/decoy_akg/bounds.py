"""Closed-form single-photon bounds and their linear-program oracle.

Observed per-intensity counting rates p_i and error rates s_i constrain the
single-photon yield q^1 and error product b^1 = q^1 r^1 through the convex
Fock-mixture expansion: p_i = sum_j P[i, j] q^j + p_dark with every q^j in
[0, 1 - p_dark], and an analogous system for s_i p_i.  Because the
coefficient block is lower triangular, relaxing all box constraints except
the one on q^(1+j) yields a closed-form order-j lower bound

    q_j_min = sum_{i<=j} beta(j, i) (p_i - p_dark - e^(-mu_i)(p_0 - p_dark))
              - [j odd] (1 - p_dark) mu_1..mu_j Omega_(j+1)

with beta(j, i) = (-1)^(j-1) mu_1..mu_j e^(mu_i) / (mu_i^2 prod_{t!=i}
(mu_i - mu_t)), and a mirrored order-j upper bound b_j_max.  The best
estimates are the max of the q bounds over both measurement bases and the
min of the b bounds; a generic LP over the full boxed system acts as an
independent oracle for the whole construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .expansion import ExpansionTable, IntensityGrid

class InfeasibleStatsError(RuntimeError):
    """The observed rates are inconsistent with the constraint system."""


@dataclass(frozen=True)
class ObservedStats:
    """Per-intensity counting and error rates.

    ``p`` has 2k+1 entries: p[0] is the vacuum-pulse counting rate, p[1..k]
    the rates of the k intensities in the key basis and p[k+1..2k] those in
    the conjugate basis.  ``s`` holds the k key-basis error rates.  All
    rates are probabilities per pulse including dark counts.  Consistent
    data satisfies p_i >= p_dark (the dark floor); violations are not
    rejected here and instead surface as LP infeasibility or clamped bounds.
    """

    p: tuple[float, ...]
    s: tuple[float, ...]
    p_dark: float = 0.0

    def __init__(self, p: Sequence[float], s: Sequence[float], p_dark: float = 0.0):
        object.__setattr__(self, "p", tuple(float(v) for v in p))
        object.__setattr__(self, "s", tuple(float(v) for v in s))
        object.__setattr__(self, "p_dark", float(p_dark))
        if len(self.p) % 2 != 1 or len(self.p) < 3:
            raise ValueError("p must hold the vacuum rate plus 2k per-basis rates")
        if len(self.s) != self.k:
            raise ValueError("s must hold one error rate per intensity")
        for name, values in (("p", self.p), ("s", self.s), ("p_dark", (self.p_dark,))):
            for v in values:
                if not 0.0 <= v <= 1.0:
                    raise ValueError(f"{name} entries must lie in [0, 1]; got {v}")

    @property
    def k(self) -> int:
        return (len(self.p) - 1) // 2

    @classmethod
    def symmetric(
        cls, p0: float, p_basis: Sequence[float], s_basis: Sequence[float], p_dark: float = 0.0
    ) -> "ObservedStats":
        """Stats with identical counting rates in both bases."""
        p_basis = tuple(float(v) for v in p_basis)
        return cls((p0, *p_basis, *p_basis), s_basis, p_dark)


@dataclass(frozen=True)
class LegacyBounds:
    """Earlier two- and three-intensity estimators kept for comparison curves.

    All four assume no dark-count correction.  ``ma_q13_l`` requires
    mu_1 + mu_2 < mu_3 and mu_1 + mu_2 < 1 and is None when its
    preconditions fail or the grid is too small.
    """

    wang_q2_min: Optional[float] = None
    wang_b1_max: Optional[float] = None
    ma_q13_l: Optional[float] = None
    ma_b12_u: Optional[float] = None


@dataclass(frozen=True)
class BoundResult:
    """Aggregated single-photon bounds for one set of observed stats.

    ``q1_min``/``b1_max`` are clamped to [0, 1 - p_dark]; the raw optima are
    kept for diagnostics.  ``q1_source_j`` is the order that achieved the
    max (values k+1..2k denote the conjugate-basis variant), ``b1_source_j``
    the order achieving the min.
    """

    q_j_min: tuple[float, ...]
    q_kj_min: tuple[float, ...]
    b_j_max: tuple[float, ...]
    q1_min: float
    b1_max: float
    q1_min_raw: float
    b1_max_raw: float
    q1_source_j: int
    b1_source_j: int
    p_dark: float
    legacy: LegacyBounds

    @property
    def error_ratio(self) -> float:
        """Worst-case single-photon error ratio b1_max / q1_min.

        Saturates at 1 when q1_min is not positive: the binary-entropy
        penalty then wipes out the single-photon contribution, which is the
        conservative reading of a vacuous yield bound.
        """
        if self.q1_min <= 0.0:
            return 1.0
        return min(self.b1_max / self.q1_min, 1.0)


def beta(j: int, i: int, grid: IntensityGrid) -> float:
    """Inversion coefficient beta(j, i) of the order-j triangular solve."""
    if not 1 <= i <= j <= grid.k:
        raise ValueError("indices must satisfy 1 <= i <= j <= k")
    mus = grid.mus
    mu_i = mus[i - 1]
    numerator = math.prod(mus[:j]) * math.exp(mu_i)
    denom = mu_i**2
    for t in range(j):
        if t != i - 1:
            denom *= mu_i - mus[t]
    sign = -1.0 if j % 2 == 0 else 1.0
    return sign * numerator / denom


def _check_order(j: int, k: int) -> None:
    if not 1 <= j <= k:
        raise ValueError(f"order j={j} must satisfy 1 <= j <= k (k={k})")


def q_j_min(
    j: int,
    stats: ObservedStats,
    grid: IntensityGrid,
    table: ExpansionTable,
    plus_basis: bool = False,
) -> float:
    """Order-j lower bound on the single-photon counting rate q^1.

    Uses the first j intensities of the key basis (or of the conjugate basis
    when ``plus_basis``).  Odd orders carry the saturation term
    -(1 - p_dark) mu_1..mu_j Omega_(j+1) because the optimizing box corner
    differs with the sign pattern of the beta coefficients.
    """
    _check_order(j, grid.k)
    pd = stats.p_dark
    p0 = stats.p[0]
    offset = stats.k if plus_basis else 0
    total = 0.0
    for i in range(1, j + 1):
        p_i = stats.p[offset + i]
        total += beta(j, i, grid) * (p_i - pd - math.exp(-grid.mus[i - 1]) * (p0 - pd))
    if j % 2 == 1:
        total -= (1.0 - pd) * math.prod(grid.mus[:j]) * table.omega_for_order(j)
    return total


def b_j_max(j: int, stats: ObservedStats, grid: IntensityGrid, table: ExpansionTable) -> float:
    """Order-j upper bound on the single-photon error product b^1 = q^1 r^1."""
    _check_order(j, grid.k)
    pd = stats.p_dark
    p0 = stats.p[0]
    total = 0.0
    for i in range(1, j + 1):
        sp_i = stats.s[i - 1] * stats.p[i]
        total += beta(j, i, grid) * (
            sp_i - 0.5 * (pd + math.exp(-grid.mus[i - 1]) * (p0 - pd))
        )
    if j % 2 == 0:
        total += (1.0 - pd) * math.prod(grid.mus[:j]) * table.omega_for_order(j)
    return total


def _legacy_bounds(stats: ObservedStats, grid: IntensityGrid) -> LegacyBounds:
    mus = grid.mus
    k = grid.k
    p0 = stats.p[0]
    wang_q2 = wang_b1 = ma_q = ma_b = None
    if k >= 1:
        mu1 = mus[0]
        wang_b1 = (stats.s[0] * stats.p[1] * math.exp(mu1) - 0.5 * p0) / mu1
    if k >= 2:
        mu1, mu2 = mus[0], mus[1]
        p1, p2 = stats.p[1], stats.p[2]
        wang_q2 = (
            mu2 * math.exp(mu1) / (mu1 * (mu2 - mu1)) * (p1 - math.exp(-mu1) * p0)
            - mu1 * math.exp(mu2) / (mu2 * (mu2 - mu1)) * (p2 - math.exp(-mu2) * p0)
        )
        ma_b = (
            stats.s[1] * p2 * math.exp(mu2) - stats.s[0] * p1 * math.exp(mu1)
        ) / (mu2 - mu1)
    if k >= 3:
        mu1, mu2, mu3 = mus[0], mus[1], mus[2]
        if mu1 + mu2 < mu3 and mu1 + mu2 < 1.0:
            p1, p2, p3 = stats.p[1], stats.p[2], stats.p[3]
            numer = mu3 * (
                p2 * math.exp(mu2)
                - p1 * math.exp(mu1)
                - (mu2**2 - mu1**2) / mu3**2 * (p3 * math.exp(mu3) - p0)
            )
            ma_q = numer / (mu2 * mu3 - mu3 * mu1 - mu2**2 + mu1**2)
    return LegacyBounds(wang_q2_min=wang_q2, wang_b1_max=wang_b1, ma_q13_l=ma_q, ma_b12_u=ma_b)


def aggregate(stats: ObservedStats, grid: IntensityGrid, table: ExpansionTable) -> BoundResult:
    """Best available bounds: max of the q lower bounds, min of the b uppers.

    The q bounds of both bases participate (orders 1..k each); the error
    system only constrains the key basis.  Reported values are clamped to
    the physical range [0, 1 - p_dark].
    """
    if stats.k != grid.k:
        raise ValueError("stats and grid disagree on the number of intensities")
    k = grid.k
    q_x = tuple(q_j_min(j, stats, grid, table) for j in range(1, k + 1))
    q_plus = tuple(q_j_min(j, stats, grid, table, plus_basis=True) for j in range(1, k + 1))
    b_all = tuple(b_j_max(j, stats, grid, table) for j in range(1, k + 1))

    candidates = q_x + q_plus
    q_source = int(np.argmax(candidates)) + 1
    q_raw = candidates[q_source - 1]
    b_source = int(np.argmin(b_all)) + 1
    b_raw = b_all[b_source - 1]

    cap = 1.0 - stats.p_dark
    return BoundResult(
        q_j_min=q_x,
        q_kj_min=q_plus,
        b_j_max=b_all,
        q1_min=min(max(q_raw, 0.0), cap),
        b1_max=min(max(b_raw, 0.0), cap),
        q1_min_raw=q_raw,
        b1_max_raw=b_raw,
        q1_source_j=q_source,
        b1_source_j=b_source,
        p_dark=stats.p_dark,
        legacy=_legacy_bounds(stats, grid),
    )


def _solve_lp(c, a_eq, b_eq, variable_bounds) -> float:
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=variable_bounds, method="highs")
    if res.status == 2:
        raise InfeasibleStatsError(f"constraint system infeasible: {res.message}")
    if not res.success:
        raise InfeasibleStatsError(f"LP solver failed (status {res.status}): {res.message}")
    return float(res.fun)


def _coefficient_blocks(grid: IntensityGrid, table: ExpansionTable):
    """(y, z, x) blocks of the constraint matrix from tabulated omegas."""
    k = grid.k
    mus = np.asarray(grid.mus)
    y = np.exp(-mus)
    z = mus * y
    x = np.zeros((k, k))
    for i in range(1, k + 1):
        for j in range(1, i + 1):
            prod = 1.0
            for t in range(1, j):
                prod *= mus[i - 1] - mus[t - 1]
            x[i - 1, j - 1] = mus[i - 1] ** 2 * prod * y[i - 1] * table.omegas[j - 1]
    return y, z, x


def _q_system(stats: ObservedStats, grid: IntensityGrid, table: ExpansionTable):
    k = grid.k
    y, z, x = _coefficient_blocks(grid, table)
    p_matrix = np.zeros((2 * k + 1, 2 * k + 2))
    p_matrix[0, 0] = 1.0
    for block, col in ((slice(1, k + 1), 2), (slice(k + 1, 2 * k + 1), k + 2)):
        p_matrix[block, 0] = y
        p_matrix[block, 1] = z
        p_matrix[block, col : col + k] = x
    rhs = np.asarray(stats.p) - stats.p_dark
    return p_matrix, rhs


def _b_system(stats: ObservedStats, grid: IntensityGrid, table: ExpansionTable):
    k = grid.k
    _, z, x = _coefficient_blocks(grid, table)
    coeff = np.column_stack([z, x])  # unknowns b^1..b^(k+1)
    pd = stats.p_dark
    p0 = stats.p[0]
    rhs = np.array(
        [
            stats.s[i - 1] * stats.p[i]
            - 0.5 * (math.exp(-grid.mus[i - 1]) * (p0 - pd) + pd)
            for i in range(1, k + 1)
        ]
    )
    return coeff, rhs


def lp_oracle_q1_min(stats: ObservedStats, grid: IntensityGrid, table: ExpansionTable) -> float:
    """Brute-force minimum of q^1 over the fully boxed constraint system.

    Independent verification route for ``aggregate().q1_min`` (the clamped
    value, since the box keeps q^1 itself within [0, 1 - p_dark]).  Raises
    ``InfeasibleStatsError`` for inconsistent stats, e.g. rates below the
    dark floor.
    """
    a_eq, rhs = _q_system(stats, grid, table)
    n = a_eq.shape[1]
    c = np.zeros(n)
    c[1] = 1.0
    box = [(0.0, 1.0 - stats.p_dark)] * n
    return _solve_lp(c, a_eq, rhs, box)


def lp_oracle_b1_max(stats: ObservedStats, grid: IntensityGrid, table: ExpansionTable) -> float:
    """Brute-force maximum of b^1 over the boxed error-rate system."""
    a_eq, rhs = _b_system(stats, grid, table)
    n = a_eq.shape[1]
    c = np.zeros(n)
    c[0] = -1.0
    box = [(0.0, 1.0 - stats.p_dark)] * n
    return -_solve_lp(c, a_eq, rhs, box)


def lp_oracle_q_j_min(
    j: int,
    stats: ObservedStats,
    grid: IntensityGrid,
    table: ExpansionTable,
    plus_basis: bool = False,
) -> float:
    """LP value of the order-j relaxed program: only q^(1+j) is boxed.

    All other unknowns are free, matching the program whose closed form is
    ``q_j_min``; the optimum may be negative.
    """
    _check_order(j, grid.k)
    a_eq, rhs = _q_system(stats, grid, table)
    n = a_eq.shape[1]
    c = np.zeros(n)
    c[1] = 1.0
    box: list[tuple[Optional[float], Optional[float]]] = [(None, None)] * n
    column = 1 + j + (stats.k if plus_basis else 0)
    box[column] = (0.0, 1.0 - stats.p_dark)
    return _solve_lp(c, a_eq, rhs, box)


def lp_oracle_b_j_max(
    j: int, stats: ObservedStats, grid: IntensityGrid, table: ExpansionTable
) -> float:
    """LP value of the order-j relaxed error program: only b^(1+j) is boxed."""
    _check_order(j, grid.k)
    a_eq, rhs = _b_system(stats, grid, table)
    n = a_eq.shape[1]
    c = np.zeros(n)
    c[0] = -1.0
    box: list[tuple[Optional[float], Optional[float]]] = [(None, None)] * n
    box[j] = (0.0, 1.0 - stats.p_dark)
    return -_solve_lp(c, a_eq, rhs, box)
