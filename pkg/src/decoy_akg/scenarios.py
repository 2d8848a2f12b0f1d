"""Named estimation scenarios and distance sweeps.

Each scenario fixes a set of decoy intensities, an estimator for the
single-photon bounds, and an error-correction direction, then maximizes the
key rate over the signal intensity at every distance:

* ``k2``        -- one decoy (0.1); order-2 bounds on (0.1, mu_signal).
* ``k3-ma``     -- decoys (0.1, 0.2); three-intensity ratio estimator for
                   q^1 with the order-1 error bound.
* ``k3-wang``   -- decoys (0.1, 0.2); order-2 yield and order-1 error
                   bounds, signal intensity excluded from estimation.
* ``k3-ours``   -- decoys (0.1, 0.2); full aggregation over orders 1..3
                   with the signal as third intensity.
* ``k4``        -- decoys (0.1, 0.2, 0.3); aggregation over orders 1..4.
* ``universal`` -- perfectly known channel parameters (no decoy slack).
* ``custom``    -- user-supplied decoys, aggregated like k3-ours/k4.

Estimation convention: the bound formulas are evaluated with a zero dark
rate, i.e. every click (including dark counts) is attributed to the channel
during parameter estimation.  The configured dark rate enters only the
additive vacuum/dark credit of the rate formula (and is what separates the
forward and reverse directions).  The reference comparison tables are
defined under this convention; propagating the dark rate into the
estimators instead would shift the reverse achievable distances by several
kilometres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .channel import STANDARD_FIBER, ChannelParams, alpha_of_distance
from .keyrate import (
    DEFAULT_COARSE_STEP,
    DEFAULT_MU_CAP,
    binary_entropy_bar,
    find_zero_distance,
    optimize_signal_intensity,
    single_photon_credit,
)

SCENARIO_NAMES = ("k2", "k3-ma", "k3-wang", "k3-ours", "k4", "universal", "custom")
DARK_MODES = ("pd-zero", "pd-equals-p0", "explicit")
MIN_DECOY_WIDTH = 0.1

# source_j codes for estimators that are not an aggregation order
SOURCE_EXACT = 0  # universal scenario: parameters known, nothing estimated
SOURCE_MA = -1  # three-intensity ratio estimator

_PRESET_DECOYS = {
    "k2": (0.1,),
    "k3-ma": (0.1, 0.2),
    "k3-wang": (0.1, 0.2),
    "k3-ours": (0.1, 0.2),
    "k4": (0.1, 0.2, 0.3),
    "universal": (),
}


class ConfigurationError(ValueError):
    """Scenario or sweep configuration is invalid."""


@dataclass(frozen=True)
class ScenarioSpec:
    """A runnable scenario: estimator, decoys, direction and dark handling."""

    name: str
    direction: str = "forward"
    dark_mode: str = "pd-zero"
    channel: ChannelParams = STANDARD_FIBER
    decoy_mus: tuple[float, ...] = ()
    signal_lower: float = 0.0
    dark_rate: Optional[float] = None  # only for dark_mode == "explicit"
    mu_cap: float = DEFAULT_MU_CAP
    coarse_step: float = DEFAULT_COARSE_STEP

    def __post_init__(self):
        if self.name not in SCENARIO_NAMES:
            raise ConfigurationError(f"unknown scenario {self.name!r}; choose from {SCENARIO_NAMES}")
        if self.direction not in ("forward", "reverse"):
            raise ConfigurationError("direction must be 'forward' or 'reverse'")
        if self.dark_mode not in DARK_MODES:
            raise ConfigurationError(f"dark_mode must be one of {DARK_MODES}")
        if self.dark_mode == "explicit":
            if self.dark_rate is None:
                raise ConfigurationError("dark_mode 'explicit' needs a dark_rate value")
            if not 0.0 <= self.dark_rate <= self.channel.p0:
                raise ConfigurationError("explicit dark rate must lie in [0, p0]")
        if self.name != "universal" and not self.decoy_mus:
            raise ConfigurationError(
                "at least one decoy intensity (plus the implicit vacuum) is required"
            )
        mus = self.decoy_mus
        if any(m <= 0 for m in mus):
            raise ConfigurationError("decoy intensities must be positive")
        for lo, hi in zip(mus, mus[1:]):
            if hi - lo < MIN_DECOY_WIDTH - 1e-12:
                raise ConfigurationError(
                    f"decoy intensities {lo} and {hi} are closer than the minimum width "
                    f"{MIN_DECOY_WIDTH}; estimates from nearly equal intensities are unstable"
                )
        if mus and self.signal_lower < mus[-1] + MIN_DECOY_WIDTH - 1e-12:
            raise ConfigurationError(
                f"signal intensity search must start at least {MIN_DECOY_WIDTH} above the "
                f"largest decoy ({mus[-1]}); got lower bound {self.signal_lower}"
            )
        if self.signal_lower <= 0.0:
            raise ConfigurationError("signal_lower must be positive")
        if self.mu_cap <= self.signal_lower:
            raise ConfigurationError("mu_cap must exceed signal_lower")
        if self.name == "k3-ma":
            m1, m2 = self.decoy_mus
            if not (m1 + m2 <= self.signal_lower and m1 + m2 < 1.0):
                raise ConfigurationError(
                    "the three-intensity ratio estimator needs mu1 + mu2 <= signal and "
                    "mu1 + mu2 < 1"
                )

    @property
    def estimator_kind(self) -> str:
        if self.name == "universal":
            return "universal"
        if self.name == "k3-wang":
            return "wang"
        if self.name == "k3-ma":
            return "ma"
        return "aggregate"

    @property
    def dark_rate_effective(self) -> float:
        if self.dark_mode == "pd-zero":
            return 0.0
        if self.dark_mode == "pd-equals-p0":
            return self.channel.p0
        return float(self.dark_rate)

    def resolved_channel(self) -> ChannelParams:
        return self.channel.with_dark_rate(self.dark_rate_effective)


def scenario(
    name: str,
    direction: str = "forward",
    dark_mode: str = "pd-zero",
    channel: ChannelParams = STANDARD_FIBER,
    decoys: Optional[Iterable[float]] = None,
    signal_lower: Optional[float] = None,
    dark_rate: Optional[float] = None,
) -> ScenarioSpec:
    """Build a ScenarioSpec, filling in the preset decoys for named scenarios."""
    if name == "custom":
        if decoys is None:
            raise ConfigurationError("custom scenarios need explicit decoy intensities")
        decoy_mus = tuple(sorted(float(m) for m in decoys))
    else:
        if name not in _PRESET_DECOYS:
            raise ConfigurationError(f"unknown scenario {name!r}; choose from {SCENARIO_NAMES}")
        decoy_mus = _PRESET_DECOYS[name]
    if signal_lower is None:
        if name == "universal":
            signal_lower = 0.01
        else:
            signal_lower = (decoy_mus[-1] if decoy_mus else 0.0) + MIN_DECOY_WIDTH
    return ScenarioSpec(
        name=name,
        direction=direction,
        dark_mode=dark_mode,
        channel=channel,
        decoy_mus=decoy_mus,
        signal_lower=float(signal_lower),
        dark_rate=dark_rate,
    )


@dataclass(frozen=True)
class SweepRow:
    L_km: float
    optimal_mu: float
    rate: float  # clamped at zero
    rate_signed: float
    q1_min: float
    b1_max: float
    q1_source_j: int
    b1_source_j: int


@dataclass(frozen=True)
class SweepResult:
    spec: ScenarioSpec
    rows: tuple[SweepRow, ...] = field(repr=False)
    achievable_km: Optional[float] = None


class _PrefixBounds:
    """Distance-independent pieces of the order-j bounds over fixed decoys.

    For each order j over the fixed decoy prefix: the inversion row
    beta(j, 1..j), the product mu_1..mu_j Omega_(j+1) and e^(-mu_i).  The
    estimation dark rate is zero by convention (module docstring), so the
    per-distance inputs reduce to c_i = p_i - e^(-mu_i) p0 and
    d_i = s_i p_i - e^(-mu_i) p0 / 2.
    """

    def __init__(self, decoys: tuple[float, ...]):
        self.decoys = decoys
        self.exp_neg = np.exp(-np.asarray(decoys)) if decoys else np.array([])
        self.beta_rows: list[np.ndarray] = []
        self.sat_terms: list[float] = []
        for j in range(1, len(decoys) + 1):
            pts = decoys[:j]
            sign = -1.0 if j % 2 == 0 else 1.0
            prod = math.prod(pts)
            row = np.empty(j)
            for i in range(1, j + 1):
                denom = pts[i - 1] ** 2
                for t in range(j):
                    if t != i - 1:
                        denom *= pts[i - 1] - pts[t]
                row[i - 1] = sign * prod * math.exp(pts[i - 1]) / denom
            self.beta_rows.append(row)
            self.sat_terms.append(prod * _omega_over(pts))


def _omega_over(points, extra=None, tol: float = 1e-14):
    """Omega_(j+1) for the j points (points..., extra); extra may be an array.

    Positive-term series sum_{n>j} h_(n-1-j)(points)/n! with the streaming
    homogeneous-sum update; broadcasts over ``extra``.
    """
    scalars = tuple(points)
    xs: list = list(scalars)
    if extra is not None:
        xs.append(extra)
    j = len(xs)
    mu_top = max(scalars) if scalars else 0.0
    if extra is not None:
        mu_top = max(mu_top, float(np.max(extra)))
    shape = np.shape(extra) if extra is not None else ()
    ones = np.ones(shape) if shape else 1.0
    hh = [ones] * (j + 1)
    hh[0] = 1.0
    total = np.zeros(shape) if shape else 0.0
    n = j + 1
    factorial = float(math.factorial(n))
    while True:
        total = total + hh[j] / factorial
        bound = math.comb(n - 1, j - 1) * mu_top ** (n - j) / (factorial * (n + 1))
        if bound < 0.5 * tol and n > j + 3:
            break
        if n > 400:
            raise RuntimeError("Omega series failed to converge")
        n += 1
        factorial *= n
        new = [0.0] * (j + 1)
        for l in range(1, j + 1):
            new[l] = new[l - 1] + xs[l - 1] * hh[l]
        hh = new
    return total


class _ScenarioEngine:
    """Per-scenario evaluator with distance-independent caches."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.params = spec.resolved_channel()
        self.decoys = spec.decoy_mus
        self.prefix = _PrefixBounds(self.decoys)
        self.kind = spec.estimator_kind
        self.p0 = self.params.p0
        self.s = self.params.s
        self.pD = self.params.pD

    # -- per-distance state ------------------------------------------------

    def _distance_state(self, length_km: float) -> dict:
        alpha = alpha_of_distance(length_km, self.params)
        decoys = np.asarray(self.decoys)
        signal_part = -np.expm1(-alpha * decoys) if decoys.size else np.array([])
        # estimation inputs with the dark-inclusive convention (p_dark = 0)
        c = signal_part + self.p0 * (1.0 - self.prefix.exp_neg)
        d = self.s * signal_part + 0.5 * self.p0 * (1.0 - self.prefix.exp_neg)
        state = {"alpha": alpha, "c": c, "d": d}
        if self.kind in ("aggregate", "wang", "ma"):
            q_prefix = []
            b_prefix = []
            for j in range(1, len(self.decoys) + 1):
                row = self.prefix.beta_rows[j - 1]
                q_j = float(row @ c[:j])
                b_j = float(row @ d[:j])
                if j % 2 == 1:
                    q_j -= self.prefix.sat_terms[j - 1]
                else:
                    b_j += self.prefix.sat_terms[j - 1]
                q_prefix.append(q_j)
                b_prefix.append(b_j)
            state["q_prefix"] = q_prefix
            state["b_prefix"] = b_prefix
        if self.kind == "ma":
            p1 = signal_part[0] + self.p0
            p2 = signal_part[1] + self.p0
            state["ma_p1"] = p1
            state["ma_p2"] = p2
        return state

    # -- estimator evaluation ----------------------------------------------

    def _order_k_bounds(self, state: dict, mu):
        """Order-k bounds with the trial signal as the k-th intensity."""
        decoys = self.decoys
        k = len(decoys) + 1
        alpha = state["alpha"]
        sign = -1.0 if k % 2 == 0 else 1.0
        prod_decoys = math.prod(decoys)
        c_sig = -np.expm1(-alpha * mu) + self.p0 * (1.0 - np.exp(-mu))
        d_sig = self.s * (-np.expm1(-alpha * mu)) + 0.5 * self.p0 * (1.0 - np.exp(-mu))
        q_k = 0.0
        b_k = 0.0
        for i, mu_i in enumerate(decoys):
            denom = mu_i**2
            for t, mu_t in enumerate(decoys):
                if t != i:
                    denom *= mu_i - mu_t
            beta_i = sign * prod_decoys * mu * math.exp(mu_i) / (denom * (mu_i - mu))
            q_k = q_k + beta_i * state["c"][i]
            b_k = b_k + beta_i * state["d"][i]
        denom_sig = mu**2
        for mu_t in decoys:
            denom_sig = denom_sig * (mu - mu_t)
        beta_sig = sign * prod_decoys * mu * np.exp(mu) / denom_sig
        q_k = q_k + beta_sig * c_sig
        b_k = b_k + beta_sig * d_sig
        saturation = prod_decoys * mu * _omega_over(decoys, mu)
        if k % 2 == 1:
            q_k = q_k - saturation
        else:
            b_k = b_k + saturation
        return q_k, b_k

    def _bounds(self, state: dict, mu, diagnostics: bool = False):
        """(q1, b1[, source indices]) for trial signal mu (scalar or array)."""
        kind = self.kind
        alpha = state["alpha"]
        if kind == "universal":
            q1 = alpha + self.p0
            b1 = self.s * alpha + 0.5 * self.p0
            q1 = q1 + 0.0 * mu  # broadcast to mu's shape
            b1 = b1 + 0.0 * mu
            if diagnostics:
                return q1, b1, SOURCE_EXACT, SOURCE_EXACT
            return q1, b1
        if kind == "wang":
            q1 = state["q_prefix"][1] + 0.0 * mu
            b1 = state["b_prefix"][0] + 0.0 * mu
            if diagnostics:
                return q1, b1, 2, 1
            return q1, b1
        if kind == "ma":
            m1, m2 = self.decoys
            p1, p2, p0 = state["ma_p1"], state["ma_p2"], self.p0
            p3 = -np.expm1(-alpha * mu) + p0
            numer = mu * (
                p2 * math.exp(m2)
                - p1 * math.exp(m1)
                - (m2**2 - m1**2) / mu**2 * (p3 * np.exp(mu) - p0)
            )
            q1 = numer / (m2 * mu - mu * m1 - m2**2 + m1**2)
            b1 = state["b_prefix"][0] + 0.0 * mu
            if diagnostics:
                return q1, b1, SOURCE_MA, 1
            return q1, b1
        # aggregation over orders 1..k with the signal as k-th intensity
        q_k, b_k = self._order_k_bounds(state, mu)
        q_all = [v + 0.0 * mu for v in state["q_prefix"]] + [q_k]
        b_all = [v + 0.0 * mu for v in state["b_prefix"]] + [b_k]
        q1 = np.maximum.reduce(q_all)
        b1 = np.minimum.reduce(b_all)
        if diagnostics:
            q_src = int(np.argmax([float(v) for v in q_all])) + 1
            b_src = int(np.argmin([float(v) for v in b_all])) + 1
            return q1, b1, q_src, b_src
        return q1, b1

    # -- rate evaluation -----------------------------------------------------

    def _rate(self, state: dict, mu, q1, b1):
        alpha = state["alpha"]
        signal = -np.expm1(-alpha * mu)
        p_sig = signal + self.p0
        s_sig = (self.s * signal + 0.5 * self.p0) / p_sig
        credit = single_photon_credit(np.clip(q1, 0.0, 1.0), np.clip(b1, 0.0, 1.0))
        if self.spec.direction == "forward":
            additive = np.exp(-mu) * self.p0
        else:
            additive = self.pD
        return 0.5 * (mu * np.exp(-mu) * credit + additive - p_sig * binary_entropy_bar(s_sig))

    def rate_at(self, length_km: float, mu: float) -> float:
        state = self._distance_state(length_km)
        q1, b1 = self._bounds(state, mu)
        return float(self._rate(state, mu, q1, b1))

    def optimized(self, length_km: float) -> SweepRow:
        state = self._distance_state(length_km)

        def scalar_rate(mu: float) -> float:
            q1, b1 = self._bounds(state, mu)
            return float(self._rate(state, mu, q1, b1))

        def vector_rate(mus: np.ndarray) -> np.ndarray:
            q1, b1 = self._bounds(state, mus)
            return self._rate(state, mus, q1, b1)

        mu_opt, rate_opt = optimize_signal_intensity(
            scalar_rate,
            self.spec.signal_lower,
            mu_cap=self.spec.mu_cap,
            coarse_step=self.spec.coarse_step,
            vector_fn=vector_rate,
        )
        q1, b1, q_src, b_src = self._bounds(state, mu_opt, diagnostics=True)
        return SweepRow(
            L_km=length_km,
            optimal_mu=mu_opt,
            rate=max(rate_opt, 0.0),
            rate_signed=rate_opt,
            q1_min=float(np.clip(q1, 0.0, 1.0)),
            b1_max=float(np.clip(b1, 0.0, 1.0)),
            q1_source_j=q_src,
            b1_source_j=b_src,
        )

    def envelope(self, length_km: float) -> float:
        return self.optimized(length_km).rate_signed


def run_scenario(
    spec: ScenarioSpec,
    l_range: tuple[float, float, float] = (0.0, 250.0, 1.0),
    refine_distance: bool = True,
) -> SweepResult:
    """Sweep distances, optimizing the signal intensity at each point.

    ``l_range`` is (min_km, max_km, step_km).  The achievable distance is
    refined by bisection when the optimized rate changes sign inside the
    range; it is None when the rate is still positive at max_km (range too
    short) and 0.0 when it is never positive.
    """
    l_min, l_max, step = (float(v) for v in l_range)
    if step <= 0.0:
        raise ConfigurationError("distance step must be positive")
    if l_max < l_min:
        raise ConfigurationError("l_max must not be below l_min")
    engine = _ScenarioEngine(spec)
    lengths = np.arange(l_min, l_max + 0.5 * step, step)
    rows = tuple(engine.optimized(float(length)) for length in lengths)
    achievable: Optional[float] = None
    signed = [row.rate_signed for row in rows]
    if all(v <= 0.0 for v in signed):
        achievable = 0.0
    elif signed[-1] > 0.0:
        achievable = None
    else:
        last_pos = max(i for i, v in enumerate(signed) if v > 0.0)
        if refine_distance:
            achievable = find_zero_distance(
                engine.envelope,
                l_min=float(lengths[last_pos]),
                l_max=float(lengths[last_pos + 1]),
                coarse_step=float(lengths[last_pos + 1] - lengths[last_pos]),
            )
        else:
            achievable = float(lengths[last_pos])
    return SweepResult(spec=spec, rows=rows, achievable_km=achievable)


def achievable_distance(
    spec: ScenarioSpec,
    l_min: float = 0.0,
    l_max: float = 240.0,
    coarse_step: float = 1.0,
    tol_km: float = 0.01,
) -> float:
    """Largest distance with positive optimized rate (1 km scan + bisection)."""
    engine = _ScenarioEngine(spec)
    return find_zero_distance(
        engine.envelope, l_min=l_min, l_max=l_max, coarse_step=coarse_step, tol_km=tol_km
    )
