"""How many positive rest points, and the volume splits that keep it at one.

For inhibited kinetics the growth deficit can develop extra zeros as the
volume split r grows.  The analysis runs through the equilibrium-split
map gamma: a level s is a rest level at split r exactly when
gamma(s) = r, so multiple rest points appear precisely when a horizontal
line cuts the graph of gamma more than once.  Tangencies of that line
with the graph mark the transitions; the supremum split r_bar below
which uniqueness is guaranteed comes from the extreme values of gamma
over case-dependent intervals.

The case split keys on where the pivot level sits relative to the upper
break-even concentration of the full dilution rate D:

  upper_break_even_absent      no upper break-even below the feed at D
  pivot_below_upper_break_even pivot left of the upper break-even
  pivot_at_upper_break_even    coincidence (within 1e-9)
  pivot_above_upper_break_even pivot right of the upper break-even

An independent cross-check recovers the same boundary by minimizing the
squared mismatch between growth curve and required-growth curve in value
and slope simultaneously; zero mismatch is a tangency.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ._numerics import bisect_root, golden_min, grid_extrema, grid_min
from .buffered import (BufferedConfig, ConsistencyError, buffer_substrate,
                       equilibrium_split, equilibrium_split_prime_zeros,
                       pivot_level, split_map, SingularSplitPoint)
from .kinetics import GrowthModel, Haldane

__all__ = [
    "CASE_NO_UPPER",
    "CASE_PIVOT_BELOW",
    "CASE_PIVOT_AT",
    "CASE_PIVOT_ABOVE",
    "NoTangency",
    "MultiplicityReport",
    "DomainCurve",
    "classify_case",
    "tangency_abscissas",
    "split_threshold",
    "split_threshold_crosscheck",
    "stable_domain_curve",
]

CASE_NO_UPPER = "upper_break_even_absent"
CASE_PIVOT_BELOW = "pivot_below_upper_break_even"
CASE_PIVOT_AT = "pivot_at_upper_break_even"
CASE_PIVOT_ABOVE = "pivot_above_upper_break_even"

_CASE_TOL = 1e-9
_TANGENCY_MATCH = 1e-9
_FIT_RESIDUAL = 1e-12
_FIT_STARTS = 64


class NoTangency(RuntimeError):
    """The tangency-fit cross-check found no value-and-slope match.

    Expected for uninhibited kinetics, where the required-growth curve
    can never be tangent to the growth curve from above.
    """


@dataclass(frozen=True)
class MultiplicityReport:
    """Uniqueness boundary in the volume split r at fixed alpha.

    r_plus_min is the smallest split at which the line r cuts the
    equilibrium-split map over the interval beyond the upper break-even
    (None when that break-even is absent).  r_minus_interval, when
    present, is a band of splits BELOW the boundary where extra rest
    points already occur; the uniqueness set is (0, cap) minus that
    closed band, with cap = r_plus_min (or 1 without an upper
    break-even), and r_bar is its supremum.
    """
    r_plus_min: Optional[float]
    r_minus_interval: Optional[tuple[float, float]]
    r_bar: float
    case: str

    def __post_init__(self) -> None:
        if not (0.0 < self.r_bar <= 1.0):
            raise ValueError(f"r_bar must lie in (0, 1], got {self.r_bar}")
        if self.case != CASE_NO_UPPER and self.r_plus_min is None:
            raise ValueError("r_plus_min is required when the upper "
                             "break-even sits below the feed")
        if self.r_minus_interval is not None:
            lo, hi = self.r_minus_interval
            if not lo <= hi:
                raise ValueError("r_minus_interval must be ordered")

    def guarantees_unique(self, r: float) -> bool:
        """Whether split r lies in the certified-uniqueness set."""
        cap = 1.0 if self.r_plus_min is None else self.r_plus_min
        if not (0.0 < r < cap):
            return False
        if self.r_minus_interval is not None:
            lo, hi = self.r_minus_interval
            if lo <= r <= hi:
                return False
        return True


@dataclass(frozen=True)
class DomainCurve:
    """The uniqueness boundary r_bar sampled over a grid of alphas.

    crossing_alpha, when present, is the alpha at which the pivot level
    meets the upper break-even concentration; the boundary is
    discontinuous there and jump records its one-sided limits
    (left, right) sampled at +-1e-4.
    """
    points: tuple[tuple[float, float], ...]
    crossing_alpha: Optional[float]
    jump: Optional[tuple[float, float]]

    def __post_init__(self) -> None:
        prev = 0.0
        for alpha, r_bar in self.points:
            if alpha <= prev:
                raise ValueError("alphas must be strictly increasing")
            if not (0.0 < r_bar <= 1.0):
                raise ValueError(f"r_bar out of (0, 1]: {r_bar}")
            prev = alpha


def classify_case(model: GrowthModel, S_in: float, D: float,
                  alpha: float) -> str:
    """Position of the pivot level against the upper break-even at D."""
    buffer_substrate(model, S_in, D, alpha)  # surfaces buffer feasibility errors
    window = model.break_even(D)
    if (window is None or window.lower >= S_in
            or not window.has_finite_upper or window.upper >= S_in):
        return CASE_NO_UPPER
    gap = pivot_level(model, S_in, D, alpha) - window.upper
    if abs(gap) <= _CASE_TOL * max(1.0, S_in):
        return CASE_PIVOT_AT
    return CASE_PIVOT_BELOW if gap < 0.0 else CASE_PIVOT_ABOVE


def tangency_abscissas(config: BufferedConfig) -> list[float]:
    """Levels where the split map is critical AND takes the value r.

    These are exactly the levels at which the rest-point count changes
    as r moves: the growth curve is tangent there to the required-growth
    curve.  Empty both for monotone kinetics and for splits strictly
    inside the uniqueness set.
    """
    out: list[float] = []
    for s in equilibrium_split_prime_zeros(config, 0.0, config.S_in):
        try:
            value = equilibrium_split(config, s)
        except SingularSplitPoint:
            continue
        if abs(value - config.r) <= _TANGENCY_MATCH:
            out.append(s)
    return out


def _minus_band(gamma, interval: Optional[tuple[float, float]]
                ) -> Optional[tuple[float, float]]:
    """Band of split values spanned by interior extrema of gamma.

    (smallest local minimum value, largest local maximum value); None
    when gamma is monotone over the interval or the interval is absent.
    """
    if interval is None or interval[1] <= interval[0]:
        return None
    mins, maxs = grid_extrema(gamma, interval[0], interval[1], n=2048)
    if not mins and not maxs:
        return None
    min_vals = [v for _, v in mins]
    max_vals = [v for _, v in maxs]
    lo = min(min_vals) if min_vals else min(max_vals)
    hi = max(max_vals) if max_vals else max(min_vals)
    return (min(lo, hi), max(lo, hi))


def split_threshold(model: GrowthModel, S_in: float, D: float,
                    alpha: float) -> MultiplicityReport:
    """Uniqueness boundary r_bar and the sets behind it.

    The split map equals 1 at the break-even levels of D and at the
    feed, and 0 at the pivot, so its extreme values over the intervals
    below are interior and found by a 2048-point scan refined by
    golden-section to 1e-10.
    """
    case = classify_case(model, S_in, D, alpha)
    pv = pivot_level(model, S_in, D, alpha)
    gamma = split_map(model, S_in, D, alpha)
    window = model.break_even(D)

    r_plus_min: Optional[float] = None
    if case == CASE_NO_UPPER:
        if window is None or window.lower >= S_in:
            extrema_interval: Optional[tuple[float, float]] = (
                max(pv, 0.0), S_in)
        elif pv > window.lower:
            extrema_interval = (window.lower, pv)
        else:
            extrema_interval = None
        cap = 1.0
    else:
        lam_minus, lam_plus = window.lower, window.upper
        if case == CASE_PIVOT_BELOW:
            plus_interval = (lam_plus, S_in)
            extrema_interval = (lam_minus, pv) if pv > lam_minus else None
        elif case == CASE_PIVOT_AT:
            plus_interval = (lam_minus, S_in)
            extrema_interval = None
        else:
            plus_interval = (lam_minus, lam_plus)
            extrema_interval = (pv, S_in)
        r_plus_min = grid_min(gamma, plus_interval[0], plus_interval[1])[1]
        cap = r_plus_min

    band = _minus_band(gamma, extrema_interval)
    if (isinstance(model, Haldane) and band is not None
            and r_plus_min is not None and not band[1] < r_plus_min):
        raise ConsistencyError(
            f"extra-root band {band} is expected to sit strictly below the "
            f"boundary {r_plus_min} for this kinetics")

    if band is None or band[1] < cap or band[0] >= cap:
        r_bar = cap
    else:
        r_bar = band[0]
    return MultiplicityReport(r_plus_min, band, min(r_bar, 1.0), case)


def _fit_domain(model: GrowthModel, S_in: float, D: float,
                alpha: float) -> tuple[float, float]:
    """s-interval where a tangency would certify the boundary.

    Encodes the sign condition (s - up)(up - pivot) >= 0 against the
    upper break-even level up of D, intersected with (lower break-even,
    feed).  Raises NoTangency when empty.
    """
    window = model.break_even(D)
    if window is None or window.lower >= S_in:
        raise NoTangency("no growth window below the feed at dilution D")
    if not window.has_finite_upper:
        raise NoTangency("no upper break-even: tangency from above is "
                         "impossible for monotone kinetics")
    lam_minus, lam_plus = window.lower, window.upper
    pv = pivot_level(model, S_in, D, alpha)
    if abs(pv - lam_plus) <= _CASE_TOL * max(1.0, S_in):
        return (lam_minus, S_in)
    if pv < lam_plus:
        if lam_plus >= S_in:
            raise NoTangency("upper break-even at or above the feed")
        return (lam_plus, S_in)
    return (lam_minus, min(lam_plus, S_in))


def split_threshold_crosscheck(model: GrowthModel, S_in: float, D: float,
                               alpha: float) -> float:
    """Boundary split via tangency fitting; independent of split_threshold.

    Minimizes the squared mismatch between growth and required growth in
    both value and slope over (split, level).  The split enters the
    mismatch quadratically, so for each level the best split is closed
    form and the search reduces to one dimension: 64 coarse starts, each
    golden-refined to 1e-10.  A residual above 1e-12 means no tangency
    exists and the fit diagnoses that instead of returning a split.
    """
    s2 = buffer_substrate(model, S_in, D, alpha)
    lo, hi = _fit_domain(model, S_in, D, alpha)
    gap = alpha * (S_in - s2)  # = S_in - pivot

    def reduced(s: float) -> tuple[float, float]:
        """(residual, u) at level s, u = (1-r)/r optimal for that s."""
        a = model._rate_raw(s) / D - 1.0
        b = model._rate_prime_raw(s) / D
        c = 1.0 - gap / (S_in - s)
        e = gap / (S_in - s) ** 2
        u = (c * a - e * b) / (c * c + e * e)
        if u <= 0.0:
            return (a * a + b * b, 0.0)
        return ((a - u * c) ** 2 + (b + u * e) ** 2, u)

    step = (hi - lo) / _FIT_STARTS
    xs = [lo + (i + 0.5) * step for i in range(_FIT_STARTS)]
    vs = [reduced(x)[0] for x in xs]
    candidates: list[tuple[float, float]] = []
    for i in range(_FIT_STARTS):
        if 0 < i < _FIT_STARTS - 1 and not (vs[i] <= vs[i - 1]
                                            and vs[i] <= vs[i + 1]):
            continue
        a = xs[i - 1] if i > 0 else lo
        b = xs[i + 1] if i < _FIT_STARTS - 1 else hi
        s_best, f_best = golden_min(lambda s: reduced(s)[0], a, b, 1e-10)
        candidates.append((f_best, s_best))
    best_r: Optional[float] = None
    for residual, s_best in candidates:
        if residual <= _FIT_RESIDUAL:
            u = reduced(s_best)[1]
            r = 1.0 / (1.0 + u)
            if best_r is None or r < best_r:
                best_r = r
    if best_r is None:
        raise NoTangency(
            f"best value-and-slope mismatch {min(v for v, _ in candidates)} "
            f"exceeds {_FIT_RESIDUAL}: no tangency in ({lo}, {hi})")
    return best_r


def stable_domain_curve(model: GrowthModel, S_in: float, D: float,
                        alpha_grid: list[float]) -> DomainCurve:
    """Sample the uniqueness boundary over increasing alphas.

    When the upper break-even of D sits below the feed, the pivot level
    crosses it at some alpha inside the grid's span; the boundary jumps
    there and the one-sided limits are recorded at +-1e-4.
    """
    if not alpha_grid:
        raise ValueError("alpha_grid must not be empty")
    bound = model.rate(S_in) / D
    prev = 0.0
    for a in alpha_grid:
        if a <= prev:
            raise ValueError("alpha_grid must be strictly increasing")
        if a > bound + 1e-12:
            raise ValueError(
                f"alpha = {a} exceeds the feasibility bound mu(S_in)/D = "
                f"{bound}")
        prev = a

    points = tuple((a, split_threshold(model, S_in, D, a).r_bar)
                   for a in alpha_grid)

    crossing: Optional[float] = None
    jump: Optional[tuple[float, float]] = None
    window = model.break_even(D)
    if (window is not None and window.has_finite_upper
            and window.lower < S_in and window.upper < S_in):
        lam_plus = window.upper

        def g(a: float) -> float:
            return pivot_level(model, S_in, D, a) - lam_plus

        g_lo, g_hi = g(alpha_grid[0]), g(alpha_grid[-1])
        if g_lo == 0.0 or g_hi == 0.0 or (g_lo > 0.0) != (g_hi > 0.0):
            crossing = bisect_root(g, alpha_grid[0], alpha_grid[-1], 0.0)
            left, right = crossing - 1e-4, crossing + 1e-4
            if left > 0.0 and right <= bound:
                jump = (split_threshold(model, S_in, D, left).r_bar,
                        split_threshold(model, S_in, D, right).r_bar)
    return DomainCurve(points, crossing, jump)
