"""Volume sizing: enlarge the single tank, or add a small buffer.

Two ways to rescue a bistable chemostat whose washout state is
attracting.  Scenario 1 enlarges the whole vessel until dilution drops
below the growth rate at the feed level; the required relative increase
is D / mu(S_in) - 1.  Scenario 2 keeps the vessel and adds a buffer
sized from two auxiliary curves:

    washout_surplus(s)  = (S_in - s) (D - mu(s))   largest shortfall the
                                                   buffer must cover
    uptake_capacity(s)  = mu(s) (S_in - s)         best conversion a
                                                   buffer vessel can run

The minimal buffer-to-total volume ratio is the max of the first over
the inhibited range divided by the max of the second over the range a
buffer can reach, and it always undercuts the Scenario 1 requirement.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ._numerics import bisect_root, golden_max
from .kinetics import GrowthModel

__all__ = [
    "DesignReport",
    "min_enlargement_ratio",
    "washout_surplus",
    "uptake_capacity",
    "buffer_design",
]

_GRID = 2048


def min_enlargement_ratio(model: GrowthModel, S_in: float, D: float) -> float:
    """Scenario 1: minimal relative volume increase, max(0, D/mu(S_in) - 1).

    Zero when growth at the feed level already beats dilution (nothing
    to fix).
    """
    if S_in <= 0.0:
        raise ValueError("feed concentration S_in must be positive")
    if D <= 0.0:
        raise ValueError("dilution rate D must be positive")
    mu_feed = model.rate(S_in)
    if mu_feed <= 0.0:
        raise ValueError("growth rate vanishes at the feed level")
    return max(0.0, D / mu_feed - 1.0)


def washout_surplus(model: GrowthModel, S_in: float, D: float,
                    s: float) -> float:
    """(S_in - s)(D - mu(s)): dilution's edge over growth, feed-weighted.

    Negative exactly where growth beats dilution, zero at the break-even
    levels and at the feed.
    """
    if not (0.0 <= s <= S_in):
        raise ValueError(f"level s must lie in [0, S_in], got {s}")
    return (S_in - s) * (D - model.rate(s))


def uptake_capacity(model: GrowthModel, S_in: float, s: float) -> float:
    """mu(s)(S_in - s): substrate conversion rate a vessel held at s runs."""
    if not (0.0 <= s <= S_in):
        raise ValueError(f"level s must lie in [0, S_in], got {s}")
    return model.rate(s) * (S_in - s)


@dataclass(frozen=True)
class DesignReport:
    """Scenario comparison at one operating point.

    v2_inf is the infimal buffer volume fraction V2/V1; delta_v_inf the
    infimal Scenario 1 enlargement; d2_star the buffer dilution rate
    that runs the buffer at peak conversion; s_bar the highest level a
    viable buffer can hold.  d2_interval_for(v2) returns the admissible
    buffer dilution range for an actual buffer size v2, or None when v2
    is too small.
    """
    delta_v_inf: float
    v2_inf: float
    d2_star: float
    s_bar: float
    surplus_max: float
    _model: GrowthModel
    _S_in: float
    _D: float

    def d2_interval_for(self, v2: float) -> Optional[tuple[float, float]]:
        """Buffer dilution rates D2 making size v2 sufficient.

        The admissible set is where surplus_max < D2 * v2 * (S_in -
        lower break-even of D2) < S_in; empty (None) for v2 below
        v2_inf.  Boundaries located by bisection after a grid bracket.
        """
        if v2 <= 0.0:
            raise ValueError("buffer volume fraction v2 must be positive")
        model, S_in = self._model, self._S_in
        mu_feed = model.rate(S_in)

        def load(d2: float) -> float:
            return d2 * v2 * (S_in - model.break_even(d2).lower)

        n = _GRID
        step = mu_feed / n
        xs = [step * (i + 0.5) for i in range(n)]
        ok = [self.surplus_max < load(x) < S_in for x in xs]
        if not any(ok):
            return None
        i0 = ok.index(True)
        i1 = n - 1 - ok[::-1].index(True)
        if not all(ok[i0:i1 + 1]):
            raise RuntimeError("admissible D2 set is not an interval; "
                               "grid shows disconnected feasibility")
        lo = xs[i0]
        if i0 > 0:
            lo = bisect_root(lambda d: load(d) - self.surplus_max,
                             xs[i0 - 1], xs[i0], 0.0)
        hi = xs[i1]
        if i1 < n - 1:
            binds_feed = load(xs[i1 + 1]) >= S_in
            target = self._S_in if binds_feed else self.surplus_max
            hi = bisect_root(lambda d: load(d) - target,
                             xs[i1], xs[i1 + 1], 0.0)
        return (lo, hi)


def _grid_max(f: Callable[[float], float], lo: float,
              hi: float) -> tuple[float, float]:
    """Global max on (lo, hi): 2048-point bracket + golden refinement."""
    step = (hi - lo) / _GRID
    xs = [lo + step * (i + 0.5) for i in range(_GRID)]
    vs = [f(x) for x in xs]
    i = max(range(_GRID), key=lambda k: vs[k])
    a = xs[i - 1] if i > 0 else lo
    b = xs[i + 1] if i < _GRID - 1 else hi
    return golden_max(f, a, b, 1e-10)


def buffer_design(model: GrowthModel, S_in: float, D: float) -> DesignReport:
    """Scenario 2: minimal buffer volume fraction and how to run it.

    Requires the genuinely bistable setting: a growth window at D whose
    upper break-even sits below the feed.  Errors name the failing
    clause otherwise.
    """
    if S_in <= 0.0:
        raise ValueError("feed concentration S_in must be positive")
    if D <= 0.0:
        raise ValueError("dilution rate D must be positive")
    window = model.break_even(D)
    if window is None:
        raise ValueError("precondition failed: growth never reaches the "
                         "dilution rate D (no break-even window)")
    if not window.has_finite_upper:
        raise ValueError("precondition failed: no upper break-even at D "
                         "(kinetics not inhibited)")
    if window.upper >= S_in:
        raise ValueError("precondition failed: upper break-even at or above "
                         "the feed level (the single vessel is not bistable)")

    mu_feed = model.rate(S_in)
    feed_window = model.break_even(mu_feed)
    if feed_window is None:
        raise ValueError("precondition failed: growth rate at the feed "
                         "level is unreachable elsewhere")
    s_bar = feed_window.lower

    _, surplus_max = _grid_max(
        lambda s: washout_surplus(model, S_in, D, s), window.upper, S_in)
    s_best, capacity_max = _grid_max(
        lambda s: uptake_capacity(model, S_in, s), 0.0, s_bar)
    return DesignReport(
        delta_v_inf=min_enlargement_ratio(model, S_in, D),
        v2_inf=surplus_max / capacity_max,
        d2_star=model.rate(s_best),
        s_bar=s_bar,
        surplus_max=surplus_max,
        _model=model, _S_in=S_in, _D=D)
