"""Two-vessel buffered chemostat: configuration, rest points, growth balance.

A small buffer vessel (volume fraction 1 - r of the total) receives a
share of the feed and drains into the main vessel.  With alpha the
buffer's flow-per-volume share and D the aggregate dilution rate, the
unit-yield model reads

    dS1/dt = -mu(S1) X1 + (D/r) [a(1-r)(S2 - S1) + (1 - a(1-r))(S_in - S1)]
    dX1/dt =  mu(S1) X1 + (D/r) [a(1-r) X2 - X1]
    dS2/dt = -mu(S2) X2 + a D (S_in - S2)
    dX2/dt = (mu(S2) - a D) X2

Rest points split into two families: the buffer-active branch, where the
buffer holds its own positive equilibrium, and the buffer-washout branch
with a sterile buffer.  On the buffer-active branch the main vessel's
substrate level solves

    growth_deficit(s) = D * required_growth_ratio(s) - mu(s) = 0,

and the companion map equilibrium_split(s) returns the volume split r
that would turn a given level s into a rest point, which is what the
multiplicity analysis builds on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ._numerics import bisect_root, newton_polish, real_cubic_roots
from .kinetics import GrowthModel, Haldane

__all__ = [
    "InfeasibleBufferError",
    "SingularSplitPoint",
    "ConsistencyError",
    "BufferedConfig",
    "Equilibrium",
    "IntervalSet",
    "BRANCH_POSITIVE",
    "BRANCH_WASHOUT",
    "buffer_substrate",
    "pivot_level",
    "required_growth_ratio",
    "required_growth_ratio_prime",
    "growth_deficit",
    "growth_deficit_prime",
    "equilibrium_split",
    "split_map",
    "equilibrium_split_prime_zeros",
    "find_equilibria",
    "surplus_region",
]

BRANCH_POSITIVE = "buffer_positive"
BRANCH_WASHOUT = "buffer_washout"

_SCAN_POINTS = 4096
_RESIDUAL_TOL = 1e-10          # absolute, on the rest-point equations
_TANGENCY_TOL = 1e-8           # |deficit| at a critical point counted as a double root
_NEAR_TANGENCY = 1e-4          # triggers the refined pair-recovery pass
_CROSSCHECK_TOL = 1e-7         # closed-form vs scan root agreement
_EDGE_PAD = 1e-12              # matches the closed-form route's root filter
_SINGULAR_TOL = 1e-14


class InfeasibleBufferError(ValueError):
    """The buffer cannot sustain its own positive equilibrium.

    clause is "no_growth_window" when growth never exceeds the buffer
    dilution rate alpha*D, or "buffer_level_above_feed" when the
    break-even level exists but sits at or above the feed concentration.
    """

    def __init__(self, clause: str, detail: str):
        self.clause = clause
        super().__init__(detail)


class SingularSplitPoint(ValueError):
    """equilibrium_split hit a non-removable denominator zero."""


class ConsistencyError(RuntimeError):
    """Closed-form and scan-based root sets disagree beyond tolerance."""


@dataclass(frozen=True)
class BufferedConfig:
    """Operating point of the buffered chemostat.

    alpha > 0 and 0 < r < 1 with alpha * (1 - r) <= 1; the last bound is
    the feed split constraint (the main vessel's direct feed share is
    1 - alpha (1 - r) and cannot go negative).  physical optionally
    carries the raw (Q1, Q2, V1, V2) this configuration came from and is
    cross-checked against (alpha, r, D) on construction.
    """
    model: GrowthModel
    S_in: float
    D: float
    alpha: float
    r: float
    physical: Optional[tuple[float, float, float, float]] = field(default=None)

    def __post_init__(self) -> None:
        if self.S_in <= 0.0:
            raise ValueError("feed concentration S_in must be positive")
        if self.D <= 0.0:
            raise ValueError("dilution rate D must be positive")
        if self.alpha <= 0.0:
            raise ValueError("flow share alpha must be positive")
        if not (0.0 < self.r < 1.0):
            raise ValueError("volume split r must lie strictly inside (0, 1)")
        if self.alpha * (1.0 - self.r) > 1.0 + 1e-12:
            raise ValueError(
                "alpha * (1 - r) exceeds 1: the main vessel's feed share "
                "would be negative")
        if self.physical is not None:
            q1, q2, v1, v2 = self.physical
            if v1 <= 0.0 or v2 <= 0.0:
                raise ValueError("physical volumes must be positive")
            if q2 <= 0.0 or q1 < 0.0:
                raise ValueError("physical flows need Q2 > 0 and Q1 >= 0")
            d = (q1 + q2) / (v1 + v2)
            r = v1 / (v1 + v2)
            alpha = q2 / ((1.0 - r) * (q1 + q2))
            for name, want, have in (("D", d, self.D), ("r", r, self.r),
                                     ("alpha", alpha, self.alpha)):
                if abs(want - have) > 1e-12 * max(1.0, abs(want)):
                    raise ValueError(
                        f"physical quantities imply {name} = {want}, "
                        f"config says {have}")

    @classmethod
    def from_physical(cls, Q1: float, Q2: float, V1: float, V2: float,
                      S_in: float, model: GrowthModel) -> "BufferedConfig":
        """Build the dimensionless operating point from flows and volumes.

        Q1 may be zero (the whole feed routed through the buffer); a zero
        buffer volume V2 or main volume V1 has no finite counterpart in
        this parameterization and is rejected.
        """
        if V1 <= 0.0:
            raise ValueError("V1 = 0 (pure by-pass) is unsupported")
        if V2 <= 0.0:
            raise ValueError("V2 = 0 (no buffer vessel) is unsupported")
        if Q2 <= 0.0:
            raise ValueError("buffer feed flow Q2 must be positive")
        if Q1 < 0.0:
            raise ValueError("main feed flow Q1 must be >= 0")
        q = Q1 + Q2
        v = V1 + V2
        r = V1 / v
        return cls(model=model, S_in=S_in, D=q / v,
                   alpha=Q2 / ((1.0 - r) * q), r=r,
                   physical=(Q1, Q2, V1, V2))


@dataclass(frozen=True)
class Equilibrium:
    """A rest point of the four-state system with its linearization."""
    s1: float
    x1: float
    s2: float
    x2: float
    branch: str
    eigenvalues: tuple[float, float, float, float]
    tag: str
    unstable: int

    @property
    def state(self) -> tuple[float, float, float, float]:
        return (self.s1, self.x1, self.s2, self.x2)


@dataclass(frozen=True)
class IntervalSet:
    """Disjoint open intervals, sorted by left endpoint."""
    components: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        prev = -math.inf
        for lo, hi in self.components:
            if not (hi > lo >= prev):
                raise ValueError("components must be sorted and disjoint")
            prev = hi

    def __len__(self) -> int:
        return len(self.components)

    def contains(self, x: float) -> bool:
        return any(lo < x < hi for lo, hi in self.components)


# ---------------------------------------------------------------------------
# scalar maps; explicit-argument forms feed the multiplicity module, which
# sweeps alpha without committing to a volume split r

def buffer_substrate(model: GrowthModel, S_in: float, D: float,
                     alpha: float) -> float:
    """The buffer's attracting equilibrium substrate level.

    This is the lower break-even concentration of the buffer dilution
    rate alpha * D.  Raises InfeasibleBufferError when the buffer cannot hold a
    positive equilibrium below the feed level.
    """
    window = model.break_even(alpha * D)
    if window is None:
        raise InfeasibleBufferError(
            "no_growth_window",
            f"growth never exceeds the buffer dilution rate {alpha * D}")
    if window.lower >= S_in:
        raise InfeasibleBufferError(
            "buffer_level_above_feed",
            f"buffer break-even level {window.lower} is not below the feed "
            f"concentration {S_in}")
    return window.lower


def pivot_level(model: GrowthModel, S_in: float, D: float,
                alpha: float) -> float:
    """Alpha-weighted blend of buffer equilibrium and feed substrate levels.

    The required-growth-ratio curve passes through 1 at this level for
    every volume split r, so the whole family of curves pivots here.
    Negative values are legitimate (alpha > 1 with a lean buffer) and
    returned as-is.
    """
    s2 = buffer_substrate(model, S_in, D, alpha)
    return alpha * s2 + (1.0 - alpha) * S_in


def _ratio(S_in: float, alpha: float, r: float, s2: float, s: float) -> float:
    return 1.0 + ((1.0 - r) / r) * (1.0 - alpha * (S_in - s2) / (S_in - s))


def _ratio_prime(S_in: float, alpha: float, r: float, s2: float,
                 s: float) -> float:
    return -((1.0 - r) / r) * alpha * (S_in - s2) / (S_in - s) ** 2


def required_growth_ratio(config: BufferedConfig, s: float) -> float:
    """mu(s)/D needed to hold the main vessel at level s, as a ratio.

    Strictly decreasing in s with a pole at the feed level; equals 1 at
    the pivot level regardless of r.
    """
    if not (0.0 <= s < config.S_in):
        raise ValueError(f"level s must lie in [0, S_in), got {s}")
    s2 = buffer_substrate(config.model, config.S_in, config.D, config.alpha)
    return _ratio(config.S_in, config.alpha, config.r, s2, s)


def required_growth_ratio_prime(config: BufferedConfig, s: float) -> float:
    if not (0.0 <= s < config.S_in):
        raise ValueError(f"level s must lie in [0, S_in), got {s}")
    s2 = buffer_substrate(config.model, config.S_in, config.D, config.alpha)
    return _ratio_prime(config.S_in, config.alpha, config.r, s2, s)


def growth_deficit(config: BufferedConfig, s: float) -> float:
    """D * required_growth_ratio(s) - mu(s).

    Positive where dilution outpaces growth (substrate accumulates on
    the slow manifold), negative where growth wins; its zeros on
    (0, S_in) are exactly the buffer-active rest levels of the main
    vessel.
    """
    return config.D * required_growth_ratio(config, s) - config.model.rate(s)


def growth_deficit_prime(config: BufferedConfig, s: float) -> float:
    return (config.D * required_growth_ratio_prime(config, s)
            - config.model.rate_prime(s))


def _split_pieces(model: GrowthModel, S_in: float, D: float, alpha: float,
                  s: float, pivot: float) -> tuple[float, float]:
    num = pivot - s
    den = pivot - S_in + (S_in - s) * model.rate(s) / D
    return num, den


def equilibrium_split(config: BufferedConfig, s: float) -> float:
    """The volume split r at which level s would be a rest point.

    Defined on (0, S_in) wherever the denominator is non-zero; at the
    pivot level the zero is removable exactly when the growth rate there
    equals D, and the continuous extension

        1 / (1 - (S_in - pivot) mu'(pivot) / D)

    is used inside a narrow window around the pivot in that case.
    """
    return _split_value(config.model, config.S_in, config.D, config.alpha, s)


def split_map(model: GrowthModel, S_in: float, D: float, alpha: float):
    """Closure form of equilibrium_split with the pivot precomputed.

    Intended for sweeps that evaluate the map thousands of times at a
    fixed operating point.  The removable singularity at the pivot level
    (present exactly when the growth rate there equals D) is patched by
    its continuous extension inside a 1e-9-wide window; any other
    denominator zero raises SingularSplitPoint.
    """
    pv = pivot_level(model, S_in, D, alpha)
    mu = model._rate_raw
    ext: Optional[float] = None
    if 0.0 < pv < S_in and abs(mu(pv) - D) <= 1e-6 * D:
        ext = 1.0 / (1.0 - (S_in - pv) * model._rate_prime_raw(pv) / D)
    window = 1e-9 * max(1.0, abs(pv))

    def gamma(s: float) -> float:
        if ext is not None and abs(s - pv) <= window:
            return ext
        num = pv - s
        den = pv - S_in + (S_in - s) * mu(s) / D
        if abs(den) <= _SINGULAR_TOL:
            raise SingularSplitPoint(
                f"equilibrium_split has a non-removable singularity at s = {s}")
        return num / den

    return gamma


def _split_value(model: GrowthModel, S_in: float, D: float, alpha: float,
                 s: float) -> float:
    if not (0.0 < s < S_in):
        raise ValueError(f"level s must lie in (0, S_in), got {s}")
    return split_map(model, S_in, D, alpha)(s)


def _split_prime_sign_fn(model: GrowthModel, S_in: float, D: float,
                         alpha: float, pv: float):
    """Numerator of the split map's derivative (same zeros, no poles).

    With num = pv - s and den the split denominator, the derivative's
    sign is carried by -(den + num * den'), den' = (-mu + (S_in-s) mu')/D.
    """
    def h(s: float) -> float:
        num, den = _split_pieces(model, S_in, D, alpha, s, pv)
        den_p = (-model.rate(s) + (S_in - s) * model.rate_prime(s)) / D
        return -(den + num * den_p)
    return h


def equilibrium_split_prime_zeros(config: BufferedConfig, lo: float,
                                  hi: float) -> list[float]:
    """Critical points of the split map on (lo, hi), by bracketed bisection.

    The derivative's zeros are located through its numerator, which is
    continuous across the map's own poles, so no cell is skipped.
    """
    model, S_in, D, alpha = (config.model, config.S_in, config.D, config.alpha)
    pv = pivot_level(model, S_in, D, alpha)
    h = _split_prime_sign_fn(model, S_in, D, alpha, pv)
    step = (hi - lo) / _SCAN_POINTS
    zeros: list[float] = []
    prev_x = lo + 0.5 * step
    prev_v = h(prev_x)
    for i in range(1, _SCAN_POINTS):
        x = lo + (i + 0.5) * step
        v = h(x)
        if (v > 0.0) != (prev_v > 0.0):
            zeros.append(bisect_root(h, prev_x, x, 0.0))
        prev_x, prev_v = x, v
    return zeros


# ---------------------------------------------------------------------------
# rest-point enumeration

def _deficit_fn(config: BufferedConfig):
    model, S_in, D, alpha, r = (config.model, config.S_in, config.D,
                                config.alpha, config.r)
    s2 = buffer_substrate(model, S_in, D, alpha)
    mu = model._rate_raw
    k = (1.0 - r) / r
    a_gap = alpha * (S_in - s2)

    def f(s: float) -> float:
        return D * (1.0 + k * (1.0 - a_gap / (S_in - s))) - mu(s)

    def fp(s: float) -> float:
        return -D * k * a_gap / (S_in - s) ** 2 - model._rate_prime_raw(s)

    return f, fp


def _positive_levels(config: BufferedConfig) -> list[float]:
    """Sorted rest levels of the main vessel on (0, S_in).

    Generic route: midpoint sign scan plus a critical-point pass that
    recovers double roots and sub-grid root pairs.  For Haldane kinetics
    the equivalent cubic is solved in closed form and the two routes are
    cross-checked; disagreement raises ConsistencyError.
    """
    S_in = config.S_in
    f, fp = _deficit_fn(config)
    step = S_in / _SCAN_POINTS
    xs = [(i + 0.5) * step for i in range(_SCAN_POINTS)]
    vs = [f(x) for x in xs]
    scale = max(1.0, config.D)

    roots: list[float] = []
    for i in range(1, _SCAN_POINTS):
        if (vs[i] > 0.0) != (vs[i - 1] > 0.0):
            roots.append(bisect_root(f, xs[i - 1], xs[i], 0.0))

    # the midpoint scan stops half a step short of each end; a root can
    # hide there (near the feed the deficit always ends at -inf, and the
    # crossing moves inside the last half-cell as r -> 1)
    lo_edge, hi_edge = _EDGE_PAD * S_in, (1.0 - _EDGE_PAD) * S_in
    if (f(lo_edge) > 0.0) != (vs[0] > 0.0):
        roots.append(bisect_root(f, lo_edge, xs[0], 0.0))
    if (f(hi_edge) > 0.0) != (vs[-1] > 0.0):
        roots.append(bisect_root(f, xs[-1], hi_edge, 0.0))

    # critical points with small residual: double roots or hidden pairs
    prev = fp(xs[0])
    for i in range(1, _SCAN_POINTS):
        cur = fp(xs[i])
        if (cur > 0.0) != (prev > 0.0):
            c = bisect_root(fp, xs[i - 1], xs[i], 0.0)
            fc = f(c)
            if abs(fc) <= _TANGENCY_TOL * scale:
                roots.append(c)
            elif abs(fc) <= _NEAR_TANGENCY * scale:
                # a root pair may hide inside one grid cell around c
                j = min(int(c / step), _SCAN_POINTS - 1)
                left = xs[j - 1] if j > 0 else 0.5 * step * 0.01
                right = xs[j + 1] if j < _SCAN_POINTS - 1 else S_in - 1e-12
                if (f(left) > 0.0) != (fc > 0.0):
                    roots.append(bisect_root(f, left, c, 0.0))
                    roots.append(bisect_root(f, c, right, 0.0))
        prev = cur

    for i, s in enumerate(roots):
        if abs(fp(s)) > 1e-9 * scale:
            roots[i] = newton_polish(f, fp, s, 0.0, S_in)
    roots = _dedupe(sorted(roots), 1e-8 * S_in)

    if isinstance(config.model, Haldane):
        closed = _haldane_levels(config)
        if not _matched(roots, closed, _CROSSCHECK_TOL * max(1.0, S_in)):
            raise ConsistencyError(
                f"closed-form levels {closed} disagree with scanned levels "
                f"{roots} beyond {_CROSSCHECK_TOL}")
    return roots


def _haldane_levels(config: BufferedConfig) -> list[float]:
    """Rest levels via the equivalent cubic, exact for Haldane kinetics."""
    model = config.model
    S_in, D, alpha, r = config.S_in, config.D, config.alpha, config.r
    s2 = buffer_substrate(model, S_in, D, alpha)
    K, K_I, mu_bar = model.K, model.K_I, model.mu_bar
    a_cap = S_in - alpha * (1.0 - r) * (S_in - s2)
    a3 = -D / K_I
    a2 = D * (a_cap / K_I - 1.0) + r * mu_bar
    a1 = D * (a_cap - K) - r * mu_bar * S_in
    a0 = D * a_cap * K
    tol = 1e-12 * S_in
    return sorted(t for t in _dedupe(sorted(real_cubic_roots(a3, a2, a1, a0)),
                                     1e-8 * S_in)
                  if tol < t < S_in - tol)


def _dedupe(sorted_vals: list[float], tol: float) -> list[float]:
    out: list[float] = []
    for v in sorted_vals:
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def _matched(a: list[float], b: list[float], tol: float) -> bool:
    if len(a) != len(b):
        return False
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def find_equilibria(config: BufferedConfig) -> list[Equilibrium]:
    """All rest points of the four-state system, stability-tagged.

    Buffer-active branch: one rest point per zero of the growth deficit
    on (0, S_in), with the buffer at its own positive equilibrium.
    Buffer-washout branch: a sterile buffer at the feed level combined
    with each single-vessel rest point of the main vessel at dilution
    D / r, plus total washout.  Every returned state satisfies the
    rest-point equations to within 1e-10.
    """
    from . import stability

    model, S_in, D, alpha, r = (config.model, config.S_in, config.D,
                                config.alpha, config.r)
    s2 = buffer_substrate(model, S_in, D, alpha)
    out: list[Equilibrium] = []

    for s1 in _positive_levels(config):
        report = stability.positive_eigenvalues(config, s1, s2)
        out.append(Equilibrium(s1, S_in - s1, s2, S_in - s2, BRANCH_POSITIVE,
                               report.values, report.tag, report.unstable))

    washout_levels = [S_in]
    window = model.break_even(D / r)
    if window is not None:
        if window.lower < S_in:
            washout_levels.append(window.lower)
        if window.has_finite_upper and window.upper < S_in:
            washout_levels.append(window.upper)
    for s1 in sorted(washout_levels):
        report = stability.washout_eigenvalues(config, s1)
        out.append(Equilibrium(s1, S_in - s1, S_in, 0.0, BRANCH_WASHOUT,
                               report.values, report.tag, report.unstable))
    return out


def surplus_region(config: BufferedConfig) -> IntervalSet:
    """Open subset of (0, S_in) where growth exceeds the required rate.

    Non-empty for every valid configuration satisfying the buffer
    condition: the deficit is positive at 0 and falls to -inf at the
    feed level, so the region always reaches up to S_in.  Left endpoints
    of its components are the attracting rest levels.
    """
    f, _ = _deficit_fn(config)
    S_in = config.S_in
    roots = _positive_levels(config)
    cuts = [0.0] + roots + [S_in]
    comps: list[tuple[float, float]] = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        if hi - lo > 0.0 and f(mid) < 0.0:
            comps.append((lo, hi))
    return IntervalSet(tuple(comps))
