"""Small deterministic numerical helpers shared across the package.

Everything here is scalar-oriented and allocation-free on purpose: the
callers evaluate cheap rational functions many times inside scans, and
plain floats beat array round-trips at these sizes.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_root(f: Callable[[float], float], lo: float, hi: float,
                f_tol: float, max_iter: int = 200) -> float:
    """Bisection on a bracketing interval [lo, hi].

    Stops when |f(mid)| <= f_tol or the interval collapses to machine
    resolution; max_iter caps the work either way.  Requires a sign
    change over the bracket.
    """
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise ValueError("bisect_root: no sign change over bracket")
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid) <= f_tol or mid == lo or mid == hi:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return mid


def golden_min(f: Callable[[float], float], lo: float, hi: float,
               x_tol: float = 1e-10) -> tuple[float, float]:
    """Golden-section minimum of a unimodal f on [lo, hi].

    Returns (abscissa, value).  The bracket is assumed valid; callers
    build it from a grid scan.
    """
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > x_tol * max(1.0, abs(a) + abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def golden_max(f: Callable[[float], float], lo: float, hi: float,
               x_tol: float = 1e-10) -> tuple[float, float]:
    x, v = golden_min(lambda s: -f(s), lo, hi, x_tol)
    return x, -v


def grid_extrema(f: Callable[[float], float], lo: float, hi: float,
                 n: int = 2048, x_tol: float = 1e-10,
                 ) -> tuple[list[tuple[float, float]], list[tuple[float, float]]]:
    """Interior local minima and maxima of f on the open interval (lo, hi).

    Scans a midpoint grid of n cells and golden-refines every discrete
    extremum.  Endpoint behaviour is the caller's business: only strictly
    interior grid extrema are reported.
    """
    h = (hi - lo) / n
    xs = [lo + h * (i + 0.5) for i in range(n)]
    vs = [f(x) for x in xs]
    mins: list[tuple[float, float]] = []
    maxs: list[tuple[float, float]] = []
    for i in range(1, n - 1):
        if vs[i] <= vs[i - 1] and vs[i] <= vs[i + 1] and (vs[i] < vs[i - 1] or vs[i] < vs[i + 1]):
            mins.append(golden_min(f, xs[i - 1], xs[i + 1], x_tol))
        if vs[i] >= vs[i - 1] and vs[i] >= vs[i + 1] and (vs[i] > vs[i - 1] or vs[i] > vs[i + 1]):
            x, v = golden_min(lambda s: -f(s), xs[i - 1], xs[i + 1], x_tol)
            maxs.append((x, -v))
    # grid-value ties around a flat extremum make two adjacent cells
    # refine to the same point; anything closer than one cell is one
    # extremum as far as this scan can resolve
    return (_merge_extrema(mins, h, keep_smaller=True),
            _merge_extrema(maxs, h, keep_smaller=False))


def _merge_extrema(points: list[tuple[float, float]], spacing: float,
                   keep_smaller: bool) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for x, v in sorted(points):
        if out and x - out[-1][0] <= spacing:
            if (v < out[-1][1]) == keep_smaller:
                out[-1] = (x, v)
        else:
            out.append((x, v))
    return out


def grid_min(f: Callable[[float], float], lo: float, hi: float,
             n: int = 2048, x_tol: float = 1e-10) -> tuple[float, float]:
    """Global interior minimum of f on (lo, hi) by grid scan + refinement."""
    h = (hi - lo) / n
    xs = [lo + h * (i + 0.5) for i in range(n)]
    vs = [f(x) for x in xs]
    i = min(range(n), key=lambda k: vs[k])
    a = xs[i - 1] if i > 0 else lo
    b = xs[i + 1] if i < n - 1 else hi
    return golden_min(f, a, b, x_tol)


def real_cubic_roots(a3: float, a2: float, a1: float, a0: float) -> list[float]:
    """All real roots of a3 x^3 + a2 x^2 + a1 x + a0, a3 != 0.

    Trigonometric branch for three real roots, Cardano otherwise; the
    usual depressed-cubic substitution x = t - a2/(3 a3).
    """
    if a3 == 0.0:
        raise ValueError("real_cubic_roots: leading coefficient is zero")
    b = a2 / a3
    c = a1 / a3
    d = a0 / a3
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    eps = 1e-14 * max(1.0, abs(q) ** 2, abs(p) ** 3)
    if disc > eps:
        # one real root; stable Cardano avoiding cancellation
        sq = math.sqrt(disc)
        u = -q / 2.0 + sq if q <= 0.0 else -q / 2.0 - sq
        u = math.copysign(abs(u) ** (1.0 / 3.0), u)
        t = u + (-p / 3.0 / u if u != 0.0 else 0.0)
        return [t + shift]
    if disc < -eps:
        # three distinct real roots
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        arg = max(-1.0, min(1.0, arg))
        theta = math.acos(arg) / 3.0
        return sorted(m * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift
                      for k in range(3))
    # borderline: repeated roots (triple when p ~ 0)
    if abs(p) < 1e-300:
        return [shift]
    t_simple = 3.0 * q / p
    t_double = -3.0 * q / (2.0 * p)
    return sorted({t_simple + shift, t_double + shift})


def newton_polish(f: Callable[[float], float], fp: Callable[[float], float],
                  x0: float, lo: float, hi: float, steps: int = 8) -> float:
    """A few guarded Newton steps on f, clamped to [lo, hi]."""
    x = x0
    for _ in range(steps):
        fx = f(x)
        d = fp(x)
        if d == 0.0:
            break
        step = fx / d
        x_new = x - step
        if not (lo <= x_new <= hi):
            break
        if x_new == x:
            break
        x = x_new
    return x
