"""Growth kinetics: rate laws, their peaks, and break-even intervals.

A growth law maps a substrate concentration s >= 0 to a specific growth
rate mu(s).  The models here satisfy mu(0) = 0, mu > 0 on (0, inf), and
are either strictly increasing or unimodal (one interior peak).  The
break-even interval of a dilution rate D collects the concentrations at
which growth outpaces dilution:

    {s > 0 : mu(s) > D} = (lower, upper),   upper possibly infinite.

Monod and Haldane laws carry closed forms for everything; a custom
unimodal law falls back on guarded scans and bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from ._numerics import bisect_root

__all__ = [
    "BreakEvenInterval",
    "Peak",
    "GrowthModel",
    "Monod",
    "Haldane",
    "CustomUnimodal",
]

# residual tolerance for bisection solves of mu(s) = D, relative to D
_BREAK_EVEN_RTOL = 1e-12
_BISECT_MAX_ITER = 200
_SCAN_POINTS = 4096


@dataclass(frozen=True)
class Peak:
    """Location and height of a rate law's maximum.

    abscissa is math.inf for strictly increasing laws, in which case
    height is the supremum that the law approaches but never attains.
    """
    abscissa: float
    height: float

    @property
    def is_interior(self) -> bool:
        return math.isfinite(self.abscissa)


@dataclass(frozen=True)
class BreakEvenInterval:
    """Open interval (lower, upper) where growth exceeds a dilution rate.

    upper == math.inf is meaningful (increasing laws never fall back
    below the dilution rate); callers branch on finiteness explicitly
    via has_finite_upper rather than comparing against a magic number.
    """
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (self.lower >= 0.0):
            raise ValueError("break-even lower endpoint must be >= 0")
        if not (self.upper > self.lower):
            raise ValueError("break-even interval must have upper > lower")

    @property
    def has_finite_upper(self) -> bool:
        return math.isfinite(self.upper)

    def contains(self, s: float) -> bool:
        return self.lower < s < self.upper


class GrowthModel:
    """Base interface for growth laws."""

    def rate(self, s: float) -> float:
        """Growth rate mu(s) at substrate concentration s >= 0."""
        self._check_domain(s)
        return self._rate_raw(s)

    def rate_prime(self, s: float) -> float:
        """Derivative mu'(s) at s >= 0."""
        self._check_domain(s)
        return self._rate_prime_raw(s)

    def peak(self) -> Peak:
        raise NotImplementedError

    def break_even(self, dilution: float) -> Optional[BreakEvenInterval]:
        """Interval where mu > dilution, or None when growth never wins.

        The generic path brackets mu(s) = dilution on each monotone
        branch and refines by bisection to a residual of 1e-12 * dilution.
        """
        if dilution <= 0.0:
            raise ValueError("dilution rate must be positive")
        return self._break_even_generic(dilution)

    # fast unchecked evaluations; simulate builds its inner loops on these
    def _rate_raw(self, s):
        raise NotImplementedError

    def _rate_prime_raw(self, s):
        raise NotImplementedError

    @staticmethod
    def _check_domain(s: float) -> None:
        if s < 0.0:
            raise ValueError(f"substrate concentration must be >= 0, got {s}")

    def _break_even_generic(self, dilution: float) -> Optional[BreakEvenInterval]:
        f_tol = _BREAK_EVEN_RTOL * dilution
        g = lambda s: self._rate_raw(s) - dilution
        pk = self.peak()
        if pk.is_interior:
            if pk.height <= dilution:
                return None
            lower = bisect_root(g, 0.0, pk.abscissa, f_tol, _BISECT_MAX_ITER)
            # decreasing branch: expand until the rate drops below dilution
            hi = pk.abscissa * 2.0
            for _ in range(_SCAN_POINTS):
                if self._rate_raw(hi) < dilution:
                    break
                hi *= 2.0
            else:
                return BreakEvenInterval(lower, math.inf)
            upper = bisect_root(g, pk.abscissa, hi, f_tol, _BISECT_MAX_ITER)
            return BreakEvenInterval(lower, upper)
        # strictly increasing: either mu stays below dilution or crosses once
        hi = 1.0
        for _ in range(_SCAN_POINTS):
            if self._rate_raw(hi) > dilution:
                break
            hi *= 2.0
            if hi > 1e120:
                return None
        else:
            return None
        lower = bisect_root(g, 0.0, hi, f_tol, _BISECT_MAX_ITER)
        return BreakEvenInterval(lower, math.inf)


@dataclass(frozen=True)
class Monod(GrowthModel):
    """Monotone saturating law mu(s) = mu_max * s / (K_s + s).

    Parameters
    ----------
    mu_max : float
        Supremum growth rate, approached as s -> inf.
    K_s : float
        Half-saturation constant.
    """
    mu_max: float
    K_s: float

    def __post_init__(self) -> None:
        if self.mu_max <= 0.0 or self.K_s <= 0.0:
            raise ValueError("Monod parameters must be strictly positive")

    def _rate_raw(self, s):
        return self.mu_max * s / (self.K_s + s)

    def _rate_prime_raw(self, s):
        return self.mu_max * self.K_s / (self.K_s + s) ** 2

    def peak(self) -> Peak:
        return Peak(math.inf, self.mu_max)

    def break_even(self, dilution: float) -> Optional[BreakEvenInterval]:
        if dilution <= 0.0:
            raise ValueError("dilution rate must be positive")
        if dilution >= self.mu_max:
            return None
        return BreakEvenInterval(self.K_s * dilution / (self.mu_max - dilution),
                                 math.inf)


@dataclass(frozen=True)
class Haldane(GrowthModel):
    """Substrate-inhibited law mu(s) = mu_bar * s / (K + s + s^2/K_I).

    Increasing up to s = sqrt(K * K_I), decreasing beyond; the peak rate
    is mu_bar / (1 + 2 sqrt(K / K_I)).
    """
    mu_bar: float
    K: float
    K_I: float

    def __post_init__(self) -> None:
        if self.mu_bar <= 0.0 or self.K <= 0.0 or self.K_I <= 0.0:
            raise ValueError("Haldane parameters must be strictly positive")

    def _rate_raw(self, s):
        return self.mu_bar * s / (self.K + s + s * s / self.K_I)

    def _rate_prime_raw(self, s):
        den = self.K + s + s * s / self.K_I
        return self.mu_bar * (self.K - s * s / self.K_I) / (den * den)

    def peak(self) -> Peak:
        s_hat = math.sqrt(self.K * self.K_I)
        return Peak(s_hat, self._rate_raw(s_hat))

    def break_even(self, dilution: float) -> Optional[BreakEvenInterval]:
        """Closed form: the two roots of the quadratic mu(s) = dilution.

        Non-empty exactly when mu_bar / dilution > 1 + 2 sqrt(K / K_I).
        """
        if dilution <= 0.0:
            raise ValueError("dilution rate must be positive")
        ratio = self.mu_bar / dilution
        if ratio <= 1.0 + 2.0 * math.sqrt(self.K / self.K_I):
            return None
        a = self.K_I * (ratio - 1.0)
        root = math.sqrt(a * a - 4.0 * self.K * self.K_I)
        return BreakEvenInterval(0.5 * (a - root), 0.5 * (a + root))


@dataclass(frozen=True)
class CustomUnimodal(GrowthModel):
    """User-supplied rate law with a declared peak abscissa.

    The callables must describe a law with mu(0) = 0 that is positive on
    (0, inf) and increasing below the declared peak, decreasing above it
    (peak_abscissa = math.inf declares a strictly increasing law).  The
    shape is spot-checked on a sample grid at construction.
    """
    rate_fn: Callable[[float], float]
    rate_prime_fn: Callable[[float], float]
    peak_abscissa: float
    sample_scale: float = field(default=1.0)

    def __post_init__(self) -> None:
        if self.peak_abscissa <= 0.0:
            raise ValueError("peak abscissa must be positive (math.inf allowed)")
        if self.sample_scale <= 0.0:
            raise ValueError("sample scale must be positive")
        self._shape_check()

    def _shape_check(self) -> None:
        if abs(self.rate_fn(0.0)) > 1e-12:
            raise ValueError("rate law must vanish at s = 0")
        span = self.peak_abscissa if math.isfinite(self.peak_abscissa) \
            else 10.0 * self.sample_scale
        pts = [span * (k + 1) / 16.0 for k in range(16)]
        prev = 0.0
        for s in pts:
            v = self.rate_fn(s)
            if v <= 0.0:
                raise ValueError(f"rate law must be positive at s = {s}")
            if math.isfinite(self.peak_abscissa) and v < prev - 1e-12:
                raise ValueError("rate law must increase up to the declared peak")
            prev = v
        if math.isfinite(self.peak_abscissa):
            right = [self.peak_abscissa * (1.0 + (k + 1) / 8.0) for k in range(8)]
            prev = self.rate_fn(self.peak_abscissa)
            for s in right:
                v = self.rate_fn(s)
                if v > prev + 1e-12:
                    raise ValueError("rate law must decrease beyond the declared peak")
                prev = v

    def _rate_raw(self, s):
        return self.rate_fn(s)

    def _rate_prime_raw(self, s):
        return self.rate_prime_fn(s)

    def peak(self) -> Peak:
        if math.isfinite(self.peak_abscissa):
            return Peak(self.peak_abscissa, self.rate_fn(self.peak_abscissa))
        # supremum probe for increasing laws; exact value is not needed
        return Peak(math.inf, self.rate_fn(1e12 * self.sample_scale))
