"""Exact orbits of rational self-maps and finite-sample verdicts on them.

Every verdict here is about the sampled prefix of an orbit and nothing more.
``chaotic_per_criterion`` means "bounded in the given interval and no exact
repeat in the sample"; it is a label for that conjunction, not a proof of
sensitive dependence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

from .errors import ConfigError, DenominatorOverflow, MapError, UsageError

DEFAULT_MAX_BITS = 2**20
DEFAULT_EPSILONS = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000))


@dataclass(frozen=True)
class RationalMap:
    fn: Callable[[Fraction], Fraction] = field(compare=False)
    name: str = "f"

    def __call__(self, x: Fraction) -> Fraction:
        return Fraction(self.fn(x))


@dataclass(frozen=True)
class Orbit:
    points: tuple
    map_name: str = "f"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(Fraction(p) for p in self.points))
        if not self.points:
            raise UsageError("an orbit has at least one point")

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


@dataclass(frozen=True)
class OrbitVerdict:
    sample_length: int
    period: Optional[Tuple[int, int]]
    sample_bounds: Tuple[Fraction, Fraction]
    interval: Tuple[Fraction, Fraction]
    within_interval: bool
    cauchy: tuple  # ((epsilon, N or None), ...)
    chaotic_per_criterion: bool


def _check_size(x: Fraction, max_bits: int, index: int):
    if max(x.numerator.bit_length(), x.denominator.bit_length()) > max_bits:
        raise DenominatorOverflow(f"value exceeds {max_bits} bits", index)


def orbit(f: RationalMap, x0, n: int, max_bits: int = DEFAULT_MAX_BITS) -> Orbit:
    """``x0, f(x0), ..., f^n(x0)`` computed exactly."""
    if n < 0:
        raise UsageError("orbit length must be non-negative")
    x = Fraction(x0)
    points = [x]
    for k in range(1, n + 1):
        try:
            x = f(x)
        except (ArithmeticError, ValueError, TypeError) as exc:
            raise MapError(f"{f.name}: {exc}", k) from exc
        _check_size(x, max_bits, k)
        points.append(x)
    return Orbit(tuple(points), f.name)


def _is_periodic(points, pre, period) -> bool:
    return all(points[i + period] == points[i] for i in range(pre, len(points) - period))


def detect_period(o: Orbit) -> Optional[Tuple[int, int]]:
    """Smallest ``(preperiod, period)`` witnessed by an exact repeat in the sample."""
    points = o.points
    first_seen = {}
    for j, x in enumerate(points):
        i = first_seen.setdefault(x, j)
        if i != j:
            if _is_periodic(points, i, j - i):
                return (i, j - i)
            break
    else:
        return None
    # Only reachable for sequences that are not orbits of a single map.
    n = len(points)
    for pre in range(n):
        for period in range(1, n - pre):
            if _is_periodic(points, pre, period):
                return (pre, period)
    return None


def bounds_check(o: Orbit, interval) -> Tuple[Fraction, Fraction, bool]:
    lo, hi = (Fraction(v) for v in interval)
    if lo > hi:
        raise UsageError(f"empty interval [{lo}, {hi}]")
    smallest, largest = min(o.points), max(o.points)
    return smallest, largest, lo <= smallest and largest <= hi


def cauchy_probe(o: Orbit, epsilon, min_tail: int = 2) -> Optional[int]:
    """Smallest ``N`` with ``|x_m - x_n| < epsilon`` for all ``N < m, n <= last``.

    The tail after ``N`` must hold at least ``min_tail`` points, otherwise the
    condition would hold vacuously for every sequence.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise UsageError("epsilon must be positive")
    points = o.points
    last = len(points) - 1
    # Scan tails from the shortest; the spread of a tail only grows as N decreases.
    hi = lo = None
    best = None
    for n in range(last, 0, -1):
        x = points[n]
        hi = x if hi is None else max(hi, x)
        lo = x if lo is None else min(lo, x)
        if hi - lo >= epsilon:
            break
        if last - n + 1 >= min_tail:
            best = n - 1
    return best


def chaos_verdict(o: Orbit, interval=(0, 1), epsilons: Sequence = DEFAULT_EPSILONS) -> OrbitVerdict:
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    smallest, largest, within = bounds_check(o, (lo, hi))
    period = detect_period(o)
    evidence = tuple((Fraction(e), cauchy_probe(o, e)) for e in epsilons)
    return OrbitVerdict(
        sample_length=len(o),
        period=period,
        sample_bounds=(smallest, largest),
        interval=(lo, hi),
        within_interval=within,
        cauchy=evidence,
        chaotic_per_criterion=within and period is None,
    )


def sensitivity_probe(f: RationalMap, x0, delta, n: int, max_bits: int = DEFAULT_MAX_BITS) -> list:
    """``|f^k(x0) - f^k(x0 + delta)|`` for ``k = 0..n``."""
    delta = Fraction(delta)
    if delta <= 0:
        raise UsageError("delta must be positive")
    a = orbit(f, x0, n, max_bits)
    b = orbit(f, Fraction(x0) + delta, n, max_bits)
    return [abs(p - q) for p, q in zip(a.points, b.points)]


# -- a small library of maps, addressable by name from the CLI -------------

def identity_map() -> RationalMap:
    return RationalMap(lambda x: x, "identity")


def constant_map(c) -> RationalMap:
    c = Fraction(c)
    return RationalMap(lambda x: c, f"constant({c})")


def reflection_map() -> RationalMap:
    return RationalMap(lambda x: 1 - x, "reflect")


def shift_map(step=1) -> RationalMap:
    step = Fraction(step)
    return RationalMap(lambda x: x + step, f"shift({step})")


def doubling_map() -> RationalMap:
    return RationalMap(lambda x: (2 * x) % 1, "doubling")


def newton_sqrt2_map() -> RationalMap:
    return RationalMap(lambda x: (x + 2 / x) / 2, "newton_sqrt2")


def logistic_map(r=Fraction(7, 2)) -> RationalMap:
    r = Fraction(r)
    return RationalMap(lambda x: r * x * (1 - x), f"logistic({r})")


def tent_map(mu=2) -> RationalMap:
    mu = Fraction(mu)
    return RationalMap(lambda x: mu * min(x, 1 - x), f"tent({mu})")


MAPS = {
    "identity": identity_map,
    "constant": constant_map,
    "reflect": reflection_map,
    "shift": shift_map,
    "doubling": doubling_map,
    "newton_sqrt2": newton_sqrt2_map,
    "logistic": logistic_map,
    "tent": tent_map,
}


def map_from_spec(spec: str) -> RationalMap:
    """Build a map from ``name`` or ``name:param`` (e.g. ``logistic:7/2``)."""
    name, _, param = spec.partition(":")
    if name not in MAPS:
        raise ConfigError(f"unknown map {name!r}; choose from {sorted(MAPS)}")
    try:
        return MAPS[name](Fraction(param)) if param else MAPS[name]()
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad parameter for map {name!r}: {exc}") from exc
