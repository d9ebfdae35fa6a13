"""Learning as fixed-point iteration over rationalized models.

A :class:`Functional` maps the encoding of one model to the encoding of the
next, ``c[n+1] = L(c[n])``, and knows how to decode any encoding in its range
into a :class:`Classifier`.  Accept sets are observed on a finite
:class:`ProbeGrid`, and the set-limit verdict is taken over a finite window.

Window semantics for :func:`limit_sets`: the *tail* of a window ``[start, end)``
is its second half, ``[start + (end - start) // 2, end)``.  ``limsup`` is the
union of the accept sets over the tail (accepted at least once), ``liminf`` the
intersection (accepted every time).  The sequence is reported converged when
the two agree, i.e. when the accept set is constant over the tail.
"""

from __future__ import annotations

import bisect
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

from .encoding import BINARY, Encoding, GodelMap, derationalize, rationalize
from .errors import (ChaosLabError, ClassifierError, ConfigError, EncodingError,
                     FunctionalError, UsageError)

Bitmap = Tuple[int, ...]

DEFAULT_GRID_DEPTH = 10
DEFAULT_RESOLUTION = 10


@dataclass(frozen=True)
class Classifier:
    fn: Callable[[Fraction], int] = field(compare=False)
    label: str = ""

    def __call__(self, x: Fraction) -> int:
        return 1 if self.fn(x) else 0


@dataclass(frozen=True)
class ProbeGrid:
    points: tuple
    depth: Optional[int] = None

    def __post_init__(self):
        points = tuple(Fraction(p) for p in self.points)
        object.__setattr__(self, "points", points)
        if any(b <= a for a, b in zip(points, points[1:])):
            raise UsageError("probe grid points must be strictly increasing")
        if points and (points[0] < 0 or points[-1] > 1):
            raise UsageError("probe grid points must lie in [0, 1]")

    @classmethod
    def dyadic(cls, depth: int = DEFAULT_GRID_DEPTH) -> "ProbeGrid":
        """The ``2**depth + 1`` points ``k / 2**depth``."""
        size = 2**depth
        return cls(tuple(Fraction(k, size) for k in range(size + 1)), depth)

    def __len__(self):
        return len(self.points)

    def mask(self, predicate) -> Bitmap:
        return tuple(1 if predicate(p) else 0 for p in self.points)


@dataclass(frozen=True)
class Functional:
    apply: Callable[[Encoding], Encoding] = field(compare=False)
    name: str
    decode_model: Callable[[Encoding], Classifier] = field(compare=False)
    seed: Optional[Encoding] = None
    language: str = ""

    def __call__(self, e: Encoding) -> Encoding:
        return self.apply(e)


@dataclass(frozen=True)
class AcceptSetTrace:
    grid: ProbeGrid
    memberships: tuple

    def __post_init__(self):
        object.__setattr__(self, "memberships", tuple(tuple(b) for b in self.memberships))
        for bitmap in self.memberships:
            if len(bitmap) != len(self.grid):
                raise UsageError("bitmap length differs from grid size")


@dataclass(frozen=True)
class ConvergenceReport:
    window: Tuple[int, int]
    tail_start: int
    limsup: Bitmap
    liminf: Bitmap
    converged: bool
    first_stable_index: Optional[int]
    churn_series: tuple


@dataclass(frozen=True)
class DensityReport:
    delta_size: int
    intersection_size: int
    epsilon: Fraction
    covered: int
    grid_size: int

    @property
    def density_fraction(self) -> Fraction:
        return Fraction(self.covered, self.grid_size) if self.grid_size else Fraction(0)


# -- core operations -------------------------------------------------------

def iterate_learner(L: Functional, seed: Encoding, n: int) -> list:
    """``[seed, L(seed), L(L(seed)), ...]`` with ``n + 1`` entries."""
    if n < 0:
        raise UsageError("iteration count must be non-negative")
    out = [seed]
    c = seed
    for k in range(1, n + 1):
        try:
            c = L.apply(c)
        except ChaosLabError as exc:
            raise FunctionalError(f"{L.name}: {exc}", k) from exc
        if not isinstance(c, Encoding):
            raise FunctionalError(f"{L.name} returned {type(c).__name__}, not an Encoding", k)
        out.append(c)
    return out


def _classify(c: Classifier, points, offset):
    out = []
    for i, x in enumerate(points):
        try:
            out.append(c(x))
        except Exception as exc:
            raise ClassifierError(f"{c.label or 'classifier'}: {exc}", offset + i) from exc
    return out


def accept_set(c: Classifier, grid: ProbeGrid, workers: int = 1) -> Bitmap:
    points = grid.points
    if workers <= 1 or len(points) < 2 * workers:
        return tuple(_classify(c, points, 0))
    chunk = -(-len(points) // workers)
    starts = range(0, len(points), chunk)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda s: _classify(c, points[s:s + chunk], s), starts)
        return tuple(bit for part in parts for bit in part)


def trace_accept_sets(L: Functional, seed: Encoding, n: int, grid: ProbeGrid,
                      workers: int = 1) -> Tuple[list, AcceptSetTrace]:
    encodings = iterate_learner(L, seed, n)
    bitmaps = [accept_set(L.decode_model(e), grid, workers) for e in encodings]
    return encodings, AcceptSetTrace(grid, tuple(bitmaps))


def limit_sets(trace: AcceptSetTrace, window: Optional[Tuple[int, int]] = None) -> ConvergenceReport:
    total = len(trace.memberships)
    start, end = window if window is not None else (0, total)
    if not 0 <= start < end <= total:
        raise UsageError(f"window ({start}, {end}) is empty or outside 0..{total}")
    rows = trace.memberships
    tail_start = start + (end - start) // 2
    tail = rows[tail_start:end]
    limsup = tuple(int(any(col)) for col in zip(*tail))
    liminf = tuple(int(all(col)) for col in zip(*tail))
    churn = tuple(
        sum(a != b for a, b in zip(rows[k], rows[k + 1])) for k in range(start, end - 1)
    )
    converged = limsup == liminf
    first_stable = None
    if converged:
        first_stable = end - 1
        while first_stable > start and rows[first_stable - 1] == rows[end - 1]:
            first_stable -= 1
    return ConvergenceReport((start, end), tail_start, limsup, liminf, converged,
                             first_stable, churn)


def symmetric_difference_density(a1: Sequence[int], a2: Sequence[int], grid: ProbeGrid,
                                 epsilon) -> DensityReport:
    """Size of ``A1 xor A2`` and ``A1 and A2`` on the grid, plus how many grid
    points have a member of the symmetric difference within ``epsilon`` (closed)."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise UsageError("epsilon must be positive")
    if not len(a1) == len(a2) == len(grid):
        raise UsageError("bitmaps and grid must have the same length")
    delta = [p for p, x, y in zip(grid.points, a1, a2) if bool(x) != bool(y)]
    both = sum(1 for x, y in zip(a1, a2) if x and y)
    covered = 0
    if delta:
        for p in grid.points:
            j = bisect.bisect_left(delta, p)
            near = [delta[k] for k in (j - 1, j) if 0 <= k < len(delta)]
            if any(abs(q - p) <= epsilon for q in near):
                covered += 1
    return DensityReport(len(delta), both, epsilon, covered, len(grid))


def intervals_of(bitmap: Sequence[int], grid: ProbeGrid) -> list:
    """Maximal runs of set bits as ``(first point, last point)`` pairs."""
    runs = []
    run_start = None
    for i, bit in enumerate(bitmap):
        if bit and run_start is None:
            run_start = i
        elif not bit and run_start is not None:
            runs.append((grid.points[run_start], grid.points[i - 1]))
            run_start = None
    if run_start is not None:
        runs.append((grid.points[run_start], grid.points[len(bitmap) - 1]))
    return runs


# -- model language shared by the built-in functionals ----------------------
#
# An interval model [lo, hi] at resolution k stores lo * 2**k and hi * 2**k as
# (k + 1)-bit binary numerals, lo first: a string of 2 * (k + 1) bits.
# The decoded classifier accepts lo <= x <= hi (nothing when lo > hi).

def _bits(n: int, width: int) -> str:
    return format(n, f"0{width}b")


def _dyadic_numerator(x: Fraction, k: int, what: str) -> int:
    scaled = Fraction(x) * 2**k
    if scaled.denominator != 1 or not 0 <= scaled <= 2**k:
        raise ConfigError(f"{what} {x} is not a multiple of 1/{2**k} in [0, 1]")
    return int(scaled)


def interval_model_bits(lo, hi, resolution: int = DEFAULT_RESOLUTION) -> str:
    w = resolution + 1
    return (_bits(_dyadic_numerator(lo, resolution, "lower bound"), w)
            + _bits(_dyadic_numerator(hi, resolution, "upper bound"), w))


def read_interval_model(bits: Sequence[str], resolution: int = DEFAULT_RESOLUTION) -> Tuple[Fraction, Fraction]:
    w = resolution + 1
    if len(bits) < 2 * w:
        raise EncodingError(f"model needs {2 * w} digits, got {len(bits)}")
    text = "".join("1" if s == "1" else "0" for s in bits[:2 * w])
    scale = 2**resolution
    return Fraction(int(text[:w], 2), scale), Fraction(int(text[w:], 2), scale)


def interval_classifier(lo, hi) -> Classifier:
    lo, hi = Fraction(lo), Fraction(hi)
    return Classifier(lambda x: lo <= x <= hi, f"[{lo}, {hi}]")


def _interval_decoder(g: GodelMap, resolution: int):
    def decode(e: Encoding) -> Classifier:
        return interval_classifier(*read_interval_model(derationalize(e, g), resolution))
    return decode


def encode_interval_model(lo, hi, resolution: int = DEFAULT_RESOLUTION) -> Encoding:
    return rationalize(interval_model_bits(lo, hi, resolution), GodelMap(BINARY))


# -- built-in functionals ---------------------------------------------------

def _fraction(value, what) -> Fraction:
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{what}: cannot read {value!r} as a rational") from exc


def constant_functional(lo=0, hi=Fraction(1, 2), resolution: int = DEFAULT_RESOLUTION) -> Functional:
    """``L(e) = e*`` for the fixed model ``[lo, hi]``; every iterate after the seed is ``e*``."""
    target = encode_interval_model(lo, hi, resolution)
    return Functional(
        apply=lambda e: target,
        name="constant",
        decode_model=_interval_decoder(GodelMap(BINARY), resolution),
        seed=encode_interval_model(0, 0, resolution),
        language=f"interval model, resolution {resolution}",
    )


def oscillator_functional(first=(0, Fraction(1, 2)), second=(Fraction(1, 4), Fraction(3, 4)),
                          resolution: int = DEFAULT_RESOLUTION) -> Functional:
    """Swaps between two interval models; anything else is sent to the first."""
    a = encode_interval_model(*first, resolution)
    b = encode_interval_model(*second, resolution)
    return Functional(
        apply=lambda e: b if e == a else a,
        name="oscillator",
        decode_model=_interval_decoder(GodelMap(BINARY), resolution),
        seed=a,
        language=f"interval model, resolution {resolution}",
    )


def encode_training_set(training_set, resolution: int = DEFAULT_RESOLUTION) -> Encoding:
    """Seed ``c0`` for the stump learner: an empty model followed by the training pairs.

    Each pair ``(x, y)`` is written as the (k + 1)-bit numerator of ``x`` and one label bit.
    """
    w = resolution + 1
    body = ["0" * (2 * w)]
    for x, y in training_set:
        if y not in (0, 1):
            raise ConfigError(f"label {y!r} must be 0 or 1")
        body.append(_bits(_dyadic_numerator(_fraction(x, "training point"), resolution, "training point"), w))
        body.append(str(y))
    return rationalize("".join(body), GodelMap(BINARY))


def read_training_set(bits: Sequence[str], resolution: int = DEFAULT_RESOLUTION) -> list:
    w = resolution + 1
    body = "".join(bits[2 * w:])
    if len(body) % (w + 1):
        raise EncodingError("training section is not a whole number of pairs")
    scale = 2**resolution
    return [
        (Fraction(int(body[i:i + w], 2), scale), int(body[i + w]))
        for i in range(0, len(body), w + 1)
    ]


def stump_update(threshold: Fraction, polarity: str, training_set, step: Fraction) -> Fraction:
    """One update of a decision stump.

    ``left`` stumps accept ``x <= t``, ``right`` stumps accept ``x >= t``.  The
    first misclassified pair moves the threshold just far enough to classify
    it correctly; with no mistakes the threshold is returned unchanged.
    """
    for x, y in training_set:
        if polarity == "left":
            predicted = int(x <= threshold)
            if predicted != y:
                return x if y == 1 else max(x - step, Fraction(0))
        else:
            predicted = int(x >= threshold)
            if predicted != y:
                return x if y == 1 else min(x + step, Fraction(1))
    return threshold


def stump_learner_functional(training_set=None, polarity: str = "left",
                             resolution: int = DEFAULT_RESOLUTION) -> Functional:
    """A learner whose state string holds both the current stump and its training data."""
    if polarity not in ("left", "right"):
        raise ConfigError(f"polarity must be 'left' or 'right', got {polarity!r}")
    g = GodelMap(BINARY)
    w = resolution + 1
    step = Fraction(1, 2**resolution)

    def apply(e: Encoding) -> Encoding:
        bits = derationalize(e, g)
        lo, hi = read_interval_model(bits, resolution)
        data = read_training_set(bits, resolution)
        t = hi if polarity == "left" else lo
        t = stump_update(t, polarity, data, step)
        model = interval_model_bits(0, t, resolution) if polarity == "left" \
            else interval_model_bits(t, 1, resolution)
        return rationalize(model + "".join(bits[2 * w:]), g)

    def decode(e: Encoding) -> Classifier:
        lo, hi = read_interval_model(derationalize(e, g), resolution)
        if polarity == "left":
            return interval_classifier(0, hi)
        return interval_classifier(lo, 1)

    seed = encode_training_set(training_set, resolution) if training_set is not None else None
    return Functional(apply, "stump_learner", decode, seed,
                      f"{polarity} stump + training pairs, resolution {resolution}")


def tm_functional(machine, budget: int = 10_000, resolution: int = DEFAULT_RESOLUTION) -> Functional:
    """Use a Turing machine as the functional: the model string is its tape.

    The encoding is derationalized over the tape alphabet, the machine runs
    from head 0 (halting or not within ``budget``), and the first
    ``2 * (resolution + 1)`` cells of the final tape are the next model.
    Decoding reads ``1`` as a one bit and every other symbol as zero.
    """
    from . import tm

    if isinstance(machine, str):
        machine = tm.parse_machine(machine)
    g = machine.godel_map()
    width = 2 * (resolution + 1)
    if "0" not in machine.tape_alphabet or "1" not in machine.tape_alphabet:
        raise ConfigError("tm_functional needs a machine whose tape alphabet contains '0' and '1'")

    def apply(e: Encoding) -> Encoding:
        cells = derationalize(e, g)
        start = tm.initial_configuration(machine, cells, check_input=False)
        final = tm.run_from(machine, start, budget).final
        tape = final.tape[:width] + (machine.blank,) * max(0, width - len(final.tape))
        return rationalize(tape, g)

    seed = rationalize("0" * width, g)
    return Functional(apply, "tm_functional", _interval_decoder(g, resolution), seed,
                      f"tape of {len(machine.states)}-state machine, resolution {resolution}")


def builtin_functional(name: str, params: Optional[dict] = None) -> Functional:
    """Build a named reference functional from plain (JSON-style) parameters."""
    params = dict(params or {})
    resolution = int(params.pop("resolution", DEFAULT_RESOLUTION))
    try:
        if name == "constant":
            lo = _fraction(params.pop("lo", 0), "lo")
            hi = _fraction(params.pop("hi", Fraction(1, 2)), "hi")
            f = constant_functional(lo, hi, resolution)
        elif name == "oscillator":
            first = tuple(_fraction(v, "first") for v in params.pop("first", (0, "1/2")))
            second = tuple(_fraction(v, "second") for v in params.pop("second", ("1/4", "3/4")))
            f = oscillator_functional(first, second, resolution)
        elif name == "stump_learner":
            data = [(_fraction(x, "training point"), int(y)) for x, y in params.pop("training_set")]
            f = stump_learner_functional(data, params.pop("polarity", "left"), resolution)
        elif name == "tm_functional":
            machine = params.pop("machine")
            f = tm_functional(machine, int(params.pop("budget", 10_000)), resolution)
        else:
            raise ConfigError(f"unknown functional {name!r}")
    except KeyError as exc:
        raise ConfigError(f"functional {name!r} needs parameter {exc.args[0]!r}") from None
    if params:
        raise ConfigError(f"unused parameters for {name!r}: {sorted(params)}")
    return f
