"""Binary decision trees over rationals, self-similar covers, box counting.

Routing follows the tree rule: at a node holding the pair ``(d_f, d_d)`` the
input ``x`` becomes ``y = d_f(x)`` and ``d = d_d(y)``.  ``d`` is 0 (reject and
halt), 1 (accept and halt), ``l`` or ``r`` (pass ``y`` to that child; a missing
child rejects).

Infinite trees are stood in for by :class:`LazyDecisionTree`, which generates
nodes from a rule down to a fixed number of levels.
"""

from __future__ import annotations

import bisect
import enum
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .dynamics import RationalMap
from .errors import DeciderError, InvariantError, UsageError

DEFAULT_PROBE_BUDGET = 2**12


class Decision(enum.Enum):
    REJECT = "0"
    ACCEPT = "1"
    LEFT = "l"
    RIGHT = "r"


class HaltReason(enum.Enum):
    DECISION_0 = "Decision0"
    DECISION_1 = "Decision1"
    MISSING_LEFT = "MissingLeftChild"
    MISSING_RIGHT = "MissingRightChild"


@dataclass(frozen=True)
class DeciderPair:
    d_f: RationalMap = field(compare=False)
    d_d: Callable[[Fraction], Decision] = field(compare=False)
    name: str = "pair"


@dataclass(frozen=True)
class TreeNode:
    pair: DeciderPair
    left: Optional[str] = None
    right: Optional[str] = None


class DecisionTree:
    """A finite tree stored as ``{node id: TreeNode}``."""

    def __init__(self, nodes: Dict[str, TreeNode], root: str, pool: Optional[Iterable[DeciderPair]] = None):
        self.nodes = dict(nodes)
        self.root = root
        self.pool = frozenset(pool) if pool is not None else frozenset(n.pair for n in self.nodes.values())
        self._validate()

    def _validate(self):
        if self.root not in self.nodes:
            raise InvariantError(f"root {self.root!r} is not a node")
        seen = set()
        stack = [self.root]
        while stack:
            nid = stack.pop()
            if nid in seen:
                raise InvariantError(f"node {nid!r} is reachable twice; not a tree")
            seen.add(nid)
            node = self.nodes[nid]
            if node.pair not in self.pool:
                raise InvariantError(f"node {nid!r} uses a pair outside the decider pool")
            for child in (node.left, node.right):
                if child is not None:
                    if child not in self.nodes:
                        raise InvariantError(f"node {nid!r} points at missing node {child!r}")
                    stack.append(child)
        self._height = self._measure(self.root)

    def _measure(self, nid) -> int:
        node = self.nodes[nid]
        kids = [c for c in (node.left, node.right) if c is not None]
        return 1 + max(map(self._measure, kids)) if kids else 0

    @property
    def height(self) -> int:
        return self._height

    def pair(self, nid) -> DeciderPair:
        return self.nodes[nid].pair

    def child(self, nid, side: Decision) -> Optional[str]:
        node = self.nodes[nid]
        return node.left if side is Decision.LEFT else node.right


class LazyDecisionTree:
    """Tree whose node ``p`` (a path string over ``l``/``r``) holds ``rule(p)``.

    Nodes exist down to ``levels`` levels; the root is ``""``.
    """

    root = ""

    def __init__(self, rule: Callable[[str], DeciderPair], levels: int, pool: Optional[Iterable[DeciderPair]] = None):
        if levels < 1:
            raise UsageError("a tree has at least one level")
        self.rule = rule
        self.levels = levels
        self.pool = frozenset(pool) if pool is not None else None

    @property
    def height(self) -> int:
        return self.levels - 1

    def pair(self, nid) -> DeciderPair:
        pair = self.rule(nid)
        if self.pool is not None and pair not in self.pool:
            raise InvariantError(f"node {nid!r} uses a pair outside the decider pool")
        return pair

    def child(self, nid, side: Decision) -> Optional[str]:
        return nid + side.value if len(nid) + 1 < self.levels else None


@dataclass(frozen=True)
class RoutingResult:
    verdict: str  # "Accepted" | "Rejected"
    path: tuple  # ((node id, transformed value, decision), ...)
    halted_reason: HaltReason

    @property
    def accepted(self) -> bool:
        return self.verdict == "Accepted"


def route(t, x) -> RoutingResult:
    x = Fraction(x)
    nid = t.root
    path = []
    while True:
        pair = t.pair(nid)
        try:
            y = pair.d_f(x)
            d = Decision(pair.d_d(y))
        except Exception as exc:
            raise DeciderError(f"{pair.name}: {exc}", nid) from exc
        path.append((nid, y, d))
        if d is Decision.REJECT:
            return RoutingResult("Rejected", tuple(path), HaltReason.DECISION_0)
        if d is Decision.ACCEPT:
            return RoutingResult("Accepted", tuple(path), HaltReason.DECISION_1)
        nxt = t.child(nid, d)
        if nxt is None:
            reason = HaltReason.MISSING_LEFT if d is Decision.LEFT else HaltReason.MISSING_RIGHT
            return RoutingResult("Rejected", tuple(path), reason)
        nid, x = nxt, y


@dataclass(frozen=True)
class Cell:
    key: tuple  # ((node id, decision value), ...)
    indices: tuple
    label: str  # "A" or "complement"


def _route_all(t, points, workers):
    if workers <= 1:
        return [route(t, p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: route(t, p), points))


def partition(t, grid, workers: int = 1) -> List[Cell]:
    """Group grid points by routing path.  Cells come out ordered by first index."""
    groups: Dict[tuple, list] = {}
    labels = {}
    for i, result in enumerate(_route_all(t, grid.points, workers)):
        key = tuple((nid, d.value) for nid, _, d in result.path)
        groups.setdefault(key, []).append(i)
        labels[key] = "A" if result.accepted else "complement"
    return [Cell(k, tuple(v), labels[k]) for k, v in groups.items()]


# -- iterated function systems ---------------------------------------------

@dataclass(frozen=True)
class AffineMap:
    """``x -> scale * x + offset``."""

    scale: Fraction
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "offset", Fraction(self.offset))

    def __call__(self, x):
        return self.scale * x + self.offset

    def image(self, lo, hi) -> Tuple[Fraction, Fraction]:
        a, b = self(lo), self(hi)
        return (a, b) if a <= b else (b, a)

    def inverse(self) -> "AffineMap":
        if self.scale == 0:
            raise InvariantError("constant map has no inverse")
        return AffineMap(1 / self.scale, -self.offset / self.scale)


@dataclass(frozen=True)
class FunctionSystem:
    maps: tuple
    label: str = "ifs"

    def __post_init__(self):
        maps = tuple(self.maps)
        object.__setattr__(self, "maps", maps)
        if not maps:
            raise InvariantError("a function system needs at least one map")
        if len(set(maps)) != len(maps):
            raise InvariantError("maps must be pairwise distinct")
        for f in maps:
            if not 0 < abs(f.scale) < 1:
                raise InvariantError(f"map {f} is not a contraction")
            lo, hi = f.image(0, 1)
            if lo < 0 or hi > 1:
                raise InvariantError(f"map {f} sends [0, 1] outside itself")

    @classmethod
    def cantor(cls) -> "FunctionSystem":
        third = Fraction(1, 3)
        return cls((AffineMap(third, 0), AffineMap(third, 2 * third)), "cantor")


def merge_intervals(intervals: Iterable[Tuple[Fraction, Fraction]]) -> tuple:
    """Sort and fuse overlapping or touching closed intervals."""
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return tuple(out)


@dataclass(frozen=True)
class IntervalCover:
    depth: int
    intervals: tuple

    def __post_init__(self):
        ivs = tuple((Fraction(a), Fraction(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for (a, b), (c, _) in zip(ivs, ivs[1:]):
            if c < b:
                raise InvariantError("cover intervals overlap or are unsorted")
        if any(a > b or a < 0 or b > 1 for a, b in ivs):
            raise InvariantError("cover intervals must be non-empty and inside [0, 1]")
        object.__setattr__(self, "_starts", [a for a, _ in ivs])

    def __len__(self):
        return len(self.intervals)

    def __contains__(self, x) -> bool:
        x = Fraction(x)
        j = bisect.bisect_right(self._starts, x) - 1
        return j >= 0 and x <= self.intervals[j][1]

    @property
    def total_length(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def shifted(self, offset) -> "IntervalCover":
        """Translate by ``offset`` and clip to [0, 1]."""
        offset = Fraction(offset)
        moved = ((max(a + offset, Fraction(0)), min(b + offset, Fraction(1))) for a, b in self.intervals)
        return IntervalCover(self.depth, merge_intervals((a, b) for a, b in moved if a <= b))

    def rows(self) -> list:
        return [{"depth": self.depth, "lo_num": a.numerator, "lo_den": a.denominator,
                 "hi_num": b.numerator, "hi_den": b.denominator} for a, b in self.intervals]

    @classmethod
    def from_rows(cls, rows) -> "IntervalCover":
        rows = list(rows)
        depth = int(rows[0]["depth"]) if rows else 0
        return cls(depth, tuple(
            (Fraction(int(r["lo_num"]), int(r["lo_den"])), Fraction(int(r["hi_num"]), int(r["hi_den"])))
            for r in rows))


CSV_COLUMNS = ["depth", "lo_num", "lo_den", "hi_num", "hi_den"]


def ifs_cover(fs: FunctionSystem, depth: int) -> IntervalCover:
    """Image of [0, 1] after ``depth`` rounds of ``X -> union of f_s(X)``."""
    if depth < 0:
        raise UsageError("depth must be non-negative")
    current = ((Fraction(0), Fraction(1)),)
    for _ in range(depth):
        images = []
        for f in fs.maps:
            for lo, hi in current:
                a, b = f.image(lo, hi)
                if a < 0 or b > 1:
                    raise InvariantError(f"map {f} left [0, 1]")
                images.append((a, b))
        current = merge_intervals(images)
    return IntervalCover(depth, current)


# -- box counting -----------------------------------------------------------

def _boxes_meeting(lo: Fraction, hi: Fraction, scale: int) -> Tuple[int, int]:
    """Index range of the width-1/scale boxes met by [lo, hi].

    A proper interval meets a box when the overlap has positive length; a
    single point meets every closed box containing it.
    """
    a, b = lo * scale, hi * scale
    if lo < hi:
        first = math.floor(a)
        last = math.ceil(b) - 1
    else:
        first = math.ceil(a) - 1 if a.denominator == 1 else math.floor(a)
        last = math.floor(a)
    return max(first, 0), min(last, scale - 1)


def box_counts(cover: IntervalCover, scales: Sequence[int], base: int = 3) -> list:
    """``N(s)``: number of boxes of width ``base**-s`` meeting the cover, counted exactly."""
    counts = []
    for s in scales:
        size = base**s
        total = 0
        upto = -1  # highest box index already counted
        for lo, hi in cover.intervals:
            first, last = _boxes_meeting(lo, hi, size)
            first = max(first, upto + 1)
            if last >= first:
                total += last - first + 1
                upto = last
        counts.append(total)
    return counts


@dataclass(frozen=True)
class DimensionEstimate:
    dimension: float
    scales: tuple
    counts: tuple
    base: int


def box_count_dimension(cover: IntervalCover, scales: Sequence[int], base: int = 3) -> DimensionEstimate:
    """Least-squares slope of ``log N(s)`` against ``s * log(base)``.

    This fit is the one place floating point is used.
    """
    scales = tuple(scales)
    if len(set(scales)) < 2:
        raise UsageError("box counting needs at least two distinct scales")
    if base < 2:
        raise UsageError("box base must be at least 2")
    counts = box_counts(cover, scales, base)
    if min(counts) < 1:
        raise UsageError("cover is empty at some scale")
    xs = [s * math.log(base) for s in scales]
    ys = [math.log(n) for n in counts]
    slope, _ = statistics.linear_regression(xs, ys)
    return DimensionEstimate(slope, scales, tuple(counts), base)


# -- membership oracles and dense rejection ---------------------------------

def cantor_contains(x) -> bool:
    """Exact membership of a rational in the middle-thirds Cantor set.

    Follows the ternary expansion digit by digit; the orbit of ``x`` under
    the zoom maps has a bounded denominator, so it either hits a middle third
    or revisits a value.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        return False
    seen = set()
    while x not in seen:
        seen.add(x)
        if x <= Fraction(1, 3):
            x = 3 * x
        elif x >= Fraction(2, 3):
            x = 3 * x - 2
        else:
            return False
    return True


def dense_rejection_probe(accept: Callable[[Fraction], int], x, epsilons: Sequence,
                          budget: int = DEFAULT_PROBE_BUDGET) -> list:
    """Look for a rejected point within each ``epsilon`` of an accepted ``x``.

    The neighbourhood ``(x - eps, x + eps)`` clipped to [0, 1] is scanned by
    dyadic refinement: midpoint first, then quarter points, and so on, at most
    ``budget`` probes.  Returns ``[(eps, witness or None), ...]``.
    """
    x = Fraction(x)
    if not accept(x):
        raise UsageError(f"{x} is not accepted")
    out = []
    for eps in epsilons:
        eps = Fraction(eps)
        if eps <= 0:
            raise UsageError("epsilon must be positive")
        lo, hi = max(x - eps, Fraction(0)), min(x + eps, Fraction(1))
        out.append((eps, _refine_search(accept, lo, hi, budget)))
    return out


def _refine_search(accept, lo, hi, budget) -> Optional[Fraction]:
    width = hi - lo
    probes = 0
    level = 1
    while probes < budget:
        denom = 2**level
        for k in range(1, denom, 2):
            p = lo + width * Fraction(k, denom)
            if not accept(p):
                return p
            probes += 1
            if probes >= budget:
                return None
        level += 1
    return None


# -- trees built from function systems and machines --------------------------

def tree_from_system(fs: FunctionSystem, levels: int) -> LazyDecisionTree:
    """A lazy tree that accepts exactly the depth-``levels`` cover of a two-map system.

    Each node first undoes the map its parent branched on (the root does
    nothing), then sends the value left or right according to which image
    of [0, 1] contains it.  Nodes on the last level accept instead of
    branching.  Only six distinct decider pairs are used.
    """
    if len(fs.maps) != 2:
        raise UsageError("tree_from_system needs exactly two maps")
    if levels == 0:
        root = accept_all_tree().pair("root")
        return LazyDecisionTree(lambda path: root, 1, [root])
    images = [f.image(0, 1) for f in fs.maps]

    def decide(final):
        def d_d(y):
            for (lo, hi), side in zip(images, (Decision.LEFT, Decision.RIGHT)):
                if lo <= y <= hi:
                    return Decision.ACCEPT if final else side
            return Decision.REJECT
        return d_d

    undo = {"": RationalMap(lambda v: v, "identity")}
    for side, f in zip("lr", fs.maps):
        inv = f.inverse()
        undo[side] = RationalMap(inv, f"undo_{side}")
    pool = {}
    for key, fmap in undo.items():
        for final in (False, True):
            name = f"{fmap.name}/{'accept' if final else 'branch'}"
            pool[(key, final)] = DeciderPair(fmap, decide(final), name)

    def rule(path: str) -> DeciderPair:
        return pool[(path[-1:] if path else "", len(path) + 1 == levels)]

    return LazyDecisionTree(rule, max(levels, 1), pool.values())


def accept_all_tree() -> DecisionTree:
    pair = DeciderPair(RationalMap(lambda v: v, "identity"), lambda y: Decision.ACCEPT, "accept_all")
    return DecisionTree({"root": TreeNode(pair)}, "root")


def machine_decider(machine, digits: int, budget: int = 10_000,
                    on_accept: Decision = Decision.ACCEPT,
                    on_reject: Decision = Decision.REJECT) -> Callable[[Fraction], Decision]:
    """Turn a Turing machine into a ``d_d``.

    The value ``y`` in [0, 1) is written as its first ``digits`` radix digits
    over the machine's input alphabet (digit i is input symbol i).  Acceptance
    maps to ``on_accept``; rejection, running out of ``budget`` and values
    outside [0, 1) map to ``on_reject``.
    """
    from . import tm
    from .encoding import radix_digits

    symbols = machine.input_alphabet.symbols

    def d_d(y):
        y = Fraction(y)
        if not 0 <= y < 1:
            return on_reject
        word = [symbols[d] for d in radix_digits(y, len(symbols), digits)]
        result = tm.run(machine, word, budget)
        return on_accept if result.outcome is tm.Outcome.ACCEPTED else on_reject

    return d_d
