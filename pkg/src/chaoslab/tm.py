"""Single-tape deterministic Turing machines: parsing, stepping, traces.

Machine description format (one declaration per line, ``#`` starts a comment)::

    states: q0 q1 qa qr
    input:  0 1
    tape:   0 1 _
    blank:  _
    start:  q0
    accept: qa
    reject: qr
    delta:  q0 , 0 -> q1 , 1 , R

A (state, symbol) pair with no ``delta`` rule sends the machine to the reject
state without writing or moving.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from .encoding import Alphabet, Encoding, GodelMap, rationalize
from .errors import EncodingError, ParseError, UsageError

DEFAULT_BUDGET = 10**6

Rule = Tuple[str, str, str]  # (next state, written symbol, move)


@dataclass(frozen=True)
class TMDescription:
    states: tuple
    input_alphabet: Alphabet
    tape_alphabet: Alphabet
    delta: Dict[Tuple[str, str], Rule]
    start: str
    accept: str
    reject: str

    def __post_init__(self):
        for role in ("start", "accept", "reject"):
            if getattr(self, role) not in self.states:
                raise ParseError(f"{role} state {getattr(self, role)!r} is not declared")
        blank = self.tape_alphabet.blank
        if blank is None:
            raise ParseError("tape alphabet has no blank symbol")
        if blank in self.input_alphabet:
            raise ParseError(f"blank {blank!r} must not be in the input alphabet")
        missing = [s for s in self.input_alphabet if s not in self.tape_alphabet]
        if missing:
            raise ParseError(f"input symbols {missing} are not in the tape alphabet")

    @property
    def blank(self):
        return self.tape_alphabet.blank

    def is_halting(self, state) -> bool:
        return state == self.accept or state == self.reject

    def godel_map(self) -> GodelMap:
        return GodelMap(self.tape_alphabet)

    def __hash__(self):
        return hash((self.states, self.start, self.accept, self.reject,
                     tuple(sorted(self.delta.items()))))


@dataclass(frozen=True)
class TMConfiguration:
    state: str
    tape: tuple
    head: int
    steps_taken: int = 0

    def key(self):
        """Identity of the configuration, ignoring the step counter."""
        return (self.state, self.tape, self.head)

    def read(self, blank):
        return self.tape[self.head] if self.head < len(self.tape) else blank


def _normalize(tape, head, blank) -> tuple:
    # keep cells 0..max(rightmost non-blank, head)
    end = len(tape)
    while end > head + 1 and tape[end - 1] == blank:
        end -= 1
    tape = tuple(tape[:end])
    if len(tape) < head + 1:
        tape = tape + (blank,) * (head + 1 - len(tape))
    return tape


class Outcome(enum.Enum):
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    CYCLE = "NonHaltingCycle"


@dataclass(frozen=True)
class RunResult:
    outcome: Outcome
    final: TMConfiguration
    steps: int
    cycle: Optional[Tuple[int, int]] = None  # (first visit, repeat) step indices


# -- parsing ---------------------------------------------------------------

_SINGLE_KEYS = ("start", "accept", "reject", "blank")
_LIST_KEYS = ("states", "input", "tape")


def parse_machine(text: str, source: Optional[str] = None) -> TMDescription:
    decls: Dict[str, Tuple[int, list]] = {}
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", lineno, source)
        if key == "delta":
            rules.append((lineno, rest))
        elif key in _SINGLE_KEYS or key in _LIST_KEYS:
            if key in decls:
                raise ParseError(f"duplicate declaration of {key!r}", lineno, source)
            decls[key] = (lineno, rest.split())
        else:
            raise ParseError(f"unknown key {key!r}", lineno, source)

    last_line = len(text.splitlines())
    for key in _LIST_KEYS + _SINGLE_KEYS:
        if key not in decls:
            raise ParseError(f"missing {key!r} declaration", last_line, source)
    for key in _SINGLE_KEYS:
        lineno, values = decls[key]
        if len(values) != 1:
            raise ParseError(f"{key!r} takes exactly one value", lineno, source)

    def single(key):
        return decls[key][1][0]

    def check_distinct(key):
        lineno, values = decls[key]
        if not values:
            raise ParseError(f"{key!r} is empty", lineno, source)
        if len(set(values)) != len(values):
            raise ParseError(f"{key!r} lists a symbol twice", lineno, source)
        return tuple(values)

    states = check_distinct("states")
    input_syms = check_distinct("input")
    tape_syms = check_distinct("tape")
    blank = single("blank")
    if blank in input_syms:
        raise ParseError(f"blank {blank!r} listed in the input alphabet", decls["input"][0], source)
    if blank not in tape_syms:
        raise ParseError(f"blank {blank!r} missing from the tape alphabet", decls["tape"][0], source)
    for s in input_syms:
        if s not in tape_syms:
            raise ParseError(f"input symbol {s!r} missing from the tape alphabet", decls["input"][0], source)
    for role in ("start", "accept", "reject"):
        if single(role) not in states:
            raise ParseError(f"{role} state {single(role)!r} is not declared", decls[role][0], source)
    accept, reject = single("accept"), single("reject")

    delta: Dict[Tuple[str, str], Rule] = {}
    for lineno, body in rules:
        lhs, arrow, rhs = body.partition("->")
        left = [t.strip() for t in lhs.split(",")]
        right = [t.strip() for t in rhs.split(",")]
        if not arrow or len(left) != 2 or len(right) != 3 or not all(left + right):
            raise ParseError("rule must read 'state , symbol -> state , symbol , L|R'", lineno, source)
        (q, a), (q2, b, move) = left, right
        for state in (q, q2):
            if state not in states:
                raise ParseError(f"undeclared state {state!r}", lineno, source)
        for sym in (a, b):
            if sym not in tape_syms:
                raise ParseError(f"symbol {sym!r} is not in the tape alphabet", lineno, source)
        if move not in ("L", "R"):
            raise ParseError(f"move must be L or R, got {move!r}", lineno, source)
        if q in (accept, reject):
            raise ParseError(f"rule leaves halting state {q!r}", lineno, source)
        if (q, a) in delta:
            raise ParseError(f"duplicate rule for ({q}, {a})", lineno, source)
        delta[(q, a)] = (q2, b, move)

    return TMDescription(
        states=states,
        input_alphabet=Alphabet(input_syms),
        tape_alphabet=Alphabet(tape_syms, blank),
        delta=delta,
        start=single("start"),
        accept=accept,
        reject=reject,
    )


def format_machine(m: TMDescription) -> str:
    """Canonical description text; ``parse_machine(format_machine(m)) == m``."""
    lines = [
        "states: " + " ".join(m.states),
        "input: " + " ".join(m.input_alphabet.symbols),
        "tape: " + " ".join(m.tape_alphabet.symbols),
        f"blank: {m.blank}",
        f"start: {m.start}",
        f"accept: {m.accept}",
        f"reject: {m.reject}",
    ]
    for (q, a), (q2, b, move) in m.delta.items():
        lines.append(f"delta: {q} , {a} -> {q2} , {b} , {move}")
    return "\n".join(lines) + "\n"


def machine_encoding(m: TMDescription) -> Encoding:
    """Rationalize the canonical description text as base-256 UTF-8 bytes.

    Any fixed serialization would do; this one is only a stable number per machine.
    """
    data = format_machine(m).encode("utf-8")
    return Encoding(Fraction(int.from_bytes(data, "big"), 256 ** len(data)), len(data), 256)


# -- execution -------------------------------------------------------------

def initial_configuration(m: TMDescription, input: Sequence, check_input: bool = True) -> TMConfiguration:
    alphabet = m.input_alphabet if check_input else m.tape_alphabet
    for s in input:
        if s not in alphabet:
            raise EncodingError(f"symbol {s!r} is not in the machine's alphabet")
    return TMConfiguration(m.start, _normalize(tuple(input), 0, m.blank), 0, 0)


def step(m: TMDescription, c: TMConfiguration) -> TMConfiguration:
    if m.is_halting(c.state):
        raise UsageError(f"configuration is halted in state {c.state!r}")
    symbol = c.read(m.blank)
    rule = m.delta.get((c.state, symbol))
    if rule is None:
        return TMConfiguration(m.reject, c.tape, c.head, c.steps_taken + 1)
    state, write, move = rule
    tape = list(c.tape)
    tape[c.head] = write
    if move == "R":
        head = c.head + 1
    else:
        head = max(c.head - 1, 0)  # left edge: the head stays put
    return TMConfiguration(state, _normalize(tape, head, m.blank), head, c.steps_taken + 1)


def run_from(m: TMDescription, c: TMConfiguration, budget: int = DEFAULT_BUDGET,
             detect_cycles: bool = False) -> RunResult:
    if budget < 0:
        raise UsageError("budget must be non-negative")
    seen = {c.key(): 0} if detect_cycles else None
    n = 0
    while not m.is_halting(c.state):
        if n >= budget:
            return RunResult(Outcome.BUDGET_EXHAUSTED, c, n)
        c = step(m, c)
        n += 1
        if seen is not None:
            first = seen.setdefault(c.key(), n)
            if first != n:
                return RunResult(Outcome.CYCLE, c, n, (first, n))
    outcome = Outcome.ACCEPTED if c.state == m.accept else Outcome.REJECTED
    return RunResult(outcome, c, n)


def run(m: TMDescription, input: Sequence, budget: int = DEFAULT_BUDGET,
        detect_cycles: bool = False) -> RunResult:
    """Run ``m`` on ``input`` until it halts or ``budget`` steps are spent.

    With ``detect_cycles`` a repeated (state, tape, head) triple stops the run
    early with :attr:`Outcome.CYCLE`: such a machine provably never halts.
    """
    return run_from(m, initial_configuration(m, input), budget, detect_cycles)


def tape_trace(m: TMDescription, input: Sequence, budget: int = DEFAULT_BUDGET) -> list:
    if budget < 0:
        raise UsageError("budget must be non-negative")
    c = initial_configuration(m, input)
    trace = [c]
    while not m.is_halting(c.state) and len(trace) <= budget:
        c = step(m, c)
        trace.append(c)
    return trace


def rationalize_tapes(trace: Sequence[TMConfiguration], g: GodelMap, blank) -> list:
    """Rationalize every tape of ``trace`` over one common window length."""
    width = max(len(c.tape) for c in trace)
    return [
        rationalize(c.tape + (blank,) * (width - len(c.tape)), g).value for c in trace
    ]


def rationalized_trace(m: TMDescription, input: Sequence, budget: int = DEFAULT_BUDGET,
                       g: Optional[GodelMap] = None) -> list:
    """Tape contents of the run as rationals in [0, 1].

    Each tape is read from cell 0 up to the widest window seen anywhere in the
    trace, right-padded with blanks, so all values share one base-b grid.
    Head and state are not encoded.
    """
    g = g or m.godel_map()
    if set(g.alphabet.symbols) != set(m.tape_alphabet.symbols):
        raise EncodingError("Gödel map alphabet must equal the tape alphabet")
    return rationalize_tapes(tape_trace(m, input, budget), g, m.blank)


def builtin_machines() -> list:
    from importlib import resources

    return sorted(p.name[:-3] for p in resources.files("chaoslab.machines").iterdir()
                  if p.name.endswith(".tm"))


def load_machine(ref: str, base_dir=None) -> TMDescription:
    """Load ``builtin:<name>`` from the bundled library, or a description file path."""
    from importlib import resources
    from pathlib import Path

    if ref.startswith("builtin:"):
        name = ref[len("builtin:"):]
        if name not in builtin_machines():
            raise ParseError(f"no built-in machine {name!r}; have {builtin_machines()}")
        text = resources.files("chaoslab.machines").joinpath(name + ".tm").read_text("utf-8")
        return parse_machine(text, source=ref)
    path = Path(ref)
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read machine file: {exc.strerror}", source=str(path)) from None
    return parse_machine(text, source=str(path))
