"""Gödel numbering and rationalization of symbol strings.

A string ``w = w[0] w[1] ... w[n-1]`` over an alphabet of size ``b`` is read
as a base-``b`` numeral with ``w[0]`` the most significant digit.  Its Gödel
number is that integer; its rationalization is the integer divided by ``b**n``,
i.e. the radix fraction ``0.w[0]w[1]...w[n-1]`` in base ``b``.

Rationals are :class:`fractions.Fraction` throughout (always in lowest terms,
equality by value).  Because reduction loses leading/trailing zero digits, an
:class:`Encoding` keeps the string length and base next to the value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .errors import EncodingError

Symbol = Hashable


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct symbols, optionally with a designated blank."""

    symbols: tuple
    blank: Optional[Symbol] = None

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise EncodingError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise EncodingError(f"alphabet symbols are not distinct: {symbols!r}")
        if self.blank is not None and self.blank not in symbols:
            raise EncodingError(f"blank {self.blank!r} is not in the alphabet")

    @classmethod
    def of(cls, text: Iterable[Symbol], blank=None) -> "Alphabet":
        """``Alphabet.of("01_", blank="_")`` -> symbols ('0', '1', '_')."""
        return cls(tuple(text), blank)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, symbol):
        return symbol in self.symbols

    def __iter__(self):
        return iter(self.symbols)


DECIMAL = Alphabet.of("0123456789")
BINARY = Alphabet.of("01")


@dataclass(frozen=True)
class GodelMap:
    """Bijection from an alphabet onto the digits ``0 .. b-1``.

    The default digit of a symbol is its position in the alphabet.
    """

    alphabet: Alphabet
    digit_of: Mapping[Symbol, int] = field(default=None, compare=False)

    def __post_init__(self):
        digits = self.digit_of
        if digits is None:
            digits = {s: i for i, s in enumerate(self.alphabet.symbols)}
        else:
            digits = dict(digits)
            b = len(self.alphabet)
            if set(digits) != set(self.alphabet.symbols):
                raise EncodingError("digit map must cover exactly the alphabet")
            if sorted(digits.values()) != list(range(b)):
                raise EncodingError(f"digit map is not onto 0..{b - 1}")
        object.__setattr__(self, "digit_of", digits)
        object.__setattr__(self, "_symbol_of", {d: s for s, d in digits.items()})

    @property
    def base(self) -> int:
        return len(self.alphabet)

    def digit(self, symbol) -> int:
        try:
            return self.digit_of[symbol]
        except (KeyError, TypeError):
            raise EncodingError(f"symbol {symbol!r} is not in the alphabet") from None

    def symbol(self, digit: int):
        return self._symbol_of[digit]

    def __eq__(self, other):
        if not isinstance(other, GodelMap):
            return NotImplemented
        return self.alphabet == other.alphabet and self.digit_of == other.digit_of

    def __hash__(self):
        return hash((self.alphabet, tuple(sorted(self.digit_of.values()))))


@dataclass(frozen=True)
class Encoding:
    """A rationalized string: ``value`` in [0, 1] plus the ``length`` and ``base`` it came from."""

    value: Fraction
    length: int
    base: int

    def __post_init__(self):
        value = Fraction(self.value)
        object.__setattr__(self, "value", value)
        if self.length < 1 or self.base < 1:
            raise EncodingError("encoding length and base must be positive")
        scaled = value * self.base ** self.length
        if scaled.denominator != 1 or not 0 <= scaled < self.base ** self.length:
            raise EncodingError(
                f"{value} is not a {self.length}-digit base-{self.base} radix fraction"
            )

    @property
    def godel_number(self) -> int:
        return int(self.value * self.base ** self.length)


def godelize(w: Sequence[Symbol], g: GodelMap) -> int:
    """Gödel number of ``w``: sum of ``g(w_k) * b**k`` with the last symbol as ``k = 0``."""
    if len(w) < 1:
        raise EncodingError("cannot encode the empty string")
    b = g.base
    n = 0
    for symbol in w:
        n = n * b + g.digit(symbol)
    return n


def rationalize(w: Sequence[Symbol], g: GodelMap) -> Encoding:
    n = godelize(w, g)
    return Encoding(Fraction(n, g.base ** len(w)), len(w), g.base)


def derationalize(e: Encoding, g: GodelMap) -> tuple:
    """Inverse of :func:`rationalize`; returns the symbols as a tuple."""
    if e.base != g.base:
        raise EncodingError(f"encoding base {e.base} does not match alphabet size {g.base}")
    scaled = e.value * e.base ** e.length
    if scaled.denominator != 1 or not 0 <= scaled < e.base ** e.length:
        raise EncodingError(f"{e.value} has no {e.length}-digit base-{e.base} expansion")
    n = int(scaled)
    digits = []
    for _ in range(e.length):
        n, d = divmod(n, e.base)
        digits.append(g.symbol(d))
    return tuple(reversed(digits))


def radix_digits(x: Fraction, base: int, length: int) -> list:
    """First ``length`` base-``base`` digits of ``x`` in [0, 1), truncated."""
    scaled = x * base ** length
    n = scaled.numerator // scaled.denominator
    out = []
    for _ in range(length):
        n, d = divmod(n, base)
        out.append(d)
    return out[::-1]
