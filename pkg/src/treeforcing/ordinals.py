"""Cantor-normal-form ordinal arithmetic below epsilon_0.

Ordinals play two roles here: they label tree nodes, and they index tree
levels.  A node label g determines its level through the decomposition
g = w*h + k with k finite; h is the *height* of g.

A value is a finite sum of terms w^e * c with strictly decreasing ordinal
exponents e and positive integer coefficients c.  The empty sum is 0.
Coefficients are plain Python ints, so they never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


class OrdinalParseError(ValueError):
    """The string does not match the ordinal grammar."""


@dataclass(frozen=True)
class Ordinal:
    """An ordinal below epsilon_0 in Cantor normal form.

    ``terms`` lists (exponent, coefficient) pairs with exponents strictly
    decreasing and every coefficient >= 1; ``()`` denotes 0.
    """

    terms: tuple[tuple["Ordinal", int], ...] = ()

    def __post_init__(self) -> None:
        prev = None
        for exp, coeff in self.terms:
            if not isinstance(coeff, int) or coeff < 1:
                raise ValueError(f"coefficient must be a positive int, got {coeff!r}")
            if prev is not None and not exp < prev:
                raise ValueError("exponents must be strictly decreasing")
            prev = exp

    # -- order ---------------------------------------------------------

    def __lt__(self, other: "Ordinal") -> bool:
        for (ea, ca), (eb, cb) in zip(self.terms, other.terms):
            if ea != eb:
                return ea < eb
            if ca != cb:
                return ca < cb
        return len(self.terms) < len(other.terms)

    def __le__(self, other: "Ordinal") -> bool:
        return self == other or self < other

    def __gt__(self, other: "Ordinal") -> bool:
        return other < self

    def __ge__(self, other: "Ordinal") -> bool:
        return other <= self

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "Ordinal") -> "Ordinal":
        """Ordinal sum; left terms below the leading exponent of ``other`` are absorbed."""
        if not other.terms:
            return self
        lead = other.terms[0][0]
        kept = tuple(t for t in self.terms if t[0] > lead)
        merged = next((c for e, c in self.terms if e == lead), 0)
        if merged:
            head = ((lead, merged + other.terms[0][1]),)
            return Ordinal(kept + head + other.terms[1:])
        return Ordinal(kept + other.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == ZERO)

    def as_int(self) -> int:
        if not self.terms:
            return 0
        if not self.is_finite:
            raise ValueError(f"{self} is not finite")
        return self.terms[0][1]

    @staticmethod
    def from_int(n: int) -> "Ordinal":
        if n < 0:
            raise ValueError("ordinals are non-negative")
        return Ordinal(((ZERO, n),)) if n else ZERO

    # -- printing ------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return "+".join(_term_str(e, c) for e, c in self.terms)

    def __repr__(self) -> str:
        return f"Ordinal({str(self)!r})"


ZERO = Ordinal()
ONE = Ordinal.from_int(1)
OMEGA = Ordinal(((ONE, 1),))


def _term_str(exp: Ordinal, coeff: int) -> str:
    if exp == ZERO:
        return str(coeff)
    if exp == ONE:
        return "w" if coeff == 1 else f"w*{coeff}"
    if exp == OMEGA:
        base = "w^w"
    elif exp.is_finite:
        base = f"w^{exp.as_int()}"
    else:
        base = f"w^({exp})"
    return base if coeff == 1 else f"{base}*{coeff}"


def omega_mul(a: Ordinal) -> Ordinal:
    """w * a.  Each exponent e becomes 1 + e (left distributivity over the sum)."""
    return Ordinal(tuple((ONE + e, c) for e, c in a.terms))


def is_limit(a: Ordinal) -> bool:
    """Nonzero with no finite part."""
    return bool(a.terms) and a.terms[-1][0] != ZERO


def is_omega_fixed(a: Ordinal) -> bool:
    """True iff w * a == a (so heights >= a survive the w-scaling of labels)."""
    return omega_mul(a) == a


@lru_cache(maxsize=None)
def height_split(g: Ordinal) -> tuple[Ordinal, int]:
    """Decompose g = w*h + k with k < w; returns (h, k).

    h is the height of the node labelled g and k its offset within the level.
    """
    offset = 0
    infinite = g.terms
    if infinite and infinite[-1][0] == ZERO:
        offset = infinite[-1][1]
        infinite = infinite[:-1]
    height = Ordinal(tuple((_exp_pred(e), c) for e, c in infinite))
    return height, offset


def _exp_pred(e: Ordinal) -> Ordinal:
    # unique x with 1 + x == e; e >= 1 here
    if e.is_finite:
        return Ordinal.from_int(e.as_int() - 1)
    return e


def node_at(height: Ordinal, offset: int) -> Ordinal:
    """Inverse of height_split: the node label w*height + offset."""
    if offset < 0:
        raise ValueError("offset must be a natural number")
    return omega_mul(height) + Ordinal.from_int(offset)


def node_height(g: Ordinal) -> Ordinal:
    return height_split(g)[0]


def left_subtract(a: Ordinal, b: Ordinal) -> Ordinal:
    """The unique c with a + c == b; requires a <= b."""
    if b < a:
        raise ValueError(f"cannot left-subtract {a} from {b}")
    at, bt = a.terms, b.terms
    for i, (ea, ca) in enumerate(at):
        eb, cb = bt[i]
        if ea < eb:
            return Ordinal(bt[i:])
        if ea > eb or ca > cb:  # unreachable when a <= b
            raise ValueError(f"cannot left-subtract {a} from {b}")
        if ca < cb:
            return Ordinal(((eb, cb - ca),) + bt[i + 1 :])
    return Ordinal(bt[len(at) :])


# -- parsing -----------------------------------------------------------
#
# ordinal := "0" | sum
# sum     := term ("+" term)*          exponents strictly decreasing
# term    := nat | "w" | "w*" nat | "w^" atom | "w^" atom "*" nat
# atom    := nat | "w" | "(" ordinal ")"
# nat     := [1-9][0-9]*


def parse_ordinal(text: str) -> Ordinal:
    parser = _Parser(text)
    value = parser.parse_ordinal()
    if parser.pos != len(parser.text):
        raise OrdinalParseError(f"trailing input at position {parser.pos}: {text!r}")
    return value


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, why: str) -> OrdinalParseError:
        return OrdinalParseError(f"{why} at position {self.pos}: {self.text!r}")

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse_ordinal(self) -> Ordinal:
        if self.peek() == "0":
            self.pos += 1
            return ZERO
        terms = [self.parse_term()]
        while self.peek() == "+":
            self.pos += 1
            terms.append(self.parse_term())
        prev = None
        for exp, _ in terms:
            if prev is not None and not exp < prev:
                raise self.fail("exponents must be strictly decreasing")
            prev = exp
        return Ordinal(tuple(terms))

    def parse_term(self) -> tuple[Ordinal, int]:
        if self.peek() == "w":
            self.pos += 1
            exp = ONE
            if self.peek() == "^":
                self.pos += 1
                exp = self.parse_atom()
            coeff = 1
            if self.peek() == "*":
                self.pos += 1
                coeff = self.parse_nat()
            return exp, coeff
        return ZERO, self.parse_nat()

    def parse_atom(self) -> Ordinal:
        ch = self.peek()
        if ch == "w":
            self.pos += 1
            return OMEGA
        if ch == "(":
            self.pos += 1
            inner = self.parse_ordinal()
            if self.peek() != ")":
                raise self.fail("expected ')'")
            self.pos += 1
            return inner
        return Ordinal.from_int(self.parse_nat())

    def parse_nat(self) -> int:
        start = self.pos
        if not self.peek().isdigit() or self.peek() == "0":
            raise self.fail("expected a natural number")
        while self.peek().isdigit():
            self.pos += 1
        return int(self.text[start : self.pos])
