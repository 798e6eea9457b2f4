"""Qualitative sign algebra.

A qualitative value is either a *sign set* (a nonempty subset of {+, 0, -}
describing the possible directions of a change) or a directional *marker*
(up / down) that may appear only in derivative position.  Sign sets support
qualitative addition and multiplication; both are the lifted set extensions
of the base tables on {+, 0, -}, and markers multiply change values through
direction-sensitive rules (an up marker transmits increases only, a down
marker decreases only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

_POS = 1
_ZERO = 2
_NEG = 4
_ALL = _POS | _ZERO | _NEG
_UP = 8
_DOWN = 16

_VALID_CODES = frozenset(range(1, 8)) | {_UP, _DOWN}

_BIT_OF_SIGN = {1: _POS, 0: _ZERO, -1: _NEG}
_SIGN_OF_BIT = {_POS: 1, _ZERO: 0, _NEG: -1}

# Base-sign sums, lifted to masks. (+) + (-) can land anywhere.
_ADD3 = {
    (1, 1): _POS,
    (1, 0): _POS,
    (0, 1): _POS,
    (1, -1): _ALL,
    (-1, 1): _ALL,
    (0, 0): _ZERO,
    (0, -1): _NEG,
    (-1, 0): _NEG,
    (-1, -1): _NEG,
}

_TOKENS = {
    _POS: "+",
    _ZERO: "0",
    _NEG: "-",
    _POS | _ZERO: "+0",
    _NEG | _ZERO: "-0",
    _POS | _NEG: "+-",
    _ALL: "?",
    _UP: "^",
    _DOWN: "v",
}
_CODES_BY_TOKEN = {tok: code for code, tok in _TOKENS.items()}


@dataclass(frozen=True, slots=True)
class QSign:
    """A qualitative change or derivative value.

    Wraps a small integer code: bits for the base signs of a sign set, or
    one of two reserved marker codes.  Use the module constants (POS, ZERO,
    NEG, UNKNOWN, POS_ZERO, NEG_ZERO, UP, DOWN) rather than building codes
    by hand.
    """

    code: int

    def __post_init__(self) -> None:
        if self.code not in _VALID_CODES:
            raise ValueError(f"invalid QSign code {self.code!r}")

    # -- classification -------------------------------------------------

    @property
    def is_marker(self) -> bool:
        return self.code in (_UP, _DOWN)

    @property
    def is_sign_set(self) -> bool:
        return not self.is_marker

    def signs(self) -> frozenset[int]:
        """Member base signs as ints (+1, 0, -1). Markers have none."""
        if self.is_marker:
            raise ValueError("markers do not denote a set of signs")
        return frozenset(s for s, bit in _BIT_OF_SIGN.items() if self.code & bit)

    def contains(self, sign: int) -> bool:
        """Whether a base sign (+1, 0 or -1) is a possible direction."""
        if self.is_marker:
            return False
        return bool(self.code & _BIT_OF_SIGN[sign])

    def issubset(self, other: "QSign") -> bool:
        if self.is_marker or other.is_marker:
            return self == other
        return self.code & other.code == self.code

    def union(self, other: "QSign") -> "QSign":
        if self.is_marker or other.is_marker:
            raise ValueError("cannot take the union of marker values")
        return QSign(self.code | other.code)

    def __or__(self, other: "QSign") -> "QSign":
        return self.union(other)

    def negated(self) -> "QSign":
        """Mirror a sign set (+ and - swap, 0 is fixed)."""
        if self.is_marker:
            raise ValueError("markers cannot be negated")
        m = self.code & _ZERO
        if self.code & _POS:
            m |= _NEG
        if self.code & _NEG:
            m |= _POS
        return QSign(m)

    def widened(self, zero_strict: bool = False) -> "QSign":
        """Monotone widening used when crossing formalisms.

        Adds 0 as a possible direction.  With ``zero_strict`` a value that
        allows 0 widens all the way to unknown, for callers that refuse to
        carry a definite no-change across formalisms.
        """
        if self.is_marker:
            raise ValueError("markers cannot be widened")
        if zero_strict and self.code & _ZERO:
            return UNKNOWN
        return QSign(self.code | _ZERO)

    # -- text ------------------------------------------------------------

    def token(self) -> str:
        return _TOKENS[self.code]

    @staticmethod
    def from_token(text: str) -> "QSign":
        try:
            return QSign(_CODES_BY_TOKEN[text])
        except KeyError:
            raise ValueError(f"unknown sign token {text!r}") from None

    @staticmethod
    def from_signs(signs: Iterable[int]) -> "QSign":
        mask = 0
        for s in signs:
            mask |= _BIT_OF_SIGN[s]
        return QSign(mask)

    def __str__(self) -> str:
        return self.token()

    def __repr__(self) -> str:
        return f"QSign({self.token()!r})"


POS = QSign(_POS)
ZERO = QSign(_ZERO)
NEG = QSign(_NEG)
POS_ZERO = QSign(_POS | _ZERO)
NEG_ZERO = QSign(_NEG | _ZERO)
UNKNOWN = QSign(_ALL)
UP = QSign(_UP)
DOWN = QSign(_DOWN)

#: The four values the canonical arithmetic tables are stated over.
CANONICAL = (POS, ZERO, NEG, UNKNOWN)
#: Every sign-set value (no markers).
SIGN_SETS = tuple(QSign(code) for code in range(1, 8))


def sign_of(x: float, zero_tolerance: float = 0.0) -> QSign:
    """Qualitative sign of a real number, as a singleton sign set.

    ``zero_tolerance`` absorbs floating-point noise: anything within it of
    zero reads as no change.  Symbolic callers use 0, numeric oracles a
    small positive tolerance.
    """
    if not math.isfinite(x):
        raise ValueError(f"sign of non-finite value {x!r}")
    if zero_tolerance < 0:
        raise ValueError("zero_tolerance must be nonnegative")
    if x > zero_tolerance:
        return POS
    if x < -zero_tolerance:
        return NEG
    return ZERO


def qadd(a: QSign, b: QSign) -> QSign:
    """Qualitative addition, lifted over sign sets.

    Rejects markers: they are derivative annotations, not changes, and the
    addition table is defined on changes only.
    """
    if a.is_marker or b.is_marker:
        raise ValueError("qualitative addition is undefined for markers")
    mask = 0
    for sa in a.signs():
        for sb in b.signs():
            mask |= _ADD3[(sa, sb)]
    return QSign(mask)


def qmul(change: QSign, deriv: QSign) -> QSign:
    """Qualitative multiplication of a change by a derivative.

    The derivative may be a marker.  An up marker lets increases through
    and absorbs decreases (a positive change yields "zero or positive", a
    negative one exactly zero); the down marker is the mirror image.  The
    result is always a sign set.
    """
    if change.is_marker:
        raise ValueError("the change operand cannot be a marker")
    if deriv.code == _UP:
        mask = 0
        for s in change.signs():
            mask |= (_POS | _ZERO) if s > 0 else _ZERO
        return QSign(mask)
    if deriv.code == _DOWN:
        mask = 0
        for s in change.signs():
            mask |= (_NEG | _ZERO) if s < 0 else _ZERO
        return QSign(mask)
    mask = 0
    for sa in change.signs():
        for sb in deriv.signs():
            mask |= _BIT_OF_SIGN[sa * sb]
    return QSign(mask)


@dataclass(frozen=True, slots=True)
class QVector:
    """An ordered vector of change values, indexed by variable outcome."""

    entries: tuple[QSign, ...]

    def __post_init__(self) -> None:
        for e in self.entries:
            if e.is_marker:
                raise ValueError("change vectors cannot contain markers")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> QSign:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __str__(self) -> str:
        return "(" + ", ".join(e.token() for e in self.entries) + ")"


@dataclass(frozen=True, slots=True)
class QMatrix:
    """A matrix of qualitative derivatives.

    Rows range over child outcomes, columns over parent outcomes.  Entries
    may be markers (state-dependent possibilistic links produce them).
    """

    rows: tuple[tuple[QSign, ...], ...]

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValueError("a derivative matrix needs at least one row")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ValueError("ragged derivative matrix")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, i: int) -> tuple[QSign, ...]:
        return self.rows[i]

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(e.token() for e in row) for row in self.rows) + "]"


def qmatvec(m: QMatrix, v: QVector) -> QVector:
    """Multiply a change vector through a derivative matrix.

    Entry i folds ``qmul(v[j], m[i][j])`` over j with qualitative addition;
    an empty fold is a zero change.
    """
    n_rows, n_cols = m.shape
    if n_cols != len(v):
        raise ValueError(f"dimension mismatch: matrix has {n_cols} columns, vector {len(v)} entries")
    out = []
    for i in range(n_rows):
        acc = ZERO
        for j in range(n_cols):
            acc = qadd(acc, qmul(v[j], m[i][j]))
        out.append(acc)
    return QVector(tuple(out))
