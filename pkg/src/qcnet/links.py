"""Qualitative derivatives of network links.

Each link type carries a numeric conditional table in one of the three
formalisms.  The functions here turn a table (and, for possibility, the
current parent state) into the matrix of qualitative derivatives that
propagation multiplies changes through:

* probability: the child follows the parent outcome exactly when the
  conditional given that outcome exceeds the conditional given its
  complement; with two parents a synergy term combines with a per-outcome
  offset.
* possibility: the sup-min combination makes responsiveness depend on the
  current state, so entries may be the directional markers (an increase
  may get through, or a decrease may, but not both).
* belief: the child follows a parent outcome when conditioning on it
  yields more belief than conditioning on the whole frame.

All functions are pure; tables validate their numeric ranges on
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .signs import DOWN, POS, QMatrix, QSign, UNKNOWN, UP, ZERO, qadd, sign_of

# Belief conditioning cells: True / False for an outcome, None for the
# whole frame (x or not-x).
Cell = bool | None
CELLS = (True, False, None)


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class ProbCond1:
    """p(c | a) and p(c | not a); complements are implied."""

    p_c_given_a: float
    p_c_given_na: float

    def __post_init__(self) -> None:
        _check_unit("p(c|a)", self.p_c_given_a)
        _check_unit("p(c|~a)", self.p_c_given_na)

    def get(self, child_pos: bool, parent_pos: bool) -> float:
        p = self.p_c_given_a if parent_pos else self.p_c_given_na
        return p if child_pos else 1.0 - p


@dataclass(frozen=True)
class ProbCond2:
    """p(d | b, c) over the four parent-outcome pairs."""

    p_d_given_bc: float
    p_d_given_b_nc: float
    p_d_given_nb_c: float
    p_d_given_nb_nc: float

    def __post_init__(self) -> None:
        for name, v in (
            ("p(d|b,c)", self.p_d_given_bc),
            ("p(d|b,~c)", self.p_d_given_b_nc),
            ("p(d|~b,c)", self.p_d_given_nb_c),
            ("p(d|~b,~c)", self.p_d_given_nb_nc),
        ):
            _check_unit(name, v)

    def get(self, child_pos: bool, first_pos: bool, second_pos: bool) -> float:
        if first_pos:
            p = self.p_d_given_bc if second_pos else self.p_d_given_b_nc
        else:
            p = self.p_d_given_nb_c if second_pos else self.p_d_given_nb_nc
        return p if child_pos else 1.0 - p


@dataclass(frozen=True)
class PossCond1:
    """Conditional possibilities for a single-parent link."""

    pi_c_given_a: float
    pi_c_given_na: float
    pi_nc_given_a: float
    pi_nc_given_na: float

    def __post_init__(self) -> None:
        for name, v in (
            ("pi(c|a)", self.pi_c_given_a),
            ("pi(c|~a)", self.pi_c_given_na),
            ("pi(~c|a)", self.pi_nc_given_a),
            ("pi(~c|~a)", self.pi_nc_given_na),
        ):
            _check_unit(name, v)

    def get(self, child_pos: bool, parent_pos: bool) -> float:
        if child_pos:
            return self.pi_c_given_a if parent_pos else self.pi_c_given_na
        return self.pi_nc_given_a if parent_pos else self.pi_nc_given_na

    def normalization_warnings(self) -> tuple[str, ...]:
        """Columns whose conditionals do not reach possibility 1."""
        out = []
        for parent_pos, label in ((True, "a"), (False, "~a")):
            if max(self.get(True, parent_pos), self.get(False, parent_pos)) < 1.0:
                out.append(f"conditional possibilities given {label} do not reach 1")
        return tuple(out)


@dataclass(frozen=True)
class PossCond2:
    """Conditional possibilities for a two-parent link."""

    pi_d_given_bc: float
    pi_d_given_b_nc: float
    pi_d_given_nb_c: float
    pi_d_given_nb_nc: float
    pi_nd_given_bc: float
    pi_nd_given_b_nc: float
    pi_nd_given_nb_c: float
    pi_nd_given_nb_nc: float

    def __post_init__(self) -> None:
        for name, v in (
            ("pi(d|b,c)", self.pi_d_given_bc),
            ("pi(d|b,~c)", self.pi_d_given_b_nc),
            ("pi(d|~b,c)", self.pi_d_given_nb_c),
            ("pi(d|~b,~c)", self.pi_d_given_nb_nc),
            ("pi(~d|b,c)", self.pi_nd_given_bc),
            ("pi(~d|b,~c)", self.pi_nd_given_b_nc),
            ("pi(~d|~b,c)", self.pi_nd_given_nb_c),
            ("pi(~d|~b,~c)", self.pi_nd_given_nb_nc),
        ):
            _check_unit(name, v)

    def get(self, child_pos: bool, first_pos: bool, second_pos: bool) -> float:
        if child_pos:
            if first_pos:
                return self.pi_d_given_bc if second_pos else self.pi_d_given_b_nc
            return self.pi_d_given_nb_c if second_pos else self.pi_d_given_nb_nc
        if first_pos:
            return self.pi_nd_given_bc if second_pos else self.pi_nd_given_b_nc
        return self.pi_nd_given_nb_c if second_pos else self.pi_nd_given_nb_nc

    def normalization_warnings(self) -> tuple[str, ...]:
        out = []
        for first_pos in (True, False):
            for second_pos in (True, False):
                if max(self.get(True, first_pos, second_pos), self.get(False, first_pos, second_pos)) < 1.0:
                    label = f"{'b' if first_pos else '~b'},{'c' if second_pos else '~c'}"
                    out.append(f"conditional possibilities given {label} do not reach 1")
        return tuple(out)


@dataclass(frozen=True)
class BelCond1:
    """Conditional beliefs for a single-parent link.

    Conditioning cells are the parent outcome, its complement, and the
    whole frame.
    """

    bel_c_given_a: float = 0.0
    bel_c_given_na: float = 0.0
    bel_c_given_frame: float = 0.0
    bel_nc_given_a: float = 0.0
    bel_nc_given_na: float = 0.0
    bel_nc_given_frame: float = 0.0

    def __post_init__(self) -> None:
        for name, v in (
            ("bel(c|a)", self.bel_c_given_a),
            ("bel(c|~a)", self.bel_c_given_na),
            ("bel(c|a or ~a)", self.bel_c_given_frame),
            ("bel(~c|a)", self.bel_nc_given_a),
            ("bel(~c|~a)", self.bel_nc_given_na),
            ("bel(~c|a or ~a)", self.bel_nc_given_frame),
        ):
            _check_unit(name, v)
        for cell in CELLS:
            if self.get(True, cell) + self.get(False, cell) > 1.0 + 1e-12:
                raise ValueError("bel(c|.) + bel(~c|.) must not exceed 1")

    def get(self, child_pos: bool, cell: Cell) -> float:
        if child_pos:
            if cell is None:
                return self.bel_c_given_frame
            return self.bel_c_given_a if cell else self.bel_c_given_na
        if cell is None:
            return self.bel_nc_given_frame
        return self.bel_nc_given_a if cell else self.bel_nc_given_na


def _joint_key(child_pos: bool, first: Cell, second: Cell) -> int:
    return (CELLS.index(first) * 3 + CELLS.index(second)) + (0 if child_pos else 9)


@dataclass(frozen=True)
class BelCond2Joint:
    """Joint conditional beliefs bel(z | X, Y) over 9 conditioning cells per
    child outcome. Unlisted cells default to belief 0."""

    cells: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.cells) != 18:
            raise ValueError("expected 18 conditional beliefs")
        for v in self.cells:
            _check_unit("conditional belief", v)
        for first in CELLS:
            for second in CELLS:
                if self.get(True, first, second) + self.get(False, first, second) > 1.0 + 1e-12:
                    raise ValueError("bel(d|X,Y) + bel(~d|X,Y) must not exceed 1")

    @classmethod
    def from_values(cls, values: dict[tuple[bool, Cell, Cell], float]) -> "BelCond2Joint":
        cells = [0.0] * 18
        for (child_pos, first, second), v in values.items():
            cells[_joint_key(child_pos, first, second)] = v
        return cls(tuple(cells))

    def get(self, child_pos: bool, first: Cell, second: Cell) -> float:
        return self.cells[_joint_key(child_pos, first, second)]


@dataclass(frozen=True)
class BelCond2Separate:
    """Two independent single-parent belief tables for a two-parent link."""

    for_first: BelCond1
    for_second: BelCond1


@dataclass(frozen=True)
class PossState:
    """Current possibilities (pi(x), pi(~x)) of one variable, max-normalized."""

    pi_x: float
    pi_nx: float

    def __post_init__(self) -> None:
        _check_unit("pi(x)", self.pi_x)
        _check_unit("pi(~x)", self.pi_nx)
        if max(self.pi_x, self.pi_nx) != 1.0:
            raise ValueError("possibility state must satisfy max(pi(x), pi(~x)) = 1")

    def get(self, pos: bool) -> float:
        return self.pi_x if pos else self.pi_nx


IGNORANT = PossState(1.0, 1.0)


# ---------------------------------------------------------------------------
# single-parent derivatives
# ---------------------------------------------------------------------------

def prob_link_derivative(cond: ProbCond1) -> QMatrix:
    """2x2 matrix over child outcomes (c, ~c) by parent outcomes (a, ~a).

    Entry (x, y) is the sign of p(x|y) - p(x|~y).  Complementing either
    the child or the parent outcome flips the difference exactly, so the
    matrix is built from the single sign of p(c|a) - p(c|~a).
    """
    s = sign_of(cond.p_c_given_a - cond.p_c_given_na)
    return QMatrix(((s, s.negated()), (s.negated(), s)))


def _poss_entry_1(cond_y: float, cond_ny: float, pi_y: float, pi_ny: float) -> QSign:
    # dominance: the y-branch of the sup-min determines the child value;
    # headroom: pi(y) itself (not the conditional) is the active minimum.
    dominant = min(cond_y, pi_y) > min(cond_ny, pi_ny)
    headroom = pi_y < cond_y
    if dominant and headroom:
        return POS
    if headroom:
        return UP
    if dominant:
        return DOWN
    return ZERO


def poss_link_derivative(cond: PossCond1, parent_state: PossState) -> QMatrix:
    """2x2 matrix of {+, 0, up, down} entries for a possibility link.

    An entry is + when the parent outcome currently determines the child
    value with room to move in both directions, the up marker when only a
    rise in the parent could start to matter, the down marker when only a
    fall could, and 0 otherwise.
    """
    rows = []
    for child_pos in (True, False):
        row = []
        for parent_pos in (True, False):
            row.append(
                _poss_entry_1(
                    cond.get(child_pos, parent_pos),
                    cond.get(child_pos, not parent_pos),
                    parent_state.get(parent_pos),
                    parent_state.get(not parent_pos),
                )
            )
        rows.append(tuple(row))
    return QMatrix(tuple(rows))


def bel_link_derivative(cond: BelCond1) -> QMatrix:
    """2x2 matrix: entry (x, y) is the sign of bel(x|y) - bel(x|frame)."""
    rows = []
    for child_pos in (True, False):
        row = []
        for parent_pos in (True, False):
            diff = cond.get(child_pos, parent_pos) - cond.get(child_pos, None)
            row.append(sign_of(diff))
        rows.append(tuple(row))
    return QMatrix(tuple(rows))


# ---------------------------------------------------------------------------
# two-parent derivatives
# ---------------------------------------------------------------------------

def _pair_terms(get, child_pos: bool, x_first: bool, x_pos: bool) -> tuple[float, float]:
    """Synergy and offset terms for entry (z, x), co-parent fixed at its
    positive outcome."""

    def p(xv: bool, yv: bool) -> float:
        if x_first:
            return get(child_pos, xv, yv)
        return get(child_pos, yv, xv)

    synergy = p(x_pos, True) + p(not x_pos, False) - p(x_pos, False) - p(not x_pos, True)
    offset = p(x_pos, False) - p(not x_pos, False)
    return synergy, offset


def prob_pair_derivative(cond: ProbCond2) -> QMatrix:
    """2x4 matrix over (d, ~d) by (b, ~b, c, ~c) for a joint probability
    table.

    Each entry adds the sign of the synergy term (how much the two parents
    reinforce each other) to the sign of the remaining per-outcome
    difference.  Complementing the child flips both terms exactly, so the
    second row is the negation of the first."""
    row = []
    for x_first in (True, False):
        for x_pos in (True, False):
            synergy, offset = _pair_terms(cond.get, True, x_first, x_pos)
            row.append(qadd(sign_of(synergy), sign_of(offset)))
    return QMatrix((tuple(row), tuple(e.negated() for e in row)))


def prob_independent_pair_derivative(cond_b: ProbCond1, cond_c: ProbCond1) -> QMatrix:
    """2x4 matrix for two parents whose effects are independent: the two
    single-link matrices side by side."""
    mb = prob_link_derivative(cond_b)
    mc = prob_link_derivative(cond_c)
    return QMatrix(tuple(mb[i] + mc[i] for i in range(2)))


def _poss_pair_entry(
    cond: PossCond2, child_pos: bool, x_first: bool, x_pos: bool,
    state_x: PossState, state_y: PossState,
) -> QSign:
    def c(xv: bool, yv: bool) -> float:
        if x_first:
            return cond.get(child_pos, xv, yv)
        return cond.get(child_pos, yv, xv)

    def joint(xv: bool, yv: bool) -> float:
        return min(c(xv, yv), state_x.get(xv), state_y.get(yv))

    follows = up = down = False
    for y_pos in (True, False):
        mine = joint(x_pos, y_pos)
        others = max(joint(not x_pos, y_pos), joint(x_pos, not y_pos), joint(not x_pos, not y_pos))
        dominant = mine > others
        headroom = state_x.get(x_pos) < min(c(x_pos, y_pos), state_y.get(y_pos))
        if dominant and headroom:
            follows = True
        elif headroom:
            up = True
        elif dominant:
            down = True
    if follows:
        return POS
    if up:
        return UP
    if down:
        return DOWN
    return ZERO


def poss_pair_derivative(cond: PossCond2, state_x: PossState, state_y: PossState) -> QMatrix:
    """2x4 matrix over (d, ~d) by (b, ~b, c, ~c) for a two-parent
    possibility link.

    Joint possibilities are min-combinations of the conditional and the two
    parent states; an outcome's entry considers both co-parent routes, and
    either one sufficing for dominance-with-headroom yields +.
    """
    rows = []
    for child_pos in (True, False):
        row = []
        for x_first in (True, False):
            sx = state_x if x_first else state_y
            sy = state_y if x_first else state_x
            for x_pos in (True, False):
                row.append(_poss_pair_entry(cond, child_pos, x_first, x_pos, sx, sy))
        rows.append(tuple(row))
    return QMatrix(tuple(rows))


def _bel_pair_diffs(cond: BelCond2Joint, child_pos: bool, x_first: bool, x_pos: bool) -> tuple[float, float, float]:
    def b(xc: Cell, yc: Cell) -> float:
        if x_first:
            return cond.get(child_pos, xc, yc)
        return cond.get(child_pos, yc, xc)

    return tuple(b(x_pos, yc) - b(None, yc) for yc in CELLS)  # type: ignore[return-value]


def bel_pair_joint_derivative(cond: BelCond2Joint) -> QMatrix:
    """2x4 matrix for a joint belief table.

    Entry (z, x) adds, over the three co-parent conditioning cells, the
    sign of bel(z | x, Y) - bel(z | frame, Y)."""
    rows = []
    for child_pos in (True, False):
        row = []
        for x_first in (True, False):
            for x_pos in (True, False):
                acc = ZERO
                for diff in _bel_pair_diffs(cond, child_pos, x_first, x_pos):
                    acc = qadd(acc, sign_of(diff))
                row.append(acc)
        rows.append(tuple(row))
    return QMatrix(tuple(rows))


def bel_pair_separate_derivative(cond: BelCond2Separate) -> QMatrix:
    """2x4 matrix for per-parent belief tables.

    The child weakly follows a parent outcome when conditioning on it gives
    at least as much belief as the frame does; otherwise the dependence is
    indeterminate.  Note the weak inequality: equality still reads as +.
    """
    rows = []
    for child_pos in (True, False):
        row = []
        for table in (cond.for_first, cond.for_second):
            for x_pos in (True, False):
                if table.get(child_pos, x_pos) >= table.get(child_pos, None):
                    row.append(POS)
                else:
                    row.append(UNKNOWN)
        rows.append(tuple(row))
    return QMatrix(tuple(rows))


# ---------------------------------------------------------------------------
# degeneracy margins (used by the numeric oracle to skip boundary states)
# ---------------------------------------------------------------------------

def prob_link_margin(cond: ProbCond1) -> float:
    return abs(cond.p_c_given_a - cond.p_c_given_na)


def prob_pair_margin(cond: ProbCond2) -> float:
    m = float("inf")
    for child_pos in (True, False):
        for x_first in (True, False):
            for x_pos in (True, False):
                synergy, offset = _pair_terms(cond.get, child_pos, x_first, x_pos)
                m = min(m, abs(synergy), abs(offset))
    return m


def bel_link_margin(cond: BelCond1) -> float:
    m = float("inf")
    for child_pos in (True, False):
        for parent_pos in (True, False):
            m = min(m, abs(cond.get(child_pos, parent_pos) - cond.get(child_pos, None)))
    return m


def bel_pair_joint_margin(cond: BelCond2Joint) -> float:
    m = float("inf")
    for child_pos in (True, False):
        for x_first in (True, False):
            for x_pos in (True, False):
                for diff in _bel_pair_diffs(cond, child_pos, x_first, x_pos):
                    m = min(m, abs(diff))
    return m


def poss_link_degenerate(cond: PossCond1, parent_state: PossState, tol: float = 1e-9) -> bool:
    """Whether the current state sits too close to a decision boundary for
    a strict prediction to be meaningfully tested.

    Only entries claiming guaranteed transmission (+) are fragile: both
    their dominance gap and their headroom must clear the tolerance.
    Marker and zero entries are safe at their boundaries because the
    inactive branch of the sup-min pins the child value.
    """
    for child_pos in (True, False):
        for parent_pos in (True, False):
            c_y = cond.get(child_pos, parent_pos)
            c_ny = cond.get(child_pos, not parent_pos)
            pi_y = parent_state.get(parent_pos)
            pi_ny = parent_state.get(not parent_pos)
            dom_gap = min(c_y, pi_y) - min(c_ny, pi_ny)
            head_gap = c_y - pi_y
            if dom_gap > 0 and head_gap > 0 and (dom_gap < tol or head_gap < tol):
                return True
    return False


def poss_pair_degenerate(
    cond: PossCond2, state_x: PossState, state_y: PossState, tol: float = 1e-9
) -> bool:
    """Two-parent analogue of ``poss_link_degenerate``.

    Besides fragile + entries, an up-marker entry is fragile when no joint
    untouched by this parent pins the current child value: a sibling route
    through the co-parent can then leak a decrease the marker promises to
    block.
    """
    for child_pos in (True, False):
        for x_first in (True, False):
            sx = state_x if x_first else state_y
            sy = state_y if x_first else state_x
            for x_pos in (True, False):
                def c(xv: bool, yv: bool) -> float:
                    if x_first:
                        return cond.get(child_pos, xv, yv)
                    return cond.get(child_pos, yv, xv)

                def joint(xv: bool, yv: bool) -> float:
                    return min(c(xv, yv), sx.get(xv), sy.get(yv))

                pi_x = sx.get(x_pos)
                entry = _poss_pair_entry(cond, child_pos, x_first, x_pos, sx, sy)
                if entry == POS:
                    for y_pos in (True, False):
                        mine = joint(x_pos, y_pos)
                        others = max(
                            joint(not x_pos, y_pos), joint(x_pos, not y_pos), joint(not x_pos, not y_pos)
                        )
                        head_gap = min(c(x_pos, y_pos), sy.get(y_pos)) - pi_x
                        if mine - others > 0 and head_gap > 0:
                            if mine - others < tol or head_gap < tol:
                                return True
                elif entry == UP:
                    pinned = [joint(not x_pos, True), joint(not x_pos, False)]
                    for y_pos in (True, False):
                        if pi_x >= min(c(x_pos, y_pos), sy.get(y_pos)):
                            pinned.append(joint(x_pos, y_pos))
                    if max(pinned) - pi_x < tol:
                        return True
    return False
