"""Singly connected networks of qualitative uncertainty.

Variables are binary and tagged with a formalism (probability, possibility
or belief).  Links attach a conditional table to a child; propagation walks
the polytree in topological order, completes evidence into full
(change, complement-change) pairs, widens changes that cross a formalism
boundary, and multiplies them through each link's derivative matrix.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import links as lc
from .signs import (
    DOWN,
    NEG,
    NEG_ZERO,
    POS,
    POS_ZERO,
    QMatrix,
    QSign,
    QVector,
    UNKNOWN,
    UP,
    ZERO,
    qadd,
    qmatvec,
    sign_of,
)


class NetworkError(Exception):
    """Raised when a network or a query against it is unusable."""


class EvidenceError(NetworkError):
    """Raised for evidence that is inconsistent with a variable's state."""


class Formalism(enum.Enum):
    PROBABILITY = "prob"
    POSSIBILITY = "poss"
    BELIEF = "bel"

    def __str__(self) -> str:
        return self.value


PROB = Formalism.PROBABILITY
POSS = Formalism.POSSIBILITY
BEL = Formalism.BELIEF

_TABLE_FORMALISM = {
    lc.ProbCond1: PROB,
    lc.ProbCond2: PROB,
    lc.PossCond1: POSS,
    lc.PossCond2: POSS,
    lc.BelCond1: BEL,
    lc.BelCond2Joint: BEL,
    lc.BelCond2Separate: BEL,
}
_TABLE_ARITY = {
    lc.ProbCond1: 1,
    lc.ProbCond2: 2,
    lc.PossCond1: 1,
    lc.PossCond2: 2,
    lc.BelCond1: 1,
    lc.BelCond2Joint: 2,
    lc.BelCond2Separate: 2,
}

ConditionalTable = (
    lc.ProbCond1
    | lc.ProbCond2
    | lc.PossCond1
    | lc.PossCond2
    | lc.BelCond1
    | lc.BelCond2Joint
    | lc.BelCond2Separate
)


@dataclass(frozen=True)
class Variable:
    """A binary variable with a formalism tag and an optional numeric prior.

    Priors are pairs over (x, ~x): probabilities summing to 1, normalized
    possibilities, or beliefs with sum at most 1.  A missing prior means an
    interior state for probability and belief variables.
    """

    name: str
    formalism: Formalism
    prior: tuple[float, float] | None = None

    def extremal_pos(self) -> bool:
        """True when the prior pins val(x) at exactly 1."""
        return self.prior is not None and self.prior[0] == 1.0

    def extremal_neg(self) -> bool:
        """True when the prior pins val(~x) at exactly 1."""
        return self.prior is not None and self.prior[1] == 1.0

    def value_at_zero(self, pos: bool) -> bool:
        return self.prior is not None and self.prior[0 if pos else 1] == 0.0


@dataclass(frozen=True)
class Link:
    """A directed edge set {parents} -> child with its conditional table."""

    child: str
    parents: tuple[str, ...]
    table: ConditionalTable

    def __post_init__(self) -> None:
        if len(self.parents) not in (1, 2):
            raise NetworkError(f"link into {self.child!r} must have 1 or 2 parents")

    @property
    def formalism(self) -> Formalism:
        return _TABLE_FORMALISM[type(self.table)]

    @property
    def arity(self) -> int:
        return _TABLE_ARITY[type(self.table)]


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[str, ...]
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.errors


class Network:
    """An immutable singly connected network.

    Construction only checks what is needed to index the structure; call
    :func:`validate` for the full report.  Each variable may be the child
    of at most one link (enforced structurally here, since propagation
    needs the mapping to be a function).
    """

    def __init__(self, variables: Iterable[Variable], links: Iterable[Link]):
        self.variables: dict[str, Variable] = {}
        for v in variables:
            if v.name in self.variables:
                raise NetworkError(f"duplicate variable {v.name!r}")
            self.variables[v.name] = v
        self.links: tuple[Link, ...] = tuple(links)
        self.link_of: dict[str, Link] = {}
        for link in self.links:
            if link.child in self.link_of:
                raise NetworkError(f"variable {link.child!r} is the child of more than one link")
            self.link_of[link.child] = link

    def topological_order(self) -> list[str]:
        """Variable names, parents before children. Fails on cycles."""
        order: list[str] = []
        state: dict[str, int] = {}

        def visit(name: str) -> None:
            mark = state.get(name, 0)
            if mark == 2:
                return
            if mark == 1:
                raise NetworkError("network contains a directed cycle")
            state[name] = 1
            link = self.link_of.get(name)
            if link is not None:
                for p in link.parents:
                    if p in self.variables:
                        visit(p)
            state[name] = 2
            order.append(name)

        for name in sorted(self.variables):
            visit(name)
        return order

    def descendants(self, name: str) -> set[str]:
        """All variables reachable from ``name`` through links, inclusive."""
        out = {name}
        changed = True
        while changed:
            changed = False
            for link in self.links:
                if link.child not in out and any(p in out for p in link.parents):
                    out.add(link.child)
                    changed = True
        return out


def validate(net: Network) -> ValidationReport:
    """Structural and numeric checks. Reports, never raises."""
    errors: list[str] = []
    warnings: list[str] = []

    for link in net.links:
        for endpoint in (link.child, *link.parents):
            if endpoint not in net.variables:
                errors.append(f"link {_link_label(link)} names unknown variable {endpoint!r}")
        if len(link.parents) != link.arity:
            errors.append(
                f"link {_link_label(link)} has {len(link.parents)} parents but its table expects {link.arity}"
            )
        if len(link.parents) == 2 and link.parents[0] == link.parents[1]:
            errors.append(f"link {_link_label(link)} lists the same parent twice")
        child = net.variables.get(link.child)
        if child is not None and link.formalism is not child.formalism:
            errors.append(
                f"link {_link_label(link)} carries a {link.formalism} table but {link.child!r} is {child.formalism}"
            )
        table = link.table
        if isinstance(table, (lc.PossCond1, lc.PossCond2)):
            for w in table.normalization_warnings():
                warnings.append(f"link {_link_label(link)}: {w}")
            for p in link.parents:
                pv = net.variables.get(p)
                if pv is not None and pv.formalism is POSS and pv.prior is None:
                    errors.append(
                        f"possibility variable {p!r} feeds a possibility link and needs an explicit prior"
                    )

    # directed cycles
    try:
        net.topological_order()
    except NetworkError:
        errors.append("network contains a directed cycle")
    else:
        # undirected cycles (single-connectedness); union-find over link edges
        parent: dict[str, str] = {name: name for name in net.variables}

        def find(a: str) -> str:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for link in net.links:
            for p in link.parents:
                if p not in net.variables or link.child not in net.variables:
                    continue
                ra, rb = find(p), find(link.child)
                if ra == rb:
                    errors.append(
                        f"network is not singly connected: link {_link_label(link)} closes an undirected cycle"
                    )
                else:
                    parent[ra] = rb

    for var in net.variables.values():
        if var.prior is None:
            continue
        lo, hi = var.prior
        if not (0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0):
            errors.append(f"prior of {var.name!r} must lie in [0, 1]")
            continue
        if var.formalism is PROB and abs(lo + hi - 1.0) > 1e-9:
            errors.append(f"probability prior of {var.name!r} must sum to 1")
        elif var.formalism is POSS and max(lo, hi) != 1.0:
            errors.append(f"possibility prior of {var.name!r} must have max 1")
        elif var.formalism is BEL and lo + hi > 1.0 + 1e-12:
            errors.append(f"belief prior of {var.name!r} must sum to at most 1")

    return ValidationReport(tuple(errors), tuple(warnings))


def _link_label(link: Link) -> str:
    return f"{' & '.join(link.parents)} -> {link.child}"


# ---------------------------------------------------------------------------
# evidence completion and bridging
# ---------------------------------------------------------------------------

def _feasible_directions(var: Variable, pos: bool) -> QSign:
    """Directions a change of val(x) (or val(~x)) can physically take."""
    at_one = var.extremal_pos() if pos else var.extremal_neg()
    at_zero = var.value_at_zero(pos)
    if var.formalism is PROB:
        # the pair is complementary, so the other side's bound applies too
        at_one = at_one or var.value_at_zero(not pos)
        at_zero = at_zero or (var.extremal_neg() if pos else var.extremal_pos())
    if at_one and at_zero:
        return ZERO
    if at_one:
        return NEG_ZERO
    if at_zero:
        return POS_ZERO
    return UNKNOWN


def _completion_row(var: Variable, s: QSign) -> QSign:
    """Derived change of val(~x) for a single base direction of val(x)."""
    if var.formalism is PROB:
        return s.negated()
    if var.formalism is BEL:
        return UNKNOWN
    # possibility: behaviour depends on whether pi(x) sits at 1
    if var.extremal_pos():
        return UNKNOWN if s == ZERO else POS_ZERO
    return NEG_ZERO if s == POS else ZERO


def complete_change(
    var: Variable, partial: tuple[QSign, QSign | None] | QSign
) -> tuple[QSign, QSign]:
    """Fill in (or check) the complement component of an evidence change.

    The change of val(x) is first intersected with the directions feasible
    at the variable's prior (a value pinned at 1 cannot rise); evidence
    with no feasible direction left is rejected.  The change of val(~x) is
    then derived: probability negates, belief knows nothing, and
    possibility depends on whether pi(x) is at 1.  A supplied complement is
    instead validated against that derivation and kept.
    """
    if isinstance(partial, QSign):
        delta_x, delta_nx = partial, None
    else:
        delta_x, delta_nx = partial
    if delta_x.is_marker or (delta_nx is not None and delta_nx.is_marker):
        raise EvidenceError("evidence changes cannot be markers")

    if var.formalism is POSS and var.prior is None:
        raise EvidenceError(
            f"possibility variable {var.name!r} needs a prior before evidence can be completed"
        )

    feasible = _feasible_directions(var, pos=True)
    clipped = QSign(delta_x.code & feasible.code) if (delta_x.code & feasible.code) else None
    if clipped is None:
        raise EvidenceError(
            f"evidence {delta_x} on {var.name!r} is inconsistent with its prior"
        )

    derived = ZERO
    first = True
    for s in sorted(clipped.signs(), reverse=True):
        row = _completion_row(var, QSign.from_signs([s]))
        derived = row if first else derived.union(row)
        first = False

    if delta_nx is None:
        return clipped, derived
    if not delta_nx.issubset(derived):
        raise EvidenceError(
            f"supplied change {delta_nx} for not-{var.name} conflicts with the derived {derived}"
        )
    return clipped, delta_nx


def bridge_change(
    delta: tuple[QSign, QSign],
    from_formalism: Formalism,
    to_formalism: Formalism,
    zero_strict: bool = False,
) -> tuple[QSign, QSign]:
    """Carry a change pair across a formalism boundary.

    Within one formalism this is the identity.  Across formalisms each
    component widens monotonically: a rise becomes "rise or stay", a fall
    "fall or stay", and a definite no-change stays put (or becomes unknown
    under ``zero_strict``).
    """
    if from_formalism is to_formalism:
        return delta
    return delta[0].widened(zero_strict), delta[1].widened(zero_strict)


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------

Change = tuple[QSign, QSign]
ZERO_CHANGE: Change = (ZERO, ZERO)

#: Evidence maps variable names to a change of val(x), optionally paired
#: with an explicit change of val(~x).
Evidence = Mapping[str, QSign | tuple[QSign, QSign | None]]


class ChangeVector(Mapping[str, Change]):
    """Per-variable change pairs; unmentioned variables read as no change."""

    def __init__(self, entries: Mapping[str, Change] = ()):
        self._entries = dict(entries)
        for name, (dx, dnx) in self._entries.items():
            if dx.is_marker or dnx.is_marker:
                raise NetworkError(f"change of {name!r} cannot be a marker")

    def __getitem__(self, name: str) -> Change:
        return self._entries.get(name, ZERO_CHANGE)

    def get(self, name: str, default: Change = ZERO_CHANGE) -> Change:
        return self._entries.get(name, default)

    def __iter__(self):
        return iter(sorted(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChangeVector):
            return NotImplemented
        names = set(self._entries) | set(other._entries)
        return all(self[n] == other[n] for n in names)

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}: ({dx}, {dnx})" for n, (dx, dnx) in sorted(self._entries.items()))
        return f"ChangeVector({{{inner}}})"


@dataclass(frozen=True)
class Contribution:
    """One source of a variable's change: evidence or a parent link."""

    source: str  # "evidence" or a parent variable name
    change: Change
    bridged: bool = False


@dataclass(frozen=True)
class ChangeReport:
    """Result of a propagation pass."""

    changes: ChangeVector
    matrices: Mapping[str, QMatrix]  # keyed by child variable
    provenance: Mapping[str, tuple[Contribution, ...]]

    def trace(self, name: str) -> set[str]:
        """Evidence variables a change at ``name`` traces back to."""
        seen: set[str] = set()
        roots: set[str] = set()

        def walk(n: str) -> None:
            if n in seen:
                return
            seen.add(n)
            for contrib in self.provenance.get(n, ()):
                if contrib.source == "evidence":
                    roots.add(n)
                else:
                    walk(contrib.source)

        walk(name)
        return roots


def _parent_poss_state(net: Network, parent_name: str) -> lc.PossState:
    var = net.variables[parent_name]
    if var.formalism is POSS:
        if var.prior is None:
            raise NetworkError(
                f"possibility variable {parent_name!r} needs a prior to evaluate its outgoing link"
            )
        return lc.PossState(*var.prior)
    # Cross-formalism parent: its possibility is unconstrained, which is
    # total ignorance on both outcomes.
    return lc.IGNORANT


def link_matrix(net: Network, link: Link) -> QMatrix:
    """Derivative matrix of one link, evaluated at the pre-evidence state."""
    table = link.table
    if isinstance(table, lc.ProbCond1):
        return lc.prob_link_derivative(table)
    if isinstance(table, lc.ProbCond2):
        return lc.prob_pair_derivative(table)
    if isinstance(table, lc.PossCond1):
        return lc.poss_link_derivative(table, _parent_poss_state(net, link.parents[0]))
    if isinstance(table, lc.PossCond2):
        return lc.poss_pair_derivative(
            table,
            _parent_poss_state(net, link.parents[0]),
            _parent_poss_state(net, link.parents[1]),
        )
    if isinstance(table, lc.BelCond1):
        return lc.bel_link_derivative(table)
    if isinstance(table, lc.BelCond2Joint):
        return lc.bel_pair_joint_derivative(table)
    if isinstance(table, lc.BelCond2Separate):
        return lc.bel_pair_separate_derivative(table)
    raise NetworkError(f"unknown table type {type(table).__name__}")


def _require_valid(net: Network) -> None:
    report = validate(net)
    if not report.ok:
        raise NetworkError("invalid network: " + "; ".join(report.errors))


def _normalize_evidence(net: Network, evidence: Evidence) -> dict[str, tuple[QSign, QSign | None]]:
    out: dict[str, tuple[QSign, QSign | None]] = {}
    for name, value in evidence.items():
        if name not in net.variables:
            raise NetworkError(f"evidence names unknown variable {name!r}")
        if isinstance(value, QSign):
            out[name] = (value, None)
        else:
            out[name] = (value[0], value[1])
    return out


def propagate(net: Network, evidence: Evidence, zero_strict_bridge: bool = False) -> ChangeReport:
    """Propagate qualitative evidence through the network.

    Evidence changes are completed against each variable's prior, then
    pushed through links in topological order.  A child's incoming change
    is the sum (qualitative addition) over parents of the parent's change,
    bridged into the child's formalism, multiplied through the link's
    derivative matrix; evidence on an internal variable adds to whatever
    arrives from its parents.  Derivative matrices are evaluated once, at
    the pre-evidence state.
    """
    _require_valid(net)
    raw_evidence = _normalize_evidence(net, evidence)

    completed: dict[str, Change] = {}
    for name, partial in raw_evidence.items():
        completed[name] = complete_change(net.variables[name], partial)

    order = net.topological_order()
    changes: dict[str, Change] = {}
    matrices: dict[str, QMatrix] = {}
    provenance: dict[str, tuple[Contribution, ...]] = {}

    for name in order:
        var = net.variables[name]
        contribs: list[Contribution] = []
        total: Change = ZERO_CHANGE

        link = net.link_of.get(name)
        if link is not None:
            matrix = link_matrix(net, link)
            matrices[name] = matrix
            incoming: list[QSign] = []
            bridged_flags: dict[str, bool] = {}
            parent_changes: dict[str, Change] = {}
            for p in link.parents:
                p_change = changes.get(p, ZERO_CHANGE)
                p_form = net.variables[p].formalism
                bridged = bridge_change(p_change, p_form, var.formalism, zero_strict_bridge)
                bridged_flags[p] = p_form is not var.formalism
                parent_changes[p] = bridged
                incoming.extend(bridged)
            result = qmatvec(matrix, QVector(tuple(incoming)))
            total = (result[0], result[1])
            # per-parent contributions, for the provenance trace
            for idx, p in enumerate(link.parents):
                cols = QVector(
                    tuple(
                        parent_changes[p][j - 2 * idx] if 2 * idx <= j < 2 * idx + 2 else ZERO
                        for j in range(len(incoming))
                    )
                )
                part = qmatvec(matrix, cols)
                pair = (part[0], part[1])
                if pair != ZERO_CHANGE:
                    contribs.append(Contribution(p, pair, bridged_flags[p]))

        if name in completed:
            ev = completed[name]
            total = (qadd(total[0], ev[0]), qadd(total[1], ev[1]))
            contribs.append(Contribution("evidence", ev))

        changes[name] = total
        if contribs:
            provenance[name] = tuple(contribs)

    nonzero = {n: c for n, c in changes.items() if c != ZERO_CHANGE}
    return ChangeReport(ChangeVector(nonzero), matrices, provenance)


@dataclass(frozen=True)
class LinkExplanation:
    child: str
    parents: tuple[str, ...]
    matrix: QMatrix
    cases: tuple[tuple[str, ...], ...]  # same shape as the matrix


def explain(net: Network) -> tuple[LinkExplanation, ...]:
    """Evaluate and label every link's derivative matrix without propagating."""
    _require_valid(net)
    out = []
    for link in sorted(net.links, key=lambda l: l.child):
        matrix = link_matrix(net, link)
        out.append(LinkExplanation(link.child, link.parents, matrix, _cases_for(link, matrix)))
    return tuple(out)


_TRICHOTOMY = {POS: "follows", NEG: "varies-inversely", ZERO: "independent"}
_POSS_CASES = {
    POS: "follows",
    ZERO: "independent",
    UP: "may-follow-up",
    DOWN: "may-follow-down",
}


def _cases_for(link: Link, matrix: QMatrix) -> tuple[tuple[str, ...], ...]:
    table = link.table
    rows = []
    for i, row in enumerate(matrix.rows):
        child_pos = i == 0
        labels = []
        for j, entry in enumerate(row):
            if isinstance(table, (lc.ProbCond1, lc.BelCond1)):
                labels.append(_TRICHOTOMY[entry])
            elif isinstance(table, (lc.PossCond1, lc.PossCond2)):
                labels.append(_POSS_CASES[entry])
            elif isinstance(table, lc.ProbCond2):
                synergy, offset = lc._pair_terms(table.get, True, j < 2, j % 2 == 0)
                s_syn, s_off = sign_of(synergy), sign_of(offset)
                if not child_pos:  # complementing the child flips both terms
                    s_syn, s_off = s_syn.negated(), s_off.negated()
                labels.append(f"synergy={s_syn} offset={s_off}")
            elif isinstance(table, lc.BelCond2Joint):
                diffs = lc._bel_pair_diffs(table, child_pos, j < 2, j % 2 == 0)
                labels.append("terms=" + ",".join(str(sign_of(d)) for d in diffs))
            elif isinstance(table, lc.BelCond2Separate):
                labels.append("weak-follows" if entry == POS else "indeterminate")
            else:
                labels.append("")
        rows.append(tuple(labels))
    return tuple(rows)
