"""Discourse graphs: units, relations, histories and underspecified forms.

A history is a graph of elementary and complex discourse units joined by
named relations.  Commitment semantics reduce a history to a finite atom
set, so entailment between rival readings of the same conversation is
plain set inclusion.  An underspecified form leaves some relation slots
open; enumerating its completions yields the rival histories.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

RELATION_NAMES = (
    "background",
    "iqap",
    "qap",
    "correction",
    "explanation",
    "confirmation_question",
    "question_followup",
    "result",
    "reiteration",
    "elaboration",
    "contrast",
)

# Relations that assert both arguments' content and leave a structural atom.
VERIDICAL = frozenset(
    {
        "background",
        "iqap",
        "qap",
        "explanation",
        "result",
        "reiteration",
        "elaboration",
        "contrast",
    }
)
# A correction asserts its target but withdraws its source's commitments.
_SUPPRESSES_SOURCE = frozenset({"correction"})
# Question relations assert nothing themselves; their target stays
# hypothetical unless some veridical relation asserts it elsewhere.
_QUESTION = frozenset({"confirmation_question", "question_followup"})


def negate(atom: str) -> str:
    """Complement of a possibly negated atom identifier."""
    return atom[1:] if atom.startswith("~") else "~" + atom


def rel_atom(relation: str, source: str, target: str) -> str:
    return f"rel({relation},{source},{target})"


@dataclass(frozen=True)
class Edu:
    """Elementary discourse unit: one speaker move with its commitments."""

    id: str
    speaker: int
    label: str = ""
    commitments: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "commitments", frozenset(self.commitments))


@dataclass(frozen=True)
class Cdu:
    """Complex discourse unit grouping other units into one argument."""

    id: str
    members: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", frozenset(self.members))


@dataclass(frozen=True)
class RelationInstance:
    relation: str
    source: str
    target: str

    def __post_init__(self) -> None:
        if self.relation not in RELATION_NAMES:
            raise ValueError(f"unknown relation name: {self.relation!r}")

    @property
    def veridical(self) -> bool:
        return self.relation in VERIDICAL

    @property
    def atom(self) -> Optional[str]:
        if self.relation in _QUESTION:
            return None
        return rel_atom(self.relation, self.source, self.target)


@dataclass(frozen=True)
class CommitmentSet:
    atoms: frozenset[str]
    inconsistent: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", frozenset(self.atoms))

    def __contains__(self, atom: str) -> bool:
        return atom in self.atoms

    def contradicts(self, other: "CommitmentSet") -> bool:
        """True when the two sets assert a complementary atom pair."""
        return any(negate(a) in other.atoms for a in self.atoms)


@dataclass(frozen=True)
class History:
    """A fully specified discourse structure over a set of units."""

    units: tuple[Edu | Cdu, ...]
    relations: tuple[RelationInstance, ...]
    provenance: Optional[tuple[str, tuple[int, ...]]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", tuple(self.units))
        object.__setattr__(self, "relations", tuple(self.relations))

    def unit_map(self) -> dict[str, Edu | Cdu]:
        return {u.id: u for u in self.units}

    def edus(self) -> list[Edu]:
        return [u for u in self.units if isinstance(u, Edu)]

    def expand(self, unit_id: str) -> frozenset[str]:
        """EDU ids reachable from a unit through CDU membership."""
        index = self.unit_map()
        seen: set[str] = set()
        out: set[str] = set()
        stack = [unit_id]
        while stack:
            uid = stack.pop()
            if uid in seen:
                continue
            seen.add(uid)
            unit = index.get(uid)
            if isinstance(unit, Cdu):
                stack.extend(unit.members)
            elif isinstance(unit, Edu):
                out.add(uid)
        return frozenset(out)

    def top_level(self) -> list[str]:
        """Units not contained in any CDU of this history."""
        contained: set[str] = set()
        for u in self.units:
            if isinstance(u, Cdu):
                contained.update(u.members)
        return [u.id for u in self.units if u.id not in contained]

    def top_ancestors(self, unit_id: str) -> frozenset[str]:
        """Top-level units containing (or equal to) the given unit."""
        parents: dict[str, set[str]] = {}
        for u in self.units:
            if isinstance(u, Cdu):
                for m in u.members:
                    parents.setdefault(m, set()).add(u.id)
        top = set(self.top_level())
        out: set[str] = set()
        stack = [unit_id]
        seen: set[str] = set()
        while stack:
            uid = stack.pop()
            if uid in seen:
                continue
            seen.add(uid)
            if uid in top:
                out.add(uid)
            for p in parents.get(uid, ()):
                stack.append(p)
        return frozenset(out)

    def to_dot(self) -> str:
        """Graphviz text for visual inspection: units as nodes, relations as
        labeled edges, CDU membership as dashed edges."""
        lines = ["digraph history {"]
        for u in self.units:
            if isinstance(u, Edu):
                label = u.label or u.id
                lines.append(f'  "{u.id}" [label="{u.id}: {label}"];')
            else:
                lines.append(f'  "{u.id}" [shape=box];')
        for u in self.units:
            if isinstance(u, Cdu):
                for m in sorted(u.members):
                    lines.append(f'  "{u.id}" -> "{m}" [style=dashed, arrowhead=none];')
        for r in self.relations:
            lines.append(f'  "{r.source}" -> "{r.target}" [label="{r.relation}"];')
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class CoherenceReport:
    violations: tuple[str, ...] = ()

    @property
    def coherent(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.coherent


@dataclass(frozen=True)
class UnderspecifiedForm:
    """A play's discourse content with unresolved relation slots.

    Each slot lists the mutually exclusive relation instances one of which
    must hold; the Cartesian product over slots generates the candidate
    histories.
    """

    id: str
    order: tuple[str, ...]
    units: tuple[Edu | Cdu, ...]
    fixed_relations: tuple[RelationInstance, ...] = ()
    slots: tuple[tuple[RelationInstance, ...], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(self.order))
        object.__setattr__(self, "units", tuple(self.units))
        object.__setattr__(self, "fixed_relations", tuple(self.fixed_relations))
        object.__setattr__(self, "slots", tuple(tuple(s) for s in self.slots))
        for i, slot in enumerate(self.slots):
            if not slot:
                raise ValueError(f"slot {i} has no candidates")
            if len(set(slot)) != len(slot):
                raise ValueError(f"slot {i} repeats a candidate")


def _commitment_atoms(h: History) -> CommitmentSet:
    """Atom set of a history under the fixed relation rule table.

    Unit atoms are collected except where a correction withdraws its source
    or a question relation leaves its target unasserted; every asserting
    relation also contributes a structural atom marking the link itself.
    """
    suppressed: set[str] = set()
    gated: set[str] = set()
    asserted: set[str] = set()
    for r in h.relations:
        if r.relation in _SUPPRESSES_SOURCE:
            suppressed.update(h.expand(r.source))
        if r.relation in _QUESTION:
            gated.update(h.expand(r.target))
        if r.relation in VERIDICAL:
            asserted.update(h.expand(r.source))
            asserted.update(h.expand(r.target))
    atoms: set[str] = set()
    for edu in h.edus():
        if edu.id in suppressed:
            continue
        if edu.id in gated and edu.id not in asserted:
            continue
        atoms.update(edu.commitments)
    for r in h.relations:
        if r.atom is not None:
            atoms.add(r.atom)
    inconsistent = any(negate(a) in atoms for a in atoms)
    return CommitmentSet(frozenset(atoms), inconsistent)


def validate_history(h: History) -> CoherenceReport:
    """Report every violated structural invariant; empty report = coherent.

    Problems are reported, never raised: dangling ids, duplicate ids, empty
    CDUs, CDU membership cycles, self-loop relations, disconnected or cyclic
    top-level structure, and a contradictory commitment set.
    """
    violations: list[str] = []
    ids = [u.id for u in h.units]
    index = h.unit_map()
    for uid in sorted({i for i in ids if ids.count(i) > 1}):
        violations.append(f"duplicate id: {uid}")

    for u in h.units:
        if isinstance(u, Edu):
            for a in sorted(u.commitments):
                if negate(a) in u.commitments and not a.startswith("~"):
                    violations.append(f"unit {u.id} commits {a} and {negate(a)}")
        else:
            if not u.members:
                violations.append(f"empty CDU: {u.id}")
            for m in sorted(u.members):
                if m not in index:
                    violations.append(f"dangling id: {m} (member of {u.id})")

    # CDU membership must be acyclic.
    def reaches(start: str, goal: str, seen: set[str]) -> bool:
        unit = index.get(start)
        if not isinstance(unit, Cdu):
            return False
        for m in unit.members:
            if m == goal or (m not in seen and reaches(m, goal, seen | {m})):
                return True
        return False

    for u in h.units:
        if isinstance(u, Cdu) and reaches(u.id, u.id, set()):
            violations.append(f"CDU membership cycle at {u.id}")
            break

    for r in h.relations:
        if r.source == r.target:
            violations.append(f"self-loop relation: {r.relation} at {r.source}")
        for endpoint in (r.source, r.target):
            if endpoint not in index:
                violations.append(f"dangling id: {endpoint} (in {r.relation})")

    if not any(v.startswith(("dangling", "CDU membership cycle", "duplicate")) for v in violations):
        top = h.top_level()
        edges: set[tuple[str, str]] = set()
        for r in h.relations:
            for a in h.top_ancestors(r.source):
                for b in h.top_ancestors(r.target):
                    if a != b:
                        edges.add((a, b))
        if len(top) > 1:
            seen = {top[0]}
            frontier = [top[0]]
            undirected = {(a, b) for a, b in edges} | {(b, a) for a, b in edges}
            while frontier:
                cur = frontier.pop()
                for a, b in undirected:
                    if a == cur and b not in seen:
                        seen.add(b)
                        frontier.append(b)
            if seen != set(top):
                violations.append("disconnected")
        # Cycle check over the directed top-level projection.
        adjacency: dict[str, set[str]] = {}
        for a, b in edges:
            adjacency.setdefault(a, set()).add(b)
        state: dict[str, int] = {}

        def cyclic(node: str) -> bool:
            state[node] = 1
            for nxt in adjacency.get(node, ()):
                if state.get(nxt) == 1:
                    return True
                if state.get(nxt) is None and cyclic(nxt):
                    return True
            state[node] = 2
            return False

        if any(state.get(n) is None and cyclic(n) for n in sorted(adjacency)):
            violations.append("relation cycle")
        commitment = _commitment_atoms(h)
        if commitment.inconsistent:
            pair = sorted(a for a in commitment.atoms if negate(a) in commitment.atoms)
            violations.append(f"contradictory commitments: {', '.join(pair)}")

    return CoherenceReport(tuple(violations))


def commitments(h: History) -> CommitmentSet:
    report = validate_history(h)
    if not report.coherent:
        raise ValueError(f"incoherent input: {'; '.join(report.violations)}")
    return _commitment_atoms(h)


def entails(h1: History, h2: History) -> bool:
    """True when every commitment of h2 is carried by h1."""
    return commitments(h1).atoms >= commitments(h2).atoms


def semantically_distinct(h1: History, h2: History) -> bool:
    """Neither history entails the other."""
    return not entails(h1, h2) and not entails(h2, h1)


@dataclass(frozen=True)
class CompletionReport:
    histories: tuple[History, ...]
    raw_count: int
    dropped: tuple[tuple[tuple[int, ...], str], ...]

    @property
    def dropped_count(self) -> int:
        return len(self.dropped)


def _ulf_history(u: UnderspecifiedForm, choice: tuple[int, ...]) -> History:
    relations = list(u.fixed_relations)
    for slot, pick in zip(u.slots, choice):
        relations.append(slot[pick])
    return History(units=u.units, relations=tuple(relations), provenance=(u.id, choice))


def enumerate_completions(u: UnderspecifiedForm) -> CompletionReport:
    """All slot resolutions in lexicographic slot order, validity-checked.

    Invalid combinations are dropped (with the first violated invariant
    named), not raised; with no slots the single fixed history remains.
    """
    histories: list[History] = []
    dropped: list[tuple[tuple[int, ...], str]] = []
    ranges = [range(len(slot)) for slot in u.slots]
    raw = 0
    for choice in itertools.product(*ranges):
        raw += 1
        h = _ulf_history(u, choice)
        report = validate_history(h)
        if report.coherent:
            histories.append(h)
        else:
            dropped.append((choice, report.violations[0]))
    return CompletionReport(tuple(histories), raw, tuple(dropped))


def completions(u: UnderspecifiedForm) -> list[History]:
    return list(enumerate_completions(u).histories)


def history_distance(h1: History, h2: History) -> Fraction:
    """Jaccard distance between the relation-instance sets of two histories."""
    for h in (h1, h2):
        report = validate_history(h)
        if not report.coherent:
            raise ValueError(f"incoherent input: {'; '.join(report.violations)}")
    s1 = {(r.relation, r.source, r.target) for r in h1.relations}
    s2 = {(r.relation, r.source, r.target) for r in h2.relations}
    union = s1 | s2
    if not union:
        return Fraction(0)
    return Fraction(len(s1 ^ s2), len(union))
