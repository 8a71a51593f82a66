"""Decision predicates over scenarios: ambiguity, dog whistles,
disinterested juries, truth-interested revision and agreement dynamics."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .discourse import (
    Edu,
    History,
    RelationInstance,
    commitments,
    entails,
    rel_atom,
    semantically_distinct,
    validate_history,
)
from .epistemic import check_prior_symmetry, interpret
from .game import Move, Play, admissible_attacks, dual, turn

if TYPE_CHECKING:
    from .scenarios import GameSpec

HALF = Fraction(1, 2)

CONFIRMATION_SURVIVES = "confirmation_survives"
NO_SURVIVING_CONFIRMATION = "no_surviving_confirmation"
UNREBUTTED_REFUTATION = "unrebutted_refutation"
_EVIDENCE_TAGS = (CONFIRMATION_SURVIVES, NO_SURVIVING_CONFIRMATION, UNREBUTTED_REFUTATION)


@dataclass(frozen=True)
class EvidenceOutcome:
    tag: str
    detail: str = ""

    def __post_init__(self) -> None:
        if self.tag not in _EVIDENCE_TAGS:
            raise ValueError(f"unknown evidence tag: {self.tag!r}")


@dataclass(frozen=True)
class DogWhistleWitness:
    loaded_history: int
    grammar_history: int
    affected_jury: str
    denial_available: bool = True


@dataclass(frozen=True)
class AgreementOutcome:
    status: str  # agreed | disagreed
    final_histories: tuple[int, int]
    rounds_used: int
    final_beliefs: tuple[Fraction, Fraction]

    @property
    def agreed(self) -> bool:
        return self.status == "agreed"


@dataclass(frozen=True)
class DisinterestReport:
    indifference: str  # pass | counterexample
    symmetry: str  # pass | fail | incomparable
    verdict: str  # necessary-conditions-met | not-disinterested
    counterexample: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "indifference": self.indifference,
            "symmetry": self.symmetry,
            "verdict": self.verdict,
            "counterexample": self.counterexample,
        }


def live_completions(spec: "GameSpec", jury_type: str, ulf_id: str) -> list[int]:
    """Completion indices carrying positive kernel mass under some type
    tuple for the given jury type."""
    t0s, t1s = spec.type_space.player_types
    live: set[int] = set()
    for types in itertools.product(t0s, t1s):
        row = interpret(spec.type_space, jury_type, types, ulf_id)
        live.update(int(i) for i in row.support)
    return sorted(live)


def is_ambiguous(spec: "GameSpec", jury_type: str, ulf_id: str) -> bool:
    """More than one live reading, at least two of them incomparable."""
    live = live_completions(spec, jury_type, ulf_id)
    if len(live) < 2:
        return False
    comps = spec.completions(ulf_id).histories
    return any(
        semantically_distinct(comps[a], comps[b])
        for a, b in itertools.combinations(live, 2)
    )


def is_dog_whistle(
    spec: "GameSpec",
    jury_type: str,
    ulf_id: str,
    grammar_h: int,
    jury_pool: Optional[Mapping[str, Mapping[int, Fraction]]] = None,
) -> Optional[DogWhistleWitness]:
    """Witness an enriched live reading that entails the grammatical one and
    strictly improves some pool jury's score; None when no such reading.

    The speaker can always retreat to the grammatical reading, so a witness
    records deniability as available.
    """
    comps = spec.completions(ulf_id).histories
    if not 0 <= grammar_h < len(comps):
        raise ValueError(f"invalid grammar history index: {grammar_h}")
    scores = spec.jury.scores if jury_pool is None else jury_pool
    live = live_completions(spec, jury_type, ulf_id)
    if len(live) < 2 or grammar_h not in live:
        return None
    for idx in live:
        if idx == grammar_h:
            continue
        if not entails(comps[idx], comps[grammar_h]):
            continue
        for pool_jt in sorted(scores):
            row = scores[pool_jt]
            if idx in row and grammar_h in row and row[idx] > row[grammar_h]:
                return DogWhistleWitness(idx, grammar_h, pool_jt)
    return None


def enumerate_plays(
    moves: Mapping[int, Sequence[str]], maxlen: int
) -> Iterator[Play]:
    """All alternating single-move plays up to maxlen turns, either opener."""
    yield Play()
    for opener in (0, 1):
        for length in range(1, maxlen + 1):
            menus = [moves[opener if i % 2 == 0 else 1 - opener] for i in range(length)]
            for payloads in itertools.product(*menus):
                p = Play()
                for i, payload in enumerate(payloads):
                    mover = opener if i % 2 == 0 else 1 - opener
                    p = Play(p.turns + (turn(mover, [payload]),))
                yield p


def _describe(p: Play) -> str:
    if not p.turns:
        return "<empty play>"
    return " ".join(f"{t.player}:{'+'.join(t.payloads)}" for t in p.turns)


def is_disinterested(spec: "GameSpec", jury_type: str, maxlen: int) -> DisinterestReport:
    """Necessary conditions for a disinterested jury, never sufficiency.

    Indifference is checked exhaustively over all plays up to maxlen on the
    scenario's move menus; symmetry compares the prior's type marginal under
    the role swap.
    """
    indifference = "pass"
    counterexample = None
    for p in enumerate_plays(spec.moves, maxlen):
        if not p.turns:
            continue  # the empty play is its own dual; nothing to compare
        d = dual(p)
        for i in (0, 1):
            if spec.jury.member(p, i) != spec.jury.member(d, 1 - i):
                indifference = "counterexample"
                counterexample = f"play [{_describe(p)}] vs dual, player {i}"
                break
        if counterexample:
            break
    try:
        symmetry = "pass" if check_prior_symmetry(spec.type_space, jury_type) else "fail"
    except ValueError:
        symmetry = "incomparable"
    verdict = (
        "necessary-conditions-met"
        if indifference == "pass" and symmetry == "pass"
        else "not-disinterested"
    )
    return DisinterestReport(indifference, symmetry, verdict, counterexample)


def truth_interested_update(
    p: Fraction,
    outcome: EvidenceOutcome,
    likelihoods: Optional[tuple[Fraction, Fraction]] = None,
) -> Fraction:
    """Belief revision of a truth-interested agent after one evidence round.

    A claim whose every confirmation was attacked without rebuttal drops to
    at most a coin flip; an unrebutted refutation kills it; surviving
    confirmation conditions on the supplied likelihood pair.
    """
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("probability out of range")
    if outcome.tag == NO_SURVIVING_CONFIRMATION:
        return min(p, HALF)
    if outcome.tag == UNREBUTTED_REFUTATION:
        return Fraction(0)
    if likelihoods is None:
        raise ValueError("confirmation_survives needs a likelihood pair")
    l_true, l_false = (Fraction(x) for x in likelihoods)
    denominator = p * l_true + (1 - p) * l_false
    if denominator == 0:
        raise ValueError("conditioning on null event")
    return p * l_true / denominator


def liminf_update(
    p: Fraction,
    outcomes: Sequence[EvidenceOutcome],
    horizon: int,
    likelihoods: Optional[tuple[Fraction, Fraction]] = None,
) -> Fraction:
    """Trailing-window minimum of the update chain, a finite liminf stand-in.

    Confirmation rounds use the given likelihood pair, symmetric by default.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if len(outcomes) < horizon:
        raise ValueError("horizon exceeds available outcomes")
    pair = likelihoods if likelihoods is not None else (Fraction(1), Fraction(1))
    values = []
    v = Fraction(p)
    for o in outcomes:
        v = truth_interested_update(v, o, pair if o.tag == CONFIRMATION_SURVIVES else None)
        values.append(v)
    window = math.ceil(horizon / 4)
    return min(values[horizon - window : horizon])


# Side labels for agreement simulations.
SIDE_PRO = 0
SIDE_CON = 1
SIDE_SPLIT = 2


def _side(p: Fraction) -> int:
    if p > HALF:
        return SIDE_PRO
    if p < HALF:
        return SIDE_CON
    return SIDE_SPLIT


def simulate_agreement(
    facts: Sequence[str],
    p0: Fraction,
    p1: Fraction,
    truth_interested: tuple[bool, bool],
    grounds: Mapping[int, Mapping[str, str]],
    max_rounds: int,
) -> AgreementOutcome:
    """Iterated attack rounds over a shared fact set, one fact per round.

    Each player's evidence per fact is tagged "solid" (confirmation survives
    attack) or "attackable" (stricken when debated).  After every fact has
    been debated a settlement round applies the convergence rules: a player
    left without surviving grounds adopts the better-grounded opponent's
    belief, and if neither side survives both retreat to a coin flip.
    Players not interested in the truth skip their own revision, so
    disagreement may persist.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be positive")
    facts = list(facts)
    for player, tags in grounds.items():
        for fact, tag in tags.items():
            if fact not in facts:
                raise ValueError(f"ground on unknown fact: {fact!r}")
            if tag not in ("solid", "attackable"):
                raise ValueError(f"unknown ground tag: {tag!r}")
    beliefs = [Fraction(p0), Fraction(p1)]
    standing = {i: dict(grounds.get(i, {})) for i in (0, 1)}

    def agreed_now() -> bool:
        return _side(beliefs[0]) == _side(beliefs[1])

    if agreed_now():
        sides = (_side(beliefs[0]), _side(beliefs[1]))
        return AgreementOutcome("agreed", sides, 0, (beliefs[0], beliefs[1]))

    rounds_used = 0
    for r in range(1, max_rounds + 1):
        rounds_used = r
        if r <= len(facts):
            fact = facts[r - 1]
            for i in (0, 1):
                if standing[i].get(fact) == "attackable":
                    del standing[i][fact]
        else:
            survives = [
                any(tag == "solid" for tag in standing[i].values())
                and _side(beliefs[i]) != SIDE_SPLIT
                for i in (0, 1)
            ]
            if survives[0] and survives[1]:
                raise ValueError(
                    "contradictory claims cannot both retain surviving confirmation"
                )
            if survives[0] != survives[1]:
                loser = 1 if survives[0] else 0
                if truth_interested[loser]:
                    beliefs[loser] = beliefs[1 - loser]
            else:
                for i in (0, 1):
                    if truth_interested[i]:
                        beliefs[i] = HALF
        if agreed_now():
            sides = (_side(beliefs[0]), _side(beliefs[1]))
            return AgreementOutcome("agreed", sides, rounds_used, (beliefs[0], beliefs[1]))
    sides = (_side(beliefs[0]), _side(beliefs[1]))
    return AgreementOutcome("disagreed", sides, rounds_used, (beliefs[0], beliefs[1]))


def e_defensible(
    h: History,
    attacks: Sequence[Move],
    rebuttals: Mapping[Move, Optional[Move]],
    disinterested: bool = True,
) -> bool:
    """Every admissible attack on the history has a scripted rebuttal."""
    targets = {u.id for u in h.units}
    targets |= commitments(h).atoms
    targets |= {rel_atom(r.relation, r.source, r.target) for r in h.relations}
    for attack in attacks:
        if not attack.is_attack:
            raise ValueError("non-attack move in attack script")
        if attack.attack_target not in targets:
            raise ValueError(f"attack target not in history: {attack.attack_target!r}")
    for attack in admissible_attacks(attacks, disinterested):
        if rebuttals.get(attack) is None:
            return False
    return True


def is_predictive(
    h: History,
    new_facts: Iterable[Edu],
    extender: Callable[[Edu, History], Optional[RelationInstance]],
    attacks: Sequence[Move] = (),
    rebuttals: Optional[Mapping[Move, Optional[Move]]] = None,
    disinterested: bool = True,
) -> bool:
    """Can the history absorb the new facts and stay defensible?

    The extender proposes one attachment per fact; failure to attach, an
    incoherent extension, or an undefended attack all count against.
    """
    current = h
    for fact in new_facts:
        rel = extender(fact, current)
        if rel is None:
            return False
        current = History(current.units + (fact,), current.relations + (rel,))
    if not validate_history(current).coherent:
        return False
    return e_defensible(current, attacks, rebuttals or {}, disinterested)


E_WINS = "E_wins"
A_WINS = "A_wins"
BOTH_LOSE = "both_lose"


@dataclass(frozen=True)
class DefenseScript:
    """Attacks leveled against one history and that side's responses."""

    attacks: tuple[Move, ...] = ()
    rebuttals: Mapping[Move, Optional[Move]] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        object.__setattr__(self, "attacks", tuple(self.attacks))
        object.__setattr__(self, "rebuttals", dict(self.rebuttals or {}))


def two_history_outcome(
    hE: History,
    hA: History,
    script_e: DefenseScript,
    script_a: DefenseScript,
    disinterested: bool = True,
) -> str:
    """Pit two rival histories against their attack scripts.

    A side wins only by staying defensible while the other falls; rival
    histories cannot both win, so mutual survival (as forced on
    contradictory claims, which neither can defeat) is a joint loss.
    """
    d_e = e_defensible(hE, script_e.attacks, script_e.rebuttals, disinterested)
    d_a = e_defensible(hA, script_a.attacks, script_a.rebuttals, disinterested)
    if d_e and not d_a:
        return E_WINS
    if d_a and not d_e:
        return A_WINS
    return BOTH_LOSE
