"""Type spaces and exact-rational belief dynamics.

Beliefs are distributions over (type, strategy) tuples for both players;
interpretation kernels are scenario data mapping jury type and player types
to a distribution over the completions of an underspecified form.  All
probability is `fractions.Fraction` end to end: rounding drift would make
the worked trajectories unverifiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Hashable, Iterable, Mapping, Optional, Sequence

from .game import Play, extend

if TYPE_CHECKING:
    from .scenarios import GameSpec

Outcome = Hashable
TypeTuple = tuple[str, str]
PriorOutcome = tuple[str, str, str, str]  # (type0, strategy0, type1, strategy1)


@dataclass(frozen=True)
class Distribution:
    """Probability distribution with exact rational weights summing to 1.

    Zero-weight outcomes are dropped at construction so equal distributions
    compare equal.
    """

    weights: Mapping[Outcome, Fraction]

    def __post_init__(self) -> None:
        cleaned = {
            outcome: Fraction(w) for outcome, w in self.weights.items() if Fraction(w) != 0
        }
        if any(w < 0 for w in cleaned.values()):
            raise ValueError("negative probability")
        if not cleaned:
            raise ValueError("empty support")
        total = sum(cleaned.values())
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "weights", cleaned)

    def __getitem__(self, outcome: Outcome) -> Fraction:
        return self.weights.get(outcome, Fraction(0))

    @property
    def support(self) -> set[Outcome]:
        return set(self.weights)

    def mass(self, event: Iterable[Outcome]) -> Fraction:
        return sum((self.weights.get(o, Fraction(0)) for o in set(event)), Fraction(0))

    def marginal(self, project) -> "Distribution":
        out: dict[Outcome, Fraction] = {}
        for outcome, w in self.weights.items():
            key = project(outcome)
            out[key] = out.get(key, Fraction(0)) + w
        return Distribution(out)


def point_mass(outcome: Outcome) -> Distribution:
    return Distribution({outcome: Fraction(1)})


def uniform(outcomes: Sequence[Outcome]) -> Distribution:
    n = len(outcomes)
    return Distribution({o: Fraction(1, n) for o in outcomes})


def bayes_update(prior: Distribution, event: Iterable[Outcome]) -> Distribution:
    """Condition on an event of positive prior mass, exactly."""
    event = set(event)
    mass = prior.mass(event)
    if mass == 0:
        raise ValueError("conditioning on null event")
    return Distribution(
        {o: w / mass for o, w in prior.weights.items() if o in event}
    )


@dataclass(frozen=True)
class StrategyTable:
    """One player's scripted choices: round index -> payload string.

    Rounds count the owner's own turns, starting at 1 with the first
    unscripted round; rounds beyond the table leave the owner free.
    """

    id: str
    owner: int
    moves: Mapping[int, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        normalized = {
            int(r): (p,) if isinstance(p, str) else tuple(p) for r, p in self.moves.items()
        }
        object.__setattr__(self, "moves", normalized)
        rounds = sorted(normalized)
        if rounds and rounds != list(range(1, len(rounds) + 1)):
            raise ValueError(f"strategy {self.id}: rounds must be contiguous from 1")

    def matches(self, p: Play) -> bool:
        """True when every prescribed round agrees with the owner's turns so far."""
        own_turns = p.turns_of(self.owner)
        for r, payloads in self.moves.items():
            if r <= len(own_turns) and own_turns[r - 1].payloads != payloads:
                return False
        return True


def compatible(tables: Iterable[StrategyTable], p: Play) -> list[StrategyTable]:
    """The tables whose prescriptions match the owner's observed moves."""
    tables = list(tables)
    owners = {t.owner for t in tables}
    if len(owners) > 1:
        raise ValueError("tables must share an owner")
    return [t for t in tables if t.matches(p)]


@dataclass(frozen=True)
class TypeSpace:
    player_types: tuple[tuple[str, ...], tuple[str, ...]]
    jury_types: tuple[str, ...]
    strategy_tables: tuple[tuple[StrategyTable, ...], tuple[StrategyTable, ...]]
    priors: Mapping[str, Distribution]
    interpretation_kernel: Mapping[tuple[str, TypeTuple, str], Distribution] = field(
        default_factory=dict
    )

    def table(self, player: int, strategy_id: str) -> StrategyTable:
        for t in self.strategy_tables[player]:
            if t.id == strategy_id:
                return t
        raise KeyError(f"unknown strategy {strategy_id!r} for player {player}")

    def compatibility_event(self, belief: Distribution, p: Play) -> set[PriorOutcome]:
        """Support outcomes whose strategy components both match the play."""
        fits: dict[tuple[int, str], bool] = {}

        def fit(player: int, sid: str) -> bool:
            key = (player, sid)
            if key not in fits:
                fits[key] = self.table(player, sid).matches(p)
            return fits[key]

        return {
            o
            for o in belief.support
            if fit(0, o[1]) and fit(1, o[3])  # type: ignore[index]
        }


def interpret(ts: TypeSpace, jury_type: str, assignment: TypeTuple, ulf_id: str) -> Distribution:
    """Kernel lookup: the scenario's stipulated reading distribution."""
    key = (jury_type, tuple(assignment), ulf_id)
    try:
        return ts.interpretation_kernel[key]
    except KeyError:
        raise ValueError(f"kernel gap: no entry for {key}") from None


def marginal_over_histories(
    ts: TypeSpace, jury_type: str, belief: Distribution, ulf_id: str
) -> Distribution:
    """Mixture of kernel rows weighted by a belief over type tuples."""
    out: dict[Outcome, Fraction] = {}
    for types, w in belief.weights.items():
        row = interpret(ts, jury_type, types, ulf_id)
        for h, q in row.weights.items():
            out[h] = out.get(h, Fraction(0)) + w * q
    return Distribution(out)


def marginal_over_types(
    ts: TypeSpace, jury_type: str, belief: Distribution, ulf_id: str, completion: int
) -> Distribution:
    """Posterior over type tuples after observing one completion,
    with the kernel as likelihood."""
    posterior: dict[Outcome, Fraction] = {}
    for types, w in belief.weights.items():
        likelihood = interpret(ts, jury_type, types, ulf_id)[completion]
        if likelihood:
            posterior[types] = w * likelihood
    total = sum(posterior.values(), Fraction(0))
    if total == 0:
        raise ValueError(f"completion {completion} has zero mixture mass")
    return Distribution({t: w / total for t, w in posterior.items()})


def posterior_type_marginal(
    ts: TypeSpace, jury_type: str, p: Play, player: int
) -> Optional[Distribution]:
    """Type marginal for one player after conditioning the jury prior on a
    play's compatibility event; None when the event has no mass."""
    prior = ts.priors[jury_type]
    event = ts.compatibility_event(prior, p)
    if prior.mass(event) == 0:
        return None
    posterior = bayes_update(prior, event)
    return posterior.marginal(lambda o: o[2 * player])


@dataclass(frozen=True)
class BeliefTrajectory:
    jury_type: str
    designated_player: int
    rounds: tuple[tuple[int, Distribution], ...]
    event_masses: tuple[Fraction, ...] = ()

    def marginals(self, player_type: str) -> list[Fraction]:
        return [dist[player_type] for _, dist in self.rounds]

    def csv_rows(self, player_types: Sequence[str]) -> list[tuple]:
        """Rows of (round, jury_type, player_type, num, den, float)."""
        rows = []
        for rnd, dist in self.rounds:
            for ptype in player_types:
                p = dist[ptype]
                rows.append(
                    (rnd, self.jury_type, ptype, p.numerator, p.denominator, float(p))
                )
        return rows


def run_rounds(spec: "GameSpec", jury_type: str, n: int) -> BeliefTrajectory:
    """Replay n scripted rounds, conditioning the jury's belief each round.

    Round 0 records the prior; each later round extends the play with the
    scripted turns, conditions on the set of (type, strategy) tuples still
    compatible, and records the designated player's type marginal.
    """
    if n > len(spec.script):
        raise ValueError(f"script exhausted: {n} rounds requested, {len(spec.script)} scripted")
    ts = spec.type_space
    if jury_type not in ts.priors:
        raise ValueError(f"unknown jury type: {jury_type!r}")
    designated = spec.designated_player
    belief = ts.priors[jury_type]
    play = Play()
    rows: list[tuple[int, Distribution]] = [(0, belief.marginal(lambda o: o[2 * designated]))]
    masses: list[Fraction] = []
    for r in range(1, n + 1):
        for t in spec.script[r - 1]:
            play = extend(play, t)
        event = ts.compatibility_event(belief, play)
        masses.append(belief.mass(event))
        belief = bayes_update(belief, event)
        rows.append((r, belief.marginal(lambda o: o[2 * designated])))
    return BeliefTrajectory(jury_type, designated, tuple(rows), tuple(masses))


def check_prior_symmetry(
    ts: TypeSpace, jury_type: str, bijection: Optional[Mapping[str, str]] = None
) -> bool:
    """Is the jury's prior invariant under swapping the player roles?

    The bijection identifies player 0's types with player 1's; it defaults
    to identity when the two type sets coincide and is vacuous when both
    are singletons.
    """
    t0, t1 = ts.player_types
    if bijection is None:
        if len(t0) == 1 and len(t1) == 1:
            return True
        if set(t0) == set(t1):
            bijection = {t: t for t in t0}
        else:
            raise ValueError("incomparable type sets")
    if set(bijection) != set(t0) or set(bijection.values()) != set(t1):
        raise ValueError("incomparable type sets")
    inverse = {v: k for k, v in bijection.items()}
    marginal = ts.priors[jury_type].marginal(lambda o: (o[0], o[2]))
    return all(
        marginal[(a, b)] == marginal[(inverse[b], bijection[a])]
        for a in t0
        for b in t1
    )


@dataclass(frozen=True)
class SafetyResult:
    ok: bool
    note: str = ""

    def __bool__(self) -> bool:
        return self.ok


def safety_check(spec: "GameSpec", jury_type: str, p1: Play, p2: Play) -> SafetyResult:
    """Same evidence, same belief: equal compatibility events must produce
    equal posteriors."""
    prior = spec.type_space.priors[jury_type]
    e1 = spec.type_space.compatibility_event(prior, p1)
    e2 = spec.type_space.compatibility_event(prior, p2)
    if e1 != e2:
        return SafetyResult(True, "events differ")
    return SafetyResult(bayes_update(prior, e1) == bayes_update(prior, e2))
