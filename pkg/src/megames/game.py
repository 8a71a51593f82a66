"""Message-exchange game mechanics: plays, duals, juries and a finite solver.

Plays are alternating turn sequences of player-labeled moves.  Juries carry
per-player winning conditions; limit and discounted conditions are only
approximated at a finite horizon, so `undecided` is a first-class verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .discourse import History, history_distance

ATTACK_KINDS = ("none", "evidence", "consistency", "coherence", "ad_hominem", "general_skeptical")

# Attack kinds a disinterested jury will entertain at all.
ADMISSIBLE_KINDS = frozenset({"evidence", "consistency", "coherence"})

WIN_0 = "win_0"
WIN_1 = "win_1"
UNDECIDED = "undecided"

WIN_E = "win_E"
NOT_WIN_E = "not_win_E"


@dataclass(frozen=True)
class Move:
    payload: str
    player: int
    attack_kind: str = "none"
    attack_target: Optional[str] = None
    answered_by: Optional[str] = None
    id: Optional[str] = None

    def __post_init__(self) -> None:
        if self.attack_kind not in ATTACK_KINDS:
            raise ValueError(f"unknown attack kind: {self.attack_kind!r}")
        if self.attack_kind != "none" and self.attack_target is None:
            raise ValueError("attack move needs a target")

    @property
    def is_attack(self) -> bool:
        return self.attack_kind != "none"


@dataclass(frozen=True)
class Turn:
    player: int
    moves: tuple[Move, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "moves", tuple(self.moves))
        if not self.moves:
            raise ValueError("empty turn")
        if any(m.player != self.player for m in self.moves):
            raise ValueError("turn mixes player labels")

    @property
    def payloads(self) -> tuple[str, ...]:
        return tuple(m.payload for m in self.moves)


def turn(player: int, payloads: Sequence[str]) -> Turn:
    return Turn(player, tuple(Move(p, player) for p in payloads))


@dataclass(frozen=True)
class Play:
    turns: tuple[Turn, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "turns", tuple(self.turns))
        for a, b in zip(self.turns, self.turns[1:]):
            if a.player == b.player:
                raise ValueError("wrong player: consecutive turns share a speaker")

    def __len__(self) -> int:
        return len(self.turns)

    def moves(self) -> list[Move]:
        return [m for t in self.turns for m in t.moves]

    def prefix(self, n: int) -> "Play":
        return Play(self.turns[:n])

    def turns_of(self, player: int) -> list[Turn]:
        return [t for t in self.turns if t.player == player]


EMPTY_PLAY = Play()


def extend(p: Play, t: Turn) -> Play:
    """Append a turn; either player may open, after that turns alternate."""
    if p.turns and p.turns[-1].player == t.player:
        raise ValueError("wrong player")
    return Play(p.turns + (t,))


def dual(p: Play) -> Play:
    """Flip every move's player label, keeping payloads and order."""
    flipped = tuple(
        Turn(
            1 - t.player,
            tuple(
                Move(m.payload, 1 - m.player, m.attack_kind, m.attack_target, m.answered_by, m.id)
                for m in t.moves
            ),
        )
        for t in p.turns
    )
    return Play(flipped)


def admissible_attacks(ms: Sequence[Move], disinterested: bool) -> list[Move]:
    """Drop ad hominem and general skeptical attacks for a disinterested jury."""
    if not disinterested:
        return list(ms)
    return [m for m in ms if not m.is_attack or m.attack_kind in ADMISSIBLE_KINDS]


def attack_ratio(p: Play, attacker: int = 1) -> Fraction:
    """Share of the attacker's attacks that are both admissible and unanswered.

    An attack-free play counts as ratio 0: nothing stands against the
    defended history.
    """
    attacks = [m for m in p.moves() if m.player == attacker and m.is_attack]
    if not attacks:
        return Fraction(0)
    good = [m for m in attacks if m.attack_kind in ADMISSIBLE_KINDS and m.answered_by is None]
    return Fraction(len(good), len(attacks))


def estimate_limit_win(
    ps: Sequence[Play],
    window: int,
    epsilon: Fraction,
    horizon: int,
) -> str:
    """Finite-horizon read of the vanishing-attack-ratio condition.

    Over the trailing window of prefix ratios: nonincreasing and ending
    below epsilon counts as a win for the defender; bounded away from
    epsilon and nondecreasing counts as a loss; anything else is undecided.
    """
    if window < 1 or horizon < 1:
        raise ValueError("window and horizon must be positive")
    if len(ps) < horizon:
        raise ValueError("horizon exceeds available prefixes")
    ratios = [attack_ratio(p) for p in ps[:horizon]]
    tail = ratios[max(0, horizon - window) : horizon]
    nonincreasing = all(a >= b for a, b in zip(tail, tail[1:]))
    nondecreasing = all(a <= b for a, b in zip(tail, tail[1:]))
    if nonincreasing and tail[-1] < epsilon:
        return WIN_E
    if nondecreasing and min(tail) >= epsilon:
        return NOT_WIN_E
    return UNDECIDED


def discounted_score(p: Play, gamma: Fraction, scorer: Callable[[Move], Fraction]) -> Fraction:
    """Geometrically discounted sum of per-move scores, exact."""
    gamma = Fraction(gamma)
    if not 0 <= gamma < 1:
        raise ValueError("gamma must lie in [0, 1)")
    total = Fraction(0)
    weight = Fraction(1)
    for m in p.moves():
        total += weight * Fraction(scorer(m))
        weight *= gamma
    return total


def external_truth_win(
    hs: Sequence[tuple[History, History]],
    margin: Fraction,
    horizon: int,
) -> bool:
    """Reference-tracking win: distance within margin over the final quarter."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if len(hs) < horizon:
        raise ValueError("horizon exceeds available prefixes")
    window = math.ceil(horizon / 4)
    tail = hs[horizon - window : horizon]
    return all(history_distance(ref, mine) <= margin for ref, mine in tail)


# ---------------------------------------------------------------------------
# Winning-condition specifications


@dataclass(frozen=True)
class WinSpec:
    """Declarative winning condition, evaluable on finite plays.

    kind: const | last_speaker | played | posterior_threshold | limit_ratio
    | discounted.  Limit and discounted kinds return None (undecided) below
    their horizon.
    """

    kind: str
    params: tuple[tuple[str, object], ...] = ()

    @staticmethod
    def make(kind: str, **params: object) -> "WinSpec":
        return WinSpec(kind, tuple(sorted(params.items())))

    def param(self, name: str, default: object = None) -> object:
        for k, v in self.params:
            if k == name:
                return v
        return default


COMPLEMENT = WinSpec("complement")


@dataclass(frozen=True)
class Jury:
    """Evaluator of plays: one winning condition per player.

    When `win_lose` is set, player 1's condition is the complement of
    player 0's.  `type_space` backs posterior-threshold conditions.
    """

    win0: WinSpec
    win1: WinSpec = COMPLEMENT
    win_lose: bool = False
    type_space: Optional[object] = None
    scores: Mapping[str, Mapping[int, Fraction]] = field(default_factory=dict)

    def member(self, p: Play, player: int) -> Optional[bool]:
        """Three-valued membership of a play in a player's winning set."""
        spec = self.win0 if player == 0 else self.win1
        if spec.kind == "complement":
            base = self.member(p, 0)
            return None if base is None else not base
        return _eval_winspec(spec, p, self.type_space)


def _eval_winspec(spec: WinSpec, p: Play, type_space: Optional[object]) -> Optional[bool]:
    if spec.kind == "const":
        return bool(spec.param("value"))
    if spec.kind == "last_speaker":
        if not p.turns:
            return None  # nobody has spoken; undecided either way
        return p.turns[-1].player == spec.param("player")
    if spec.kind == "played":
        payloads = spec.param("payload")
        wanted = (payloads,) if isinstance(payloads, str) else tuple(payloads)
        count = sum(
            1 for m in p.moves() if m.player == spec.param("player") and m.payload in wanted
        )
        return count >= int(spec.param("min_count", 1))
    if spec.kind == "posterior_threshold":
        if type_space is None:
            raise ValueError("posterior_threshold needs a type space")
        from .epistemic import posterior_type_marginal

        marginal = posterior_type_marginal(
            type_space, str(spec.param("jury_type")), p, int(spec.param("player"))
        )
        if marginal is None:
            return False
        mass = marginal.weights.get(str(spec.param("player_type")), Fraction(0))
        threshold = Fraction(spec.param("threshold"))
        return mass > threshold if spec.param("strict", True) else mass >= threshold
    if spec.kind == "limit_ratio":
        horizon = int(spec.param("horizon"))
        if len(p) < horizon:
            return None
        prefixes = [p.prefix(i) for i in range(1, len(p) + 1)]
        verdict = estimate_limit_win(
            prefixes, int(spec.param("window")), Fraction(spec.param("epsilon")), horizon
        )
        return {WIN_E: True, NOT_WIN_E: False, UNDECIDED: None}[verdict]
    if spec.kind == "discounted":
        horizon = int(spec.param("horizon"))
        if len(p) < horizon:
            return None
        table = dict(spec.param("scores"))
        score = discounted_score(
            p, Fraction(spec.param("gamma")), lambda m: Fraction(table.get(m.payload, 0))
        )
        return score >= Fraction(spec.param("threshold"))
    raise ValueError(f"unknown winning-condition kind: {spec.kind!r}")


def evaluate_win(j: Jury, p: Play) -> str:
    """Verdict for a finite play: win_0, win_1 or undecided."""
    m0 = j.member(p, 0)
    m1 = j.member(p, 1)
    if m0 and not m1:
        return WIN_0
    if m1 and not m0:
        return WIN_1
    return UNDECIDED


# ---------------------------------------------------------------------------
# Finite game trees


@dataclass(frozen=True)
class GameTree:
    """Finite alternating tree: branching by turn alternatives, win-lose leaves.

    `next_turns` yields the legal alternatives at a node (empty at forced
    leaves); `classify` labels a leaf play with the winning player.
    """

    root: Play
    next_turns: Callable[[Play], Sequence[Turn]]
    depth: int
    classify: Callable[[Play], int]

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")


def uniform_tree(
    opener: int,
    options: Mapping[int, Sequence[str]],
    depth: int,
    classify: Callable[[Play], int],
    root: Play = EMPTY_PLAY,
) -> GameTree:
    """Tree whose mover alternates from `opener` with constant payload menus."""

    def next_turns(p: Play) -> list[Turn]:
        if len(p) - len(root) >= depth:
            return []
        mover = opener if not p.turns else 1 - p.turns[-1].player
        return [turn(mover, [payload]) for payload in options[mover]]

    return GameTree(root, next_turns, depth, classify)


def solve_finite(t: GameTree) -> tuple[int, dict[tuple[Turn, ...], Turn]]:
    """Backward induction over a finite win-lose tree.

    Returns the player holding a winning strategy and, for every node where
    that player moves, the turn to play (first winning alternative, so the
    result is deterministic).
    """
    strategy: dict[tuple[Turn, ...], Turn] = {}

    def value(p: Play, depth: int) -> int:
        alternatives = list(t.next_turns(p)) if depth < t.depth else []
        if not alternatives:
            winner = t.classify(p)
            if winner not in (0, 1):
                raise ValueError("non-win-lose classification")
            return winner
        mover = alternatives[0].player
        best: Optional[int] = None
        for alt in alternatives:
            outcome = value(extend(p, alt), depth + 1)
            if outcome == mover:
                node = p.turns[len(t.root.turns) :]
                strategy.setdefault(node, alt)
                return mover
            best = outcome
        assert best is not None
        return best

    winner = value(t.root, 0)
    # Keep only the winner's nodes in the emitted strategy.
    pruned = {
        node: move for node, move in strategy.items() if move.player == winner
    }
    return winner, pruned
