"""Scenario documents: a declarative JSON format plus packaged examples.

A scenario bundles the discourse material (units, CDUs, explicit histories,
underspecified forms), the type space (player and jury types, strategy
tables, exact-rational priors, interpretation kernels), the scripted rounds
and the jury.  Probabilities must be exact rationals (`{"num": N, "den": D}`
or integers); floats are rejected outright.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Mapping, Optional

from .discourse import (
    Cdu,
    CompletionReport,
    Edu,
    History,
    RelationInstance,
    UnderspecifiedForm,
    enumerate_completions,
)
from .epistemic import Distribution, StrategyTable, TypeSpace
from .game import GameTree, Jury, Play, Turn, WinSpec, extend, turn

BUILTIN_NAMES = ("sheehan", "lepen", "march_for_science", "truth_toy")


class ScenarioError(ValueError):
    """A scenario document failed to parse or validate."""


@dataclass(frozen=True)
class GameSpec:
    """A loaded scenario: everything needed to simulate and analyze it."""

    name: str
    units: tuple[Edu, ...]
    cdus: tuple[Cdu, ...]
    histories: Mapping[str, History]
    ulfs: Mapping[str, UnderspecifiedForm]
    type_space: TypeSpace
    script: tuple[tuple[Turn, ...], ...]
    jury: Jury
    designated_player: int
    moves: Mapping[int, tuple[str, ...]]
    completion_reports: Mapping[str, CompletionReport] = field(default_factory=dict)

    def completions(self, ulf_id: str) -> CompletionReport:
        try:
            return self.completion_reports[ulf_id]
        except KeyError:
            raise ScenarioError(f"unknown ULF: {ulf_id!r}") from None

    def first_ulf(self) -> Optional[str]:
        return next(iter(self.ulfs), None)

    def solve_tree(self, depth: int) -> GameTree:
        """Finite tree over the scripted turn order with the jury as judge."""
        order = [t.player for rnd in self.script for t in rnd]
        if depth > len(order):
            raise ScenarioError(f"depth {depth} exceeds the {len(order)} scripted turns")
        if depth < 1:
            raise ScenarioError("depth must be positive")
        if not self.jury.win_lose:
            raise ValueError("non-win-lose classification")
        menus = self.moves

        def next_turns(p: Play) -> list[Turn]:
            i = len(p)
            if i >= depth:
                return []
            return [turn(order[i], [payload]) for payload in menus[order[i]]]

        def classify(p: Play) -> int:
            verdict = self.jury.member(p, 0)
            if verdict is None:
                raise ValueError("non-win-lose classification")
            return 0 if verdict else 1

        return GameTree(Play(), next_turns, depth, classify)


# ---------------------------------------------------------------------------
# Rational parsing


def _rat(value: object, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ScenarioError(f"{where}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ScenarioError(f"{where}: floats are rejected, use {{\"num\": N, \"den\": D}}")
    if isinstance(value, dict) and set(value) == {"num", "den"}:
        num, den = value["num"], value["den"]
        if isinstance(num, int) and isinstance(den, int) and den != 0:
            return Fraction(num, den)
    raise ScenarioError(f"{where}: expected a rational, got {value!r}")


def _rat_json(value: Fraction) -> object:
    value = Fraction(value)
    if value.denominator == 1:
        return int(value)
    return {"num": value.numerator, "den": value.denominator}


def _relation(obj: dict, where: str) -> RelationInstance:
    try:
        return RelationInstance(obj["relation"], obj["source"], obj["target"])
    except (KeyError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from None


# ---------------------------------------------------------------------------
# Loading


def load_scenario(doc: str | Mapping) -> GameSpec:
    """Parse and fully validate a scenario document (JSON text or mapping)."""
    if isinstance(doc, str):
        try:
            raw = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ScenarioError(
                f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    else:
        raw = dict(doc)
    if not isinstance(raw, dict):
        raise ScenarioError("scenario document must be a JSON object")

    name = raw.get("name", "scenario")

    units: list[Edu] = []
    for u in raw.get("units", []):
        units.append(
            Edu(
                id=u["id"],
                speaker=int(u["speaker"]),
                label=u.get("label", ""),
                commitments=frozenset(u.get("commitments", [])),
            )
        )
    unit_ids = [u.id for u in units]
    if len(set(unit_ids)) != len(unit_ids):
        raise ScenarioError("duplicate unit id")

    cdus: list[Cdu] = []
    for c in raw.get("cdus", []):
        cdus.append(Cdu(id=c["id"], members=frozenset(c["members"])))
    all_ids = set(unit_ids) | {c.id for c in cdus}
    if len(all_ids) != len(unit_ids) + len(cdus):
        raise ScenarioError("duplicate unit id")
    by_id: dict[str, Edu | Cdu] = {u.id: u for u in units}
    by_id.update({c.id: c for c in cdus})
    for c in cdus:
        for m in c.members:
            if m not in all_ids:
                raise ScenarioError(f"CDU {c.id}: dangling member {m!r}")

    def closure(ids: set[str], where: str) -> tuple[Edu | Cdu, ...]:
        """Units plus every CDU member, transitively, in declaration order."""
        seen: set[str] = set()
        frontier = list(ids)
        while frontier:
            uid = frontier.pop()
            if uid in seen:
                continue
            if uid not in by_id:
                raise ScenarioError(f"{where}: dangling reference {uid!r}")
            seen.add(uid)
            unit = by_id[uid]
            if isinstance(unit, Cdu):
                frontier.extend(unit.members)
        ordered = [u for u in units if u.id in seen]
        ordered += [c for c in cdus if c.id in seen]
        return tuple(ordered)

    histories: dict[str, History] = {}
    for hname, rels in raw.get("relations", {}).items():
        instances = tuple(_relation(r, f"history {hname}") for r in rels)
        ids = {r.source for r in instances} | {r.target for r in instances}
        histories[hname] = History(closure(ids, f"history {hname}"), instances)

    ulfs: dict[str, UnderspecifiedForm] = {}
    for uname, u in raw.get("ulfs", {}).items():
        order = tuple(u.get("order", []))
        fixed = tuple(_relation(r, f"ulf {uname}") for r in u.get("fixed", []))
        slots = tuple(
            tuple(_relation(r, f"ulf {uname} slot {i}") for r in slot)
            for i, slot in enumerate(u.get("slots", []))
        )
        referenced = set(order)
        for r in fixed + tuple(c for slot in slots for c in slot):
            referenced.add(r.source)
            referenced.add(r.target)
        ulf_units = closure(referenced, f"ulf {uname}")
        in_order = set(order)
        for unit in ulf_units:
            if isinstance(unit, Edu) and unit.id not in in_order:
                raise ScenarioError(f"ulf {uname}: unit {unit.id!r} not in order")
        for uid in order:
            if uid not in by_id or not isinstance(by_id[uid], Edu):
                raise ScenarioError(f"ulf {uname}: order entry {uid!r} is not a known EDU")
        try:
            ulfs[uname] = UnderspecifiedForm(uname, order, ulf_units, fixed, slots)
        except ValueError as exc:
            raise ScenarioError(f"ulf {uname}: {exc}") from None

    types = raw.get("types", {})
    player_types = tuple(tuple(ts) for ts in types.get("players", []))
    if len(player_types) != 2 or not all(player_types):
        raise ScenarioError("types.players must list nonempty type sets for both players")
    jury_types = tuple(types.get("jury", []))
    if not jury_types:
        raise ScenarioError("types.jury must be nonempty")

    tables: tuple[list[StrategyTable], list[StrategyTable]] = ([], [])
    for s in raw.get("strategies", []):
        owner = int(s["owner"])
        if owner not in (0, 1):
            raise ScenarioError(f"strategy {s.get('id')}: owner must be 0 or 1")
        moves = {int(r): p for r, p in s.get("moves", {}).items()}
        try:
            table = StrategyTable(s["id"], owner, moves)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        for payloads in table.moves.values():
            for payload in payloads:
                if payload not in by_id:
                    raise ScenarioError(
                        f"strategy {table.id}: unknown payload {payload!r}"
                    )
        tables[owner].append(table)
    table_ids = ({t.id for t in tables[0]}, {t.id for t in tables[1]})

    priors: dict[str, Distribution] = {}
    for jt in jury_types:
        entries = raw.get("priors", {}).get(jt)
        if entries is None:
            raise ScenarioError(f"missing prior for jury type {jt!r}")
        weights: dict[tuple[str, str, str, str], Fraction] = {}
        total = Fraction(0)
        for e in entries:
            t0, t1 = e["types"]
            s0, s1 = e["strategies"]
            if t0 not in player_types[0] or t1 not in player_types[1]:
                raise ScenarioError(f"prior for {jt}: unknown type in {e['types']}")
            if s0 not in table_ids[0] or s1 not in table_ids[1]:
                raise ScenarioError(f"prior for {jt}: unknown strategy in {e['strategies']}")
            outcome = (t0, s0, t1, s1)
            if outcome in weights:
                raise ScenarioError(f"prior for {jt}: repeated outcome {outcome}")
            w = _rat(e["p"], f"prior for {jt}")
            weights[outcome] = w
            total += w
        if total != 1:
            raise ScenarioError(f"prior for {jt} sums to {total}, not 1")
        priors[jt] = Distribution(weights)

    completion_reports = {uname: enumerate_completions(u) for uname, u in ulfs.items()}

    kernels: dict[tuple[str, tuple[str, str], str], Distribution] = {}
    for k in raw.get("kernels", []):
        jt = k["jury_type"]
        t0, t1 = k["types"]
        uname = k["ulf"]
        if jt not in jury_types:
            raise ScenarioError(f"kernel: unknown jury type {jt!r}")
        if t0 not in player_types[0] or t1 not in player_types[1]:
            raise ScenarioError(f"kernel: unknown type in {k['types']}")
        if uname not in ulfs:
            raise ScenarioError(f"kernel: unknown ULF {uname!r}")
        n = len(completion_reports[uname].histories)
        weights = {}
        total = Fraction(0)
        for idx, p in k["over"].items():
            i = int(idx)
            if not 0 <= i < n:
                raise ScenarioError(
                    f"kernel for {jt}/{uname}: completion index {i} out of range (0..{n - 1})"
                )
            w = _rat(p, f"kernel for {jt}/{uname}")
            weights[i] = w
            total += w
        if total != 1:
            raise ScenarioError(f"kernel for {jt}/{uname} sums to {total}, not 1")
        key = (jt, (t0, t1), uname)
        if key in kernels:
            raise ScenarioError(f"kernel repeated for {key}")
        kernels[key] = Distribution(weights)
    for jt in jury_types:
        for t0, t1 in itertools.product(*player_types):
            for uname in ulfs:
                if (jt, (t0, t1), uname) not in kernels:
                    raise ScenarioError(
                        f"kernel gap: no entry for ({jt}, ({t0}, {t1}), {uname})"
                    )

    type_space = TypeSpace(
        player_types=player_types,
        jury_types=jury_types,
        strategy_tables=(tuple(tables[0]), tuple(tables[1])),
        priors=priors,
        interpretation_kernel=kernels,
    )

    menus_raw = raw.get("moves")
    if menus_raw is None:
        menus = {
            0: tuple(u.id for u in units if u.speaker == 0),
            1: tuple(u.id for u in units if u.speaker == 1),
        }
    else:
        menus = {int(p): tuple(ids) for p, ids in menus_raw.items()}
        for p in (0, 1):
            for payload in menus.get(p, ()):
                if payload not in by_id:
                    raise ScenarioError(f"moves for player {p}: unknown payload {payload!r}")
        menus = {0: menus.get(0, ()), 1: menus.get(1, ())}

    script: list[tuple[Turn, ...]] = []
    replay = Play()
    for rno, rnd in enumerate(raw.get("script", []), start=1):
        round_turns = []
        for t in rnd:
            player = int(t["player"])
            payloads = t["moves"]
            for payload in payloads:
                if payload not in by_id:
                    raise ScenarioError(f"script round {rno}: unknown payload {payload!r}")
            tn = turn(player, payloads)
            try:
                replay = extend(replay, tn)
            except ValueError as exc:
                raise ScenarioError(f"script round {rno}: {exc}") from None
            round_turns.append(tn)
        script.append(tuple(round_turns))

    jury_raw = raw.get("jury", {})
    win_raw = jury_raw.get("win", {})
    win_lose = bool(win_raw.get("win_lose", False))
    win0 = _parse_winspec(win_raw.get("win0"), "jury.win.win0")
    if win_lose or "win1" not in win_raw:
        win1 = WinSpec("complement")
    else:
        win1 = _parse_winspec(win_raw.get("win1"), "jury.win.win1")
    scores: dict[str, dict[int, Fraction]] = {}
    for jt, row in jury_raw.get("scores", {}).items():
        if jt not in jury_types:
            raise ScenarioError(f"scores: unknown jury type {jt!r}")
        scores[jt] = {int(idx): _rat(v, f"score for {jt}") for idx, v in row.items()}
    jury = Jury(win0=win0, win1=win1, win_lose=win_lose, type_space=type_space, scores=scores)

    designated = int(raw.get("designated_player", 1))
    if designated not in (0, 1):
        raise ScenarioError("designated_player must be 0 or 1")

    return GameSpec(
        name=name,
        units=tuple(units),
        cdus=tuple(cdus),
        histories=histories,
        ulfs=ulfs,
        type_space=type_space,
        script=tuple(script),
        jury=jury,
        designated_player=designated,
        moves=menus,
        completion_reports=completion_reports,
    )


def _parse_winspec(obj: object, where: str) -> WinSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ScenarioError(f"{where}: missing winning-condition kind")
    kind = obj["kind"]
    params: dict[str, object] = {}
    if kind == "const":
        params["value"] = bool(obj.get("value", False))
    elif kind == "last_speaker":
        params["player"] = int(obj["player"])
    elif kind == "played":
        payload = obj["payload"]
        params["payload"] = payload if isinstance(payload, str) else tuple(payload)
        params["player"] = int(obj["player"])
        params["min_count"] = int(obj.get("min_count", 1))
    elif kind == "posterior_threshold":
        params["jury_type"] = obj["jury_type"]
        params["player"] = int(obj["player"])
        params["player_type"] = obj["player_type"]
        params["threshold"] = _rat(obj["threshold"], where)
        params["strict"] = bool(obj.get("strict", True))
    elif kind == "limit_ratio":
        params["epsilon"] = _rat(obj["epsilon"], where)
        params["window"] = int(obj["window"])
        params["horizon"] = int(obj["horizon"])
    elif kind == "discounted":
        params["gamma"] = _rat(obj["gamma"], where)
        params["threshold"] = _rat(obj["threshold"], where)
        params["horizon"] = int(obj["horizon"])
        params["scores"] = tuple(
            sorted((payload, _rat(v, where)) for payload, v in obj["scores"].items())
        )
    else:
        raise ScenarioError(f"{where}: unknown winning-condition kind {kind!r}")
    return WinSpec.make(kind, **params)


# ---------------------------------------------------------------------------
# Serialization (inverse of load_scenario, for round-trip checks and export)


def serialize_scenario(spec: GameSpec) -> dict:
    doc: dict = {"name": spec.name}
    doc["units"] = [
        {
            "id": u.id,
            "speaker": u.speaker,
            "label": u.label,
            "commitments": sorted(u.commitments),
        }
        for u in spec.units
    ]
    doc["cdus"] = [{"id": c.id, "members": sorted(c.members)} for c in spec.cdus]
    doc["relations"] = {
        name: [
            {"relation": r.relation, "source": r.source, "target": r.target}
            for r in h.relations
        ]
        for name, h in spec.histories.items()
    }
    doc["ulfs"] = {
        name: {
            "order": list(u.order),
            "fixed": [
                {"relation": r.relation, "source": r.source, "target": r.target}
                for r in u.fixed_relations
            ],
            "slots": [
                [
                    {"relation": r.relation, "source": r.source, "target": r.target}
                    for r in slot
                ]
                for slot in u.slots
            ],
        }
        for name, u in spec.ulfs.items()
    }
    ts = spec.type_space
    doc["types"] = {"players": [list(ts.player_types[0]), list(ts.player_types[1])], "jury": list(ts.jury_types)}
    doc["strategies"] = [
        {
            "id": t.id,
            "owner": owner,
            "moves": {str(r): list(p) for r, p in sorted(t.moves.items())},
        }
        for owner in (0, 1)
        for t in ts.strategy_tables[owner]
    ]
    doc["priors"] = {
        jt: [
            {
                "types": [o[0], o[2]],
                "strategies": [o[1], o[3]],
                "p": _rat_json(w),
            }
            for o, w in sorted(dist.weights.items())
        ]
        for jt, dist in ts.priors.items()
    }
    doc["kernels"] = [
        {
            "jury_type": jt,
            "types": list(types),
            "ulf": uname,
            "over": {str(i): _rat_json(w) for i, w in sorted(dist.weights.items())},
        }
        for (jt, types, uname), dist in sorted(ts.interpretation_kernel.items())
    ]
    doc["script"] = [
        [{"player": t.player, "moves": list(t.payloads)} for t in rnd] for rnd in spec.script
    ]
    doc["jury"] = {
        "win": _winspec_json(spec.jury),
        "scores": {
            jt: {str(i): _rat_json(v) for i, v in sorted(row.items())}
            for jt, row in spec.jury.scores.items()
        },
    }
    doc["designated_player"] = spec.designated_player
    doc["moves"] = {str(p): list(spec.moves[p]) for p in (0, 1)}
    return doc


def _winspec_json(jury: Jury) -> dict:
    def one(spec: WinSpec) -> dict:
        out: dict = {"kind": spec.kind}
        for k, v in spec.params:
            if isinstance(v, Fraction):
                out[k] = _rat_json(v)
            elif spec.kind == "discounted" and k == "scores":
                out[k] = {payload: _rat_json(w) for payload, w in v}
            elif isinstance(v, tuple):
                out[k] = list(v)
            else:
                out[k] = v
        return out

    win: dict = {"win_lose": jury.win_lose, "win0": one(jury.win0)}
    if not jury.win_lose and jury.win1.kind != "complement":
        win["win1"] = one(jury.win1)
    return win


# ---------------------------------------------------------------------------
# Packaged scenarios


def builtin(name: str) -> GameSpec:
    """Load one of the packaged scenarios by name."""
    if name not in BUILTIN_NAMES:
        raise ScenarioError(
            f"unknown scenario {name!r}; valid names: {', '.join(BUILTIN_NAMES)}"
        )
    text = resources.files("megames.data").joinpath(f"{name}.json").read_text("utf-8")
    return load_scenario(text)


def resolve(path_or_name: str) -> GameSpec:
    """Treat the argument as a builtin name, else as a path to a document."""
    if path_or_name in BUILTIN_NAMES:
        return builtin(path_or_name)
    try:
        with open(path_or_name, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from None
    return load_scenario(text)
