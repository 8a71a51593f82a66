"""Command-line front end.

Subcommands: run (belief trajectories), check (analysis predicates),
enumerate (ULF completions), agree (agreement-dynamics sweep) and solve
(finite game solving).  Data goes to stdout (CSV or JSON lines),
diagnostics to stderr; `--plot` renders the matching figure to a file.

Exit codes: 0 success or positive check, 1 negative check, 2 input or
usage error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction

from . import analysis
from .discourse import validate_history
from .epistemic import run_rounds
from .game import solve_finite
from .scenarios import BUILTIN_NAMES, GameSpec, ScenarioError, resolve


def _fail(message: str) -> int:
    print(message, file=sys.stderr)
    return 2


def _jury_type(spec: GameSpec, requested: str | None) -> str:
    if requested is None:
        return spec.type_space.jury_types[0]
    if requested not in spec.type_space.jury_types:
        raise ScenarioError(
            f"unknown jury type {requested!r}; valid: {', '.join(spec.type_space.jury_types)}"
        )
    return requested


def _ulf_id(spec: GameSpec, requested: str | None) -> str:
    if requested is None:
        first = spec.first_ulf()
        if first is None:
            raise ScenarioError("scenario declares no ULF")
        return first
    if requested not in spec.ulfs:
        raise ScenarioError(f"unknown ULF: {requested!r}")
    return requested


def cmd_run(args: argparse.Namespace) -> int:
    spec = resolve(args.scenario)
    jt = _jury_type(spec, args.jury_type)
    trajectory = run_rounds(spec, jt, args.rounds)
    player_types = spec.type_space.player_types[spec.designated_player]
    rows = trajectory.csv_rows(player_types)
    if args.format == "csv":
        print("round,jury_type,player_type,probability_num,probability_den,probability_float")
        for rnd, jury, ptype, num, den, value in rows:
            print(f"{rnd},{jury},{ptype},{num},{den},{value!r}")
    else:
        for rnd, jury, ptype, num, den, value in rows:
            row = {
                "round": rnd,
                "jury_type": jury,
                "player_type": ptype,
                "probability": {"num": num, "den": den},
                "probability_float": value,
            }
            print(json.dumps(row, sort_keys=True))
    if args.plot:
        from .plotting import render_trajectory

        render_trajectory(trajectory, args.plot, title=spec.name)
        print(f"wrote figure: {args.plot}", file=sys.stderr)
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    spec = resolve(args.scenario)
    report: dict
    if args.kind == "disinterested":
        jt = _jury_type(spec, args.jury_type)
        result = analysis.is_disinterested(spec, jt, args.maxlen)
        report = {"kind": "disinterested", "jury_type": jt, "maxlen": args.maxlen}
        report.update(result.as_dict())
        ok = result.verdict == "necessary-conditions-met"
    elif args.kind == "ambiguity":
        jt = _jury_type(spec, args.jury_type)
        ulf = _ulf_id(spec, args.ulf)
        ambiguous = analysis.is_ambiguous(spec, jt, ulf)
        report = {"kind": "ambiguity", "jury_type": jt, "ulf": ulf, "ambiguous": ambiguous}
        ok = ambiguous
    elif args.kind == "dogwhistle":
        jt = _jury_type(spec, args.jury_type)
        ulf = _ulf_id(spec, args.ulf)
        witness = analysis.is_dog_whistle(spec, jt, ulf, args.grammar)
        report = {
            "kind": "dogwhistle",
            "jury_type": jt,
            "ulf": ulf,
            "grammar_history": args.grammar,
            "witness": None
            if witness is None
            else {
                "loaded_history": witness.loaded_history,
                "grammar_history": witness.grammar_history,
                "affected_jury": witness.affected_jury,
                "denial_available": witness.denial_available,
            },
        }
        ok = witness is not None
    else:  # coherence
        histories = {}
        all_ok = True
        for name, h in spec.histories.items():
            violations = list(validate_history(h).violations)
            histories[name] = violations
            all_ok = all_ok and not violations
        ulfs = {}
        for name in spec.ulfs:
            rep = spec.completions(name)
            ulfs[name] = {
                "completions": len(rep.histories),
                "raw": rep.raw_count,
                "dropped": [
                    {"choice": list(choice), "violation": violation}
                    for choice, violation in rep.dropped
                ],
            }
        report = {"kind": "coherence", "histories": histories, "ulfs": ulfs, "coherent": all_ok}
        ok = all_ok
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if ok else 1


def cmd_enumerate(args: argparse.Namespace) -> int:
    spec = resolve(args.scenario)
    ulf_id = _ulf_id(spec, args.ulf)
    ulf = spec.ulfs[ulf_id]
    rep = spec.completions(ulf_id)
    live_by_jt: dict[int, list[str]] = {}
    for jt in spec.type_space.jury_types:
        for idx in analysis.live_completions(spec, jt, ulf_id):
            live_by_jt.setdefault(idx, []).append(jt)
    by_choice: dict[tuple[int, ...], tuple[str, int | None]] = {}
    for i, h in enumerate(rep.histories):
        assert h.provenance is not None
        by_choice[h.provenance[1]] = ("coherent", i)
    for choice, violation in rep.dropped:
        by_choice[choice] = (f"dropped: {violation}", None)
    for choice in itertools.product(*[range(len(s)) for s in ulf.slots]):
        status, idx = by_choice[choice]
        names = ",".join(ulf.slots[i][pick].relation for i, pick in enumerate(choice)) or "-"
        live = ",".join(live_by_jt.get(idx, [])) if idx is not None else ""
        print(f"{idx if idx is not None else '-'}\t{names}\t{status}\t{live or '-'}")
    if rep.dropped:
        print(f"dropped {len(rep.dropped)} of {rep.raw_count} combinations", file=sys.stderr)
    if args.dot:
        import os

        os.makedirs(args.dot, exist_ok=True)
        for i, h in enumerate(rep.histories):
            path = os.path.join(args.dot, f"{spec.name}_{ulf_id}_{i}.dot")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(h.to_dot() + "\n")
        print(f"wrote {len(rep.histories)} dot files to {args.dot}", file=sys.stderr)
    return 0


def _ground_profiles(facts: list[str]) -> list[dict[str, str]]:
    profiles: list[dict[str, str]] = [{}]
    for f in facts:
        profiles.append({f: "solid"})
        profiles.append({f: "attackable"})
    everything = {f: "attackable" for f in facts}
    if everything not in profiles:
        profiles.append(everything)
    return profiles


def cmd_agree(args: argparse.Namespace) -> int:
    resolve(args.scenario)  # validate the scenario even though the sweep is parametric
    step = Fraction(args.grid)
    if not 0 < step <= 1:
        raise ScenarioError("grid step must lie in (0, 1]")
    facts = [f"f{i}" for i in range(1, args.facts + 1)]
    ti = (args.not_truth_interested != 0, args.not_truth_interested != 1)
    grid = []
    value = Fraction(0)
    while value <= 1:
        grid.append(value)
        value += step
    profiles = _ground_profiles(facts)
    instances = agreed = skipped = 0
    max_used = 0
    points: list[tuple[float, float, bool]] = []
    for p0, p1 in itertools.product(grid, grid):
        for g0, g1 in itertools.product(profiles, profiles):
            opposite = (p0 > Fraction(1, 2) and p1 < Fraction(1, 2)) or (
                p0 < Fraction(1, 2) and p1 > Fraction(1, 2)
            )
            if opposite and "solid" in g0.values() and "solid" in g1.values():
                skipped += 1
                continue
            outcome = analysis.simulate_agreement(
                facts, p0, p1, ti, {0: g0, 1: g1}, args.max_rounds
            )
            instances += 1
            if outcome.agreed:
                agreed += 1
                max_used = max(max_used, outcome.rounds_used)
            points.append((float(p0), float(p1), outcome.agreed))
    rate = Fraction(agreed, instances) if instances else Fraction(0)
    report = {
        "facts": args.facts,
        "grid_step": str(step),
        "truth_interested": list(ti),
        "instances": instances,
        "agreed": agreed,
        "skipped_contradictory": skipped,
        "agreement_rate": f"{rate.numerator}/{rate.denominator}",
        "agreement_rate_float": float(rate),
        "max_rounds_used": max_used,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.plot:
        from .plotting import render_agreement_grid

        render_agreement_grid(points, args.plot, title=f"agreement sweep ({args.facts} facts)")
        print(f"wrote figure: {args.plot}", file=sys.stderr)
    return 0 if rate == 1 else 1


def cmd_solve(args: argparse.Namespace) -> int:
    spec = resolve(args.scenario)
    tree = spec.solve_tree(args.depth)
    winner, strategy = solve_finite(tree)
    rows = []
    for node, t in strategy.items():
        path = "/".join(f"{x.player}:{'+'.join(x.payloads)}" for x in node) or "<root>"
        rows.append({"after": path, "play": {"player": t.player, "moves": list(t.payloads)}})
    rows.sort(key=lambda r: r["after"])
    print(json.dumps({"winner": winner, "strategy": rows}, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="megames",
        description="Simulate and analyze epistemic message-exchange games over discourse graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scenario_help = f"scenario path or builtin name ({', '.join(BUILTIN_NAMES)})"

    p = sub.add_parser("run", help="replay scripted rounds and emit the belief trajectory")
    p.add_argument("scenario", help=scenario_help)
    p.add_argument("--jury-type", default=None)
    p.add_argument("--rounds", type=int, default=2)
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--plot", default=None, help="also render the trajectory figure to this file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="run an analysis predicate and report JSON")
    p.add_argument("kind", choices=("disinterested", "dogwhistle", "ambiguity", "coherence"))
    p.add_argument("scenario", help=scenario_help)
    p.add_argument("--jury-type", default=None)
    p.add_argument("--ulf", default=None)
    p.add_argument("--grammar", type=int, default=0, help="grammar completion index (dogwhistle)")
    p.add_argument("--maxlen", type=int, default=3, help="play length bound (disinterested)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", help="list the completions of an underspecified form")
    p.add_argument("scenario", help=scenario_help)
    p.add_argument("--ulf", default=None)
    p.add_argument("--dot", default=None, help="write one dot file per coherent completion")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("agree", help="sweep agreement dynamics over a prior grid")
    p.add_argument("scenario", help=scenario_help)
    p.add_argument("--max-rounds", type=int, default=10)
    p.add_argument("--grid", default="1/10", help="prior grid step, e.g. 1/10")
    p.add_argument("--facts", type=int, default=2)
    p.add_argument(
        "--not-truth-interested",
        type=int,
        choices=(0, 1),
        default=None,
        help="make one player ignore the revision rules",
    )
    p.add_argument("--plot", default=None, help="render the sweep as a figure to this file")
    p.set_defaults(func=cmd_agree)

    p = sub.add_parser("solve", help="solve the scripted game to a given depth")
    p.add_argument("scenario", help=scenario_help)
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(func=cmd_solve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError, OSError) as exc:
        return _fail(f"error: {exc}")


if __name__ == "__main__":
    sys.exit(main())
