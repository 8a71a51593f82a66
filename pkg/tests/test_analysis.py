from __future__ import annotations

import itertools
import json
from fractions import Fraction

import pytest

from megames import (
    DefenseScript,
    Edu,
    EvidenceOutcome,
    History,
    Move,
    RelationInstance,
    builtin,
    e_defensible,
    entails,
    is_ambiguous,
    is_disinterested,
    is_dog_whistle,
    is_predictive,
    liminf_update,
    load_scenario,
    simulate_agreement,
    truth_interested_update,
    two_history_outcome,
)
from megames.analysis import (
    BOTH_LOSE,
    CONFIRMATION_SURVIVES,
    E_WINS,
    NO_SURVIVING_CONFIRMATION,
    SIDE_CON,
    SIDE_PRO,
    SIDE_SPLIT,
    UNREBUTTED_REFUTATION,
    A_WINS,
)
from tests.conftest import minimal_doc

F = Fraction


class TestAmbiguity:
    def test_sheehan_is_ambiguous_for_the_unbiased_jury(self):
        assert is_ambiguous(builtin("sheehan"), "tj_U", "rho")

    def test_single_completion_is_not_ambiguous(self):
        assert not is_ambiguous(builtin("truth_toy"), "tj", "link")

    def test_entailing_pair_is_not_ambiguous(self):
        # Both lepen readings are live for the nationalist audience, but the
        # loaded one entails the grammatical one.
        assert not is_ambiguous(builtin("lepen"), "tj_nat", "lead")

    def test_concentrated_kernel_is_not_ambiguous(self):
        assert not is_ambiguous(builtin("sheehan"), "tj_B", "rho")


class TestDogWhistle:
    def test_lepen_yields_a_witness(self):
        spec = builtin("lepen")
        witness = is_dog_whistle(spec, "tj_nat", "lead", 0)
        assert witness is not None
        assert witness.loaded_history == 1
        assert witness.grammar_history == 0
        assert witness.affected_jury == "tj_nat"
        assert witness.denial_available

    def test_witness_invariant_loaded_entails_grammar(self):
        spec = builtin("lepen")
        witness = is_dog_whistle(spec, "tj_nat", "lead", 0)
        comps = spec.completions("lead").histories
        assert entails(comps[witness.loaded_history], comps[witness.grammar_history])
        assert witness.loaded_history != witness.grammar_history

    def test_sheehan_is_no_dog_whistle(self):
        assert is_dog_whistle(builtin("sheehan"), "tj_U", "rho", 0) is None

    def test_general_audience_hears_no_whistle(self):
        assert is_dog_whistle(builtin("lepen"), "tj_gen", "lead", 0) is None

    def test_single_completion_cannot_whistle(self):
        assert is_dog_whistle(builtin("truth_toy"), "tj", "link", 0) is None

    def test_invalid_grammar_index(self):
        with pytest.raises(ValueError, match="invalid grammar history"):
            is_dog_whistle(builtin("lepen"), "tj_nat", "lead", 9)

    def test_ambiguous_and_whistling_at_once(self, layered_spec):
        # Readings 0 and 1 are incomparable (ambiguity) while reading 2
        # enriches reading 0 and pleases the scoring jury (dog whistle).
        assert is_ambiguous(layered_spec, "tj", "u")
        witness = is_dog_whistle(layered_spec, "tj", "u", 0)
        assert witness is not None and witness.loaded_history == 2

    def test_all_four_predicate_combinations_occur(self, layered_spec):
        cases = {
            (True, True): (layered_spec, "tj", "u", 0),
            (True, False): (builtin("sheehan"), "tj_U", "rho", 0),
            (False, True): (builtin("lepen"), "tj_nat", "lead", 0),
            (False, False): (builtin("truth_toy"), "tj", "link", 0),
        }
        for (ambiguous, whistles), (spec, jt, ulf, grammar) in cases.items():
            assert is_ambiguous(spec, jt, ulf) == ambiguous
            assert (is_dog_whistle(spec, jt, ulf, grammar) is not None) == whistles


class TestDisinterested:
    def test_symmetric_toy_meets_the_necessary_conditions(self, symmetric_toy_spec):
        report = is_disinterested(symmetric_toy_spec, "tj", 4)
        assert report.indifference == "pass"
        assert report.symmetry == "pass"
        assert report.verdict == "necessary-conditions-met"

    def test_partisan_jury_fails_at_length_one(self):
        doc = minimal_doc()
        doc["units"].append({"id": "m", "speaker": 1, "label": "m", "commitments": []})
        doc["moves"] = {"0": ["e1"], "1": ["m"]}
        doc["jury"] = {"win": {"win_lose": True, "win0": {"kind": "const", "value": True}}}
        spec = load_scenario(json.dumps(doc))
        report = is_disinterested(spec, "tj", 3)
        assert report.indifference == "counterexample"
        assert report.verdict == "not-disinterested"
        # One turn suffices to expose the favoritism.
        assert report.counterexample.count(":") == 1

    def test_sheehan_biased_jury_fails(self):
        report = is_disinterested(builtin("sheehan"), "tj_B", 2)
        assert report.verdict == "not-disinterested"
        assert report.symmetry == "incomparable"
        assert report.indifference == "counterexample"

    def test_meeting_the_conditions_implies_the_dual_win_invariant(self, symmetric_toy_spec):
        from megames import evaluate_win
        from megames.analysis import enumerate_plays
        from megames.game import UNDECIDED, WIN_0, WIN_1, dual

        maxlen = 4
        assert is_disinterested(symmetric_toy_spec, "tj", maxlen).verdict == (
            "necessary-conditions-met"
        )
        flip = {WIN_0: WIN_1, WIN_1: WIN_0, UNDECIDED: UNDECIDED}
        for p in enumerate_plays(symmetric_toy_spec.moves, maxlen):
            if not p.turns:
                continue
            v = evaluate_win(symmetric_toy_spec.jury, p)
            assert evaluate_win(symmetric_toy_spec.jury, dual(p)) == flip[v]


class TestTruthInterestedUpdate:
    def test_unconfirmed_claim_drops_to_a_coin_flip(self):
        out = EvidenceOutcome(NO_SURVIVING_CONFIRMATION)
        assert truth_interested_update(F(9, 10), out) == F(1, 2)

    def test_unrebutted_refutation_kills_the_claim(self):
        out = EvidenceOutcome(UNREBUTTED_REFUTATION)
        for num in range(0, 11):
            assert truth_interested_update(F(num, 10), out) == 0

    def test_low_priors_are_left_alone(self):
        out = EvidenceOutcome(NO_SURVIVING_CONFIRMATION)
        assert truth_interested_update(F(3, 10), out) == F(3, 10)

    def test_grid_bounds(self):
        for num in range(0, 101):
            p = F(num, 100)
            dropped = truth_interested_update(p, EvidenceOutcome(NO_SURVIVING_CONFIRMATION))
            assert dropped <= F(1, 2)
            assert 0 <= dropped <= 1
            assert truth_interested_update(p, EvidenceOutcome(UNREBUTTED_REFUTATION)) == 0

    def test_confirmation_needs_likelihoods(self):
        with pytest.raises(ValueError, match="likelihood"):
            truth_interested_update(F(1, 2), EvidenceOutcome(CONFIRMATION_SURVIVES))

    def test_confirmation_conditions_exactly(self):
        out = EvidenceOutcome(CONFIRMATION_SURVIVES)
        updated = truth_interested_update(F(1, 2), out, (F(2, 3), F(1, 3)))
        assert updated == F(2, 3)

    def test_unknown_tag_rejected(self):
        with pytest.raises(ValueError, match="tag"):
            EvidenceOutcome("sounds_plausible")


class TestLiminf:
    def test_constant_confirmation_keeps_the_prior(self):
        chain = [EvidenceOutcome(CONFIRMATION_SURVIVES)] * 8
        assert liminf_update(F(4, 5), chain, 8) == F(4, 5)

    def test_one_refutation_floors_everything(self):
        chain = (
            [EvidenceOutcome(CONFIRMATION_SURVIVES)] * 3
            + [EvidenceOutcome(UNREBUTTED_REFUTATION)]
            + [EvidenceOutcome(CONFIRMATION_SURVIVES)] * 4
        )
        assert liminf_update(F(4, 5), chain, 8) == 0

    def test_alternating_chain_trailing_minimum(self):
        chain = [
            EvidenceOutcome(NO_SURVIVING_CONFIRMATION if i % 2 == 0 else CONFIRMATION_SURVIVES)
            for i in range(8)
        ]
        # From 4/5: drop to 1/2, then condition back up to 2/3, repeatedly.
        got = liminf_update(F(4, 5), chain, 8, likelihoods=(F(2, 3), F(1, 3)))
        assert got == F(1, 2)

    def test_short_chain_is_an_error(self):
        with pytest.raises(ValueError, match="horizon"):
            liminf_update(F(1, 2), [EvidenceOutcome(CONFIRMATION_SURVIVES)], 2)


class TestAgreement:
    def test_identical_priors_agree_immediately(self):
        out = simulate_agreement(["f1"], F(7, 10), F(7, 10), (True, True), {}, 5)
        assert out.agreed and out.rounds_used == 0
        assert out.final_histories == (SIDE_PRO, SIDE_PRO)

    def test_sole_confirming_ground_defeated(self):
        # Two facts; the doubter's only evidence is attackable, the
        # proponent's holds, so the doubter converges to the proponent.
        out = simulate_agreement(
            ["f1", "f2"],
            F(8, 10),
            F(2, 10),
            (True, True),
            {0: {"f1": "solid"}, 1: {"f2": "attackable"}},
            5,
        )
        assert out.agreed
        assert out.final_histories == (SIDE_PRO, SIDE_PRO)
        assert out.rounds_used == 3  # |facts| + 1
        assert out.final_beliefs[1] == F(8, 10)

    def test_neither_side_grounded_splits_the_difference(self):
        out = simulate_agreement(
            ["f1"], F(9, 10), F(1, 10), (True, True), {0: {"f1": "attackable"}}, 5
        )
        assert out.agreed
        assert out.final_histories == (SIDE_SPLIT, SIDE_SPLIT)
        assert out.final_beliefs == (F(1, 2), F(1, 2))

    def test_uninterested_player_never_moves(self):
        out = simulate_agreement(
            ["f1", "f2"],
            F(8, 10),
            F(2, 10),
            (True, False),
            {0: {"f1": "solid"}, 1: {"f2": "attackable"}},
            8,
        )
        assert not out.agreed
        assert out.rounds_used == 8
        assert out.final_histories == (SIDE_PRO, SIDE_CON)

    def test_zero_rounds_is_an_error(self):
        with pytest.raises(ValueError, match="max_rounds"):
            simulate_agreement(["f1"], F(1, 2), F(1, 2), (True, True), {}, 0)

    def test_contradictory_solid_grounds_are_out_of_scope(self):
        with pytest.raises(ValueError, match="contradictory claims"):
            simulate_agreement(
                ["f1"],
                F(9, 10),
                F(1, 10),
                (True, True),
                {0: {"f1": "solid"}, 1: {"f1": "solid"}},
                5,
            )

    def test_truth_interested_pairs_always_converge(self):
        # Desk-scale sweep: every valid instance agrees within |facts| + 1.
        for k in (1, 2):
            facts = [f"f{i}" for i in range(1, k + 1)]
            profiles = [{}, {facts[0]: "solid"}, {facts[0]: "attackable"}]
            grid = [F(n, 10) for n in range(0, 11)]
            for p0, p1, g0, g1 in itertools.product(grid, grid, profiles, profiles):
                opposite = (p0 > F(1, 2) and p1 < F(1, 2)) or (p0 < F(1, 2) and p1 > F(1, 2))
                if opposite and "solid" in g0.values() and "solid" in g1.values():
                    continue
                out = simulate_agreement(facts, p0, p1, (True, True), {0: g0, 1: g1}, k + 1)
                assert out.agreed
                assert out.rounds_used <= k + 1


def mk_history(*edges: tuple[str, str, str], atoms: dict[str, tuple[str, ...]] = None) -> History:
    atoms = atoms or {}
    units = sorted({e for _, s, t in edges for e in (s, t)})
    return History(
        tuple(Edu(u, 0, u, frozenset(atoms.get(u, ()))) for u in units),
        tuple(RelationInstance(r, s, t) for r, s, t in edges),
    )


def evidence_attack(target: str, name: str = "a1") -> Move:
    return Move("atk", 1, "evidence", target, id=name)


class TestDefensibility:
    def test_no_attacks_is_defensible(self):
        h = mk_history(("result", "e1", "e2"))
        assert e_defensible(h, (), {})

    def test_unanswered_admissible_attack_fails(self):
        h = mk_history(("result", "e1", "e2"))
        a = evidence_attack("e1")
        assert not e_defensible(h, (a,), {})
        assert not e_defensible(h, (a,), {a: None})

    def test_rebutted_attack_is_fine(self):
        h = mk_history(("result", "e1", "e2"))
        a = evidence_attack("e1")
        assert e_defensible(h, (a,), {a: Move("rebut", 0)})

    def test_ad_hominem_is_ignored_by_a_disinterested_jury(self):
        h = mk_history(("result", "e1", "e2"))
        a = Move("atk", 1, "ad_hominem", "e1")
        assert e_defensible(h, (a,), {})
        assert not e_defensible(h, (a,), {}, disinterested=False)

    def test_attacks_may_target_relation_atoms(self):
        h = mk_history(("result", "e1", "e2"))
        a = evidence_attack("rel(result,e1,e2)")
        assert not e_defensible(h, (a,), {})

    def test_foreign_targets_are_rejected(self):
        h = mk_history(("result", "e1", "e2"))
        with pytest.raises(ValueError, match="target"):
            e_defensible(h, (evidence_attack("elsewhere"),), {})


class TestPredictiveness:
    def test_no_new_facts_reduces_to_defensibility(self):
        h = mk_history(("result", "e1", "e2"))
        assert is_predictive(h, (), lambda fact, cur: None)

    def test_extender_attaches_every_fact(self):
        h = mk_history(("result", "e1", "e2"))
        fact = Edu("f1", 0, "f1", frozenset({"fresh"}))
        extender = lambda f, cur: RelationInstance("result", "e2", f.id)
        assert is_predictive(h, (fact,), extender)

    def test_unattachable_fact_fails(self):
        h = mk_history(("result", "e1", "e2"))
        fact = Edu("f1", 0, "f1", frozenset())
        assert not is_predictive(h, (fact,), lambda f, cur: None)

    def test_incoherent_extension_fails(self):
        h = mk_history(("result", "e1", "e2"))
        fact = Edu("f1", 0, "f1", frozenset())
        # Attaching through a cycle-inducing edge wrecks coherence.
        extender = lambda f, cur: RelationInstance("result", "e2", "e1")
        assert not is_predictive(h, (fact,), extender)

    def test_standing_attack_on_the_extension_fails(self):
        h = mk_history(("result", "e1", "e2"))
        fact = Edu("f1", 0, "f1", frozenset())
        extender = lambda f, cur: RelationInstance("result", "e2", f.id)
        a = evidence_attack("f1")
        assert not is_predictive(h, (fact,), extender, attacks=(a,))
        assert is_predictive(h, (fact,), extender, attacks=(a,), rebuttals={a: Move("r", 0)})


class TestTwoHistoryOutcome:
    def setup_method(self):
        self.h_pro = mk_history(("result", "fact", "claim_pro"),
                                atoms={"fact": ("observed",), "claim_pro": ("works",)})
        self.h_con = mk_history(("result", "fact", "claim_con"),
                                atoms={"fact": ("observed",), "claim_con": ("~works",)})

    def test_one_sided_collapse(self):
        a = evidence_attack("claim_con")
        script_e = DefenseScript()
        script_a = DefenseScript((a,), {a: None})
        assert two_history_outcome(self.h_pro, self.h_con, script_e, script_a) == E_WINS
        assert two_history_outcome(self.h_con, self.h_pro, script_a, script_e) == A_WINS

    def test_both_standing_attacks_lose(self):
        ae = evidence_attack("claim_pro")
        aa = evidence_attack("claim_con")
        out = two_history_outcome(
            self.h_pro,
            self.h_con,
            DefenseScript((ae,), {ae: None}),
            DefenseScript((aa,), {aa: None}),
        )
        assert out == BOTH_LOSE

    def test_full_rebuttals_on_contradictory_claims_still_both_lose(self):
        from megames import commitments

        assert commitments(self.h_pro).contradicts(commitments(self.h_con))
        ae = evidence_attack("claim_pro")
        aa = evidence_attack("claim_con")
        out = two_history_outcome(
            self.h_pro,
            self.h_con,
            DefenseScript((ae,), {ae: Move("r", 0)}),
            DefenseScript((aa,), {aa: Move("r", 1)}),
        )
        assert out == BOTH_LOSE

    def test_no_single_winner_when_both_rebut_scripted_family(self):
        # Vary the attack multiplicity; full rebuttal on both sides must
        # never crown a single winner.
        for n_attacks in range(0, 4):
            attacks_e = tuple(evidence_attack("claim_pro", f"e{i}") for i in range(n_attacks))
            attacks_a = tuple(evidence_attack("claim_con", f"a{i}") for i in range(n_attacks))
            out = two_history_outcome(
                self.h_pro,
                self.h_con,
                DefenseScript(attacks_e, {a: Move("r", 0) for a in attacks_e}),
                DefenseScript(attacks_a, {a: Move("r", 1) for a in attacks_a}),
            )
            assert out == BOTH_LOSE
