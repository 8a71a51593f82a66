from __future__ import annotations

import json
from fractions import Fraction

import pytest

from megames import (
    BUILTIN_NAMES,
    ScenarioError,
    builtin,
    load_scenario,
    run_rounds,
    serialize_scenario,
)
from tests.conftest import minimal_doc, rat

F = Fraction


class TestLoading:
    def test_minimal_document(self, minimal_spec):
        assert minimal_spec.name == "minimal"
        assert len(minimal_spec.completions("u").histories) == 1

    def test_parse_error_reports_position(self):
        with pytest.raises(ScenarioError, match=r"line \d+, column \d+"):
            load_scenario("{\n  broken\n}")

    def test_prior_deficit_is_named(self):
        doc = minimal_doc()
        doc["priors"]["tj"][0]["p"] = rat(99, 100)
        with pytest.raises(ScenarioError, match="99/100"):
            load_scenario(json.dumps(doc))

    def test_floats_are_rejected(self):
        doc = minimal_doc()
        doc["priors"]["tj"][0]["p"] = 0.99
        with pytest.raises(ScenarioError, match="floats are rejected"):
            load_scenario(json.dumps(doc))

    def test_dangling_strategy_payload(self):
        doc = minimal_doc()
        doc["strategies"][0]["moves"] = {"1": "ghost"}
        with pytest.raises(ScenarioError, match="ghost"):
            load_scenario(json.dumps(doc))

    def test_dangling_relation_reference(self):
        doc = minimal_doc()
        doc["relations"] = {"h": [{"relation": "background", "source": "e1", "target": "ghost"}]}
        with pytest.raises(ScenarioError, match="dangling"):
            load_scenario(json.dumps(doc))

    def test_illegal_script_alternation(self):
        doc = minimal_doc()
        doc["script"] = [
            [{"player": 0, "moves": ["e1"]}, {"player": 0, "moves": ["e1"]}],
        ]
        with pytest.raises(ScenarioError, match="wrong player"):
            load_scenario(json.dumps(doc))

    def test_kernel_gap_detected_at_load(self):
        doc = minimal_doc()
        doc["kernels"] = []
        with pytest.raises(ScenarioError, match="kernel gap"):
            load_scenario(json.dumps(doc))

    def test_kernel_index_out_of_range(self):
        doc = minimal_doc()
        doc["kernels"][0]["over"] = {"3": 1}
        with pytest.raises(ScenarioError, match="out of range"):
            load_scenario(json.dumps(doc))

    def test_kernel_must_normalize(self):
        doc = minimal_doc()
        doc["kernels"][0]["over"] = {"0": rat(1, 2)}
        with pytest.raises(ScenarioError, match="sums to 1/2"):
            load_scenario(json.dumps(doc))

    def test_unknown_jury_type_in_prior(self):
        doc = minimal_doc()
        doc["priors"] = {"other": doc["priors"]["tj"]}
        with pytest.raises(ScenarioError, match="missing prior"):
            load_scenario(json.dumps(doc))

    def test_repeated_prior_outcome(self):
        doc = minimal_doc()
        entry = dict(doc["priors"]["tj"][0])
        entry["p"] = rat(0)
        doc["priors"]["tj"] = [dict(doc["priors"]["tj"][0], p=rat(1)), entry]
        with pytest.raises(ScenarioError, match="repeated outcome"):
            load_scenario(json.dumps(doc))

    def test_ulf_order_must_cover_referenced_edus(self):
        doc = minimal_doc()
        doc["units"].append({"id": "e2", "speaker": 1, "label": "e2", "commitments": []})
        doc["ulfs"]["u"]["fixed"] = [
            {"relation": "background", "source": "e1", "target": "e2"}
        ]
        with pytest.raises(ScenarioError, match="not in order"):
            load_scenario(json.dumps(doc))


class TestBuiltins:
    def test_unknown_builtin_lists_names(self):
        with pytest.raises(ScenarioError) as err:
            builtin("nope")
        for name in BUILTIN_NAMES:
            assert name in str(err.value)

    def test_sheehan_shape(self):
        spec = builtin("sheehan")
        assert len(spec.type_space.player_types[1]) == 2
        assert len(spec.type_space.jury_types) == 2
        assert len(spec.type_space.strategy_tables[1]) == 7
        assert [t.id for t in spec.type_space.strategy_tables[1]] == [
            f"s{i}" for i in range(1, 8)
        ]

    def test_sheehan_priors(self):
        spec = builtin("sheehan")
        tj_u = spec.type_space.priors["tj_U"].marginal(lambda o: o[2])
        assert tj_u["t_H"] == F(1, 2) and tj_u["t_D"] == F(1, 2)
        tj_b = spec.type_space.priors["tj_B"].marginal(lambda o: o[2])
        assert tj_b["t_H"] == F(7, 10) and tj_b["t_D"] == F(3, 10)

    def test_sheehan_prior_rows(self):
        # Honest mass spreads uniformly over the strategies that eventually
        # answer "no"; dishonest mass over those that string out or admit.
        spec = builtin("sheehan")
        prior = spec.type_space.priors["tj_U"]
        assert prior[("t_R", "ask", "t_H", "s2")] == F(1, 6)
        assert prior[("t_R", "ask", "t_D", "s7")] == F(1, 8)
        prior_b = spec.type_space.priors["tj_B"]
        assert prior_b[("t_R", "ask", "t_H", "s7")] == F(7, 40)
        assert prior_b[("t_R", "ask", "t_D", "s5")] == F(1, 10)

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_round_trip(self, name):
        spec = builtin(name)
        doc = serialize_scenario(spec)
        again = load_scenario(json.dumps(doc))
        assert again == spec

    def test_lepen_has_a_grammar_and_a_loaded_reading(self):
        spec = builtin("lepen")
        rep = spec.completions("lead")
        assert len(rep.histories) == 2

    def test_march_ships_three_histories(self):
        spec = builtin("march_for_science")
        assert set(spec.histories) == {"nyt", "townhall", "newsbusters"}

    def test_truth_toy_histories_contradict(self):
        from megames import commitments

        spec = builtin("truth_toy")
        pro = commitments(spec.histories["pro"])
        con = commitments(spec.histories["con"])
        assert pro.contradicts(con)

    def test_builtin_trajectories_replay(self):
        spec = builtin("sheehan")
        assert run_rounds(spec, "tj_U", 2).marginals("t_D") == [F(1, 2), F(9, 17), F(3, 5)]

    def test_solve_tree_depth_guard(self):
        spec = builtin("truth_toy")
        with pytest.raises(ScenarioError, match="exceeds"):
            spec.solve_tree(9)
