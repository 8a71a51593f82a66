from __future__ import annotations

import json

import pytest

from megames import load_scenario


def rat(num: int, den: int = 1) -> dict:
    return {"num": num, "den": den}


def minimal_doc() -> dict:
    """Smallest valid scenario: one EDU, singleton types, a 0-slot ULF."""
    return {
        "name": "minimal",
        "units": [{"id": "e1", "speaker": 0, "label": "hello", "commitments": ["greeted"]}],
        "cdus": [],
        "relations": {},
        "ulfs": {"u": {"order": ["e1"], "fixed": [], "slots": []}},
        "types": {"players": [["t0"], ["t1"]], "jury": ["tj"]},
        "strategies": [
            {"id": "s0", "owner": 0, "moves": {"1": "e1"}},
            {"id": "s1", "owner": 1, "moves": {}},
        ],
        "priors": {"tj": [{"types": ["t0", "t1"], "strategies": ["s0", "s1"], "p": 1}]},
        "kernels": [{"jury_type": "tj", "types": ["t0", "t1"], "ulf": "u", "over": {"0": 1}}],
        "script": [[{"player": 0, "moves": ["e1"]}]],
        "jury": {"win": {"win_lose": True, "win0": {"kind": "last_speaker", "player": 0}}},
        "designated_player": 1,
    }


def symmetric_toy_doc() -> dict:
    """Jury with mirrored payload conditions and a uniform prior over
    matched type sets: passes both disinterest conditions."""
    return {
        "name": "toy",
        "units": [
            {"id": "x", "speaker": 0, "label": "x", "commitments": []},
            {"id": "y", "speaker": 1, "label": "y", "commitments": []},
        ],
        "cdus": [],
        "relations": {},
        "ulfs": {},
        "types": {"players": [["ta", "tb"], ["ta", "tb"]], "jury": ["tj"]},
        "strategies": [
            {"id": "s0", "owner": 0, "moves": {}},
            {"id": "s1", "owner": 1, "moves": {}},
        ],
        "priors": {
            "tj": [
                {"types": ["ta", "ta"], "strategies": ["s0", "s1"], "p": rat(1, 4)},
                {"types": ["ta", "tb"], "strategies": ["s0", "s1"], "p": rat(1, 4)},
                {"types": ["tb", "ta"], "strategies": ["s0", "s1"], "p": rat(1, 4)},
                {"types": ["tb", "tb"], "strategies": ["s0", "s1"], "p": rat(1, 4)},
            ]
        },
        "kernels": [],
        "script": [[{"player": 0, "moves": ["x"]}, {"player": 1, "moves": ["y"]}]],
        "jury": {
            "win": {
                "win_lose": False,
                "win0": {"kind": "played", "player": 0, "payload": "x"},
                "win1": {"kind": "played", "player": 1, "payload": "x"},
            }
        },
        "moves": {"0": ["x", "y"], "1": ["x", "y"]},
        "designated_player": 1,
    }


def layered_ulf_doc() -> dict:
    """ULF that is both ambiguous and a dog whistle: two incomparable live
    readings plus an enriching third one that some jury scores higher."""
    return {
        "name": "layered",
        "units": [
            {"id": "a", "speaker": 0, "label": "a", "commitments": ["ax"]},
            {"id": "b", "speaker": 0, "label": "b", "commitments": ["bx"]},
            {"id": "c", "speaker": 0, "label": "c", "commitments": ["cx"]},
        ],
        "cdus": [],
        "relations": {},
        "ulfs": {
            "u": {
                "order": ["a", "b", "c"],
                "fixed": [],
                "slots": [
                    [
                        {"relation": "confirmation_question", "source": "b", "target": "c"},
                        {"relation": "elaboration", "source": "b", "target": "c"},
                    ],
                    [
                        {"relation": "background", "source": "a", "target": "b"},
                        {"relation": "contrast", "source": "a", "target": "b"},
                    ],
                ],
            }
        },
        "types": {"players": [["t0"], ["t1"]], "jury": ["tj"]},
        "strategies": [
            {"id": "s0", "owner": 0, "moves": {}},
            {"id": "s1", "owner": 1, "moves": {}},
        ],
        "priors": {"tj": [{"types": ["t0", "t1"], "strategies": ["s0", "s1"], "p": 1}]},
        "kernels": [
            {
                "jury_type": "tj",
                "types": ["t0", "t1"],
                "ulf": "u",
                "over": {"0": rat(1, 2), "1": rat(1, 4), "2": rat(1, 4)},
            }
        ],
        "script": [],
        "jury": {
            "win": {"win_lose": True, "win0": {"kind": "last_speaker", "player": 0}},
            "scores": {"tj": {"0": 0, "1": 0, "2": 1}},
        },
        "designated_player": 1,
    }


@pytest.fixture
def minimal_spec():
    return load_scenario(json.dumps(minimal_doc()))


@pytest.fixture
def symmetric_toy_spec():
    return load_scenario(json.dumps(symmetric_toy_doc()))


@pytest.fixture
def layered_spec():
    return load_scenario(json.dumps(layered_ulf_doc()))
