import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shiftk import parse_presentation

# JSON source of every presentation the tests exercise, grouped by kind.
CORPUS_OBJECTS = {
    "full2": {"type": "sft", "alphabet": ["0", "1"], "forbidden": []},
    "full3": {"type": "sft", "alphabet": ["0", "1", "2"], "forbidden": []},
    "full4": {"type": "sft", "alphabet": ["0", "1", "2", "3"], "forbidden": []},
    "golden_mean": {"type": "sft", "alphabet": ["0", "1"], "forbidden": [["1", "1"]]},
    "golden_mean_matrix": {"type": "sft_matrix", "adjacency": [[1, 1], [1, 0]]},
    "even": {"type": "sofic", "states": ["e", "o"],
             "edges": [["e", "e", "1"], ["e", "o", "0"], ["o", "e", "0"]]},
    "single_point": {"type": "finite", "alphabet": ["0"],
                     "points": [{"pre": [], "per": ["0"]}]},
    "pair": {"type": "finite", "alphabet": ["0", "1"],
             "points": [{"pre": [], "per": ["0"]}, {"pre": ["1"], "per": ["0"]}]},
    "two_cycle": {"type": "finite", "alphabet": ["0", "1"],
                  "points": [{"pre": [], "per": ["0", "1"]},
                             {"pre": [], "per": ["1", "0"]}]},
    "two_cycle_fixed": {"type": "finite", "alphabet": ["0", "1"],
                        "points": [{"pre": [], "per": ["0", "1"]},
                                   {"pre": [], "per": ["1", "0"]},
                                   {"pre": [], "per": ["0"]}]},
    "chain3": {"type": "finite", "alphabet": ["0", "1"],
               "points": [{"pre": [], "per": ["0"]},
                          {"pre": ["1"], "per": ["0"]},
                          {"pre": ["1", "1"], "per": ["0"]}]},
}

FINITE_MODEL_NAMES = ("single_point", "pair", "two_cycle", "two_cycle_fixed", "chain3")
SFT_SOFIC_NAMES = ("full2", "full3", "full4", "golden_mean", "golden_mean_matrix", "even")


def make(name):
    return parse_presentation(CORPUS_OBJECTS[name])


@pytest.fixture
def corpus():
    return {name: make(name) for name in CORPUS_OBJECTS}


@pytest.fixture
def golden_mean():
    return make("golden_mean")


@pytest.fixture
def full2():
    return make("full2")


@pytest.fixture
def full3():
    return make("full3")


@pytest.fixture
def even():
    return make("even")


@pytest.fixture
def pair():
    return make("pair")
