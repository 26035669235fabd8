import json
import random

import pytest
from hypothesis import given, settings

from cmjets import io as jio
from cmjets.jets import siegel_automorphism
from cmjets.scalars import GaussQ
from cmjets.selftest import random_a, random_model
from cmjets.verdict import Verdict

from conftest import seeds


@settings(max_examples=10)
@given(seeds)
def test_hypersurface_round_trip(seed):
    H = random_model(random.Random(seed), 2)
    data = jio.hypersurface_to_json(H.graph(), 6)
    text = json.dumps(data)
    n, K, h = jio.hypersurface_from_json(json.loads(text))
    assert (n, K) == (2, 6) and h == H.graph()
    assert jio.hypersurface_to_json(h, K) == data


@settings(max_examples=10)
@given(seeds)
def test_jet_round_trip(seed):
    F = siegel_automorphism(random_a(random.Random(seed), 2), 5)
    data = jio.jet_to_json(F)
    G = jio.jet_from_json(json.loads(json.dumps(data)))
    assert G == F
    assert jio.jet_to_json(G) == data


def test_float_backend_parse():
    data = {"n": 1, "max_weight": 4, "terms": [{"z": [1], "zbar": [1], "re": "1/2", "im": "0"}]}
    _, _, h = jio.hypersurface_from_json(data, "float")
    assert h.backend == "float"


@pytest.mark.parametrize("data", [
    [], {"n": 0, "max_weight": 4, "terms": []}, {"n": 1, "max_weight": 1, "terms": []},
    {"n": 1, "max_weight": 4, "terms": [{"z": [1, 0], "zbar": [1]}]},
    {"n": 1, "max_weight": 4, "terms": [{"z": [1], "zbar": [1], "re": "x"}]},
    {"n": 1, "max_weight": 4, "terms": [{"z": [1], "zbar": [1], "u": -1}]},
])
def test_bad_hypersurface_files(data):
    with pytest.raises(jio.FormatError):
        jio.hypersurface_from_json(data)


def test_bad_jet_component():
    with pytest.raises(jio.FormatError):
        jio.jet_from_json({"n": 1, "max_weight": 4, "terms": [{"component": 2, "z": [1], "w": 0}]})


def test_matrix_parse():
    M = jio.matrix_from_json({"matrix": [["1/2+i", {"re": "0", "im": "2"}], [0, 1]]})
    assert M[0][0] == GaussQ.coerce("1/2+i") and M[0][1] == GaussQ(0, 2)
    with pytest.raises(jio.FormatError):
        jio.matrix_from_json({"matrix": "nope"})


def test_verdict_json_and_dump(tmp_path):
    v = Verdict.violated("neg", witness={"z": [GaussQ(1)], "u": GaussQ(0)}, value=-1)
    out = jio.verdict_to_json(v)
    assert out["status"] == "violated" and out["witness"]["z"] == ["1"]
    path = tmp_path / "v.json"
    jio.dump(out, path)
    raw = path.read_bytes()
    assert b"\r\n" not in raw and json.loads(raw) == out
    assert len(jio.sha256_file(path)) == 64
