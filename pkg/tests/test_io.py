import json

import numpy as np
import pytest

from semirobust.errors import ConfigError, DatasetError
from semirobust.io import (marginals_document, means_from_marginals_document, read_json,
                           scores_document, scores_from_document, write_json)
from semirobust.semivalue import ScoreMatrix
from semirobust.svg import line_chart, signature_scatter


def test_scores_roundtrip_is_exact(tmp_path, rng):
    sm = ScoreMatrix(rng.normal(size=(4, 2)) / 3, "banzhaf", ("a", "b"), 200, (7, 2, 9, 4))
    write_json(tmp_path / "s.json", scores_document([sm], "mc"))
    back = scores_from_document(read_json(tmp_path / "s.json"))[0]
    assert back.scores.tobytes() == sm.scores.tobytes()
    assert back.point_ids == sm.point_ids and back.n_permutations == 200


def test_nonfinite_values(tmp_path):
    write_json(tmp_path / "x.json", {"a": float("inf"), "b": np.nan, "c": np.float32(0.5)})
    assert json.loads((tmp_path / "x.json").read_text()) == {"a": "inf", "b": None, "c": 0.5}


def test_marginals_roundtrip(rng):
    mean = rng.normal(size=(3, 3, 2))
    doc = json.loads(json.dumps(marginals_document("exact", ["a", "b"], [0, 1, 2], None, mean,
                                                   None)))
    np.testing.assert_array_equal(means_from_marginals_document(doc), mean)


def test_read_errors(tmp_path):
    with pytest.raises(DatasetError):
        read_json(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError):
        read_json(tmp_path / "bad.json")
    with pytest.raises(ConfigError):
        scores_from_document({"schema": "other"})


def test_svg_wellformed():
    import xml.etree.ElementTree as ET
    ET.fromstring(line_chart({"a": [0.1, None, 0.3]}, [1, 2, 5], "t", "p", "R_p"))
    ET.fromstring(signature_scatter({"x<y": np.array([[1.0, 0.0], [0.0, 2.0]])}))
