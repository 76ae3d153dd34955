import json

import numpy as np
import pytest

from probframes import GaussianMixtureMeasure, InvalidMeasureError
from probframes.io import (
    dumps,
    dumps_measure,
    format_float,
    loads_measure,
    read_measure,
    read_points_csv,
    write_measure,
)

from .helpers import mercedes, random_discrete


class TestFormat:
    @pytest.mark.parametrize("x", [0.1, 1 / 3, np.pi, 1e-300, -2.5e17, 5e-324, 1.0, 123456789.0])
    def test_round_trip(self, x):
        assert float(format_float(x)) == x

    def test_integral_values_stay_floats(self):
        assert format_float(2.0) == "2.0"
        assert format_float(0.0) == "0.0"

    def test_non_finite(self):
        assert format_float(float("inf")) == "Infinity"
        assert format_float(float("nan")) == "NaN"

    def test_canonical_layout(self):
        a = dumps({"b": [1.0, 2], "a": {"y": True, "x": None}})
        b = dumps({"a": {"x": None, "y": True}, "b": [1.0, 2]})
        assert a == b
        assert json.loads(a) == {"a": {"x": None, "y": True}, "b": [1.0, 2]}
        assert a.index('"a"') < a.index('"b"')


class TestMeasureJson:
    def test_discrete_round_trip(self):
        mu = random_discrete(np.random.default_rng(0), 3, 7)
        text = dumps_measure(mu)
        back = loads_measure(text)
        np.testing.assert_array_equal(back.points, mu.points)
        np.testing.assert_array_equal(back.weights, mu.weights)
        assert dumps_measure(back) == text

    def test_mixture_round_trip(self):
        g = GaussianMixtureMeasure([0.3, 0.7], [[0.1, 0.2], [1 / 3, -1.0]],
                                   [np.eye(2) * 0.7, [[0.5, 0.1], [0.1, 0.2]]])
        text = dumps_measure(g)
        back = loads_measure(text)
        assert isinstance(back, GaussianMixtureMeasure)
        np.testing.assert_array_equal(back.covs, g.covs)
        assert dumps_measure(back) == text

    def test_file_round_trip(self, tmp_path):
        p = tmp_path / "m.json"
        write_measure(mercedes(), p)
        first = p.read_bytes()
        write_measure(read_measure(p), p)
        assert p.read_bytes() == first

    def test_default_weights(self):
        mu = loads_measure('{"dim": 2, "points": [[1, 0], [0, 1]]}')
        np.testing.assert_array_equal(mu.weights, [0.5, 0.5])

    @pytest.mark.parametrize("text", [
        "not json",
        "[1, 2]",
        '{"points": [[1, 0]]}',
        '{"dim": 2, "type": "weird", "points": [[1, 0]]}',
        '{"dim": 2, "points": [[1, 0]], "weights": [0.5]}',
        '{"dim": 3, "points": [[1, 0]]}',
        '{"dim": 2, "type": "mixture", "components": []}',
        '{"dim": 1, "type": "mixture", "components": [{"weight": 1, "mean": [0], "cov": [[-1]]}]}',
    ])
    def test_malformed(self, text):
        with pytest.raises(InvalidMeasureError):
            loads_measure(text)


class TestCsv:
    def test_uniform(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("# comment\nx,y\n1,0\n0,1\n\n-1,0\n")
        mu = read_measure(p)
        assert mu.size == 3
        np.testing.assert_allclose(mu.weights, 1 / 3)

    def test_weight_column(self, tmp_path):
        p = tmp_path / "w.csv"
        p.write_text("1,0,0.25\n0,1,0.75\n")
        mu = read_measure(p, weight_column=True)
        np.testing.assert_array_equal(mu.weights, [0.25, 0.75])
        assert mu.dim == 2

    def test_ragged(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1,0\n0,1,2\n")
        with pytest.raises(InvalidMeasureError):
            read_points_csv(p)

    def test_non_numeric_body(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1,0\nfoo,1\n")
        with pytest.raises(InvalidMeasureError):
            read_points_csv(p)

    def test_empty(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("# nothing\n")
        with pytest.raises(InvalidMeasureError):
            read_points_csv(p)
