import json

import numpy as np
import numpy.testing as npt
import pytest

from sandsmooth.gridio import (
    FileFormatError,
    read_curves_csv,
    read_grid_csv,
    read_scatter_csv,
    write_curves_csv,
    write_grid_csv,
    write_json,
    write_long_csv,
    write_scatter_csv,
)


def awkward_values(rng, shape):
    # mix magnitudes so round-trip precision actually gets exercised
    base = rng.standard_normal(shape)
    scale = 10.0 ** rng.integers(-12, 13, size=shape)
    return base * scale


class TestGridCsv:
    def test_round_trip_bit_identical(self, tmp_path):
        rng = np.random.Generator(np.random.Philox(0))
        x = np.sort(rng.random(7))
        z = np.sort(rng.random(5))
        vals = awkward_values(rng, (7, 5))
        p = tmp_path / "g.csv"
        write_grid_csv(p, x, z, vals)
        x2, z2, v2 = read_grid_csv(p)
        npt.assert_array_equal(x2, x)
        npt.assert_array_equal(z2, z)
        npt.assert_array_equal(v2, vals)

    def test_header_layout(self, tmp_path):
        p = tmp_path / "g.csv"
        write_grid_csv(p, [0.25, 0.75], [0.5], [[1.0], [2.0]])
        lines = p.read_text().splitlines()
        assert lines[0] == ",z:0.5"
        assert lines[1].startswith("x:0.25,")

    def test_empty_file(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("")
        with pytest.raises(FileFormatError, match="e.csv:1"):
            read_grid_csv(p)

    def test_bad_corner(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("oops,z:0.5\nx:0.25,1.0\n")
        with pytest.raises(FileFormatError, match="empty corner"):
            read_grid_csv(p)

    def test_bad_column_tag(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text(",w:0.5\nx:0.25,1.0\n")
        with pytest.raises(FileFormatError, match="g.csv:1.*'z:"):
            read_grid_csv(p)

    def test_bad_row_tag_line_number(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text(",z:0.5\nx:0.25,1.0\n0.75,2.0\n")
        with pytest.raises(FileFormatError, match="g.csv:3"):
            read_grid_csv(p)

    def test_width_mismatch(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text(",z:0.2,z:0.8\nx:0.25,1.0\n")
        with pytest.raises(FileFormatError, match="g.csv:2.*3 fields"):
            read_grid_csv(p)

    def test_non_numeric_cell(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text(",z:0.5\nx:0.25,abc\n")
        with pytest.raises(FileFormatError, match="g.csv:2.*'abc'"):
            read_grid_csv(p)


class TestScatterCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.Generator(np.random.Philox(1))
        x, z = rng.random(40), rng.random(40)
        y = awkward_values(rng, 40)
        p = tmp_path / "s.csv"
        write_scatter_csv(p, x, z, y)
        x2, z2, y2 = read_scatter_csv(p)
        npt.assert_array_equal(x2, x)
        npt.assert_array_equal(z2, z)
        npt.assert_array_equal(y2, y)
        assert p.read_text().splitlines()[0] == "x,z,y"

    def test_header_required(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("0.1,0.2,0.3\n")
        with pytest.raises(FileFormatError, match="s.csv:1"):
            read_scatter_csv(p)

    def test_row_width(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("x,z,y\n0.1,0.2\n")
        with pytest.raises(FileFormatError, match="s.csv:2"):
            read_scatter_csv(p)


class TestCurvesCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.Generator(np.random.Philox(2))
        t = np.sort(rng.random(9))
        Y = awkward_values(rng, (4, 9))
        p = tmp_path / "c.csv"
        write_curves_csv(p, t, Y)
        t2, Y2 = read_curves_csv(p)
        npt.assert_array_equal(t2, t)
        npt.assert_array_equal(Y2, Y)

    def test_single_curve_as_vector(self, tmp_path):
        p = tmp_path / "c.csv"
        write_curves_csv(p, [0.25, 0.75], [1.0, 2.0])
        _, Y = read_curves_csv(p)
        assert Y.shape == (1, 2)

    def test_no_curves(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("t:0.25,t:0.75\n")
        with pytest.raises(FileFormatError, match="c.csv:2"):
            read_curves_csv(p)

    def test_bad_header_tag(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("0.25,0.75\n1.0,2.0\n")
        with pytest.raises(FileFormatError, match="c.csv:1.*'t:"):
            read_curves_csv(p)


class TestLongCsvAndJson:
    def test_long_csv_mixes_strings_and_floats(self, tmp_path):
        p = tmp_path / "l.csv"
        write_long_csv(p, ["x", "series", "value"],
                       [(0.5, "fitted", 1.25), (0.75, "observed", -2.0)])
        lines = p.read_text().splitlines()
        assert lines[0] == "x,series,value"
        assert lines[1] == "0.5,fitted,1.25"

    def test_json_sorted_and_round_trip(self, tmp_path):
        p = tmp_path / "s.json"
        write_json(p, {"b": 0.1 + 0.2, "a": [1, 2]})
        text = p.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")
        assert json.loads(text)["b"] == 0.1 + 0.2
