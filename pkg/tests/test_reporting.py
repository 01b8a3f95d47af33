import json
from dataclasses import dataclass

import numpy as np
import pytest

from fpnreg.regularity import regularize
from fpnreg.reporting import canonical_json, format_float, render_rows, to_jsonable
from fpnreg.vectorspace import DenseSubset, SpaceDescriptor, SubspaceBasis

SP32 = SpaceDescriptor(3, 2)


class TestFloatFormat:
    def test_twelve_significant_digits(self):
        assert format_float(1 / 3) == "0.333333333333"
        assert format_float(3.0) == "3.0"
        assert format_float(1e-10) == "1e-10"
        assert format_float(0.0) == "0.0"

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            format_float(float("nan"))
        with pytest.raises(ValueError):
            format_float(float("inf"))


class TestCanonicalJson:
    def test_sorted_keys_and_parse(self):
        text = canonical_json({"b": 1, "a": [1.5, None, True]})
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [1.5, None, True], "b": 1}

    def test_byte_identical(self):
        obj = {"x": 1 / 7, "y": [1, 2, 3], "z": {"k": "v"}}
        assert canonical_json(obj) == canonical_json(obj)

    def test_numpy_values(self):
        obj = {"arr": np.arange(3), "f": np.float64(0.25), "b": np.bool_(True)}
        assert json.loads(canonical_json(obj)) == {"arr": [0, 1, 2], "b": True, "f": 0.25}

    def test_domain_types_embed(self):
        A = DenseSubset.from_members(SP32, [0, 1, 2])
        H = SubspaceBasis.from_rows(SP32, [[1, 0]])
        parsed = json.loads(canonical_json({"set": A, "H": H}))
        assert parsed["set"]["members"] == [0, 1, 2]
        assert parsed["H"]["rows"] == [[1, 0]]

    def test_dataclass_reports(self):
        rep = regularize(DenseSubset.from_members(SP32, [0, 1, 2]), 0.5, 1.0)
        parsed = json.loads(canonical_json(to_jsonable(rep)))
        assert parsed["energy_trace"] == [1.0, 3.0]
        assert parsed["H_final"]["rows"] == [[1, 0]]

    def test_rejects_unknown_types(self):
        with pytest.raises(TypeError):
            canonical_json({"bad": object()})


class TestRows:
    def test_header_only(self):
        assert render_rows(("a", "b"), []) == "a,b\n"

    def test_cells(self):
        text = render_rows(("i", "x", "ok"), [(1, 0.5, True), (2, 1 / 3, False)])
        lines = text.splitlines()
        assert lines[0] == "i,x,ok"
        assert lines[1] == "1,0.5,1"
        assert lines[2] == "2,0.333333333333,0"
