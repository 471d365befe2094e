from __future__ import annotations

import json

import pytest

from relkit.models.permutation import Permutation
from relkit.services.exceptions import ParseError, UnknownGroupError
from relkit.utils.parsing import (
    group_from_dict,
    load_group_file,
    load_relation,
    parse_generators,
    parse_group_spec,
    parse_permutation,
    relation_from_dict,
)


class TestParsePermutation:
    def test_cycles_with_degree(self):
        assert parse_permutation("(1,2,3)(4,5)@6").images == (1, 2, 0, 4, 3, 5)

    def test_space_separated(self):
        assert parse_permutation("(1 2 3)") == parse_permutation("(1,2,3)")

    def test_degree_inferred(self):
        assert parse_permutation("(2,4)").degree == 4

    def test_degree_argument_pads(self):
        assert parse_permutation("(1,2)", degree=5).degree == 5

    def test_identity(self):
        assert parse_permutation("()@3") == Permutation.identity(3)

    def test_composes_left_to_right(self):
        assert parse_permutation("(1,2)(2,3)").images == (2, 0, 1)

    @pytest.mark.parametrize(
        ("text", "message"),
        [
            ("(0,1)", "numbered from 1"),
            ("(1,2,1)", "repeated"),
            ("(1,2", "Expected"),
            ("(1,5)@4", "exceeds the declared degree"),
        ],
    )
    def test_errors(self, text, message):
        with pytest.raises(ParseError, match=message):
            parse_permutation(text)

    def test_error_position(self):
        with pytest.raises(ParseError) as exc:
            parse_permutation("(1,2)x")
        assert exc.value.position == 5


class TestParseGenerators:
    def test_semicolons(self):
        gens = parse_generators("(1,2,3);(1,2)")
        assert [g.degree for g in gens] == [3, 3]

    def test_comma_between_permutations(self):
        assert len(parse_generators("(1,2,3,4), (1,3)")) == 2

    def test_padded_to_common_degree(self):
        gens = parse_generators("(1,2);(3,4)@5")
        assert {g.degree for g in gens} == {5}


class TestParseGroupSpec:
    @pytest.mark.parametrize(
        ("spec", "order"),
        [
            ("Sym(4)", 24),
            ("alt(5)", 60),
            ("Cyclic(6)", 6),
            ("dihedral(5)", 10),
            ("F20@5", 20),
            ("Klein@4", 4),
            ("(1,2,3,4,5);(2,5)(3,4)", 10),
            ("wr(Cyclic(3), Cyclic(2))", 18),
            ("wr(wr(Sym(2),Sym(2)),Sym(2))", 128),
        ],
    )
    def test_orders(self, spec, order):
        assert parse_group_spec(spec).order == order

    def test_json_file(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text(json.dumps({"degree": 4, "generators": ["(1,2,3,4)", "(1,3)"]}))
        assert parse_group_spec(str(path)).order == 8

    def test_unknown(self):
        with pytest.raises(UnknownGroupError):
            parse_group_spec("Monster")

    def test_empty(self):
        with pytest.raises(ParseError):
            parse_group_spec("  ")

    def test_wreath_needs_two_arguments(self):
        with pytest.raises(ParseError, match="two groups"):
            parse_group_spec("wr(Sym(2))")


class TestFiles:
    def test_group_dict_degree_mismatch(self):
        with pytest.raises(ParseError):
            group_from_dict({"degree": 3, "generators": ["(1,2)@4"]})

    def test_group_dict_missing_keys(self):
        with pytest.raises(ParseError, match="degree"):
            group_from_dict({"generators": []})

    def test_relation(self, relation_file):
        relation = load_relation(relation_file(5, [[1, 2], [2, 3]]))
        assert relation.to_lists() == [[0, 1], [1, 2]]

    def test_relation_points_in_range(self):
        with pytest.raises(ParseError, match="outside"):
            relation_from_dict({"degree": 3, "sets": [[1, 4]]})

    def test_relation_duplicates(self):
        with pytest.raises(ParseError):
            relation_from_dict({"degree": 3, "sets": [[1, 2], [2, 1]]})

    def test_bad_json(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text("{")
        with pytest.raises(ParseError):
            load_group_file(path)
