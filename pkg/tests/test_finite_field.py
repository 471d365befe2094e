from __future__ import annotations

import pytest

from relkit.services import finite_field as ff
from relkit.services.permgroup import PermutationGroup


class TestField:
    @pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11])
    def test_multiplicative_group_is_cyclic(self, q):
        f = ff.field(q)
        g = f.primitive_element()
        powers = {f.power(g, e) for e in range(q - 1)}
        assert powers == set(range(1, q))

    @pytest.mark.parametrize("q", [4, 8, 9])
    def test_inverses(self, q):
        f = ff.field(q)
        assert all(f.mul(a, f.inv(a)) == 1 for a in range(1, q))

    def test_zero_has_no_inverse(self):
        with pytest.raises(ZeroDivisionError):
            ff.field(5).inv(0)

    def test_additive_structure(self):
        f = ff.field(9)
        assert all(f.sub(f.add(a, b), b) == a for a in range(9) for b in range(9))
        assert f.neg(0) == 0

    def test_frobenius_is_an_automorphism(self):
        f = ff.field(8)
        for a in range(8):
            for b in range(8):
                assert f.frobenius(f.mul(a, b)) == f.mul(f.frobenius(a), f.frobenius(b))
        assert f.frobenius(5, 3) == 5

    def test_squares(self):
        f = ff.field(11)
        assert {a for a in range(1, 11) if f.is_square(a)} == {1, 3, 4, 5, 9}

    @pytest.mark.parametrize("q", [0, 1, 6, 12])
    def test_not_a_field_order(self, q):
        with pytest.raises(ValueError):
            ff.field(q)


class TestActions:
    def test_affine_line_of_five(self):
        f = ff.field(5)
        group = PermutationGroup(
            [ff.affine_map(f, 1, 1), ff.affine_map(f, f.primitive_element(), 0)], degree=5
        )
        assert group.order == 20

    def test_mobius_fixes_infinity_when_c_is_zero(self):
        f = ff.field(7)
        g = ff.mobius_map(f, 2, 3, 0, 1)
        assert g(7) == 7
        assert g(0) == 3

    def test_inversion_swaps_zero_and_infinity(self):
        f = ff.field(7)
        g = ff.mobius_map(f, 0, f.neg(1), 1, 0)
        assert (g(0), g(7)) == (7, 0)

    def test_vector_indexing(self):
        rows = ff.vectors(3, 2)
        assert rows.shape == (9, 2)
        assert rows[5].tolist() == [2, 1]

    def test_translation(self):
        t = ff.translation(3, (1, 0))
        assert t(0) == 1
        assert t(2) == 0
        assert t.order == 3

    def test_sl2_3_from_transvections(self):
        gens = [ff.linear_map(3, m) for m in ff.transvections(3, 2)]
        assert PermutationGroup(gens, degree=9).order == 24

    def test_projective_plane_of_order_two(self):
        points = ff.projective_points(2, 3)
        assert len(points) == 7
        gens = [ff.projective_map(2, m) for m in ff.transvections(2, 3)]
        assert PermutationGroup(gens, degree=7).order == 168
