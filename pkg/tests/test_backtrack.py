from __future__ import annotations

from relkit.models.permutation import Permutation
from relkit.services.backtrack import automorphism_group, intersection, search_subgroup
from relkit.services.permgroup import PermutationGroup


def _edges(n: int) -> dict[int, int]:
    return {(1 << i) | (1 << ((i + 1) % n)): 0 for i in range(n)}


class TestSearchSubgroup:
    def test_even_permutations(self):
        s5 = PermutationGroup.symmetric(5)
        alt = search_subgroup(s5, lambda w: Permutation(w).is_even)
        assert alt.order == 60
        assert alt.same_group(PermutationGroup.alternating(5))

    def test_point_stabilizer_with_prune(self):
        s6 = PermutationGroup.symmetric(6)
        base = s6.base

        def prune(depth, images):
            return base[depth] != 0 or images[depth] == 0

        stab = search_subgroup(s6, lambda w: w[0] == 0, prune)
        assert stab.order == 120

    def test_seed_is_kept(self):
        s4 = PermutationGroup.symmetric(4)
        seed = PermutationGroup.cyclic(4)
        d8 = search_subgroup(
            s4,
            lambda w: all(Permutation(w).image_of_mask(m) in _edges(4) for m in _edges(4)),
            seed=seed,
        )
        assert d8.order == 8
        assert seed.is_subgroup_of(d8)


class TestIntersection:
    def test_a4_meets_d8_in_klein(self):
        meet = intersection(PermutationGroup.alternating(4), PermutationGroup.dihedral(4))
        assert meet.order == 4

    def test_trivial_meet(self):
        c3 = PermutationGroup([Permutation.from_cycles(4, [(0, 1, 2)])], degree=4)
        c2 = PermutationGroup([Permutation.from_cycles(4, [(0, 3)])], degree=4)
        assert intersection(c3, c2).order == 1


class TestAutomorphismGroup:
    def test_polygon_edges(self):
        for n in (5, 6, 7):
            assert automorphism_group(n, _edges(n)).order == 2 * n

    def test_empty_family_gives_symmetric(self):
        assert automorphism_group(4, {}).order == 24

    def test_full_and_empty_sets_are_ignored(self):
        assert automorphism_group(3, {0: 0, 0b111: 0}).order == 6

    def test_colors_separate_orbits(self):
        # edges of the square in one color, diagonals in another: still D8
        colors = {**_edges(4), 0b0101: 1, 0b1010: 1}
        assert automorphism_group(4, colors).order == 8
        # one diagonal marked differently breaks the symmetry to order 4
        colors[0b1010] = 2
        assert automorphism_group(4, colors).order == 4

    def test_threads_do_not_change_result(self):
        single = automorphism_group(7, _edges(7))
        pooled = automorphism_group(7, _edges(7), threads=2)
        assert single.same_group(pooled)

    def test_seed_is_respected(self):
        seed = PermutationGroup.cyclic(6)
        result = automorphism_group(6, _edges(6), seed=seed)
        assert result.order == 12
        assert seed.is_subgroup_of(result)
