from __future__ import annotations

import itertools
import random

import pytest

from relkit.config import Limits
from relkit.models.subset import Relation, Subset
from relkit.services import catalog
from relkit.services.backtrack import intersection
from relkit.services.exceptions import (
    CapExceededError,
    DegreeMismatchError,
    PreconditionError,
)
from relkit.services.permgroup import PermutationGroup
from relkit.services.relations import (
    basic_lemma_construct,
    basic_lemma_from_orbit,
    invariance_group,
    is_relation_group,
    orbit_relation,
    relation_closure,
)
from relkit.services.wreath import wreath_product
from relkit.utils.parsing import parse_generators

# A 3-set of the hexagon moved freely by D12: gaps 1, 2, 3 going around.
_FREE_TRIPLE = Subset.from_points(6, [0, 1, 3])


def _group(text: str, degree: int) -> PermutationGroup:
    return PermutationGroup(parse_generators(f"{text}@{degree}"), degree=degree)


def _smallest_invariance_order(group: PermutationGroup) -> int:
    """min |G(R)| over every union R of orbits on P(Omega), by enumeration."""
    n = group.degree
    full = (1 << n) - 1
    elements = list(group.elements())
    seen: set[int] = {0, full}
    orbits = []
    for mask in range(1, full):
        if mask not in seen:
            orbit = frozenset(g.image_of_mask(mask) for g in elements)
            seen |= orbit
            orbits.append(orbit)
    images = [
        [p.image_of_mask(m) for m in range(full + 1)]
        for p in PermutationGroup.symmetric(n).elements()
    ]
    best = len(images)
    for r in range(1, len(orbits) + 1):
        for combo in itertools.combinations(orbits, r):
            relation = frozenset().union(*combo)
            order = sum(1 for img in images if all(img[m] in relation for m in relation))
            best = min(best, order)
    return best


def _random_relation(rng: random.Random, n: int, sizes: tuple[int, ...]) -> Relation:
    masks = [m for m in range(1 << n) if m.bit_count() in sizes]
    return Relation(n, frozenset(rng.sample(masks, max(1, len(masks) // 3))))


class TestInvarianceGroup:
    def test_polygons(self, pentagon, hexagon):
        assert invariance_group(pentagon).order == 10
        assert invariance_group(hexagon).same_group(PermutationGroup.dihedral(6))

    def test_empty_relation_gives_symmetric(self):
        assert invariance_group(Relation.empty(4)).order == 24

    def test_candidate_degree_mismatch(self, pentagon):
        with pytest.raises(DegreeMismatchError):
            invariance_group(pentagon, PermutationGroup.cyclic(4))

    def test_candidate_not_preserving_is_ignored(self, pentagon, caplog):
        wrong = PermutationGroup.symmetric(5)
        assert invariance_group(pentagon, wrong).order == 10
        assert "does not preserve" in caplog.text

    def test_degree_cap_without_candidate(self):
        relation = Relation.from_points(13, [[i, (i + 1) % 13] for i in range(13)])
        with pytest.raises(CapExceededError) as exc:
            invariance_group(relation)
        assert exc.value.cap == "max_degree_exhaustive"

    def test_candidate_reaches_past_cap(self, hexagon):
        limits = Limits(max_degree_exhaustive=5)
        group = invariance_group(hexagon, PermutationGroup.cyclic(6), limits)
        assert group.order == 12

    @pytest.mark.parametrize(("n", "seed"), [(4, 0), (5, 1), (5, 2), (6, 3)])
    def test_splits_by_arity(self, n, seed):
        rng = random.Random(seed)
        low = _random_relation(rng, n, (1, 2))
        high = _random_relation(rng, n, (3,))
        both = invariance_group(low | high)
        assert both.same_group(intersection(invariance_group(low), invariance_group(high)))

    @pytest.mark.parametrize(("n", "seed"), [(4, 4), (5, 5), (6, 6)])
    def test_complement_image_keeps_group(self, n, seed):
        relation = _random_relation(random.Random(seed), n, (1, 2, 4))
        assert invariance_group(relation).same_group(
            invariance_group(relation.complement_image())
        )

    def test_orbit_relation(self, c5):
        relation = orbit_relation(c5, Subset.from_points(5, [0, 1]))
        assert len(relation) == 5
        assert relation.arity == frozenset({2})


class TestRelationClosure:
    def test_klein_is_not_a_relation_group(self, klein):
        report = relation_closure(klein)
        assert report.r_of_G == 2
        assert report.orbit_closure_order == 4
        assert not is_relation_group(klein)

    def test_square_is_a_relation_group(self):
        report = relation_closure(catalog.load("D8@4"))
        assert report.is_relation_group
        assert report.exact
        witness = report.witness_relation
        assert invariance_group(witness).order == 8

    def test_c5_closes_to_d10(self, c5):
        report = relation_closure(c5)
        assert report.closure_order == 10
        assert report.r_of_G == 2

    def test_small_wreath_is_not_a_relation_group(self):
        group = wreath_product(PermutationGroup.cyclic(3), PermutationGroup.cyclic(2)).group
        assert relation_closure(group).r_of_G > 1

    def test_trivial_group_of_degree_3(self):
        report = relation_closure(PermutationGroup.trivial(3))
        assert report.is_relation_group
        assert report.exact
        assert invariance_group(report.witness_relation).order == 1

    @pytest.mark.parametrize(
        "group",
        [
            PermutationGroup.trivial(3),
            _group("(1,2)", 3),
            _group("(1,2)", 4),
            _group("(1,2)(3,4)", 4),
            _group("(1,2,3)", 4),
            _group("(1,2)(3,4);(1,3)(2,4)", 4),
            PermutationGroup.cyclic(4),
            PermutationGroup.cyclic(5),
            PermutationGroup.dihedral(5),
            _group("(1,2,3,4)", 5),
            pytest.param(PermutationGroup.cyclic(6), marks=pytest.mark.slow),
        ],
        ids=[
            "trivial-3", "swap-3", "swap-4", "double-swap-4", "3-cycle-4", "klein",
            "C4", "C5", "D10", "4-cycle-5", "C6",
        ],
    )
    def test_matches_enumeration_of_orbit_unions(self, group):
        report = relation_closure(group)
        assert report.exact
        assert report.closure_order == _smallest_invariance_order(group)
        assert invariance_group(report.witness_relation).order == report.closure_order

    def test_union_cap_without_greedy(self, klein):
        with pytest.raises(CapExceededError) as exc:
            relation_closure(klein, Limits(union_search_cap=0))
        assert exc.value.cap == "union_search_cap"

    def test_greedy_is_an_upper_bound(self, klein):
        report = relation_closure(klein, Limits(union_search_cap=0), allow_greedy=True)
        assert not report.exact
        assert report.closure_order == 8

    def test_degree_cap(self):
        with pytest.raises(CapExceededError):
            relation_closure(PermutationGroup.cyclic(6), Limits(max_degree_exhaustive=5))


class TestBasicLemma:
    def test_free_triple_is_regular(self):
        d12 = PermutationGroup.dihedral(6)
        assert len(orbit_relation(d12, _FREE_TRIPLE)) == 12

    @pytest.mark.parametrize("g", [PermutationGroup.cyclic(6), PermutationGroup.trivial(6)])
    def test_defines_subgroup(self, hexagon, g):
        d12 = PermutationGroup.dihedral(6)
        relation = basic_lemma_construct(d12, hexagon, _FREE_TRIPLE, g)
        assert invariance_group(relation, g).same_group(g)
        assert relation.arity == frozenset({2, 3})

    def test_from_orbit_matches_direct(self, hexagon):
        d12 = PermutationGroup.dihedral(6)
        c6 = PermutationGroup.cyclic(6)
        direct = basic_lemma_construct(d12, hexagon, _FREE_TRIPLE, c6)
        assert basic_lemma_from_orbit(d12, _FREE_TRIPLE, c6) == direct

    @pytest.mark.parametrize(
        ("g", "relation", "w", "check"),
        [
            (
                PermutationGroup.symmetric(6),
                None,
                _FREE_TRIPLE,
                "not-subgroup",
            ),
            (
                PermutationGroup.cyclic(6),
                Relation.from_points(6, [[0, 1]]),
                _FREE_TRIPLE,
                "not-invariance-group",
            ),
            (
                PermutationGroup.cyclic(6),
                None,
                Subset.from_points(6, [0, 1]),
                "not-regular",
            ),
        ],
    )
    def test_preconditions(self, hexagon, g, relation, w, check):
        d12 = PermutationGroup.dihedral(6)
        with pytest.raises(PreconditionError) as exc:
            basic_lemma_construct(d12, relation or hexagon, w, g)
        assert exc.value.check == check

    def test_arity_clash(self, hexagon):
        d12 = PermutationGroup.dihedral(6)
        triangles = Relation.from_points(6, [[0, 2, 4], [1, 3, 5]])
        relation = hexagon | triangles
        assert invariance_group(relation).same_group(d12)
        with pytest.raises(PreconditionError) as exc:
            basic_lemma_construct(d12, relation, _FREE_TRIPLE, PermutationGroup.cyclic(6))
        assert exc.value.check == "arity-clash"

    def test_degree_mismatch(self, hexagon):
        with pytest.raises(DegreeMismatchError):
            basic_lemma_construct(
                PermutationGroup.dihedral(6), hexagon, _FREE_TRIPLE, PermutationGroup.cyclic(5)
            )

    def test_from_orbit_without_candidate(self):
        s4 = PermutationGroup.symmetric(4)
        with pytest.raises(PreconditionError) as exc:
            basic_lemma_from_orbit(s4, Subset.from_points(4, [0]), PermutationGroup.trivial(4))
        assert exc.value.check == "hypothesis"
