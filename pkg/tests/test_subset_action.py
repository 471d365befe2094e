from __future__ import annotations

import numpy as np
import pytest

from relkit.config import Limits
from relkit.models.subset import Subset
from relkit.services import catalog
from relkit.services.exceptions import CapExceededError, DegreeMismatchError, PreconditionError
from relkit.services.permgroup import PermutationGroup
from relkit.services.subset_action import (
    burnside_orbit_count,
    has_regular_set_sampling,
    has_regular_set_two_sizes,
    image_masks,
    is_regular_set,
    is_set_transitive,
    layer_masks,
    orbit_of_subset,
    orbits_on_k_subsets,
    orbits_on_power_set,
    popcount,
    regular_set_census,
    setwise_stabilizer,
)
from relkit.utils.parsing import parse_permutation


class TestBitHelpers:
    def test_popcount(self):
        values = np.array([0, 1, 0b1011, (1 << 20) - 1], dtype=np.int64)
        assert popcount(values).tolist() == [0, 1, 3, 20]

    def test_layer_masks(self):
        masks = layer_masks(4, 2)
        assert masks.tolist() == [3, 5, 6, 9, 10, 12]

    def test_image_masks(self):
        g = parse_permutation("(1,2,3)@3")
        assert image_masks(np.array([1, 3], dtype=np.int64), g).tolist() == [2, 6]


class TestOrbits:
    def test_orbit_of_subset(self, c5):
        orbit = orbit_of_subset(c5, Subset.from_points(5, [0, 1]))
        assert len(orbit) == 5
        assert all(s.size == 2 for s in orbit)

    def test_orbit_degree_mismatch(self, c5):
        with pytest.raises(DegreeMismatchError):
            orbit_of_subset(c5, Subset.empty(4))

    def test_c5_on_pairs(self, c5):
        part = orbits_on_k_subsets(c5, 2)
        assert part.orbit_count == 2
        assert part.representatives == (0b00011, 0b00101)
        assert part.lengths == (5, 5)

    def test_layer_out_of_range(self, c5):
        with pytest.raises(PreconditionError) as exc:
            orbits_on_k_subsets(c5, 6)
        assert exc.value.check == "parameter"

    def test_power_set_orbits_match_burnside(self, c5, d10):
        for group in (c5, d10, PermutationGroup.symmetric(4), PermutationGroup.cyclic(6)):
            part = orbits_on_power_set(group)
            assert part.orbit_count == burnside_orbit_count(group)
            assert sum(part.lengths) == 1 << group.degree

    def test_burnside_counts(self, c5):
        # (2^5 + 4 * 2) / 5
        assert burnside_orbit_count(c5) == 8

    def test_universe_cap(self, c5):
        with pytest.raises(CapExceededError) as exc:
            orbits_on_power_set(c5, Limits(orbit_universe_cap=16))
        assert exc.value.cap == "orbit_universe_cap"
        assert exc.value.required == 32


class TestStabilizers:
    def test_setwise_stabilizer_of_edge(self, d10):
        stab = setwise_stabilizer(d10, Subset.from_points(5, [0, 1]))
        assert stab.order == 2

    def test_setwise_stabilizer_by_backtrack(self):
        limits = Limits(setwise_iteration_cap=1)
        stab = setwise_stabilizer(PermutationGroup.symmetric(6), Subset(6, 0b000111), limits)
        assert stab.order == 36

    def test_regular_sets(self, c5, d10):
        edge = Subset.from_points(5, [0, 1])
        assert is_regular_set(c5, edge)
        assert not is_regular_set(d10, edge)

    def test_regular_by_backtrack(self, c5):
        limits = Limits(setwise_iteration_cap=1)
        assert is_regular_set(c5, Subset.from_points(5, [0, 2]), limits)


class TestCensus:
    def test_dihedral_pentagon_has_none(self, d10):
        census = regular_set_census(d10)
        assert not census.has_regular_set
        assert census.sizes_with_regular == frozenset()

    def test_c5_counts(self, c5):
        census = regular_set_census(c5)
        assert census.regular_count_by_size == (0, 5, 10, 10, 5, 0)
        assert census.first_regular(2) == Subset(5, 0b00011)

    def test_census_agrees_with_orbit_lengths(self):
        group = PermutationGroup.dihedral(6)
        census = regular_set_census(group)
        naive = [0] * 7
        for mask in range(1 << 6):
            if len(orbit_of_subset(group, Subset(6, mask))) == group.order:
                naive[mask.bit_count()] += 1
        assert list(census.regular_count_by_size) == naive

    def test_threads_give_same_census(self):
        group = catalog.load("F21@7")
        single = regular_set_census(group)
        pooled = regular_set_census(group, Limits(threads=3))
        assert single.regular_count_by_size == pooled.regular_count_by_size

    def test_work_cap(self, d10):
        with pytest.raises(CapExceededError) as exc:
            regular_set_census(d10, Limits(census_work_cap=8))
        assert exc.value.cap == "census_work_cap"

    def test_work_charged_per_prime_cyclic_subgroup(self, d10):
        # one 5-cycle (2^1) plus five reflections (2^3 each)
        regular_set_census(d10, Limits(census_work_cap=42))
        with pytest.raises(CapExceededError) as exc:
            regular_set_census(d10, Limits(census_work_cap=41))
        assert exc.value.required == 42

    def test_degree_cap(self, c5):
        with pytest.raises(CapExceededError, match="sampling"):
            regular_set_census(c5, Limits(census_max_degree=4))

    def test_two_sizes(self, c5, d10):
        assert has_regular_set_two_sizes(c5)
        assert not has_regular_set_two_sizes(d10)


class TestSampling:
    def test_finds_verified_regular_set(self, c5):
        found = has_regular_set_sampling(c5, samples=200, seed=1)
        assert found is not None
        assert is_regular_set(c5, found)

    def test_none_when_there_is_none(self, d10):
        assert has_regular_set_sampling(d10, samples=50) is None


class TestSetTransitive:
    def test_f20(self):
        assert is_set_transitive(catalog.load("F20@5"))

    def test_d10(self, d10):
        assert not is_set_transitive(d10)

    def test_symmetric(self):
        assert is_set_transitive(PermutationGroup.symmetric(6))
