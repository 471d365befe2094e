from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from relkit.models.subset import Relation, Subset

if TYPE_CHECKING:
    from relkit.services.permgroup import PermutationGroup


def _points(mask: int, degree: int) -> list[int]:
    """1-based point list, the file and CLI convention."""
    return [i + 1 for i in range(degree) if mask >> i & 1]


def relation_to_dict(relation: Relation) -> dict[str, Any]:
    """The relation file format: ``{degree, sets}`` with 1-based points."""
    return {
        "degree": relation.degree,
        "sets": [[p + 1 for p in s] for s in relation.to_lists()],
    }


@dataclass(frozen=True, eq=False)
class OrbitPartition:
    """Orbits of a group on one layer of P(Omega), or on all of it when ``layer`` is None.

    ``masks`` is sorted ascending; ``orbit_ids[i]`` is the orbit of ``masks[i]``.
    Orbits are numbered by their least mask, which is the representative.
    """

    degree: int
    layer: int | None
    masks: np.ndarray
    orbit_ids: np.ndarray
    representatives: tuple[int, ...]
    lengths: tuple[int, ...]

    @property
    def orbit_count(self) -> int:
        return len(self.representatives)

    @property
    def universe_size(self) -> int:
        return int(self.masks.size)

    def orbit_of(self, subset: Subset | int) -> int:
        mask = subset.mask if isinstance(subset, Subset) else subset
        i = int(np.searchsorted(self.masks, mask))
        if i >= self.masks.size or int(self.masks[i]) != mask:
            raise KeyError(f"Mask {mask:#x} is outside this partition's universe")
        return int(self.orbit_ids[i])

    def members(self, orbit_id: int) -> list[int]:
        return [int(m) for m in self.masks[self.orbit_ids == orbit_id]]

    def color_map(self) -> dict[int, int]:
        return dict(zip(self.masks.tolist(), self.orbit_ids.tolist(), strict=True))

    def same_partition(self, other: OrbitPartition) -> bool:
        return (
            self.degree == other.degree
            and self.layer == other.layer
            and np.array_equal(self.masks, other.masks)
            and np.array_equal(self.orbit_ids, other.orbit_ids)
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "layer": self.layer,
            "orbit_count": self.orbit_count,
            "orbits": [
                {"representative": _points(rep, self.degree), "length": length}
                for rep, length in zip(self.representatives, self.lengths, strict=True)
            ],
        }


@dataclass(frozen=True)
class RegularSetCensus:
    """Exact count of regular subsets per size."""

    degree: int
    group_order: int
    regular_count_by_size: tuple[int, ...]
    first_regular_by_size: dict[int, int] = field(default_factory=dict)
    work: int = 0

    @property
    def sizes_with_regular(self) -> frozenset[int]:
        return frozenset(k for k, c in enumerate(self.regular_count_by_size) if c > 0)

    @property
    def total_regular(self) -> int:
        return sum(self.regular_count_by_size)

    @property
    def has_regular_set(self) -> bool:
        return self.total_regular > 0

    def first_regular(self, size: int) -> Subset | None:
        mask = self.first_regular_by_size.get(size)
        return None if mask is None else Subset(self.degree, mask)

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "group_order": self.group_order,
            "regular_count_by_size": {
                str(k): c for k, c in enumerate(self.regular_count_by_size) if c
            },
            "sizes_with_regular": sorted(self.sizes_with_regular),
            "first_regular_by_size": {
                str(k): _points(m, self.degree)
                for k, m in sorted(self.first_regular_by_size.items())
            },
            "total_regular": self.total_regular,
            "work": self.work,
        }


@dataclass(frozen=True)
class RelationGroupReport:
    group_order: int
    closure_order: int
    witness_relation: Relation | None
    exact: bool = True
    orbit_closure_order: int | None = None

    @property
    def r_of_G(self) -> int:
        return self.closure_order // self.group_order

    @property
    def is_relation_group(self) -> bool:
        return self.closure_order == self.group_order

    def to_dict(self) -> dict[str, Any]:
        witness = self.witness_relation
        return {
            "group_order": self.group_order,
            "closure_order": self.closure_order,
            "is_relation_group": self.is_relation_group,
            "r_of_G": self.r_of_G,
            "exact": self.exact,
            "orbit_closure_order": self.orbit_closure_order,
            "witness_relation": None if witness is None else relation_to_dict(witness),
        }


@dataclass(frozen=True)
class ClosureReport:
    degree: int
    group_order: int
    k_closures: dict[int, int]
    star_order: int

    @property
    def c_of_G(self) -> int:
        return self.star_order // self.group_order

    @property
    def orbit_closed(self) -> bool:
        return self.star_order == self.group_order

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "group_order": self.group_order,
            "k_closures": {str(k): v for k, v in sorted(self.k_closures.items())},
            "star_order": self.star_order,
            "c_of_G": self.c_of_G,
            "orbit_closed": self.orbit_closed,
        }


@dataclass(frozen=True, eq=False)
class WreathAction:
    """K wr L on Delta x Sigma with point (delta, i) numbered delta + d*i."""

    K: PermutationGroup
    L: PermutationGroup
    group: PermutationGroup

    @property
    def d(self) -> int:
        return self.K.degree

    @property
    def s(self) -> int:
        return self.L.degree

    @property
    def degree(self) -> int:
        return self.d * self.s

    def point(self, delta: int, i: int) -> int:
        return delta + self.d * i

    def block(self, i: int) -> frozenset[int]:
        return frozenset(range(self.d * i, self.d * (i + 1)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "s": self.s,
            "degree": self.degree,
            "K_order": self.K.order,
            "L_order": self.L.order,
            "order": self.group.order,
        }


@dataclass(frozen=True, eq=False)
class ChainLink:
    group: PermutationGroup

    @property
    def degree(self) -> int:
        return self.group.degree

    @property
    def order(self) -> int:
        return self.group.order


@dataclass(frozen=True, eq=False)
class ImprimitivityChain:
    """Primitive links (K0, ..., Kt) with H inside K0 wr (K1 wr (... wr Kt))."""

    links: tuple[ChainLink, ...]
    multiplicity: int = 1

    @property
    def length(self) -> int:
        return len(self.links) - 1

    @property
    def degree(self) -> int:
        out = 1
        for link in self.links:
            out *= link.degree
        return out

    def signature(self) -> tuple[tuple[int, int], ...]:
        return tuple((link.degree, link.order) for link in self.links)

    def to_dict(self) -> dict[str, Any]:
        return {
            "length": self.length,
            "links": [{"degree": d, "order": o} for d, o in self.signature()],
            "multiplicity": self.multiplicity,
        }


@dataclass(frozen=True)
class ChainEnumeration:
    chains: tuple[ImprimitivityChain, ...]
    truncated: bool = False
    collisions: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "chains": [c.to_dict() for c in self.chains],
            "truncated": self.truncated,
            "collisions": self.collisions,
        }


@dataclass(frozen=True)
class ListAMembership:
    """Computed membership of one primitive link in the exceptional collections."""

    degree: int
    order: int
    is_sym_or_alt: bool
    in_L_NR: bool | None
    in_L_SR: bool | None
    is_explicit_small: bool
    solvable: bool

    @property
    def in_A(self) -> bool | None:
        if self.is_sym_or_alt and self.degree >= 2:
            return True
        if self.is_explicit_small or self.in_L_NR or self.in_L_SR:
            return True
        if self.in_L_NR is None or self.in_L_SR is None:
            return None
        return False

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "order": self.order,
            "is_sym_or_alt": self.is_sym_or_alt,
            "in_L_NR": self.in_L_NR,
            "in_L_SR": self.in_L_SR,
            "is_explicit_small": self.is_explicit_small,
            "solvable": self.solvable,
            "in_A": self.in_A,
        }


@dataclass
class RunReport:
    """What a CLI command emits: the comparable section plus timing kept apart."""

    command: str
    inputs: dict[str, Any]
    results: dict[str, Any] = field(default_factory=dict)
    caps_hit: list[str] = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "caps_hit": self.caps_hit,
            "timing": self.timing,
        }


@dataclass(frozen=True)
class Classification:
    """Label of H against one exceptional collection, with the evidence per chain."""

    collection: str
    label: str
    chains: ChainEnumeration
    memberships: tuple[tuple[ListAMembership, ...], ...]
    verdicts: tuple[tuple[bool | None, ...], ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "collection": self.collection,
            "label": self.label,
            "truncated": self.chains.truncated,
            "chains": [
                {
                    **chain.to_dict(),
                    "links_in_collection": list(verdict),
                    "memberships": [m.to_dict() for m in links],
                }
                for chain, links, verdict in zip(
                    self.chains.chains, self.memberships, self.verdicts, strict=True
                )
            ],
        }
