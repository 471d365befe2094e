from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from functools import cached_property

from relkit.models.permutation import Permutation


@dataclass(frozen=True, order=True)
class Subset:
    """An element of P(Omega) for Omega = {0..n-1}, stored as an n-bit mask."""

    degree: int
    mask: int

    def __post_init__(self) -> None:
        if self.mask < 0 or self.mask >> self.degree:
            raise ValueError(f"Mask {self.mask:#x} has bits outside 0..{self.degree - 1}")

    @classmethod
    def from_points(cls, degree: int, points: Iterable[int]) -> Subset:
        mask = 0
        for p in points:
            if not 0 <= p < degree:
                raise ValueError(f"Point {p} outside 0..{degree - 1}")
            mask |= 1 << p
        return cls(degree, mask)

    @classmethod
    def empty(cls, degree: int) -> Subset:
        return cls(degree, 0)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def __len__(self) -> int:
        return self.size

    def __contains__(self, point: int) -> bool:
        return bool(self.mask >> point & 1)

    @property
    def points(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.degree) if self.mask >> i & 1)

    def complement(self) -> Subset:
        return Subset(self.degree, ((1 << self.degree) - 1) ^ self.mask)

    def image(self, g: Permutation) -> Subset:
        if g.degree != self.degree:
            from relkit.services.exceptions import DegreeMismatchError

            raise DegreeMismatchError(self.degree, g.degree)
        return Subset(self.degree, g.image_of_mask(self.mask))

    def __repr__(self) -> str:
        return f"Subset({set(self.points) or '{}'}@{self.degree})"


@dataclass(frozen=True)
class Relation:
    """An unordered relation: a finite family of distinct subsets of one point set."""

    degree: int
    masks: frozenset[int]

    def __post_init__(self) -> None:
        limit = 1 << self.degree
        for m in self.masks:
            if m < 0 or m >= limit:
                raise ValueError(f"Mask {m:#x} has bits outside 0..{self.degree - 1}")

    @classmethod
    def from_subsets(cls, degree: int, subsets: Iterable[Subset]) -> Relation:
        masks: list[int] = []
        for s in subsets:
            if s.degree != degree:
                from relkit.services.exceptions import DegreeMismatchError

                raise DegreeMismatchError(degree, s.degree)
            masks.append(s.mask)
        return cls._from_masks(degree, masks)

    @classmethod
    def from_points(cls, degree: int, sets: Iterable[Iterable[int]]) -> Relation:
        return cls.from_subsets(degree, (Subset.from_points(degree, s) for s in sets))

    @classmethod
    def _from_masks(cls, degree: int, masks: list[int]) -> Relation:
        unique = frozenset(masks)
        if len(unique) != len(masks):
            raise ValueError("Relation contains duplicate sets")
        return cls(degree, unique)

    @classmethod
    def empty(cls, degree: int) -> Relation:
        return cls(degree, frozenset())

    def __len__(self) -> int:
        return len(self.masks)

    def __contains__(self, item: Subset | int) -> bool:
        mask = item.mask if isinstance(item, Subset) else item
        return mask in self.masks

    def __iter__(self):
        for m in sorted(self.masks):
            yield Subset(self.degree, m)

    @cached_property
    def layers(self) -> dict[int, frozenset[int]]:
        """Masks grouped by set size."""
        out: dict[int, set[int]] = {}
        for m in self.masks:
            out.setdefault(m.bit_count(), set()).add(m)
        return {k: frozenset(v) for k, v in sorted(out.items())}

    @property
    def arity(self) -> frozenset[int]:
        return frozenset(self.layers)

    @property
    def m_R(self) -> int:
        return max(self.arity, default=0)

    @property
    def is_trivial(self) -> bool:
        """True when every occurring size contributes its whole layer."""
        from math import comb

        return all(len(v) == comb(self.degree, k) for k, v in self.layers.items())

    def complement_image(self) -> Relation:
        full = (1 << self.degree) - 1
        return Relation(self.degree, frozenset(full ^ m for m in self.masks))

    def union(self, other: Relation) -> Relation:
        if other.degree != self.degree:
            from relkit.services.exceptions import DegreeMismatchError

            raise DegreeMismatchError(self.degree, other.degree)
        return Relation(self.degree, self.masks | other.masks)

    def __or__(self, other: Relation) -> Relation:
        return self.union(other)

    def is_preserved_by(self, g: Permutation) -> bool:
        return all(g.image_of_mask(m) in self.masks for m in self.masks)

    def to_lists(self) -> list[list[int]]:
        return [list(Subset(self.degree, m).points) for m in sorted(self.masks)]

    def __repr__(self) -> str:
        return f"Relation({len(self.masks)} sets, arity={sorted(self.arity)}@{self.degree})"
