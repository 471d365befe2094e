from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0..n-1} stored as its image table.

    Permutations act on the right: ``x^(pq) = (x^p)^q``, so ``p * q`` applies
    ``p`` first.
    """

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"Not a permutation of 0..{len(self.images) - 1}: {self.images}")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> Permutation:
        """Build a permutation of degree *n* from 0-based cycles.

        Cycles need not be disjoint; they are composed left to right.
        """
        images = list(range(n))
        for cycle in cycles:
            step = list(range(n))
            for i, point in enumerate(cycle):
                if not 0 <= point < n:
                    raise ValueError(f"Point {point} outside 0..{n - 1}")
                step[point] = cycle[(i + 1) % len(cycle)]
            images = [step[i] for i in images]
        return cls(tuple(images))

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __invert__(self) -> Permutation:
        return inverse(self)

    def __pow__(self, exponent: int) -> Permutation:
        result = Permutation.identity(self.degree)
        base = self if exponent >= 0 else inverse(self)
        for _ in range(abs(exponent)):
            result = compose(result, base)
        return result

    @property
    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.images))

    @cached_property
    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Disjoint cycles including fixed points, each starting at its least point."""
        seen: set[int] = set()
        out: list[tuple[int, ...]] = []
        for start in range(self.degree):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = self.images[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self.images[nxt]
            out.append(tuple(cycle))
        return tuple(out)

    @property
    def cycle_count(self) -> int:
        return len(self.cycles)

    @property
    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles)) if self.degree else 1

    @property
    def is_even(self) -> bool:
        return (self.degree - self.cycle_count) % 2 == 0

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.images) if i != p)

    def image_of_mask(self, mask: int) -> int:
        out = 0
        images = self.images
        while mask:
            low = mask & -mask
            out |= 1 << images[low.bit_length() - 1]
            mask ^= low
        return out

    def __repr__(self) -> str:
        moved = [c for c in self.cycles if len(c) > 1]
        body = "".join("(" + " ".join(map(str, c)) + ")" for c in moved) or "()"
        return f"Permutation({body}@{self.degree})"


def _check_degrees(p: Permutation, q: Permutation) -> None:
    if p.degree != q.degree:
        from relkit.services.exceptions import DegreeMismatchError

        raise DegreeMismatchError(p.degree, q.degree)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return ``p`` followed by ``q``: the result maps i to q(p(i))."""
    _check_degrees(p, q)
    return Permutation(tuple(map(q.images.__getitem__, p.images)))


def inverse(p: Permutation) -> Permutation:
    out = [0] * p.degree
    for i, image in enumerate(p.images):
        out[image] = i
    return Permutation(tuple(out))


def identity(n: int) -> Permutation:
    return Permutation.identity(n)


@dataclass(frozen=True)
class BlockSystem:
    """A partition of {0..n-1} into cells of one common size."""

    degree: int
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.blocks, key=min))
        object.__setattr__(self, "blocks", ordered)
        sizes = {len(b) for b in ordered}
        if len(sizes) != 1:
            raise ValueError(f"Blocks must share one size, got sizes {sorted(sizes)}")
        covered = sorted(p for b in ordered for p in b)
        if covered != list(range(self.degree)):
            raise ValueError("Blocks must be disjoint and cover every point")

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def block_of(self, point: int) -> frozenset[int]:
        for block in self.blocks:
            if point in block:
                return block
        raise ValueError(f"Point {point} outside 0..{self.degree - 1}")

    def index_of(self, point: int) -> int:
        for i, block in enumerate(self.blocks):
            if point in block:
                return i
        raise ValueError(f"Point {point} outside 0..{self.degree - 1}")

    def is_preserved_by(self, p: Permutation) -> bool:
        cells = set(self.blocks)
        return all(frozenset(p.images[x] for x in block) in cells for block in self.blocks)

    def to_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.blocks]
