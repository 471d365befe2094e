"""Finitely generated permutation groups backed by a stabilizer chain.

The chain is built with the deterministic incremental Schreier-Sims scheme:
base points come from an optional hint and otherwise from the smallest point
moved by the generator that forces a new level. Nothing is randomized, so
chains (and everything derived from them) are reproducible.
"""

from __future__ import annotations

import hashlib
import itertools
import logging
import math
import random
from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from enum import StrEnum

from relkit.models.permutation import BlockSystem, Permutation
from relkit.services.exceptions import (
    CapExceededError,
    DegreeMismatchError,
    NotTransitiveError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

Images = tuple[int, ...]


def _mul(p: Images, q: Images) -> Images:
    return tuple(map(q.__getitem__, p))


def _inv(p: Images) -> Images:
    out = [0] * len(p)
    for i, image in enumerate(p):
        out[image] = i
    return tuple(out)


class ChainLevel:
    """One level of a stabilizer chain.

    ``transversal[p]`` maps the base point to ``p``; ``gens`` generate the
    pointwise stabilizer of all earlier base points.
    """

    __slots__ = ("_done", "base", "gens", "inverses", "transversal")

    def __init__(self, base: int, identity: Images) -> None:
        self.base = base
        self.gens: list[Images] = []
        self.transversal: dict[int, Images] = {base: identity}
        self.inverses: dict[int, Images] = {base: identity}
        self._done: set[tuple[int, int]] = set()

    @property
    def orbit(self) -> list[int]:
        return list(self.transversal)


class _StabilizerChain:
    def __init__(self, degree: int, base_hint: Sequence[int] = ()) -> None:
        self.degree = degree
        self.hint = tuple(base_hint)
        self.identity: Images = tuple(range(degree))
        self.levels: list[ChainLevel] = []

    def sift(self, g: Images, depth: int = 0) -> tuple[Images, int]:
        levels = self.levels
        for d in range(depth, len(levels)):
            level = levels[d]
            inv = level.inverses.get(g[level.base])
            if inv is None:
                return g, d
            g = _mul(g, inv)
        return g, len(levels)

    def contains(self, g: Images) -> bool:
        return self.sift(g)[0] == self.identity

    def _new_level(self, g: Images) -> ChainLevel:
        depth = len(self.levels)
        if depth < len(self.hint):
            base = self.hint[depth]
        else:
            base = next(i for i, image in enumerate(g) if i != image)
        level = ChainLevel(base, self.identity)
        self.levels.append(level)
        return level

    def extend(self, g: Images, depth: int = 0) -> None:
        if self.sift(g, depth)[0] == self.identity:
            return
        level = self.levels[depth] if depth < len(self.levels) else self._new_level(g)
        level.gens.append(g)

        transversal, inverses, gens = level.transversal, level.inverses, level.gens
        pending: list[int] = []
        for p in list(transversal):
            q = g[p]
            if q not in transversal:
                u = _mul(transversal[p], g)
                transversal[q] = u
                inverses[q] = _inv(u)
                pending.append(q)
        while pending:
            p = pending.pop()
            for s in gens:
                q = s[p]
                if q not in transversal:
                    u = _mul(transversal[p], s)
                    transversal[q] = u
                    inverses[q] = _inv(u)
                    pending.append(q)

        for p in list(transversal):
            for idx, s in enumerate(gens):
                if (p, idx) in level._done:
                    continue
                level._done.add((p, idx))
                schreier = _mul(_mul(transversal[p], s), inverses[s[p]])
                if schreier != self.identity:
                    self.extend(schreier, depth + 1)


class PermutationGroup:
    """A permutation group given by generators, with order and membership via its chain."""

    def __init__(
        self,
        generators: Iterable[Permutation],
        degree: int | None = None,
        *,
        base: Sequence[int] = (),
    ) -> None:
        gens = tuple(generators)
        if degree is None:
            if not gens:
                raise ValueError("Degree is required for a group without generators")
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise DegreeMismatchError(degree, g.degree)
        self._degree = degree
        self._generators = tuple(g for g in gens if not g.is_identity)
        self._chain = _StabilizerChain(degree, base)
        for g in self._generators:
            self._chain.extend(g.images)

    # --- construction helpers ---

    @classmethod
    def trivial(cls, n: int) -> PermutationGroup:
        return cls((), degree=n)

    @classmethod
    def symmetric(cls, n: int, *, base: Sequence[int] = ()) -> PermutationGroup:
        if n <= 1:
            return cls.trivial(n)
        gens = [Permutation.from_cycles(n, [(0, 1)])]
        if n > 2:
            gens.append(Permutation.from_cycles(n, [tuple(range(n))]))
        return cls(gens, degree=n, base=base)

    @classmethod
    def alternating(cls, n: int) -> PermutationGroup:
        if n < 3:
            return cls.trivial(n)
        return cls(
            [Permutation.from_cycles(n, [(0, 1, i)]) for i in range(2, n)],
            degree=n,
        )

    @classmethod
    def cyclic(cls, n: int) -> PermutationGroup:
        if n <= 1:
            return cls.trivial(n)
        return cls([Permutation.from_cycles(n, [tuple(range(n))])], degree=n)

    @classmethod
    def dihedral(cls, n: int) -> PermutationGroup:
        """Symmetries of the n-gon on its vertices (order 2n for n >= 3)."""
        if n <= 2:
            return cls.symmetric(n)
        rotation = Permutation.from_cycles(n, [tuple(range(n))])
        reflection = Permutation(tuple((-i) % n for i in range(n)))
        return cls([rotation, reflection], degree=n)

    def with_base(self, base: Sequence[int]) -> PermutationGroup:
        """Same group, chain rebuilt along *base*."""
        return PermutationGroup(self._generators, degree=self._degree, base=base)

    # --- basic data ---

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def generators(self) -> tuple[Permutation, ...]:
        return self._generators

    @property
    def levels(self) -> tuple[ChainLevel, ...]:
        return tuple(self._chain.levels)

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(level.base for level in self._chain.levels)

    @property
    def transversal_sizes(self) -> tuple[int, ...]:
        return tuple(len(level.transversal) for level in self._chain.levels)

    @property
    def order(self) -> int:
        return math.prod(self.transversal_sizes)

    def stabilizer_generators(self, depth: int) -> list[Permutation]:
        """Generators of the pointwise stabilizer of the first *depth* base points."""
        if depth >= len(self._chain.levels):
            return []
        return [Permutation(g) for g in self._chain.levels[depth].gens]

    def contains(self, p: Permutation) -> bool:
        if p.degree != self._degree:
            raise DegreeMismatchError(self._degree, p.degree)
        return self._chain.contains(p.images)

    def __contains__(self, p: Permutation) -> bool:
        return self.contains(p)

    def is_subgroup_of(self, other: PermutationGroup) -> bool:
        if other.degree != self._degree:
            raise DegreeMismatchError(other.degree, self._degree)
        return all(other.contains(g) for g in self._generators)

    def same_group(self, other: PermutationGroup) -> bool:
        return (
            other.degree == self._degree
            and other.order == self.order
            and other.is_subgroup_of(self)
        )

    def fingerprint(self) -> str:
        """Stable key: degree plus the sorted generator image tables."""
        tables = sorted(g.images for g in self._generators)
        body = ";".join(",".join(map(str, t)) for t in tables)
        digest = hashlib.sha1(f"{self._degree}|{body}".encode()).hexdigest()
        return f"{self._degree}:{digest[:20]}"

    # --- elements ---

    def iter_images(self) -> Iterator[Images]:
        levels = self._chain.levels
        if not levels:
            yield self._chain.identity
            return
        for choice in itertools.product(*(list(lv.transversal.values()) for lv in levels)):
            w = choice[0]
            for u in choice[1:]:
                w = _mul(u, w)
            yield w

    def elements(self) -> Iterator[Permutation]:
        for images in self.iter_images():
            yield Permutation(images)

    def random_element(self, rng: random.Random) -> Permutation:
        w = self._chain.identity
        for level in self._chain.levels:
            u = level.transversal[rng.choice(sorted(level.transversal))]
            w = _mul(u, w)
        return Permutation(w)

    # --- orbits ---

    def orbit(self, point: int) -> list[int]:
        seen = {point}
        queue = deque([point])
        while queue:
            p = queue.popleft()
            for g in self._generators:
                q = g.images[p]
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
        return sorted(seen)

    def orbits(self) -> list[list[int]]:
        out: list[list[int]] = []
        seen: set[int] = set()
        for p in range(self._degree):
            if p not in seen:
                orb = self.orbit(p)
                seen.update(orb)
                out.append(orb)
        return out

    def __repr__(self) -> str:
        return f"PermutationGroup(degree={self._degree}, order={self.order})"


# --- module-level operations ---


def group_order(group: PermutationGroup) -> int:
    return group.order


def contains(group: PermutationGroup, p: Permutation) -> bool:
    return group.contains(p)


def count_elements(group: PermutationGroup, cap: int = 10**6) -> int:
    """Order by closing the generators under multiplication, independent of the chain."""
    identity = tuple(range(group.degree))
    seen = {identity}
    frontier = [identity]
    gens = [g.images for g in group.generators]
    while frontier:
        nxt: list[Images] = []
        for w in frontier:
            for s in gens:
                h = _mul(w, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        if len(seen) > cap:
            raise CapExceededError(
                f"Enumeration passed {cap} elements",
                cap="setwise_iteration_cap",
                limit=cap,
            )
        frontier = nxt
    return len(seen)


def is_transitive(group: PermutationGroup) -> bool:
    if group.degree <= 1:
        return True
    return len(group.orbit(0)) == group.degree


def _finest_block_with(group: PermutationGroup, a: int, b: int) -> list[int]:
    """Union-find closure of {a, b} under the generators; returns the class labels."""
    parent = list(range(group.degree))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = deque([(a, b)])
    parent[find(b)] = find(a)
    while queue:
        x, y = queue.popleft()
        for g in group.generators:
            gx, gy = find(g.images[x]), find(g.images[y])
            if gx != gy:
                parent[gy] = gx
                queue.append((g.images[x], g.images[y]))
    return [find(x) for x in range(group.degree)]


def block_systems_through(group: PermutationGroup) -> list[BlockSystem]:
    """Every non-trivial block system found by seeding {0, i}, deduplicated."""
    if not is_transitive(group):
        raise NotTransitiveError()
    n = group.degree
    found: dict[frozenset[int], BlockSystem] = {}
    for i in range(1, n):
        labels = _finest_block_with(group, 0, i)
        block0 = frozenset(x for x in range(n) if labels[x] == labels[0])
        if len(block0) == n or block0 in found:
            continue
        cells: dict[int, set[int]] = {}
        for x, lab in enumerate(labels):
            cells.setdefault(lab, set()).add(x)
        found[block0] = BlockSystem(n, tuple(frozenset(c) for c in cells.values()))
    return list(found.values())


def minimal_block_systems(group: PermutationGroup) -> list[BlockSystem]:
    """Block systems whose block through 0 is a minimal non-trivial block."""
    if group.degree < 2:
        raise PreconditionError("Block systems need degree at least 2", check="size-condition")
    systems = block_systems_through(group)
    blocks = [s.block_of(0) for s in systems]
    minimal = [
        s
        for s, b in zip(systems, blocks, strict=True)
        if not any(other < b for other in blocks)
    ]
    return sorted(minimal, key=lambda s: (s.block_size, s.to_lists()))


def is_primitive(group: PermutationGroup) -> bool:
    if group.degree < 2:
        raise PreconditionError("Primitivity needs degree at least 2", check="size-condition")
    if not is_transitive(group):
        raise NotTransitiveError()
    if group.degree <= 3:
        return True
    return not block_systems_through(group)


def commutator(a: Permutation, b: Permutation) -> Permutation:
    return ~a * ~b * a * b


def normal_closure(
    subgroup_gens: Iterable[Permutation], group: PermutationGroup
) -> PermutationGroup:
    """Smallest normal subgroup of *group* containing *subgroup_gens*."""
    gens = [g for g in subgroup_gens if not g.is_identity]
    closure = PermutationGroup(gens, degree=group.degree)
    changed = True
    while changed:
        changed = False
        for s in list(closure.generators):
            for g in group.generators:
                conj = ~g * s * g
                if not closure.contains(conj):
                    gens.append(conj)
                    closure = PermutationGroup(gens, degree=group.degree)
                    changed = True
    return closure


def derived_subgroup(group: PermutationGroup) -> PermutationGroup:
    gens = group.generators
    comms = [commutator(a, b) for a, b in itertools.combinations(gens, 2)]
    return normal_closure(comms, group)


def is_solvable(group: PermutationGroup) -> bool:
    current = group
    while current.order > 1:
        derived = derived_subgroup(current)
        if derived.order == current.order:
            return False
        current = derived
    return True


class SymAltKind(StrEnum):
    SYM = "Sym"
    ALT = "Alt"
    NEITHER = "Neither"


def sym_alt_kind(group: PermutationGroup) -> SymAltKind:
    n = group.degree
    order = group.order
    if order == math.factorial(n):
        return SymAltKind.SYM
    if (
        n >= 3
        and 2 * order == math.factorial(n)
        and all(g.is_even for g in group.generators)
        and group.contains(Permutation.from_cycles(n, [(0, 1, 2)]))
    ):
        return SymAltKind.ALT
    return SymAltKind.NEITHER


def is_sym_or_alt(group: PermutationGroup) -> bool:
    return sym_alt_kind(group) is not SymAltKind.NEITHER


def conjugate(group: PermutationGroup, by: Permutation) -> PermutationGroup:
    return PermutationGroup([~by * g * by for g in group.generators], degree=group.degree)


def restrict(group_gens: Iterable[Permutation], points: Sequence[int]) -> list[Permutation]:
    """Restrict permutations that preserve *points* and relabel them as 0..len(points)-1."""
    index = {p: i for i, p in enumerate(points)}
    out = []
    for g in group_gens:
        images = []
        for p in points:
            q = g.images[p]
            if q not in index:
                raise PreconditionError(
                    f"Generator does not preserve the point set {list(points)}",
                    check="not-invariant",
                )
            images.append(index[q])
        perm = Permutation(tuple(images))
        if not perm.is_identity:
            out.append(perm)
    return out


def random_subgroup(
    group: PermutationGroup, rng: random.Random, max_gens: int = 2
) -> PermutationGroup:
    """Subgroup generated by up to *max_gens* random elements."""
    count = rng.randint(1, max_gens)
    return PermutationGroup(
        [group.random_element(rng) for _ in range(count)], degree=group.degree
    )
