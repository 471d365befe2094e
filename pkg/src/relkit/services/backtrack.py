"""Backtrack searches for subgroups defined by a property of their elements.

Both engines walk a stabilizer chain level by level, deepest level first, and
keep one found element per new orbit point. A candidate image that admits no
element refutes its whole orbit under the part of the answer already known.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Callable, Hashable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor

from relkit.models.permutation import Permutation
from relkit.services.permgroup import Images, PermutationGroup, _mul

logger = logging.getLogger(__name__)

PruneFn = Callable[[int, list[int]], bool]
AcceptFn = Callable[[Images], bool]


def _orbit(point: int, gens: Sequence[Images]) -> set[int]:
    seen = {point}
    stack = [point]
    while stack:
        p = stack.pop()
        for g in gens:
            q = g[p]
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return seen


def search_subgroup(
    group: PermutationGroup,
    accept: AcceptFn,
    prune: PruneFn | None = None,
    *,
    seed: PermutationGroup | None = None,
    threads: int = 1,
) -> PermutationGroup:
    """Return the subgroup of *group* whose elements satisfy *accept*.

    *accept* must define a subgroup. ``prune(depth, images)`` receives the
    images of the first ``depth + 1`` base points and must return False only
    when no accepted element extends them. *seed* is a subgroup already known
    to be accepted.
    """
    n = group.degree
    levels = group.levels
    base = group.base
    m = len(levels)
    hint = list(base) + [p for p in range(n) if p not in base]
    seed_levels = seed.with_base(hint).levels if seed is not None else ()
    seed_gens = list(seed.generators) if seed is not None else []
    if m == 0:
        return PermutationGroup.trivial(n)

    def dfs(depth: int, w: Images, images: list[int]) -> Images | None:
        if depth == m:
            return w if accept(w) else None
        transversal = levels[depth].transversal
        for q, u in transversal.items():
            images.append(w[q])
            if prune is None or prune(depth, images):
                found = dfs(depth + 1, _mul(u, w), images)
                if found is not None:
                    images.pop()
                    return found
            images.pop()
        return None

    def find(depth: int, q: int) -> Images | None:
        images = [*base[:depth], q]
        if prune is not None and not prune(depth, images):
            return None
        return dfs(depth + 1, levels[depth].transversal[q], images)

    found: list[tuple[int, Images]] = []
    for depth in range(m - 1, -1, -1):
        known = [g for lvl, g in found if lvl >= depth]
        if depth < len(seed_levels):
            known.extend(seed_levels[depth].gens)
        orbit = _orbit(base[depth], known)
        refuted: set[int] = set()
        candidates = [q for q in sorted(levels[depth].transversal) if q not in orbit]

        if depth == 0 and threads > 1 and len(candidates) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda q: find(0, q), candidates))
            for q, elt in zip(candidates, results, strict=True):
                if elt is not None and q not in orbit:
                    found.append((0, elt))
                    known.append(elt)
                    orbit = _orbit(base[0], known)
            logger.debug("Level 0 searched on %d threads: orbit %d", threads, len(orbit))
            continue

        for q in candidates:
            if q in orbit or q in refuted:
                continue
            elt = find(depth, q)
            if elt is not None:
                found.append((depth, elt))
                known.append(elt)
                orbit = _orbit(base[depth], known)
            else:
                refuted |= _orbit(q, known)
        logger.debug("Level %d (base %d): orbit %d", depth, base[depth], len(orbit))

    gens = seed_gens + [Permutation(g) for _, g in found]
    return PermutationGroup(gens, degree=n, base=hint)


def intersection(g1: PermutationGroup, g2: PermutationGroup) -> PermutationGroup:
    small, other = (g1, g2) if g1.order <= g2.order else (g2, g1)
    return search_subgroup(small, lambda w: other.contains(Permutation(w)))


_MISSING = object()


def _point_order(
    n: int,
    point_class: list[int],
    pair_total: list[list[int]],
) -> list[int]:
    """Most-constrained-first point order for the backtrack base."""
    class_size = Counter(point_class)
    remaining = set(range(n))
    order: list[int] = []
    while remaining:
        best = min(
            remaining,
            key=lambda p: (
                -sum(pair_total[p][c] for c in order),
                class_size[point_class[p]],
                -pair_total[p][p],
                p,
            ),
        )
        order.append(best)
        remaining.remove(best)
    return order


def automorphism_group(
    n: int,
    color_of: Mapping[int, Hashable],
    *,
    seed: PermutationGroup | None = None,
    threads: int = 1,
) -> PermutationGroup:
    """Permutations of {0..n-1} mapping every listed mask to a listed mask of the same color.

    With one color this is the invariance group of a relation; with one color per
    orbit of a group on a layer it is the closure of that group on the layer.
    """
    family = {m: c for m, c in color_of.items() if 0 < m.bit_count() < n}
    if not family:
        return PermutationGroup.symmetric(n)

    key_ids: dict[tuple[Hashable, int], int] = {}
    set_key: dict[int, int] = {}
    for mask, color in family.items():
        set_key[mask] = key_ids.setdefault((color, mask.bit_count()), len(key_ids))

    point_counts: list[Counter[int]] = [Counter() for _ in range(n)]
    pair_counts: list[list[Counter[int]]] = [[Counter() for _ in range(n)] for _ in range(n)]
    pair_total = [[0] * n for _ in range(n)]
    for mask, key in set_key.items():
        pts = [p for p in range(n) if mask >> p & 1]
        for i, a in enumerate(pts):
            point_counts[a][key] += 1
            pair_total[a][a] += 1
            for b in pts[i + 1 :]:
                pair_counts[a][b][key] += 1
                pair_counts[b][a][key] += 1
                pair_total[a][b] += 1
                pair_total[b][a] += 1

    interned: dict[tuple, int] = {}

    def intern(counter: Counter[int]) -> int:
        return interned.setdefault(tuple(sorted(counter.items())), len(interned))

    point_class = [intern(c) for c in point_counts]
    pair_class = [[intern(pair_counts[a][b]) for b in range(n)] for a in range(n)]

    order = _point_order(n, point_class, pair_total)
    sym = PermutationGroup.symmetric(n, base=order)
    base = sym.base
    position = {p: i for i, p in enumerate(base)}

    completed: list[list[tuple[tuple[int, ...], Hashable]]] = [[] for _ in base]
    for mask, color in family.items():
        pts = [p for p in range(n) if mask >> p & 1]
        if all(p in position for p in pts):
            positions = tuple(position[p] for p in pts)
            completed[max(positions)].append((positions, color))

    items = list(family.items())

    def prune(depth: int, images: list[int]) -> bool:
        b = base[depth]
        c = images[depth]
        if point_class[b] != point_class[c]:
            return False
        row_b, row_c = pair_class[b], pair_class[c]
        for i in range(depth):
            if row_b[base[i]] != row_c[images[i]]:
                return False
        for positions, color in completed[depth]:
            image = 0
            for pos in positions:
                image |= 1 << images[pos]
            if family.get(image, _MISSING) != color:
                return False
        return True

    def accept(w: Images) -> bool:
        for mask, color in items:
            image = 0
            rest = mask
            while rest:
                low = rest & -rest
                image |= 1 << w[low.bit_length() - 1]
                rest ^= low
            if family.get(image, _MISSING) != color:
                return False
        return True

    result = search_subgroup(sym, accept, prune, seed=seed, threads=threads)
    logger.debug(
        "Automorphism search on %d sets at degree %d: order %d", len(family), n, result.order
    )
    return result
