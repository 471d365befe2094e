"""The action of a permutation group on P(Omega).

Subsets are n-bit masks. Layer and power-set orbits are computed with numpy:
the image of every mask under a generator is formed bit by bit, then orbit
labels are propagated to the least index reachable.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from relkit.config import DEFAULT_LIMITS, Limits
from relkit.models.permutation import Permutation
from relkit.models.reports import OrbitPartition, RegularSetCensus
from relkit.models.subset import Subset
from relkit.services.backtrack import search_subgroup
from relkit.services.exceptions import CapExceededError, DegreeMismatchError, PreconditionError
from relkit.services.permgroup import PermutationGroup

logger = logging.getLogger(__name__)

_BYTE_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)
_CHUNK = 1 << 20


def _check_degree(group: PermutationGroup, subset: Subset) -> None:
    if group.degree != subset.degree:
        raise DegreeMismatchError(group.degree, subset.degree)


def popcount(values: np.ndarray) -> np.ndarray:
    out = np.zeros(values.shape, dtype=np.int64)
    v = values.astype(np.int64)
    while True:
        out += _BYTE_POPCOUNT[v & 0xFF]
        v = v >> 8
        if not v.any():
            return out


def image_masks(masks: np.ndarray, g: Permutation) -> np.ndarray:
    out = np.zeros_like(masks)
    for i, image in enumerate(g.images):
        out |= ((masks >> i) & 1) << image
    return out


def layer_masks(n: int, k: int) -> np.ndarray:
    """All k-subsets of {0..n-1} as ascending masks."""
    count = math.comb(n, k)
    masks = np.fromiter(
        (sum(1 << p for p in c) for c in itertools.combinations(range(n), k)),
        dtype=np.int64,
        count=count,
    )
    masks.sort()
    return masks


def orbit_of_subset(group: PermutationGroup, subset: Subset) -> set[Subset]:
    _check_degree(group, subset)
    seen = {subset.mask}
    stack = [subset.mask]
    while stack:
        m = stack.pop()
        for g in group.generators:
            image = g.image_of_mask(m)
            if image not in seen:
                seen.add(image)
                stack.append(image)
    return {Subset(subset.degree, m) for m in seen}


def _partition(
    group: PermutationGroup, universe: np.ndarray, layer: int | None
) -> OrbitPartition:
    n = group.degree
    indices = [np.searchsorted(universe, image_masks(universe, g)) for g in group.generators]
    labels = np.arange(universe.size, dtype=np.int64)
    while True:
        new = labels.copy()
        for idx in indices:
            np.minimum(new, new[idx], out=new)
        new = new[new]
        if np.array_equal(new, labels):
            break
        labels = new
    reps, orbit_ids, lengths = np.unique(labels, return_inverse=True, return_counts=True)
    return OrbitPartition(
        degree=n,
        layer=layer,
        masks=universe,
        orbit_ids=orbit_ids.reshape(-1),
        representatives=tuple(int(universe[r]) for r in reps),
        lengths=tuple(int(c) for c in lengths),
    )


def orbits_on_k_subsets(
    group: PermutationGroup, k: int, limits: Limits = DEFAULT_LIMITS
) -> OrbitPartition:
    n = group.degree
    if not 0 <= k <= n:
        raise PreconditionError(f"k={k} outside 0..{n}", check="parameter")
    size = math.comb(n, k)
    if size > limits.orbit_universe_cap:
        raise CapExceededError(
            f"Layer {k} of degree {n} has {size} subsets",
            cap="orbit_universe_cap",
            limit=limits.orbit_universe_cap,
            required=size,
        )
    return _partition(group, layer_masks(n, k), k)


def orbits_on_power_set(
    group: PermutationGroup, limits: Limits = DEFAULT_LIMITS
) -> OrbitPartition:
    n = group.degree
    if 1 << n > limits.orbit_universe_cap:
        raise CapExceededError(
            f"P(Omega) of degree {n} has {1 << n} subsets",
            cap="orbit_universe_cap",
            limit=limits.orbit_universe_cap,
            required=1 << n,
        )
    return _partition(group, np.arange(1 << n, dtype=np.int64), None)


def setwise_stabilizer(
    group: PermutationGroup, subset: Subset, limits: Limits = DEFAULT_LIMITS
) -> PermutationGroup:
    _check_degree(group, subset)
    x = subset.mask
    if group.order <= limits.setwise_iteration_cap:
        stab = PermutationGroup.trivial(group.degree)
        for g in group.elements():
            if g.image_of_mask(x) == x and not stab.contains(g):
                stab = PermutationGroup([*stab.generators, g], degree=group.degree)
        return stab

    base = group.base

    def prune(depth: int, images: list[int]) -> bool:
        return (x >> base[depth] & 1) == (x >> images[depth] & 1)

    def accept(w: tuple[int, ...]) -> bool:
        return Permutation(w).image_of_mask(x) == x

    return search_subgroup(group, accept, prune)


def is_regular_set(
    group: PermutationGroup, subset: Subset, limits: Limits = DEFAULT_LIMITS
) -> bool:
    _check_degree(group, subset)
    if group.order <= limits.setwise_iteration_cap:
        return len(orbit_of_subset(group, subset)) == group.order
    return setwise_stabilizer(group, subset, limits).order == 1


def _cyclic_prime_representatives(group: PermutationGroup) -> list[Permutation]:
    """One generator per subgroup of prime order.

    A subset is fixed by some non-identity element iff it is fixed by an element
    of prime order, so these suffice for the census.
    """
    reps: list[Permutation] = []
    seen: set[tuple[int, ...]] = set()
    for g in group.elements():
        order = g.order
        if order == 1 or not _is_prime(order):
            continue
        if g.images in seen:
            continue
        power = g
        for _ in range(order - 1):
            seen.add(power.images)
            power = power * g
        reps.append(g)
    return reps


def _is_prime(k: int) -> bool:
    return k >= 2 and all(k % d for d in range(2, math.isqrt(k) + 1))


def _fixed_subsets(g: Permutation) -> np.ndarray:
    """All unions of cycles of g, in reflected Gray-code order."""
    arr = np.zeros(1, dtype=np.int64)
    for cycle in g.cycles:
        cm = sum(1 << p for p in cycle)
        arr = np.concatenate([arr, arr[::-1] | cm])
    return arr


def _mark(reps: list[Permutation], n: int) -> np.ndarray:
    bitmap = np.zeros(1 << n, dtype=bool)
    for g in reps:
        bitmap[_fixed_subsets(g)] = True
    return bitmap


def regular_set_census(
    group: PermutationGroup, limits: Limits = DEFAULT_LIMITS
) -> RegularSetCensus:
    """Exact census: mark the 2^c fixed subsets of every element, the rest are regular.

    A set fixed by g is fixed by every power of g, so only one generator of each cyclic
    subgroup of prime order is swept. ``census_work_cap`` is charged for those generators
    alone, which is never more than the sum of 2^c(g) over all g != 1.
    """
    n = group.degree
    if n > limits.census_max_degree:
        raise CapExceededError(
            f"Census needs a 2^{n} bitmap; degree cap is {limits.census_max_degree}. "
            "Use has_regular_set_sampling instead",
            cap="census_max_degree",
            limit=limits.census_max_degree,
            required=n,
        )
    if group.order > limits.setwise_iteration_cap:
        raise CapExceededError(
            f"Census enumerates {group.order} elements. Use has_regular_set_sampling instead",
            cap="setwise_iteration_cap",
            limit=limits.setwise_iteration_cap,
            required=group.order,
        )
    reps = _cyclic_prime_representatives(group)
    work = sum(1 << g.cycle_count for g in reps)
    if work > limits.census_work_cap:
        raise CapExceededError(
            f"Census work {work} exceeds cap {limits.census_work_cap}. "
            "Use has_regular_set_sampling instead",
            cap="census_work_cap",
            limit=limits.census_work_cap,
            required=work,
        )

    threads = max(1, limits.threads)
    if threads > 1 and len(reps) > threads:
        chunks = [reps[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _mark(c, n), chunks))
        bitmap = np.logical_or.reduce(parts)
    else:
        bitmap = _mark(reps, n)

    counts = np.zeros(n + 1, dtype=np.int64)
    first: dict[int, int] = {}
    for start in range(0, 1 << n, _CHUNK):
        block = ~bitmap[start : start + _CHUNK]
        idx = np.flatnonzero(block).astype(np.int64) + start
        if not idx.size:
            continue
        sizes = popcount(idx)
        counts += np.bincount(sizes, minlength=n + 1)
        uniq, pos = np.unique(sizes, return_index=True)
        for k, p in zip(uniq.tolist(), pos.tolist(), strict=True):
            first.setdefault(int(k), int(idx[p]))

    logger.debug(
        "Census of order %d at degree %d: %d prime cyclic subgroups", group.order, n, len(reps)
    )
    return RegularSetCensus(
        degree=n,
        group_order=group.order,
        regular_count_by_size=tuple(int(c) for c in counts),
        first_regular_by_size=first,
        work=work,
    )


def has_regular_set_sampling(
    group: PermutationGroup,
    samples: int = 2000,
    seed: int = 0,
    limits: Limits = DEFAULT_LIMITS,
) -> Subset | None:
    """One-sided search: a returned subset is verified regular, None proves nothing."""
    n = group.degree
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        bits = rng.integers(0, 2, size=n)
        subset = Subset.from_points(n, np.flatnonzero(bits).tolist())
        if is_regular_set(group, subset, limits):
            return subset
    return None


def is_set_transitive(group: PermutationGroup) -> bool:
    n = group.degree
    for k in range(1, n // 2 + 1):
        if group.order < math.comb(n, k):
            return False
        first = Subset(n, (1 << k) - 1)
        if len(orbit_of_subset(group, first)) != math.comb(n, k):
            return False
    return True


def has_regular_set_two_sizes(
    group: PermutationGroup, limits: Limits = DEFAULT_LIMITS
) -> bool:
    return len(regular_set_census(group, limits).sizes_with_regular) >= 2


def burnside_orbit_count(group: PermutationGroup) -> int:
    """Number of orbits on P(Omega) as the average number of fixed subsets."""
    total = sum(1 << g.cycle_count for g in group.elements())
    count, rem = divmod(total, group.order)
    if rem:
        raise ArithmeticError(f"Fixed-subset total {total} not divisible by {group.order}")
    return count
