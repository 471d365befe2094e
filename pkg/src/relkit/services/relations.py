"""Invariance groups of unordered relations and the search for minimal relation groups."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable

from relkit.config import DEFAULT_LIMITS, Limits
from relkit.models.reports import RelationGroupReport
from relkit.models.subset import Relation, Subset
from relkit.services.backtrack import automorphism_group
from relkit.services.closure import closure_group
from relkit.services.exceptions import (
    CapExceededError,
    DegreeMismatchError,
    PreconditionError,
    VerificationError,
)
from relkit.services.permgroup import PermutationGroup
from relkit.services.subset_action import (
    is_regular_set,
    orbit_of_subset,
    orbits_on_k_subsets,
)

logger = logging.getLogger(__name__)


def orbit_relation(group: PermutationGroup, subset: Subset) -> Relation:
    """The relation formed by one orbit of *group* on P(Omega)."""
    return Relation.from_subsets(group.degree, orbit_of_subset(group, subset))


def invariance_group(
    relation: Relation,
    candidate: PermutationGroup | None = None,
    limits: Limits = DEFAULT_LIMITS,
) -> PermutationGroup:
    """All permutations mapping every set of *relation* to a set of *relation*.

    A *candidate* group that preserves the relation seeds the search, which is
    what makes degrees above the exhaustive cap reachable.
    """
    n = relation.degree
    seed = None
    if candidate is not None:
        if candidate.degree != n:
            raise DegreeMismatchError(n, candidate.degree)
        if all(relation.is_preserved_by(g) for g in candidate.generators):
            seed = candidate
        else:
            logger.warning("Candidate group does not preserve the relation, ignoring it")
    if n > limits.max_degree_exhaustive and seed is None:
        raise CapExceededError(
            f"Invariance group at degree {n} needs a candidate group "
            f"(exhaustive cap {limits.max_degree_exhaustive})",
            cap="max_degree_exhaustive",
            limit=limits.max_degree_exhaustive,
            required=n,
        )
    colors = dict.fromkeys(relation.masks, 0)
    return automorphism_group(n, colors, seed=seed, threads=limits.threads)


class _Search:
    """Shared state of one relation_closure run."""

    def __init__(self, seed: PermutationGroup, limits: Limits) -> None:
        self.seed = seed
        self.limits = limits
        self.groups: dict[frozenset[int], PermutationGroup] = {}

    def group_of(self, masks: frozenset[int]) -> PermutationGroup:
        if masks not in self.groups:
            relation = Relation(self.seed.degree, masks)
            self.groups[masks] = invariance_group(relation, self.seed, self.limits)
        return self.groups[masks]


def _dedupe(
    found: list[tuple[PermutationGroup, frozenset[int]]],
    group: PermutationGroup,
    masks: frozenset[int],
) -> bool:
    """Append unless an equal group is already listed. True when appended."""
    for other, _ in found:
        if other.same_group(group):
            return False
    found.append((group, masks))
    return True


def _layer_candidates(
    search: _Search,
    orbits: list[frozenset[int]],
    allow_greedy: bool,
) -> tuple[list[tuple[PermutationGroup, frozenset[int]]], bool]:
    """Distinct invariance groups of unions of orbits within one layer.

    Complementing a union inside its layer keeps its group, so unions avoiding
    the first orbit cover every case.
    """
    n = search.seed.degree
    sym_order = PermutationGroup.symmetric(n).order
    rest = orbits[1:]
    out: list[tuple[PermutationGroup, frozenset[int]]] = []
    total = (1 << len(rest)) - 1
    if total <= search.limits.union_search_cap:
        for r in range(1, len(rest) + 1):
            for combo in itertools.combinations(rest, r):
                masks = frozenset().union(*combo)
                group = search.group_of(masks)
                if group.order < sym_order:
                    _dedupe(out, group, masks)
        return out, True

    if not allow_greedy:
        raise CapExceededError(
            f"Layer has {len(orbits)} orbits, {total} unions exceed the union cap",
            cap="union_search_cap",
            limit=search.limits.union_search_cap,
            required=total,
        )
    logger.warning("Layer with %d orbits searched greedily; r(G) is an upper bound", len(orbits))
    steps = 0
    for start in range(len(rest)):
        chosen = {start}
        current = search.group_of(rest[start])
        improved = True
        while improved and steps < search.limits.greedy_step_cap:
            improved = False
            for i in range(len(rest)):
                trial = chosen ^ {i}
                if not trial:
                    continue
                steps += 1
                masks = frozenset().union(*(rest[j] for j in trial))
                group = search.group_of(masks)
                if group.order < current.order:
                    chosen, current, improved = trial, group, True
                    break
        if current.order < sym_order:
            _dedupe(out, current, frozenset().union(*(rest[j] for j in chosen)))
        if steps >= search.limits.greedy_step_cap:
            break
    return out, False


def relation_closure(
    group: PermutationGroup,
    limits: Limits = DEFAULT_LIMITS,
    *,
    allow_greedy: bool = False,
) -> RelationGroupReport:
    """Smallest invariance group of a relation preserved by *group*.

    Every relation preserved by G is a union of G-orbits, split by size; its
    group is the intersection of the per-size groups. Layer n-k offers the same
    groups as layer k through complements, so its candidates are reused, but it
    is still combined on its own: a relation with sets of both sizes meets two
    different layer-k groups.
    """
    n = group.degree
    if n > limits.max_degree_exhaustive:
        raise CapExceededError(
            f"Relation closure at degree {n} exceeds the cap {limits.max_degree_exhaustive}",
            cap="max_degree_exhaustive",
            limit=limits.max_degree_exhaustive,
            required=n,
        )
    sym = PermutationGroup.symmetric(n)
    if n <= 1:
        return RelationGroupReport(group.order, sym.order, Relation.empty(n))

    star = closure_group(group, limits) if n <= limits.closure_max_degree else None
    seed = star if star is not None else group
    search = _Search(seed, limits)
    exact = True

    full = (1 << n) - 1
    by_layer: dict[int, list[tuple[PermutationGroup, frozenset[int]]]] = {}
    achievable: list[tuple[PermutationGroup, frozenset[int]]] = [(sym, frozenset())]
    for k in range(1, n):
        if k > n - k:
            candidates = [
                (g, frozenset(full ^ m for m in masks)) for g, masks in by_layer.get(n - k, [])
            ]
        else:
            partition = orbits_on_k_subsets(seed, k, limits)
            if partition.orbit_count <= 1:
                continue
            orbits = [frozenset(partition.members(i)) for i in range(partition.orbit_count)]
            candidates, layer_exact = _layer_candidates(search, orbits, allow_greedy)
            exact = exact and layer_exact
            by_layer[k] = candidates
        if not candidates:
            continue

        combined = list(achievable)
        for x_group, x_masks in achievable:
            for y_group, y_masks in candidates:
                masks = x_masks | y_masks
                if y_group.is_subgroup_of(x_group):
                    meet = y_group
                elif x_group.is_subgroup_of(y_group):
                    meet = x_group
                else:
                    meet = search.group_of(masks)
                _dedupe(combined, meet, masks)
                if meet.order == seed.order:
                    logger.debug("Closure reached at layer %d", k)
                    return _report(group, meet, masks, exact, star)
        achievable = combined
        logger.debug("Layer %d: %d achievable groups", k, len(achievable))

    best_group, best_masks = min(achievable, key=lambda item: (item[0].order, len(item[1])))
    return _report(group, best_group, best_masks, exact, star)


def _report(
    group: PermutationGroup,
    closure: PermutationGroup,
    masks: frozenset[int],
    exact: bool,
    star: PermutationGroup | None,
) -> RelationGroupReport:
    return RelationGroupReport(
        group_order=group.order,
        closure_order=closure.order,
        witness_relation=Relation(group.degree, masks),
        exact=exact,
        orbit_closure_order=None if star is None else star.order,
    )


def is_relation_group(group: PermutationGroup, limits: Limits = DEFAULT_LIMITS) -> bool:
    return relation_closure(group, limits).is_relation_group


def basic_lemma_construct(
    h: PermutationGroup,
    relation: Relation,
    w: Subset,
    g: PermutationGroup,
    limits: Limits = DEFAULT_LIMITS,
    *,
    verify: bool = True,
) -> Relation:
    """Relation defining G from a relation defining an overgroup H with a regular set w.

    Returns R together with the G-orbit of w; needs |w| outside the arity of R.
    """
    for other in (relation.degree, w.degree, g.degree):
        if other != h.degree:
            raise DegreeMismatchError(h.degree, other)
    if not g.is_subgroup_of(h):
        raise PreconditionError("G is not a subgroup of H", check="not-subgroup")
    if not invariance_group(relation, h, limits).same_group(h):
        raise PreconditionError("H is not the invariance group of R", check="not-invariance-group")
    if not is_regular_set(h, w, limits):
        raise PreconditionError("w is not a regular set of H", check="not-regular")
    if w.size in relation.arity:
        raise PreconditionError(
            f"|w| = {w.size} occurs in the arity {sorted(relation.arity)} of R",
            check="arity-clash",
        )
    result = relation | orbit_relation(g, w)
    if verify:
        defined = invariance_group(result, g, limits)
        if not defined.same_group(g):
            raise VerificationError(
                "Constructed relation does not define G",
                details={"expected_order": g.order, "got_order": defined.order},
            )
    return result


def basic_lemma_from_orbit(
    h: PermutationGroup,
    w: Subset,
    g: PermutationGroup,
    limits: Limits = DEFAULT_LIMITS,
    *,
    sizes: Iterable[int] | None = None,
    verify: bool = True,
) -> Relation:
    """Variant for an H that is maximal among groups that are not set-transitive.

    Picks an H-orbit x^H that is not a whole layer, with |x| != |w| and
    G(x^H) = H, then applies basic_lemma_construct.
    """
    n = h.degree
    candidate_sizes = list(sizes) if sizes is not None else range(1, n)
    for k in candidate_sizes:
        if k == w.size:
            continue
        partition = orbits_on_k_subsets(h, k, limits)
        if partition.orbit_count <= 1:
            continue
        for rep in partition.representatives:
            relation = orbit_relation(h, Subset(n, rep))
            if invariance_group(relation, h, limits).same_group(h):
                return basic_lemma_construct(h, relation, w, g, limits, verify=verify)
    raise PreconditionError(
        "No orbit of H outside the size of w is defining H", check="hypothesis"
    )
