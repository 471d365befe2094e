"""Orbit closure G* and the k-closures of a permutation group."""

from __future__ import annotations

import logging
from collections.abc import Iterable

from relkit.config import DEFAULT_LIMITS, Limits
from relkit.models.permutation import Permutation
from relkit.models.reports import ClosureReport
from relkit.services.backtrack import automorphism_group
from relkit.services.exceptions import (
    CapExceededError,
    DegreeMismatchError,
    PreconditionError,
    VerificationError,
)
from relkit.services.permgroup import PermutationGroup
from relkit.services.subset_action import orbits_on_k_subsets, orbits_on_power_set
from relkit.utils import cache

logger = logging.getLogger(__name__)

# Orbit closures computed in this process, keyed by group fingerprint.
_session_closures: dict[str, PermutationGroup] = {}


def _check_cap(group: PermutationGroup, limits: Limits) -> None:
    if group.degree > limits.closure_max_degree:
        raise CapExceededError(
            f"Closure search over Sym({group.degree}) exceeds the degree cap "
            f"{limits.closure_max_degree}",
            cap="closure_max_degree",
            limit=limits.closure_max_degree,
            required=group.degree,
        )


def k_orbit_equivalent(
    g: PermutationGroup, h: PermutationGroup, k: int, limits: Limits = DEFAULT_LIMITS
) -> bool:
    if g.degree != h.degree:
        raise DegreeMismatchError(g.degree, h.degree)
    return orbits_on_k_subsets(g, k, limits).same_partition(orbits_on_k_subsets(h, k, limits))


def k_closure(
    group: PermutationGroup, k: int, limits: Limits = DEFAULT_LIMITS
) -> PermutationGroup:
    """Largest group with the same orbits as *group* on k-subsets."""
    n = group.degree
    if not 0 <= k <= n:
        raise PreconditionError(f"k={k} outside 0..{n}", check="parameter")
    if k in (0, n) or n <= 1:
        return PermutationGroup.symmetric(n)
    _check_cap(group, limits)
    k = min(k, n - k)
    colors = orbits_on_k_subsets(group, k, limits).color_map()
    return automorphism_group(n, colors, seed=group, threads=limits.threads)


def _all_layer_closure(group: PermutationGroup, limits: Limits) -> PermutationGroup:
    colors = orbits_on_power_set(group, limits).color_map()
    return automorphism_group(group.degree, colors, seed=group, threads=limits.threads)


def closure_group(group: PermutationGroup, limits: Limits = DEFAULT_LIMITS) -> PermutationGroup:
    """The orbit closure G*, computed on all layers and checked against the middle layer."""
    n = group.degree
    if n <= 1:
        return group
    key = group.fingerprint()
    if key in _session_closures:
        return _session_closures[key]
    if limits.persistent_cache:
        tables = cache.lookup_closure(key)
        if tables is not None:
            star = PermutationGroup([Permutation(tuple(t)) for t in tables], degree=n)
            _session_closures[key] = star
            return star

    _check_cap(group, limits)
    star = _all_layer_closure(group, limits)
    middle = k_closure(group, n // 2, limits)
    if not star.same_group(middle):
        raise VerificationError(
            "All-layer closure differs from the middle-layer closure",
            details={"all_layers": star.order, "middle_layer": middle.order},
        )
    _session_closures[key] = star
    if limits.persistent_cache:
        cache.store_closure(key, n, star.order, [list(g.images) for g in star.generators])
    logger.info(
        "Orbit closure of order %d group at degree %d: order %d", group.order, n, star.order
    )
    return star


def orbit_closure(
    group: PermutationGroup,
    ks: Iterable[int] = (),
    limits: Limits = DEFAULT_LIMITS,
) -> ClosureReport:
    star = closure_group(group, limits)
    return ClosureReport(
        degree=group.degree,
        group_order=group.order,
        k_closures={k: k_closure(group, k, limits).order for k in ks},
        star_order=star.order,
    )


def monotonicity_check(
    g: PermutationGroup,
    h: PermutationGroup,
    k: int,
    ell: int,
    limits: Limits = DEFAULT_LIMITS,
) -> bool:
    """Whether ell-orbit equivalence implies k-orbit equivalence here, for k <= ell <= n - k."""
    if g.degree != h.degree:
        raise DegreeMismatchError(g.degree, h.degree)
    if not (0 <= k <= ell and k + ell <= g.degree):
        raise PreconditionError(
            f"Need 0 <= k <= ell and k + ell <= n, got k={k}, ell={ell}, n={g.degree}",
            check="parameter",
        )
    if not k_orbit_equivalent(g, h, ell, limits):
        return True
    return k_orbit_equivalent(g, h, k, limits)


def clear_session_cache() -> None:
    _session_closures.clear()
