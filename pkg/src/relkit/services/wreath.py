"""Imprimitive wreath products, their defining relations and regular sets, and
imprimitivity chains with membership in the exceptional collections.

Points of K wr L are pairs (delta, i) numbered delta + d*i, so block i is the
interval d*i .. d*i + d - 1.
"""

from __future__ import annotations

import logging
from enum import StrEnum

from relkit.config import DEFAULT_LIMITS, Limits
from relkit.models.permutation import BlockSystem, Permutation
from relkit.models.reports import (
    ChainEnumeration,
    ChainLink,
    Classification,
    ImprimitivityChain,
    ListAMembership,
    WreathAction,
)
from relkit.models.subset import Relation, Subset
from relkit.services.exceptions import (
    CapExceededError,
    DegreeMismatchError,
    NotTransitiveError,
    PreconditionError,
    VerificationError,
)
from relkit.services.permgroup import (
    PermutationGroup,
    is_primitive,
    is_solvable,
    is_sym_or_alt,
    is_transitive,
    minimal_block_systems,
    restrict,
)
from relkit.services.relations import basic_lemma_construct, invariance_group
from relkit.services.subset_action import (
    is_regular_set,
    regular_set_census,
    setwise_stabilizer,
)

logger = logging.getLogger(__name__)


def _block_mask(d: int, i: int) -> int:
    return ((1 << d) - 1) << (d * i)


def wreath_product(k: PermutationGroup, top: PermutationGroup) -> WreathAction:
    """K wr L in its imprimitive action on d*s points."""
    d, s = k.degree, top.degree
    if d < 1 or s < 1:
        raise PreconditionError("Both factors need degree at least 1", check="size-condition")
    if not is_transitive(top):
        raise NotTransitiveError("Top group of a wreath product must be transitive")
    n = d * s
    gens: list[Permutation] = []
    for g in k.generators:
        images = list(range(n))
        images[:d] = g.images
        gens.append(Permutation(tuple(images)))
    for h in top.generators:
        gens.append(Permutation(tuple(h.images[p // d] * d + p % d for p in range(n))))
    group = PermutationGroup(gens, degree=n)
    expected = k.order**s * top.order
    if group.order != expected:
        raise VerificationError(
            "Wreath product has the wrong order",
            details={"expected": expected, "got": group.order},
        )
    return WreathAction(k, top, group)


def rela_block_relation(
    k: PermutationGroup,
    relation: Relation,
    s: int,
    limits: Limits = DEFAULT_LIMITS,
    *,
    complemented: bool = False,
) -> Relation:
    """Copies of a relation defining K, one per block; its group is K wr Sym(s).

    With *complemented* every copy is replaced by its complement in the whole
    point set, which keeps the group and moves all sizes above n/2.
    """
    d = k.degree
    if relation.degree != d:
        raise DegreeMismatchError(d, relation.degree)
    if s < 1:
        raise PreconditionError("Need at least one block", check="size-condition")
    if not relation.masks or any(not 2 <= size <= d - 2 for size in relation.arity):
        raise PreconditionError(
            f"Block relation needs non-empty sets sized 2..{d - 2}, got {sorted(relation.arity)}",
            check="size-condition",
        )
    if not is_primitive(k):
        raise PreconditionError("Block group must be primitive", check="not-primitive")
    if not invariance_group(relation, k, limits).same_group(k):
        raise PreconditionError(
            "Block group is not the invariance group of the relation",
            check="not-invariance-group",
        )
    n = d * s
    masks = frozenset(m << (d * i) for m in relation.masks for i in range(s))
    out = Relation(n, masks)
    return out.complement_image() if complemented else out


def block_complement_relation(
    k: PermutationGroup, relation: Relation, s: int, limits: Limits = DEFAULT_LIMITS
) -> Relation:
    return rela_block_relation(k, relation, s, limits, complemented=True)


def rela_top_relation(relation: Relation, d: int, s: int) -> Relation:
    """Unions of whole blocks, one per set of a relation on the blocks."""
    if relation.degree != s:
        raise DegreeMismatchError(s, relation.degree)
    if d < 1:
        raise PreconditionError("Block size must be at least 1", check="size-condition")
    masks = set()
    for mask in relation.masks:
        out = 0
        for i in range(s):
            if mask >> i & 1:
                out |= _block_mask(d, i)
        masks.add(out)
    return Relation(d * s, frozenset(masks))


def rela4_size(d: int, r_delta: int, s: int, r_sigma: int) -> int:
    return r_sigma * d + (s - 2 * r_sigma) * (d - r_delta)


def regular_set_rela4(
    x: Subset,
    top: int | Subset,
    s: int,
    k: PermutationGroup | None = None,
    lgroup: PermutationGroup | None = None,
    limits: Limits = DEFAULT_LIMITS,
    *,
    verify: bool = True,
) -> Subset:
    """Regular set of K wr L from a regular x of K and a regular set of L.

    *top* is either the regular set of L or its size k, meaning blocks 0..k-1.
    Blocks in the top set receive x, the others the complement of x.
    """
    d = x.degree
    if 2 * x.size == d:
        raise PreconditionError("x must not have half the block size", check="size-condition")
    chosen = Subset(s, (1 << top) - 1) if isinstance(top, int) else top
    if chosen.degree != s:
        raise DegreeMismatchError(s, chosen.degree)
    if k is not None and not is_regular_set(k, x, limits):
        raise PreconditionError("x is not a regular set of K", check="not-regular")
    if lgroup is not None and not is_regular_set(lgroup, chosen, limits):
        raise PreconditionError("Top set is not a regular set of L", check="not-regular")

    inner = x.mask
    outer = x.complement().mask
    mask = 0
    for i in range(s):
        mask |= (inner if i in chosen else outer) << (d * i)
    w = Subset(d * s, mask)
    if w.size != rela4_size(d, x.size, s, chosen.size):
        raise VerificationError(
            "Constructed set has the wrong size",
            details={"size": w.size, "expected": rela4_size(d, x.size, s, chosen.size)},
        )
    if verify and k is not None and lgroup is not None:
        _verify_regular(wreath_product(k, lgroup).group, w, limits)
    return w


def regular_set_rela15(
    xs: list[Subset],
    k: PermutationGroup | None = None,
    lgroup: PermutationGroup | None = None,
    limits: Limits = DEFAULT_LIMITS,
    *,
    verify: bool = True,
) -> Subset:
    """Regular set of K wr L built from regular sets of K of distinct sizes, one per block."""
    if not xs:
        raise PreconditionError("Need one piece per block", check="size-condition")
    d = xs[0].degree
    for x in xs:
        if x.degree != d:
            raise DegreeMismatchError(d, x.degree)
    sizes = [x.size for x in xs]
    if len(set(sizes)) != len(sizes):
        raise PreconditionError(f"Piece sizes {sizes} are not distinct", check="size-condition")
    if k is not None:
        for x in xs:
            if not is_regular_set(k, x, limits):
                raise PreconditionError(f"Piece {x!r} is not regular for K", check="not-regular")
    mask = 0
    for i, x in enumerate(xs):
        mask |= x.mask << (d * i)
    w = Subset(d * len(xs), mask)
    if verify and k is not None and lgroup is not None:
        _verify_regular(wreath_product(k, lgroup).group, w, limits)
    return w


def _verify_regular(group: PermutationGroup, w: Subset, limits: Limits) -> None:
    stab = setwise_stabilizer(group, w, limits)
    if stab.order != 1:
        raise VerificationError(
            "Constructed set is not regular",
            details={"stabilizer_order": stab.order, "set": [p + 1 for p in w.points]},
        )


def _sized_regular_sets(group: PermutationGroup, limits: Limits) -> dict[int, Subset]:
    census = regular_set_census(group, limits)
    out: dict[int, Subset] = {}
    for size in sorted(census.sizes_with_regular):
        subset = census.first_regular(size)
        if subset is not None:
            out[size] = subset
    return out


def _avoid_clash(w: Subset, relation: Relation) -> Subset:
    if w.size not in relation.arity:
        return w
    flipped = w.complement()
    if flipped.size not in relation.arity:
        logger.info("Regular set size %d clashes, using its complement", w.size)
        return flipped
    return w


def rela5_define_subgroup(
    k: PermutationGroup,
    lgroup: PermutationGroup,
    block_relation: Relation,
    top_relation: Relation,
    w: Subset | None,
    g: PermutationGroup,
    limits: Limits = DEFAULT_LIMITS,
    *,
    verify: bool = True,
) -> Relation:
    """Relation defining a subgroup G of K wr L from relations defining K and L.

    The block copies and the top relation define K wr L; a regular set of
    K wr L, taken from *w* or built from the censuses of K and L, then cuts
    out G.
    """
    wreath = wreath_product(k, lgroup)
    if g.degree != wreath.degree:
        raise DegreeMismatchError(wreath.degree, g.degree)
    if not g.is_subgroup_of(wreath.group):
        raise PreconditionError("G is not a subgroup of K wr L", check="not-subgroup")
    if not invariance_group(top_relation, lgroup, limits).same_group(lgroup):
        raise PreconditionError(
            "L is not the invariance group of the top relation", check="not-invariance-group"
        )
    relation = rela_block_relation(k, block_relation, wreath.s, limits) | rela_top_relation(
        top_relation, wreath.d, wreath.s
    )
    if g.same_group(wreath.group):
        if verify and not invariance_group(relation, g, limits).same_group(g):
            raise VerificationError("Block and top relations do not define K wr L")
        return relation

    if w is None:
        w = _regular_set_from_censuses(k, lgroup, limits)
    return basic_lemma_construct(
        wreath.group, relation, _avoid_clash(w, relation), g, limits, verify=verify
    )


def _regular_set_from_censuses(
    k: PermutationGroup, lgroup: PermutationGroup, limits: Limits
) -> Subset:
    d = k.degree
    block_sets = {size: x for size, x in _sized_regular_sets(k, limits).items() if 2 * size != d}
    if not block_sets:
        raise PreconditionError(
            "K has no regular set of size other than half its degree", check="hypothesis"
        )
    top_sets = _sized_regular_sets(lgroup, limits)
    if not top_sets:
        raise PreconditionError("L has no regular set", check="hypothesis")
    x = block_sets[min(block_sets)]
    top = top_sets[min(top_sets)]
    return regular_set_rela4(x, top, lgroup.degree, k, lgroup, limits, verify=False)


def distinct_sizes_define_subgroup(
    k: PermutationGroup,
    block_relation: Relation,
    lgroup: PermutationGroup,
    g: PermutationGroup,
    limits: Limits = DEFAULT_LIMITS,
    *,
    verify: bool = True,
) -> Relation:
    """Relation defining G inside K wr L when K has s regular sets of distinct sizes."""
    s = lgroup.degree
    sized = _sized_regular_sets(k, limits)
    if len(sized) < s:
        raise PreconditionError(
            f"K has regular sets of {len(sized)} distinct sizes, needs {s}", check="hypothesis"
        )
    if g.degree != k.degree * s:
        raise DegreeMismatchError(k.degree * s, g.degree)
    if not g.is_subgroup_of(wreath_product(k, lgroup).group):
        raise PreconditionError("G is not a subgroup of K wr L", check="not-subgroup")

    xs = [sized[size] for size in sorted(sized)[:s]]
    w = regular_set_rela15(xs, verify=False)
    if 2 * w.size > w.degree:
        w = w.complement()
    overgroup = wreath_product(k, PermutationGroup.symmetric(s)).group
    relation = block_complement_relation(k, block_relation, s, limits)
    return basic_lemma_construct(overgroup, relation, w, g, limits, verify=verify)


# --- imprimitivity chains ---


def induced_groups(
    group: PermutationGroup, system: BlockSystem, limits: Limits = DEFAULT_LIMITS
) -> tuple[PermutationGroup, PermutationGroup]:
    """Group induced on the block through 0 by its stabilizer, and the action on blocks."""
    block = sorted(system.blocks[0])
    stab = setwise_stabilizer(group, Subset.from_points(group.degree, block), limits)
    k = PermutationGroup(restrict(stab.generators, block), degree=len(block))
    reps = [min(b) for b in system.blocks]
    top = PermutationGroup(
        [Permutation(tuple(system.index_of(g.images[r]) for r in reps)) for g in group.generators],
        degree=system.block_count,
    )
    return k, top


def _chains(
    group: PermutationGroup, limits: Limits, budget: list[int]
) -> list[list[PermutationGroup]]:
    """Depth-first chains; budget holds the chains left and a truncation flag."""
    out: list[list[PermutationGroup]] = []
    for system in minimal_block_systems(group):
        if budget[0] <= 0:
            budget[1] = 1
            break
        k, top = induced_groups(group, system, limits)
        if is_primitive(top):
            out.append([k, top])
            budget[0] -= 1
            continue
        for tail in _chains(top, limits, budget):
            out.append([k, *tail])
    return out


def _census_key(group: PermutationGroup, limits: Limits) -> tuple[int, ...] | None:
    try:
        return regular_set_census(group, limits).regular_count_by_size
    except CapExceededError:
        return None


def imprimitivity_chains(
    group: PermutationGroup, limits: Limits = DEFAULT_LIMITS
) -> ChainEnumeration:
    """Every chain of primitive groups obtained by repeatedly passing to a minimal block.

    Chains whose links agree in degree, order and regular-set census are merged
    and counted in ``multiplicity``.
    """
    if is_primitive(group):
        raise PreconditionError("Group is primitive, it has no chain", check="primitive-input")
    budget = [limits.chain_cap, 0]
    raw = _chains(group, limits, budget)
    truncated = bool(budget[1])
    if truncated:
        logger.warning("Chain enumeration stopped at the cap of %d chains", limits.chain_cap)

    merged: dict[tuple, list] = {}
    census: dict[str, tuple[int, ...] | None] = {}
    collisions = 0
    for links in raw:
        key_parts = []
        for link in links:
            fp = link.fingerprint()
            if fp not in census:
                census[fp] = _census_key(link, limits)
            key_parts.append((link.degree, link.order, census[fp]))
        key = tuple(key_parts)
        if key in merged:
            merged[key][1] += 1
            collisions += 1
        else:
            merged[key] = [links, 1]
    chains = tuple(
        ImprimitivityChain(tuple(ChainLink(g) for g in links), multiplicity)
        for links, multiplicity in merged.values()
    )
    logger.debug("%d chains found, %d merged", len(raw), collisions)
    return ChainEnumeration(chains, truncated=truncated, collisions=collisions)


def _explicit_small(group: PermutationGroup) -> bool:
    key = (group.degree, group.order)
    if key in ((5, 5), (8, 56)):
        return is_primitive(group)
    if key == (9, 72):
        return is_primitive(group) and any(g.order == 8 for g in group.elements())
    return False


def link_membership(group: PermutationGroup, limits: Limits = DEFAULT_LIMITS) -> ListAMembership:
    """Membership of a primitive group in the exceptional lists, computed from its census."""
    n = group.degree
    sym_alt = is_sym_or_alt(group)
    in_nr: bool | None = False
    in_sr: bool | None = False
    if not sym_alt:
        try:
            sizes = regular_set_census(group, limits).sizes_with_regular
        except CapExceededError as exc:
            logger.warning("Census of a degree %d link not feasible: %s", n, exc)
            in_nr = in_sr = None
        else:
            in_nr = not sizes
            in_sr = bool(sizes) and n % 2 == 0 and sizes <= {n // 2}
    return ListAMembership(
        degree=n,
        order=group.order,
        is_sym_or_alt=sym_alt,
        in_L_NR=in_nr,
        in_L_SR=in_sr,
        is_explicit_small=_explicit_small(group),
        solvable=is_solvable(group),
    )


class Collection(StrEnum):
    A = "A"
    O = "O"  # noqa: E741
    O_ODD_ORDER = "O_odd_order"
    S = "S"


class ChainLabel(StrEnum):
    A_IMPRIMITIVE = "A_imprimitive"
    A_PRIME_IMPRIMITIVE = "A_prime_imprimitive"
    BOTH = "both"
    NEITHER = "neither"
    UNKNOWN = "unknown"


def in_collection(m: ListAMembership, collection: Collection) -> bool | None:
    if collection is Collection.A:
        return m.in_A
    if collection is Collection.S:
        if not m.solvable:
            return False
        return m.in_A
    if collection is Collection.O_ODD_ORDER:
        return (m.degree, m.order) in ((3, 3), (5, 5))
    # odd-degree collection
    if m.is_sym_or_alt and m.degree >= 3:
        return True
    if m.is_explicit_small and (m.degree, m.order) != (8, 56):
        return True
    return m.in_L_NR


def _exists(verdicts: list[bool | None]) -> bool | None:
    if any(v is True for v in verdicts):
        return True
    if any(v is None for v in verdicts):
        return None
    return False


def _all(values: tuple[bool | None, ...], want: bool) -> bool | None:
    if any(v is not None and v != want for v in values):
        return False
    if any(v is None for v in values):
        return None
    return True


def classify(
    group: PermutationGroup,
    collection: Collection | str = Collection.A,
    limits: Limits = DEFAULT_LIMITS,
) -> Classification:
    """Whether some chain lies inside the collection, and whether some chain avoids it."""
    collection = Collection(collection)
    chains = imprimitivity_chains(group, limits)
    cache: dict[str, ListAMembership] = {}
    memberships = []
    verdicts = []
    for chain in chains.chains:
        links = []
        for link in chain.links:
            fp = link.group.fingerprint()
            if fp not in cache:
                cache[fp] = link_membership(link.group, limits)
            links.append(cache[fp])
        memberships.append(tuple(links))
        verdicts.append(tuple(in_collection(m, collection) for m in links))

    inside = _exists([_all(v, True) for v in verdicts])
    outside = _exists([_all(v, False) for v in verdicts])
    if inside is None or outside is None:
        label = ChainLabel.UNKNOWN
    elif inside and outside:
        label = ChainLabel.BOTH
    elif inside:
        label = ChainLabel.A_IMPRIMITIVE
    elif outside:
        label = ChainLabel.A_PRIME_IMPRIMITIVE
    else:
        label = ChainLabel.NEITHER
    return Classification(
        collection=collection.value,
        label=label.value,
        chains=chains,
        memberships=tuple(memberships),
        verdicts=tuple(verdicts),
    )


def classify_A_prime(
    group: PermutationGroup, limits: Limits = DEFAULT_LIMITS
) -> Classification:
    return classify(group, Collection.A, limits)
