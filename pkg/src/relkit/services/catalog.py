"""Built-in named permutation groups.

Every entry is built from a textbook construction (affine and projective maps
over small fields, cycle notation for the Mathieu groups) and checked against
its declared order and primitivity when loaded. List tags record where the
group sits among the exceptional primitive groups; they are expectations for
the verification battery, never inputs to a computation.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from functools import cache

from relkit.config import DEFAULT_LIMITS, Limits
from relkit.models.permutation import Permutation
from relkit.services import finite_field as ff
from relkit.services.exceptions import CapExceededError, UnknownGroupError, VerificationError
from relkit.services.permgroup import PermutationGroup, is_primitive, is_sym_or_alt

logger = logging.getLogger(__name__)

# List tags
L_NR = "L_NR"
L_ST = "L_ST"
L_OE = "L_OE"


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    degree: int
    order: int
    primitive: bool
    solvable: bool
    builder: Callable[[], list[Permutation]] = field(repr=False, compare=False)
    aliases: tuple[str, ...] = ()
    lists: frozenset[str] = frozenset()
    closure_index: int = 1


# --- constructions ---


def _cycles(degree: int, *texts: str) -> Callable[[], list[Permutation]]:
    def build() -> list[Permutation]:
        from relkit.utils.parsing import parse_permutation

        return [parse_permutation(f"{t}@{degree}") for t in texts]

    return build


def _affine_line(q: int, mult: Callable[[int], Iterable[int]], frobenius: bool = False):
    """x -> x + 1 and x -> a x for each a, optionally x -> x^p, on GF(q)."""

    def build() -> list[Permutation]:
        f = ff.field(q)
        gens = [ff.affine_map(f, 1, 1)]
        gens += [ff.affine_map(f, a, 0) for a in mult(f.primitive_element())]
        if frobenius:
            gens.append(ff.affine_map(f, 1, 0, frobenius=1))
        return gens

    return build


def _power(q: int, e: int) -> Callable[[int], list[int]]:
    return lambda g: [ff.field(q).power(g, e)]


def _projective_line(q: int, *extensions: str) -> Callable[[], list[Permutation]]:
    """PSL(2, q) on q + 1 points plus the named outer elements.

    ``diag`` is x -> g x for a non-square g, ``field`` is x -> x^p and
    ``twisted`` is x -> g x^p.
    """

    def build() -> list[Permutation]:
        f = ff.field(q)
        g = f.primitive_element()
        minus_one = f.neg(1)
        gens = [
            ff.mobius_map(f, 1, 1, 0, 1),
            ff.mobius_map(f, f.mul(g, g), 0, 0, 1),
            ff.mobius_map(f, 0, minus_one, 1, 0),
        ]
        for ext in extensions:
            if ext == "diag":
                gens.append(ff.mobius_map(f, g, 0, 0, 1))
            elif ext == "field":
                gens.append(ff.mobius_map(f, 1, 0, 0, 1, frobenius=1))
            elif ext == "twisted":
                gens.append(ff.mobius_map(f, g, 0, 0, 1, frobenius=1))
            else:
                raise ValueError(f"Unknown extension {ext!r}")
        return gens

    return build


def _affine_space(p: int, m: int, *matrices: tuple[tuple[int, ...], ...], special: bool = False):
    """Translations of GF(p)^m with the given matrices, plus SL(m, p) when *special*."""

    def build() -> list[Permutation]:
        unit = tuple(int(i == 0) for i in range(m))
        gens = [ff.translation(p, unit)]
        mats = list(matrices)
        if special:
            mats += ff.transvections(p, m)
        gens += [ff.linear_map(p, mat) for mat in mats]
        return gens

    return build


def _projective_space(p: int, m: int) -> Callable[[], list[Permutation]]:
    return lambda: [ff.projective_map(p, mat) for mat in ff.transvections(p, m)]


def _on_pairs(n: int, *texts: str) -> Callable[[], list[Permutation]]:
    """Action of permutations of n points on the n(n-1)/2 unordered pairs."""

    def build() -> list[Permutation]:
        pairs = list(itertools.combinations(range(n), 2))
        index = {frozenset(pr): i for i, pr in enumerate(pairs)}
        out = []
        for g in _cycles(n, *texts)():
            out.append(Permutation(tuple(index[frozenset((g(a), g(b)))] for a, b in pairs)))
        return out

    return build


def _biplane_11() -> list[Permutation]:
    """Automorphisms of the translates of the quadratic residues mod 11."""
    from relkit.models.subset import Relation
    from relkit.services.relations import invariance_group

    residues = [1, 3, 4, 5, 9]
    relation = Relation.from_points(11, [[(r + t) % 11 for r in residues] for t in range(11)])
    seed = PermutationGroup.cyclic(11)
    return list(invariance_group(relation, seed).generators)


def _cyclic(n: int) -> Callable[[], list[Permutation]]:
    return lambda: list(PermutationGroup.cyclic(n).generators)


def _dihedral(n: int) -> Callable[[], list[Permutation]]:
    return lambda: list(PermutationGroup.dihedral(n).generators)


def _symmetric(n: int) -> Callable[[], list[Permutation]]:
    return lambda: list(PermutationGroup.symmetric(n).generators)


def _alternating(n: int) -> Callable[[], list[Permutation]]:
    return lambda: list(PermutationGroup.alternating(n).generators)


_Q8 = (((0, 1), (2, 0)), ((1, 1), (1, 2)))
_D8_GF3 = (((0, 1), (2, 0)), ((1, 0), (0, 2)))


_ENTRIES: tuple[CatalogEntry, ...] = (
    # degree 4
    CatalogEntry("C4@4", 4, 4, False, True, _cyclic(4), closure_index=2),
    CatalogEntry("V4@4", 4, 4, False, True, _cycles(4, "(1,2)(3,4)", "(1,3)(2,4)"),
                 aliases=("V@4", "Klein@4")),
    CatalogEntry("D8@4", 4, 8, False, True, _dihedral(4)),
    CatalogEntry("A4@4", 4, 12, True, True, _alternating(4), closure_index=2),
    CatalogEntry("S4@4", 4, 24, True, True, _symmetric(4)),
    # degree 5
    CatalogEntry("C5@5", 5, 5, True, True, _cyclic(5), lists=frozenset({L_OE}),
                 closure_index=2),
    CatalogEntry("D10@5", 5, 10, True, True, _dihedral(5), lists=frozenset({L_NR})),
    CatalogEntry("F20@5", 5, 20, True, True, _affine_line(5, lambda g: [g]),
                 aliases=("AGL(1,5)@5",), lists=frozenset({L_ST}), closure_index=6),
    CatalogEntry("A5@5", 5, 60, True, False, _alternating(5), closure_index=2),
    CatalogEntry("S5@5", 5, 120, True, False, _symmetric(5)),
    # degree 6
    CatalogEntry("PSL(2,5)@6", 6, 60, True, False, _projective_line(5),
                 aliases=("L2(5)@6", "A5@6"), lists=frozenset({L_NR})),
    CatalogEntry("PGL(2,5)@6", 6, 120, True, False, _projective_line(5, "diag"),
                 aliases=("L2(5).2@6", "S5@6"), lists=frozenset({L_ST}), closure_index=6),
    # degree 7
    CatalogEntry("C7@7", 7, 7, True, True, _cyclic(7)),
    CatalogEntry("F21@7", 7, 21, True, True, _affine_line(7, _power(7, 2)),
                 aliases=("7:3@7",)),
    CatalogEntry("F42@7", 7, 42, True, True, _affine_line(7, lambda g: [g]),
                 aliases=("AGL(1,7)@7",), lists=frozenset({L_NR})),
    CatalogEntry("PSL(3,2)@7", 7, 168, True, False, _projective_space(2, 3),
                 aliases=("L3(2)@7",), lists=frozenset({L_NR})),
    # degree 8
    CatalogEntry("AGL(1,8)@8", 8, 56, True, True, _affine_line(8, lambda g: [g]),
                 aliases=("2^3:7@8",), lists=frozenset({L_OE}), closure_index=24),
    CatalogEntry("AGammaL(1,8)@8", 8, 168, True, True,
                 _affine_line(8, lambda g: [g], frobenius=True),
                 aliases=("2^3:7.3@8", "AΓL(1,8)@8"), lists=frozenset({L_NR, L_OE}),
                 closure_index=8),
    CatalogEntry("AGL(3,2)@8", 8, 1344, True, False, _affine_space(2, 3, special=True),
                 aliases=("ASL(3,2)@8", "2^3:L3(2)@8"), lists=frozenset({L_NR})),
    CatalogEntry("PSL(2,7)@8", 8, 168, True, False, _projective_line(7),
                 aliases=("L2(7)@8",), lists=frozenset({L_NR})),
    CatalogEntry("PGL(2,7)@8", 8, 336, True, False, _projective_line(7, "diag"),
                 aliases=("L2(7).2@8",), lists=frozenset({L_NR})),
    # degree 9
    CatalogEntry("3^2:4@9", 9, 36, True, True, _affine_line(9, _power(9, 2))),
    CatalogEntry("3^2:Q8@9", 9, 72, True, True, _affine_space(3, 2, *_Q8)),
    CatalogEntry("AGL(1,9)@9", 9, 72, True, True, _affine_line(9, lambda g: [g]),
                 aliases=("3^2:8@9",), lists=frozenset({L_OE}), closure_index=2),
    CatalogEntry("3^2:D8@9", 9, 72, True, True, _affine_space(3, 2, *_D8_GF3),
                 lists=frozenset({L_NR})),
    CatalogEntry("AGammaL(1,9)@9", 9, 144, True, True,
                 _affine_line(9, lambda g: [g], frobenius=True),
                 aliases=("3^2:8.2@9", "AΓL(1,9)@9"), lists=frozenset({L_NR})),
    CatalogEntry("ASL(2,3)@9", 9, 216, True, True, _affine_space(3, 2, special=True),
                 aliases=("3^2:2.L2(3)@9",), lists=frozenset({L_NR, L_OE}), closure_index=2),
    CatalogEntry("AGL(2,3)@9", 9, 432, True, True,
                 _affine_space(3, 2, ((2, 0), (0, 1)), special=True),
                 aliases=("3^2:2.L2(3).2@9",), lists=frozenset({L_NR})),
    CatalogEntry("PSL(2,8)@9", 9, 504, True, False, _projective_line(8),
                 aliases=("L2(8)@9",), lists=frozenset({L_ST}), closure_index=720),
    CatalogEntry("PGammaL(2,8)@9", 9, 1512, True, False, _projective_line(8, "field"),
                 aliases=("L2(8).3@9", "PΓL(2,8)@9"), lists=frozenset({L_ST}),
                 closure_index=240),
    # degree 10
    CatalogEntry("A5@10", 10, 60, True, False, _on_pairs(5, "(1,2,3,4,5)", "(1,2,3)")),
    CatalogEntry("S5@10", 10, 120, True, False, _on_pairs(5, "(1,2,3,4,5)", "(1,2)"),
                 lists=frozenset({L_NR})),
    CatalogEntry("PSL(2,9)@10", 10, 360, True, False, _projective_line(9),
                 aliases=("L2(9)@10", "A6@10"), lists=frozenset({L_NR})),
    CatalogEntry("PGL(2,9)@10", 10, 720, True, False, _projective_line(9, "diag"),
                 aliases=("L2(9).2@10",), lists=frozenset({L_NR, L_OE}), closure_index=2),
    CatalogEntry("PSigmaL(2,9)@10", 10, 720, True, False, _projective_line(9, "field"),
                 aliases=("PΣL(2,9)@10", "S6@10"), lists=frozenset({L_NR})),
    CatalogEntry("M10@10", 10, 720, True, False, _projective_line(9, "twisted"),
                 lists=frozenset({L_NR})),
    CatalogEntry("PGammaL(2,9)@10", 10, 1440, True, False,
                 _projective_line(9, "diag", "field"),
                 aliases=("L2(9).2.2@10", "PΓL(2,9)@10"), lists=frozenset({L_NR})),
    # degree 11
    CatalogEntry("C11@11", 11, 11, True, True, _cyclic(11)),
    CatalogEntry("11:5@11", 11, 55, True, True, _affine_line(11, _power(11, 2)),
                 aliases=("C11:C5@11",)),
    CatalogEntry("AGL(1,11)@11", 11, 110, True, True, _affine_line(11, lambda g: [g])),
    CatalogEntry("PSL(2,11)@11", 11, 660, True, False, _biplane_11,
                 aliases=("L2(11)@11",), lists=frozenset({L_NR})),
    CatalogEntry("M11@11", 11, 7920, True, False,
                 _cycles(11, "(1,2,3,4,5,6,7,8,9,10,11)", "(3,7,11,8)(4,10,5,6)"),
                 lists=frozenset({L_NR})),
    # degree 12
    CatalogEntry("PSL(2,11)@12", 12, 660, True, False, _projective_line(11),
                 aliases=("L2(11)@12",)),
    CatalogEntry("PGL(2,11)@12", 12, 1320, True, False, _projective_line(11, "diag"),
                 aliases=("L2(11).2@12",), lists=frozenset({L_NR})),
    CatalogEntry("M12@12", 12, 95040, True, False,
                 _cycles(12, "(1,2,3,4,5,6,7,8,9,10,11)", "(3,7,11,8)(4,10,5,6)",
                         "(1,12)(2,11)(3,6)(4,8)(5,9)(7,10)"),
                 lists=frozenset({L_NR})),
    # degree 13
    CatalogEntry("AGL(1,13)@13", 13, 156, True, True, _affine_line(13, lambda g: [g])),
    CatalogEntry("PSL(3,3)@13", 13, 5616, True, False, _projective_space(3, 3),
                 aliases=("L3(3)@13",), lists=frozenset({L_NR})),
)

_BY_NAME: dict[str, CatalogEntry] = {}
for _entry in _ENTRIES:
    for _key in (_entry.name, *_entry.aliases):
        _BY_NAME[_key.lower()] = _entry


def resolve(name: str) -> CatalogEntry:
    entry = _BY_NAME.get(name.strip().lower())
    if entry is None:
        raise UnknownGroupError(f"Unknown catalog group {name!r}")
    return entry


def has(name: str) -> bool:
    return name.strip().lower() in _BY_NAME


@cache
def _load(name: str) -> PermutationGroup:
    entry = resolve(name)
    group = PermutationGroup(entry.builder(), degree=entry.degree)
    if group.order != entry.order:
        raise VerificationError(
            f"{entry.name} has order {group.order}, declared {entry.order}",
            details={"name": entry.name, "order": group.order, "declared": entry.order},
        )
    if entry.degree >= 2 and is_primitive(group) != entry.primitive:
        raise VerificationError(
            f"{entry.name} primitivity differs from its declaration",
            details={"name": entry.name, "primitive": not entry.primitive},
        )
    logger.debug("Loaded %s: order %d", entry.name, group.order)
    return group


def load(name: str) -> PermutationGroup:
    """The verified group of a catalog entry or alias."""
    return _load(resolve(name).name)


def list_entries(degree: int | None = None) -> list[CatalogEntry]:
    entries = [e for e in _ENTRIES if degree is None or e.degree == degree]
    return sorted(entries, key=lambda e: (e.degree, e.order, e.name))


def entries_in(tag: str) -> list[CatalogEntry]:
    return [e for e in list_entries() if tag in e.lists]


@dataclass(frozen=True)
class ExceptionalLists:
    """The exceptional primitive groups as (degree, name) pairs, degree <= 13."""

    set_transitive: tuple[tuple[int, str], ...]
    orbit_equivalent: tuple[tuple[int, str], ...]
    no_regular_set: tuple[tuple[int, str], ...]
    not_in_catalog: tuple[tuple[int, str], ...]

    def names(self, which: str) -> frozenset[str]:
        return frozenset(name for _, name in getattr(self, which))


def exceptional_lists() -> ExceptionalLists:
    def pairs(tag: str) -> tuple[tuple[int, str], ...]:
        return tuple((e.degree, e.name) for e in entries_in(tag))

    return ExceptionalLists(
        set_transitive=pairs(L_ST),
        orbit_equivalent=pairs(L_OE),
        no_regular_set=pairs(L_NR),
        not_in_catalog=((12, "M11@12"),),
    )


@dataclass(frozen=True)
class SurveyRow:
    name: str
    degree: int
    order: int
    sizes: tuple[int, ...] | None

    @property
    def two_sizes(self) -> bool | None:
        return None if self.sizes is None else len(self.sizes) >= 2


def two_sizes_survey(
    degrees: Iterable[int], limits: Limits = DEFAULT_LIMITS
) -> list[SurveyRow]:
    """Regular-set sizes of the primitive catalog groups not containing Alt."""
    from relkit.services.subset_action import regular_set_census

    wanted = set(degrees)
    rows = []
    for entry in list_entries():
        if entry.degree not in wanted or not entry.primitive:
            continue
        group = load(entry.name)
        if is_sym_or_alt(group):
            continue
        try:
            sizes = tuple(sorted(regular_set_census(group, limits).sizes_with_regular))
        except CapExceededError as exc:
            logger.warning("Survey skips %s: %s", entry.name, exc)
            sizes = None
        rows.append(SurveyRow(entry.name, entry.degree, entry.order, sizes))
    return rows

