"""Self-check battery run by ``relkit verify-paper``.

Each check recomputes a published classification or an identity from scratch
and compares it with the expectations stored in the catalog. The quick level
stays at degree 8 and below; the full level adds degrees 9 to 11.
"""

from __future__ import annotations

import logging
import random
import time
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

from relkit.config import DEFAULT_LIMITS, Limits
from relkit.models.permutation import Permutation
from relkit.models.subset import Relation, Subset
from relkit.services import catalog
from relkit.services.closure import closure_group, monotonicity_check
from relkit.services.exceptions import CapExceededError, PreconditionError, VerificationError
from relkit.services.permgroup import PermutationGroup, is_sym_or_alt, random_subgroup
from relkit.services.relations import (
    basic_lemma_from_orbit,
    invariance_group,
    relation_closure,
)
from relkit.services.subset_action import (
    burnside_orbit_count,
    is_regular_set,
    is_set_transitive,
    orbit_of_subset,
    orbits_on_power_set,
    regular_set_census,
    setwise_stabilizer,
)
from relkit.services.wreath import (
    rela4_size,
    rela5_define_subgroup,
    rela_top_relation,
    regular_set_rela4,
    wreath_product,
)

logger = logging.getLogger(__name__)


class Level(StrEnum):
    QUICK = "quick"
    FULL = "full"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "skipped"
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "status": self.status, "details": self.details}


@dataclass
class BatteryReport:
    level: str
    checks: list[CheckResult] = field(default_factory=list)
    caps_hit: list[str] = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "level": self.level,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _max_degree(level: Level) -> int:
    return 8 if level is Level.QUICK else 10


def _primitive_entries(
    low: int, high: int
) -> Iterator[tuple[catalog.CatalogEntry, PermutationGroup]]:
    """Primitive catalog groups in a degree range that do not contain Alt."""
    for entry in catalog.list_entries():
        if not entry.primitive or not low <= entry.degree <= high:
            continue
        group = catalog.load(entry.name)
        if not is_sym_or_alt(group):
            yield entry, group


def _mismatch_details(mismatches: list[dict[str, Any]], checked: int) -> dict[str, Any]:
    return {"checked": checked, "mismatches": mismatches}


# --- checks ---


def check_no_regular_set(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """Census finds no regular set exactly for the set-transitive and no-regular-set entries."""
    mismatches = []
    checked = 0
    for entry, group in _primitive_entries(5, _max_degree(level)):
        expected = bool(entry.lists & {catalog.L_NR, catalog.L_ST})
        observed = not regular_set_census(group, limits).has_regular_set
        checked += 1
        if expected != observed:
            mismatches.append({"group": entry.name, "expected": expected, "observed": observed})
    return not mismatches, _mismatch_details(mismatches, checked)


def check_set_transitive(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    mismatches = []
    checked = 0
    for entry, group in _primitive_entries(5, _max_degree(level)):
        expected = catalog.L_ST in entry.lists
        observed = is_set_transitive(group)
        checked += 1
        if expected != observed:
            mismatches.append({"group": entry.name, "expected": expected, "observed": observed})
    return not mismatches, _mismatch_details(mismatches, checked)


def check_closure_indices(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """c(G) of every catalog group, including the orbit-equivalent pairs."""
    mismatches = []
    checked = 0
    top = min(_max_degree(level), limits.closure_max_degree)
    for entry in catalog.list_entries():
        if not 4 <= entry.degree <= top:
            continue
        group = catalog.load(entry.name)
        index = closure_group(group, limits).order // group.order
        checked += 1
        if index != entry.closure_index:
            mismatches.append(
                {"group": entry.name, "expected": entry.closure_index, "observed": index}
            )
    return not mismatches, _mismatch_details(mismatches, checked)


def check_klein_separation(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """V4 is orbit closed but not a relation group; D8 is a relation group."""
    klein = catalog.load("V4@4")
    d8 = catalog.load("D8@4")
    c_klein = closure_group(klein, limits).order // klein.order
    r_klein = relation_closure(klein, limits).r_of_G
    r_d8 = relation_closure(d8, limits).r_of_G
    details = {"c(V4)": c_klein, "r(V4)": r_klein, "r(D8)": r_d8}
    return (c_klein, r_klein, r_d8) == (1, 2, 1), details


def check_basic_lemma(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """Relations defining sampled subgroups of AGL(1,11) via one regular set."""
    h = catalog.load("AGL(1,11)@11")
    census = regular_set_census(h, limits)
    size = min(k for k in census.sizes_with_regular if 2 * k <= h.degree)
    w = census.first_regular(size)
    assert w is not None
    rng = random.Random(11)
    subgroups = [catalog.load("C11@11"), catalog.load("11:5@11")]
    subgroups += [random_subgroup(h, rng) for _ in range(4)]
    orders = []
    for g in subgroups:
        relation = basic_lemma_from_orbit(h, w, g, limits, verify=False)
        defined = invariance_group(relation, g, limits)
        orders.append({"subgroup": g.order, "defined": defined.order})
        if not defined.same_group(g):
            return False, {"regular_set_size": size, "orders": orders}
    return True, {"regular_set_size": size, "orders": orders}


def check_wreath_relation(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """Block copies plus unions of blocks define D10 wr S2 with m = d * m(R_Sigma)."""
    k = catalog.load("D10@5")
    pentagon = Relation.from_points(5, [[i, (i + 1) % 5] for i in range(5)])
    top_relation = Relation.from_points(2, [[0], [1]])
    lgroup = PermutationGroup.symmetric(2)
    wreath = wreath_product(k, lgroup)
    relation = rela5_define_subgroup(
        k, lgroup, pentagon, top_relation, None, wreath.group, limits
    )
    defined = invariance_group(relation, wreath.group, limits)
    top = rela_top_relation(top_relation, k.degree, 2)
    details = {
        "wreath_order": wreath.group.order,
        "defined_order": defined.order,
        "m": relation.m_R,
        "d_times_m_sigma": k.degree * top_relation.m_R,
        "top_sizes": sorted(top.arity),
    }
    ok = defined.same_group(wreath.group) and relation.m_R == k.degree * top_relation.m_R
    return ok, details


def check_regular_set_size(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """Size of the regular set assembled from regular sets of K and L."""
    cases = [("C3", 3, 2), ("C5", 5, 2)]
    if level is Level.FULL:
        cases.append(("C3", 3, 3))
    rows = []
    ok = True
    for name, d, s in cases:
        k = PermutationGroup.cyclic(d)
        lgroup = PermutationGroup.cyclic(s)
        x = regular_set_census(k, limits).first_regular(1 if d == 3 else 2)
        top = regular_set_census(lgroup, limits).first_regular(1)
        assert x is not None and top is not None
        try:
            w = regular_set_rela4(x, top, s, k, lgroup, limits)
        except VerificationError as exc:
            rows.append({"K": name, "s": s, "error": str(exc)})
            ok = False
            continue
        expected = rela4_size(d, x.size, s, top.size)
        regular = is_regular_set(wreath_product(k, lgroup).group, w, limits)
        rows.append({"K": name, "s": s, "size": w.size, "expected": expected, "regular": regular})
        ok = ok and w.size == expected and regular
    return ok, {"cases": rows}


def check_wreath_not_relation_group(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    cases = [(3, 2)] + ([(3, 3)] if level is Level.FULL else [])
    rows = []
    for d, s in cases:
        group = wreath_product(PermutationGroup.cyclic(d), PermutationGroup.cyclic(s)).group
        report = relation_closure(group, limits)
        rows.append({"d": d, "s": s, "r_of_G": report.r_of_G})
    return all(row["r_of_G"] > 1 for row in rows), {"cases": rows}


def _legal_pairs(n: int) -> Iterator[tuple[int, int]]:
    for k in range(n + 1):
        for ell in range(k, n - k + 1):
            yield k, ell


def check_monotonicity(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """ell-orbit equivalence implies k-orbit equivalence on random subgroup pairs."""
    rng = random.Random(2024)
    pool = [e for e in catalog.list_entries() if 4 <= e.degree <= 8]
    pairs = 200
    violations = []
    for _ in range(pairs):
        entry = rng.choice(pool)
        g = catalog.load(entry.name)
        h = random_subgroup(g, rng) if rng.random() < 0.5 else g
        sub = random_subgroup(g, rng)
        for k, ell in _legal_pairs(g.degree):
            if not monotonicity_check(sub, h, k, ell, limits):
                violations.append({"group": entry.name, "k": k, "ell": ell})
    return not violations, {"pairs": pairs, "violations": violations}


def check_counting_identities(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """Orbit-stabilizer and Burnside on the whole power set."""
    violations = []
    checked = 0
    for entry in catalog.list_entries():
        if entry.degree > 8:
            continue
        group = catalog.load(entry.name)
        partition = orbits_on_power_set(group, limits)
        if partition.orbit_count != burnside_orbit_count(group):
            violations.append({"group": entry.name, "identity": "burnside"})
        for rep, length in zip(partition.representatives, partition.lengths, strict=True):
            stab = setwise_stabilizer(group, Subset(group.degree, rep), limits)
            if length * stab.order != group.order:
                violations.append({"group": entry.name, "identity": "orbit-stabilizer"})
                break
        checked += 1
    return not violations, {"checked": checked, "violations": violations}


def check_census_naive(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """Census counts agree with testing every subset's orbit length."""
    violations = []
    checked = 0
    for entry in catalog.list_entries():
        if entry.degree > 6:
            continue
        group = catalog.load(entry.name)
        n = group.degree
        naive = [0] * (n + 1)
        for mask in range(1 << n):
            if len(orbit_of_subset(group, Subset(n, mask))) == group.order:
                naive[mask.bit_count()] += 1
        census = regular_set_census(group, limits)
        checked += 1
        if list(census.regular_count_by_size) != naive:
            violations.append({"group": entry.name})
    return not violations, {"checked": checked, "violations": violations}


def _intransitive_samples() -> list[tuple[str, PermutationGroup]]:
    def gens(n: int, *cycles: tuple[int, ...]) -> PermutationGroup:
        return PermutationGroup([Permutation.from_cycles(n, [c]) for c in cycles], degree=n)

    return [
        ("1@3", PermutationGroup.trivial(3)),
        ("(1,2)@3", gens(3, (0, 1))),
        ("(1,2)@4", gens(4, (0, 1))),
        ("(1,2,3)@4", gens(4, (0, 1, 2))),
        ("(1,2);(3,4)@4", gens(4, (0, 1), (2, 3))),
        ("(1,2,3,4)@5", gens(5, (0, 1, 2, 3))),
    ]


def check_closed_iff_relation_group(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """Primitive groups: orbit closed exactly when they are relation groups.

    Intransitive samples only get the forward direction: a relation group is orbit closed.
    """
    violations = []
    checked = 0
    for name, group in _intransitive_samples():
        report = relation_closure(group, limits)
        checked += 1
        if report.is_relation_group and not closure_group(group, limits).same_group(group):
            violations.append({"group": name, "orbit_closed": False, "r_of_G": report.r_of_G})
    top = min(_max_degree(level), limits.closure_max_degree)
    for entry in catalog.list_entries():
        if not entry.primitive or not 5 <= entry.degree <= top:
            continue
        group = catalog.load(entry.name)
        closed = closure_group(group, limits).same_group(group)
        report = relation_closure(group, limits)
        checked += 1
        if closed != report.is_relation_group:
            violations.append(
                {"group": entry.name, "orbit_closed": closed, "r_of_G": report.r_of_G}
            )
    return not violations, {"checked": checked, "violations": violations}


def _small_wreaths() -> list[tuple[str, PermutationGroup]]:
    out = []
    for d, s in ((2, 2), (2, 3), (3, 2), (2, 4), (4, 2)):
        group = wreath_product(PermutationGroup.cyclic(d), PermutationGroup.cyclic(s)).group
        out.append((f"wr(C{d},C{s})", group))
    return out


def check_index_identity(level: Level, limits: Limits) -> tuple[bool, dict[str, Any]]:
    """r(G) = c(G) * r(G*) whenever the relation search is exhaustive."""
    groups = [(e.name, catalog.load(e.name)) for e in catalog.list_entries() if e.degree <= 8]
    groups += _small_wreaths()
    groups += _intransitive_samples()
    violations = []
    checked = 0
    for name, group in groups:
        star = closure_group(group, limits)
        r_g = relation_closure(group, limits)
        r_star = relation_closure(star, limits)
        if not (r_g.exact and r_star.exact):
            continue
        checked += 1
        c = star.order // group.order
        if r_g.r_of_G != c * r_star.r_of_G:
            violations.append(
                {"group": name, "r": r_g.r_of_G, "c": c, "r_star": r_star.r_of_G}
            )
    return not violations, {"checked": checked, "violations": violations}


Check = Callable[[Level, Limits], tuple[bool, dict[str, Any]]]

# (name, check, levels it runs at)
CHECKS: tuple[tuple[str, Check, frozenset[Level]], ...] = (
    ("no-regular-set-lists", check_no_regular_set, frozenset(Level)),
    ("set-transitive-groups", check_set_transitive, frozenset(Level)),
    ("closure-indices", check_closure_indices, frozenset(Level)),
    ("klein-separation", check_klein_separation, frozenset(Level)),
    ("basic-lemma-agl-1-11", check_basic_lemma, frozenset({Level.FULL})),
    ("wreath-defining-relation", check_wreath_relation, frozenset({Level.FULL})),
    ("wreath-regular-set-size", check_regular_set_size, frozenset(Level)),
    ("wreath-not-relation-group", check_wreath_not_relation_group, frozenset(Level)),
    ("monotonicity", check_monotonicity, frozenset(Level)),
    ("counting-identities", check_counting_identities, frozenset(Level)),
    ("census-vs-naive", check_census_naive, frozenset(Level)),
    ("closed-iff-relation-group", check_closed_iff_relation_group, frozenset(Level)),
    ("index-identity", check_index_identity, frozenset(Level)),
)


def run_battery(
    level: Level | str = Level.QUICK,
    limits: Limits = DEFAULT_LIMITS,
    only: set[str] | None = None,
) -> BatteryReport:
    """Run every check registered for *level*; *only* restricts to named checks."""
    level = Level(level)
    report = BatteryReport(level=level.value)
    for name, check, levels in CHECKS:
        if level not in levels or (only is not None and name not in only):
            continue
        started = time.perf_counter()
        try:
            ok, details = check(level, limits)
            status = "pass" if ok else "fail"
        except CapExceededError as exc:
            logger.warning("Check %s skipped: %s", name, exc)
            report.caps_hit.append(exc.cap)
            status, details = "skipped", {"cap": exc.cap, "limit": exc.limit}
        except (PreconditionError, VerificationError) as exc:
            logger.error("Check %s raised: %s", name, exc)
            status, details = "fail", {"error": str(exc)}
        report.timing[name] = round(time.perf_counter() - started, 3)
        report.checks.append(CheckResult(name, status, details))
        logger.info("%s: %s", name, status)
    if not report.passed:
        logger.warning("%d of %d checks failed", len(report.failures), len(report.checks))
    return report

