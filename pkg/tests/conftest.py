from __future__ import annotations

import pytest
from sympy.combinatorics import Permutation as SympyPermutation
from sympy.combinatorics import PermutationGroup as SympyGroup

from relkit.config import Limits
from relkit.models.subset import Relation
from relkit.services.closure import clear_session_cache
from relkit.services.permgroup import PermutationGroup

_RELKIT_ENV = (
    "RELKIT_THREADS",
    "RELKIT_MAX_DEGREE_EXHAUSTIVE",
    "RELKIT_CLOSURE_MAX_DEGREE",
    "RELKIT_CENSUS_WORK_CAP",
    "RELKIT_CENSUS_MAX_DEGREE",
    "RELKIT_UNION_SEARCH_CAP",
    "RELKIT_CHAIN_CAP",
    "RELKIT_CACHE",
)


def to_sympy(group: PermutationGroup) -> SympyGroup:
    """Independent oracle: the same generators as a sympy group."""
    gens = [SympyPermutation(list(g.images)) for g in group.generators]
    if not gens:
        gens = [SympyPermutation(list(range(group.degree)))]
    return SympyGroup(gens)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch, tmp_path):
    """Keep user config, caches and RELKIT_* variables out of every test."""
    for var in _RELKIT_ENV:
        monkeypatch.delenv(var, raising=False)
    monkeypatch.setenv("RELKIT_CONFIG_DIR", str(tmp_path / "config"))
    monkeypatch.setenv("RELKIT_CACHE_DIR", str(tmp_path / "cache"))
    clear_session_cache()
    yield
    clear_session_cache()


@pytest.fixture
def limits() -> Limits:
    return Limits()


@pytest.fixture
def small_limits() -> Limits:
    """Tight caps so cap paths trigger on tiny inputs."""
    return Limits(
        max_degree_exhaustive=5,
        closure_max_degree=5,
        census_work_cap=16,
        union_search_cap=2,
        orbit_universe_cap=64,
        chain_cap=1,
    )


# --- groups ---


@pytest.fixture
def c5() -> PermutationGroup:
    return PermutationGroup.cyclic(5)


@pytest.fixture
def d10() -> PermutationGroup:
    return PermutationGroup.dihedral(5)


@pytest.fixture
def klein() -> PermutationGroup:
    from relkit.utils.parsing import parse_generators

    return PermutationGroup(parse_generators("(1,2)(3,4);(1,3)(2,4)"), degree=4)


@pytest.fixture
def hexagon() -> Relation:
    """Edges of the 6-cycle; its invariance group is D12."""
    return Relation.from_points(6, [[i, (i + 1) % 6] for i in range(6)])


@pytest.fixture
def pentagon() -> Relation:
    return Relation.from_points(5, [[i, (i + 1) % 5] for i in range(5)])


@pytest.fixture
def relation_file(tmp_path):
    """Write a relation in the 1-based file format and return its path."""
    import json

    def write(degree: int, sets: list[list[int]], name: str = "relation.json"):
        path = tmp_path / name
        path.write_text(json.dumps({"degree": degree, "sets": sets}))
        return path

    return write
