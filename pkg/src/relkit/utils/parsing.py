"""Readers for the text and JSON forms of permutations, groups and relations.

Points are 1-based in every text and file format and 0-based in the library.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from relkit.config import DEFAULT_LIMITS, Limits
from relkit.models.permutation import Permutation
from relkit.models.subset import Relation
from relkit.services.exceptions import ParseError, UnknownGroupError
from relkit.services.permgroup import PermutationGroup

ELEMENT_SEP_RE = r" *[, ] *"
CYCLE_RE = re.compile(rf"\(( *\d+({ELEMENT_SEP_RE}\d+)* *)?\) *")
_DEGREE_RE = re.compile(r"@\s*(\d+)\s*$")
_NAMED_RE = re.compile(r"^(sym|alt|cyclic|dihedral)\s*\(\s*(\d+)\s*\)$", re.IGNORECASE)
_PERM_SEP_RE = re.compile(r"\)\s*[,;]\s*\(")


def _split_degree(text: str) -> tuple[str, int | None]:
    match = _DEGREE_RE.search(text)
    if match is None:
        return text, None
    return text[: match.start()], int(match.group(1))


def _parse_cycles(text: str, offset: int = 0) -> list[list[int]]:
    """Cycles of a product like "(1,2,3)(4 5)" as 0-based point lists."""
    cycles: list[list[int]] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = CYCLE_RE.match(text, pos)
        if match is None:
            raise ParseError(f"Expected '(' in {text.strip()!r}", position=offset + pos)
        body = match.group(1)
        if body and body.strip():
            points = [int(tok) for tok in re.split(ELEMENT_SEP_RE, body.strip())]
            if 0 in points:
                raise ParseError("Points are numbered from 1", position=offset + match.start())
            if len(set(points)) != len(points):
                raise ParseError(
                    f"Point repeated within cycle ({body.strip()})",
                    position=offset + match.start(),
                )
            cycles.append([p - 1 for p in points])
        pos = match.end()
    return cycles


def parse_permutation(text: str, degree: int | None = None) -> Permutation:
    """A product of cycles, composed left to right, with an optional ``@n`` degree.

    >>> parse_permutation("(1,2,3)(4,5)@6").images
    (1, 2, 0, 4, 3, 5)
    """
    body, suffix = _split_degree(text)
    cycles = _parse_cycles(body)
    needed = max((p + 1 for c in cycles for p in c), default=0)
    n = suffix if suffix is not None else max(degree or 0, needed)
    if n < needed:
        raise ParseError(f"Point {needed} exceeds the declared degree {n}", position=len(body))
    return Permutation.from_cycles(n, cycles)


def parse_generators(text: str) -> list[Permutation]:
    """Permutations separated by ``;`` or by a comma between cycles, padded to one degree."""
    body, suffix = _split_degree(text)
    pieces: list[tuple[str, int]] = []
    start = 0
    for match in _PERM_SEP_RE.finditer(body):
        cut = match.start() + 1
        pieces.append((body[start:cut], start))
        start = match.end() - 1
    pieces.append((body[start:], start))
    cycle_lists = [_parse_cycles(piece, offset) for piece, offset in pieces]
    needed = max((p + 1 for cycles in cycle_lists for c in cycles for p in c), default=0)
    n = suffix if suffix is not None else needed
    if n < needed:
        raise ParseError(f"Point {needed} exceeds the declared degree {n}", position=len(body))
    return [Permutation.from_cycles(n, cycles) for cycles in cycle_lists]


def _split_top_level(text: str) -> list[str]:
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(current).strip())
            current = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        current.append(ch)
    parts.append("".join(current).strip())
    return parts


def parse_group_spec(spec: str, limits: Limits = DEFAULT_LIMITS) -> PermutationGroup:
    """Catalog name or alias, ``Sym(n)``-style family, ``wr(A, B)``, JSON file or generators."""
    from relkit.services import catalog
    from relkit.services.wreath import wreath_product

    text = spec.strip()
    if not text:
        raise ParseError("Empty group specification", position=0)
    if text.lower().startswith("wr(") and text.endswith(")"):
        args = _split_top_level(text[3:-1])
        if len(args) != 2:
            raise ParseError(f"wr(...) takes two groups, got {len(args)}", position=3)
        return wreath_product(
            parse_group_spec(args[0], limits), parse_group_spec(args[1], limits)
        ).group
    named = _NAMED_RE.match(text)
    if named:
        family, n = named.group(1).lower(), int(named.group(2))
        return {
            "sym": PermutationGroup.symmetric,
            "alt": PermutationGroup.alternating,
            "cyclic": PermutationGroup.cyclic,
            "dihedral": PermutationGroup.dihedral,
        }[family](n)
    if catalog.has(text):
        return catalog.load(text)
    if text.startswith("("):
        gens = parse_generators(text)
        return PermutationGroup(gens, degree=gens[0].degree if gens else 0)
    if text.endswith(".json") and Path(text).is_file():
        return load_group_file(Path(text))
    raise UnknownGroupError(f"Not a catalog group, family, file or generator list: {spec!r}")


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", position=exc.pos) from None


def group_from_dict(data: Any) -> PermutationGroup:
    if not isinstance(data, dict) or "degree" not in data or "generators" not in data:
        raise ParseError("Group file needs 'degree' and 'generators'")
    n = int(data["degree"])
    gens = [parse_permutation(str(g), degree=n) for g in data["generators"]]
    for g in gens:
        if g.degree != n:
            raise ParseError(f"Generator of degree {g.degree} in a degree {n} group")
    return PermutationGroup(gens, degree=n)


def load_group_file(path: Path) -> PermutationGroup:
    return group_from_dict(_read_json(path))


def relation_from_dict(data: Any) -> Relation:
    if not isinstance(data, dict) or "degree" not in data or "sets" not in data:
        raise ParseError("Relation file needs 'degree' and 'sets'")
    n = int(data["degree"])
    sets = []
    for s in data["sets"]:
        points = [int(p) for p in s]
        if any(not 1 <= p <= n for p in points):
            raise ParseError(f"Set {points} has points outside 1..{n}")
        sets.append([p - 1 for p in points])
    try:
        return Relation.from_points(n, sets)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def load_relation(path: Path) -> Relation:
    return relation_from_dict(_read_json(path))
