from __future__ import annotations

import json
import os
from pathlib import Path
from typing import TYPE_CHECKING, Any

from rich.console import Console
from rich.table import Table

from relkit.models.permutation import Permutation

if TYPE_CHECKING:
    from relkit.models.reports import RunReport
    from relkit.services.permgroup import PermutationGroup


def format_permutation(perm: Permutation) -> str:
    """1-based cycle notation without fixed points; ``()`` for the identity.

    >>> format_permutation(Permutation((1, 2, 0, 4, 3, 5)))
    '(1,2,3)(4,5)'
    """
    cycles = [c for c in perm.cycles if len(c) > 1]
    if not cycles:
        return "()"
    return "".join("(" + ",".join(str(p + 1) for p in c) + ")" for c in cycles)


def group_to_dict(group: PermutationGroup) -> dict[str, Any]:
    """The group file format: ``{degree, generators}`` in cycle notation."""
    return {
        "degree": group.degree,
        "generators": [format_permutation(g) for g in group.generators],
    }


def dump_json(data: Any) -> str:
    """Stable JSON text: sorted keys, so equal reports are byte-identical."""
    return json.dumps(data, indent=2, sort_keys=True)


def write_json(path: Path, data: Any) -> Path:
    """Write *data* to *path* atomically (tmp + replace)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(dump_json(data) + "\n")
    os.replace(tmp, path)
    return path


def _flatten(value: Any, prefix: str = "") -> list[tuple[str, str]]:
    if isinstance(value, dict) and value:
        rows: list[tuple[str, str]] = []
        for key in sorted(value, key=str):
            rows += _flatten(value[key], f"{prefix}.{key}" if prefix else str(key))
        return rows
    if isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
        rows = []
        for i, item in enumerate(value):
            rows += _flatten(item, f"{prefix}[{i}]")
        return rows
    if isinstance(value, bool) or value is None:
        text = {True: "yes", False: "no", None: "-"}[value]
    elif isinstance(value, (list, dict)):
        text = json.dumps(value, separators=(",", " "))
    else:
        text = str(value)
    return [(prefix, text)]


def report_table(report: RunReport) -> Table:
    """Key/value rows of a report's results, nested keys joined with dots."""
    table = Table(title=f"relkit {report.command}", show_header=True, header_style="bold")
    table.add_column("Field", style="cyan", no_wrap=True)
    table.add_column("Value", overflow="fold")
    for key, text in _flatten(report.results):
        table.add_row(key, text)
    if report.caps_hit:
        table.add_row("caps_hit", ", ".join(report.caps_hit), style="yellow")
    for key, seconds in sorted(report.timing.items()):
        table.add_row(f"timing.{key}", f"{seconds:.3f}s", style="dim")
    return table


def print_report(report: RunReport, fmt: str = "json", console: Console | None = None) -> None:
    """Emit *report* on stdout as JSON or as a rich table."""
    if fmt == "table":
        (console or Console()).print(report_table(report))
        return
    print(dump_json(report.to_dict()))
