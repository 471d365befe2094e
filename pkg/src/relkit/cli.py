from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable
from importlib.resources import files
from pathlib import Path
from typing import TYPE_CHECKING, Any

from relkit.config import Limits
from relkit.models.reports import RunReport
from relkit.models.subset import Subset
from relkit.services.exceptions import (
    CapExceededError,
    ParseError,
    RelkitError,
    UnknownGroupError,
)

if TYPE_CHECKING:
    from relkit.services.permgroup import PermutationGroup

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2
EXIT_CAP = 3
EXIT_PARSE = 4


def _setup_logging(verbosity: int) -> None:
    from rich.console import Console
    from rich.logging import RichHandler

    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True)
    logging.basicConfig(level=level, format="%(message)s", handlers=[handler], force=True)


def _limits(args: argparse.Namespace) -> Limits:
    from relkit.config import load_limits

    return load_limits(
        {
            "threads": args.threads,
            "max_degree_exhaustive": args.max_degree_exhaustive,
            "census_work_cap": args.census_work_cap,
            "persistent_cache": True if args.cache else None,
        }
    )


def _group(spec: str, limits: Limits) -> PermutationGroup:
    from relkit.utils.parsing import parse_group_spec

    return parse_group_spec(spec, limits)


def _group_summary(group: PermutationGroup) -> dict[str, Any]:
    from relkit.services.permgroup import is_primitive, is_solvable, is_transitive
    from relkit.utils.formatters import group_to_dict

    transitive = is_transitive(group)
    return {
        **group_to_dict(group),
        "order": group.order,
        "transitive": transitive,
        "primitive": transitive and is_primitive(group),
        "solvable": is_solvable(group),
    }


# --- commands ---


def _cmd_order(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    report.results = _group_summary(_group(args.group, limits))
    return EXIT_OK


def _cmd_census(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.services.subset_action import has_regular_set_sampling, regular_set_census

    group = _group(args.group, limits)
    try:
        report.results = regular_set_census(group, limits).to_dict()
    except CapExceededError:
        if not args.sample:
            raise
        logger.warning("Census over the caps, sampling %d subsets instead", args.sample)
        found = has_regular_set_sampling(group, args.sample, args.seed, limits)
        report.caps_hit.append("census")
        report.results = {
            "degree": group.degree,
            "group_order": group.order,
            "sampled": args.sample,
            "regular_set": None if found is None else [p + 1 for p in found.points],
        }
    return EXIT_OK


def _cmd_orbits(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.services.subset_action import (
        burnside_orbit_count,
        orbits_on_k_subsets,
        orbits_on_power_set,
    )

    group = _group(args.group, limits)
    if args.k is None:
        report.results = orbits_on_power_set(group, limits).to_dict()
        report.results["burnside_count"] = burnside_orbit_count(group)
    else:
        report.results = orbits_on_k_subsets(group, args.k, limits).to_dict()
    return EXIT_OK


def _cmd_closure(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.services.closure import closure_group, orbit_closure
    from relkit.utils.formatters import group_to_dict

    group = _group(args.group, limits)
    report.results = orbit_closure(group, args.k or (), limits).to_dict()
    report.results["closure"] = group_to_dict(closure_group(group, limits))
    return EXIT_OK


def _cmd_relation_group(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.services.relations import relation_closure

    group = _group(args.group, limits)
    result = relation_closure(group, limits, allow_greedy=args.greedy)
    if not result.exact:
        report.caps_hit.append("union_search_cap")
    report.results = result.to_dict()
    return EXIT_OK


def _cmd_invariance_group(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.services.relations import invariance_group
    from relkit.utils.formatters import group_to_dict
    from relkit.utils.parsing import load_relation

    relation = load_relation(Path(args.relation))
    candidate = _group(args.candidate, limits) if args.candidate else None
    group = invariance_group(relation, candidate, limits)
    report.results = {**group_to_dict(group), "order": group.order}
    return EXIT_OK


def _cmd_wreath(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.services.wreath import wreath_product
    from relkit.utils.formatters import group_to_dict

    action = wreath_product(_group(args.k, limits), _group(args.top, limits))
    report.results = {**action.to_dict(), "group": group_to_dict(action.group)}
    return EXIT_OK


def _cmd_chains(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.services.wreath import imprimitivity_chains

    chains = imprimitivity_chains(_group(args.group, limits), limits)
    if chains.truncated:
        report.caps_hit.append("chain_cap")
    report.results = chains.to_dict()
    return EXIT_OK


def _cmd_classify(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.services.wreath import classify

    result = classify(_group(args.group, limits), args.collection, limits)
    if result.chains.truncated:
        report.caps_hit.append("chain_cap")
    report.results = result.to_dict()
    return EXIT_OK


def _regular_set(text: str | None, degree: int) -> Subset | None:
    if not text:
        return None
    try:
        points = [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise ParseError(f"Regular set must list points, got {text!r}") from None
    if any(not 1 <= p <= degree for p in points):
        raise ParseError(f"Regular set points must lie in 1..{degree}")
    return Subset.from_points(degree, [p - 1 for p in points])


def _cmd_define_subgroup(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.models.reports import relation_to_dict
    from relkit.services.relations import invariance_group
    from relkit.services.wreath import distinct_sizes_define_subgroup, rela5_define_subgroup
    from relkit.utils.parsing import load_relation

    k = _group(args.k, limits)
    top = _group(args.top, limits)
    g = _group(args.subgroup, limits)
    block_relation = load_relation(Path(args.block_relation))
    if args.method == "distinct-sizes":
        relation = distinct_sizes_define_subgroup(k, block_relation, top, g, limits)
    else:
        if not args.top_relation:
            raise ParseError("--top-relation is required for the block-and-top method")
        top_relation = load_relation(Path(args.top_relation))
        w = _regular_set(args.regular_set, g.degree)
        relation = rela5_define_subgroup(k, top, block_relation, top_relation, w, g, limits)
    defined = invariance_group(relation, g, limits)
    report.results = {
        "subgroup_order": g.order,
        "defined_order": defined.order,
        "arity": sorted(relation.arity),
        "relation": relation_to_dict(relation),
    }
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.services.verify import run_battery

    battery = run_battery(args.level, limits, set(args.check) if args.check else None)
    report.results = battery.to_dict()
    report.caps_hit.extend(battery.caps_hit)
    report.timing.update({f"check.{k}": v for k, v in battery.timing.items()})
    return EXIT_OK if battery.passed else EXIT_VIOLATION


def _cmd_export(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.utils.formatters import group_to_dict, write_json

    data = group_to_dict(_group(args.group, limits))
    report.results = data
    if args.output:
        path = write_json(Path(args.output), data)
        logger.info("Group written to %s", path)
        report.results = {**data, "written": str(path)}
    return EXIT_OK


def _cmd_list(args: argparse.Namespace, limits: Limits, report: RunReport) -> int:
    from relkit.services import catalog

    report.results = {
        "entries": [
            {
                "name": e.name,
                "degree": e.degree,
                "order": e.order,
                "primitive": e.primitive,
                "solvable": e.solvable,
                "aliases": list(e.aliases),
                "lists": sorted(e.lists),
            }
            for e in catalog.list_entries(args.degree)
        ]
    }
    return EXIT_OK


def _init_config() -> Path | None:
    """Copy the bundled relkit.yaml template into the config directory."""
    from relkit.config import CONFIG_FILE, get_config_dir, write_config_template

    dest = get_config_dir() / CONFIG_FILE
    if dest.exists():
        print(f"  already exists: {dest}")
        return None
    template = (files("relkit") / "templates" / "relkit.yaml.example").read_text()
    write_config_template(dest, template)
    print(f"  created: {dest}")
    print()
    print("Edit the 'limits' section to change search caps, or set RELKIT_* variables.")
    return dest


Command = Callable[[argparse.Namespace, Limits, RunReport], int]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    parser.add_argument("--format", choices=("json", "table"), default="json")
    parser.add_argument("--threads", type=int, help="worker threads (RELKIT_THREADS)")
    parser.add_argument("--cache", action="store_true", help="use the persistent closure cache")
    parser.add_argument("--max-degree-exhaustive", type=int)
    parser.add_argument("--census-work-cap", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common)
    parser = argparse.ArgumentParser(
        prog="relkit",
        description="Permutation groups acting on subsets: regular sets, relation groups, "
        "orbit closure and wreath products.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Command, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("order", _cmd_order, "order, transitivity and primitivity of a group")
    p.add_argument("group")
    p = add("census", _cmd_census, "exact count of regular sets per size")
    p.add_argument("group")
    p.add_argument("--sample", type=int, default=0, help="sample subsets when over the caps")
    p.add_argument("--seed", type=int, default=0)
    p = add("orbits", _cmd_orbits, "orbits on k-subsets, or on all subsets")
    p.add_argument("group")
    p.add_argument("--k", type=int)
    p = add("closure", _cmd_closure, "orbit closure G* and k-closures")
    p.add_argument("group")
    p.add_argument("--k", type=int, action="append")
    p = add("relation-group", _cmd_relation_group, "smallest relation group containing G")
    p.add_argument("group")
    p.add_argument("--greedy", action="store_true", help="greedy search over the union cap")
    p = add("invariance-group", _cmd_invariance_group, "invariance group of a relation file")
    p.add_argument("--relation", required=True)
    p.add_argument("--candidate", help="group known to preserve the relation")
    p = add("wreath", _cmd_wreath, "imprimitive wreath product K wr L")
    p.add_argument("k")
    p.add_argument("top")
    p = add("chains", _cmd_chains, "imprimitivity chains of a transitive group")
    p.add_argument("group")
    p = add("classify-A", _cmd_classify, "chain classification against a collection")
    p.add_argument("group")
    p.add_argument("--collection", choices=("A", "O", "O_odd_order", "S"), default="A")
    p = add("define-subgroup", _cmd_define_subgroup, "relation defining G inside K wr L")
    p.add_argument("--k", required=True)
    p.add_argument("--top", required=True)
    p.add_argument("--subgroup", required=True)
    p.add_argument("--block-relation", required=True)
    p.add_argument("--top-relation")
    p.add_argument("--regular-set", help="1-based points of a regular set of K wr L")
    p.add_argument(
        "--method", choices=("block-and-top", "distinct-sizes"), default="block-and-top"
    )
    p = add("verify-paper", _cmd_verify, "run the self-check battery")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--check", action="append", help="run only the named check")
    p = add("export", _cmd_export, "dump a group in the JSON group format")
    p.add_argument("group")
    p.add_argument("--output")
    p = add("list", _cmd_list, "list catalog groups")
    p.add_argument("--degree", type=int)
    sub.add_parser("init", parents=[common], help="write a relkit.yaml template")
    return parser


def _inputs(args: argparse.Namespace, limits: Limits) -> dict[str, Any]:
    skip = {"func", "command", "verbose", "format"}
    echoed = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    echoed["limits"] = limits.to_dict()
    return echoed


def _error_results(exc: RelkitError) -> dict[str, Any]:
    out: dict[str, Any] = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("position", "cap", "limit", "required", "check", "details", "left", "right"):
        value = getattr(exc, attr, None)
        if value is not None:
            out[attr] = value
    return out


def run(argv: list[str] | None = None) -> int:
    """Parse *argv*, run one command and print its report. Returns the exit code."""
    from relkit.utils.formatters import print_report

    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    if args.command == "init":
        _init_config()
        return EXIT_OK

    try:
        limits = _limits(args)
    except RelkitError as e:
        logger.error("%s", e)
        return EXIT_ERROR
    report = RunReport(command=args.command, inputs=_inputs(args, limits))
    started = time.perf_counter()
    try:
        code = args.func(args, limits, report)
    except CapExceededError as e:
        logger.error("%s", e)
        report.caps_hit.append(e.cap)
        report.results = _error_results(e)
        code = EXIT_CAP
    except (ParseError, UnknownGroupError) as e:
        logger.error("%s", e)
        report.results = _error_results(e)
        code = EXIT_PARSE
    except (RelkitError, OSError) as e:
        logger.error("%s", e)
        report.results = (
            _error_results(e)
            if isinstance(e, RelkitError)
            else {"error": type(e).__name__, "message": str(e)}
        )
        code = EXIT_ERROR
    report.timing["seconds"] = round(time.perf_counter() - started, 3)
    print_report(report, args.format)
    return code


def main() -> None:
    """Entry point for the relkit CLI."""
    sys.exit(run())


if __name__ == "__main__":
    main()
