"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 invalid input, 3 fusion data
failed validation, 4 a verification suite failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from .catalog import (
    CATALOG_DIR_ENV,
    CatalogError,
    FusionValidationError,
    from_selector,
    load_ring,
    ring_to_document,
    shipped_catalogs,
    validate_fusion,
)
from .exact import format_fraction
from .factorization import (
    RankQuery,
    StableGraph,
    UnstableQueryError,
    UnstableVertexError,
    engine_for,
    invariance_check,
    rank_via_graph,
    trivalent_closed_graph,
)
from .fock import graded_dimension, lowest_weight
from .genus_zero import oracle_vs_fusion
from .verify import SUITES, run_suites

log = logging.getLogger("confblocks")

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_VALIDATION, EXIT_VERIFY = 0, 1, 2, 3, 4


class InputError(ValueError):
    pass


class Report:
    """Something printable as text, JSON, or CSV rows."""

    def __init__(self, data: dict, text: str, rows: list | None = None, header: list | None = None):
        self.data = data
        self.text = text
        self.rows = rows
        self.header = header

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(_jsonable(self.data), indent=2, sort_keys=False) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            if self.rows is None:
                flat = {k: v for k, v in _jsonable(self.data).items() if not isinstance(v, (dict, list))}
                writer.writerow(list(flat))
                writer.writerow(list(flat.values()))
            else:
                writer.writerow(self.header)
                writer.writerows([[_cell(x) for x in row] for row in self.rows])
            return buf.getvalue()
        return self.text if self.text.endswith("\n") else self.text + "\n"


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _cell(x):
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, (list, tuple)):
        return " ".join(str(_cell(v)) for v in x)
    return x


def _entry(args):
    return from_selector(args.catalog, force=args.force)


def _insertions(ring, raw: str | None) -> list:
    if not raw:
        return []
    return [ring.resolve(x) for x in raw.split(",") if x.strip()]


# ---------------------------------------------------------------------------
# commands


def cmd_rank(args) -> tuple[Report, int]:
    entry = _entry(args)
    ring = entry.ring
    if args.genus < 0:
        raise InputError("genus must be non-negative")
    ins = _insertions(ring, args.insertions)
    value = engine_for(ring).rank(args.genus, ins)
    data = {"catalog": entry.name, "genus": args.genus, "insertions": ins, "rank": value}
    text = str(value)
    status = EXIT_OK
    if args.invariance:
        rep = invariance_check(RankQuery(args.genus, tuple(ins), ring), args.invariance, args.seed)
        data["invariance"] = {
            "trials": args.invariance,
            "seed": args.seed,
            "agree": rep.agree,
            "values": [val for _, _, val in rep.values],
        }
        text += f"\ninvariance: {args.invariance} trials, seed {args.seed}, {'agree' if rep.agree else 'DISAGREE'}"
        text += " " + " ".join(str(val) for _, _, val in rep.values)
        if not rep.agree:
            status = EXIT_VERIFY
    return Report(data, text), status


def _read_graph(spec: str) -> StableGraph:
    path = Path(spec)
    raw = path.read_text(encoding="utf-8") if path.is_file() else spec
    try:
        doc = json.loads(raw)
        vertices = tuple(int(g) for g in doc["vertices"])
        edges = tuple((int(a), int(b)) for a, b in doc.get("edges", []))
        legs = tuple((int(v), str(lab)) for v, lab in doc.get("legs", []))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad graph description: {exc}") from exc
    for v in [e for pair in edges for e in pair] + [v for v, _ in legs]:
        if not 0 <= v < len(vertices):
            raise InputError(f"vertex index {v} out of range")
    return StableGraph(vertices, edges, legs)


def cmd_graph_rank(args) -> tuple[Report, int]:
    entry = _entry(args)
    if args.trivalent is not None:
        graph = trivalent_closed_graph(args.trivalent, entry.ring.vacuum)
    elif args.graph:
        graph = _read_graph(args.graph)
    else:
        raise InputError("give --graph or --trivalent")
    value = rank_via_graph(graph, entry.ring)
    data = {
        "catalog": entry.name,
        "graph": {"vertices": list(graph.vertices), "edges": [list(e) for e in graph.edges], "legs": [list(x) for x in graph.legs]},
        "genus": graph.genus,
        "rank": value,
    }
    return Report(data, str(value)), EXIT_OK


def cmd_validate(args) -> tuple[Report, int]:
    target = args.catalog
    if os.path.isfile(target):
        ring = load_ring(target, force=True)
        name = target
    else:
        entry = from_selector(target, force=True)
        ring, name = entry.ring, entry.name
    rep = validate_fusion(ring)
    rows = [[c, " ".join(map(str, w))] for c, w in rep.failures]
    data = {"catalog": name, "ok": rep.ok, "failures": [{"constraint": c, "witness": list(w)} for c, w in rep.failures]}
    lines = [f"{name}: {rep.summary()}"] + [f"  {c}: {w}" for c, w in rep.failures]
    report = Report(data, "\n".join(lines), rows, ["constraint", "witness"])
    return report, EXIT_OK if rep.ok else EXIT_VALIDATION


def _describe(entry) -> tuple[dict, str]:
    ring = entry.ring
    doc = ring_to_document(ring)
    data = {"name": entry.name, "family": entry.family, **doc, "provenance": entry.provenance}
    weights = ", ".join(f"{a}: {format_fraction(ring.weights[a])}" for a in ring.labels if a in ring.weights)
    aliases = ", ".join(f"{k}={v}" for k, v in ring.aliases.items())
    lines = [
        f"{entry.name} ({entry.family})",
        f"labels: {', '.join(ring.labels)}" + (f"  [aliases {aliases}]" if aliases else ""),
        f"vacuum: {ring.vacuum}",
        f"c = {format_fraction(ring.central_charge)}",
        f"weights: {weights}",
        "dual: " + ", ".join(f"{a}'={ring.dual[a]}" for a in ring.labels),
    ]
    return data, "\n".join(lines)


def cmd_catalog(args) -> tuple[Report, int]:
    if args.show:
        entry = from_selector(args.show, force=args.force)
        data, text = _describe(entry)
        return Report(data, text), EXIT_OK
    rows = []
    for entry in shipped_catalogs():
        ring = entry.ring
        rows.append([entry.name, len(ring.labels), ring.central_charge])
    directory = os.environ.get(CATALOG_DIR_ENV)
    if directory and os.path.isdir(directory):
        for p in sorted(Path(directory).glob("*.json")):
            rows.append([p.stem, "", ""])
    text = "\n".join(f"{name:<18} {n!s:>3} labels  c = {_cell(c)}" for name, n, c in rows)
    data = {"catalogs": [{"name": r[0], "labels": r[1], "central_charge": r[2]} for r in rows]}
    return Report(data, text, rows, ["name", "labels", "central_charge"]), EXIT_OK


def cmd_verify(args) -> tuple[Report, int]:
    names = list(SUITES) if args.suite == "all" else [s.strip() for s in args.suite.split(",")]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InputError(f"unknown suite(s) {', '.join(unknown)}; known: {', '.join(SUITES)}")
    results = run_suites(names, args.cutoff)
    rows = [[r.name, "pass" if r.ok else "FAIL", r.checked, f"{r.seconds:.1f}"] for r in results]
    lines = [f"{r.name:<13} {'pass' if r.ok else 'FAIL'}  {r.checked} checks  {r.seconds:.1f}s" for r in results]
    for r in results:
        lines += [f"  {r.name} witness: {w}" for w in r.failures[:5]]
    data = {
        "cutoff": args.cutoff,
        "suites": [{"name": r.name, "ok": r.ok, "checked": r.checked, "seconds": round(r.seconds, 3), "failures": [repr(w) for w in r.failures[:20]]} for r in results],
    }
    ok = all(r.ok for r in results)
    return Report(data, "\n".join(lines), rows, ["suite", "status", "checked", "seconds"]), EXIT_OK if ok else EXIT_VERIFY


def cmd_oracle(args) -> tuple[Report, int]:
    entry = _entry(args)
    if entry.family != "lattice":
        raise InputError("the oracle runs on lattice catalogs only")
    rep = oracle_vs_fusion(entry, args.cutoff)
    rows = [[" ".join(t), n, est, stab] for t, n, est, stab in rep.rows]
    lines = [f"{' '.join(t):<8} N={n} estimate={est}{'' if stab else ' (not stabilized)'}" for t, n, est, stab in rep.rows]
    lines.append(f"{len(rep.rows)} triples, {len(rep.mismatches)} mismatches")
    data = {
        "catalog": entry.name,
        "cutoff": args.cutoff,
        "ok": rep.ok,
        "rows": [{"labels": list(t), "N": n, "estimate": est, "stabilized": stab} for t, n, est, stab in rep.rows],
    }
    return Report(data, "\n".join(lines), rows, ["labels", "N", "estimate", "stabilized"]), EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_characters(args) -> tuple[Report, int]:
    k = None if args.lattice is None else args.lattice
    if k is not None and k < 1:
        raise InputError("lattice parameter must be positive")
    labels = args.labels.split(",") if args.labels else ([str(x) for x in range(2 * k)] if k else ["0"])
    rows, lines, data = [], [], {"lattice": k, "cutoff": args.cutoff, "characters": []}
    for raw in labels:
        try:
            lab = int(raw) if k else Fraction(raw)
        except ValueError as exc:
            raise InputError(f"bad module label {raw!r}") from exc
        series = graded_dimension(k, lab, args.cutoff)
        weight = lowest_weight(k, lab) if k else Fraction(lab) ** 2 / 2
        rows.append([raw, weight, *series.coefficients])
        lines.append(f"{raw}: c_W = {format_fraction(weight)}  {series}")
        data["characters"].append({"label": raw, "weight": weight, "coefficients": list(series.coefficients)})
    header = ["label", "weight"] + [f"q^{d}" for d in range(args.cutoff + 1)]
    return Report(data, "\n".join(lines), rows, header), EXIT_OK


COMMANDS = {
    "rank": cmd_rank,
    "graph-rank": cmd_graph_rank,
    "validate": cmd_validate,
    "catalog": cmd_catalog,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "characters": cmd_characters,
}


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--force", action="store_true", help="load fusion data even if it fails validation")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="confblocks", description="Ranks of conformal-block bundles and checks on the underlying algebra.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", parents=[common], help="rank for a genus and a list of insertions")
    p.add_argument("--catalog", required=True, help="lattice:K, sl2:L, virasoro:P,Q, file:PATH or a name in $" + CATALOG_DIR_ENV)
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--insertions", default="", help="comma-separated module labels")
    p.add_argument("--invariance", type=_non_negative, default=0, metavar="TRIALS", help="also compare against random degenerations")

    p = sub.add_parser("graph-rank", parents=[common], help="rank summed over one stable graph")
    p.add_argument("--catalog", required=True)
    p.add_argument("--graph", help="JSON text or file with vertices, edges and legs")
    p.add_argument("--trivalent", type=_non_negative, metavar="GENUS", help="use the built-in trivalent graph of this genus")

    p = sub.add_parser("validate", parents=[common], help="check a fusion ring's consistency")
    p.add_argument("catalog", help="selector or path to a fusion-ring document")

    p = sub.add_parser("catalog", parents=[common], help="list catalogs or show one")
    p.add_argument("--show", metavar="SELECTOR")

    p = sub.add_parser("verify", parents=[common], help="run property suites")
    p.add_argument("--suite", default="all", help="all or a comma list of: " + ", ".join(SUITES))
    p.add_argument("--cutoff", type=_non_negative, default=6)

    p = sub.add_parser("oracle", parents=[common], help="compare coinvariant estimates with fusion multiplicities")
    p.add_argument("--catalog", required=True)
    p.add_argument("--cutoff", type=_non_negative, default=4)

    p = sub.add_parser("characters", parents=[common], help="graded dimensions of Fock and lattice modules")
    p.add_argument("--lattice", type=int, metavar="K", help="lattice sqrt(2K)Z; omit for the Heisenberg algebra")
    p.add_argument("--labels", help="comma-separated module labels (charges for Heisenberg)")
    p.add_argument("--cutoff", type=_non_negative, default=6)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        report, status = COMMANDS[args.command](args)
    except FusionValidationError as exc:
        print(f"error: fusion data failed validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InputError, CatalogError, UnstableQueryError, UnstableVertexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    out = report.render(args.format)
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
