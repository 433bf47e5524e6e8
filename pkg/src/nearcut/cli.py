"""Command-line entry point: ``nearcut <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagram import polygon_dot, polygon_svg
from .errors import BudgetError, IntegrityError, NearCutError, ParameterError, StructuralError
from .graph import MultiGraph, members
from .io import format_graph
from .laminar import format_family
from .pipeline import InstanceSpec, RunConfig, analyze, run_pipeline
from .thintree import bounds, iterative_round, verify_tree

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTEGRITY = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="graph file (first line 'n m', then one 'u v' per edge)")
    common.add_argument(
        "--instance",
        help="generated instance: fig2, fig1:N[:K], cycle:N[:COPIES], random-kec:N:C:SEED, heavy-cycle:N:K:C:SEED",
    )
    common.add_argument("--output", help="write here instead of stdout")
    common.add_argument("--format", choices=("json", "text", "dot", "svg"), default="text")
    common.add_argument("--eta", default="1/40", help="rational in (0, 1/5], e.g. 1/40")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--oracle", action="store_true", help="compare with exhaustive searches where small enough")
    common.add_argument("--max-bruteforce-n", type=int, default=20)
    common.add_argument("--baseline", choices=("naive",))
    common.add_argument("--component", type=int, help="component index for polygon drawings")

    p = argparse.ArgumentParser(prog="nearcut", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, desc in [
        ("gen", "write a generated instance as a graph file"),
        ("enumerate", "list the near-minimum cuts"),
        ("atoms", "crossing components and their atoms"),
        ("polygon", "polygon representation of each component (dot/svg draws one)"),
        ("makelam", "the laminar family"),
        ("cover", "a cover of every near-minimum cut by family sets"),
        ("tree", "round a spanning tree against the family"),
        ("verify", "run every check; exit 1 if one fails"),
        ("pipeline", "full report"),
    ]:
        sub.add_parser(name, parents=[common], help=desc, description=desc)
    return p


def _graph(args) -> tuple[MultiGraph, str | None]:
    if bool(args.input) == bool(args.instance):
        raise ParameterError("give exactly one of --input and --instance")
    spec = InstanceSpec("file", path=args.input) if args.input else InstanceSpec.parse(args.instance)
    return spec.build(), spec.kind


def _config(args) -> RunConfig:
    if args.max_bruteforce_n < 1:
        raise ParameterError("--max-bruteforce-n must be positive")
    return RunConfig(
        eta=args.eta, seed=args.seed, oracle=args.oracle, max_bruteforce_n=args.max_bruteforce_n, baseline=args.baseline
    )


def _emit(args, payload, text: str | None = None) -> None:
    if args.format == "json" or text is None:
        out = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    else:
        out = text if text.endswith("\n") else text + "\n"
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)


def _fmt_set(S: int) -> str:
    return " ".join(map(str, members(S)))


def _cmd_gen(args) -> int:
    G, _ = _graph(args)
    text = format_graph(G)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    G, _ = _graph(args)
    an = analyze(G, _config(args), with_covers=False)
    rows = [{"shore": members(c.shore), "boundary": c.boundary} for c in an.cuts]
    text = f"k={an.k} eta={an.eta} cuts={len(rows)}\n" + "\n".join(
        f"{r['boundary']}\t{_fmt_set(c.shore)}" for r, c in zip(rows, an.cuts)
    )
    _emit(args, {"k": an.k, "eta": str(an.eta), "cuts": rows}, text)
    return EXIT_OK


def _cmd_atoms(args) -> int:
    G, _ = _graph(args)
    an = analyze(G, _config(args), with_covers=False)
    comps = [
        {"index": r.index, "cuts": list(r.component.cuts), "atoms": [members(a) for a in r.component.atoms]}
        for r in an.components
    ]
    lines = []
    for c in comps:
        atoms = " | ".join(" ".join(map(str, a)) for a in c["atoms"])
        lines.append(f"component {c['index']}: {len(c['cuts'])} cuts; atoms {atoms}")
    _emit(args, {"components": comps}, "\n".join(lines))
    return EXIT_OK


def _cmd_polygon(args) -> int:
    G, _ = _graph(args)
    an = analyze(G, _config(args), with_covers=False)
    if args.format in ("dot", "svg"):
        if args.component is None:
            pick = max(an.components, key=lambda r: len(r.component))
        elif 0 <= args.component < len(an.components):
            pick = an.components[args.component]
        else:
            raise ParameterError(f"no component {args.component}")
        draw = polygon_dot if args.format == "dot" else polygon_svg
        _emit(args, None, draw(pick.polygon, pick.component))
        return EXIT_OK
    out, lines = [], []
    for r in an.components:
        P = r.polygon
        if P is None:
            continue
        item = {
            "index": r.index,
            "outside": [members(P.atoms[a]) for a in P.outside],
            "inside": [members(P.atoms[a]) for a in P.inside],
            "intervals": {str(c): list(P.interval_of[i]) for i, c in enumerate(r.component.cuts)},
        }
        out.append(item)
        lines.append(f"component {r.index}: {P.m} outside atoms, {len(P.inside)} inside")
        lines.append("  order: " + " | ".join(" ".join(map(str, a)) for a in item["outside"]))
        for a in P.inside:
            bits = "".join("1" if b else "0" for b in P.membership[a])
            lines.append(f"  inside {_fmt_set(P.atoms[a])}: {bits}")
    _emit(args, {"polygons": out}, "\n".join(lines) or "no crossing components")
    return EXIT_OK


def _cmd_makelam(args) -> int:
    G, _ = _graph(args)
    an = analyze(G, _config(args), with_covers=False)
    fam = an.family
    payload = {"n": fam.n, "sets": [members(S) for S in fam.sets], "parent": fam.parent}
    _emit(args, payload, format_family(fam))
    return EXIT_OK


def _cmd_cover(args) -> int:
    G, _ = _graph(args)
    an = analyze(G, _config(args))
    rows = [{"cut": members(an.cuts[i].shore), "cover": [members(S) for S in cov]} for i, cov in an.covers.items()]
    lines = [f"{_fmt_set(an.cuts[i].shore)}\t<- " + " ; ".join(_fmt_set(S) for S in cov) for i, cov in an.covers.items()]
    _emit(args, {"covers": rows}, "\n".join(lines))
    return EXIT_OK


def _cmd_tree(args) -> int:
    G, _ = _graph(args)
    an = analyze(G, _config(args), with_covers=False)
    b = bounds(G, an.family.sets, an.k)
    rr = iterative_round(G, an.family.sets, b)
    rep = verify_tree(G, rr.edges, [c.shore for c in an.cuts])
    payload = {
        "edges": rr.edges,
        "pairs": [list(G.edges[e]) for e in rr.edges],
        "max_violation": rr.max_violation,
        "max_nmc_crossing": rep.maximum,
    }
    text = "\n".join(f"{e}\t{u} {v}" for e, (u, v) in zip(rr.edges, (G.edges[e] for e in rr.edges)))
    text += f"\nmax violation {rr.max_violation}; max near-min-cut crossing {rep.maximum}"
    _emit(args, payload, text)
    return EXIT_OK


def _summary(report: dict) -> str:
    lines = [
        f"instance {report['instance']} ({report['kind']}): n={report['n']} m={report['m']} k={report['k']} eta={report['eta']}",
        f"near-min cuts {report['near_min_cuts']}, family size {report['family_size']}",
        f"max laminar crossing {report['max_laminar_crossing']}, max near-min-cut crossing {report['max_nmc_crossing']}",
        "cover sizes " + ", ".join(f"{s}:{c}" for s, c in report["cover_sizes"].items()),
    ]
    for name, ok in report["checks"].items():
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}")
    if "oracle" in report:
        lines.append("oracle " + json.dumps(report["oracle"]))
    if "baseline" in report:
        bl = report["baseline"]
        lines.append(
            f"naive baseline: family {bl['family_size']}, tree from {bl['tree_source']}, "
            f"max near-min-cut crossing {bl['max_nmc_crossing']}"
        )
    lines.append("OK" if report["ok"] else "FAILED")
    return "\n".join(lines)


def _cmd_pipeline(args) -> int:
    G, kind = _graph(args)
    report = run_pipeline(G, _config(args), kind=kind)
    _emit(args, report, _summary(report))
    return EXIT_OK if report["ok"] else EXIT_FAIL


def _cmd_verify(args) -> int:
    G, kind = _graph(args)
    report = run_pipeline(G, _config(args), kind=kind)
    payload = {"instance": report["instance"], "checks": report["checks"], "ok": report["ok"]}
    text = "\n".join(f"{'PASS' if ok else 'FAIL'} {name}" for name, ok in report["checks"].items())
    _emit(args, payload, text)
    return EXIT_OK if report["ok"] else EXIT_FAIL


COMMANDS = {
    "gen": _cmd_gen,
    "enumerate": _cmd_enumerate,
    "atoms": _cmd_atoms,
    "polygon": _cmd_polygon,
    "makelam": _cmd_makelam,
    "cover": _cmd_cover,
    "tree": _cmd_tree,
    "verify": _cmd_verify,
    "pipeline": _cmd_pipeline,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParameterError, BudgetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IntegrityError, StructuralError) as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except NearCutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY


if __name__ == "__main__":
    sys.exit(main())
