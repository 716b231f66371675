"""Command-line interface.

Exit codes: 0 valid / member / success, 1 invalid / non-member,
2 undetermined, 3 bad input, 4 resource limit, 5 certificate hash mismatch.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import baselines
from . import certificate as certmod
from .graph import parse_vertex_sets, read_graph
from .lattice import (DEFAULT_BUDGET, LATTICES, build_lattice_automaton,
                      format_pattern, get_lattice, lattice_bound, load_pattern, parse_pattern)
from .oracle import OracleCapExceeded, critical_lambda_exact, shearer_membership_exact
from .solver import SolverParams, Status, check_certificate, decide_validity, lambda_lower_bound
from .supermodular import (PreconditionFailed, extremal_construction, factorizes, format_table,
                           generate_event_instance, is_supermodular, read_table,
                           supermodular_lower_bounds)
from .walks import StateBudgetExceeded, build_class_automaton, filters_hash, normalize_filters, preset_filters

log = logging.getLogger("walklemma")

EXIT_OK, EXIT_INVALID, EXIT_UNDETERMINED = 0, 1, 2
EXIT_INPUT, EXIT_LIMIT, EXIT_MISMATCH = 3, 4, 5

GRAPH_PRESETS = ("none", "edges", "neighborhoods", "full", "random")
TABLE_PATTERNS = ("none", "edges", "neighborhoods", "headline")


class UsageError(Exception):
    pass


# -- shared helpers -----------------------------------------------------------

def _params(args) -> SolverParams:
    return SolverParams(max_iter=args.max_iter, margin=args.margin,
                        inflation=args.inflation, tol=args.tol, accel_iter=args.accel_iter)


def _activities(args, n: int):
    """Scalar lambda or a length-n vector from --p-file; None if neither given."""
    if args.lam is not None and args.p_file is not None:
        raise UsageError("give either --lambda or --p-file, not both")
    if args.lam is not None:
        if not 0 <= args.lam < 1:
            raise UsageError("--lambda must lie in [0, 1)")
        return float(args.lam)
    if args.p_file is not None:
        text = Path(args.p_file).read_text()
        vals = [float(t) for t in text.replace(",", " ").split()]
        if len(vals) != n:
            raise UsageError(f"--p-file has {len(vals)} values, graph has {n} vertices")
        if any(not 0 <= v < 1 for v in vals):
            raise UsageError("activities must lie in [0, 1)")
        return np.array(vals)
    return None


def _vector(p, n):
    return np.full(n, p) if np.ndim(p) == 0 else np.asarray(p)


def _graph_filters(g, spec: str, seed: int):
    if spec in GRAPH_PRESETS:
        return preset_filters(g, spec, seed=seed)
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"--filters: {spec!r} is neither a preset ({', '.join(GRAPH_PRESETS)}) "
                         "nor a file")
    return parse_vertex_sets(path.read_text(), g.n)


def _emit(args, record: dict, rows: list[dict] | None = None):
    """Write a result as json, csv or an aligned text table."""
    out = args.output and open(args.output, "w")
    stream = out or sys.stdout
    try:
        if args.format == "json":
            stream.write(json.dumps(record, indent=2) + "\n")
        else:
            rows = rows if rows is not None else [record]
            cols = list(rows[0]) if rows else []
            if args.format == "csv":
                w = csv.DictWriter(stream, fieldnames=cols, lineterminator="\n")
                w.writeheader()
                for r in rows:
                    w.writerow({k: _cell(v) for k, v in r.items()})
            else:
                stream.write(_text_table(rows, cols))
    finally:
        if out:
            out.close()


def _cell(v):
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return "" if v is None else str(v)


def _text_table(rows, cols) -> str:
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[k]) for row in cells]) for k, c in enumerate(cols)]
    fmt = lambda row: "  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip()  # noqa: E731
    lines = [fmt(cols), fmt(["-" * w for w in widths])] + [fmt(r) for r in cells]
    return "\n".join(lines) + "\n"


# -- subcommands --------------------------------------------------------------

def cmd_exact(args) -> int:
    g = read_graph(args.graph)
    p = _activities(args, g.n)
    rec: dict = {"graph": args.graph, "graph_hash": g.content_hash(), "n": g.n}
    code = EXIT_OK
    if p is not None:
        pv = _vector(p, g.n)
        if args.exact_rational:
            verdict = shearer_membership_exact(g, pv.tolist(), exact=True)
        else:
            verdict = shearer_membership_exact(g, pv)
        rec["member"] = verdict.member
        rec["witness"] = sorted(v + 1 for v in verdict.witness) if verdict.witness else None
        code = EXIT_OK if verdict.member else EXIT_INVALID
    if args.critical:
        rec["lambda_c"] = critical_lambda_exact(g, tol=min(args.tol, 1e-6))
    if p is None and not args.critical:
        raise UsageError("exact needs --lambda, --p-file or --critical")
    _emit(args, rec)
    return code


def cmd_hierarchy(args) -> int:
    g = read_graph(args.graph)
    fams = _graph_filters(g, args.filters, args.seed)
    a = build_class_automaton(g, fams, budget=args.budget)
    params = _params(args)
    p = _activities(args, g.n)
    rec: dict = {"graph": args.graph, "graph_hash": g.content_hash(), "filters": args.filters,
                 "filter_hash": a.meta["filter_hash"], "classes": a.num_classes,
                 "transitions": a.num_transitions, "fingerprint": a.fingerprint()}
    header = {"graph_hash": g.content_hash(), "filter_hash": a.meta["filter_hash"]}
    if p is None or args.bound:
        lb = lambda_lower_bound(a, params)
        ok = lb.lam > 0 and check_certificate(a, lb.lam, lb.certificate)
        rec.update(lambda_bound=lb.lam if ok else None, bracket=list(lb.bracket),
                   probes=lb.probes, undetermined=lb.undetermined)
        if ok and args.certificate:
            certmod.Certificate("graph", a.fingerprint(), lb.certificate, lam=lb.lam,
                                header=header).write(args.certificate)
            rec["certificate"] = args.certificate
        _emit(args, rec)
        return EXIT_OK if ok else EXIT_UNDETERMINED
    v = decide_validity(a, p, params)
    rec["status"] = v.status.value
    if v.divergence:
        it, c, val = v.divergence
        rec["divergence"] = {"iteration": it, "class": c, "value": val}
    if v.valid and args.certificate:
        kw = {"lam": float(p)} if np.ndim(p) == 0 else {"activities": list(map(float, p))}
        certmod.Certificate("graph", a.fingerprint(), v.certificate, header=header,
                            **kw).write(args.certificate)
        rec["certificate"] = args.certificate
    _emit(args, rec)
    return {Status.VALID: EXIT_OK, Status.INVALID: EXIT_INVALID,
            Status.UNDETERMINED: EXIT_UNDETERMINED}[v.status]


def _lattice_certificate(rep, a, lb, pattern, path):
    header = {"lattice": rep.lattice, "pattern_hash": rep.pattern_hash, "window": rep.window}
    certmod.Certificate("lattice", a.fingerprint(), lb.certificate, lam=lb.lam, header=header,
                        pattern_text=format_pattern(pattern)).write(path)


def _run_lattice(kind, pattern_arg, args, cert_path=None):
    spec = get_lattice(kind)
    pattern = load_pattern(spec, pattern_arg)
    rep, a, lb = lattice_bound(spec, pattern, window=args.window, budget=args.budget,
                               params=_params(args))
    if rep.certificate_ok and cert_path:
        _lattice_certificate(rep, a, lb, pattern, cert_path)
        rep.certificate_file = str(cert_path)
    return rep


def cmd_lattice(args) -> int:
    rep = _run_lattice(args.kind, args.filters, args, args.certificate)
    text = rep.to_json(timing=args.timing)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if rep.certificate_ok else EXIT_UNDETERMINED


def cmd_table(args) -> int:
    kinds = args.lattices or list(LATTICES)
    rows = []
    cert_dir = Path(args.certificate_dir) if args.certificate_dir else None
    if cert_dir:
        cert_dir.mkdir(parents=True, exist_ok=True)
    ok = True
    for kind in kinds:
        d = baselines.LATTICE_DEGREE[kind]
        row: dict = {"lattice": kind, "degree": d}
        for name in TABLE_PATTERNS:
            path = cert_dir / f"{kind}-{name}.cert" if cert_dir else None
            rep = _run_lattice(kind, name, args, path)
            ok &= rep.certificate_ok
            row[name] = rep.lam if rep.certificate_ok else None
            if name == "headline":
                row["headline_pattern"] = rep.pattern
                row["headline_classes"] = rep.classes
        row["closed_asymmetric"] = baselines.asymmetric_symmetric_bound(d)
        row["closed_nonbacktracking"] = baselines.nonbacktracking_symmetric_bound(d)
        for col, vals in baselines.REFERENCE.items():
            row[f"ref_{col}"] = vals[kind]
        rows.append(row)
    _emit(args, {"rows": rows}, rows)
    return EXIT_OK if ok else EXIT_UNDETERMINED


def cmd_supermod(args) -> int:
    g = read_graph(args.graph)
    p = _activities(args, g.n)
    if p is None:
        raise UsageError("supermod needs --lambda or --p-file")
    pv = _vector(p, g.n)
    rec: dict = {"graph_hash": g.content_hash(), "n": g.n}
    if args.extremal:
        lam, t = extremal_construction(g, pv)
        rec["lambda_star"] = lam
        rec["min_value"] = float(t.values.min())
    elif args.table:
        t = read_table(args.table)
        if t.n != g.n:
            raise UsageError(f"table has n={t.n}, graph has {g.n} vertices")
    else:
        t = generate_event_instance(g, pv, seed=args.seed)
    sm, wit = is_supermodular(t)
    fz, fwit = factorizes(t, g, pv)
    rec["supermodular"] = sm
    if wit:
        rec["supermodular_witness"] = {"i": wit.i + 1, "S": sorted(v + 1 for v in wit.s),
                                       "T": sorted(v + 1 for v in wit.t)}
    rec["factorizes"] = fz
    if fwit:
        rec["factorization_witness"] = {"i": fwit[0] + 1, "S": sorted(v + 1 for v in fwit[1])}
    code = EXIT_OK if sm and fz else EXIT_INVALID
    if not args.extremal and sm and fz:
        try:
            _, holds = supermodular_lower_bounds(t, g, pv)
            rec["lower_bound_holds"] = bool(holds.all())
            if not holds.all():
                bad = int(np.flatnonzero(~holds)[0])
                rec["lower_bound_violation"] = sorted(v + 1 for v in range(g.n) if bad >> v & 1)
                code = EXIT_INVALID
        except PreconditionFailed as exc:
            rec["lower_bound_holds"] = None
            rec["precondition_failed"] = exc.check
    if args.write_table:
        Path(args.write_table).write_text(format_table(t))
    _emit(args, rec)
    return code


def cmd_verify(args) -> int:
    cert = certmod.read(args.certificate)
    if cert.kind == "lattice":
        if cert.pattern_text is None:
            raise certmod.CertificateFormatError("lattice certificate without pattern")
        pattern = parse_pattern(cert.pattern_text)
        spec = get_lattice(cert.header.get("lattice", pattern.lattice))
        if pattern.content_hash() != cert.header.get("pattern_hash"):
            raise certmod.HashMismatch("embedded pattern does not match its hash")
        window = cert.header.get("window")
        a = build_lattice_automaton(spec, pattern, None if window is None else int(window),
                                    budget=args.budget)
    elif cert.kind == "graph":
        if not args.graph:
            raise UsageError("graph certificates need --graph (and --filters)")
        g = read_graph(args.graph)
        if g.content_hash() != cert.header.get("graph_hash"):
            raise certmod.HashMismatch("graph hash differs from the certificate")
        fams = _graph_filters(g, args.filters, args.seed)
        if filters_hash(normalize_filters(fams, g.n)) != cert.header.get("filter_hash"):
            raise certmod.HashMismatch("filter hash differs from the certificate")
        a = build_class_automaton(g, fams, budget=args.budget)
    else:
        raise certmod.CertificateFormatError(f"unknown certificate kind {cert.kind!r}")
    if a.fingerprint() != cert.fingerprint:
        raise certmod.HashMismatch("rebuilt automaton fingerprint differs")
    act = cert.activity
    if np.ndim(act) and len(act) <= int(np.max(a.terminal, initial=-1)):
        raise certmod.CertificateFormatError("activity vector too short")
    ok = check_certificate(a, act, cert.values, exact=args.exact_rational)
    rec = {"certificate": args.certificate, "kind": cert.kind, "classes": a.num_classes,
           "valid": bool(ok)}
    if cert.lam is not None:
        rec["lambda"] = cert.lam
    _emit(args, rec)
    return EXIT_OK if ok else EXIT_INVALID


# -- argument parsing -----------------------------------------------------------

def _common(p: argparse.ArgumentParser, solver: bool = True):
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap (all stages currently run on one thread)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="class-count cap")
    p.add_argument("--exact-rational", action="store_true",
                   help="check with exact rational arithmetic")
    p.add_argument("-v", "--verbose", action="count", default=0)
    if solver:
        p.add_argument("--tol", type=float, default=SolverParams.tol, help="bisection tolerance")
        p.add_argument("--max-iter", type=int, default=SolverParams.max_iter)
        p.add_argument("--margin", type=float, default=SolverParams.margin)
        p.add_argument("--inflation", type=float, default=SolverParams.inflation)
        p.add_argument("--accel-iter", type=int, default=SolverParams.accel_iter,
                       help="Anderson steps before plain iteration (0 disables)")


def _acts(p: argparse.ArgumentParser):
    p.add_argument("--lambda", dest="lam", type=float, help="symmetric activity")
    p.add_argument("--p-file", help="file with one activity per vertex")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="walklemma", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("exact", help="exact region membership on a small graph")
    p.add_argument("graph")
    _acts(p)
    p.add_argument("--critical", action="store_true", help="also bisect the critical activity")
    _common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("hierarchy", help="walk-automaton certificate on a graph")
    p.add_argument("graph")
    p.add_argument("--filters", default="none", help=f"preset ({', '.join(GRAPH_PRESETS)}) or file")
    _acts(p)
    p.add_argument("--bound", action="store_true", help="bisect the largest certified lambda")
    p.add_argument("--certificate", help="write the certificate here")
    _common(p)
    p.set_defaults(func=cmd_hierarchy)

    p = sub.add_parser("lattice", help="certified lower bound on a lattice")
    p.add_argument("kind", choices=sorted(LATTICES))
    p.add_argument("--filters", default="none",
                   help="none, edges, neighborhoods, ball:<r>, box:<a>x<b>[x<c>], headline or a pattern file")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--certificate")
    p.add_argument("--timing", action="store_true", help="include wall-clock times in the report")
    _common(p)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("table", help="lattice bounds next to reference values")
    p.add_argument("--lattices", nargs="*", choices=sorted(LATTICES))
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--certificate-dir")
    _common(p)
    p.set_defaults(func=cmd_table, format="text")

    p = sub.add_parser("supermod", help="check a set function against a dependency graph")
    p.add_argument("--graph", required=True)
    _acts(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--table", help="set function table file")
    g.add_argument("--extremal", action="store_true", help="build the boundary table instead")
    p.add_argument("--write-table", help="save the table that was checked")
    _common(p, solver=False)
    p.set_defaults(func=cmd_supermod)

    p = sub.add_parser("verify", help="re-check a certificate file")
    p.add_argument("certificate")
    p.add_argument("--graph")
    p.add_argument("--filters", default="none")
    _common(p, solver=False)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except certmod.HashMismatch as exc:
        print(f"error: hash mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (StateBudgetExceeded, OracleCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
