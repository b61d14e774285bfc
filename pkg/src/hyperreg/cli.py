"""Command-line driver.  Exit codes: 0 pass, 1 verdict failure, 2 usage or input error."""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .core import (Hypergraph3, clique_pattern, close_complex, dump_complex, load_complex,
                   parse_hypergraph, serialize_complex, serialize_hypergraph)
from .counting import (count_copies, count_graph_copies, extension_counts, moment_concentration,
                       predicted_count, predicted_extension)
from .density import check_graph_regular, auto_mode
from .embed import Embedding, embed
from .errors import HyperregError
from .models import HostParams, PatternParams, PlantSpec, planted_host, random_host, random_pattern
from .partition import (classify_pairs_triples, random_slicing_partition, reduced_hypergraph,
                        turan_clique)
from .pipeline import PipelineConfig, run_pipeline
from .ramsey import exact_ramsey, parse_colouring, serialize_colouring
from .triadreg import Triad, TriadHypergraph, check_complex_regular, check_triad_regular, triad_density

SCHEMA = "hyperreg-report/1"


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): _jsonable(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item") and callable(x.item):
        return x.item()
    return x


def _strategy(name: str) -> str:
    return name.replace("-", "_")


def _read_hypergraph(path) -> Hypergraph3:
    return parse_hypergraph(Path(path).read_text(encoding="utf-8"))


def _class_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# subcommands ---------------------------------------------------------------------------

def cmd_gen(a):
    if a.pattern:
        sizes = tuple(_class_list(a.sizes)) if a.sizes else (a.n,) * a.k
        res = random_pattern(PatternParams(len(sizes), sizes, a.max_degree, a.hyperedges, a.seed,
                                           target_edges=a.edges))
        G, stats = res.complex, res.to_json()
    else:
        params = HostParams(a.k, a.n, a.d2, a.d3, a.seed)
        if a.plant_class is not None:
            verts = tuple(_class_list(a.plant_vertices or ""))
            G = planted_host(params, PlantSpec(a.plant_class, verts, a.plant_density))
        else:
            G = random_host(params)
        stats = {"e2": G.e2, "e3": G.e3}
    text = serialize_complex(G)
    if a.out:
        Path(a.out).write_text(text, encoding="utf-8")
        side = {"params": G.meta.get("provenance", {}), "seed": a.seed, "achieved": stats}
        Path(str(a.out) + ".json").write_text(json.dumps(_jsonable(side), indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)
    return 0, {"provenance": G.meta.get("provenance", {}), "achieved": stats}


def cmd_check_graph_reg(a):
    G = load_complex(a.host)
    mode = a.mode or auto_mode(G, a.i, a.j)
    v = check_graph_regular(G, a.i, a.j, a.d, a.delta, notion=a.notion, mode=mode, budget=a.budget, seed=a.seed)
    return (1 if v.status == "irregular" else 0), v.to_json()


def cmd_check_triad_reg(a):
    G = load_complex(a.host)
    i, j, k = _class_list(a.classes)
    P = Triad.from_complex(G, i, j, k)
    H = TriadHypergraph.from_complex(G, i, j, k)
    v = check_triad_regular(H, P, a.d3, a.delta3, a.r, _strategy(a.strategy), a.budget, a.seed)
    out = v.to_json()
    out["triad_density"] = str(triad_density(H, P))
    return (0 if v.regular else 1), out


def cmd_check_complex_reg(a):
    G = load_complex(a.host)
    rep = check_complex_regular(G, a.d3, a.delta3, a.d2, a.delta2, a.r, _strategy(a.strategy), a.mode,
                                a.notion, a.budget, a.seed)
    return (0 if rep.regular else 1), rep.to_json()


def cmd_count(a):
    H, G = load_complex(a.pattern), load_complex(a.host)
    fn = count_graph_copies if a.graph_only else count_copies
    c = fn(H, G, method=a.method)
    out = {"pattern": a.pattern, "host": a.host, "count": c}
    if a.n is not None and a.d2 is not None and a.d3 is not None:
        pred = predicted_count(H, a.n, a.d2, a.d3).value
        out["predicted"] = pred
        out["ratio"] = c / pred
    return 0, out


def cmd_predict(a):
    H = load_complex(a.pattern)
    if a.sub:
        S = load_complex(a.sub)
        return 0, {"predicted": predicted_extension(S, H, a.n, a.d2, a.d3).value}
    return 0, {"predicted": predicted_count(H, a.n, a.d2, a.d3).value}


def cmd_verify_counting(a):
    H = load_complex(a.pattern) if a.pattern else clique_pattern(3)
    pred = predicted_count(H, a.n, a.d2, a.d3).value
    rows = []
    for s in range(a.seed, a.seed + a.seeds):
        G = random_host(HostParams(max(a.k, H.k), a.n, a.d2, a.d3, s))
        c = count_copies(H, G)
        rows.append({"seed": s, "count": c, "ratio": c / pred})
    mean = sum(r["ratio"] for r in rows) / len(rows) if rows else float("nan")
    ok = abs(mean - 1) <= a.tolerance
    return (0 if ok else 1), {"predicted": pred, "runs": rows, "mean_ratio": mean, "tolerance": a.tolerance,
                              "pass": ok}


def cmd_verify_extension(a):
    H = close_complex((1, 1), edges=[((0, 0), (1, 0))])
    Hp = clique_pattern(3)
    pred = predicted_extension(H, Hp, a.n, a.d2, a.d3)
    A = pred.value
    rows, good = [], 0
    for s in range(a.seed, a.seed + a.seeds):
        G = random_host(HostParams(3, a.n, a.d2, a.d3, s))
        xs = [x for _, x in extension_counts(H, Hp, G)]
        m = moment_concentration(xs, pred, a.delta, a.beta)
        frac_ok = m.outlier_fraction <= a.max_outlier_fraction
        good += frac_ok
        rows.append({"seed": s, **m.to_json(), "outlier_fraction_ok": frac_ok})
    ok = good >= a.min_seeds
    return (0 if ok else 1), {"predicted_extension": A, "runs": rows, "seeds_ok": good,
                              "required": a.min_seeds, "pass": ok}


def _partition_args(a, G):
    P = random_slicing_partition(G, a.t, a.ell, a.seed)
    return P, classify_pairs_triples(G, P, a.eps1, a.eps2, a.eps3, a.delta3, a.r, _strategy(a.strategy),
                                     a.mode, a.budget, a.seed)


def cmd_partition_check(a):
    G = _read_hypergraph(a.hypergraph)
    P, rep = _partition_args(a, G)
    out = rep.to_json()
    out["clusters"] = [list(c) for c in P.clusters]
    out["exceptional"] = list(P.exceptional)
    ok = rep.item_iv and rep.item_v and rep.regular_partition
    return (0 if ok else 1), out


def cmd_reduce(a):
    G = _read_hypergraph(a.hypergraph)
    _, rep = _partition_args(a, G)
    R = reduced_hypergraph(rep)
    if a.out:
        Path(a.out).write_text(serialize_hypergraph(R), encoding="utf-8")
    return 0, {"reduced": {"vertices": R.vertex_count, "hyperedges": sorted(list(e) for e in R.hyperedges)},
               "report": rep.to_json()}


def cmd_turan(a):
    R = _read_hypergraph(a.hypergraph)
    res = turan_clique(R, a.k, a.c0)
    return (0 if res.clique is not None else 1), res.to_json()


def cmd_pipeline(a):
    H = _read_hypergraph(a.pattern)
    colouring = None
    m = a.m
    if a.colouring:
        m, colouring = parse_colouring(Path(a.colouring).read_text(encoding="utf-8"))
    cfg = PipelineConfig(t=a.t, ell=a.ell, k=a.k, eps1=a.eps1, eps2=a.eps2, eps3=a.eps3, delta3=a.delta3,
                         r=a.r, strategy=_strategy(a.strategy), mode=a.mode, budget=a.budget, seed=a.seed,
                         max_retries=a.max_retries, thin=a.thin)
    rep = run_pipeline(H, m, colouring, cfg)
    out = rep.to_json()
    out["config"] = cfg.to_json()
    return (0 if rep.success else 1), out


def cmd_embed(a):
    H, G = load_complex(a.pattern), load_complex(a.host)
    res = embed(H, G)
    if isinstance(res, Embedding):
        lines = "".join(l + "\n" for l in res.lines())
        if a.out:
            Path(a.out).write_text(lines, encoding="utf-8")
        return 0, {"found": True, "valid": res.validate(H, G), "map": res.lines()}
    return 1, {"found": False, "failure": res.to_json()}


def cmd_ramsey(a):
    H = _read_hypergraph(a.pattern)
    res = exact_ramsey(H, a.m_max, a.budget)
    if a.cert_dir:
        d = Path(a.cert_dir)
        d.mkdir(parents=True, exist_ok=True)
        for m, col in res.certificates.items():
            (d / f"avoiding_m{m}.col").write_text(serialize_colouring(col), encoding="utf-8")
    return 0, res.to_json()


# parser ------------------------------------------------------------------------------------

def _common(p, seed=True, strategy=False, mode=False, budget=None):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if strategy:
        p.add_argument("--strategy", choices=["induced", "edge-sampled", "exhaustive-tiny"], default="induced")
    if mode:
        p.add_argument("--mode", choices=["exhaustive", "sampled"], default=None)
    if budget is not None:
        p.add_argument("--budget", type=int, default=budget)
    p.add_argument("--json-out", default=None)
    p.add_argument("--timing", action="store_true", help="record wall-clock time in the manifest")


def _partition_flags(p):
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--eps1", type=float, default=0.1)
    p.add_argument("--eps2", type=float, default=0.1)
    p.add_argument("--eps3", type=float, default=0.5)
    p.add_argument("--delta3", type=float, default=0.1)
    p.add_argument("--r", type=int, default=1)
    _common(p, strategy=True, mode=True, budget=100)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperreg", description="Hypergraph regularity toolkit")
    ap.add_argument("--manifest", default=None, metavar="REPORT",
                    help="replay the argv stored in a report manifest (must come first)")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("gen", help="generate a random host or pattern complex")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--d2", type=float, default=0.5)
    p.add_argument("--d3", type=float, default=0.5)
    p.add_argument("--plant-class", type=int, default=None)
    p.add_argument("--plant-vertices", default=None)
    p.add_argument("--plant-density", type=float, default=1.0)
    p.add_argument("--pattern", action="store_true")
    p.add_argument("--sizes", default=None)
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--hyperedges", type=int, default=1)
    p.add_argument("--edges", type=int, default=0)
    p.add_argument("--out", default=None)
    _common(p)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("check-graph-reg")
    p.add_argument("--host", required=True)
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--d", type=float, default=0.5)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--notion", choices=["d-delta", "delta"], default="d-delta")
    _common(p, mode=True, budget=2000)
    p.set_defaults(fn=cmd_check_graph_reg)

    p = sub.add_parser("check-triad-reg")
    p.add_argument("--host", required=True)
    p.add_argument("--classes", default="0,1,2")
    p.add_argument("--d3", type=float, default=None)
    p.add_argument("--delta3", type=float, required=True)
    p.add_argument("--r", type=int, default=1)
    _common(p, strategy=True, budget=200)
    p.set_defaults(fn=cmd_check_triad_reg)

    p = sub.add_parser("check-complex-reg")
    p.add_argument("--host", required=True)
    p.add_argument("--d2", type=float, required=True)
    p.add_argument("--delta2", type=float, required=True)
    p.add_argument("--d3", type=float, required=True)
    p.add_argument("--delta3", type=float, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--notion", choices=["d-delta", "delta"], default="d-delta")
    _common(p, strategy=True, mode=True, budget=200)
    p.set_defaults(fn=cmd_check_complex_reg)

    p = sub.add_parser("count")
    p.add_argument("--pattern", required=True)
    p.add_argument("--host", required=True)
    p.add_argument("--method", choices=["auto", "backtrack", "tensor"], default="auto")
    p.add_argument("--graph-only", action="store_true")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d2", type=float, default=None)
    p.add_argument("--d3", type=float, default=None)
    _common(p, seed=False)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("predict")
    p.add_argument("--pattern", required=True)
    p.add_argument("--sub", default=None, help="induced subpattern for the extension prediction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d2", type=float, required=True)
    p.add_argument("--d3", type=float, required=True)
    _common(p, seed=False)
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("verify-counting")
    p.add_argument("--pattern", default=None)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--d2", type=float, default=0.6)
    p.add_argument("--d3", type=float, default=0.5)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--tolerance", type=float, default=0.1)
    _common(p)
    p.set_defaults(fn=cmd_verify_counting)

    p = sub.add_parser("verify-extension")
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--d2", type=float, default=0.6)
    p.add_argument("--d3", type=float, default=0.5)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--max-outlier-fraction", type=float, default=0.1)
    p.add_argument("--min-seeds", type=int, default=8)
    _common(p)
    p.set_defaults(fn=cmd_verify_extension)

    p = sub.add_parser("partition-check")
    _partition_flags(p)
    p.set_defaults(fn=cmd_partition_check)

    p = sub.add_parser("reduce")
    _partition_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("turan")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c0", type=float, default=None)
    _common(p, seed=False)
    p.set_defaults(fn=cmd_turan)

    p = sub.add_parser("pipeline")
    p.add_argument("--pattern", required=True, help="pattern 3-graph file")
    p.add_argument("--m", type=int, default=30)
    p.add_argument("--colouring", default=None)
    p.add_argument("--t", type=int, default=6)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--eps1", type=float, default=0.5)
    p.add_argument("--eps2", type=float, default=0.5)
    p.add_argument("--eps3", type=float, default=1.0)
    p.add_argument("--delta3", type=float, default=0.5)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--max-retries", type=int, default=20)
    p.add_argument("--thin", action="store_true")
    _common(p, strategy=True, mode=True, budget=50)
    p.set_defaults(fn=cmd_pipeline)

    p = sub.add_parser("embed")
    p.add_argument("--pattern", required=True)
    p.add_argument("--host", required=True)
    p.add_argument("--out", default=None)
    _common(p, seed=False)
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("ramsey")
    p.add_argument("--pattern", required=True, help="pattern 3-graph file")
    p.add_argument("--m-max", type=int, default=8)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--cert-dir", default=None)
    _common(p, seed=False)
    p.set_defaults(fn=cmd_ramsey)
    return ap


def _replay_argv(argv: list) -> list:
    """argv minus output-only flags, so a replay writes an identical report."""
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--json-out":
            skip = True
            continue
        if tok.startswith("--json-out=") or tok == "--timing":
            continue
        out.append(tok)
    return out


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    if len(argv) >= 2 and argv[0] == "--manifest":
        # replay the stored argv; trailing flags (e.g. a new --json-out) override
        try:
            stored = json.loads(Path(argv[1]).read_text())["manifest"]["argv"]
        except (OSError, KeyError, TypeError, ValueError) as exc:
            print(f"error: cannot replay manifest: {exc}", file=sys.stderr)
            return 2
        argv = list(stored) + argv[2:]
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if not getattr(args, "fn", None):
        ap.print_usage(sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        code, result = args.fn(args)
    except HyperregError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    consts = {k: v for k, v in vars(args).items() if k not in ("fn", "json_out", "manifest", "timing")}
    manifest = {"subcommand": args.command, "argv": _replay_argv(argv), "constants": consts, "version": _version()}
    if args.timing:
        manifest["wall_clock_s"] = round(time.perf_counter() - start, 3)
    report = {"schema": SCHEMA, "manifest": manifest, "exit_code": code, "result": _jsonable(result)}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.json_out:
        Path(args.json_out).write_text(text, encoding="utf-8")
    elif args.command != "gen" or getattr(args, "out", None):
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
