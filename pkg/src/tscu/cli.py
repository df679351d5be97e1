"""Command-line front end: ``tscu solve|verify|kernelize|generate|transform|bench``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import multiprocessing as mp
import sys
import time
from pathlib import Path

from .cograph import augment_modulator, find_modulator, solve_cograph
from .core import (
    Graph,
    Instance,
    Trivial,
    TscuError,
    Verdict,
    normalize,
    parse_solution,
    read_instance,
    serialize_instance,
    serialize_solution,
    verify_solution,
)
from .generators import (
    MccInput,
    RandomParams,
    base_seed,
    gen_mcc,
    gen_random,
    gen_sat34,
    parse_dimacs_cnf,
    transform_bipartite,
)
from .indset import ParameterError, max_independent_set, solve_indset
from .kernel import Kernel, feedback_edge_number, kernelize_fes, kernelize_vc_2dcs
from .oracle import DEFAULT_CAP, brute_force_solve
from .treewidth import heuristic_td, parse_td, solve_treewidth

ALGOS = ("auto", "brute", "cograph", "treewidth", "indset")
EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


class Inapplicable(TscuError):
    pass


# --------------------------------------------------------------------------
# algorithm selection


def bell(k: int) -> int:
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def measure(inst: Instance, modulator_cap: int = 8, alpha_cap: int = 5) -> dict:
    """Cheap structural parameters of a normalized instance."""
    g = inst.graph
    X = find_modulator(g, modulator_cap)
    return {
        "n": g.n,
        "fes": feedback_edge_number(g),
        "modulator": None if X is None else len(augment_modulator(inst, X)),
        "alpha": max_independent_set(g, alpha_cap),
        "width": heuristic_td(g).width,
    }


def predicted_costs(inst: Instance, params: dict) -> dict:
    n = params["n"]
    costs = {}
    if n <= DEFAULT_CAP:
        costs["brute"] = 2 ** (n - len(inst.S) - len(inst.T))
    x = params["modulator"]
    if x is not None:
        costs["cograph"] = 2**x * (x + 2) ** (2 * x + 4) * n * n
    w = params["width"]
    costs["treewidth"] = (w + 2) ** (w + 1) * bell(w + 1) ** 2 * n
    k = params["alpha"]
    if k is not None:
        costs["indset"] = n ** (2 * (k - 1) * (2 * k - 2))
    return costs


def choose_algo(inst: Instance, params: dict) -> str:
    costs = predicted_costs(inst, params)
    best = min(costs.values())
    if costs["treewidth"] == best:
        return "treewidth"
    return min((c, name) for name, c in costs.items())[1]


def run_algo(inst: Instance, algo: str, opts: dict | None = None) -> tuple[Verdict, str]:
    """Solve with ``algo``; returns the verdict and the algorithm actually used."""
    opts = opts or {}
    if algo == "auto":
        red = normalize(inst)
        if isinstance(red, Trivial):
            return red.verdict, "trivial"
        algo = choose_algo(red.instance, measure(red.instance, opts.get("modulator_cap", 8)))
    if algo == "brute":
        cap = opts.get("brute_cap", DEFAULT_CAP)
        if inst.n > cap:
            raise Inapplicable(f"brute force refuses n={inst.n} > cap {cap}")
        return brute_force_solve(inst, cap).literal, algo
    if algo == "cograph":
        cap = opts.get("modulator_cap", 8)
        v = solve_cograph(inst, cap)
        if v is None:
            raise Inapplicable(f"no modulator within cap {cap}")
        return v, algo
    if algo == "treewidth":
        td = opts.get("td")
        return solve_treewidth(inst, td), algo
    if algo == "indset":
        try:
            return solve_indset(inst, opts.get("param_k"), cap=6), algo
        except ParameterError as exc:
            raise Inapplicable(str(exc)) from None
    raise Inapplicable(f"unknown algorithm {algo!r}")


# --------------------------------------------------------------------------
# commands


def _read_text(path: str) -> str:
    with open(path, encoding="ascii") as fh:
        return fh.read()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    opts = {"modulator_cap": args.modulator_cap, "param_k": args.param_k, "brute_cap": args.brute_cap}
    if args.td:
        opts["td"] = parse_td(_read_text(args.td))
    try:
        verdict, used = run_algo(inst, args.algo, opts)
    except Inapplicable as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(str(exc))
        return EXIT_ERROR
    print(verdict.line())
    if args.verbose:
        print(f"c algo {used}", file=sys.stderr)
    if args.solution and verdict.witness is not None:
        with open(args.solution, "w") as fh:
            fh.write(serialize_solution(verdict.witness))
    return EXIT_YES if verdict.answer else EXIT_NO


def cmd_verify(args) -> int:
    inst = read_instance(args.instance)
    red = parse_solution(_read_text(args.solution), inst.n)
    check = verify_solution(inst, red)
    if check.valid:
        print(f"valid {check.cut_weight}")
        return 0
    print(f"invalid: {check.reason}")
    return 1


def _trivial_instance(answer: bool, two_dcs: bool) -> Instance:
    g = Graph.from_edges(2, [(0, 1)])
    ell = None if (two_dcs and answer) else (1 if answer else 0)
    return Instance(g, frozenset({0}), frozenset({1}), ell)


def cmd_kernelize(args) -> int:
    inst = read_instance(args.instance)
    if args.rules == "fes":
        res = kernelize_fes(inst)
    else:
        res = kernelize_vc_2dcs(inst)
    if isinstance(res, Kernel):
        out = res.instance
    else:
        out = _trivial_instance(res.verdict.answer, inst.ell is None)
    _emit(serialize_instance(out), args.output)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(res.report.flat(), fh, indent=2, sort_keys=True)
    return 0


def _parse_classes(text: str, n: int) -> tuple[tuple[int, ...], ...]:
    classes = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("c"):
            classes.append(tuple(int(tok) - 1 for tok in line.split()))
    return tuple(classes)


def cmd_generate(args) -> int:
    if args.family == "sat34":
        inst = gen_sat34(parse_dimacs_cnf(_read_text(args.cnf)))
        text = serialize_instance(inst)
    elif args.family == "mcc":
        g = read_instance(args.graph).graph
        classes = _parse_classes(_read_text(args.classes), g.n)
        d = g.degree(0) if g.n else 0
        res = gen_mcc(MccInput(g, classes, d))
        text = f"c c1 {res.c1}\nc c2 {res.c2}\n" + serialize_instance(res.instance)
    else:
        params = RandomParams(
            n=args.n, p=args.p, s=args.s, t=args.t, ell=args.ell, j=args.j, rows=args.rows, cols=args.cols
        )
        seed = args.seed if args.seed is not None else base_seed(0)
        text = serialize_instance(gen_random(args.kind, params, seed))
    _emit(text, args.output)
    return 0


def cmd_transform(args) -> int:
    inst = read_instance(args.instance)
    _emit(serialize_instance(transform_bipartite(inst)), args.output)
    return 0


# --------------------------------------------------------------------------
# bench


def read_manifest(path: str) -> list[tuple[str, list[str]]]:
    base = Path(path).parent
    rows = []
    for line in _read_text(path).splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TscuError(f"manifest line must be '<instance> <algo,algo>': {line!r}")
        algos = [a for a in parts[1].split(",") if a]
        for a in algos:
            if a not in ALGOS:
                raise TscuError(f"unknown algorithm {a!r} in manifest")
        inst_path = Path(parts[0])
        rows.append((str(inst_path if inst_path.is_absolute() else base / inst_path), algos))
    return rows


def _bench_worker(path, algo, conn):
    try:
        inst = read_instance(path)
        t0 = time.perf_counter()
        verdict, _ = run_algo(inst, algo)
        ms = (time.perf_counter() - t0) * 1000
        conn.send(("ok", verdict.answer, verdict.optimum, ms, dict(verdict.stats or {})))
    except Inapplicable as exc:
        conn.send(("n/a", None, None, 0.0, {"reason": str(exc)}))
    except Exception as exc:  # reported as an ERROR row
        conn.send(("error", None, None, 0.0, {"reason": f"{type(exc).__name__}: {exc}"}))
    finally:
        conn.close()


def _format_params(stats: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in sorted(stats.items()))


def run_bench(manifest, timeout: float, jobs: int = 1) -> list[dict]:
    """One row per (instance, algorithm), in manifest order."""
    tasks = [(path, algo) for path, algos in manifest for algo in algos]
    ctx = mp.get_context("fork")
    rows: list[dict | None] = [None] * len(tasks)
    running: dict[int, tuple] = {}
    pending = list(range(len(tasks)))

    def finish(i, proc, conn, start):
        path, algo = tasks[i]
        row = {"instance": path, "algo": algo, "verdict": "TIMEOUT", "optimum": "", "ms": "", "params": ""}
        try:
            msg = conn.recv() if conn.poll() else None
        except EOFError:  # killed before it reported
            msg = None
        if msg is not None:
            status, answer, opt, ms, stats = msg
            if status == "ok":
                row.update(verdict="YES" if answer else "NO", optimum="" if opt is None else opt, ms=f"{ms:.1f}")
            else:
                row["verdict"] = status.upper()
            row["params"] = _format_params(stats)
        else:
            row["ms"] = f"{(time.monotonic() - start) * 1000:.1f}"
        proc.join()
        rows[i] = row

    while pending or running:
        while pending and len(running) < max(1, jobs):
            i = pending.pop(0)
            recv, send = ctx.Pipe(duplex=False)
            proc = ctx.Process(target=_bench_worker, args=(*tasks[i], send))
            proc.start()
            send.close()
            running[i] = (proc, recv, time.monotonic())
        for i, (proc, conn, start) in list(running.items()):
            done = conn.poll() or not proc.is_alive()
            if done:
                finish(i, proc, conn, start)
                del running[i]
            elif time.monotonic() - start > timeout:
                proc.kill()
                proc.join()
                finish(i, proc, conn, start)
                del running[i]
        if running:
            time.sleep(0.001)
    return rows


def check_agreement(rows: list[dict]) -> list[str]:
    """Diagnostics for instances whose decided rows disagree."""
    seen: dict[str, tuple] = {}
    problems = []
    for row in rows:
        if row["verdict"] not in ("YES", "NO"):
            continue
        key = (row["verdict"], row["optimum"])
        first = seen.setdefault(row["instance"], (key, row["algo"]))
        if first[0] != key:
            problems.append(
                f"{row['instance']}: {first[1]} says {' '.join(map(str, first[0])).strip()}, "
                f"{row['algo']} says {' '.join(map(str, key)).strip()}"
            )
    return problems


COLUMNS = ("instance", "algo", "verdict", "optimum", "ms", "params")


def format_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
    for row in rows:
        lines.append("| " + " | ".join(str(row[c]) for c in COLUMNS) + " |")
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    manifest = read_manifest(args.manifest)
    rows = run_bench(manifest, args.timeout, args.jobs)
    problems = check_agreement(rows)
    _emit(format_rows(rows, args.format), args.output)
    for p in problems:
        print(f"disagreement: {p}", file=sys.stderr)
    return 1 if problems else 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tscu", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide an instance")
    s.add_argument("instance")
    s.add_argument("--algo", choices=ALGOS, default="auto")
    s.add_argument("--modulator-cap", type=int, default=8)
    s.add_argument("--td", help="tree decomposition in PACE td format")
    s.add_argument("--param-k", type=int, help="independence number bound for indset")
    s.add_argument("--brute-cap", type=int, default=DEFAULT_CAP)
    s.add_argument("--solution", "-s", help="write the witness here")
    s.add_argument("--verbose", "-v", action="store_true")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a solution file")
    v.add_argument("instance")
    v.add_argument("solution")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("kernelize", help="apply a kernelization")
    k.add_argument("instance")
    k.add_argument("--rules", choices=("fes", "vc2dcs"), default="fes")
    k.add_argument("-o", "--output")
    k.add_argument("--report")
    k.set_defaults(func=cmd_kernelize)

    g = sub.add_parser("generate", help="generate instances")
    gsub = g.add_subparsers(dest="family", required=True)
    g1 = gsub.add_parser("sat34")
    g1.add_argument("--cnf", required=True)
    g2 = gsub.add_parser("mcc")
    g2.add_argument("--graph", required=True)
    g2.add_argument("--classes", required=True)
    g3 = gsub.add_parser("random")
    g3.add_argument(
        "--kind", required=True, choices=("connected", "cograph_plus_modulator", "low_independence", "grid")
    )
    g3.add_argument("--seed", type=int)
    g3.add_argument("--n", type=int, default=8)
    g3.add_argument("--p", type=float, default=0.3)
    g3.add_argument("--s", type=int, default=1)
    g3.add_argument("--t", type=int, default=1)
    g3.add_argument("--ell", type=int)
    g3.add_argument("--j", type=int, default=0)
    g3.add_argument("--rows", type=int, default=3)
    g3.add_argument("--cols", type=int, default=3)
    for gp in (g1, g2, g3):
        gp.add_argument("-o", "--output")
        gp.set_defaults(func=cmd_generate)

    t = sub.add_parser("transform", help="instance transformations")
    t.add_argument("kind", choices=("bipartite",))
    t.add_argument("instance")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_transform)

    b = sub.add_parser("bench", help="run a benchmark manifest")
    b.add_argument("manifest")
    b.add_argument("--timeout", type=float, default=60.0, help="seconds per row")
    b.add_argument("--format", choices=("csv", "md"), default="csv")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TscuError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
