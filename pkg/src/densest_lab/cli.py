"""Command-line entry point: gen, solve, reduce, verify, plan, selftest, replay."""
from __future__ import annotations

import argparse
import contextlib
import hashlib
import io
import json
import os
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .errors import BUDGET_ENV, InvalidInputError, LabError
from .gadget import GadgetShape
from .generators import MODELS, generate
from .graph import Graph, UniformHypergraph, Witness
from .instances import GapInstance, GapKind, dumps_json, load_carrier, load_instance, save_instance
from .rational import RationalFormatError, fmt_rat, parse_rat
from .reductions import (
    clique_to_dalks_instance,
    dks_to_dksh,
    dksh_to_dalks,
    plan_pipeline,
    poly_threshold,
    polydks_to_dksh,
    relax_gapdks,
    shrink_polydks,
)
from .selftest import SUITES, run_suites
from .solvers import (
    anchored_densest,
    brute_solve,
    dalks_2approx,
    dalks_3approx_peel,
    dalks_exact_xp,
    densest_subgraph_exact,
    structured_optimum,
)
from .witnesses import check_witness, map_witness

EXIT_OK, EXIT_INVALID_WITNESS, EXIT_INPUT, EXIT_BUDGET, EXIT_SELFTEST = 0, 1, 2, 3, 4

ALGS = ("flow", "anchored", "xp", "peel3", "approx2", "brute", "structured")
RULES = ("relax", "shrink", "dks2dksh", "poly2dksh", "dksh2dalks", "clique2dalks")


def _rat(text: str) -> Fraction:
    try:
        return parse_rat(text)
    except RationalFormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="densest-lab", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--budget", type=int, help=f"enumeration budget (overrides ${BUDGET_ENV})")
    p.add_argument("--manifest", type=Path, help="write a replayable run manifest here")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded random graph")
    g.add_argument("--model", choices=sorted(MODELS), default="gnp")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=_rat, default=Fraction(1, 2))
    g.add_argument("--k", type=int, default=0)
    g.add_argument("--q", type=_rat, default=Fraction(3, 4), help="planted-dense inner probability")
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("-o", "--out", type=Path)

    s = sub.add_parser("solve", help="run a solver on a graph, gadget, or instance manifest")
    s.add_argument("input", type=Path)
    s.add_argument("--alg", choices=ALGS, default="flow")
    s.add_argument("--k", type=int)
    s.add_argument("--anchors", default="", help="comma-separated anchor vertices")
    s.add_argument("--witness-out", type=Path)
    s.add_argument("--json", action="store_true")

    r = sub.add_parser("reduce", help="apply a reduction rule")
    r.add_argument("input", type=Path, help="instance manifest (.json) or raw graph/hypergraph file")
    r.add_argument("--rule", choices=RULES, required=True)
    r.add_argument("--out", type=Path, required=True, help="output manifest path (.json)")
    r.add_argument("--k", type=int)
    r.add_argument("--ell", type=int)
    r.add_argument("--t", type=int)
    r.add_argument("--eps", type=_rat)
    r.add_argument("--delta", type=_rat)
    r.add_argument("--gamma", type=_rat)
    r.add_argument("--lambda", dest="lam", type=_rat)
    r.add_argument("--source-lambda", type=_rat, help="gap of a raw GapDkS source (default 2*lambda*gamma^2)")
    r.add_argument("--scale-c1", type=int)
    r.add_argument("--scale-c2", type=int)
    r.add_argument("--scale-x", type=int)
    r.add_argument("--witness", type=Path, help="source witness to map to the target")
    r.add_argument("--seed", type=_seed, default=0)

    v = sub.add_parser("verify", help="check a witness against an instance manifest")
    v.add_argument("instance", type=Path)
    v.add_argument("--witness", type=Path, required=True)

    pl = sub.add_parser("plan", help="print a theorem's reduction parameter chain")
    pl.add_argument("--theorem", type=int, choices=(1, 3), required=True)
    pl.add_argument("--eps", type=_rat, required=True)
    pl.add_argument("--json", action="store_true")

    st = sub.add_parser("selftest", help="run self-test suites")
    st.add_argument("--suite", action="append", choices=sorted(SUITES))
    st.add_argument("--seed", type=_seed, default=0)

    rp = sub.add_parser("replay", help="re-run a manifest and compare outputs")
    rp.add_argument("run_manifest", type=Path)
    return p


# --- commands ---------------------------------------------------------------

def _need(value: Any, flag: str) -> Any:
    if value is None:
        raise InvalidInputError(f"{flag} is required here")
    return value


def cmd_gen(args, out: io.StringIO, outputs: list[Path]) -> int:
    g = generate(args.model, args.n, args.p, args.k, args.seed, args.q)
    if args.out:
        g.save(args.out)
        outputs.append(args.out)
    else:
        out.write(g.dumps())
    return EXIT_OK


def _load_solve_input(path: Path) -> tuple[Any, int | None]:
    if path.suffix == ".json":
        inst = load_instance(path)
        return inst.carrier, inst.k
    return load_carrier(path), None


def cmd_solve(args, out: io.StringIO, outputs: list[Path]) -> int:
    carrier, inst_k = _load_solve_input(args.input)
    k = args.k if args.k is not None else inst_k
    if isinstance(carrier, UniformHypergraph):
        raise InvalidInputError("solvers act on graphs or gadget shapes, not hypergraphs")
    if args.alg == "structured":
        if not isinstance(carrier, GadgetShape):
            raise InvalidInputError("--alg structured needs a gadget shape")
        res = structured_optimum(carrier, _need(k, "--k"))
    else:
        g = carrier.expand() if isinstance(carrier, GadgetShape) else carrier
        if args.alg == "flow":
            res = densest_subgraph_exact(g)
        elif args.alg == "anchored":
            anchors = [int(a) for a in args.anchors.split(",") if a.strip()]
            res = anchored_densest(g, anchors)
        elif args.alg == "xp":
            res = dalks_exact_xp(g, _need(k, "--k"))
        elif args.alg == "peel3":
            res = dalks_3approx_peel(g, _need(k, "--k"))
        elif args.alg == "approx2":
            res = dalks_2approx(g, _need(k, "--k"))
        else:
            res = brute_solve(g, k if k is not None else 1)
    if args.json:
        out.write(dumps_json({
            "value": fmt_rat(res.value),
            "method": res.method.value,
            "guarantee": res.guarantee.value,
            "size": len(res.witness),
        }))
    else:
        out.write(fmt_rat(res.value) + "\n")
    if args.witness_out:
        res.witness.save(args.witness_out)
        outputs.append(args.witness_out)
    return EXIT_OK


def _source_instance(args, carrier) -> GapInstance:
    rule = args.rule
    k = _need(args.k, "--k")
    if rule == "relax":
        lam, gamma = _need(args.lam, "--lambda"), _need(args.gamma, "--gamma")
        src_lam = args.source_lambda if args.source_lambda is not None else 2 * lam * gamma ** 2
        return GapInstance(GapKind.GAP_DKS, carrier, k, _need(args.ell, "--ell"), {"lambda": src_lam})
    if rule == "shrink":
        t, delta = _need(args.t, "--t"), _need(args.delta, "--delta")
        d0 = delta / (2 * t)
        return GapInstance(GapKind.POLY_GAP_DKS, carrier, k, poly_threshold(k, t, d0), {"delta": d0, "t": t})
    if rule == "dks2dksh":
        params = {"lambda": _need(args.lam, "--lambda"), "gamma": _need(args.gamma, "--gamma")}
        return GapInstance(GapKind.GAP_DKS_SIZE, carrier, k, _need(args.ell, "--ell"), params)
    if rule == "poly2dksh":
        t = _need(args.t, "--t")
        params = {"delta": Fraction(1, 3), "t": t, "gamma": _need(args.gamma, "--gamma")}
        return GapInstance(GapKind.POLY_GAP_DKS_SIZE, carrier, k, poly_threshold(k, t, Fraction(1, 3)), params)
    if rule == "dksh2dalks":
        if not isinstance(carrier, UniformHypergraph):
            raise InvalidInputError("dksh2dalks needs a hypergraph")
        t, eps = carrier.t, _need(args.eps, "--eps")
        lam = args.lam if args.lam is not None else Fraction(20 * t * t) / eps
        gamma = args.gamma if args.gamma is not None else Fraction(10 ** 7 * t ** 5) / eps ** 4
        return GapInstance(GapKind.STRONG_GAP_DKSH, carrier, k, _need(args.ell, "--ell"), {"lambda": lam, "gamma": gamma, "t": t})
    raise InvalidInputError(f"rule {rule} cannot start from a raw carrier")


def cmd_reduce(args, out: io.StringIO, outputs: list[Path]) -> int:
    rule = args.rule
    source: GapInstance | Graph
    if rule == "clique2dalks":
        g = load_instance(args.input).carrier if args.input.suffix == ".json" else load_carrier(args.input)
        if not isinstance(g, Graph):
            raise InvalidInputError("clique2dalks needs a graph")
        source = g
        target, record = clique_to_dalks_instance(g, _need(args.k, "--k"))
    else:
        source = load_instance(args.input) if args.input.suffix == ".json" else _source_instance(args, load_carrier(args.input))
        if rule == "relax":
            target, record = relax_gapdks(source, _need(args.lam, "--lambda"), _need(args.gamma, "--gamma"))
        elif rule == "shrink":
            target, record = shrink_polydks(source, _need(args.delta, "--delta"), _need(args.t, "--t"), _need(args.gamma, "--gamma"))
        elif rule == "dks2dksh":
            target, record = dks_to_dksh(source)
        elif rule == "poly2dksh":
            target, record = polydks_to_dksh(source, _need(args.lam, "--lambda"))
        else:
            target, record = dksh_to_dalks(source, _need(args.eps, "--eps"), args.scale_c1, args.scale_c2, args.scale_x)
    carrier_path = save_instance(target, args.out)
    record_path = args.out.with_suffix(".record.json")
    record_path.write_text(record.dumps())
    outputs.extend([args.out, carrier_path, record_path])
    if args.witness:
        mapped = map_witness(rule, source, Witness.load(args.witness), record, seed=args.seed)
        wpath = args.out.with_suffix(".witness")
        mapped.save(wpath)
        outputs.append(wpath)
    out.write(record.dumps())
    return EXIT_OK


def cmd_verify(args, out: io.StringIO, outputs: list[Path]) -> int:
    inst = load_instance(args.instance)
    verdict = check_witness(inst, Witness.load(args.witness))
    out.write(verdict.dumps())
    return EXIT_OK if verdict.valid else EXIT_INVALID_WITNESS


def cmd_plan(args, out: io.StringIO, outputs: list[Path]) -> int:
    plan = plan_pipeline(args.theorem, args.eps)
    out.write(dumps_json(plan.to_dict()) if args.json else plan.render())
    return EXIT_OK if plan.ok else EXIT_SELFTEST


def cmd_selftest(args, out: io.StringIO, outputs: list[Path]) -> int:
    names = args.suite or list(SUITES)
    results = run_suites(names, args.seed)
    for r in results:
        out.write(f"{'PASS' if r.ok else 'FAIL'} [{r.suite}] {r.name}" + (f" ({r.detail})" if r.detail else "") + "\n")
    failed = sum(not r.ok for r in results)
    out.write(f"{len(results) - failed}/{len(results)} passed\n")
    return EXIT_OK if failed == 0 else EXIT_SELFTEST


def cmd_replay(args, out: io.StringIO, outputs: list[Path]) -> int:
    try:
        doc = json.loads(args.run_manifest.read_text())
        argv = doc["argv"]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise InvalidInputError(f"unreadable run manifest: {exc}") from exc
    buf = io.StringIO()
    replayed = build_parser().parse_args(argv)
    with _budget_env(replayed.budget):
        code, _ = _dispatch(replayed, buf)
    mismatches = []
    if _sha(buf.getvalue().encode()) != doc["stdout_sha256"]:
        mismatches.append("stdout")
    if code != doc["exit_code"]:
        mismatches.append("exit code")
    for rec in doc["outputs"]:
        path = Path(rec["path"])
        if not path.exists() or _sha(path.read_bytes()) != rec["sha256"]:
            mismatches.append(rec["path"])
    if mismatches:
        out.write("replay mismatch: " + ", ".join(mismatches) + "\n")
        return EXIT_SELFTEST
    out.write("replay identical\n")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "reduce": cmd_reduce,
    "verify": cmd_verify,
    "plan": cmd_plan,
    "selftest": cmd_selftest,
    "replay": cmd_replay,
}


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _dispatch(args, out: io.StringIO) -> tuple[int, list[Path]]:
    outputs: list[Path] = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        code = COMMANDS[args.command](args, out, outputs)
    return code, outputs


def _input_paths(args) -> list[Path]:
    paths = []
    for name in ("input", "instance", "witness", "run_manifest"):
        value = getattr(args, name, None)
        if isinstance(value, Path) and value.exists():
            paths.append(value)
    return paths


def _params(args) -> dict[str, Any]:
    skip = {"command", "manifest", "input", "instance", "witness", "run_manifest", "out", "witness_out"}
    params = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        params[key] = fmt_rat(value) if isinstance(value, Fraction) else (str(value) if isinstance(value, Path) else value)
    return params


@contextlib.contextmanager
def _budget_env(budget: int | None):
    previous = os.environ.get(BUDGET_ENV)
    if budget is not None:
        os.environ[BUDGET_ENV] = str(budget)
    try:
        yield
    finally:
        if previous is None:
            os.environ.pop(BUDGET_ENV, None)
        else:
            os.environ[BUDGET_ENV] = previous


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    start = time.perf_counter()
    try:
        with _budget_env(args.budget):
            code, outputs = _dispatch(args, buf)
    except LabError as exc:
        sys.stdout.write(buf.getvalue())
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        sys.stdout.write(buf.getvalue())
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(buf.getvalue())
    if args.manifest is not None:
        replay_argv = [a for i, a in enumerate(argv) if a != "--manifest" and (i == 0 or argv[i - 1] != "--manifest")]
        doc = {
            "command": args.command,
            "argv": replay_argv,
            "seed": getattr(args, "seed", None),
            "inputs": [{"path": str(p), "sha256": _sha(p.read_bytes())} for p in _input_paths(args)],
            "params": _params(args),
            "outputs": [{"path": str(p), "sha256": _sha(p.read_bytes())} for p in outputs],
            "stdout_sha256": _sha(buf.getvalue().encode()),
            "exit_code": code,
            "timing_seconds": round(time.perf_counter() - start, 6),
            "tool_version": __version__,
        }
        args.manifest.write_text(dumps_json(doc))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
