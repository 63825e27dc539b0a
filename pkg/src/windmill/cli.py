"""Command-line front end: ``windmill {matrix,windcheck,oracle,sample,count,verify}``.

Every command writes one JSON document (or a table for ``verify``) to
stdout or ``--output``.  Exit codes: 0 success or windable, 1 negative
verdict or failed suite, 2 usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import counter, holant, mcmc
from .symfunc import SymmetricFunction, as_fraction, make_named
from .verify import FIXTURES, SUITES, ratio_bound, run_suite
from .windability import build_A, is_windable

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _fraction_arg(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="windmill", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False):
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        if seed:
            sp.add_argument("--seed", type=_nonneg_int, default=0)

    def graph_args(sp):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", "-i", help="graph JSON: {vertices, edges, edge_weights?}")
        src.add_argument("--fixture", choices=sorted(FIXTURES), help="a bundled test graph")
        sp.add_argument("--problem", choices=["matching", "edge-cover"],
                        help="generate vertex functions; otherwise they come from the file")
        sp.add_argument("--b", type=_nonneg_int)
        sp.add_argument("--weights", help="comma-separated edge weights, e.g. 2,1/2,3")

    sp = sub.add_parser("matrix", help="dump the pairing matrix A_m")
    sp.add_argument("--m", type=int, required=True)
    common(sp)

    sp = sub.add_parser("windcheck", help="certify or refute windability of a symmetric function")
    sp.add_argument("--input", "-i", help="function JSON record")
    sp.add_argument("--values", help='comma-separated values, e.g. "3,1,1,1,1"')
    sp.add_argument("--kind", help="named family: atmost, atleast, exact, range, even, odd, ones, zeros, edge")
    sp.add_argument("--k", type=int)
    sp.add_argument("--a", type=int, help="lower end for kind=range")
    sp.add_argument("--b", help="upper end for kind=range")
    sp.add_argument("--w", help="weight for kind=edge")
    sp.add_argument("--arity", type=int)
    sp.add_argument("--figure", help="plot the pinned solution vectors to this file")
    common(sp)

    sp = sub.add_parser("oracle", help="exact Z_k by enumeration")
    graph_args(sp)
    sp.add_argument("--k", default="0,2", help="comma-separated k values (default 0,2)")
    common(sp)

    sp = sub.add_parser("sample", help="run the chain and report the final state and diagnostics")
    graph_args(sp)
    sp.add_argument("--burn-in", type=_nonneg_int, help="steps to run (default: mixing-bound formula)")
    sp.add_argument("--trajectory", help="write one NDJSON record per step to this file")
    sp.add_argument("--tv-steps", type=_nonneg_int, default=40,
                    help="length of the exact TV curve in the diagnostics (0 to skip)")
    sp.add_argument("--figure", help="plot the TV curve against the mixing bound")
    common(sp, seed=True)

    sp = sub.add_parser("count", help="estimate the number of b-matchings or b-edge-covers")
    graph_args(sp)
    sp.add_argument("--epsilon", type=_fraction_arg, default=Fraction(1, 10))
    sp.add_argument("--delta", type=_fraction_arg, default=Fraction(1, 20))
    sp.add_argument("--samples", type=_nonneg_int, help="draws per stage (overrides the schedule)")
    sp.add_argument("--burn-in", type=_nonneg_int)
    sp.add_argument("--schedule", choices=["desk", "theory"], default="desk")
    sp.add_argument("--exact-marginals", action="store_true", help="use enumerated marginals instead of sampling")
    sp.add_argument("--oracle", action="store_true", help="also report the exact Z_0 when enumerable")
    sp.add_argument("--figure", help="plot the per-edge marginals")
    common(sp, seed=True)

    sp = sub.add_parser("verify", help="run a named invariant suite")
    sp.add_argument("suite", choices=list(SUITES) + ["all"])
    common(sp)
    return p


def _parse_weights(text: str | None):
    if text is None:
        return None
    return [as_fraction(w) for w in text.split(",")]


def _load_graph(args):
    if args.fixture:
        fx = FIXTURES[args.fixture]
        problem = args.problem or fx.problem
        b = fx.b if args.b is None else args.b
        obj = {"vertices": [], "edges": [list(e) for e in fx.edges]}
        if fx.weights is not None:
            obj["edge_weights"] = [str(w) for w in fx.weights]
    else:
        obj = json.loads(Path(args.input).read_text())
        problem, b = args.problem, args.b
    if problem is not None and b is None:
        raise UsageError("--problem needs --b")
    weights = _parse_weights(args.weights)
    if weights is None and obj.get("edge_weights") is not None:
        weights = [as_fraction(w) for w in obj["edge_weights"]]
    obj = dict(obj)
    obj.pop("edge_weights", None)
    base, _ = holant.load_graph(obj, problem, b)
    if weights is not None and len(weights) != base.n_edges:
        raise UsageError(f"{len(weights)} weights for {base.n_edges} edges")
    inst = holant.weighted_transform(base, weights) if weights is not None else base
    return obj, base, inst, problem, b, weights


def cmd_matrix(args):
    if args.m < 1:
        raise UsageError("--m must be >= 1")
    return build_A(args.m).to_json(), EXIT_OK


def _function_from_args(args) -> SymmetricFunction:
    given = [x is not None for x in (args.input, args.values, args.kind)]
    if sum(given) != 1:
        raise UsageError("give exactly one of --input, --values, --kind")
    if args.input:
        return SymmetricFunction.from_json(json.loads(Path(args.input).read_text()), arity=args.arity)
    if args.values:
        f = SymmetricFunction(v for v in args.values.split(","))
        if args.arity is not None and args.arity != f.arity:
            raise UsageError(f"--arity {args.arity} does not match {f.arity + 1} values")
        return f
    arity = args.arity
    if args.kind.lower() in ("edge", "edgegadget"):
        arity = 2 if arity is None else arity
    if arity is None:
        raise UsageError("--kind needs --arity")
    return make_named(args.kind, arity, k=args.k, a=args.a, b=args.b, w=args.w)


def cmd_windcheck(args):
    f = _function_from_args(args)
    report = is_windable(f)
    if args.figure:
        from .plotting import plot_solutions

        plot_solutions([r.to_json() for r in report.per_pinning], args.figure, title=f"{f}: {report.verdict}")
    return report.to_json(), EXIT_OK if report.windable else EXIT_NEGATIVE


def cmd_oracle(args):
    _, base, inst, problem, _, weights = _load_graph(args)
    ks = [int(k) for k in args.k.split(",")]
    Z = holant.brute_Z_all(inst)
    out = {"edges": base.n_edges, "half_edges": inst.n_half_edges,
           "Z": {str(k): str(Z.get(k, Fraction(0))) for k in ks}}
    if 0 in ks and 2 in ks and Z[0] > 0:
        ratio = Z.get(2, Fraction(0)) / Z[0]
        out["ratio_Z2_Z0"] = str(ratio)
        if problem is not None:
            bound = ratio_bound(problem, base.n_edges, weights)
            out["ratio_bound"] = str(bound)
            out["ratio_within_bound"] = ratio <= bound
    return out, EXIT_OK


def cmd_sample(args):
    _, _, inst, _, _, _ = _load_graph(args)
    rep = counter.check_preconditions(inst)
    if not rep.ok:
        raise counter.PreconditionError(rep.message())
    start = rep.start
    burn_in = mcmc.default_burn_in(inst) if args.burn_in is None else args.burn_in
    rng = mcmc.make_rng(args.seed)
    if args.trajectory:
        final, rec = mcmc.run_chains(inst, [list(start)], burn_in, [rng], record_from=0, thin=1, n_records=burn_in)
        path = Path(args.trajectory)
        with path.open("w") as fh:
            fh.write(json.dumps({"step": 0, "assignment": holant.bits_to_hex(start),
                                 "weight": str(holant.weight(inst, start))}) + "\n")
            for t, bits in enumerate(rec[0], start=1):
                bits = tuple(int(b) for b in bits)
                fh.write(json.dumps({"step": t, "assignment": holant.bits_to_hex(bits),
                                     "weight": str(holant.weight(inst, bits))}) + "\n")
        final = tuple(int(b) for b in final[0])
    else:
        final = mcmc.sample(inst, burn_in, rng, start)
    out = {
        "seed": args.seed,
        "burn_in": burn_in,
        "start": holant.bits_to_hex(start),
        "assignment": holant.bits_to_hex(final),
        "bits": "".join(str(b) for b in final),
        "weight": str(holant.weight(inst, final)),
        "disagreement": holant.disagreement(inst, final),
    }
    if args.tv_steps:
        try:
            tm = mcmc.transition_matrix(inst)
        except ValueError as exc:
            out["diagnostics"] = {"skipped": str(exc)}
        else:
            mu = mcmc.stationary_distribution(tm)
            ok = mcmc.is_stationary(tm, mu) and mcmc.detailed_balance_holds(tm, mu)
            s = tm.index(start)
            tv = mcmc.tv_curve(tm, mu, s, args.tv_steps)
            mu0 = sum((m for st, m in zip(tm.states, mu) if holant.disagreement(inst, st) == 0), Fraction(0))
            bound = [mcmc.mixing_bound(mu[s], mu0, inst.n_half_edges, t) for t in range(len(tv))]
            out["diagnostics"] = {
                "states": tm.size,
                "stationary_check": "exact-pass" if ok else "exact-fail",
                "mu_omega0": str(mu0),
                "tv_curve": [f"{float(v):.6e}" for v in tv],
                "tv_bound": [f"{b:.6e}" for b in bound],
            }
            if args.figure:
                from .plotting import plot_tv_curve

                plot_tv_curve(tv, bound, args.figure, title=f"{tm.size} states, start {holant.bits_to_hex(start)}")
    return out, EXIT_OK


def cmd_count(args):
    obj, base, inst, problem, b, weights = _load_graph(args)
    kw = dict(epsilon=args.epsilon, delta=args.delta, seed=args.seed,
              marginals="exact" if args.exact_marginals else "mcmc",
              samples=args.samples, burn_in=args.burn_in, schedule=args.schedule)
    if problem == "matching":
        est = counter.count_b_matching(obj, b, weights, **kw)
    elif problem == "edge-cover":
        est = counter.count_b_edge_cover(obj, b, weights, **kw)
    else:
        job = counter.CountJob(inst, args.epsilon, args.delta, args.seed, args.samples, args.burn_in, args.schedule)
        est = counter.estimate_Z0(job, marginals=kw["marginals"])
    oracle = None
    if args.oracle and inst.n_half_edges <= holant.MAX_ENUM_HALF_EDGES:
        oracle = holant.brute_Z(inst, 0)
    if args.figure and est.per_edge_marginals:
        from .plotting import plot_marginals

        plot_marginals(est.per_edge_marginals, args.figure)
    return est.to_json(args.epsilon, args.delta, oracle), EXIT_OK


def cmd_verify(args):
    checks = run_suite(args.suite)
    width = max(len(f"{c.suite}:{c.name}") for c in checks)
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {(c.suite + ':' + c.name).ljust(width)}  {c.detail}".rstrip()
             for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    return "\n".join(lines), EXIT_OK if not failed else EXIT_NEGATIVE


COMMANDS = {
    "matrix": cmd_matrix,
    "windcheck": cmd_windcheck,
    "oracle": cmd_oracle,
    "sample": cmd_sample,
    "count": cmd_count,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        result, code = COMMANDS[args.command](args)
    except (UsageError, ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"windmill {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = result if isinstance(result, str) else json.dumps(result, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
