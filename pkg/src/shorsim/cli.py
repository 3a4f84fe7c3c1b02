"""Command-line front end.

Every command is deterministic given its flags: randomness flows from the
--seed flag through SplitMix64 only, output carries no timestamps, and
re-running a command reproduces its output byte for byte.

Exit codes: 0 success, 1 domain error, 2 resource-guard violation,
64 usage error.
"""

import argparse
import json
import sys

from .distribution import (
    METHOD_ORACLE,
    METHOD_PER_K,
    METHOD_TWO_TERM,
    OrderInfo,
    ProblemInstance,
    oracle_distribution,
    peaks,
    per_k_distribution,
    two_term_distribution,
)
from .errors import DomainError, ResourceError
from .experiments import (
    capture_rate_empirical,
    census_aggregate,
    census_sweep,
    figure1_data,
    neighbor_state_check,
    valuation_model_mc,
)
from .pipeline import (
    RetryPolicy,
    order_recovery_guarantee,
    run_with_retries,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_RESOURCE = 2
EXIT_USAGE = 64

SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fmt(value: float) -> str:
    return f"{value:.15e}"


def _csv(lines: list[str]) -> str:
    return "\n".join([f"# schema_version={SCHEMA_VERSION}"] + lines) + "\n"


def _json(obj: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2) + "\n"


def _kv_csv(obj: dict) -> str:
    lines = ["key,value"]
    for key, value in obj.items():
        if isinstance(value, (list, tuple, dict)):
            value = json.dumps(value)
        text = str(value)
        if "," in text or '"' in text:
            text = '"' + text.replace('"', '""') + '"'
        lines.append(f"{key},{text}")
    return _csv(lines)


def _render(args, obj: dict) -> str:
    return _json(obj) if args.format == "json" else _kv_csv(obj)


_METHODS = {
    "two-term": (METHOD_TWO_TERM, two_term_distribution),
    "per-k": (METHOD_PER_K, per_k_distribution),
    "oracle": (METHOD_ORACLE, oracle_distribution),
}


def _build_distribution(args):
    inst = ProblemInstance.create(args.n, args.x, args.qa)
    info = OrderInfo.from_instance(inst)
    _name, builder = _METHODS[args.method]
    dist = builder(inst) if args.method == "oracle" else builder(inst, info)
    return inst, info, dist


def _distribution_rows(dist) -> list[str]:
    lines = ["c,P(c)"]
    for c, p in enumerate(dist.probabilities):
        lines.append(f"{c},{_fmt(p)}")
    return lines


def _cmd_dist(args) -> str:
    _inst, _info, dist = _build_distribution(args)
    if args.format == "json":
        return _json({
            "n": args.n, "x": args.x, "qA": _inst.q_A, "N": _inst.N,
            "method": dist.method,
            "probabilities": [float(p) for p in dist.probabilities],
        })
    return _csv(_distribution_rows(dist))


def _peak_rows(peak_models) -> list[str]:
    lines = ["nu,sigma_nu,c_nu,delta_nu"]
    for p in peak_models:
        lines.append(f"{p.nu},{_fmt(p.sigma_nu)},{p.c_nu},{_fmt(p.delta_nu)}")
    return lines


def _cmd_peaks(args) -> str:
    inst = ProblemInstance.create(args.n, args.x, args.qa)
    info = OrderInfo.from_instance(inst)
    pk = peaks(inst, info)
    if args.format == "json":
        return _json({
            "n": args.n, "x": args.x, "qA": inst.q_A, "N": inst.N, "r": info.r,
            "peaks": [
                {"nu": p.nu, "sigma_nu": p.sigma_nu, "c_nu": p.c_nu, "delta_nu": p.delta_nu}
                for p in pk
            ],
        })
    return _csv(_peak_rows(pk))


def _cmd_fig1(args) -> str:
    inst, dist, pk = figure1_data()
    if args.format == "json":
        return _json({
            "n": inst.n, "x": inst.x, "qA": inst.q_A, "N": inst.N,
            "probabilities": [float(p) for p in dist.probabilities],
            "peaks": [
                {"nu": p.nu, "sigma_nu": p.sigma_nu, "c_nu": p.c_nu, "delta_nu": p.delta_nu}
                for p in pk
            ],
        })
    lines = _distribution_rows(dist)
    lines.append("# peaks: nu,sigma_nu,c_nu,delta_nu")
    for p in pk:
        lines.append(f"# peak {p.nu},{_fmt(p.sigma_nu)},{p.c_nu},{_fmt(p.delta_nu)}")
    return _csv(lines)


def _cmd_run(args) -> str:
    policy = RetryPolicy(max_mu=args.max_mu, max_resamples=args.max_resamples)
    outcome = run_with_retries(args.n, args.x, policy=policy, seed=args.seed, q_A=args.qa)
    rec = outcome.recovery
    obj = {
        "n": outcome.n,
        "x": outcome.x,
        "qA": outcome.instance.q_A if outcome.instance else None,
        "N": outcome.instance.N if outcome.instance else None,
        "r_true": outcome.r_true,
        "c": outcome.c,
        "recovered_num": rec.recovered.numerator if rec and rec.recovered else None,
        "recovered_den": rec.recovered.denominator if rec and rec.recovered else None,
        "classification": outcome.classification.value,
        "factors": list(outcome.factors) if outcome.factors else None,
        "retries": len(outcome.retries),
    }
    return _render(args, obj)


def _cmd_census(args) -> str:
    rows = census_sweep(args.nmax)
    if not rows:
        raise DomainError(f"no odd distinct-prime semiprimes below {args.nmax}")
    if args.format == "json":
        agg = census_aggregate(rows)
        band = (1 / 3 - 0.1, 1 / 3 + 0.1)
        return _json({
            "nmax": args.nmax,
            "count": agg.count,
            "total_x": agg.total_x,
            "total_odd": agg.total_odd,
            "total_trivial": agg.total_trivial,
            "aggregate_bad_fraction": agg.aggregate_bad_fraction,
            "mean_bad_fraction": agg.mean_bad_fraction,
            "max_bad_fraction": agg.max_bad_fraction,
            "half_bound_ok": agg.bound_ok,
            "band_low": band[0],
            "band_high": band[1],
            "band_ok": band[0] <= agg.aggregate_bad_fraction <= band[1],
        })
    lines = ["n,p1,p2,num_x,odd_r,trivial_sqrt,bad_fraction"]
    for r in rows:
        lines.append(
            f"{r.n},{r.p1},{r.p2},{r.num_x},{r.odd_r},{r.trivial_sqrt},{_fmt(r.fraction_bad)}"
        )
    return _csv(lines)


def _cmd_mc_valuation(args) -> str:
    res = valuation_model_mc(args.trials, seed=args.seed)
    return _render(args, {
        "trials": res.trials,
        "both_odd": res.both_odd,
        "matched_valuations": res.matched_valuations,
        "p_a": res.p_a,
        "p_b": res.p_b,
        "p_fail": res.p_fail,
    })


def _cmd_capture(args) -> str:
    qa = args.qa if args.qa is not None else (args.n * args.n - 1).bit_length()
    rep = capture_rate_empirical(args.n, args.x, qa, args.samples, seed=args.seed)
    return _render(args, {
        "n": rep.n, "x": rep.x, "qA": rep.q_A,
        "samples": rep.samples,
        "exact_value": rep.exact_value,
        "sampled_fraction": rep.sampled_fraction,
    })


def _cmd_guarantee(args) -> str:
    inst = ProblemInstance.create(args.n, args.x, args.qa)
    rep = order_recovery_guarantee(inst)
    return _render(args, {
        "n": rep.n, "x": rep.x, "qA": rep.q_A, "N": rep.N, "r": rep.r,
        "delta_min": rep.delta_min,
        "max_delta_c_d0": rep.max_delta_c_d0,
        "max_delta_c_d1": rep.max_delta_c_d1,
        "margin_min": rep.margin_min,
        "size_ok": rep.size_ok,
        "holds": rep.holds,
    })


def _cmd_neighbors(args) -> str:
    qa = args.qa if args.qa is not None else (args.n * args.n - 1).bit_length()
    rep = neighbor_state_check(args.n, args.x, qa)
    obj = {
        "n": rep.n, "x": rep.x, "qA": rep.q_A, "r": rep.r,
        "changed_neighbors": rep.changed_neighbors,
        "changed_within_guarantee": rep.changed_within_guarantee,
        "probes": [
            {
                "nu": p.nu,
                "c_nu": p.c_nu,
                "delta_nu": p.delta_nu,
                "results": {str(d): (list(v) if v else None) for d, v in p.results},
                "neighbors_differ": list(p.neighbors_differ),
            }
            for p in rep.probes
        ],
    }
    if args.format == "json":
        return _json(obj)
    lines = ["nu,c_nu,delta_nu,differs"]
    for p in rep.probes:
        lines.append(f"{p.nu},{p.c_nu},{_fmt(p.delta_nu)},{len(p.neighbors_differ)}")
    return _csv(lines)


def build_parser() -> _Parser:
    parser = _Parser(prog="shorsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, fmt_default, **flags):
        p = sub.add_parser(name)
        p.set_defaults(func=func)
        for flag, options in flags.items():
            p.add_argument(flag, **options)
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        return p

    n_flag = {"type": int, "required": True}
    x_flag = {"type": int, "required": True}
    qa_flag = {"type": int, "default": None}
    seed_flag = {"type": int, "default": 0}

    dist = add("dist", _cmd_dist, "csv", **{"--n": n_flag, "--x": x_flag, "--qa": qa_flag})
    dist.add_argument("--method", choices=tuple(_METHODS), default="two-term")
    add("peaks", _cmd_peaks, "csv", **{"--n": n_flag, "--x": x_flag, "--qa": qa_flag})
    add("fig1", _cmd_fig1, "csv")
    run = add("run", _cmd_run, "json",
              **{"--n": n_flag, "--x": x_flag, "--qa": qa_flag, "--seed": seed_flag})
    run.add_argument("--max-mu", type=int, default=64)
    run.add_argument("--max-resamples", type=int, default=4)
    add("census", _cmd_census, "csv", **{"--nmax": {"type": int, "default": 10_000}})
    add("mc-valuation", _cmd_mc_valuation, "json",
        **{"--trials": {"type": int, "default": 1_000_000}, "--seed": seed_flag})
    capture = add("capture", _cmd_capture, "json",
                  **{"--n": n_flag, "--x": x_flag, "--qa": qa_flag, "--seed": seed_flag})
    capture.add_argument("--samples", type=int, default=100_000)
    add("guarantee", _cmd_guarantee, "json", **{"--n": n_flag, "--x": x_flag, "--qa": qa_flag})
    add("neighbors", _cmd_neighbors, "json", **{"--n": n_flag, "--x": x_flag, "--qa": qa_flag})
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse --help exits 0; usage errors exit 64
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except ResourceError as exc:
        print(f"shorsim: resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"shorsim: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def entry_point():
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
