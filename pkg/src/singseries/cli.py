"""Command line interface: ``singseries <command> [options]``.

Exit status: 0 success, 2 usage error, 3 invalid parameters or domain,
4 budget exceeded, 5 capability limit, 6 replay mismatch.

If ``SINGSERIES_OUTPUT_DIR`` is set, relative ``--out`` paths are resolved
against it, and runs without ``--out`` write ``<command>.<format>`` there.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .empirical import (MonteCarloConfig, empirical_distribution, empirical_moment,
                        ks_distance, sample_random_singular)
from .errors import ConfigurationError, SingSeriesError
from .export import histogram_rows, make_record, read_json, write_csv, write_json
from .moments import mu, nonvanishing_probability
from .patterns import count_prime_seeds, poisson_fit, window_counts
from .polyfam import (PolyFamily, compose, composed_is_primitive, d1_resultant,
                      degeneracy_graph, is_primitive_family)
from .singular import base_constant, singular_series_family, singular_series_tuple
from .tuples import KTuple

ENV_OUTPUT_DIR = "SINGSERIES_OUTPUT_DIR"
REPLAY_MISMATCH = 6
# options that do not influence results and are left out of replay parameters
_NOT_PARAMETERS = {"out", "format", "func", "replay", "command"}


def fmt(x):
    return format(float(x), ".15g")


def _edges(text):
    try:
        lo, hi, width = (float(t) for t in text.split(":"))
    except ValueError:
        raise ConfigurationError(f"bins must look like lo:hi:width, got {text!r}") from None
    if not (width > 0 and hi > lo):
        raise ConfigurationError(f"bad bin specification {text!r}")
    n = int(round((hi - lo) / width))
    return np.linspace(lo, lo + n * width, n + 1)


def _dist_output(dist, edges):
    counts, zero = dist.histogram(edges)
    rows = histogram_rows(edges, counts, zero)
    result = {"count": dist.count, "zero_count": zero, "zero_fraction": dist.zero_fraction(),
              "mean": dist.mean(), "second_moment": dist.moment(2),
              "above_last_edge": int(dist.weights[dist.values >= edges[-1]].sum()),
              "histogram": [list(r) for r in rows]}
    return result, rows


def cmd_sing_tuple(a):
    h = KTuple.parse(a.tuple)
    base = None if a.slow else base_constant(h.k, a.cutoff)
    r = singular_series_tuple(h, a.cutoff, base)
    lines = [f"S({h}) = {fmt(r.value)}  (cutoff {a.cutoff}, |log tail| <= {fmt(r.tail_log_bound)}, {r.mode})"]
    return lines, {"value": r.value, "tail_log_bound": r.tail_log_bound, "mode": r.mode,
                   "exact_zero": r.exact_zero}, None


def cmd_sing_family(a):
    F = PolyFamily.parse(a.family, assume_irreducible=a.assume_irreducible)
    r = singular_series_family(F, a.cutoff)
    lines = [f"S({F}) = {fmt(r.value)}  (cutoff {a.cutoff}, spread {fmt(r.spread)}, {r.mode})"]
    return lines, {"value": r.value, "spread": r.spread, "log_spread": r.tail_log_bound,
                   "mode": r.mode, "exact_zero": r.exact_zero}, None


def cmd_moment(a):
    r = mu(a.k, a.m, a.cutoff)
    lines = [f"mu_{a.k}({a.m}) = {fmt(r.value)}  (cutoff {a.cutoff}, |log tail| <= {fmt(r.tail_log_bound)})"]
    return lines, {"value": r.value, "tail_log_bound": r.tail_log_bound,
                   "local_factors": {str(p): v for p, v in r.local_factors.items()}}, None


def cmd_nonvanish(a):
    q = nonvanishing_probability(a.k)
    lines = [f"P(S != 0) for k={a.k}: {q} = {fmt(q)}"]
    return lines, {"numerator": q.numerator, "denominator": q.denominator, "value": float(q)}, None


def cmd_empirical_moment(a):
    v = empirical_moment(a.k, a.m, a.h, a.cutoff, shards=a.shards)
    return [f"empirical moment k={a.k} m={a.m} h={a.h}: {fmt(v)}"], {"value": v}, None


def cmd_distribution(a):
    d = empirical_distribution(a.k, a.h, a.cutoff, shards=a.shards)
    result, rows = _dist_output(d, _edges(a.bins))
    lines = [f"tuple sweep k={a.k} h={a.h}: {d.count} tuples, zero fraction {fmt(d.zero_fraction())}, "
             f"mean {fmt(d.mean())}"]
    return lines, result, rows


def cmd_mc_sample(a):
    d = sample_random_singular(MonteCarloConfig(a.k, a.cutoff, a.n, a.seed), shards=a.shards)
    result, rows = _dist_output(d, _edges(a.bins))
    lines = [f"random model k={a.k} P={a.cutoff} n={a.n} seed={a.seed}: zero fraction "
             f"{fmt(d.zero_fraction())}, mean {fmt(d.mean())}"]
    return lines, result, rows


def cmd_ks_compare(a):
    d = empirical_distribution(a.k, a.h, a.cutoff, shards=a.shards)
    mc = sample_random_singular(MonteCarloConfig(a.k, a.mc_cutoff, a.n, a.seed), shards=a.shards)
    ks = ks_distance(d, mc)
    return [f"KS(tuple sweep h={a.h}, random model n={a.n}) = {fmt(ks)}"], {"ks": ks}, None


def cmd_compose_check(a):
    F = PolyFamily.parse(a.family, assume_irreducible=a.assume_irreducible)
    h = KTuple.parse(a.tuple)
    G = compose(F, h)
    g = degeneracy_graph(F, h)
    prim = composed_is_primitive(F, h)
    res = d1_resultant(F, h)
    lines = [f"f o h = ({G})", f"primitive: {prim}  (c={g.c}, d={g.d}, edges {sorted(g.edge_set)})",
             f"D1 resultant nonzero: {res != 0}"]
    return lines, {"composed": [str(f) for f in G.members], "primitive": prim,
                   "base_primitive": bool(is_primitive_family(F)), "c": g.c, "d": g.d,
                   "edges": sorted(g.edge_set), "d1_nonzero": res != 0}, None


def cmd_seeds(a):
    F = PolyFamily.parse(a.family, assume_irreducible=a.assume_irreducible)
    n = count_prime_seeds(F, a.N)
    return [f"pi({a.N}; {F}) = {n}"], {"count": n}, None


def cmd_poisson(a):
    F = PolyFamily.parse(a.family, assume_irreducible=a.assume_irreducible)
    w = window_counts(F, a.N, a.lam, a.mode, a.cutoff)
    fit = poisson_fit(w)
    rows = [(r, r + 1, int(c)) for r, c in enumerate(w.histogram)]
    lines = [f"{w.windows} {w.mode} windows of length {w.L} (delta {fmt(w.delta)})"
             + ("  [serially correlated]" if w.serially_correlated else ""),
             f"mean {fmt(fit.mean)}  variance {fmt(fit.variance)}  target {fmt(fit.lambda_target)}",
             f"TV to Poisson {fmt(fit.tv)}  chi2 {fmt(fit.chi2)} on {fit.dof} dof"]
    for r, c in enumerate(w.histogram):
        lines.append(f"  r={r}: {int(c)}")
    result = {"L": w.L, "delta": w.delta, "windows": w.windows, "histogram": w.histogram,
              "mean": fit.mean, "variance": fit.variance, "tv": fit.tv, "chi2": fit.chi2,
              "dof": fit.dof, "seeds_in_windows": w.seeds_in_windows}
    return lines, result, rows


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="singseries", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--replay", metavar="JSON", help="re-run a recorded JSON artifact and compare")
    sub = parser.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the artifact here")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--shards", type=_positive_int, default=1, help="worker processes")

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    def family_opts(p):
        p.add_argument("--family", required=True, help='comma-separated polynomials, e.g. "x,2x+1"')
        p.add_argument("--assume-irreducible", action="store_true",
                       help="accept members of degree >= 4 without an irreducibility proof")

    p = add("sing-tuple", cmd_sing_tuple, "singular series of a k-tuple")
    p.add_argument("--tuple", required=True)
    p.add_argument("--cutoff", type=_positive_int, default=10 ** 6)
    p.add_argument("--slow", action="store_true", help="multiply every local factor directly")

    p = add("sing-family", cmd_sing_family, "singular series of a polynomial family")
    family_opts(p)
    p.add_argument("--cutoff", type=_positive_int, default=10 ** 6)

    p = add("moment", cmd_moment, "moment constant mu_k(m)")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--cutoff", type=_positive_int, default=10 ** 6)

    p = add("nonvanish", cmd_nonvanish, "exact probability that the series is nonzero")
    p.add_argument("--k", type=_positive_int, required=True)

    p = add("empirical-moment", cmd_empirical_moment, "average of S(h)^m over tuples")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--h", type=_positive_int, required=True)
    p.add_argument("--cutoff", type=_positive_int, default=10 ** 6)

    p = add("distribution", cmd_distribution, "histogram of S(h) over tuples")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--h", type=_positive_int, required=True)
    p.add_argument("--cutoff", type=_positive_int, default=10 ** 6)
    p.add_argument("--bins", default="0:8:0.1", help="lo:hi:width")

    p = add("mc-sample", cmd_mc_sample, "samples of the random residue model")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--cutoff", type=_positive_int, default=1000)
    p.add_argument("--n", type=_positive_int, default=10 ** 5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", default="0:8:0.1", help="lo:hi:width")

    p = add("ks-compare", cmd_ks_compare, "KS distance between tuple sweep and random model")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--h", type=_positive_int, required=True)
    p.add_argument("--cutoff", type=_positive_int, default=10 ** 6, help="cutoff for the tuple sweep")
    p.add_argument("--mc-cutoff", type=_positive_int, default=1000)
    p.add_argument("--n", type=_positive_int, default=10 ** 5)
    p.add_argument("--seed", type=int, default=0)

    p = add("compose-check", cmd_compose_check, "primitivity and degeneracy of f o h")
    family_opts(p)
    p.add_argument("--tuple", required=True)

    p = add("seeds", cmd_seeds, "count prime seeds n <= N")
    family_opts(p)
    p.add_argument("--N", type=_positive_int, required=True)

    p = add("poisson", cmd_poisson, "seed counts in short windows against Poisson")
    family_opts(p)
    p.add_argument("--N", type=_positive_int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--mode", choices=("disjoint", "sliding"), default="disjoint")
    p.add_argument("--cutoff", type=_positive_int, default=10 ** 6)
    return parser


def parameters_of(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_PARAMETERS}


def _output_path(args):
    base = os.environ.get(ENV_OUTPUT_DIR)
    if args.out:
        path = Path(args.out)
        return Path(base) / path if base and not path.is_absolute() else path
    if base:
        return Path(base) / f"{args.command}.{args.format}"
    return None


def run(args):
    """Execute parsed arguments; returns (summary lines, JSON record, csv rows)."""
    lines, result, rows = args.func(args)
    return lines, make_record(args.command, parameters_of(args), result), rows


def _emit(args, record, rows):
    path = _output_path(args)
    if path is None:
        return
    if args.format == "json":
        write_json(path, record)
    elif rows is not None:
        write_csv(path, rows)
    else:
        write_csv(path, sorted((k, v) for k, v in record["result"].items()
                               if not isinstance(v, (list, dict))), header=("field", "value"))
    print(f"wrote {path}")


def _replay(parser, path):
    record = read_json(path)
    argv = [record["command"]]
    sub_args = parser.parse_args(argv + _argv_from_parameters(parser, record))
    _, fresh, _ = run(sub_args)
    same = fresh["result"] == record["result"]
    print(f"replay of {path}: {'identical' if same else 'DIFFERENT'}")
    return 0 if same else REPLAY_MISMATCH


def _argv_from_parameters(parser, record):
    argv = []
    for key, value in record["parameters"].items():
        flag = "--lambda" if key == "lam" else "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        else:
            argv += [flag, str(value)]
    return argv


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.replay:
            return _replay(parser, args.replay)
        if args.command is None:
            parser.print_help()
            return 2
        lines, record, rows = run(args)
        for line in lines:
            print(line)
        _emit(args, record, rows)
        return 0
    except SingSeriesError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
