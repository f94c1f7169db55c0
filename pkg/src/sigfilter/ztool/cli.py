"""Command-line entry point: ``sigfilter <subcommand> [flags]``.

Results print as ``key=value`` lines with 10 significant digits.  Exit
status is 0 on success, 1 for domain or data errors (one line on stderr,
``error: <code>: <detail>``) and 2 for usage errors.
"""
from __future__ import annotations

import argparse
import math
import sys

from .. import coverage as cov
from .. import mc_oracle as mc
from .. import selection as sel
from .. import shrinkage as shr
from ..errors import DomainError, QuadratureError
from .figures import emit_figure, fmt, histogram, write_zrecords_csv
from .ingest import IngestConfig, ZRecord, ingest_csv


def _emit(out, **pairs):
    for k, v in pairs.items():
        out.write(f"{k}={fmt(v) if not isinstance(v, str) else v}\n")


def _rule(args):
    if args.c is not None:
        return sel.SelectionRule.from_c(args.c)
    return sel.SelectionRule.from_alpha(args.alpha)


def parse_density(text):
    """``exp:RATE``, ``halfnormal:SCALE`` or ``uniform:UPPER``."""
    family, _, value = text.partition(":")
    try:
        x = float(value)
    except ValueError:
        raise DomainError(f"bad density spec {text!r}", code="usage") from None
    makers = {"exp": cov.SnrDensity.exponential, "halfnormal": cov.SnrDensity.half_normal,
              "uniform": cov.SnrDensity.uniform}
    if family not in makers:
        raise DomainError(f"unknown density family {family!r}", code="usage")
    return makers[family](x)


def cmd_bias(args, out, err):
    rule = _rule(args)
    snr = abs(args.beta) / args.se
    exag = sel.exaggeration_factor(snr, rule.c)
    _emit(out, c=rule.c, snr=snr,
          conditional_bias=sel.conditional_bias(args.beta, args.se, rule),
          relative_bias="inf" if math.isinf(exag) else exag - 1.0,
          exaggeration_factor="inf" if math.isinf(exag) else exag)


def cmd_power(args, out, err):
    if (args.snr is None) == (args.power is None):
        raise DomainError("give exactly one of --snr or --power", code="usage")
    if args.snr is not None:
        _emit(out, snr=args.snr, power=sel.power_from_snr(args.snr, args.alpha))
    else:
        _emit(out, power=args.power, snr=sel.snr_from_power(args.power, args.alpha))


def cmd_coverage(args, out, err):
    c = args.c if args.c is not None else sel.SelectionRule.from_alpha(args.alpha).c
    rep = cov.conditional_coverage(args.snr, args.alpha, c)
    _emit(out, nominal=rep.nominal, conditional=rep.conditional, gap=rep.gap)


def cmd_coverage_marginal(args, out, err):
    rep = cov.marginal_conditional_coverage(parse_density(args.density), args.alpha, args.c)
    _emit(out, nominal=rep.nominal, conditional=rep.conditional, gap=rep.gap)


def cmd_shrink(args, out, err):
    prior = shr.NormalPrior(args.tau)
    post = shr.posterior(sel.EffectEstimate(args.b, args.se), prior)
    e_shrunk, e_beta, e_b = shr.marginal_abs_means(args.se, prior)
    over, under = shr.bias_comparison(args.se, prior)
    _emit(out, b_star=post.b_star, v=post.v, s=post.s,
          posterior_abs_gap=shr.posterior_abs_gap(post),
          mean_abs_b_star=e_shrunk, mean_abs_beta=e_beta, mean_abs_b=e_b,
          overshoot=over, undershoot=under)
    if args.c is not None:
        _emit(out, selected_shrinkage_gap=shr.selected_shrinkage_gap(args.se, prior, args.c))


def cmd_simulate(args, out, err):
    cfg = mc.McConfig(n_draws=args.n, seed=args.seed, n_streams=args.streams)
    if args.scenario == "fixed":
        rule = sel.SelectionRule.from_c(args.c)
        what = args.what or "abs_bias"
        est = mc.simulate_fixed_beta(args.beta, args.se, rule, what, cfg, alpha=args.alpha)
        if what == "abs_bias":
            ref = sel.conditional_bias(args.beta, args.se, rule)
        else:
            ref = cov.conditional_coverage(abs(args.beta) / args.se, args.alpha, args.c).conditional
    elif args.scenario == "hier":
        prior = shr.NormalPrior(args.tau)
        rule = sel.SelectionRule.from_c(args.c)
        what = args.what or "shrunk_gap"
        if what == "marginal_means":
            raise DomainError("simulate prints one estimate; use raw_gap or shrunk_gap",
                              code="usage")
        est = mc.simulate_hierarchical(args.se, prior, rule, what, cfg,
                                       tail_sampling=args.tail_sampling)
        c_b = args.c * args.se
        ref = (shr.selected_shrinkage_gap(args.se, prior, c_b) if what == "shrunk_gap"
               else shr.selected_raw_gap(args.se, prior, c_b))
    else:
        rule = sel.SelectionRule.from_c(args.c)
        density = parse_density(args.density)
        est = mc.simulate_snr_prior(density, args.alpha, rule, cfg)
        ref = cov.marginal_conditional_coverage(density, args.alpha, args.c).conditional
    rep = mc.compare(ref, est, args.k_sigma)
    _emit(out, mean=est.mean, std_error=est.std_error, n_selected=est.n_selected,
          n_draws=est.n_draws, closed_form=ref, verdict="pass" if rep.passed else "fail",
          margin=rep.margin)


def cmd_ingest(args, out, err):
    cfg = IngestConfig(lower=args.lower_col, upper=args.upper_col,
                       estimate=args.estimate_col or None, id=args.id_col or None,
                       scale=args.scale, level=args.level, delimiter=args.delimiter,
                       min_abs_z=args.min_abs_z, max_abs_z=args.max_abs_z)
    res = ingest_csv(args.input, cfg)
    write_zrecords_csv(res.records, args.out)
    _emit(out, records=len(res.records), rejects=len(res.rejects), filtered=res.filtered)
    for line, reason in res.rejects:
        err.write(f"reject: line {line}: {reason}\n")


def _read_z_csv(path):
    import csv
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if rows and "z" not in rows[0]:
        raise DomainError(f"{path} has no z column", code="config")
    return [ZRecord(z=float(r["z"]), source_id=r.get("source_id", "")) for r in rows]


def cmd_figure(args, out, err):
    if args.kind == "zhist":
        if not args.input:
            raise DomainError("--kind zhist needs --input", code="usage")
        data = histogram(_read_z_csv(args.input), args.mode, args.bin_width, (args.lo, args.hi))
    else:
        data = sel.exaggeration_curve(args.snr_min, args.snr_max, args.n_points, args.alpha)
    emit_figure(data, args.format, args.out)
    _emit(out, wrote=str(args.out))


def build_parser():
    p = argparse.ArgumentParser(prog="sigfilter",
                                description="Significance-filter bias, coverage and shrinkage.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bias", help="conditional bias and exaggeration at fixed beta, se")
    b.add_argument("--beta", type=float, required=True)
    b.add_argument("--se", type=float, required=True)
    b.add_argument("--c", type=float)
    b.add_argument("--alpha", type=float, default=0.05)
    b.set_defaults(func=cmd_bias)

    pw = sub.add_parser("power", help="power from SNR or SNR from power")
    pw.add_argument("--snr", type=float)
    pw.add_argument("--power", type=float)
    pw.add_argument("--alpha", type=float, default=0.05)
    pw.set_defaults(func=cmd_power)

    cv = sub.add_parser("coverage", help="conditional coverage at fixed SNR")
    cv.add_argument("--snr", type=float, required=True)
    cv.add_argument("--alpha", type=float, default=0.05)
    cv.add_argument("--c", type=float)
    cv.set_defaults(func=cmd_coverage)

    cm = sub.add_parser("coverage-marginal", help="coverage averaged over an SNR density")
    cm.add_argument("--density", required=True, help="exp:RATE | halfnormal:SCALE | uniform:UPPER")
    cm.add_argument("--alpha", type=float, default=0.05)
    cm.add_argument("--c", type=float, required=True)
    cm.set_defaults(func=cmd_coverage_marginal)

    sh = sub.add_parser("shrink", help="posterior mean and shrinkage gaps")
    sh.add_argument("--b", type=float, required=True)
    sh.add_argument("--se", type=float, required=True)
    sh.add_argument("--tau", type=float, required=True)
    sh.add_argument("--c", type=float, help="threshold on |b| for the selected gap")
    sh.set_defaults(func=cmd_shrink)

    sm = sub.add_parser("simulate", help="Monte Carlo check against the closed form")
    sm.add_argument("--scenario", choices=("fixed", "hier", "snrprior"), required=True)
    sm.add_argument("--what", choices=("abs_bias", "coverage", "raw_gap", "shrunk_gap"))
    sm.add_argument("--beta", type=float, default=0.0)
    sm.add_argument("--se", type=float, default=1.0)
    sm.add_argument("--tau", type=float, default=1.0)
    sm.add_argument("--c", type=float, default=1.959963984540054)
    sm.add_argument("--alpha", type=float, default=0.05)
    sm.add_argument("--density", default="exp:1")
    sm.add_argument("--tail-sampling", action="store_true")
    sm.add_argument("--n", type=int, default=1_000_000)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--streams", type=int, default=1)
    sm.add_argument("--k-sigma", type=float, default=4.0)
    sm.set_defaults(func=cmd_simulate)

    ig = sub.add_parser("ingest", help="confidence-interval CSV to z-value CSV")
    ig.add_argument("--input", required=True)
    ig.add_argument("--out", required=True)
    ig.add_argument("--scale", choices=("linear", "ratio"), default="linear")
    ig.add_argument("--level", type=float, default=0.95)
    ig.add_argument("--delimiter", default=",")
    ig.add_argument("--lower-col", default="lower")
    ig.add_argument("--upper-col", default="upper")
    ig.add_argument("--estimate-col", default="estimate")
    ig.add_argument("--id-col", default="id")
    ig.add_argument("--min-abs-z", type=float)
    ig.add_argument("--max-abs-z", type=float)
    ig.set_defaults(func=cmd_ingest)

    fg = sub.add_parser("figure", help="histogram or exaggeration-curve data")
    fg.add_argument("--kind", choices=("zhist", "exaggeration"), required=True)
    fg.add_argument("--format", choices=("csv", "svg"), default="csv")
    fg.add_argument("--out", required=True)
    fg.add_argument("--input", help="z-value CSV from `ingest` (zhist)")
    fg.add_argument("--mode", choices=("signed", "absolute"), default="signed")
    fg.add_argument("--bin-width", type=float, default=0.5)
    fg.add_argument("--lo", type=float, default=-10.0)
    fg.add_argument("--hi", type=float, default=10.0)
    fg.add_argument("--snr-min", type=float, default=0.1)
    fg.add_argument("--snr-max", type=float, default=5.0)
    fg.add_argument("--n-points", type=int, default=50)
    fg.add_argument("--alpha", type=float, default=0.05)
    fg.set_defaults(func=cmd_figure)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out, err)
    except (DomainError, QuadratureError) as exc:
        if getattr(exc, "code", "") == "usage":
            parser.print_usage(err)
            err.write(f"error: usage: {exc.detail}\n")
            return 2
        err.write(f"error: {exc.code}: {exc.detail}\n")
        return 1
    except OSError as exc:
        err.write(f"error: io: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
