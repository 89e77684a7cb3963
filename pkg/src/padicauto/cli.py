"""Command line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or input-format error,
3 I/O error.  Data goes to stdout (or --out), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import codec
from .affine import AffineParams, synth_affine
from .analysis import detect_lines, intercept_clusters, squaring_growth, verify_affine
from .links import predict_affine, predict_const, psi_family
from .padic import PAdicRational, format_fraction, is_prime, parse_fraction
from .plot import BudgetExceeded, export, layers, monna_points, read_csv, to_csv
from .transducer import adder, components, compose, run
from .vanderput import TransducerOracle, coefficient_ids, kernel_probe, vdp_coeffs, vdp_coeffs_mod


class UsageError(Exception):
    pass


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _fraction(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _padic(q: Fraction, p: int, name: str) -> PAdicRational:
    try:
        return PAdicRational.of(q, p)
    except ValueError:
        raise UsageError(f"--{name} {format_fraction(q)}: denominator not coprime to p={p}") from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _digits_msb(text: str, p: int) -> list[int]:
    """An MSB-first digit string to an LSB-first word."""
    digits = []
    for ch in text.strip():
        if not ch.isdigit() or int(ch) >= p:
            raise UsageError(f"bad digit {ch!r} for p={p} in {text!r}")
        digits.append(int(ch))
    return digits[::-1]


def _word_msb(word) -> str:
    return "".join(str(d) for d in reversed(word))


def cmd_synth(args) -> int:
    T = synth_affine(_padic(args.a, args.p, "a"), _padic(args.b, args.p, "b"))
    _emit(codec.save(T), args.out)
    return 0


def cmd_run(args) -> int:
    T = codec.read(args.machine)
    words = [_digits_msb(w, T.prime) for w in args.input]
    outs = run(T, words)
    _emit("".join(_word_msb(w) + "\n" for w in outs), args.out)
    return 0


def cmd_components(args) -> int:
    T = codec.read(args.machine)
    rep = components(T)
    lines = [f"states: {T.n_states}", f"components: {rep.n_components}",
             f"ergodic: {' '.join(map(str, sorted(rep.ergodic)))}",
             f"transient: {' '.join(map(str, sorted(rep.transient_states)))}",
             f"minimal: {'yes' if rep.is_minimal else 'no'}"]
    lines += [f"component {c}: {' '.join(map(str, rep.members(c)))}" for c in sorted(set(rep.scc_of))]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_compose(args) -> int:
    A, B = codec.read(args.first), codec.read(args.second)
    _emit(codec.save(compose(A, B)), args.out)
    return 0


def cmd_adder(args) -> int:
    _emit(codec.save(adder(args.p)), args.out)
    return 0


def _plot(args):
    T = codec.read(args.machine)
    ks = range(args.k, args.k + args.width)
    return T, layers(T, ks, args.mode, seed=args.seed, budget=args.budget, surface=args.surface)


def cmd_plot(args) -> int:
    _, ps = _plot(args)
    if args.format == "csv" and not args.out:
        sys.stdout.write(to_csv(ps))
    elif not args.out:
        raise UsageError(f"--format {args.format} needs --out")
    else:
        export(ps, args.format, args.out, res=args.res)
    return 0


def cmd_monna(args) -> int:
    T = codec.read(args.machine)
    pts = monna_points(T, args.k, args.mode, seed=args.seed, budget=args.budget)
    _emit("".join(f"{format_fraction(x)},{format_fraction(y)}\n" for x, y in pts), args.out)
    return 0


def cmd_predict(args) -> int:
    p = args.p
    a, b = _padic(args.a, p, "a"), _padic(args.b, p, "b")
    pred = predict_const(b) if a.num == 0 else predict_affine(a, b)
    psi = psi_family(a, b)
    lines = [f"p: {p}", f"slope: {a}", f"shape: {'parallels' if pred.is_parallels else 'link'}",
             f"m: {pred.m}", f"knots: {pred.knot_count}",
             f"winding: {pred.winding[0]} {pred.winding[1]}",
             "intercepts: " + " ".join(format_fraction(e) for e in pred.intercepts),
             "offsets: " + " ".join(format_fraction(e) for e in pred.full_offsets),
             "psi phases: " + " ".join(format_fraction(e) for e in psi.phases)]
    _emit("\n".join(lines) + "\n", args.out)
    if args.svg:
        pts = None
        if args.points:
            with open(args.points, encoding="utf-8") as fh:
                pts = read_csv(fh.read(), p)
        export(pts, "svg", args.svg, res=args.res,
               cables=[(a.fraction, e) for e in pred.intercepts])
    return 0


def cmd_verify(args) -> int:
    T = codec.read(args.machine)
    p = T.prime
    a, b = _padic(args.a, p, "a"), _padic(args.b, p, "b")
    params = AffineParams.of(a, b, p)
    rep = verify_affine(T, params, range(args.kmin, args.kmax + 1), budget=args.budget)
    lines = [f"congruence: {'pass' if rep.exact_congruence_pass else 'fail'}"]
    if rep.first_failure:
        lines.append(f"first failure: k={rep.first_failure[0]} X={rep.first_failure[1]}")
    lines.append(f"predicted knots: {rep.prediction.knot_count}")
    lines.append(f"cables hit: {rep.empirical_knot_count}")
    for k in sorted(rep.distances):
        lines.append(f"k={k} distance {format_fraction(rep.distances[k])}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if rep.exact_congruence_pass else 1


def cmd_detect(args) -> int:
    if args.points:
        with open(args.points, encoding="utf-8") as fh:
            ps = read_csv(fh.read(), args.p)
    elif args.machine:
        _, ps = _plot(args)
    else:
        raise UsageError("detect needs --points or --machine")
    cands = detect_lines(ps, args.max_num, args.max_den, args.tol)
    lines = [f"lines: {len(cands)}"]
    for c in cands:
        lines.append(f"slope {format_fraction(c.slope)} knots {c.knot_count} "
                     f"support {format_fraction(c.support)} residual {format_fraction(c.residual)} "
                     "intercepts " + " ".join(format_fraction(e) for e in c.intercepts))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_clusters(args) -> int:
    with open(args.points, encoding="utf-8") as fh:
        ps = read_csv(fh.read(), args.p)
    rep = intercept_clusters(ps, args.slope, args.tol)
    lines = [f"clusters: {rep.count}"] + [
        f"center {format_fraction(c.center)} extent {format_fraction(c.extent)} mass {c.mass}" for c in rep.clusters]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _fmt_value(v) -> str:
    return "" if v is None else format_fraction(v) if isinstance(v, Fraction) else str(v)


def cmd_vdp(args) -> int:
    T = codec.read(args.machine)
    if args.modular:
        coeffs = vdp_coeffs_mod(TransducerOracle(T), args.mmax, args.precision)
    else:
        coeffs = vdp_coeffs(T, args.mmax)
    rows = ["m,B_m,b_m"] + [f"{c.m},{_fmt_value(c.B)},{_fmt_value(c.b)}" for c in coeffs]
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def cmd_kernel(args) -> int:
    T = codec.read(args.machine)
    p = T.prime
    ids, values, _ = coefficient_ids(T, p ** (args.depth + 1) * args.prefix)
    rep = kernel_probe(ids, p, args.depth, args.prefix, args.max_alphabet)
    lines = [f"status: {rep.status}", f"classes: {rep.n_classes}", f"depth: {rep.depth_j}",
             f"prefix: {rep.prefix_len}", f"alphabet: {len(values)}",
             f"alphabet overflow: {'yes' if rep.alphabet_overflow else 'no'}",
             "representatives: " + " ".join(f"({j},{t})" for j, t in rep.classes)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_squaring(args) -> int:
    rows = squaring_growth(args.M, args.p)
    _emit("j,count\n" + "".join(f"{j},{c}\n" for j, c in rows), args.out)
    return 0


def cmd_export(args) -> int:
    with open(args.points, encoding="utf-8") as fh:
        ps = read_csv(fh.read(), args.p)
    cables = []
    for spec in args.cable:
        slope, _, intercept = spec.partition(":")
        cables.append((_fraction(slope), _fraction(intercept or "0")))
    export(ps, args.format, args.out, res=args.res, cables=cables)
    return 0


def _add_plot_flags(sp, required: bool = True) -> None:
    sp.add_argument("--machine", required=required)
    sp.add_argument("--k", type=int, default=16)
    sp.add_argument("--width", type=_positive, default=1, help="number of consecutive layers")
    sp.add_argument("--mode", default="exhaustive", help="exhaustive or sample:N")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=1 << 24)
    sp.add_argument("--surface", default="torus", choices=["square", "torus", "cylinder-x", "cylinder-y"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padicauto", description="p-adic automaton functions, plots and links")
    ap.add_argument("--jobs", type=_positive, default=1, help="worker count (results do not depend on it)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("synth", help="automaton for z -> a z + b")
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--a", type=_fraction, required=True)
    sp.add_argument("--b", type=_fraction, required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_synth)

    sp = sub.add_parser("run", help="run a machine on MSB-first digit strings")
    sp.add_argument("--machine", required=True)
    sp.add_argument("--input", action="append", required=True, help="one per input tape")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("components", help="strongly connected and ergodic components")
    sp.add_argument("--machine", required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_components)

    sp = sub.add_parser("compose", help="feed the first machine's output into the second")
    sp.add_argument("--first", required=True)
    sp.add_argument("--second", required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_compose)

    sp = sub.add_parser("adder", help="the two-input adder")
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_adder)

    sp = sub.add_parser("plot", help="plot layers as exact points")
    _add_plot_flags(sp)
    sp.add_argument("--format", default="csv", choices=["csv", "pgm", "svg"])
    sp.add_argument("--res", type=int, default=256)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_plot)

    sp = sub.add_parser("monna", help="Monna-graph points")
    sp.add_argument("--machine", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mode", default="exhaustive")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=1 << 24)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_monna)

    sp = sub.add_parser("predict", help="predicted limit plot of z -> a z + b")
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--a", type=_fraction, required=True)
    sp.add_argument("--b", type=_fraction, required=True)
    sp.add_argument("--svg")
    sp.add_argument("--points", help="plot CSV drawn under the cables")
    sp.add_argument("--res", type=int, default=256)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_predict)

    sp = sub.add_parser("verify", help="exact check of a machine against a z + b")
    sp.add_argument("--machine", required=True)
    sp.add_argument("--a", type=_fraction, required=True)
    sp.add_argument("--b", type=_fraction, required=True)
    sp.add_argument("--kmin", type=int, default=4)
    sp.add_argument("--kmax", type=int, default=14)
    sp.add_argument("--budget", type=int, default=1 << 24)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("detect", help="rational-slope cables in a plot")
    sp.add_argument("--points")
    _add_plot_flags(sp, required=False)
    sp.set_defaults(width=6)
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--max-num", type=int, default=8)
    sp.add_argument("--max-den", type=_positive, default=8)
    sp.add_argument("--tol", type=_fraction, default=Fraction(1, 256))
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_detect)

    sp = sub.add_parser("clusters", help="intercept clusters of a plot for one slope")
    sp.add_argument("--points", required=True)
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--slope", type=_fraction, required=True)
    sp.add_argument("--tol", type=_fraction, default=Fraction(1, 256))
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_clusters)

    sp = sub.add_parser("vdp", help="van der Put coefficients as CSV")
    sp.add_argument("--machine", required=True)
    sp.add_argument("--mmax", type=_positive, default=64)
    sp.add_argument("--precision", type=_positive, default=64)
    sp.add_argument("--modular", action="store_true", help="residues mod p^precision instead of exact values")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_vdp)

    sp = sub.add_parser("kernel", help="bounded p-kernel probe of the b_m sequence")
    sp.add_argument("--machine", required=True)
    sp.add_argument("--depth", type=_positive, default=6)
    sp.add_argument("--prefix", type=_positive, default=1024)
    sp.add_argument("--max-alphabet", type=_positive, default=256)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_kernel)

    sp = sub.add_parser("squaring", help="growth of the squaring coefficient set")
    sp.add_argument("--M", type=_positive, default=1 << 16)
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_squaring)

    sp = sub.add_parser("export", help="convert a plot CSV to pgm/svg/csv")
    sp.add_argument("--points", required=True)
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--format", required=True, choices=["csv", "pgm", "svg"])
    sp.add_argument("--res", type=int, default=256)
    sp.add_argument("--cable", action="append", default=[], help="slope:intercept overlay")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_export)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except codec.CodecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, BudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


run_cli = main

if __name__ == "__main__":
    sys.exit(main())
