"""Command-line interface: one subcommand per verification artifact.

Exit codes: 0 all checks in the run passed, 1 a verification failed,
2 usage error, 3 numerically inconclusive (error budget exhausted the
margin).  Computation-only commands exit 0 unless arguments are invalid.
"""

from __future__ import annotations

import argparse
import json
import sys

import mpmath as mp
import numpy as np

from . import analysis, certificates, lag_chain, sequences
from .exactmat import canonicalize, random_admissible_word, word_product
from .spectral import DEFAULT_EPSILON, named_constants

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("..")
    return int(lo), int(hi)


def cmd_gen(args) -> int:
    seq = sequences.generate(args.n, args.which)
    if args.out:
        sequences.write_coefficients(args.out, seq)
    else:
        print(" ".join("+1" if c > 0 else "-1" for c in seq.coeffs))
    return EXIT_OK


def cmd_autocorr(args) -> int:
    seq = sequences.generate(args.n, args.which)
    spec = sequences.autocorrelate(seq, args.method)
    if args.out:
        sequences.write_spectrum_csv(args.out, spec)
    else:
        print("k,value")
        for k, v in enumerate(spec.values):
            print(f"{k},{int(v)}")
    return EXIT_OK


def cmd_maxcoef(args) -> int:
    lo, hi = _parse_range(args.n_range)
    records = analysis.growth_table(lo, hi)
    slope = analysis.growth_slope(records)
    if args.csv:
        print("n,max_abs_a,argmax_k,max_abs_b,argmax_k_b,log2_ratio")
        for r in records:
            print(f"{r.n},{r.max_abs_a},{r.argmax_k},{r.max_abs_b},{r.argmax_k_b},{r.log2_ratio:.6f}")
    else:
        for r in records:
            print(f"n={r.n:3d}  max|a|={r.max_abs_a:10d} at k={r.argmax_k:<10d} "
                  f"max|b|={r.max_abs_b:10d} at k={r.argmax_k_b:<11d} log2/n={r.log2_ratio:.5f}")
        print(f"least-squares slope of log2 max|a_k| over n in [{lo},{hi}]: {slope:.5f}")
    return EXIT_OK


def cmd_verify_recursion(args) -> int:
    report = lag_chain.verify_recursion(args.n)
    for tau in (1, 2, 3, 4):
        print(f"class {tau}: {report['class_counts'][tau]} lags")
    ok = not report["mismatches"]
    print(f"{'PASS' if ok else 'FAIL'}: {report['total']} lags checked, "
          f"{len(report['mismatches'])} mismatches")
    if not ok:
        print(json.dumps(report["mismatches"][:10], default=str))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_factorization(args) -> int:
    failures = []
    trials = 0
    for length in range(2, args.max_len + 1, 2):
        for t in range(args.trials):
            word = random_admissible_word(length, seed=args.seed + 1009 * length + t)
            trials += 1
            form = canonicalize(word)
            m = word_product(word)
            ok = (form.matrix() == m and form.reduce().matrix() == m
                  and form.exponent_sum() == length)
            if not ok:
                failures.append({"word": word, "form": str(form)})
    print(f"{'PASS' if not failures else 'FAIL'}: {trials} words canonicalized, "
          f"{len(failures)} failures")
    if failures:
        print(json.dumps(failures[:10]))
    return EXIT_OK if not failures else EXIT_FAIL


def cmd_sweep(args) -> int:
    cert = certificates.sweep_lemma3(
        args.k, epsilon=args.epsilon, l_max=args.l_max,
        partitions=args.partitions, precision_mode=args.precision,
    )
    text = cert.to_json(args.out)
    if not args.out:
        print(text)
    else:
        print(f"certificate written to {args.out}: passed={cert.passed}")
    if cert.passed:
        return EXIT_OK
    if cert.max_ratio < 1.0 <= cert.max_ratio + cert.error_budget:
        return EXIT_INCONCLUSIVE
    return EXIT_FAIL


def cmd_lemma4(args) -> int:
    p = certificates.check_lemma4_powers(args.epsilon)
    m = certificates.check_lemma4_mixed(args.epsilon)
    if args.format == "json":
        print(json.dumps({"power": p.to_dict(), "mixed": m.to_dict()}, indent=2, default=float))
    else:
        print(f"power certificate : worst ratio {p.max_ratio:.9f} at l={p.argmax_l}, "
              f"l=1 norm {p.detail['l1_norm']:.9f}, passed={p.passed}")
        print(f"mixed certificate : worst ratio {m.max_ratio:.9f} at (l,k)={tuple(m.detail['worst_term'])}, "
              f"reduction {m.detail['reduction_norm']:.8f} < {m.detail['base_cubed']:.8f}, passed={m.passed}")
    return EXIT_OK if (p.passed and m.passed) else EXIT_FAIL


def cmd_eigen(args) -> int:
    nc = named_constants(args.epsilon)
    flat = {
        "epsilon": float(nc["epsilon"]),
        "lambda": mp.nstr(nc["lambda"], 15),
        "lambda_prime": mp.nstr(nc["lambda_prime"], 15),
        "alpha": mp.nstr(nc["alpha"], 12),
        "alpha_upper": mp.nstr(nc["alpha_upper"], 12),
        "growth_base": mp.nstr(nc["growth_base"], 15),
        "S_norm": mp.nstr(nc["S_norm"], 12),
        "S1_norm": mp.nstr(nc["S1_norm"], 12),
        "S1_inv_norm": mp.nstr(nc["S1_inv_norm"], 12),
        "S1_cond": mp.nstr(nc["S1_cond"], 12),
    }
    for k in (1, 2, 3):
        flat[f"c_even_{k}"] = mp.nstr(nc["c_even"][k], 12)
        flat[f"c_odd_{k}"] = mp.nstr(nc["c_odd"][k], 12)
        flat[f"threshold_even_{k}"] = mp.nstr(nc["threshold_even"][k], 12)
        flat[f"threshold_odd_{k}"] = mp.nstr(nc["threshold_odd"][k], 12)
    if args.format == "json":
        print(json.dumps(flat, indent=2))
    else:
        width = max(len(k) for k in flat)
        for key, val in flat.items():
            print(f"{key:<{width}}  {val}")
    return EXIT_OK


def cmd_lowerbound(args) -> int:
    trace = analysis.lower_bound_trace(args.parity, args.n_max)
    consistent = analysis.projection_reproduces_integers(trace)
    payload = {
        "parity": trace.parity,
        "levels": [trace.levels[0], trace.levels[-1]],
        "leading_constant": mp.nstr(trace.leading_constant, 12),
        "normalized_leading": mp.nstr(trace.normalized_leading, 12),
        "lambda_constants": [mp.nstr(c, 12) for c in trace.lam_const],
        "lambda_prime_constants": [mp.nstr(c, 12) for c in trace.lam_prime_const],
        "last_scaled_value": trace.lambda_scaled_values[-1],
        "projection_exact": consistent,
    }
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for key, val in payload.items():
            print(f"{key}: {val}")
    return EXIT_OK if consistent else EXIT_FAIL


def cmd_crossings(args) -> int:
    rep = analysis.crossing_count(args.n, args.eta, args.grid, refine=args.refine)
    print(json.dumps({
        "n": rep.n, "eta": rep.eta, "count": rep.count,
        "grid_size": rep.grid_size, "refined": rep.refined,
        "refine_width": rep.refine_width,
    }))
    return EXIT_OK


def cmd_l4(args) -> int:
    lo, hi = _parse_range(args.n_range)
    if args.csv:
        print("n,moment4,ratio_4n,m4")
        for n in range(lo, hi + 1):
            m4 = sequences.moment4(n)
            print(f"{n},{m4},{m4 / 4.0**n:.8f},{float(m4)**0.25:.6f}")
    else:
        for n in range(lo, hi + 1):
            m4 = sequences.moment4(n)
            print(f"n={n:3d}  moment4={m4:20d}  moment4/4^n={m4 / 4.0**n:.8f}")
    return EXIT_OK


def cmd_bound_word(args) -> int:
    words = []
    if args.word:
        words = [args.word]
    else:
        words = [random_admissible_word(args.length, seed=args.seed + t) for t in range(args.trials)]
    worst = 0.0
    ok = True
    for w in words:
        res = certificates.bound_word_norm(w, epsilon=args.epsilon, cap=args.cap)
        worst = max(worst, res.ratio)
        ok = ok and res.exponent_check
        if args.word:
            print(json.dumps({"length": res.word_length, "norm": res.norm,
                              "ratio": res.ratio, "cap": res.cap,
                              "exponent_check": res.exponent_check}))
    if not args.word:
        print(f"{'PASS' if ok else 'FAIL'}: {len(words)} words, worst ratio {worst:.6f} (cap {args.cap})")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rscorr", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="coefficient vector of P_n or Q_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--which", choices=("P", "Q"), default="P")
    p.add_argument("--out", help="write text coefficient file instead of stdout")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("autocorr", help="autocorrelation spectrum as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--which", choices=("P", "Q"), default="P")
    p.add_argument("--method", choices=("auto", "direct", "fft"), default="auto")
    p.add_argument("--out", help="CSV path (stdout otherwise)")
    p.set_defaults(fn=cmd_autocorr)

    p = sub.add_parser("maxcoef", help="per-level maxima and growth slope")
    p.add_argument("--n-range", required=True, metavar="A..B")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(fn=cmd_maxcoef)

    p = sub.add_parser("verify-recursion", help="matrix recursion vs convolution oracle")
    p.add_argument("--n", type=int, default=12)
    p.set_defaults(fn=cmd_verify_recursion)

    p = sub.add_parser("verify-factorization", help="canonical form vs direct products")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-len", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify_factorization)

    p = sub.add_parser("sweep", help="norm-bound sweep certificate")
    p.add_argument("--k", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--l-max", type=int, default=None)
    p.add_argument("--partitions", type=int, default=1)
    p.add_argument("--precision", choices=("double", "extended"),
                   default=certificates.DEFAULT_PRECISION_MODE)
    p.add_argument("--out", help="certificate JSON path")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("lemma4", help="fixed-power and mixed-product certificates")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=cmd_lemma4)

    p = sub.add_parser("eigen", help="spectral constants table")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=cmd_eigen)

    p = sub.add_parser("lowerbound", help="two-step recursion trace and constants")
    p.add_argument("--parity", choices=("even", "odd"), required=True)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=cmd_lowerbound)

    p = sub.add_parser("crossings", help="level-crossing lower bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--refine", action="store_true")
    p.set_defaults(fn=cmd_crossings)

    p = sub.add_parser("l4", help="fourth-moment table")
    p.add_argument("--n-range", required=True, metavar="A..B")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(fn=cmd_l4)

    p = sub.add_parser("bound-word", help="norm of admissible words vs growth bound")
    p.add_argument("--word")
    p.add_argument("--length", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--cap", type=float, default=8.0)
    p.set_defaults(fn=cmd_bound_word)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except sequences.RoundingMarginError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
