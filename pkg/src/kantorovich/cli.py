"""Command-line front end.

Kernel grammar (``--spec``)::

    fejer | vallee-poussin | mixed-sinc | c2 | steps | d2
    bspline:n=3[,shift=s]           central B-spline M_n, optionally M_n(x - s)
    bspline-shift:n=2[,shift=s]     M_n(x - s); s defaults to n/2 + 2 (support [2, n + 2])
    compound-bspline:n=2,alpha=0.3  (1 - alpha) M_n(x - n - 1) + alpha M_n(x + n)
    sigmoidal:gamma=1.5             phi_gamma (alias: phi, sigmoidal-phi)
    compound:alpha=0.3,a=[bspline:n=2],b=[bspline:n=3]

Signal grammar (``--signal``)::

    sin[:A,nu,phase] | const:c | step:t,left,right | heaviside
    ramp:lo,hi | removable:t,value | <path to a t,value CSV>

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import signals as sig
from .analysis import (NON_CONVERGENT, ScanError, divergence_experiment, error_bound,
                       jump_convergence_scan, rate_experiment)
from .kernels import (MOMENT_RADII, KernelError, KernelSpec, Truncation, choose_radius,
                      classify_jump_behavior, discrete_moment, kernel_table, make_kernel,
                      validate_kernel)
from .operators import (CausalityError, OperatorParams, generalized_sampling_eval,
                        kantorovich_series, predict_causal)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ParseError(ValueError):
    """Malformed kernel, signal, ladder or grid text."""


# ---------------------------------------------------------------------------
# grammars


def _split_top(text, sep=","):
    """Split on ``sep`` outside square brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced brackets in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ParseError(f"unbalanced brackets in {text!r}")
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _number(text, key):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{key}={text!r} is not a number") from None


def _integer(text, key):
    value = _number(text, key)
    if value != int(value):
        raise ParseError(f"{key}={text!r} is not an integer")
    return int(value)


_ALIASES = {"phi": "sigmoidal-phi", "sigmoidal": "sigmoidal-phi", "sigma": "sigmoidal-phi",
            "vp": "vallee-poussin", "de-la-vallee-poussin": "vallee-poussin"}
_ALLOWED = {
    "fejer": set(), "vallee-poussin": set(), "mixed-sinc": set(), "c2": set(),
    "steps": set(), "d2": set(),
    "bspline": {"n"}, "bspline-shift": {"n"}, "compound-bspline": {"n", "alpha"},
    "sigmoidal-phi": {"gamma"}, "compound": {"alpha", "a", "b"},
}


def parse_kernel_spec(text):
    """Parse the ``name:key=value,...`` grammar into a :class:`KernelSpec`."""
    text = text.strip()
    name, _, rest = text.partition(":")
    name = _ALIASES.get(name.strip().lower(), name.strip().lower())
    if name not in _ALLOWED:
        raise ParseError(f"unknown kernel {name!r}")
    opts = {}
    for item in _split_top(rest):
        key, eq, value = item.partition("=")
        key = key.strip().lower()
        if not eq:
            raise ParseError(f"expected key=value, got {item!r}")
        if key not in _ALLOWED[name] | {"shift"}:
            raise ParseError(f"kernel {name!r} does not take {key!r}")
        opts[key] = value.strip()
    shift = _number(opts.pop("shift"), "shift") if "shift" in opts else None
    try:
        if name in ("bspline", "bspline-shift"):
            if "n" not in opts:
                raise ParseError(f"{name} needs n")
            n = _integer(opts["n"], "n")
            if name == "bspline-shift" and shift is None:
                shift = n / 2.0 + 2.0
            return KernelSpec.bspline(n, shift or 0.0)
        if name == "compound-bspline":
            if not {"n", "alpha"} <= opts.keys():
                raise ParseError("compound-bspline needs n and alpha")
            spec = KernelSpec.compound_bspline(_integer(opts["n"], "n"), _number(opts["alpha"], "alpha"))
        elif name == "sigmoidal-phi":
            if "gamma" not in opts:
                raise ParseError("sigmoidal needs gamma")
            spec = KernelSpec.sigmoidal(_number(opts["gamma"], "gamma"))
        elif name == "compound":
            if not {"alpha", "a", "b"} <= opts.keys():
                raise ParseError("compound needs alpha, a=[...] and b=[...]")
            inner = []
            for key in ("a", "b"):
                body = opts[key]
                if not (body.startswith("[") and body.endswith("]")):
                    raise ParseError(f"{key} must be a bracketed kernel spec")
                inner.append(parse_kernel_spec(body[1:-1]))
            for s in inner:
                if not make_kernel(s).is_compact:
                    raise ParseError("compound parts must be compactly supported")
            spec = KernelSpec.compound(_number(opts["alpha"], "alpha"), *inner)
        else:
            spec = KernelSpec(name)
    except KernelError as exc:
        raise ParseError(str(exc)) from None
    if shift:
        spec = KernelSpec(spec.family, spec.n, spec.alpha, spec.gamma, shift, spec.parts)
    return spec


def parse_signal(text):
    text = text.strip()
    name, _, rest = text.partition(":")
    args = [_number(a, name) for a in rest.split(",")] if rest else []
    key = name.lower()
    arity = {"sin": (0, 3), "const": (1, 1), "step": (1, 3), "heaviside": (0, 0),
             "ramp": (2, 2), "removable": (0, 2)}
    if key in arity:
        lo, hi = arity[key]
        if not lo <= len(args) <= hi:
            raise ParseError(f"signal {key!r} takes {lo}..{hi} arguments")
        if key == "sin":
            return sig.sinusoid(*args)
        if key == "const":
            return sig.constant(*args)
        if key == "step":
            return sig.step(*args)
        if key == "heaviside":
            return sig.step(0.0, 0.0, 1.0)
        if key == "ramp":
            return sig.clamped_ramp(*args)
        return sig.removable(*args)
    if os.path.isfile(text):
        try:
            return sig.from_csv(text)
        except (sig.SignalError, IndexError) as exc:
            raise ParseError(f"{text}: {exc}") from None
    raise ParseError(f"unknown signal {text!r} (not a built-in name or an existing file)")


def parse_ladder(text):
    """``lo:hi:factor`` -> geometric ladder lo, lo*factor, ... <= hi."""
    try:
        lo, hi, factor = (float(x) for x in text.split(":"))
    except ValueError:
        raise ParseError(f"bad ladder {text!r}; expected lo:hi:factor") from None
    if lo <= 0 or hi < lo or factor <= 1:
        raise ParseError("ladder needs 0 < lo <= hi and factor > 1")
    out, x = [], lo
    while x <= hi * (1 + 1e-12):
        out.append(x)
        x *= factor
    return out


def parse_grid(text):
    """``lo:hi:n`` -> n equispaced points including both ends."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise ParseError(f"bad grid {text!r}; expected lo:hi:n") from None
    if n < 1 or hi < lo:
        raise ParseError("grid needs n >= 1 and lo <= hi")
    return np.linspace(lo, hi, n)


def parse_mode(text):
    text = text.strip().lower()
    if text in ("integer", "unrestricted"):
        return text
    if text.startswith("fractional="):
        x = _number(text.split("=", 1)[1], "fractional")
        if not 0.0 < x < 1.0:
            raise ParseError("fractional mode needs x in (0, 1)")
        return x
    raise ParseError(f"bad mode {text!r}")


def parse_floats(text):
    return [_number(x, "list") for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------------------
# output


def _clean(value):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(_clean(payload), fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write("\n")


def _truncation(args):
    return Truncation(tol=args.trunc_tol) if args.trunc_tol else Truncation()


def _provenance(args, kernel, trunc):
    radius, bound = choose_radius(kernel, trunc, weighted=True)
    return {
        "kernel": kernel.name,
        "support": repr(kernel.support),
        "truncation_tolerance": trunc.tolerance_for(kernel),
        "truncation_radius": radius,
        "truncation_tail_bound": bound,
        "tolerance": args.tol,
        "seed": args.seed,
    }


# ---------------------------------------------------------------------------
# commands


def cmd_kernel(args):
    spec = parse_kernel_spec(args.spec)
    kernel = make_kernel(spec)
    trunc = _truncation(args)
    xs = parse_grid(args.grid)
    run_validate = args.validate or not (args.classify or args.moments)
    rows = kernel_table(kernel, xs, trunc)
    write_csv(os.path.join(args.out, "kernel_table.csv"), ["x", "chi", "psi_minus", "psi_plus"], rows)

    payload = {"provenance": _provenance(args, kernel, trunc), "table_grid": args.grid}
    ok = True
    if run_validate:
        tol = args.tol if args.tol is not None else (1e-10 if kernel.is_compact else 1e-6)
        report = validate_kernel(kernel, tolerance=tol, truncation=trunc, grid=args.u_grid)
        payload["validation"] = report.as_dict()
        ok &= report.passed
    if args.classify:
        cls = classify_jump_behavior(kernel, grid=args.u_grid, truncation=trunc)
        payload["classification"] = {"kind": cls.kind, "alpha": cls.alpha, "chi0": cls.chi0,
                                     "psi_spread": cls.psi_spread, "label": str(cls)}
    if args.moments:
        payload["moments"] = [_moment_payload(discrete_moment(kernel, b, MOMENT_RADII, args.u_grid))
                              for b in parse_floats(args.beta or "0,0.5")]
    payload["passed"] = bool(ok)
    write_json(os.path.join(args.out, "validation.json"), payload)
    _say(args, f"{kernel.name}: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def _moment_payload(m):
    return {"beta": m.beta, "value": None if m.diverging else m.value, "diverging": m.diverging,
            "radius": m.radius, "grid": m.grid, "last_ratio": m.last_ratio(),
            "ladder": [{"radius": r, "partial_sup": v} for r, v in m.ladder]}


def cmd_reconstruct(args):
    kernel = make_kernel(parse_kernel_spec(args.spec))
    signal = parse_signal(args.signal)
    if args.w is None:
        raise ParseError("reconstruct needs --w")
    trunc = _truncation(args)
    params = OperatorParams(args.w, trunc)
    grid = parse_grid(args.grid)
    header = ["t", "S_w_f"] + (["G_w_f"] if args.generalized else []) + ["f", "error"]
    if args.causal:
        header += ["k_lo", "k_hi"]
    rows, errors, tails = [], [], []
    for t in grid:
        t = float(t)
        if args.causal:
            try:
                pred = predict_causal(kernel, signal, t, params)
            except CausalityError as exc:
                _say(args, f"causality violated: {exc}", err=True)
                return EXIT_FAIL
            value, extra, tail = pred.value, [pred.k_lo, pred.k_hi], 0.0
        else:
            ev = kantorovich_series(kernel, signal, t, params)
            value, extra, tail = ev.value, [], ev.tail_bound
        truth = float(signal(t))
        row = [t, value]
        if args.generalized:
            row.append(generalized_sampling_eval(kernel, signal, t, params))
        row += [truth, value - truth] + extra
        rows.append(row)
        errors.append(abs(value - truth))
        tails.append(tail)
    write_csv(os.path.join(args.out, "reconstruction.csv"), header, rows)

    summary = {"provenance": _provenance(args, kernel, trunc), "signal": signal.name, "w": args.w,
               "grid": args.grid, "max_error": max(errors), "max_tail_bound": max(tails),
               "causal": bool(args.causal)}
    ok = True
    if args.beta is not None:
        beta = parse_floats(args.beta)[0]
        if not signal.uniformly_continuous:
            raise ParseError("--beta needs a uniformly continuous signal")
        bound = error_bound(kernel, signal, args.w, beta, seed=args.seed)
        summary["bound"] = {"beta": beta, "value": bound.value, "omega": bound.omega,
                            "omega_exact": bound.omega_exact, "m_beta": bound.m_beta,
                            "m_zero": bound.m_zero, "moment_radius": bound.moment_radius}
        ok = max(errors) <= bound.value
        summary["bound_ok"] = ok
    summary["passed"] = bool(ok)
    write_json(os.path.join(args.out, "summary.json"), summary)
    _say(args, f"max error {max(errors):.6g}: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def _jump_location(signal, t):
    if t is not None:
        return t
    jumps = [j for j in signal.jumps() if not j.removable]
    if not jumps:
        raise ParseError(f"signal {signal.name} has no jump; pass --t")
    return jumps[0].t


def _scan_rows(report):
    pred = None if report.predicted is NON_CONVERGENT else report.predicted
    return [[r.w, r.wt, r.value, r.reconstructed, pred, r.distance, r.tail_bound] for r in report.rows]


_SCAN_HEADER = ["w", "wt", "S_w_f", "decomposition", "predicted", "distance", "tail_bound"]


def exp_jump_scan(args, kernel, trunc):
    signal = parse_signal(args.signal or "step:1,0,1")
    t = _jump_location(signal, args.t)
    mode = parse_mode(args.mode)
    tol = args.tol if args.tol is not None else 1e-6
    ladder = [int(round(m)) for m in parse_ladder(args.w_ladder or "1:1024:2")]
    report = jump_convergence_scan(kernel, signal, t, ladder, mode,
                                   OperatorParams(1.0, trunc), tolerance=tol)
    write_csv(os.path.join(args.out, "jump_scan.csv"), _SCAN_HEADER, _scan_rows(report))
    nonconv = report.predicted is NON_CONVERGENT
    decomposition_ok = report.max_decomposition_defect <= max(1e-10, 100 * trunc.tolerance_for(kernel))
    ok = decomposition_ok and (nonconv or report.converged)
    return ok, {
        "signal": signal.name, "t": t, "mode": report.mode, "ladder": ladder,
        "classification": report.classification,
        "predicted": None if nonconv else report.predicted, "non_convergent": nonconv,
        "empirical_limit": report.empirical_limit, "converged": report.converged,
        "max_decomposition_defect": report.max_decomposition_defect, "decomposition_ok": decomposition_ok,
    }


def exp_divergence(args, kernel, trunc):
    signal = parse_signal(args.signal or "step:1,0,1")
    t = _jump_location(signal, args.t)
    fracs = tuple(parse_floats(args.fracs))
    if len(fracs) != 2 or not all(0 < x < 1 for x in fracs):
        raise ParseError("--fracs needs two values in (0, 1)")
    tol = args.tol if args.tol is not None else 1e-6
    ladder = [int(round(m)) for m in parse_ladder(args.w_ladder or "1:1024:2")]
    rep = divergence_experiment(kernel, signal, t, ladder, fracs, OperatorParams(1.0, trunc))
    rows = []
    for x, scan in zip(fracs, rep.scans):
        rows += [[x] + row for row in _scan_rows(scan)]
    write_csv(os.path.join(args.out, "divergence.csv"), ["fractional"] + _SCAN_HEADER, rows)
    matches = rep.max_closed_form_gap <= tol
    distinct = rep.difference > 100 * tol
    return matches and distinct, {
        "signal": signal.name, "t": t, "fracs": list(fracs), "ladder": ladder,
        "classification": rep.classification, "limits": list(rep.limits),
        "closed_forms": list(rep.closed_forms), "difference": rep.difference,
        "max_closed_form_gap": rep.max_closed_form_gap, "closed_form_match": matches,
        "non_convergent": distinct,
    }


def exp_rate(args, kernel, trunc):
    signal = parse_signal(args.signal or "sin")
    if not signal.uniformly_continuous:
        raise ParseError("rate experiments need a uniformly continuous signal")
    ladder = parse_ladder(args.w_ladder or "8:1024:2")
    grid = parse_grid(args.grid)
    beta = parse_floats(args.beta)[0] if args.beta else None
    rep = rate_experiment(kernel, signal, ladder, grid, beta, OperatorParams(1.0, trunc), seed=args.seed)
    write_csv(os.path.join(args.out, "rate.csv"), ["w", "sup_error", "bound", "order", "tail_bound"],
              [[r.w, r.sup_error, r.bound, r.order, r.tail_bound] for r in rep.rows])
    ok = rep.strictly_decreasing and (rep.bound_ok is not False)
    return ok, {
        "signal": signal.name, "ladder": ladder, "grid": args.grid, "beta": beta,
        "fitted_order": rep.fitted_order, "strictly_decreasing": rep.strictly_decreasing,
        "bound_ok": rep.bound_ok, "bound_threshold": rep.bound_threshold,
        "final_error": rep.rows[-1].sup_error,
    }


def exp_moments(args, kernel, trunc):
    betas = parse_floats(args.beta or "0.3,0.8")
    estimates = [discrete_moment(kernel, b, MOMENT_RADII, args.u_grid) for b in betas]
    rows = []
    for m in estimates:
        prev = None
        for r, v in m.ladder:
            rows.append([m.beta, r, v, None if prev is None else v / prev])
            prev = v
    write_csv(os.path.join(args.out, "moments.csv"), ["beta", "radius", "partial_sup", "ratio"], rows)
    return True, {"moments": [_moment_payload(m) for m in estimates],
                  "radii": list(MOMENT_RADII), "u_grid": args.u_grid}


EXPERIMENTS = {"jump-scan": exp_jump_scan, "divergence": exp_divergence,
               "rate": exp_rate, "moments": exp_moments}


def cmd_experiment(args):
    kernel = make_kernel(parse_kernel_spec(args.spec))
    trunc = _truncation(args)
    ok, summary = EXPERIMENTS[args.name](args, kernel, trunc)
    summary.update({"experiment": args.name, "provenance": _provenance(args, kernel, trunc),
                    "passed": bool(ok)})
    write_json(os.path.join(args.out, f"{args.name.replace('-', '_')}_summary.json"), summary)
    _say(args, f"{args.name} {kernel.name}: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def _say(args, text, err=False):
    if not args.quiet or err:
        print(text, file=sys.stderr if err else sys.stdout)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", default="bspline:n=3", help="kernel spec, see the grammar above")
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--tol", type=float, default=None, help="check tolerance")
    common.add_argument("--trunc-tol", type=float, default=None,
                        help="absolute tail tolerance for unbounded kernels")
    common.add_argument("--u-grid", type=int, default=1024, help="u-grid size on [0, 1)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized estimators")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="kantorovich", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", parents=[common], help="tabulate and validate a kernel")
    k.add_argument("--validate", action="store_true", help="check the kernel conditions (default)")
    k.add_argument("--classify", action="store_true", help="classify jump behaviour")
    k.add_argument("--moments", action="store_true", help="discrete absolute moment ladders")
    k.add_argument("--beta", default=None, help="comma-separated moment orders")
    k.add_argument("--grid", default="-3:3:121", help="table grid lo:hi:n")
    k.set_defaults(func=cmd_kernel)

    r = sub.add_parser("reconstruct", parents=[common], help="evaluate S_w f on a grid")
    r.add_argument("--signal", default="sin")
    r.add_argument("--w", type=float, default=None)
    r.add_argument("--grid", default="-3:3:61")
    r.add_argument("--generalized", action="store_true", help="add the G_w f column")
    r.add_argument("--causal", action="store_true", help="predict from past means only")
    r.add_argument("--beta", default=None, help="also assemble the error bound of order beta")
    r.set_defaults(func=cmd_reconstruct)

    e = sub.add_parser("experiment", parents=[common], help="run a canned experiment")
    e.add_argument("name", choices=sorted(EXPERIMENTS))
    e.add_argument("--signal", default=None)
    e.add_argument("--t", type=float, default=None, help="jump location (default: first jump)")
    e.add_argument("--w-ladder", default=None, help="lo:hi:factor")
    e.add_argument("--grid", default="-3:3:61")
    e.add_argument("--beta", default=None)
    e.add_argument("--mode", default="integer", help="integer | fractional=<x> | unrestricted")
    e.add_argument("--fracs", default="0.25,0.75", help="fractional parts for divergence")
    e.set_defaults(func=cmd_experiment)
    return parser


_VALUE_FLAGS = ("--grid", "--w-ladder", "--t", "--beta", "--fracs")


def _join_values(argv):
    """Glue values such as ``-3:3:61`` to their flag so argparse does not
    mistake them for options."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = _join_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        os.makedirs(args.out, exist_ok=True)
        return args.func(args)
    except (ParseError, ScanError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KernelError, sig.SignalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
