"""Command-line entry point.

Exit codes::

    0  success
    2  usage, file or parse error
    3  precondition violated
    4  divergent quantity (e.g. the P representation, s = -1)
    5  tolerance failure (oracle mismatch, convergence order, truncation, budget)

Options may also come from ``--config FILE`` holding ``key = value`` lines
(keys are option names with dashes or underscores); command-line flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import ctp, distribution, io, studies
from .core import BranchHistory, ModelParams, PhaseSpacePath, SourcePath
from .errors import (
    DivergenceError,
    HistoriesError,
    PreconditionError,
    TruncationError,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_DIVERGENCE = 4
EXIT_TOLERANCE = 5


class InputError(Exception):
    """Unreadable or malformed input file."""


class ToleranceFailure(Exception):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _read(path, kind):
    if path is None:
        return None
    try:
        return io.read_any(path, kind)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _params(args) -> ModelParams:
    return ModelParams(
        omega=args.omega,
        lam=getattr(args, "lam", 0.0),
        beta=complex(args.beta_re, args.beta_im),
    )


# --- commands -----------------------------------------------------------------


def cmd_eval_distribution(args) -> int:
    b = _read(args.branch, "branch")
    bp = _read(args.branch_prime, "branch")
    params = _params(args)
    if args.form == "continuum":
        if args.rep == "q":
            log_w = distribution.log_w_q_continuum(b, bp, params)
        elif args.rep == "wigner":
            log_w = distribution.log_w_wigner_continuum(b, bp, params)
        else:
            raise PreconditionError("continuum evaluation needs --rep q or --rep wigner")
    elif args.rep == "q":
        log_w = distribution.log_w_q_discrete(b, bp, params)
    elif args.rep == "wigner":
        log_w = distribution.log_w_wigner_discrete(b, bp, params)
    else:
        log_w = distribution.log_w_two_branch(b, bp, args.s, params, args.variant)
    result = io.complex_from_log(log_w)
    if args.form == "discrete":
        s = {"q": 1.0, "wigner": 0.0}.get(args.rep, args.s)
        n = (b.n if b else 0) + (bp.n if bp else 0)
        result["normalization"] = distribution.normalization(n, s)
    _emit(json.dumps(result), args.out)
    return EXIT_OK


def cmd_oracle_compare(args) -> int:
    if args.case:
        cases = [tuple(int(x) for x in c.split(",")) for c in args.case]
        if any(len(c) != 2 for c in cases):
            raise PreconditionError("--case takes n,m")
    else:
        cases = studies.DEFAULT_CASES
    s_values = [float(x) for x in args.s_values.split(",")]
    betas = [complex(x.replace(" ", "")) for x in args.betas.split(";")]
    rows, over = studies.oracle_compare(
        cases, s_values, args.draws, betas, args.seed, args.omega, args.variant, args.budget
    )
    lines = ["n,m,s,beta_re,beta_im,draw,rel_err,status"]
    failed = 0
    for r in rows:
        ok = r.rel_err < args.tol
        failed += not ok
        lines.append(
            f"{r.n},{r.m},{fmt(r.s)},{fmt(r.beta.real)},{fmt(r.beta.imag)},{r.draw},"
            f"{fmt(r.rel_err)},{'ok' if ok else 'MISMATCH'}"
        )
    worst = max((r.rel_err for r in rows), default=0.0)
    lines.append(f"# rows={len(rows)} failed={failed} max_rel_err={fmt(worst)} tol={fmt(args.tol)}")
    if over:
        lines.append(f"# oracle budget of {args.budget} s exceeded; suite incomplete")
    _emit("\n".join(lines), args.out)
    if failed or over:
        raise ToleranceFailure(
            f"{failed} of {len(rows)} cases exceed tolerance" + ("; budget exceeded" if over else "")
        )
    return EXIT_OK


def cmd_convergence_study(args) -> int:
    ns = [int(x) for x in args.n_values.split(",")]
    res = studies.convergence_study(
        args.rep, ns, args.t_end, args.modes, args.amplitude, args.seed, _params(args)
    )
    lines = ["n,dt,error"] + [f"{n},{fmt(d)},{fmt(e)}" for n, d, e in zip(res.n_values, res.dts, res.errors)]
    if res.order is None:
        lines.append("# order=undefined (zero error at some resolution)")
    else:
        lines.append(f"# order={fmt(res.order)}")
    _emit("\n".join(lines), args.out)
    if args.min_order is not None and res.order is not None and res.order < args.min_order:
        raise ToleranceFailure(f"fitted order {res.order:.3f} is below {args.min_order}")
    return EXIT_OK


def cmd_greens_dump(args) -> int:
    if args.n < 1:
        raise PreconditionError("--n must be >= 1")
    t = np.linspace(args.t_min, args.t_max, args.n)
    vals = np.atleast_1d(ctp.greens_eval(args.kind, t, args.omega))
    lines = ["t,re,im"] + [f"{fmt(a)},{fmt(v.real)},{fmt(v.imag)}" for a, v in zip(t, vals)]
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_ctp_eval(args) -> int:
    from . import fock

    src = _read(args.sources, "sources")
    srcp = _read(args.sources_prime, "sources") if args.sources_prime else SourcePath.zeros(src.grid)
    if args.mode == "config":
        log_z = ctp.log_ctp_z_config(src, srcp, args.omega)
        result = io.complex_from_log(log_z)
    elif args.mode == "phase":
        log_z = ctp.log_ctp_z_phase(src, srcp, args.omega, args.scheme)
        result = io.complex_from_log(log_z)
    else:
        z = fock.ctp_z_fock(src, srcp, ModelParams(args.omega), fock.FockConfig(args.dim))
        result = io.complex_result(z)
    _emit(json.dumps(result), args.out)
    return EXIT_OK


def cmd_wick_derive(args) -> int:
    from .perturbation import connected_exponent, render_kernel

    exp = connected_exponent(args.order)
    if args.format == "json":
        _emit(json.dumps(exp.to_dict()), args.out)
        return EXIT_OK
    lines = []
    for k in range(1, args.order + 1):
        lines.append(f"order {k}:")
        lines += ["  " + render_kernel(kern) for kern in exp.kernels(k)]
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def _as_phase_space(obj, omega):
    if isinstance(obj, PhaseSpacePath):
        return obj
    if isinstance(obj, BranchHistory):
        return obj.to_phase_space(omega)
    raise PreconditionError("perturb-eval needs phase-space paths (t,q,p) or branches (t,re,im)")


def cmd_perturb_eval(args) -> int:
    from .perturbation import s_tilde_config, s_tilde_phase

    a = _as_phase_space(_read(args.path, None), args.omega)
    b = _as_phase_space(_read(args.path_prime, None), args.omega)
    if args.space == "config":
        if not a.grid.same_as(b.grid):
            raise PreconditionError("paths must share a grid")
        val = s_tilde_config(a.q, b.q, a.grid, args.lam, args.omega, args.include, args.scheme)
    else:
        val = s_tilde_phase(a, b, args.lam, args.omega, args.include, args.scheme)
    _emit(json.dumps(val.to_dict()), args.out)
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def _model_opts(p, with_beta=True, with_lam=False):
    p.add_argument("--omega", type=float, default=1.0)
    if with_beta:
        p.add_argument("--beta-re", type=float, default=0.0)
        p.add_argument("--beta-im", type=float, default=0.0)
    if with_lam:
        p.add_argument("--lam", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="histphase", description=__doc__.split("\n")[0])
    parser.add_argument("--config", help="key=value file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-distribution", help="evaluate a two-branch distribution")
    p.add_argument("--branch", help="unprimed branch (CSV t,re,im or JSON)")
    p.add_argument("--branch-prime", help="primed branch")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--rep", choices=("general", "q", "wigner"), default="general")
    p.add_argument("--form", choices=("discrete", "continuum"), default="discrete")
    p.add_argument("--variant", choices=("adjudicated", "printed"), default="adjudicated")
    _model_opts(p)
    p.set_defaults(func=cmd_eval_distribution)

    p = sub.add_parser("oracle-compare", help="closed forms against the Gaussian-integral oracle")
    p.add_argument("--case", action="append", help="n,m (repeatable); default suite if absent")
    p.add_argument("--s-values", default="0,0.5,1")
    p.add_argument("--betas", default="0;0.3+0.2j", help="semicolon-separated complex values")
    p.add_argument("--draws", type=int, default=20)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--budget", type=float, default=None, help="wall-clock budget in seconds")
    p.add_argument("--variant", choices=("adjudicated", "printed"), default="adjudicated")
    p.add_argument("--omega", type=float, default=1.0)
    p.set_defaults(func=cmd_oracle_compare)

    p = sub.add_parser("convergence-study", help="discrete-to-continuum convergence order")
    p.add_argument("--rep", choices=("q", "wigner"), default="q")
    p.add_argument("--n-values", default="100,200,400")
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--modes", type=int, default=3)
    p.add_argument("--amplitude", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--min-order", type=float, default=None)
    _model_opts(p)
    p.set_defaults(func=cmd_convergence_study)

    p = sub.add_parser("greens-dump", help="tabulate a Green's function")
    p.add_argument("--kind", choices=ctp.KINDS, default="feynman")
    p.add_argument("--t-min", type=float, default=-5.0)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--omega", type=float, default=1.0)
    p.set_defaults(func=cmd_greens_dump)

    p = sub.add_parser("ctp-eval", help="closed-time-path generating functional")
    p.add_argument("--sources", required=True, help="CSV t,xi,chi or JSON")
    p.add_argument("--sources-prime", help="primed sources (default: zero)")
    p.add_argument("--mode", choices=("config", "phase", "fock"), default="phase")
    p.add_argument("--scheme", choices=("forward", "central"), default="forward")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--omega", type=float, default=1.0)
    p.set_defaults(func=cmd_ctp_eval)

    p = sub.add_parser("wick-derive", help="derive the perturbative kernels")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_wick_derive)

    p = sub.add_parser("perturb-eval", help="perturbative exponent on a pair of paths")
    p.add_argument("--path", required=True, help="CSV t,q,p (or t,re,im) or JSON")
    p.add_argument("--path-prime", required=True)
    p.add_argument("--space", choices=("config", "phase"), default="config")
    p.add_argument("--include", choices=("standard", "all"), default="standard")
    p.add_argument("--scheme", choices=("forward", "central"), default="forward")
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.set_defaults(func=cmd_perturb_eval)

    for p in sub.choices.values():
        p.add_argument("--out", help="write output here instead of stdout")
    return parser


def _read_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _apply_config(parser, argv, config: dict):
    """Re-parse with config values as defaults of the chosen sub-command."""
    args = parser.parse_args(argv)
    sub = next(
        a for a in parser._subparsers._group_actions if isinstance(a, argparse._SubParsersAction)
    ).choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in config.items():
        if key not in known or key in ("help", "func"):
            raise InputError(f"config key {key!r} is not an option of {args.command}")
        action = known[key]
        if isinstance(action, argparse._AppendAction):
            defaults[key] = [v.strip() for v in value.split("|")]
        elif action.type is not None:
            try:
                defaults[key] = action.type(value)
            except ValueError as exc:
                raise InputError(f"config key {key!r}: {exc}") from exc
        else:
            defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(parser, argv, _read_config(args.config))
        return args.func(args)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else EXIT_PARSE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ToleranceFailure, TruncationError) as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (PreconditionError, HistoriesError) as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
