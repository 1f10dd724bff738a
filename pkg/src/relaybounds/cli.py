"""Command-line front end: ``relaybounds {bounds,sweep,reproduce,verify,witsenhausen,export}``.

Exit codes: 0 success, 1 verification violation, 2 input error,
3 optimizer failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bounds, harness, zoo
from .fileformat import ChannelFileError, channel_to_text, read_channel, sweep_csv
from .optimizer import InfeasibleError, NumericalError, SearchConfig, witsenhausen_G
from .probability import ValidationError, binary_entropy, entropy

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_OPTIMIZER, EXIT_IO = 0, 1, 2, 3, 4
SEED_ENV = "RELAY_BOUNDS_SEED"

FIGURES = {
    "fig3": ("erasure:alpha=0.3,eps=0.4", 0.0, 1.2, 61),
    "fig4": ("multiplicative:alpha=0.5,delta=0.5", 0.0, 1.0, 51),
}


class InputError(Exception):
    pass


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _config(args) -> SearchConfig:
    kwargs = {"seed": _seed(args)}
    if getattr(args, "grid_step", None) is not None:
        kwargs["grid_step"] = args.grid_step
    if getattr(args, "restarts", None) is not None:
        kwargs["restarts"] = args.restarts
    try:
        return SearchConfig(**kwargs)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _load_channel(source: str):
    """A zoo name (``family:k=v,...``) or a path to a channel file."""
    family = source.split(":", 1)[0]
    if ":" in source and family in zoo.FAMILIES and not os.path.exists(source):
        z = zoo.from_name(source)
        return z.channel, z.reference, z.name
    try:
        channel, name = read_channel(source)
    except FileNotFoundError:
        raise InputError(f"{source}: no such channel file or zoo name") from None
    reference = zoo.from_name(name).reference if name else None
    return channel, reference, name


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _fmt_vec(v) -> str:
    return "[" + ", ".join(f"{x:.6f}" for x in np.asarray(v).ravel()) + "]"


def cmd_bounds(args) -> int:
    channel, _, _ = _load_channel(args.channel)
    config = _config(args)
    cs = bounds.cut_set_bound(channel, args.r0, config)
    ub = bounds.new_upper_bound(channel, args.r0, args.v_card_ub, config)
    caf = bounds.caf_rate(channel, args.r0, args.v_card_caf, config)
    lines = [
        f"cutset       {cs.value:.6f}  branch={cs.active_branch}  p_x={_fmt_vec(cs.p_x)}",
        f"upper_bound  {ub.value:.6f}  branch={ub.active_branch}  p_x={_fmt_vec(ub.p_x)}  "
        f"slack={ub.constraint_slack:.2e}",
        f"caf          {caf.value:.6f}  branch=None  p_x={_fmt_vec(caf.p_x)}  "
        f"slack={caf.constraint_slack:.2e}",
    ]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _run_sweep(channel, reference, grid, args) -> str:
    rows = bounds.sweep(channel, grid, args.v_card_ub, args.v_card_caf, _config(args),
                        reference=reference, workers=args.parallel)
    return sweep_csv(rows)


def cmd_sweep(args) -> int:
    channel, reference, _ = _load_channel(args.channel)
    try:
        grid = bounds.RateGrid.linspace(args.r0_min, args.r0_max, args.r0_steps)
    except ValueError as exc:
        raise InputError(f"rate grid: {exc}") from None
    _emit(_run_sweep(channel, reference, grid, args), args.output)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    name, lo, hi, steps = FIGURES[args.figure]
    z = zoo.from_name(name)
    _emit(_run_sweep(z.channel, z.reference, bounds.RateGrid.linspace(lo, hi, steps), args),
          args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = _seed(args)
    config = _config(args)
    suites = tuple(s.strip() for s in args.suites.split(",") if s.strip())
    try:
        reports = harness.run_suites(suites, args.channels, seed, config)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    lines = [r.summary() for r in reports]
    for r in reports:
        for v in r.violations:
            lines.append(f"  {r.name}: {v.check} seed={v.seed} r0={v.rate} {v.detail}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_VIOLATION


def cmd_witsenhausen(args) -> int:
    if not 0.0 <= args.eps <= 1.0:
        raise InputError(f"--eps {args.eps} is not a probability")
    if not 0.0 <= args.alpha <= 1.0:
        raise InputError(f"--alpha {args.alpha} is not a probability")
    p_t = (args.alpha, 1 - args.alpha)
    w = harness.erasure_test_channel(args.eps)
    config = _config(args)
    h_t = entropy(p_t)
    out = ["gamma,numeric_G,closed_G"]
    worst = 0.0
    for f in np.linspace(0.0, 1.0, args.gamma_steps):
        gamma = float(f * h_t)
        numeric = witsenhausen_G(p_t, w, gamma, config)
        closed = binary_entropy(args.eps) + args.eps * gamma
        worst = max(worst, abs(numeric - closed))
        out.append(f"{gamma:.6f},{numeric:.6f},{closed:.6f}")
    _emit("\n".join(out) + "\n", args.output)
    return EXIT_OK if worst <= harness.WITSENHAUSEN_TOL else EXIT_VIOLATION


def cmd_export(args) -> int:
    z = zoo.from_name(args.name)
    _emit(channel_to_text(z.channel, z.name), args.output)
    return EXIT_OK


def _add_search_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help=f"RNG seed (default: ${SEED_ENV}, else 0)")
    p.add_argument("--grid-step", type=float, default=None, help="input-simplex grid spacing")
    p.add_argument("--restarts", type=int, default=None, help="random restarts per search")


def _add_bound_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--v-card-ub", type=int, default=None,
                   help="auxiliary alphabet size for the upper bound (default |T|+2)")
    p.add_argument("--v-card-caf", type=int, default=2,
                   help="auxiliary alphabet size for compress-and-forward (default 2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relaybounds",
                                     description="Bounds on primitive relay channel capacity.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="cut-set, upper bound and CAF rate at one link rate")
    p.add_argument("--channel", required=True, help="zoo name (family:k=v,...) or channel file")
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--output", default=None)
    _add_bound_options(p)
    _add_search_options(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="all bounds over a rate grid, as CSV")
    p.add_argument("--channel", required=True, help="zoo name (family:k=v,...) or channel file")
    p.add_argument("--r0-min", type=float, default=0.0)
    p.add_argument("--r0-max", type=float, default=1.0)
    p.add_argument("--r0-steps", type=int, default=11)
    p.add_argument("--output", default=None)
    p.add_argument("--parallel", type=int, default=1, metavar="N", help="worker processes")
    _add_bound_options(p)
    _add_search_options(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="run a stock sweep (fig3: erasure, fig4: multiplicative) as CSV")
    p.add_argument("figure", choices=sorted(FIGURES))
    p.add_argument("--output", default=None)
    p.add_argument("--parallel", type=int, default=1, metavar="N")
    _add_bound_options(p)
    _add_search_options(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("verify", help="run the randomized verification suites")
    p.add_argument("--suites", default=",".join(harness.SUITES),
                   help=f"comma-separated subset of {','.join(harness.SUITES)}")
    p.add_argument("--channels", type=int, default=100, help="random channels for ordering checks")
    p.add_argument("--output", default=None)
    _add_search_options(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("witsenhausen", help="numeric G(gamma) against its closed form")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.7, help="Pr(T=0)")
    p.add_argument("--gamma-steps", type=int, default=6)
    p.add_argument("--output", default=None)
    _add_search_options(p)
    p.set_defaults(func=cmd_witsenhausen)

    p = sub.add_parser("export", help="write a zoo channel as a channel file")
    p.add_argument("name", help="family:k=v,...")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ChannelFileError, ValidationError, bounds.ResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, InfeasibleError, bounds.IdentityCheckError) as exc:
        print(f"optimizer error: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
