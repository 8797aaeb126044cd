"""Benchmark command line: denoise / ct sweeps and quick prox property checks.

Exit codes: 0 success, 2 configuration error, 3 solver abort.
"""

import argparse
import sys

import numpy as np

from .exact import OracleConfig, fpg_prox
from .experiments import ExperimentConfig, run_sweep
from .shrinkage import ProxParams, approx_prox
from .signal import l2_norm
from .tv import tv


def _parse_floats(text):
    return tuple(float(v) for v in text.split(","))


def _read_config_file(path):
    """Flat key=value file mirroring the CLI flags; '#' starts a comment."""
    values = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


_CONFIG_KEYS = {
    "lambda": ("lambda_grid", _parse_floats),
    "gamma": ("gamma_grid", _parse_floats),
    "mode": ("mode", str),
    "solver": ("solver", str),
    "prox": ("prox", str),
    "size": ("size", int),
    "seed": ("seed", int),
    "angles": ("angles", int),
    "phantoms": ("phantoms", int),
    "sigma": ("sigma", float),
    "out": ("out", str),
    "paper_scale": ("paper_scale", lambda v: v.lower() in ("1", "true", "yes")),
    "timing": ("timing", lambda v: v.lower() in ("1", "true", "yes")),
}


def _add_sweep_flags(p):
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--lambda", dest="lambda_grid", type=_parse_floats, default=None,
                   help="comma-separated regularization grid")
    p.add_argument("--gamma", dest="gamma_grid", type=_parse_floats, default=None,
                   help="comma-separated step-size/penalty grid")
    p.add_argument("--mode", choices=("aniso", "iso"), default=None)
    p.add_argument("--solver", choices=("apgm", "admm"), default=None)
    p.add_argument("--prox", choices=("approx", "exact"), default=None,
                   help="exact also emits the budgeted-FPG baseline table")
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--angles", type=int, default=None)
    p.add_argument("--phantoms", type=int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--paper-scale", action="store_true", default=None)
    p.add_argument("--timing", action="store_true", default=None,
                   help="record real wall seconds in table.csv (not byte-reproducible)")


def _merged_options(args):
    opts = {}
    if args.config:
        file_values = _read_config_file(args.config)
        for key, raw in file_values.items():
            if key not in _CONFIG_KEYS:
                raise ValueError(f"unknown config key {key!r}")
            dest, conv = _CONFIG_KEYS[key]
            opts[dest] = conv(raw)
    for dest in ("lambda_grid", "gamma_grid", "mode", "solver", "prox", "size", "seed",
                 "angles", "phantoms", "sigma", "out", "paper_scale", "timing"):
        val = getattr(args, dest, None)
        if val is not None:
            opts[dest] = val
    return opts


def _build_config(task, opts):
    cfg = ExperimentConfig(
        task=task,
        image_size=opts.get("size", 32),
        n_phantoms=opts.get("phantoms", 3),
        seed=opts.get("seed", 0),
        mode=opts.get("mode", "aniso"),
        lambda_grid=opts.get("lambda_grid", (0.5,)),
        gamma_grid=opts.get("gamma_grid", (1e-1, 1e-2, 1e-3) if task == "denoise" else (1e-2, 1e-3, 1e-4)),
        solver=opts.get("solver", "apgm" if task == "denoise" else "admm"),
        n_angles=opts.get("angles", 15),
        noise_sigma=opts.get("sigma"),
        fpg50_baseline=opts.get("prox") == "exact",
        timing=bool(opts.get("timing")),
        output_dir=opts.get("out"),
    )
    if opts.get("paper_scale"):
        cfg.paper_scale()
    return cfg


def _run_task(task, args):
    try:
        cfg = _build_config(task, _merged_options(args))
    except (ValueError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    result = run_sweep(cfg)
    for row in result.rows:
        status = "FAILED" if row.failed else "ok"
        print(f"lambda={row.lam:g} gamma={row.gamma:g} cost_acc={row.cost_acc:.6e} "
              f"psnr_tv={row.psnr_tv:.2f} psnr_gt={row.psnr_gt:.2f} "
              f"iters={row.iterations:.1f} [{status}]")
    if cfg.output_dir:
        print(f"table written to {cfg.output_dir}/table.csv")
    return 3 if any(r.failed for r in result.rows) else 0


def _run_prox_check(args):
    """Spot-check the operator's contracts on random signals."""
    rng = np.random.default_rng(args.seed)
    size = args.size
    mode = args.mode
    tau = args.tau
    n = size * size
    ok = True

    z = rng.standard_normal((size, size))
    params = ProxParams(tau, mode)
    s = approx_prox(z, params)

    descent = tv(s, mode) <= tv(z, mode) + 1e-10
    print(f"descent: tv(S(z))={tv(s, mode):.6e} <= tv(z)={tv(z, mode):.6e}  [{'pass' if descent else 'FAIL'}]")
    ok &= descent

    z2 = rng.standard_normal((size, size))
    s2 = approx_prox(z2, params)
    nonexp = l2_norm(s - s2) <= (1 + 1e-12) * l2_norm(z - z2)
    print(f"nonexpansive: ||S(z1)-S(z2)||={l2_norm(s - s2):.6e} <= ||z1-z2||={l2_norm(z - z2):.6e}  "
          f"[{'pass' if nonexp else 'FAIL'}]")
    ok &= nonexp

    exact = fpg_prox(z, tau, OracleConfig(max_iter=5000, tol=1e-12, mode=mode))
    bound = 4.0 * tau * 2 * np.sqrt(n)
    dist = l2_norm(exact - s)
    bounded = dist <= bound
    print(f"error bound: ||prox - S||={dist:.6e} <= 4*tau*d*sqrt(n)={bound:.6e}  "
          f"[{'pass' if bounded else 'FAIL'}]")
    ok &= bounded
    return 0 if ok else 3


def build_parser():
    parser = argparse.ArgumentParser(prog="tvprox", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for task in ("denoise", "ct"):
        p = sub.add_parser(task, help=f"{task} accuracy-vs-tau sweep")
        _add_sweep_flags(p)

    p = sub.add_parser("prox-check", help="quick property checks of the approximate prox")
    p.add_argument("--size", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=float, default=1e-2)
    p.add_argument("--mode", choices=("aniso", "iso"), default="aniso")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "prox-check":
        return _run_prox_check(args)
    return _run_task(args.command, args)


if __name__ == "__main__":
    sys.exit(main())
