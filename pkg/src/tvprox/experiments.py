"""Benchmark experiments: seeded foam phantoms, metrics, and parameter sweeps.

run_sweep reproduces the accuracy-vs-tau protocol at desk scale: for each
(lambda, gamma, phantom) it runs the chosen solver with the approximate TV
prox, compares against a tight exact-TV baseline computed once per
(lambda, phantom), and emits averaged metric rows plus reconstruction
artifacts.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .exact import OracleConfig, fpg_prox
from .operators import (
    CtGeometry,
    add_awgn,
    identity_operator,
    lipschitz_power_iter,
    prox_g_ct,
    prox_g_denoise,
    radon_operator,
)
from .signal import save_csv
from .solvers import Problem, RunReport, SolverConfig, SolverDivergence, admm, apgm, objective
from .tv import check_mode

TABLE_HEADER = "lambda,gamma,cost_acc,psnr_tv,psnr_gt,iters,seconds"


@dataclass
class ExperimentConfig:
    """Sweep definition. Desk-scale defaults keep a full sweep under CI
    budgets; paper_scale raises the phantom count and CT angles."""

    task: str = "denoise"  # "denoise" | "ct"
    image_size: int = 32
    n_phantoms: int = 3
    seed: int = 0
    mode: str = "aniso"
    lambda_grid: tuple = (0.5,)
    gamma_grid: tuple = (1e-1, 1e-2, 1e-3)  # ct+apgm: fractions of 1/L
    solver: str = "apgm"
    n_angles: int = 15
    noise_sigma: float = None  # default 0.1 (denoise) / 0.5 (ct sinogram)
    stop_tol: float = 5e-6
    max_iter: int = 20000
    fpg50_baseline: bool = False  # also emit table_fpg50.csv (budgeted baseline)
    timing: bool = False  # real wall seconds in table.csv (breaks byte determinism)
    output_dir: str = None
    write_images: bool = True

    def __post_init__(self):
        if self.task not in ("denoise", "ct"):
            raise ValueError(f"task must be 'denoise' or 'ct', got {self.task!r}")
        if self.solver not in ("apgm", "admm"):
            raise ValueError(f"solver must be 'apgm' or 'admm', got {self.solver!r}")
        check_mode(self.mode)
        if not self.lambda_grid or not len(self.gamma_grid):
            raise ValueError("lambda_grid and gamma_grid must be non-empty")
        if self.noise_sigma is None:
            self.noise_sigma = 0.1 if self.task == "denoise" else 0.5

    def paper_scale(self):
        self.n_phantoms = 10
        self.n_angles = 45
        return self


@dataclass
class MetricsRow:
    lam: float
    gamma: float
    cost_acc: float
    psnr_tv: float
    psnr_gt: float
    iterations: float
    seconds: float
    failed: bool = False


@dataclass
class SweepResult:
    rows: list
    cells: list = field(default_factory=list)  # per-(lam, gamma, phantom) run records
    rows_fpg50: list = None


def gen_foam_phantom(size, seed, n_disks=30):
    """Piecewise-constant foam-like phantom: a value-1 disk on a 0 background
    with up to n_disks non-overlapping circular voids of random value in [0, 1).

    Deterministic per seed; at most n_disks + 2 distinct pixel values.
    """
    if size < 16:
        raise ValueError("size must be >= 16")
    rng = np.random.default_rng(seed)
    c = (size - 1) / 2.0
    yy, xx = np.mgrid[0:size, 0:size]
    r_main = 0.45 * size
    img = np.where((xx - c) ** 2 + (yy - c) ** 2 <= r_main**2, 1.0, 0.0)

    placed = []  # (cx, cy, r)
    attempts = 0
    while len(placed) < n_disks and attempts < 20 * n_disks:
        attempts += 1
        r = rng.uniform(0.04, 0.12) * size
        rho = rng.uniform(0.0, r_main - r - 1.0)
        phi = rng.uniform(0.0, 2.0 * np.pi)
        cx = c + rho * np.cos(phi)
        cy = c + rho * np.sin(phi)
        value = rng.uniform(0.0, 1.0)
        if any((cx - px) ** 2 + (cy - py) ** 2 < (r + pr) ** 2 for px, py, pr in placed):
            continue
        img[(xx - cx) ** 2 + (yy - cy) ** 2 <= r**2] = value
        placed.append((cx, cy, r))
    return img


def psnr(reference, x, peak=1.0):
    """Peak signal-to-noise ratio in dB; +inf when the inputs are identical."""
    reference = np.asarray(reference, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if reference.shape != x.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {x.shape}")
    mse = float(((x - reference) ** 2).mean())
    if mse == 0.0:
        return np.inf
    return 10.0 * np.log10(peak**2 / mse)


def cost_accuracy(f_hat, f_star):
    """Relative objective gap (f_hat - f_star) / f_star."""
    if f_star <= 0.0:
        raise ValueError(f"baseline objective must be > 0, got {f_star}")
    return (f_hat - f_star) / f_star


def write_pgm(path, img):
    """8-bit ASCII PGM (P2), min-max scaled."""
    img = np.asarray(img, dtype=np.float64)
    lo, hi = img.min(), img.max()
    scaled = np.zeros_like(img) if hi == lo else (img - lo) / (hi - lo)
    pixels = np.rint(scaled * 255).astype(int)
    with open(path, "w") as f:
        f.write(f"P2\n{img.shape[1]} {img.shape[0]}\n255\n")
        for row in pixels:
            f.write(" ".join(str(v) for v in row) + "\n")


def _make_problem(cfg, y, ct_op=None):
    if cfg.task == "denoise":
        return Problem(
            grad_g=lambda x: x - y,
            objective_g=lambda x: 0.5 * float(((y - x) ** 2).sum()),
            prox_g=lambda v, gamma: prox_g_denoise(v, gamma, y),
            lipschitz_L=1.0,
        )
    return Problem(
        grad_g=lambda x: ct_op.adjoint(ct_op.apply(x) - y),
        objective_g=lambda x: 0.5 * float(((ct_op.apply(x) - y) ** 2).sum()),
        prox_g=lambda v, gamma: prox_g_ct(v, gamma, y, ct_op),
        lipschitz_L=ct_op.lipschitz_bound,
    )


def _baseline(cfg, problem, lam, y, budget=None):
    """Exact-TV reference solution for one (lambda, phantom).

    Tight mode (budget=None) controls tolerances so cost_accuracy against it
    is nonnegative; a finite budget caps FPG sub-iterations instead.
    """
    if cfg.task == "denoise":
        # The denoising problem *is* a TV prox evaluation; solve it directly.
        oracle = OracleConfig(max_iter=budget or 20000, tol=1e-13, mode=cfg.mode)
        x_star, _ = fpg_prox(y, lam, oracle, return_info=True) if lam > 0 else (y.copy(), None)
        return x_star
    oracle = OracleConfig(max_iter=budget or 300, tol=1e-11, mode=cfg.mode)
    ref_cfg = SolverConfig(
        gamma=1.0 / problem.lipschitz_L,
        lam=lam,
        mode=cfg.mode,
        prox_choice="exact",
        oracle=oracle,
        stop_tol=min(cfg.stop_tol, 1e-7),
        max_iter=max(cfg.max_iter, 20000),
    )
    report = apgm(problem, ref_cfg, np.zeros((cfg.image_size, cfg.image_size)))
    return report.final_x


def _phantom_data(cfg, index):
    """Ground truth, measurements, and (for CT) the forward operator."""
    gt = gen_foam_phantom(cfg.image_size, seed=cfg.seed * 1000 + index)
    if cfg.task == "denoise":
        y = add_awgn(gt, cfg.noise_sigma, seed=cfg.seed * 1000 + 500 + index)
        return gt, y, None
    geo = CtGeometry(n_pixels=cfg.image_size, n_angles=cfg.n_angles)
    op = radon_operator(geo)
    op.lipschitz_bound = lipschitz_power_iter(op, iters=200, tol=1e-9, seed=cfg.seed)
    y = add_awgn(op.apply(gt), cfg.noise_sigma, seed=cfg.seed * 1000 + 500 + index)
    return gt, y, op


def _gamma_value(cfg, gamma, lipschitz_L):
    """Grid entries are absolute except for CT+APGM, where they are fractions
    of 1/L (Table-style '1/(kL)' rows expressed as 1/k)."""
    if cfg.task == "ct" and cfg.solver == "apgm":
        return gamma / lipschitz_L
    return gamma


def run_sweep(cfg):
    """Run the full (lambda, gamma, phantom) sweep and return averaged rows.

    Writes table.csv, per-run traces, and PGM/CSV reconstructions when
    cfg.output_dir is set. Solver aborts mark the affected row failed and
    the sweep continues.
    """
    import os

    rows = []
    rows_fpg50 = [] if cfg.fpg50_baseline else None
    cells = []
    out = cfg.output_dir
    if out:
        os.makedirs(out, exist_ok=True)

    # Per-phantom data and baselines are shared across the gamma grid.
    data = [_phantom_data(cfg, i) for i in range(cfg.n_phantoms)]

    for lam in cfg.lambda_grid:
        problems = [_make_problem(cfg, y, op) for _, y, op in data]
        baselines = [_baseline(cfg, prob, lam, y) for prob, (_, y, _) in zip(problems, data)]
        baselines50 = None
        if cfg.fpg50_baseline:
            baselines50 = [_baseline(cfg, prob, lam, y, budget=50) for prob, (_, y, _) in zip(problems, data)]

        for gamma in cfg.gamma_grid:
            accs, accs50, psnrs_tv, psnrs_gt, iters, secs = [], [], [], [], [], []
            failed = False
            for i, ((gt, y, op), problem, x_star) in enumerate(zip(data, problems, baselines)):
                run_cfg = SolverConfig(
                    gamma=_gamma_value(cfg, gamma, problem.lipschitz_L),
                    lam=lam,
                    mode=cfg.mode,
                    prox_choice="approx",
                    stop_tol=cfg.stop_tol,
                    max_iter=cfg.max_iter,
                )
                x0 = y.copy() if cfg.task == "denoise" else np.zeros_like(gt)
                t0 = time.perf_counter()
                try:
                    report = apgm(problem, run_cfg, x0) if cfg.solver == "apgm" else admm(problem, run_cfg, x0)
                except SolverDivergence as err:
                    failed = True
                    cells.append({"lam": lam, "gamma": gamma, "phantom": i, "error": str(err)})
                    continue
                elapsed = time.perf_counter() - t0
                f_hat = report.objective_trace[-1]
                f_star = objective(problem, SolverConfig(gamma=1.0, lam=lam, mode=cfg.mode), x_star)
                # lambda = 0 makes the baseline objective 0; fall back to the
                # absolute gap there so the row remains well defined.
                acc = cost_accuracy(f_hat, f_star) if f_star > 0 else f_hat - f_star
                accs.append(acc)
                if baselines50 is not None:
                    f50 = objective(problem, SolverConfig(gamma=1.0, lam=lam, mode=cfg.mode), baselines50[i])
                    accs50.append(cost_accuracy(f_hat, f50) if f50 > 0 else f_hat - f50)
                psnrs_tv.append(psnr(x_star, report.final_x))
                psnrs_gt.append(psnr(gt, report.final_x))
                iters.append(report.iterations)
                secs.append(elapsed)
                cells.append({
                    "lam": lam, "gamma": gamma, "phantom": i,
                    "stop_reason": report.stop_reason, "iterations": report.iterations,
                    "cost_acc": acc, "report": report,
                })
                if out:
                    tag = f"{cfg.task}_{cfg.solver}_lam{lam:g}_gam{gamma:g}_ph{i}"
                    _write_trace(os.path.join(out, f"trace_{tag}.csv"), report)
                    if cfg.write_images:
                        write_pgm(os.path.join(out, f"recon_{tag}.pgm"), report.final_x)
                        write_pgm(os.path.join(out, f"diff_{tag}.pgm"), report.final_x - x_star)
                        save_csv(os.path.join(out, f"recon_{tag}.csv"), report.final_x)
            if not accs:
                failed = True
            rows.append(MetricsRow(
                lam=lam, gamma=gamma,
                cost_acc=float(np.mean(accs)) if accs else np.nan,
                psnr_tv=float(np.mean(psnrs_tv)) if psnrs_tv else np.nan,
                psnr_gt=float(np.mean(psnrs_gt)) if psnrs_gt else np.nan,
                iterations=float(np.mean(iters)) if iters else np.nan,
                seconds=float(np.sum(secs)) if cfg.timing else 0.0,
                failed=failed,
            ))
            if rows_fpg50 is not None:
                rows_fpg50.append(MetricsRow(
                    lam=lam, gamma=gamma,
                    cost_acc=float(np.mean(accs50)) if accs50 else np.nan,
                    psnr_tv=float(np.mean(psnrs_tv)) if psnrs_tv else np.nan,
                    psnr_gt=float(np.mean(psnrs_gt)) if psnrs_gt else np.nan,
                    iterations=float(np.mean(iters)) if iters else np.nan,
                    seconds=float(np.sum(secs)) if cfg.timing else 0.0,
                    failed=failed,
                ))

    if out:
        write_table(os.path.join(out, "table.csv"), rows)
        if rows_fpg50 is not None:
            write_table(os.path.join(out, "table_fpg50.csv"), rows_fpg50)
    return SweepResult(rows=rows, cells=cells, rows_fpg50=rows_fpg50)


def _write_trace(path, report):
    with open(path, "w") as f:
        f.write("iter,objective\n")
        for k, v in enumerate(report.objective_trace, start=1):
            f.write(f"{k},{v:.12e}\n")


def _fmt(value, spec):
    if np.isnan(value):
        return "nan"
    if np.isinf(value):
        return "inf"
    return format(value, spec)


def write_table(path, rows):
    """Deterministic metrics table; by default the seconds column is a 0.000
    placeholder so identical configs give byte-identical files (real timing
    goes in per-run traces / the timing flag)."""
    with open(path, "w") as f:
        f.write(TABLE_HEADER + "\n")
        for r in rows:
            f.write(",".join([
                format(r.lam, "g"),
                format(r.gamma, "g"),
                _fmt(r.cost_acc, ".6e"),
                _fmt(r.psnr_tv, ".2f"),
                _fmt(r.psnr_gt, ".2f"),
                _fmt(r.iterations, ".1f"),
                _fmt(r.seconds, ".3f"),
            ]) + "\n")
