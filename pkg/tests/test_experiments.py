"""Phantoms, metrics, and the sweep driver (small configurations only; the
full trend runs live in test_acceptance)."""

import numpy as np
import pytest

from tvprox.experiments import (
    TABLE_HEADER,
    ExperimentConfig,
    MetricsRow,
    cost_accuracy,
    gen_foam_phantom,
    psnr,
    run_sweep,
    write_pgm,
    write_table,
)
from tvprox.tv import tv


def test_phantom_determinism_and_range():
    a = gen_foam_phantom(32, seed=5)
    b = gen_foam_phantom(32, seed=5)
    np.testing.assert_array_equal(a, b)
    assert a.min() >= 0.0 and a.max() <= 1.0
    assert not np.array_equal(a, gen_foam_phantom(32, seed=6))


def test_phantom_structure():
    img = gen_foam_phantom(32, seed=1, n_disks=30)
    assert tv(img, "aniso") > 0
    assert len(np.unique(img)) <= 32  # n_disks + 2
    with pytest.raises(ValueError):
        gen_foam_phantom(8, seed=0)


def test_psnr():
    x = np.ones((4, 4))
    assert psnr(x, x) == np.inf
    ref = np.zeros((1, 1))
    val = np.full((1, 1), 0.1)
    assert psnr(ref, val, peak=1.0) == pytest.approx(20.0, abs=1e-10)
    rng = np.random.default_rng(70)
    a = rng.random((8, 8))
    b = rng.random((8, 8))
    mse = np.mean((a - b) ** 2)
    assert psnr(a, b) == pytest.approx(10 * np.log10(1.0 / mse), abs=1e-10)


def test_cost_accuracy():
    assert cost_accuracy(2.0, 2.0) == 0.0
    assert cost_accuracy(2.2, 2.0) == pytest.approx(0.1, rel=1e-12)
    with pytest.raises(ValueError):
        cost_accuracy(1.0, 0.0)
    # Table-scale magnitudes are representable
    assert cost_accuracy(1.0 + 1.157e-3, 1.0) == pytest.approx(1.157e-3, rel=1e-9)


def test_write_pgm(tmp_path):
    img = np.array([[0.0, 0.5], [1.0, 0.25]])
    path = tmp_path / "img.pgm"
    write_pgm(path, img)
    lines = path.read_text().splitlines()
    assert lines[0] == "P2"
    assert lines[1] == "2 2"
    assert lines[2] == "255"
    assert lines[3].split() == ["0", "128"]


def test_write_table_format(tmp_path):
    rows = [MetricsRow(lam=0.5, gamma=0.1, cost_acc=1.23e-2, psnr_tv=30.1234,
                       psnr_gt=20.0, iterations=42.0, seconds=0.0)]
    path = tmp_path / "table.csv"
    write_table(path, rows)
    lines = path.read_text().splitlines()
    assert lines[0] == TABLE_HEADER
    assert lines[1] == "0.5,0.1,1.230000e-02,30.12,20.00,42.0,0.000"


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(task="deblur")
    with pytest.raises(ValueError):
        ExperimentConfig(solver="pdhg")
    with pytest.raises(ValueError):
        ExperimentConfig(lambda_grid=())
    cfg = ExperimentConfig(task="ct")
    assert cfg.noise_sigma == 0.5
    cfg.paper_scale()
    assert cfg.n_phantoms == 10 and cfg.n_angles == 45


def test_sweep_lambda_zero_is_exact(tmp_path):
    cfg = ExperimentConfig(task="denoise", image_size=16, n_phantoms=1, seed=0,
                           lambda_grid=(0.0,), gamma_grid=(1e-1, 1e-2),
                           output_dir=str(tmp_path))
    res = run_sweep(cfg)
    for row in res.rows:
        assert not row.failed
        assert row.cost_acc <= 1e-10  # absolute gap: solver reproduces y
    assert (tmp_path / "table.csv").exists()


def test_sweep_artifacts_and_determinism(tmp_path):
    kwargs = dict(task="denoise", image_size=16, n_phantoms=2, seed=3,
                  lambda_grid=(0.5,), gamma_grid=(1e-1, 1e-2))
    res1 = run_sweep(ExperimentConfig(output_dir=str(tmp_path / "a"), **kwargs))
    run_sweep(ExperimentConfig(output_dir=str(tmp_path / "b"), **kwargs))
    t1 = (tmp_path / "a" / "table.csv").read_bytes()
    t2 = (tmp_path / "b" / "table.csv").read_bytes()
    assert t1 == t2

    out = tmp_path / "a"
    tag = "denoise_apgm_lam0.5_gam0.1_ph0"
    assert (out / f"trace_{tag}.csv").exists()
    assert (out / f"recon_{tag}.pgm").exists()
    assert (out / f"diff_{tag}.pgm").exists()
    assert (out / f"recon_{tag}.csv").exists()

    # cost accuracy vs the tight baseline is nonnegative and improves as
    # gamma (hence tau) shrinks
    rows = res1.rows
    assert all(r.cost_acc >= -1e-12 for r in rows)
    assert rows[1].cost_acc < rows[0].cost_acc


def test_sweep_fpg50_baseline_table(tmp_path):
    cfg = ExperimentConfig(task="denoise", image_size=16, n_phantoms=1, seed=0,
                           lambda_grid=(0.5,), gamma_grid=(1e-2,),
                           fpg50_baseline=True, output_dir=str(tmp_path))
    res = run_sweep(cfg)
    assert res.rows_fpg50 is not None and len(res.rows_fpg50) == 1
    lines = (tmp_path / "table_fpg50.csv").read_text().splitlines()
    assert lines[0] == TABLE_HEADER


def test_sweep_marks_failed_rows():
    # an absurd step size makes APGM diverge on the denoising problem
    cfg = ExperimentConfig(task="denoise", image_size=16, n_phantoms=1, seed=0,
                           lambda_grid=(0.5,), gamma_grid=(50.0,), max_iter=3000)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = run_sweep(cfg)
    assert res.rows[0].failed
