"""Measurement operators: identity (denoising) and parallel-beam CT.

The CT projector splats each pixel center onto the two nearest detector
bins with linear weights (detector spacing = pixel size). The weights are
assembled once into a sparse matrix, so the adjoint is its exact transpose
and every view conserves the total projected mass exactly.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .signal import l2_norm, validate_signal


@dataclass
class LinearOperator:
    """Matrix-free forward/adjoint pair with an optional cached ||A||^2."""

    apply: callable
    adjoint: callable
    in_shape: tuple
    out_shape: tuple
    lipschitz_bound: float | None = None


def identity_operator(shape):
    shape = tuple(shape)
    return LinearOperator(
        apply=lambda x: np.asarray(x, dtype=np.float64).copy(),
        adjoint=lambda r: np.asarray(r, dtype=np.float64).copy(),
        in_shape=shape,
        out_shape=shape,
        lipschitz_bound=1.0,
    )


def _default_detectors(n_pixels):
    m = int(np.ceil(n_pixels * np.sqrt(2.0)))
    if (m - n_pixels) % 2:
        m += 1  # same parity as the image side: 0-degree rays hit bin centers
    return m


@dataclass(eq=False)
class CtGeometry:
    """Parallel-beam geometry: square image, equispaced angles over [0, pi)."""

    n_pixels: int
    n_angles: int
    angles: np.ndarray = None
    n_detectors: int = None
    pixel_size: float = 1.0
    _matrix: sp.csr_matrix = field(default=None, repr=False)

    def __post_init__(self):
        if self.n_angles < 1:
            raise ValueError("n_angles must be >= 1")
        if self.angles is None:
            self.angles = np.arange(self.n_angles) * np.pi / self.n_angles
        self.angles = np.asarray(self.angles, dtype=np.float64)
        if self.angles.size != self.n_angles:
            raise ValueError("angles length must equal n_angles")
        if np.any(np.diff(self.angles) <= 0) or self.angles[0] < 0 or self.angles[-1] >= np.pi:
            raise ValueError("angles must be strictly increasing within [0, pi)")
        if self.n_detectors is None:
            self.n_detectors = _default_detectors(self.n_pixels)

    @property
    def sinogram_shape(self):
        return (self.n_angles, self.n_detectors)


def system_matrix(geo):
    """Sparse (n_angles*n_detectors) x n_pixels^2 projection matrix, cached."""
    if geo._matrix is not None:
        return geo._matrix
    n, m = geo.n_pixels, geo.n_detectors
    c = (np.arange(n) - (n - 1) / 2.0) * geo.pixel_size
    ys, xs = np.meshgrid(c, c, indexing="ij")
    xs = xs.ravel()
    ys = ys.ravel()
    pix = np.arange(n * n)

    rows, cols, vals = [], [], []
    for k, theta in enumerate(geo.angles):
        t = xs * np.cos(theta) + ys * np.sin(theta)
        u = t / geo.pixel_size + (m - 1) / 2.0
        m0 = np.floor(u).astype(np.int64)
        w1 = u - m0
        for bins, w in ((m0, 1.0 - w1), (m0 + 1, w1)):
            ok = (bins >= 0) & (bins < m) & (w > 0)
            rows.append(k * m + bins[ok])
            cols.append(pix[ok])
            vals.append(w[ok])
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(geo.n_angles * m, n * n),
    )
    geo._matrix = mat
    return mat


def radon_forward(img, geo):
    """Project a square image to its sinogram (one row per angle)."""
    img = validate_signal(img)
    if img.shape != (geo.n_pixels, geo.n_pixels):
        raise ValueError(f"image shape {img.shape} does not match geometry {geo.n_pixels}")
    a = system_matrix(geo)
    return (a @ img.ravel()).reshape(geo.sinogram_shape)


def radon_adjoint(sino, geo):
    """Exact adjoint of radon_forward (transposed accumulation)."""
    sino = np.asarray(sino, dtype=np.float64)
    if sino.shape != geo.sinogram_shape:
        raise ValueError(f"sinogram shape {sino.shape} does not match geometry {geo.sinogram_shape}")
    a = system_matrix(geo)
    return (a.T @ sino.ravel()).reshape(geo.n_pixels, geo.n_pixels)


def radon_operator(geo):
    return LinearOperator(
        apply=lambda x: radon_forward(x, geo),
        adjoint=lambda r: radon_adjoint(r, geo),
        in_shape=(geo.n_pixels, geo.n_pixels),
        out_shape=geo.sinogram_shape,
    )


def lipschitz_power_iter(op, iters=100, tol=1e-6, seed=0):
    """Largest eigenvalue of A^T A by seeded power iteration on A^T A."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(op.in_shape)
    v /= l2_norm(v)
    est = 0.0
    for _ in range(iters):
        w = op.adjoint(op.apply(v))
        new_est = float(np.vdot(v, w).real)
        nw = l2_norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if est > 0 and abs(new_est - est) <= tol * abs(new_est):
            est = new_est
            break
        est = new_est
    return est


def add_awgn(x, sigma, seed):
    """Add i.i.d. Gaussian noise of standard deviation sigma, seeded."""
    x = np.asarray(x, dtype=np.float64)
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0.0:
        return x.copy()
    rng = np.random.default_rng(seed)
    return x + sigma * rng.standard_normal(x.shape)


def prox_g_denoise(v, gamma, y):
    """Closed-form prox of gamma * (1/2)||y - x||^2: (v + gamma*y)/(1 + gamma)."""
    v = np.asarray(v, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if v.shape != y.shape:
        raise ValueError(f"shape mismatch: {v.shape} vs {y.shape}")
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    return (v + gamma * y) / (1.0 + gamma)


def prox_g_ct(v, gamma, y, op, cg_tol=1e-10, cg_max=200):
    """Prox of gamma * (1/2)||Ax - y||^2: solve (I + gamma A^T A) x = v + gamma A^T y
    by matrix-free conjugate gradient, warm-started at v."""
    v = np.asarray(v, dtype=np.float64)
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    rhs = v + gamma * op.adjoint(y)
    n = rhs.size

    def matvec(u):
        img = u.reshape(op.in_shape)
        return u + gamma * op.adjoint(op.apply(img)).ravel()

    lin = spla.LinearOperator((n, n), matvec=matvec, dtype=np.float64)
    x, _ = spla.cg(lin, rhs.ravel(), x0=v.ravel(), rtol=cg_tol, atol=0.0, maxiter=cg_max)
    achieved = l2_norm(matvec(x) - rhs.ravel()) / max(l2_norm(rhs), np.finfo(np.float64).tiny)
    if achieved > cg_tol:
        warnings.warn(f"prox_g_ct: CG stalled at relative residual {achieved:.3e}", RuntimeWarning)
    return x.reshape(op.in_shape)


def save_sinogram(path, sino, geo):
    """Plain-text sinogram: header ``angles=<count>,detectors=<count>``, then
    one comma-separated row per angle."""
    sino = np.asarray(sino, dtype=np.float64)
    with open(path, "w") as f:
        f.write(f"angles={geo.n_angles},detectors={geo.n_detectors}\n")
        for row in sino:
            f.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_sinogram(path):
    with open(path) as f:
        header = f.readline().strip()
        parts = dict(kv.split("=") for kv in header.split(","))
        n_angles, n_det = int(parts["angles"]), int(parts["detectors"])
        rows = [np.array([float(v) for v in line.split(",")]) for line in f if line.strip()]
    sino = np.vstack(rows)
    if sino.shape != (n_angles, n_det):
        raise ValueError(f"{path}: header promises {(n_angles, n_det)}, data is {sino.shape}")
    return sino
