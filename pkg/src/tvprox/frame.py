"""Redundant Haar-like frame: per-axis averaging/difference convolutions.

All kernels use circular (periodic) boundaries, which makes the analysis /
synthesis pair an exact tight frame: w_adjoint(w_forward(z)) == z. The
forward stencils pair sample i with its +1 neighbour along the axis.
"""

from dataclasses import dataclass

import numpy as np

from .signal import validate_signal


@dataclass(frozen=True)
class CoeffStack:
    """Frame coefficients of a d-dimensional signal.

    avg, dif: arrays of shape (d, *signal_shape) holding the scaled
    averaging and difference blocks, one block per axis.
    """

    avg: np.ndarray
    dif: np.ndarray

    def __post_init__(self):
        if self.avg.shape != self.dif.shape:
            raise ValueError("avg/dif block shapes differ")
        if self.avg.shape[0] != self.avg.ndim - 1:
            raise ValueError(f"expected {self.avg.ndim - 1} blocks, got {self.avg.shape[0]}")

    @property
    def d(self):
        return self.avg.shape[0]

    @property
    def signal_shape(self):
        return self.avg.shape[1:]

    def copy(self):
        return CoeffStack(self.avg.copy(), self.dif.copy())


def _check_axis(x, j):
    if not 0 <= j < x.ndim:
        raise ValueError(f"axis {j} invalid for {x.ndim}-d signal")


def avg_axis(x, j):
    """Circular averaging convolution along axis j: out_i = x_i + x_{i+1}."""
    x = np.asarray(x, dtype=np.float64)
    _check_axis(x, j)
    return x + np.roll(x, -1, axis=j)


def diff_axis(x, j):
    """Circular difference convolution along axis j: out_i = x_i - x_{i+1}."""
    x = np.asarray(x, dtype=np.float64)
    _check_axis(x, j)
    return x - np.roll(x, -1, axis=j)


def avg_axis_adjoint(t, j):
    """Exact adjoint of avg_axis: out_i = t_i + t_{i-1} (circular)."""
    t = np.asarray(t, dtype=np.float64)
    _check_axis(t, j)
    return t + np.roll(t, 1, axis=j)


def diff_axis_adjoint(t, j):
    """Exact adjoint of diff_axis: out_i = t_i - t_{i-1} (circular)."""
    t = np.asarray(t, dtype=np.float64)
    _check_axis(t, j)
    return t - np.roll(t, 1, axis=j)


def w_forward(z):
    """Analysis transform: stack A_j z and D_j z over axes, scaled by 1/(2 sqrt d)."""
    z = validate_signal(z)
    d = z.ndim
    scale = 1.0 / (2.0 * np.sqrt(d))
    avg = np.stack([avg_axis(z, j) for j in range(d)]) * scale
    dif = np.stack([diff_axis(z, j) for j in range(d)]) * scale
    return CoeffStack(avg, dif)


def w_adjoint(u):
    """Synthesis transform, exact adjoint of w_forward.

    Satisfies w_adjoint(w_forward(z)) == z (tight frame under circular
    boundaries).
    """
    d = u.d
    scale = 1.0 / (2.0 * np.sqrt(d))
    out = np.zeros(u.signal_shape, dtype=np.float64)
    for j in range(d):
        out += avg_axis_adjoint(u.avg[j], j)
        out += diff_axis_adjoint(u.dif[j], j)
    return out * scale


def stack_norm(u):
    """l2 norm of all 2d blocks of a coefficient stack."""
    return float(np.sqrt(np.sum(u.avg**2) + np.sum(u.dif**2)))
