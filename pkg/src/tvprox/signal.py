"""Dense d-dimensional signal container conventions and basic reductions.

Signals are plain float64 numpy arrays in row-major order, 1 <= ndim <= 3,
every extent >= 2, all values finite. ``validate_signal`` enforces the
contract at public entry points; the reductions below assume it holds.
"""

import numpy as np

MAX_NDIM = 3


class ZeroNormError(ValueError):
    """Denominator signal has zero l2 norm."""


def validate_signal(x, name="signal"):
    """Check the signal contract and return the array as float64.

    Raises ValueError on wrong dimensionality, extents < 2, or
    non-finite values.
    """
    a = np.asarray(x, dtype=np.float64)
    if a.ndim < 1 or a.ndim > MAX_NDIM:
        raise ValueError(f"{name}: dimension must be in 1..{MAX_NDIM}, got {a.ndim}")
    if any(e < 2 for e in a.shape):
        raise ValueError(f"{name}: every extent must be >= 2, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name}: non-finite values are not admitted")
    return a


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def dot(a, b):
    """Euclidean inner product of two same-shape signals."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_shape(a, b)
    return float(np.dot(a.ravel(), b.ravel()))


def l2_norm(a):
    """Euclidean norm sqrt(dot(a, a))."""
    a = np.asarray(a, dtype=np.float64)
    return float(np.linalg.norm(a.ravel()))


def rel_change(x_t, x_prev):
    """Relative iterate change ||x_t - x_prev|| / ||x_prev||.

    Raises ZeroNormError when ||x_prev|| = 0; the caller decides how to
    treat that case.
    """
    x_t = np.asarray(x_t, dtype=np.float64)
    x_prev = np.asarray(x_prev, dtype=np.float64)
    _check_same_shape(x_t, x_prev)
    denom = l2_norm(x_prev)
    if denom == 0.0:
        raise ZeroNormError("rel_change: previous iterate has zero norm")
    return l2_norm(x_t - x_prev) / denom


def mean(a):
    """Arithmetic mean of all entries."""
    a = np.asarray(a, dtype=np.float64)
    return float(a.mean())


def save_csv(path, x):
    """Write a signal as plain text: header ``shape=e1xe2[x...]``, then one
    value per line in row-major order."""
    a = validate_signal(x)
    header = "shape=" + "x".join(str(e) for e in a.shape)
    with open(path, "w") as f:
        f.write(header + "\n")
        for v in a.ravel():
            f.write(f"{v:.17g}\n")


def load_csv(path):
    """Read a signal written by ``save_csv``."""
    with open(path) as f:
        header = f.readline().strip()
        if not header.startswith("shape="):
            raise ValueError(f"{path}: missing 'shape=' header")
        shape = tuple(int(e) for e in header[len("shape="):].split("x"))
        values = np.array([float(line) for line in f if line.strip()], dtype=np.float64)
    n = int(np.prod(shape))
    if values.size != n:
        raise ValueError(f"{path}: expected {n} values for shape {shape}, got {values.size}")
    return validate_signal(values.reshape(shape))
