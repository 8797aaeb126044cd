"""Shrinkage functions and the closed-form approximate TV proximal operator.

The operator analyses the signal with the redundant Haar-like frame,
soft-thresholds only the difference blocks at level 2*tau*sqrt(d), and
synthesises back. One analysis + one synthesis pass, no sub-iterations.
"""

from dataclasses import dataclass

import numpy as np

from .frame import CoeffStack, w_adjoint, w_forward
from .signal import validate_signal
from .tv import check_mode


@dataclass(frozen=True)
class ProxParams:
    """Scaling parameter and TV flavour of the approximate prox.

    tau must be strictly positive and finite; the effective shrinkage
    threshold is 2*tau*sqrt(d), fixed by the frame scaling.
    """

    tau: float
    mode: str = "aniso"

    def __post_init__(self):
        if not np.isfinite(self.tau) or self.tau <= 0.0:
            raise ValueError(f"tau must be finite and > 0, got {self.tau}")
        check_mode(self.mode)

    def threshold(self, d):
        return 2.0 * self.tau * np.sqrt(d)


def _check_threshold(lam):
    if lam < 0.0:
        raise ValueError(f"threshold must be >= 0, got {lam}")


def shrink_aniso(t, lam):
    """Scalar soft threshold max(|t| - lam, 0) * sign(t); 0 maps to 0.

    Vectorizes over numpy arrays elementwise.
    """
    _check_threshold(lam)
    t = np.asarray(t, dtype=np.float64)
    out = np.maximum(np.abs(t) - lam, 0.0) * np.sign(t)
    return float(out) if out.ndim == 0 else out

def shrink_iso(v, lam):
    """Group soft threshold max(||v|| - lam, 0) * v/||v||; 0-vector maps to 0.

    v holds one d-vector along its first axis; trailing axes vectorize
    over locations.
    """
    _check_threshold(lam)
    v = np.asarray(v, dtype=np.float64)
    norms = np.sqrt((v**2).sum(axis=0))
    safe = np.where(norms > 0.0, norms, 1.0)
    factor = np.maximum(norms - lam, 0.0) / safe
    return v * factor


def threshold_stack(u, lam, mode):
    """Soft-threshold the difference blocks of a stack; averaging blocks pass
    through untouched.

    This is the exact proximal map of the lifted functional tau*h_hat at
    threshold lam = 2*tau*sqrt(d).
    """
    _check_threshold(lam)
    check_mode(mode)
    if mode == "aniso":
        dif = shrink_aniso(u.dif, lam)
    else:
        dif = shrink_iso(u.dif, lam)
    return CoeffStack(u.avg.copy(), dif)


def approx_prox(z, params):
    """Closed-form approximate TV proximal operator.

    Analysis, difference-block shrinkage at 2*tau*sqrt(d), synthesis.
    Cost O(n d); no iterations.
    """
    z = validate_signal(z)
    u = w_forward(z)
    lam = params.threshold(z.ndim)
    return w_adjoint(threshold_stack(u, lam, params.mode))
