"""Ground-truth TV proximal oracles.

fpg_prox runs an accelerated projected-gradient method on the dual of the
TV-prox problem (per-entry or per-location dual-ball constraints for the
anisotropic / isotropic case). tautstring_prox_1d is an exact non-iterative
solver for the 1D free-boundary problem, used to cross-validate FPG.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .signal import l2_norm, validate_signal
from .tv import check_mode


@dataclass
class OracleConfig:
    """Iteration budget and stopping tolerance of the dual FPG oracle."""

    max_iter: int = 500
    tol: float = 1e-10
    mode: str = "aniso"
    boundary: str = "circular"

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol <= 0.0:
            raise ValueError("tol must be > 0")
        check_mode(self.mode)
        if self.boundary not in ("circular", "free"):
            raise ValueError(f"boundary must be 'circular' or 'free', got {self.boundary!r}")


def _grad_op(x, boundary):
    """Per-axis forward differences, shape (d, *x.shape).

    circular: wrap-around neighbour; free: last difference along each axis
    is zeroed (one fewer effective difference per line).
    """
    d = x.ndim
    g = np.empty((d,) + x.shape, dtype=np.float64)
    for j in range(d):
        gj = x - np.roll(x, -1, axis=j)
        if boundary == "free":
            idx = [slice(None)] * x.ndim
            idx[j] = -1
            gj[tuple(idx)] = 0.0
        g[j] = gj
    return g


def _grad_adjoint(p, boundary):
    """Exact adjoint of _grad_op."""
    d = p.shape[0]
    out = np.zeros(p.shape[1:], dtype=np.float64)
    for j in range(d):
        pj = p[j]
        if boundary == "free":
            pj = pj.copy()
            idx = [slice(None)] * pj.ndim
            idx[j] = -1
            pj[tuple(idx)] = 0.0
        out += pj - np.roll(pj, 1, axis=j)
    return out


def _project_dual(p, mode):
    """Project a dual field onto its feasible set in place-free fashion."""
    if mode == "aniso":
        return np.clip(p, -1.0, 1.0)
    norms = np.sqrt((p**2).sum(axis=0))
    return p / np.maximum(norms, 1.0)


def tv_with_boundary(x, mode, boundary):
    """TV value under a chosen boundary convention (circular matches tv())."""
    g = _grad_op(np.asarray(x, dtype=np.float64), boundary)
    if mode == "aniso":
        return float(np.abs(g).sum())
    return float(np.sqrt((g**2).sum(axis=0)).sum())


def fpg_prox(z, tau, cfg=None, return_info=False):
    """TV proximal operator via fast projected gradient on the dual.

    Minimizes 0.5*||x - z||^2 + tau*tv(x, mode) with x = z - tau*D^T p and
    p constrained to the dual unit balls. Dual step 1/(4d), zero dual
    initialization, standard momentum, no restarts. Stops when the relative
    change of the primal iterate drops below cfg.tol; hitting max_iter
    first emits a warning with the achieved change.
    """
    z = validate_signal(z)
    if tau <= 0.0:
        raise ValueError(f"tau must be > 0, got {tau}")
    cfg = cfg or OracleConfig()
    d = z.ndim
    step = 1.0 / (4.0 * d * tau)

    p = np.zeros((d,) + z.shape, dtype=np.float64)
    q = p
    t_prev = 1.0
    x_prev = None
    x = z.copy()
    change = np.inf
    iters = 0
    for k in range(cfg.max_iter):
        x_q = z - tau * _grad_adjoint(q, cfg.boundary)
        p_new = _project_dual(q + step * _grad_op(x_q, cfg.boundary), cfg.mode)
        t = (1.0 + np.sqrt(1.0 + 4.0 * t_prev**2)) / 2.0
        q = p_new + ((t_prev - 1.0) / t) * (p_new - p)
        p, t_prev = p_new, t
        x = z - tau * _grad_adjoint(p, cfg.boundary)
        iters = k + 1
        if x_prev is not None:
            denom = l2_norm(x_prev)
            change = l2_norm(x - x_prev) / denom if denom > 0 else l2_norm(x - x_prev)
        x_prev = x
        if change <= cfg.tol:
            break
    converged = change <= cfg.tol
    if not converged and not return_info:
        warnings.warn(
            f"fpg_prox: max_iter={cfg.max_iter} reached, achieved relative change {change:.3e}",
            RuntimeWarning,
        )
    if return_info:
        return x, {"iterations": iters, "rel_change": change, "converged": converged}
    return x


def tautstring_prox_1d(z, tau):
    """Exact 1D TV proximal operator (free-boundary differences).

    Taut-string construction: the output is the derivative of the tightest
    path through the tube of half-width tau around the running sums of z,
    tracked with linear lower/upper string segments. O(n) in practice.
    """
    z = validate_signal(z)
    if z.ndim != 1:
        raise ValueError("tautstring_prox_1d expects a 1D signal")
    if tau <= 0.0:
        raise ValueError(f"tau must be > 0, got {tau}")
    y = z
    n = y.size
    x = np.empty(n, dtype=np.float64)
    if n == 1:
        x[0] = y[0]
        return x

    # Taut-string walk with candidate lower/upper segment values (vmin, vmax),
    # their accumulated slack against the tube (umin, umax), and the sample
    # ranges k0..km / k0..kp the candidates currently cover.
    k = k0 = km = kp = 0
    vmin = y[0] - tau
    vmax = y[0] + tau
    umin = tau
    umax = -tau
    while True:
        if k == n - 1:
            # Tube collapses at the right endpoint: resolve leftover slack.
            if umin < 0.0:
                # Lower string would leave the tube: fix a segment at vmin.
                x[k0 : km + 1] = vmin
                k = k0 = km = km + 1
                vmin = y[k]
                umin = tau
                umax = y[k] + tau - vmax
                continue
            if umax > 0.0:
                x[k0 : kp + 1] = vmax
                k = k0 = kp = kp + 1
                vmax = y[k]
                umax = -tau
                umin = y[k] - tau - vmin
                continue
            x[k0:] = vmin + umin / (k - k0 + 1)
            return x
        if y[k + 1] + umin < vmin - tau:
            # Negative jump forced: emit the lower candidate segment.
            x[k0 : km + 1] = vmin
            k = k0 = km = kp = km + 1
            vmin = y[k]
            vmax = y[k] + 2.0 * tau
            umin = tau
            umax = -tau
        elif y[k + 1] + umax > vmax + tau:
            # Positive jump forced: emit the upper candidate segment.
            x[k0 : kp + 1] = vmax
            k = k0 = km = kp = kp + 1
            vmin = y[k] - 2.0 * tau
            vmax = y[k]
            umin = tau
            umax = -tau
        else:
            # No jump: extend both candidates, re-averaging when the slack
            # saturates the tube width.
            k += 1
            umin += y[k] - vmin
            umax += y[k] - vmax
            if umin >= tau:
                vmin += (umin - tau) / (k - k0 + 1)
                umin = tau
                km = k
            if umax <= -tau:
                vmax += (umax + tau) / (k - k0 + 1)
                umax = -tau
                kp = k


def prox_residual(z, x, tau, mode="aniso", boundary="circular", max_iter=5000):
    """Optimality residual of a candidate prox output.

    x = prox_{tau h}(z) exactly when (z - x)/tau is a subgradient of h at x,
    i.e. (z - x) = tau * D^T p with p dual-feasible and aligned with the
    nonzero entries/groups of Dx. The aligned components of p are pinned and
    the remaining free components are fitted by an accelerated projected
    least-squares solve; the returned value is the final misfit
    ||tau * D^T p - (z - x)||_2 (0 iff optimal, up to solver tolerance).
    """
    z = validate_signal(z)
    x = validate_signal(x)
    if z.shape != x.shape:
        raise ValueError(f"shape mismatch: {z.shape} vs {x.shape}")
    check_mode(mode)
    d = z.ndim
    g = _grad_op(x, boundary)
    w = z - x

    zero_tol = 1e-8 * (np.abs(g).max() + np.finfo(np.float64).tiny)
    if mode == "aniso":
        fixed = np.abs(g) > zero_tol
        p_fix = np.where(fixed, np.sign(g), 0.0)
    else:
        norms = np.sqrt((g**2).sum(axis=0))
        fixed = np.broadcast_to(norms > zero_tol, g.shape)
        p_fix = np.where(fixed, g / np.maximum(norms, zero_tol), 0.0)

    def clamp_free(p):
        return np.where(fixed, p_fix, _project_dual(np.where(fixed, 0.0, p), mode))

    step = 1.0 / (4.0 * d * tau**2)
    p = clamp_free(p_fix)
    q = p
    t_prev = 1.0
    res_prev = np.inf
    for _ in range(max_iter):
        misfit = tau * _grad_adjoint(q, boundary) - w
        p_new = clamp_free(q - step * tau * _grad_op(misfit, boundary))
        t = (1.0 + np.sqrt(1.0 + 4.0 * t_prev**2)) / 2.0
        q = p_new + ((t_prev - 1.0) / t) * (p_new - p)
        p, t_prev = p_new, t
        res = l2_norm(tau * _grad_adjoint(p, boundary) - w)
        if abs(res_prev - res) <= 1e-15 * (1.0 + res):
            break
        res_prev = res
    return l2_norm(tau * _grad_adjoint(p, boundary) - w)
