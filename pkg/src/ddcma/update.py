"""Parameter update rules of one generation.

Functions take the current :class:`~ddcma.state.DistributionState` and
return new values; the driver in :mod:`ddcma.strategy` assigns them in the
prescribed order. ``w_pos`` always denotes per-rank tie-spread weights with
negatives zeroed, ``w`` the full per-rank weights.
"""
import math

import numpy as np

from . import linalg
from .errors import NumericalError

OFF, METHOD1, METHOD2 = "off", "method1", "method2"
ACTIVE_MODES = (OFF, METHOD1, METHOD2)

# alpha = 1 is certain when the guaranteed floor of d_n(K) is above this
_ALPHA_SAFE_FLOOR = -0.7


def update_mean(state, ranked, w_pos, c_m):
    return state.m + c_m * (w_pos @ (ranked.x - state.m))


def update_step_size(state, ranked, w_pos, params):
    """CSA. Returns ``(p_sigma, gamma_sigma, sigma, h_sigma)``."""
    cs = params.c_sigma
    p_sigma = (1.0 - cs) * state.p_sigma \
        + math.sqrt(cs * (2.0 - cs) * params.mu_eff) * (w_pos @ ranked.z)
    gamma_sigma = (1.0 - cs) ** 2 * state.gamma_sigma + cs * (2.0 - cs)
    norm = math.sqrt(float(p_sigma @ p_sigma))
    log_step = (cs / params.d_sigma) * (norm / params.chi_n - math.sqrt(gamma_sigma))
    try:
        sigma = state.sigma * math.exp(log_step)
    except OverflowError:
        raise NumericalError("step-size overflow") from None
    if not (math.isfinite(sigma) and sigma > 0):
        raise NumericalError("step-size left the representable range: %r" % sigma)
    return p_sigma, gamma_sigma, sigma, hsig(norm ** 2, gamma_sigma, state.n)


def hsig(p_sigma_sq, gamma_sigma, n):
    """1 unless the step-size path is long: ``|p|^2 / gamma >= (2 + 4/(n+1)) n``."""
    return 1 if p_sigma_sq / gamma_sigma < (2.0 + 4.0 / (n + 1)) * n else 0


def update_paths(state, ranked, w_pos, h_sigma, params):
    """Evolution paths for the C and D rank-one updates.

    Returns ``(p_c, gamma_c, p_cD, gamma_cD)``.
    """
    step = (w_pos @ ranked.y) * state.D
    out = []
    for p, g, cc in ((state.p_c, state.gamma_c, params.c_c),
                     (state.p_cD, state.gamma_cD, params.c_cD)):
        out.append((1.0 - cc) * p + h_sigma * math.sqrt(cc * (2.0 - cc) * params.mu_eff) * step)
        out.append((1.0 - cc) ** 2 * g + h_sigma * cc * (2.0 - cc))
    return tuple(out)


def rescale_steps(ranked, w):
    """Project negatively weighted steps onto ``||z|| = sqrt(n)``.

    Returns ``(z_tilde, y_tilde)``. A zero-length ``z`` is left as is.
    """
    z, y = ranked.z, ranked.y
    neg = w < 0
    if not neg.any():
        return z, y
    n = z.shape[1]
    norms = np.sqrt(np.einsum("ij,ij->i", z, z))
    scale = np.ones(len(w))
    sel = neg & (norms > 0)
    scale[sel] = math.sqrt(n) / norms[sel]
    return z * scale[:, None], y * scale[:, None]


def z_matrix(state, z_tilde, w, c1, cmu):
    """Update increment in the coordinates of the last decomposition."""
    n = state.n
    v = state.invsqrtC @ (state.p_c / state.D)
    Z = c1 * np.outer(v, v) + cmu * ((z_tilde.T * w) @ z_tilde)
    Z[np.diag_indices(n)] -= c1 * state.gamma_c + cmu * w.sum()
    return linalg.symmetrize(Z)


def z_floor(n, gamma_c, w, c1, cmu):
    """Guaranteed lower bound on the smallest eigenvalue of ``z_matrix``."""
    negsum = -w[w < 0].sum()
    return -(c1 * gamma_c + cmu * w.sum() + n * cmu * negsum)


def accumulate_Z(state, z_tilde, w, params):
    """Add this generation's increment to ``state.K``; returns ``K``."""
    Z = z_matrix(state, z_tilde, w, params.c_1, params.c_mu)
    state.K += Z
    state.K_floor += z_floor(state.n, state.gamma_c, w, params.c_1, params.c_mu)
    return state.K


def method1_alpha(K, floor=None):
    """``min(0.75 / |d_n(K)|, 1)``, one when ``d_n(K) >= 0``."""
    if floor is not None and floor >= _ALPHA_SAFE_FLOOR:
        return 1.0
    dn = linalg.min_eigenvalue(K)
    if dn >= 0:
        return 1.0
    return min(0.75 / abs(dn), 1.0)


def apply_cov_update(state, params, mode):
    """Fold the accumulated ``K`` into ``C``; returns ``(C, alpha)``."""
    if mode == METHOD1:
        alpha = method1_alpha(state.K, state.K_floor)
    else:
        alpha = 1.0
    n = state.n
    inner = alpha * state.K
    inner[np.diag_indices(n)] += 1.0
    C = linalg.symmetrize(state.sqrtC @ inner @ state.sqrtC)
    return C, alpha


def diag_exponent(state, z_tilde, w, params, det_preserving=False):
    v = state.invsqrtC @ (state.p_cD / state.D)
    delta = params.c_1D * (v * v - state.gamma_cD) \
        + params.c_muD * (w @ (z_tilde * z_tilde - 1.0))
    if det_preserving:
        delta = delta - delta.sum() / len(delta)
    return delta


def update_diag_decoding(state, z_tilde, w, params, det_preserving=False):
    """Multiplicative diagonal update ``D exp(delta / (2 beta))``."""
    with np.errstate(over="raise", invalid="raise"):
        try:
            delta = diag_exponent(state, z_tilde, w, params, det_preserving)
            D = state.D * np.exp(delta / (2.0 * state.beta))
        except FloatingPointError:
            raise NumericalError("overflow in diagonal decoding update") from None
    if not np.all(np.isfinite(D)) or np.any(D <= 0):
        raise NumericalError("diagonal decoding left the representable range")
    return D


def damping(eigenvalues, beta_thresh):
    return max(1.0, math.sqrt(eigenvalues[-1] / eigenvalues[0]) - beta_thresh + 1.0)


def renormalize_decompose(state, params, renormalize=True):
    """Force unit diagonal onto ``C`` (moving it into ``D``), decompose, refresh caches.

    Mutates ``state``: ``D``, ``C``, ``sqrtC``, ``invsqrtC``, ``beta``,
    ``eigenvalues``, and resets ``K``.
    """
    if renormalize:
        d = np.sqrt(np.diag(state.C))
        if not np.all(d > 0):
            raise linalg.DegeneracyError("non-positive diagonal entry in C")
        state.D = state.D * d
        state.C = linalg.symmetrize(state.C / np.outer(d, d))
        state.C[np.diag_indices(state.n)] = 1.0
    e = linalg.sym_eig(state.C)
    state.sqrtC, state.invsqrtC = linalg.sqrt_pair(e)
    state.eigenvalues = e.eigenvalues
    state.beta = damping(e.eigenvalues, params.beta_thresh)
    state.K = np.zeros_like(state.K)
    state.K_floor = 0.0
    state.t_last_decomp = state.t
    return state
