"""Distribution state, population sampling and ranking.

Sampling follows ``z ~ N(0, I)``, ``y = sqrtC z``, ``x = m + sigma D y``
with the square root cached from the last decomposition.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, EvaluationError

CHECKPOINT_VERSION = 1


@dataclass
class DistributionState:
    m: np.ndarray
    sigma: float
    D: np.ndarray                # diagonal entries only
    C: np.ndarray
    sqrtC: np.ndarray
    invsqrtC: np.ndarray
    p_sigma: np.ndarray
    p_c: np.ndarray
    p_cD: np.ndarray
    gamma_sigma: float = 0.0
    gamma_c: float = 0.0
    gamma_cD: float = 0.0
    beta: float = 1.0
    K: np.ndarray = None
    K_floor: float = 0.0             # guaranteed lower bound of min eig(K)
    t: int = 0
    t_last_decomp: int = 0
    eigenvalues: np.ndarray = None   # of C at the last decomposition

    @property
    def n(self):
        return len(self.m)

    def covariance(self):
        """Sampling covariance ``sigma^2 D C D`` (without the deferred K)."""
        return self.sigma ** 2 * (self.D[:, None] * self.C * self.D[None, :])

    def copy(self):
        return DistributionState(**{k: (v.copy() if isinstance(v, np.ndarray) else v)
                                    for k, v in self.__dict__.items()})


def init_state(n, m0, sigma0) -> DistributionState:
    m0 = np.array(m0, dtype=float).reshape(-1)
    if len(m0) != n:
        raise ConfigurationError("initial mean has length %d, expected %d" % (len(m0), n))
    if not np.all(np.isfinite(m0)):
        raise ConfigurationError("initial mean must be finite")
    if not (np.isfinite(sigma0) and sigma0 > 0):
        raise ConfigurationError("initial step-size must be > 0, got %r" % (sigma0,))
    eye = np.eye(n)
    return DistributionState(
        m=m0, sigma=float(sigma0), D=np.ones(n),
        C=eye.copy(), sqrtC=eye.copy(), invsqrtC=eye.copy(),
        p_sigma=np.zeros(n), p_c=np.zeros(n), p_cD=np.zeros(n),
        K=np.zeros((n, n)), eigenvalues=np.ones(n),
    )


@dataclass
class Population:
    """One generation; rows of ``z``, ``y``, ``x`` are candidates."""

    z: np.ndarray
    y: np.ndarray
    x: np.ndarray
    f: np.ndarray = None

    def __len__(self):
        return len(self.z)


def transform(state, z):
    """Map rows of standard normal ``z`` to ``(y, x)``."""
    y = z @ state.sqrtC       # sqrtC is symmetric
    x = state.m + state.sigma * (y * state.D)
    return y, x


def sample(state, lam, rng) -> Population:
    z = rng.standard_normal((lam, state.n))
    y, x = transform(state, z)
    return Population(z=z, y=y, x=x)


@dataclass
class RankedPopulation:
    """Candidates sorted by ascending f, with tie groups.

    ``ties`` lists ``(start, stop)`` slices of exactly equal f-values of
    length > 1 in sorted order.
    """

    order: np.ndarray
    z: np.ndarray
    y: np.ndarray
    x: np.ndarray
    f: np.ndarray
    ties: list = field(default_factory=list)

    def __len__(self):
        return len(self.order)

    def spread(self, w):
        """Per-rank weights with each tie group receiving its average weight."""
        w = np.asarray(w, dtype=float)
        if not self.ties:
            return w
        w = w.copy()
        for a, b in self.ties:
            w[a:b] = w[a:b].sum() / (b - a)
        return w


def rank(pop: Population) -> RankedPopulation:
    f = np.asarray(pop.f, dtype=float)
    bad = np.flatnonzero(~np.isfinite(f))
    if len(bad):
        raise EvaluationError("objective value %r of candidate %d is not finite"
                              % (f[bad[0]], bad[0]), index=int(bad[0]))
    order = np.argsort(f, kind="stable")
    fs = f[order]
    ties = []
    if len(fs) > 1:
        eq = fs[1:] == fs[:-1]
        if eq.any():
            i = 0
            while i < len(fs):
                j = i + 1
                while j < len(fs) and fs[j] == fs[i]:
                    j += 1
                if j - i > 1:
                    ties.append((i, j))
                i = j
    return RankedPopulation(order=order, z=pop.z[order], y=pop.y[order],
                            x=pop.x[order], f=fs, ties=ties)


# -- flat text serialization ------------------------------------------------

_VECTORS = ("m", "D", "p_sigma", "p_c", "p_cD", "eigenvalues")
_MATRICES = ("C", "sqrtC", "invsqrtC", "K")
_FLOATS = ("sigma", "gamma_sigma", "gamma_c", "gamma_cD", "beta", "K_floor")
_INTS = ("t", "t_last_decomp")


def hexs(values):
    return " ".join(float(v).hex() for v in np.ravel(values))


def unhex(text):
    return np.array([float.fromhex(tok) for tok in text.split()], dtype=float)


def state_to_lines(state):
    lines = ["n=%d" % state.n]
    for k in _INTS:
        lines.append("%s=%d" % (k, getattr(state, k)))
    for k in _FLOATS:
        lines.append("%s=%s" % (k, float(getattr(state, k)).hex()))
    for k in _VECTORS + _MATRICES:
        lines.append("%s=%s" % (k, hexs(getattr(state, k))))
    return lines


def state_from_dict(d):
    n = int(d["n"])
    kw = {}
    for k in _INTS:
        kw[k] = int(d[k])
    for k in _FLOATS:
        kw[k] = float.fromhex(d[k])
    for k in _VECTORS:
        kw[k] = unhex(d[k])
    for k in _MATRICES:
        kw[k] = unhex(d[k]).reshape(n, n)
    return DistributionState(**kw)
