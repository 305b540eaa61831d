"""Test functions with optional rotation and their initial conditions.

Every function here accepts a single point of shape ``(n,)`` or a batch of
shape ``(k, n)`` and returns a float or an array of ``k`` values. Instances
are fully determined by ``(name, n, rotated, seed)``, which also makes up
the token form ``ellipsoid-d40-rot1-s7``.
"""
import re
import zlib
from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError

NAMES = ("sphere", "cigar", "discus", "ellipsoid", "twoaxes", "ellcig", "elldis",
         "rosenbrock", "bohachevsky", "rastrigin")
# functions defined on z = R x
_ROTATABLE = {"ellipsoid", "twoaxes", "rosenbrock", "bohachevsky", "rastrigin"}
# functions defined through a unit vector u
_UNIT = {"cigar", "discus", "ellcig", "elldis"}


def ell_scaling(n):
    """Diagonal of ``D_ell``: ``10**((i-1)/(n-1))``, or ``(1,)`` for ``n = 1``."""
    if n == 1:
        return np.ones(1)
    return 10.0 ** (np.arange(n) / (n - 1.0))


def _along(x, u):
    """Squared length of the component along ``u`` and of its orthogonal remainder."""
    a = x @ u
    rest = x - a[..., None] * u if np.ndim(a) else x - a * u
    return a * a, np.sum(rest * rest, axis=-1)


def sphere(x):
    return np.sum(x * x, axis=-1)


def cigar(x, u):
    par, orth = _along(x, u)
    return par + 1e6 * orth


def discus(x, u):
    par, orth = _along(x, u)
    return 1e6 * par + orth


def ellipsoid(z, d3):
    s = d3 * z
    return np.sum(s * s, axis=-1)


def twoaxes(z):
    h = z.shape[-1] // 2
    return 1e6 * np.sum(z[..., :h] ** 2, axis=-1) + np.sum(z[..., h:] ** 2, axis=-1)


def ellcig(x, u, d2):
    par, orth = _along(d2 * x, u)
    return 1e-4 * par + orth


def elldis(x, u, d2):
    par, orth = _along(d2 * x, u)
    return 1e4 * par + orth


def rosenbrock(z):
    a, b = z[..., :-1], z[..., 1:]
    return np.sum(100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2, axis=-1)


def bohachevsky(z):
    a, b = z[..., :-1], z[..., 1:]
    # 1 - cos form keeps every term >= 0 in floating point
    return np.sum(a * a + 2.0 * b * b + 0.3 * (1.0 - np.cos(3 * np.pi * a))
                  + 0.4 * (1.0 - np.cos(4 * np.pi * b)), axis=-1)


def rastrigin(z):
    return np.sum(z * z + 10.0 * (1.0 - np.cos(2 * np.pi * z)), axis=-1)


def make_rotation(n, rng):
    """Orthogonal matrix from Gram-Schmidt on standard normal columns.

    Columns are orthonormalized in order, each projected twice against the
    previous ones; a column that becomes numerically dependent is redrawn.
    """
    R = np.empty((n, n))
    for j in range(n):
        while True:
            v = rng.standard_normal(n)
            norm0 = np.linalg.norm(v)
            for _ in range(2):
                v = v - R[:, :j] @ (R[:, :j].T @ v)
            norm = np.linalg.norm(v)
            if norm > 1e-8 * norm0:
                break
        R[:, j] = v / norm
    return R


def random_unit(n, rng):
    while True:
        v = rng.standard_normal(n)
        norm = np.linalg.norm(v)
        if norm > 0:
            return v / norm


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    n: int
    rotated: bool
    seed: int
    rotation: Optional[np.ndarray]
    unit: Optional[np.ndarray]
    m0: np.ndarray
    sigma0: float
    base: Callable

    @property
    def token(self):
        return format_token(self.name, self.n, self.rotated, self.seed)

    def batch(self, X):
        """Evaluate the rows of ``X``."""
        X = np.asarray(X, dtype=float)
        if self.rotation is not None:
            X = X @ self.rotation.T
        return self.base(X)

    def evaluator(self, x):
        x = np.asarray(x, dtype=float)
        if self.rotation is not None:
            x = self.rotation @ x
        return float(self.base(x))

    __call__ = evaluator


def _instance_rng(name, n, rotated, seed):
    ss = np.random.SeedSequence([int(seed), zlib.crc32(name.encode()), int(n), int(rotated)])
    return np.random.Generator(np.random.PCG64(ss))


def base_function(name, n, unit=None):
    """Unrotated function ``name`` in dimension ``n`` (``unit`` defaults to e1)."""
    if name not in NAMES:
        raise ConfigurationError("unknown problem %r (choose from %s)" % (name, ", ".join(NAMES)))
    if unit is None:
        unit = np.zeros(n)
        unit[0] = 1.0
    d = ell_scaling(n)
    return {
        "sphere": sphere,
        "cigar": partial(cigar, u=unit),
        "discus": partial(discus, u=unit),
        "ellipsoid": partial(ellipsoid, d3=d ** 3),
        "twoaxes": twoaxes,
        "ellcig": partial(ellcig, u=unit, d2=d ** 2),
        "elldis": partial(elldis, u=unit, d2=d ** 2),
        "rosenbrock": rosenbrock,
        "bohachevsky": bohachevsky,
        "rastrigin": rastrigin,
    }[name]


def make_instance(name, n, rotated=False, seed=0, rng=None) -> ProblemSpec:
    """Build a problem instance.

    Randomness (rotation, unit vector, random initial mean) comes from
    ``rng`` when given, otherwise from a generator derived from
    ``(seed, name, n, rotated)``, so every algorithm sees the same instance.
    """
    if name not in NAMES:
        raise ConfigurationError("unknown problem %r (choose from %s)" % (name, ", ".join(NAMES)))
    if n < 1:
        raise ConfigurationError("dimension must be >= 1")
    rotated = bool(rotated)
    if rng is None:
        rng = _instance_rng(name, n, rotated, seed)
    R = make_rotation(n, rng) if rotated and name in _ROTATABLE else None
    u = None
    if name in _UNIT:
        if rotated or name in ("ellcig", "elldis"):
            u = random_unit(n, rng)
        else:
            u = np.zeros(n)
            u[0] = 1.0
    if name == "rosenbrock":
        m0, sigma0 = np.zeros(n), 0.1
    elif name == "bohachevsky":
        m0, sigma0 = 8.0 * rng.standard_normal(n), 7.0
    elif name == "rastrigin":
        m0, sigma0 = 3.0 * rng.standard_normal(n), 2.0
    else:
        m0, sigma0 = np.full(n, 3.0), 1.0
    return ProblemSpec(name=name, n=n, rotated=rotated, seed=int(seed), rotation=R,
                       unit=u, m0=m0, sigma0=sigma0, base=base_function(name, n, u))


def default_budget(name, n):
    """Evaluation budget: ``2e5 n`` on Rastrigin, ``5e4 n`` otherwise."""
    return int(2e5 * n) if name == "rastrigin" else int(5e4 * n)


_TOKEN = re.compile(r"^([a-z]+)-d(\d+)-rot([01])-s(-?\d+)$")


def format_token(name, n, rotated, seed):
    return "%s-d%d-rot%d-s%d" % (name, n, int(bool(rotated)), seed)


def parse_token(token):
    """``'ellipsoid-d40-rot1-s7'`` -> ``('ellipsoid', 40, True, 7)``."""
    match = _TOKEN.match(token.strip())
    if not match or match.group(1) not in NAMES:
        raise ConfigurationError("malformed instance token %r" % (token,))
    name, n, rot, seed = match.groups()
    return name, int(n), rot == "1", int(seed)


def from_token(token):
    return make_instance(*parse_token(token))
