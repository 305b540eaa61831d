import numpy as np

from ddcma import linalg
from ddcma.state import Population, init_state, rank


def random_correlation(n, rng, spread=1.0):
    A = rng.standard_normal((n, n)) * spread + np.eye(n) * 2
    S = A @ A.T
    d = np.sqrt(np.diag(S))
    C = S / np.outer(d, d)
    C[np.diag_indices(n)] = 1.0
    return linalg.symmetrize(C)


def random_state(n, rng, correlated=True):
    """A state with non-trivial D, C, paths and correction factors."""
    s = init_state(n, rng.standard_normal(n), float(np.exp(rng.uniform(-2, 1))))
    s.D = np.exp(rng.uniform(-2, 2, n))
    s.C = random_correlation(n, rng) if correlated else np.eye(n)
    e = linalg.sym_eig(s.C)
    s.sqrtC, s.invsqrtC = linalg.sqrt_pair(e)
    s.eigenvalues = e.eigenvalues
    s.p_sigma, s.p_c, s.p_cD = (rng.standard_normal(n) for _ in range(3))
    s.gamma_sigma, s.gamma_c, s.gamma_cD = rng.uniform(0.1, 1.0, 3)
    return s


def ranked_population(s, lam, rng, f=None):
    from ddcma.state import sample
    pop = sample(s, lam, rng)
    pop.f = rng.random(lam) if f is None else np.asarray(f, dtype=float)
    return rank(pop)


def explicit_ranked(z, y=None, x=None):
    """Ranked population with the given rows already in rank order."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    y = z.copy() if y is None else np.atleast_2d(y)
    x = z.copy() if x is None else np.atleast_2d(x)
    pop = Population(z=z, y=y, x=x, f=np.arange(len(z), dtype=float))
    return rank(pop)
