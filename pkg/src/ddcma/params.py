"""Default strategy parameters computed from the dimension and population size."""
import dataclasses
import math
from dataclasses import dataclass

from .errors import ConfigurationError
from .weights import effective_masses, raw_weights


def default_lambda(n):
    return 4 + int(math.floor(3 * math.log(n)))


def expected_norm(n):
    """Approximation of E||N(0, I_n)||."""
    return math.sqrt(n) * (1.0 - 1.0 / (4 * n) + 1.0 / (21.0 * n * n))


def learning_rates(n, lam, mu_eff, dof):
    """Rank-one rate, rank-mu rate and cumulation factor for ``dof`` degrees of freedom."""
    c1 = 1.0 / (2.0 * (dof / n + 1.0) * (n + 1.0) ** 0.75 + mu_eff / 2.0)
    mu_prime = mu_eff + 1.0 / mu_eff - 2.0 + lam / (2.0 * (lam + 5.0))
    cmu = min(mu_prime * c1, 1.0 - c1)
    cc = math.sqrt(mu_eff * c1) / 2.0
    return c1, cmu, cc


def eig_interval(c1, cmu, beta_eig):
    return max(1, int(math.floor(1.0 / (beta_eig * (c1 + cmu)))))


@dataclass(frozen=True)
class StrategyParams:
    n: int
    lam: int
    mu_eff: float
    mu_eff_neg: float
    c_m: float
    c_sigma: float
    d_sigma: float
    c_1: float
    c_mu: float
    c_c: float
    c_1D: float
    c_muD: float
    c_cD: float
    t_eig: int
    beta_eig: float
    beta_thresh: float
    chi_n: float

    def __post_init__(self):
        self.validate()

    def validate(self):
        problems = []
        if self.n < 1:
            problems.append("n >= 1")
        if self.lam < 2:
            problems.append("lam >= 2")
        if not 0 < self.c_sigma < 1:
            problems.append("0 < c_sigma < 1")
        if not self.d_sigma >= 1:
            problems.append("d_sigma >= 1")
        if not 0 <= self.c_m <= 1:
            problems.append("0 <= c_m <= 1")
        for c1, cmu, cc, tag in ((self.c_1, self.c_mu, self.c_c, ""),
                                 (self.c_1D, self.c_muD, self.c_cD, "D")):
            if not 0 < c1 <= 1:
                problems.append("0 < c_1%s <= 1" % tag)
            if not 0 <= cmu <= 1 - c1 + 1e-15:
                problems.append("0 <= c_mu%s <= 1 - c_1%s" % (tag, tag))
            if not 0 < cc <= 1:
                problems.append("0 < c_c%s <= 1" % tag)
        if not (isinstance(self.t_eig, int) and self.t_eig >= 1):
            problems.append("integer t_eig >= 1")
        elif self.c_1 + self.c_mu > 0 and \
                self.t_eig > 1.0 / (self.beta_eig * (self.c_1 + self.c_mu)) + 1:
            problems.append("t_eig <= 1/(beta_eig (c_1 + c_mu)) + 1")
        if not self.beta_eig > 0:
            problems.append("beta_eig > 0")
        if not self.beta_thresh >= 1:
            problems.append("beta_thresh >= 1")
        if problems:
            raise ConfigurationError("invalid strategy parameters: " + ", ".join(problems))

    def replace(self, **changes):
        """Copy with some fields overridden; invariants are re-checked.

        Changing ``beta_eig`` without also giving ``t_eig`` recomputes
        ``t_eig`` from the new value.
        """
        if "beta_eig" in changes and "t_eig" not in changes:
            c1 = changes.get("c_1", self.c_1)
            cmu = changes.get("c_mu", self.c_mu)
            changes["t_eig"] = eig_interval(c1, cmu, changes["beta_eig"])
        return dataclasses.replace(self, **changes)

    def to_text(self):
        """Flat ``key=value`` block, one field per line, floats in repr precision."""
        lines = []
        for f in dataclasses.fields(self):
            lines.append("%s=%r" % (f.name, getattr(self, f.name)))
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text):
        kinds = {f.name: f.type for f in dataclasses.fields(cls)}
        values = {}
        for line in text.strip().splitlines():
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in kinds:
                raise ConfigurationError("unknown parameter %r" % key)
            values[key] = int(value) if kinds[key] in (int, "int") else float(value)
        return cls(**values)


def default_params(n, lam=None, beta_eig=None, beta_thresh=2.0) -> StrategyParams:
    """Default parameters for dimension ``n``.

    ``lam`` defaults to ``4 + floor(3 ln n)``, ``beta_eig`` to ``10 n``.
    """
    if n < 2:
        raise ConfigurationError("dimension must be >= 2, got %r" % (n,))
    if lam is None:
        lam = default_lambda(n)
    if lam < 2:
        raise ConfigurationError("population size must be >= 2, got %r" % (lam,))
    if beta_eig is None:
        beta_eig = 10.0 * n
    mu_eff, mu_eff_neg = effective_masses(raw_weights(lam))
    c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0)
    d_sigma = 1.0 + c_sigma + 2.0 * max(0.0, math.sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0)
    c1, cmu, cc = learning_rates(n, lam, mu_eff, n * (n + 1) / 2.0)
    c1D, cmuD, ccD = learning_rates(n, lam, mu_eff, float(n))
    return StrategyParams(
        n=n, lam=lam, mu_eff=mu_eff, mu_eff_neg=mu_eff_neg,
        c_m=1.0, c_sigma=c_sigma, d_sigma=d_sigma,
        c_1=c1, c_mu=cmu, c_c=cc, c_1D=c1D, c_muD=cmuD, c_cD=ccD,
        t_eig=eig_interval(c1, cmu, beta_eig), beta_eig=float(beta_eig),
        beta_thresh=float(beta_thresh), chi_n=expected_norm(n),
    )
