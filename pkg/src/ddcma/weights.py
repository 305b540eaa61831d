"""Recombination weights with positive and negative (active) parts.

The raw weights are ``ln((lam + 1) / 2) - ln(i)`` for ranks ``i = 1..lam``.
The positive ones are normalized to sum to one; the negative ones are
normalized so that their absolute values sum to
``min(1 + c1/cmu, 1 + 2 mueff_neg / (mueff + 2))``. A raw weight that is
exactly zero (odd ``lam``) stays zero.
"""
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class WeightProfile:
    raw: np.ndarray
    final: np.ndarray
    mu: int
    mu_eff: float
    mu_eff_neg: float

    @property
    def lam(self):
        return len(self.final)

    @property
    def positive(self):
        """Final weights with negatives replaced by zero."""
        return np.where(self.final > 0, self.final, 0.0)

    def negative_abs_sum(self):
        return float(-self.final[self.final < 0].sum())

    def without_negatives(self):
        return replace(self, final=self.positive)


def raw_weights(lam):
    if lam < 2:
        raise ConfigurationError("population size must be >= 2, got %r" % (lam,))
    return math.log((lam + 1) / 2.0) - np.log(np.arange(1, lam + 1))


def effective_masses(raw):
    """Variance effective selection masses ``(mu_eff, mu_eff_neg)``.

    ``mu_eff_neg`` is 0 when there are no negative raw weights.
    """
    pos = raw[raw > 0]
    neg = -raw[raw < 0]
    mu_eff = pos.sum() ** 2 / (pos ** 2).sum()
    mu_eff_neg = neg.sum() ** 2 / (neg ** 2).sum() if len(neg) else 0.0
    return float(mu_eff), float(mu_eff_neg)


def build_weights(lam, ratio) -> WeightProfile:
    """Finalize the weights for ``lam`` candidates.

    ``ratio`` is ``c1 / cmu`` (or the D-update analogue) and caps the total
    negative mass at ``1 + ratio``.
    """
    raw = raw_weights(lam)
    mu_eff, mu_eff_neg = effective_masses(raw)
    pos = raw > 0
    neg = raw < 0
    final = np.zeros(lam)
    final[pos] = raw[pos] / raw[pos].sum()
    if neg.any():
        scale = min(1.0 + ratio, 1.0 + 2.0 * mu_eff_neg / (mu_eff + 2.0))
        final[neg] = raw[neg] / (-raw[neg].sum()) * scale
    return WeightProfile(raw=raw, final=final, mu=int(pos.sum()),
                         mu_eff=mu_eff, mu_eff_neg=mu_eff_neg)


def method2_alpha(p: WeightProfile, c1, cmu, t_eig, n):
    """Unclipped down-scaling factor for the negative weights.

    Solves ``1/t_eig = c1 + cmu + n cmu alpha sum|w-|`` for ``alpha``; with
    positive weights summing to one, any ``alpha`` up to this value keeps
    ``c1 + cmu sum(w) + n cmu sum|w-|`` strictly below ``1/t_eig``.
    """
    slack = 1.0 / t_eig - (c1 + cmu)
    if not slack > 0:
        raise ConfigurationError(
            "1/t_eig = %r must exceed c1 + cmu = %r" % (1.0 / t_eig, c1 + cmu))
    negsum = p.negative_abs_sum()
    if negsum == 0 or cmu == 0:
        return math.inf
    return slack / (n * cmu * negsum)


def method2_scale(p: WeightProfile, c1, cmu, t_eig, n) -> WeightProfile:
    alpha = min(1.0, method2_alpha(p, c1, cmu, t_eig, n))
    if alpha == 1.0:
        return p
    final = np.where(p.final < 0, alpha * p.final, p.final)
    return replace(p, final=final)


def contraction_margin(final, c1, cmu, t_eig, n):
    """``1 - t_eig (c1 + cmu sum(w) + n cmu sum|w-|)``.

    A positive value is the guaranteed lower bound factor on the covariance
    contraction between two decompositions.
    """
    final = np.asarray(final)
    negsum = -final[final < 0].sum()
    return 1.0 - t_eig * (c1 + cmu * final.sum() + n * cmu * negsum)
