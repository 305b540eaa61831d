"""Ask/tell driver for plain, separable and diagonal-decoding CMA-ES.

Example
-------
>>> import numpy as np
>>> from ddcma import DDCMA
>>> es = DDCMA(np.full(5, 3.0), 1.0, seed=1)
>>> while es.should_stop() == "running":
...     X = es.ask()
...     es.tell([float(x @ x) for x in X])
>>> es.best_f <= 1e-8
True
"""
import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import update
from .errors import ConfigurationError, NumericalError, ProtocolError
from .params import StrategyParams, default_params
from .state import (CHECKPOINT_VERSION, DistributionState, hexs, init_state, rank,
                    sample, state_from_dict, state_to_lines, unhex)
from .update import ACTIVE_MODES, METHOD1, METHOD2, OFF
from .weights import build_weights, method2_scale

PLAIN, SEPARABLE, DD = "plain", "sep", "dd"
VARIANTS = (PLAIN, SEPARABLE, DD)
_ALIASES = {"separable": SEPARABLE, "ddcma": DD, "dd-cma": DD}


def canonical_variant(name):
    name = _ALIASES.get(name, name)
    if name not in VARIANTS:
        raise ConfigurationError("unknown variant %r (choose from %s)" % (name, ", ".join(VARIANTS)))
    return name


class Status(str, enum.Enum):
    RUNNING = "running"
    TARGET_REACHED = "target_reached"
    BUDGET_EXHAUSTED = "budget_exhausted"
    DEGENERATE = "degenerate"

    def __str__(self):
        return self.value


@dataclass
class TerminationCriteria:
    target_f: float = 1e-8
    max_evals: Optional[int] = None     # None means 5e4 * n
    min_sigma: float = 1e-30
    max_cond: float = 1e14

    def resolved(self, n):
        max_evals = int(5e4 * n) if self.max_evals is None else int(self.max_evals)
        if max_evals < 0:
            raise ConfigurationError("max_evals must be >= 0")
        return TerminationCriteria(self.target_f, max_evals, self.min_sigma, self.max_cond)


@dataclass
class OptimizerConfig:
    """Which parts of the update run.

    ``update_c`` / ``update_d`` default from ``variant``: plain adapts only
    C, sep only D, dd both. Setting them explicitly switches single
    components off for ablations.
    """

    variant: str = DD
    active_mode: str = METHOD1
    det_preserving: bool = False
    params: Optional[StrategyParams] = None
    termination: TerminationCriteria = field(default_factory=TerminationCriteria)
    update_c: Optional[bool] = None
    update_d: Optional[bool] = None

    def __post_init__(self):
        self.variant = canonical_variant(self.variant)
        if self.active_mode not in ACTIVE_MODES:
            raise ConfigurationError("unknown active mode %r" % (self.active_mode,))
        if self.update_c is None:
            self.update_c = self.variant in (PLAIN, DD)
        if self.update_d is None:
            self.update_d = self.variant in (SEPARABLE, DD)


class DDCMA:
    """CMA-ES with active update and adaptive diagonal decoding.

    Parameters
    ----------
    m0, sigma0
        Initial mean and step-size.
    config
        :class:`OptimizerConfig`; defaults to the dd variant with Method-1
        active update and default parameters for ``len(m0)``.
    seed
        Seed of the normal deviates (``numpy`` PCG64).
    """

    def __init__(self, m0, sigma0, config=None, seed=None):
        m0 = np.asarray(m0, dtype=float).reshape(-1)
        n = len(m0)
        config = config or OptimizerConfig()
        if config.params is None:
            config = dataclasses.replace(config, params=default_params(n))
        if config.params.n != n:
            raise ConfigurationError("params are for n=%d but m0 has length %d" % (config.params.n, n))
        self.config = config
        self.params = config.params
        self.termination = config.termination.resolved(n)
        self.state = init_state(n, m0, sigma0)
        self.seed = seed
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self._setup_weights()
        self.evals = 0
        self.best_f = math.inf
        self.best_x = m0.copy()
        self.failure = None
        self.last_alpha = 1.0
        self._pending = None

    def _setup_weights(self):
        p = self.params
        wc = build_weights(p.lam, p.c_1 / p.c_mu if p.c_mu > 0 else math.inf)
        wd = build_weights(p.lam, p.c_1D / p.c_muD if p.c_muD > 0 else math.inf)
        mode = self.config.active_mode
        if mode == OFF:
            wc, wd = wc.without_negatives(), wd.without_negatives()
        elif mode == METHOD2 and self.config.update_c:
            wc = method2_scale(wc, p.c_1, p.c_mu, p.t_eig, p.n)
        self.weights_c, self.weights_d = wc, wd
        self._w_pos = wc.positive

    @property
    def n(self):
        return self.state.n

    @property
    def lam(self):
        return self.params.lam

    @property
    def t(self):
        return self.state.t

    def ask(self):
        """Sample ``lam`` candidates; returns an array of shape ``(lam, n)``."""
        if self._pending is not None:
            raise ProtocolError("ask called twice without tell")
        if self.failure is not None:
            raise ProtocolError("optimizer failed: %s" % self.failure)
        self._pending = sample(self.state, self.lam, self.rng)
        return self._pending.x.copy()

    def tell(self, f_values):
        """Rank the pending generation by ``f_values`` and update the distribution."""
        pop = self._pending
        if pop is None:
            raise ProtocolError("tell called without a pending ask")
        f = np.asarray(f_values, dtype=float).reshape(-1)
        if len(f) != len(pop):
            raise ProtocolError("expected %d objective values, got %d" % (len(pop), len(f)))
        pop.f = f
        ranked = rank(pop)
        self._pending = None
        self.evals += len(f)
        if ranked.f[0] < self.best_f:
            self.best_f = float(ranked.f[0])
            self.best_x = ranked.x[0].copy()
        try:
            self._update(ranked)
        except NumericalError as exc:
            self.failure = str(exc)

    def _update(self, ranked):
        s, p, cfg = self.state, self.params, self.config
        w_pos = ranked.spread(self._w_pos)
        s.m = update.update_mean(s, ranked, w_pos, p.c_m)
        s.p_sigma, s.gamma_sigma, s.sigma, h_sigma = update.update_step_size(s, ranked, w_pos, p)
        s.p_c, s.gamma_c, s.p_cD, s.gamma_cD = update.update_paths(s, ranked, w_pos, h_sigma, p)
        z_tilde = neg = None
        if cfg.update_c:
            w = ranked.spread(self.weights_c.final)
            z_tilde, _ = update.rescale_steps(ranked, w)
            neg = w < 0
            update.accumulate_Z(s, z_tilde, w, p)
        if cfg.update_d:
            w = ranked.spread(self.weights_d.final)
            if neg is None or not np.array_equal(neg, w < 0):
                z_tilde, _ = update.rescale_steps(ranked, w)
            s.D = update.update_diag_decoding(s, z_tilde, w, p, cfg.det_preserving)
        s.t += 1
        if cfg.update_c and s.t % p.t_eig == 0:
            s.C, self.last_alpha = update.apply_cov_update(s, p, cfg.active_mode)
            update.renormalize_decompose(s, p, renormalize=cfg.update_d)

    def cond(self):
        """Condition number of C at the last decomposition."""
        ev = self.state.eigenvalues
        return float(ev[-1] / ev[0])

    def should_stop(self) -> Status:
        term = self.termination
        if self.best_f <= term.target_f:
            return Status.TARGET_REACHED
        if self.failure is not None or self.state.sigma < term.min_sigma \
                or not self.cond() <= term.max_cond:
            return Status.DEGENERATE
        if self.evals >= term.max_evals:
            return Status.BUDGET_EXHAUSTED
        return Status.RUNNING

    def recommend(self):
        """Best evaluated candidate so far."""
        return self.best_x.copy()

    def log_line(self):
        s = self.state
        return "\t".join(repr(v) for v in (
            s.t, self.evals, self.best_f, s.sigma, s.beta, self.cond(),
            float(s.D.min()), float(s.D.max())))

    # -- checkpointing --------------------------------------------------------

    def checkpoint(self):
        """Serialize the full optimizer to versioned flat text (hex floats)."""
        if self._pending is not None:
            raise ProtocolError("cannot checkpoint between ask and tell")
        cfg, term = self.config, self.termination
        rs = self.rng.bit_generator.state
        lines = [
            "ddcma-checkpoint %d" % CHECKPOINT_VERSION,
            "config.variant=%s" % cfg.variant,
            "config.active_mode=%s" % cfg.active_mode,
            "config.det_preserving=%d" % cfg.det_preserving,
            "config.update_c=%d" % cfg.update_c,
            "config.update_d=%d" % cfg.update_d,
            "term.target_f=%s" % float(term.target_f).hex(),
            "term.max_evals=%d" % term.max_evals,
            "term.min_sigma=%s" % float(term.min_sigma).hex(),
            "term.max_cond=%s" % float(term.max_cond).hex(),
        ]
        lines += ["params." + ln for ln in self.params.to_text().splitlines()]
        lines += [
            "run.seed=%s" % ("" if self.seed is None else self.seed),
            "run.evals=%d" % self.evals,
            "run.best_f=%s" % float(self.best_f).hex(),
            "run.best_x=%s" % hexs(self.best_x),
            "run.failure=%s" % (self.failure or ""),
            "rng.state=%d" % rs["state"]["state"],
            "rng.inc=%d" % rs["state"]["inc"],
            "rng.has_uint32=%d" % rs["has_uint32"],
            "rng.uinteger=%d" % rs["uinteger"],
        ]
        lines += ["state." + ln for ln in state_to_lines(self.state)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_checkpoint(cls, text):
        rows = text.splitlines()
        if not rows or rows[0].strip() != "ddcma-checkpoint %d" % CHECKPOINT_VERSION:
            raise ConfigurationError("not a version %d ddcma checkpoint" % CHECKPOINT_VERSION)
        sections = {}
        for row in rows[1:]:
            if not row.strip():
                continue
            key, _, value = row.partition("=")
            group, _, name = key.partition(".")
            sections.setdefault(group, {})[name] = value
        c, t, r, g = sections["config"], sections["term"], sections["run"], sections["rng"]
        params = StrategyParams.from_text(
            "\n".join("%s=%s" % kv for kv in sections["params"].items()))
        term = TerminationCriteria(float.fromhex(t["target_f"]), int(t["max_evals"]),
                                   float.fromhex(t["min_sigma"]), float.fromhex(t["max_cond"]))
        config = OptimizerConfig(variant=c["variant"], active_mode=c["active_mode"],
                                 det_preserving=bool(int(c["det_preserving"])), params=params,
                                 termination=term, update_c=bool(int(c["update_c"])),
                                 update_d=bool(int(c["update_d"])))
        state = state_from_dict(sections["state"])
        self = cls.__new__(cls)
        self.config, self.params, self.termination = config, params, term
        self.state = state
        self.seed = int(r["seed"]) if r["seed"] else None
        self.rng = np.random.Generator(np.random.PCG64())
        self.rng.bit_generator.state = {
            "bit_generator": "PCG64",
            "state": {"state": int(g["state"]), "inc": int(g["inc"])},
            "has_uint32": int(g["has_uint32"]), "uinteger": int(g["uinteger"]),
        }
        self._setup_weights()
        self.evals = int(r["evals"])
        self.best_f = float.fromhex(r["best_f"])
        self.best_x = unhex(r["best_x"])
        self.failure = r["failure"] or None
        self.last_alpha = 1.0
        self._pending = None
        return self


def fmin(objective, m0, sigma0, config=None, seed=None, callback=None):
    """Minimize ``objective`` until a termination criterion fires.

    Returns ``(best_x, best_f, optimizer)``.
    """
    es = DDCMA(m0, sigma0, config=config, seed=seed)
    while es.should_stop() == Status.RUNNING:
        X = es.ask()
        es.tell([objective(x) for x in X])
        if callback is not None:
            callback(es)
    return es.recommend(), es.best_f, es
