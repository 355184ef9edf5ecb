"""Closed-form scalar bounds for state-dependent cloning.

Everything in this module is a deterministic pure function of its inputs:
the optimal quantum cloning fidelity for a pair of pure states with a given
confusability, the maximum fidelity any preparation-noncontextual model can
reach (ideal, noise-robust, and the stronger symmetric variant), the
noncontextual state-discrimination ceiling, and the error budgets induced
by a depolarizing channel acting on every stage of the experiment.

Conventions: ``c_ab`` is the confusability of the two input preparations
(squared overlap in the ideal quantum realisation), ``c_aabb`` the
confusability of the two ideal two-copy targets, and ``eps_*`` the
worst-case deviation of each test measurement from perfect correlation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _check_unit(name: str, x: float) -> float:
    """Validate that ``x`` is a finite probability in [0, 1]."""
    x = float(x)
    if not math.isfinite(x) or x < 0.0 or x > 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return x


@dataclass(frozen=True)
class OverlapParams:
    """Observed confusabilities feeding the noncontextual bounds.

    ``c_ab``/``c_ba``: input pair, both directions.  ``c_aabb``/``c_bbaa``:
    two-copy target pair.  All four are probabilities; the symmetric
    quantum experiment has ``c_ab == c_ba`` and ``c_aabb == c_bbaa == c_ab**2``.
    """

    c_ab: float
    c_ba: float
    c_aabb: float
    c_bbaa: float

    def __post_init__(self) -> None:
        for name in ("c_ab", "c_ba", "c_aabb", "c_bbaa"):
            _check_unit(name, getattr(self, name))

    @classmethod
    def symmetric(cls, c: float) -> "OverlapParams":
        """Overlaps of the ideal symmetric experiment: c both ways, c**2 for the copies."""
        c = _check_unit("c", c)
        return cls(c_ab=c, c_ba=c, c_aabb=c * c, c_bbaa=c * c)


@dataclass(frozen=True)
class ErrorBudget:
    """Per-preparation noise allowances eps_s for the six test measurements.

    eps_s bounds both the shortfall of p(pass | matching preparation) from 1
    and the leak p(pass | orthogonal preparation).
    """

    eps_a: float
    eps_b: float
    eps_alpha: float
    eps_beta: float
    eps_aa: float
    eps_bb: float

    def __post_init__(self) -> None:
        for name in self.__dataclass_fields__:
            _check_unit(name, getattr(self, name))

    @classmethod
    def zero(cls) -> "ErrorBudget":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    @classmethod
    def uniform(cls, eps: float) -> "ErrorBudget":
        eps = _check_unit("eps", eps)
        return cls(eps, eps, eps, eps, eps, eps)


@dataclass(frozen=True)
class BoundValue:
    """A fidelity bound, kept raw even when it exceeds 1.

    ``clamped`` marks a vacuous bound (raw value above 1 for a generous
    error budget).  The raw value is retained so that monotonicity in the
    budget remains visible; use :attr:`capped` where a probability is needed.
    """

    value: float
    clamped: bool

    @property
    def capped(self) -> float:
        return min(self.value, 1.0)

    @staticmethod
    def of(raw: float) -> "BoundValue":
        if not math.isfinite(raw):
            raise ValueError(f"bound must be finite, got {raw!r}")
        return BoundValue(value=raw, clamped=raw > 1.0)


def quantum_optimal_fidelity(c_ab: float) -> float:
    """Best global cloning fidelity quantum mechanics allows for confusability ``c_ab``.

    Evaluates (1/4) * [sqrt((1+c)(1+sqrt(c))) + sqrt((1-c)(1-sqrt(c)))]**2,
    the optimal two-state cloner's average probability of passing the ideal
    two-copy tests.  Equals 1 at both endpoints (orthogonal or identical
    inputs clone perfectly) and stays within [1/2, 1] in between.
    """
    c = _check_unit("c_ab", c_ab)
    rc = math.sqrt(c)
    bracket = math.sqrt((1.0 + c) * (1.0 + rc)) + math.sqrt((1.0 - c) * (1.0 - rc))
    return 0.25 * bracket * bracket


def nc_bound_ideal(c_ab: float, c_aabb: float) -> float:
    """Noncontextual ceiling on the global cloning fidelity, ideal correlations.

    1 - c_ab/2 + c_aabb/2: any preparation-noncontextual model that
    reproduces perfect test correlations and the two mixing equivalences
    cannot clone better than this.
    """
    c_ab = _check_unit("c_ab", c_ab)
    c_aabb = _check_unit("c_aabb", c_aabb)
    return 1.0 - 0.5 * c_ab + 0.5 * c_aabb


def nc_bound_noisy(ov: OverlapParams, eb: ErrorBudget) -> BoundValue:
    """Noise-robust noncontextual ceiling.

    Adds (eps_b + 2*eps_bb + eps_aa)/2 to the ideal bound; reduces to it
    exactly for a zero budget.
    """
    err = 0.5 * (eb.eps_b + 2.0 * eb.eps_bb + eb.eps_aa)
    return BoundValue.of(1.0 - 0.5 * ov.c_ab + 0.5 * ov.c_aabb + err)


def nc_bound_noisy_symmetric(ov: OverlapParams, eb: ErrorBudget) -> BoundValue:
    """Stronger, exchange-symmetric form of the noise-robust ceiling.

    1 + min(eps_b - c_ab, eps_a - c_ba)/2
      + min(c_aabb + eps_bb, c_bbaa + eps_aa)/2
      + (eps_aa + eps_bb)/2

    Never exceeds :func:`nc_bound_noisy` on the same inputs.
    """
    term_in = min(eb.eps_b - ov.c_ab, eb.eps_a - ov.c_ba)
    term_out = min(ov.c_aabb + eb.eps_bb, ov.c_bbaa + eb.eps_aa)
    raw = 1.0 + 0.5 * term_in + 0.5 * term_out + 0.5 * (eb.eps_aa + eb.eps_bb)
    return BoundValue.of(raw)


def nc_discrimination_bound(c_ab: float, eps_b: float = 0.0) -> float:
    """Noncontextual ceiling on the success probability of distinguishing the inputs.

    1 - (c_ab - eps_b)/2; the ideal case (eps_b = 0) gives 1 - c_ab/2.
    """
    c_ab = _check_unit("c_ab", c_ab)
    eps_b = _check_unit("eps_b", eps_b)
    return 1.0 - 0.5 * (c_ab - eps_b)


def depolarizing_epsilons(v: float) -> ErrorBudget:
    """Error budget induced by depolarizing every stage at noise level ``v``.

    Single-copy tests degrade as v - v**2/2 (state and effect each pick up
    one factor of noise); two-copy and clone-output tests degrade as
    (3/4) * v * (3 - 3v + v**2) (the preparation passes the channel twice,
    the effect once).
    """
    v = _check_unit("v", v)
    eps_single = v - 0.5 * v * v
    eps_double = 0.75 * v * (3.0 - 3.0 * v + v * v)
    return ErrorBudget(
        eps_a=eps_single,
        eps_b=eps_single,
        eps_alpha=eps_double,
        eps_beta=eps_double,
        eps_aa=eps_double,
        eps_bb=eps_double,
    )


@dataclass(frozen=True)
class ErrTerms:
    """Every published form of the depolarizing error term, side by side.

    The source material is internally inconsistent about which combination
    of epsilons enters the noise-robust bound, so all variants are computed
    and none is silently preferred:

    * ``err_thm2``:     (eps_b + 2*eps_bb + eps_aa)/2 with the depolarizing
                        budget, i.e. v*(31 - 29v + 9v**2)/8.
    * ``err_appendix``: v*(31 - 29v + 9v**2)/2, the printed sum of all six
                        epsilons (with the two-copy ones doubled).
    * ``err_prime``:    v*(31 - 21v + 9v**2)/8, the printed symmetric form.
    * ``eps_effective``: v*(31 - 21v + 9v**2)/16, the single equivalent
                        epsilon whose uniform budget gives ``err_prime``.
    """

    err_thm2: float
    err_appendix: float
    err_prime: float
    eps_effective: float


def err_terms(v: float) -> ErrTerms:
    """All depolarizing-noise error-term variants at noise level ``v``."""
    v = _check_unit("v", v)
    eb = depolarizing_epsilons(v)
    return ErrTerms(
        err_thm2=0.5 * (eb.eps_b + 2.0 * eb.eps_bb + eb.eps_aa),
        err_appendix=0.5 * v * (31.0 - 29.0 * v + 9.0 * v * v),
        err_prime=0.125 * v * (31.0 - 21.0 * v + 9.0 * v * v),
        eps_effective=v * (31.0 - 21.0 * v + 9.0 * v * v) / 16.0,
    )


def quantum_noisy_fidelity(v: float, c_ab: float) -> float:
    """Global fidelity of the noiseless-optimal cloner run at depolarizing level ``v``.

    (1-v)**3 * quantum_optimal_fidelity(c_ab) + v*(3 - 3v + v**2)/4.
    Coincides with the optimal fidelity at v = 0 and collapses to 1/4 at
    v = 1 (a fully depolarized state tested with a trace-one effect).
    """
    v = _check_unit("v", v)
    one_mv = 1.0 - v
    return one_mv**3 * quantum_optimal_fidelity(c_ab) + 0.25 * v * (3.0 - 3.0 * v + v * v)
