"""Step-size rules for the conditional-gradient solvers.

Four families: the function-agnostic ``2/(2+t)`` schedule (the only rule
compatible with exact rational runs out of the box), the short step from
a known smoothness constant, its exact-rational twin, an adaptive
backtracking rule that estimates the smoothness constant on the fly (the
default for all deterministic solvers), and a golden-section segment
line search used by the blended solver's in-hull descent steps.
"""

import math
from fractions import Fraction

import numpy as np

from cgkit.atoms import dense_inner

__all__ = [
    "agnostic_step",
    "short_step",
    "rational_short_step",
    "adaptive_step",
    "segment_line_search",
    "StepRule",
    "AgnosticStep",
    "ShortStep",
    "RationalShortStep",
    "AdaptiveStep",
    "LineSearchStep",
]

GOLDEN_RATIO_CONJ = (math.sqrt(5.0) - 1.0) / 2.0


def agnostic_step(t, exact=False):
    """Open-loop schedule ``2 / (2 + t)``; exact Fraction on request."""
    if t < 0:
        raise ValueError("iteration index must be nonnegative")
    if exact:
        return Fraction(2, 2 + t)
    return 2.0 / (2.0 + t)


def _clamp(value, low, high):
    if value < low:
        return low
    if value > high:
        return high
    return value


def short_step(gap, diff_norm_sq, lipschitz, gamma_max, l_factor=1):
    """Minimizer of the smoothness upper bound along the step segment:
    ``clamp(gap / (l_factor * L * |x - v|^2), 0, gamma_max)``.

    ``l_factor`` defaults to 1 (the standard minimizer); set it to 2 to
    reproduce the halved-step convention some texts print.  Stays exact
    when all inputs are rational.
    """
    if gap < 0:
        raise ValueError("gap must be nonnegative")
    if lipschitz <= 0:
        raise ValueError("smoothness constant must be positive")
    if diff_norm_sq == 0:
        return gamma_max * 0  # stationary direction, typed zero
    raw = gap / (l_factor * lipschitz * diff_norm_sq)
    return _clamp(raw, gamma_max * 0, gamma_max)


def rational_short_step(gap, diff_norm_sq, lipschitz, gamma_max, l_factor=1):
    """Exact-rational short step; all arguments are coerced to Fractions
    and the result is a Fraction."""
    gap = Fraction(gap)
    diff_norm_sq = Fraction(diff_norm_sq)
    lipschitz = Fraction(lipschitz)
    gamma_max = Fraction(gamma_max)
    return short_step(gap, diff_norm_sq, lipschitz, gamma_max, Fraction(l_factor))


def adaptive_step(
    objective,
    grad_at_x,
    x,
    direction,
    gamma_max,
    m_estimate,
    tau_grow=2.0,
    eta=0.9,
    fx=None,
    max_doublings=60,
):
    """Backtracking step with on-the-fly smoothness estimation.

    Finds the smallest ``M = m_estimate * tau_grow**k`` whose short step
    ``gamma = clamp(-<g, d> / (M |d|^2), 0, gamma_max)`` satisfies the
    quadratic decrease bound ``f(x + gamma d) <= f(x) + gamma <g, d> +
    (M/2) gamma^2 |d|^2``, which forces ``f(x + gamma d) <= f(x)``.

    Returns ``(gamma, M_out)`` with ``M_out = eta * M`` shrunk for the
    next iteration.  Raises ``ArithmeticError`` after ``max_doublings``
    growth rounds (the objective then contradicts any smoothness model).
    """
    if m_estimate <= 0:
        raise ValueError("smoothness estimate must be positive")
    slope = dense_inner(grad_at_x, direction)
    diff_norm_sq = dense_inner(direction, direction)
    zero = gamma_max * 0
    if slope >= 0 or diff_norm_sq == 0 or gamma_max == 0:
        # saturated or stationary direction: no movement, gentle shrink
        return zero, eta * m_estimate
    if fx is None:
        fx = objective(x)
    m_cur = m_estimate
    for _ in range(max_doublings + 1):
        gamma = _clamp(-slope / (m_cur * diff_norm_sq), zero, gamma_max)
        trial = x + gamma * direction
        bound = fx + gamma * slope + (m_cur * gamma * gamma * diff_norm_sq) / 2
        if objective(trial) <= bound:
            return gamma, eta * m_cur
        m_cur = m_cur * tau_grow
    raise ArithmeticError("objective inconsistent with smoothness model")


def segment_line_search(objective, x, direction, gamma_hi, tol=1e-8, max_probes=64):
    """Golden-section search for ``argmin f(x + gamma d)`` on
    ``[0, gamma_hi]``; assumes unimodality along the segment (true for
    convex objectives).  Always returns a feasible gamma, preferring the
    best of the interior estimate and both endpoints."""
    if gamma_hi <= 0:
        return 0.0
    direction = np.asarray(direction)
    if not np.any(direction):
        return 0.0

    def phi(gamma):
        return objective(x + gamma * direction)

    lo, hi = 0.0, float(gamma_hi)
    c = hi - GOLDEN_RATIO_CONJ * (hi - lo)
    d = lo + GOLDEN_RATIO_CONJ * (hi - lo)
    fc, fd = phi(c), phi(d)
    probes = 2
    while hi - lo > tol and probes < max_probes:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN_RATIO_CONJ * (hi - lo)
            fc = phi(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN_RATIO_CONJ * (hi - lo)
            fd = phi(d)
        probes += 1
    mid = (lo + hi) / 2.0
    candidates = [(phi(0.0), 0.0), (phi(mid), mid), (phi(float(gamma_hi)), float(gamma_hi))]
    return min(candidates)[1]


class StepRule:
    """Produces ``gamma in [0, gamma_max]`` each iteration.

    Single-owner mutable state (the adaptive rule carries its running
    smoothness estimate across calls).
    """

    name = "step"

    def reset(self):
        pass

    def compute(self, objective, gradient_oracle, grad, x, direction, gamma_max, t, fx=None):
        raise NotImplementedError


class AgnosticStep(StepRule):
    """``gamma_t = 2 / (2 + t)``, clamped to the admissible range.

    Produces exact Fractions on object-dtype iterates, so rational runs
    stay rational.
    """

    name = "agnostic"

    def compute(self, objective, gradient_oracle, grad, x, direction, gamma_max, t, fx=None):
        exact = getattr(x, "dtype", None) == object
        gamma = agnostic_step(t, exact=exact)
        return _clamp(gamma, gamma * 0, gamma_max)


class ShortStep(StepRule):
    """Short step from a user-supplied smoothness constant."""

    name = "short"

    def __init__(self, lipschitz, l_factor=1):
        self.lipschitz = lipschitz
        self.l_factor = l_factor

    def compute(self, objective, gradient_oracle, grad, x, direction, gamma_max, t, fx=None):
        gap = -dense_inner(grad, direction)
        if gap < 0:
            gap = gap * 0
        diff_norm_sq = dense_inner(direction, direction)
        return short_step(gap, diff_norm_sq, self.lipschitz, gamma_max, self.l_factor)


class RationalShortStep(ShortStep):
    """Exact-rational short step; requires rational gradients and a
    rational smoothness constant."""

    name = "rational-short"

    def __init__(self, lipschitz, l_factor=1):
        super().__init__(Fraction(lipschitz), Fraction(l_factor))

    def compute(self, objective, gradient_oracle, grad, x, direction, gamma_max, t, fx=None):
        gap = -dense_inner(grad, direction)
        if gap < 0:
            gap = Fraction(0)
        diff_norm_sq = dense_inner(direction, direction)
        return rational_short_step(gap, diff_norm_sq, self.lipschitz, gamma_max, self.l_factor)


class AdaptiveStep(StepRule):
    """Backtracking rule tracking a running smoothness estimate.

    The first call seeds the estimate from one finite-difference probe of
    the gradient along the step direction; afterwards the accepted
    estimate is relaxed by ``eta`` each iteration and re-grown by
    ``tau_grow`` whenever the decrease bound fails.
    """

    name = "adaptive"

    def __init__(self, m0=None, tau_grow=2.0, eta=0.9):
        if tau_grow <= 1:
            raise ValueError("growth factor must exceed 1")
        if not 0 < eta <= 1:
            raise ValueError("shrink factor must lie in (0, 1]")
        self.m0 = m0
        self.tau_grow = tau_grow
        self.eta = eta
        self.m_estimate = m0

    def reset(self):
        self.m_estimate = self.m0

    def _probe_m0(self, gradient_oracle, grad, x, direction):
        d_norm = math.sqrt(float(dense_inner(direction, direction)))
        if d_norm == 0:
            return 1.0
        x_norm = math.sqrt(float(dense_inner(x, x)))
        delta = 1e-4 * (1.0 + x_norm) / d_norm
        probe = np.array(x, dtype=float) + delta * np.asarray(direction, dtype=float)
        grad_probe = np.empty_like(probe)
        gradient_oracle(grad_probe, probe)
        diff = grad_probe - np.asarray(grad, dtype=float)
        est = math.sqrt(float(dense_inner(diff, diff))) / (delta * d_norm)
        return max(est, 1e-10)

    def compute(self, objective, gradient_oracle, grad, x, direction, gamma_max, t, fx=None):
        if getattr(x, "dtype", None) == object:
            raise TypeError(
                "the adaptive rule uses floating-point probes; use the "
                "agnostic or rational short-step rule for exact runs"
            )
        if self.m_estimate is None:
            self.m_estimate = self._probe_m0(gradient_oracle, grad, x, direction)
        gamma, self.m_estimate = adaptive_step(
            objective,
            grad,
            x,
            direction,
            gamma_max,
            self.m_estimate,
            tau_grow=self.tau_grow,
            eta=self.eta,
            fx=fx,
        )
        return gamma


class LineSearchStep(StepRule):
    """Golden-section line search along each step segment."""

    name = "line-search"

    def __init__(self, tol=1e-8, max_probes=64):
        self.tol = tol
        self.max_probes = max_probes

    def compute(self, objective, gradient_oracle, grad, x, direction, gamma_max, t, fx=None):
        if getattr(x, "dtype", None) == object:
            raise TypeError("line search uses floating-point probes")
        return segment_line_search(
            objective, x, direction, gamma_max, tol=self.tol, max_probes=self.max_probes
        )


def make_step_rule(name, lipschitz=None):
    """Factory used by the command-line harness."""
    if name == "adaptive":
        return AdaptiveStep()
    if name == "agnostic":
        return AgnosticStep()
    if name == "short":
        if lipschitz is None:
            raise ValueError("the short-step rule needs a smoothness constant")
        return ShortStep(lipschitz)
    if name == "rational-short":
        if lipschitz is None:
            raise ValueError("the short-step rule needs a smoothness constant")
        return RationalShortStep(lipschitz)
    if name == "line-search":
        return LineSearchStep()
    raise ValueError(f"unknown step rule {name!r}")
