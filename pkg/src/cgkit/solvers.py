"""Conditional-gradient solver variants and their shared run plumbing.

Five algorithms: the standard solver (`frank_wolfe`), its cache-lazified
version (`lazified_frank_wolfe`), the away-step solver over an explicit
active set (`away_frank_wolfe`, with an optional lazy mode), the blended
solver mixing in-hull descent with lazy vertex steps (`blended_cg`), and
the stochastic variant driven by a sampled gradient estimator
(`stochastic_fw`).

Conventions shared by all variants:

* the gradient oracle writes into a caller-supplied buffer:
  ``gradient_oracle(storage, x)``;
* one trajectory row is recorded per iteration (row 0 is the initial
  point); rows carry cumulative true-oracle call and cache-hit counters;
* a run is strictly single-threaded and, for fixed inputs and seeds,
  bit-reproducible except for the ``elapsed_seconds`` column;
* the optional ``params.callback(record, x)`` hook fires once per
  recorded row and may return True to abort the run.

For the lazified variants the recorded ``dual_gap`` is the true gap on
iterations where the wrapped oracle was actually called and the current
gap estimate (an upper-bound proxy) elsewhere; termination certificates
only ever use truly measured gaps.
"""

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from cgkit.atoms import (
    ActiveSet,
    Atom,
    DenseVec,
    atom_inner,
    dense_inner,
    iterate_blend,
)
from cgkit.lmo import VertexCache, cached_query
from cgkit.steps import AdaptiveStep, AgnosticStep, segment_line_search

__all__ = [
    "RunParams",
    "TrajectoryRecord",
    "SolverResult",
    "dual_gap",
    "frank_wolfe",
    "lazified_frank_wolfe",
    "away_frank_wolfe",
    "blended_cg",
    "stochastic_fw",
]


@dataclass
class RunParams:
    """Knobs shared by every solver run.

    ``epsilon`` is the dual-gap target; ``k_lazy`` the weak-separation
    divisor (threshold ``phi / k_lazy``); ``cache_capacity`` bounds the
    vertex cache (None = unbounded).  ``track_atoms`` makes the standard
    solver maintain the convex decomposition of its iterate (rank/sparsity
    reporting); active-set solvers always do.
    """

    max_iterations: int = 1000
    epsilon: float = 1e-7
    step_rule: object = None
    lazy: bool = False
    cache_capacity: int = None
    k_lazy: float = 2.0
    verbosity: int = 0
    seed: int = 0
    callback: object = None
    track_atoms: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.k_lazy < 1:
            raise ValueError("the lazification divisor must be at least 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")


@dataclass
class TrajectoryRecord:
    iteration: int
    elapsed_seconds: float
    primal: object
    dual_gap: object
    lmo_calls: int
    cache_hits: int
    active_set_size: int
    step_kind: str


@dataclass
class SolverResult:
    x: object
    active_set: object
    primal: object
    dual_gap: object
    trajectory: list
    termination: str


def dual_gap(gradient, x, v):
    """Frank-Wolfe gap ``<grad, x> - <grad, v>`` for an oracle answer v.

    Upper-bounds the primal gap of a convex objective; nonnegative in
    exact arithmetic whenever v truly minimizes the linear function.
    """
    return dense_inner(gradient, x) - atom_inner(gradient, v)


def _is_exact_buffer(x):
    return getattr(x, "dtype", None) == object


def _typed_zero(exact):
    return Fraction(0) if exact else 0.0


def _typed_one(exact):
    return Fraction(1) if exact else 1.0


class _Recorder:
    """Per-run trajectory log with cumulative oracle counters."""

    def __init__(self, objective, params):
        self.objective = objective
        self.params = params
        self.rows = []
        self.lmo_calls = 0
        self.cache_hits = 0
        self.start = time.perf_counter()
        self.stop_requested = False

    def record(self, iteration, x, gap, active_size, step_kind, primal=None):
        if primal is None:
            primal = self.objective(x)
        zero = _typed_zero(isinstance(gap, Fraction))
        # negative values are pure roundoff (the gap is a max over the
        # region including x); NaN means "not measured" and passes through
        record = TrajectoryRecord(
            iteration=iteration,
            elapsed_seconds=time.perf_counter() - self.start,
            primal=primal,
            dual_gap=zero if gap < zero else gap,
            lmo_calls=self.lmo_calls,
            cache_hits=self.cache_hits,
            active_set_size=active_size,
            step_kind=step_kind,
        )
        self.rows.append(record)
        if self.params.verbosity > 0:
            print(
                f"  it={iteration:6d} f={float(primal):.6e} "
                f"gap={float(record.dual_gap):.3e} lmo={self.lmo_calls} {step_kind}"
            )
        callback = self.params.callback
        if callback is not None and callback(record, x):
            self.stop_requested = True
        return record


def _coerce_start(x0, track):
    """Normalize the starting point: returns (dense buffer, atom-or-None,
    active-set-or-None)."""
    if isinstance(x0, Atom):
        x = x0.densify()
        aset = ActiveSet.from_atom(x0) if track else None
        return x, x0, aset
    x = np.array(x0, copy=True)
    if track:
        seed_atom = DenseVec(x.copy())
        aset = ActiveSet.from_atom(seed_atom)
        return x, seed_atom, aset
    return x, None, None


def _default_rule(params):
    rule = params.step_rule if params.step_rule is not None else AdaptiveStep()
    rule.reset()
    return rule


def _result(x, aset, rec, termination, gap):
    primal = rec.rows[-1].primal if rec.rows else None
    return SolverResult(
        x=x,
        active_set=aset,
        primal=primal,
        dual_gap=gap,
        trajectory=rec.rows,
        termination=termination,
    )


def frank_wolfe(objective, gradient_oracle, lmo, x0, params=None):
    """Standard conditional-gradient loop.

    Per iteration: one gradient evaluation, one oracle call, one convex
    blend toward the returned vertex.  Iterates are feasible by
    construction.  Stops when the dual gap reaches ``params.epsilon`` or
    at the iteration limit.

    Parameters
    ----------
    objective : callable x -> scalar
    gradient_oracle : callable (storage, x) writing the gradient in place
    lmo : LinearMinimizationOracle
    x0 : dense feasible point or Atom
    params : RunParams
    """
    params = params or RunParams()
    x, _, aset = _coerce_start(x0, params.track_atoms)
    exact = _is_exact_buffer(x)
    rule = _default_rule(params)
    rec = _Recorder(objective, params)

    grad = np.empty_like(x)
    gradient_oracle(grad, x)
    v = lmo.compute_extreme_point(grad)
    rec.lmo_calls += 1
    gap = dual_gap(grad, x, v)
    size = len(aset) if aset is not None else 0
    rec.record(0, x, gap, size, "init")

    one = _typed_one(exact)
    eps = params.epsilon
    t = 0
    while True:
        if gap <= eps:
            termination = "gap_met"
            break
        if t >= params.max_iterations:
            termination = "iteration_limit"
            break
        if rec.stop_requested:
            termination = "callback_stop"
            break
        direction = v.densify(exact) - x
        fx = rec.rows[-1].primal
        gamma = rule.compute(
            objective, gradient_oracle, grad, x, direction, one, t, fx=fx
        )
        iterate_blend(x, gamma, v)
        if aset is not None:
            aset.update_forward(v, gamma)
        t += 1
        gradient_oracle(grad, x)
        v = lmo.compute_extreme_point(grad)
        rec.lmo_calls += 1
        gap = dual_gap(grad, x, v)
        size = len(aset) if aset is not None else 0
        rec.record(t, x, gap, size, "forward")
    return _result(x, aset, rec, termination, gap)


def lazified_frank_wolfe(objective, gradient_oracle, lmo, x0, params=None):
    """Conditional gradients through a weak-separation cache.

    Maintains a gap estimate ``phi``.  Each iteration asks the cache for
    any vertex guaranteeing progress ``phi / k_lazy``; only on a cache
    miss is the true oracle consulted.  When even the true vertex cannot
    meet the threshold, the estimate halves and the iterate stays put (a
    null step).  Terminates once ``phi <= epsilon / 2`` (which certifies
    a measured gap below epsilon) or a measured gap meets epsilon.
    """
    params = params or RunParams()
    x, _, aset = _coerce_start(x0, params.track_atoms)
    exact = _is_exact_buffer(x)
    rule = _default_rule(params)
    rec = _Recorder(objective, params)
    cache = VertexCache(params.cache_capacity)

    grad = np.empty_like(x)
    gradient_oracle(grad, x)
    v = lmo.compute_extreme_point(grad)
    rec.lmo_calls += 1
    cache.insert(v)
    gap = dual_gap(grad, x, v)
    fresh_gap = gap
    phi = gap / 2
    size = len(aset) if aset is not None else 0
    rec.record(0, x, gap, size, "init")

    one = _typed_one(exact)
    eps = params.epsilon
    t = 0
    while True:
        if fresh_gap is not None and fresh_gap <= eps:
            termination = "gap_met"
            gap = fresh_gap
            break
        if phi <= eps / 2:
            termination = "gap_met"
            gap = fresh_gap if fresh_gap is not None else phi
            break
        if t >= params.max_iterations:
            termination = "iteration_limit"
            gap = fresh_gap if fresh_gap is not None else phi
            break
        if rec.stop_requested:
            termination = "callback_stop"
            gap = fresh_gap if fresh_gap is not None else phi
            break
        threshold = phi / params.k_lazy
        misses = cache.misses
        v, source = cached_query(cache, lmo, grad, x, threshold)
        rec.lmo_calls += cache.misses - misses
        rec.cache_hits = cache.hits
        if source == "oracle":
            true_gap = dual_gap(grad, x, v)
            fresh_gap = true_gap
            if true_gap < threshold:
                # even the exact vertex cannot certify progress: shrink
                # the estimate, do not move
                phi = phi / 2
                t += 1
                size = len(aset) if aset is not None else 0
                rec.record(t, x, true_gap, size, "null", primal=rec.rows[-1].primal)
                continue
        direction = v.densify(exact) - x
        fx = rec.rows[-1].primal
        gamma = rule.compute(
            objective, gradient_oracle, grad, x, direction, one, t, fx=fx
        )
        iterate_blend(x, gamma, v)
        if aset is not None:
            aset.update_forward(v, gamma)
        t += 1
        gradient_oracle(grad, x)
        fresh_gap = None
        size = len(aset) if aset is not None else 0
        rec.record(t, x, phi, size, "forward")
    return _result(x, aset, rec, termination, gap)


def away_frank_wolfe(objective, gradient_oracle, lmo, x0, params=None):
    """Away-step conditional gradients over an explicit active set.

    ``x0`` must be a single atom; the active set starts as ``{x0: 1}``.
    Each iteration compares the standard step toward the oracle vertex
    (gap ``<g, x - v>``) with the away step shrinking the worst active
    atom (gap ``<g, a - x>``) and takes the larger; away steps are capped
    at ``alpha_a / (1 - alpha_a)`` and drop the atom when saturated.
    With ``params.lazy`` the oracle vertex is served through a
    weak-separation cache with the same estimate-halving discipline as
    `lazified_frank_wolfe`.
    """
    params = params or RunParams()
    if not isinstance(x0, Atom):
        raise TypeError("the away-step solver starts from a single atom")
    aset = ActiveSet.from_atom(x0)
    x = aset.iterate
    exact = _is_exact_buffer(x)
    rule = _default_rule(params)
    rec = _Recorder(objective, params)
    lazy = params.lazy
    cache = VertexCache(params.cache_capacity) if lazy else None

    grad = np.empty_like(x)
    gradient_oracle(grad, x)
    v = lmo.compute_extreme_point(grad)
    rec.lmo_calls += 1
    if lazy:
        cache.insert(v)
    gap = dual_gap(grad, x, v)
    fresh_gap = gap
    phi = gap / 2
    rec.record(0, x, gap, len(aset), "init")

    one = _typed_one(exact)
    eps = params.epsilon
    t = 0
    while True:
        if fresh_gap is not None and fresh_gap <= eps:
            termination = "gap_met"
            gap = fresh_gap
            break
        if lazy and phi <= eps / 2:
            termination = "gap_met"
            gap = fresh_gap if fresh_gap is not None else phi
            break
        if t >= params.max_iterations:
            termination = "iteration_limit"
            gap = fresh_gap if fresh_gap is not None else phi
            break
        if rec.stop_requested:
            termination = "callback_stop"
            gap = fresh_gap if fresh_gap is not None else phi
            break

        if lazy:
            threshold = phi / params.k_lazy
            misses = cache.misses
            v, source = cached_query(cache, lmo, grad, x, threshold)
            rec.lmo_calls += cache.misses - misses
            rec.cache_hits = cache.hits
            if source == "oracle":
                true_gap = dual_gap(grad, x, v)
                fresh_gap = true_gap
                if true_gap < threshold:
                    phi = phi / 2
                    t += 1
                    rec.record(
                        t, x, true_gap, len(aset), "null", primal=rec.rows[-1].primal
                    )
                    continue

        base = dense_inner(grad, x)
        away_idx, _ = aset.select(grad)
        away_atom = aset.atoms[away_idx]
        g_fw = base - atom_inner(grad, v)
        g_away = atom_inner(grad, away_atom) - base
        fx = rec.rows[-1].primal
        if g_fw >= g_away:
            direction = v.densify(exact) - x
            gamma = rule.compute(
                objective, gradient_oracle, grad, x, direction, one, t, fx=fx
            )
            aset.update_forward(v, gamma)
            kind = "forward"
        else:
            gamma_max = aset.away_gamma_max(away_idx)
            direction = x - away_atom.densify(exact)
            gamma = rule.compute(
                objective, gradient_oracle, grad, x, direction, gamma_max, t, fx=fx
            )
            size_before = len(aset)
            aset.update_away(away_idx, gamma)
            kind = "drop" if len(aset) < size_before else "away"
        x = aset.iterate
        t += 1
        gradient_oracle(grad, x)
        if lazy:
            fresh_gap = None
            rec.record(t, x, phi, len(aset), kind)
        else:
            v = lmo.compute_extreme_point(grad)
            rec.lmo_calls += 1
            gap = dual_gap(grad, x, v)
            fresh_gap = gap
            rec.record(t, x, gap, len(aset), kind)
    return _result(x, aset, rec, termination, gap)


def blended_cg(objective, gradient_oracle, lmo, x0, params=None):
    """Blended conditional gradients: in-hull descent plus lazy vertex
    steps.

    While the gap over the current active set (worst minus best atom) is
    at least the running estimate ``phi``, weight is shifted from the
    worst atom toward the best one by a bounded segment line search, a
    projection-free descent step that never grows the active set.
    Otherwise a lazified vertex step runs with threshold ``phi``, halving
    the estimate whenever the true oracle cannot meet it.  Terminates on
    a measured gap below epsilon or once ``phi <= epsilon / 2``.
    """
    params = params or RunParams()
    if not isinstance(x0, Atom):
        raise TypeError("the blended solver starts from a single atom")
    aset = ActiveSet.from_atom(x0)
    x = aset.iterate
    exact = _is_exact_buffer(x)
    if exact:
        raise TypeError("the blended solver uses floating-point line searches")
    rule = _default_rule(params)
    rec = _Recorder(objective, params)
    cache = VertexCache(params.cache_capacity)

    grad = np.empty_like(x)
    gradient_oracle(grad, x)
    v = lmo.compute_extreme_point(grad)
    rec.lmo_calls += 1
    cache.insert(v)
    gap = dual_gap(grad, x, v)
    fresh_gap = gap
    phi = gap / 2
    rec.record(0, x, gap, len(aset), "init")

    one = _typed_one(exact)
    eps = params.epsilon
    t = 0
    while True:
        if fresh_gap is not None and fresh_gap <= eps:
            termination = "gap_met"
            gap = fresh_gap
            break
        if phi <= eps / 2:
            termination = "gap_met"
            gap = fresh_gap if fresh_gap is not None else phi
            break
        if t >= params.max_iterations:
            termination = "iteration_limit"
            gap = fresh_gap if fresh_gap is not None else phi
            break
        if rec.stop_requested:
            termination = "callback_stop"
            gap = fresh_gap if fresh_gap is not None else phi
            break

        away_idx, best_idx = aset.select(grad)
        local_gap = atom_inner(grad, aset.atoms[away_idx]) - atom_inner(
            grad, aset.atoms[best_idx]
        )
        if local_gap >= phi and away_idx != best_idx:
            # descent inside the hull: move weight from worst to best atom
            away_atom = aset.atoms[away_idx]
            best_atom = aset.atoms[best_idx]
            direction = best_atom.densify(exact) - away_atom.densify(exact)
            beta = segment_line_search(
                objective, x, direction, aset.weights[away_idx]
            )
            size_before = len(aset)
            aset.transfer(away_idx, best_idx, beta)
            x = aset.iterate
            kind = "drop" if len(aset) < size_before else "descent"
            t += 1
            gradient_oracle(grad, x)
            fresh_gap = None
            rec.record(t, x, phi, len(aset), kind)
            continue

        misses = cache.misses
        v, source = cached_query(cache, lmo, grad, x, phi)
        rec.lmo_calls += cache.misses - misses
        rec.cache_hits = cache.hits
        if source == "oracle":
            true_gap = dual_gap(grad, x, v)
            fresh_gap = true_gap
            if true_gap < phi:
                phi = phi / 2
                t += 1
                rec.record(
                    t, x, true_gap, len(aset), "null", primal=rec.rows[-1].primal
                )
                continue
        direction = v.densify(exact) - x
        fx = rec.rows[-1].primal
        gamma = rule.compute(
            objective, gradient_oracle, grad, x, direction, one, t, fx=fx
        )
        aset.update_forward(v, gamma)
        x = aset.iterate
        t += 1
        gradient_oracle(grad, x)
        fresh_gap = None
        rec.record(t, x, phi, len(aset), "forward")
    return _result(x, aset, rec, termination, gap)


def stochastic_fw(
    stochastic_oracle,
    lmo,
    x0,
    batch_schedule,
    momentum_schedule,
    params=None,
):
    """Stochastic conditional gradients with batch and momentum schedules.

    Per iteration: draw ``batch_schedule(t)`` samples from the stochastic
    first-order oracle, average them, fold the average into the gradient
    estimate ``m_t = (1 - rho_t) m_{t-1} + rho_t g_hat`` (``rho_0`` is
    forced to 1), call the oracle on the estimate and take an agnostic
    step by default.  The recorded primal uses the oracle's full
    objective when it exposes one (``value`` attribute); the recorded
    dual gap is the estimate's gap, a certificate only when the
    estimator is exact.
    """
    params = params or RunParams()
    x = x0.densify() if isinstance(x0, Atom) else np.array(x0, dtype=float)
    rule = params.step_rule if params.step_rule is not None else AgnosticStep()
    rule.reset()
    full_value = getattr(stochastic_oracle, "value", None)
    objective = full_value if full_value is not None else (lambda _: float("nan"))
    rec = _Recorder(objective, params)

    def draw(t, m):
        batch = batch_schedule(t)
        if batch is None or batch < 1:
            raise ValueError(f"batch size must be at least 1, got {batch!r}")
        g_hat = np.empty_like(x)
        stochastic_oracle.sample_batch(x, int(batch), g_hat)
        rho = 1.0 if t == 0 else float(momentum_schedule(t))
        if not 0 <= rho <= 1:
            raise ValueError("momentum weight must lie in [0, 1]")
        if m is None:
            m = np.zeros_like(x)
        m *= 1.0 - rho
        m += rho * g_hat
        return m

    m = draw(0, None)
    v = lmo.compute_extreme_point(m)
    rec.lmo_calls += 1
    gap = dual_gap(m, x, v)
    rec.record(0, x, gap, 0, "init")

    eps = params.epsilon
    t = 0
    while True:
        if gap <= eps:
            termination = "gap_met"
            break
        if t >= params.max_iterations:
            termination = "iteration_limit"
            break
        if rec.stop_requested:
            termination = "callback_stop"
            break
        direction = v.densify() - x
        gamma = rule.compute(objective, None, m, x, direction, 1.0, t)
        iterate_blend(x, gamma, v)
        t += 1
        if t < params.max_iterations:
            m = draw(t, m)
        v = lmo.compute_extreme_point(m)
        rec.lmo_calls += 1
        gap = dual_gap(m, x, v)
        rec.record(t, x, gap, 0, "stochastic")
    return _result(x, None, rec, termination, gap)
