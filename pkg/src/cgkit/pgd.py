"""Reference projected-gradient baseline and the projections it needs.

Deliberately plain: a fixed ``1/L`` gradient step followed by a full
projection.  The simplex and l1 projections use the classic sorting
algorithm; the nuclear projection computes a dense SVD, which is
exactly the expensive operation the projection-free solvers avoid.
"""

import numpy as np

from cgkit.solvers import RunParams, SolverResult, _Recorder, dual_gap

__all__ = [
    "project_simplex",
    "project_l1_ball",
    "project_nuclear_ball",
    "pgd_reference",
]


def project_simplex(y, radius=1.0):
    """Euclidean projection onto ``{x >= 0, sum x = radius}`` by the
    sorting algorithm."""
    y = np.asarray(y, dtype=float)
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - radius
    ks = np.arange(1, y.size + 1)
    rho = np.nonzero(u - css / ks > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(y - theta, 0.0)


def project_l1_ball(y, radius=1.0):
    """Euclidean projection onto the l1 ball, via the simplex projection
    of the magnitudes."""
    y = np.asarray(y, dtype=float)
    if np.abs(y).sum() <= radius:
        return y.copy()
    mags = project_simplex(np.abs(y), radius)
    return np.sign(y) * mags


def project_nuclear_ball(y, radius=1.0):
    """Euclidean projection onto the nuclear-norm ball: full SVD, then
    project the spectrum onto the l1 ball of the radius."""
    u, sigma, vt = np.linalg.svd(np.asarray(y, dtype=float), full_matrices=False)
    if sigma.sum() <= radius:
        return np.array(y, dtype=float, copy=True)
    sigma = project_simplex(sigma, radius)
    return (u * sigma).dot(vt)


def pgd_reference(
    objective,
    gradient_oracle,
    project,
    x0,
    params=None,
    lipschitz=None,
    gap_lmo=None,
):
    """Projected gradient descent with a fixed ``1/L`` step.

    ``lipschitz`` must be supplied (or estimated by the caller); when
    ``gap_lmo`` is given, the trajectory's dual-gap column reports the
    true linear-minimization gap so runs are comparable with the
    projection-free solvers (those oracle calls are not counted).
    """
    if lipschitz is None or lipschitz <= 0:
        raise ValueError("the reference baseline needs a positive smoothness bound")
    params = params or RunParams()
    x = np.array(x0, dtype=float, copy=True)
    rec = _Recorder(objective, params)
    grad = np.empty_like(x)

    def measure():
        gradient_oracle(grad, x)
        if gap_lmo is None:
            return float("nan")
        v = gap_lmo.compute_extreme_point(grad)
        return dual_gap(grad, x, v)

    gap = measure()
    rec.record(0, x, gap, 0, "pgd")
    eps = params.epsilon
    t = 0
    while True:
        if gap_lmo is not None and gap <= eps:
            termination = "gap_met"
            break
        if t >= params.max_iterations:
            termination = "iteration_limit"
            break
        if rec.stop_requested:
            termination = "callback_stop"
            break
        x = project(x - grad / lipschitz)
        t += 1
        gap = measure()
        rec.record(t, x, gap, 0, "pgd")
    return SolverResult(
        x=x,
        active_set=None,
        primal=rec.rows[-1].primal,
        dual_gap=gap,
        trajectory=rec.rows,
        termination=termination,
    )
