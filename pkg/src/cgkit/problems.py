"""Objective functions, experiment instance generators and gradient checks.

Objectives follow the in-place gradient contract used by the solvers:
``obj.value(x) -> scalar`` and ``obj.gradient(storage, x)`` overwriting
the caller's buffer.  Generators are deterministic under their seed and
serializable to a small JSON schema so harness runs can be replayed.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadraticRegression",
    "MatrixCompletionObjective",
    "MatrixCompletionInstance",
    "SquaredDistance",
    "StochasticLinearOracle",
    "build_monomial_features",
    "generate_sparse_regression",
    "matrix_completion_instance",
    "sample_batch",
    "finite_diff_check",
    "instance_to_dict",
    "save_instance",
    "load_instance",
]


class SquaredDistance:
    """``f(x) = |x - target|^2`` with gradient ``2 (x - target)``.

    Works on vectors and matrices, and stays exact on object-dtype
    buffers of rational scalars.
    """

    def __init__(self, target):
        self.target = np.asarray(target)

    def value(self, x):
        diff = x - self.target
        if diff.dtype == object:
            return (diff * diff).sum()
        return float(np.vdot(diff, diff))

    def gradient(self, out, x):
        out[...] = x - self.target
        out *= 2
        return out


class QuadraticRegression:
    """Least-squares fit ``f(c) = |y - A c|^2``; gradient
    ``-2 A^T (y - A c)``.

    Evaluation and gradient share one residual workspace, so repeated
    calls at the same point are bit-identical and allocation-free.
    """

    def __init__(self, features, targets):
        self.features = np.asarray(features, dtype=float)
        self.targets = np.asarray(targets, dtype=float)
        if self.features.shape[0] != self.targets.shape[0]:
            raise ValueError("feature rows and targets must align")
        self._resid = np.empty_like(self.targets)

    @property
    def n_features(self):
        return self.features.shape[1]

    def _residual(self, coeffs):
        np.matmul(self.features, coeffs, out=self._resid)
        np.subtract(self.targets, self._resid, out=self._resid)
        return self._resid

    def value(self, coeffs):
        r = self._residual(coeffs)
        return float(r.dot(r))

    def gradient(self, out, coeffs):
        r = self._residual(coeffs)
        np.matmul(self.features.T, r, out=out)
        out *= -2.0
        return out

    def smoothness(self):
        """Smoothness constant ``2 sigma_max(A)^2`` (for reference steps)."""
        sigma = np.linalg.svd(self.features, compute_uv=False)[0]
        return 2.0 * float(sigma) ** 2


class MatrixCompletionObjective:
    """Squared error on observed entries of a partially known matrix.

    ``f(X) = sum_{(i,j) observed} (X_ij - Y_ij)^2``; the gradient is
    supported on the observed entries only.
    """

    def __init__(self, shape, rows, cols, values):
        self.shape = tuple(shape)
        self.rows = np.asarray(rows, dtype=np.intp)
        self.cols = np.asarray(cols, dtype=np.intp)
        self.values = np.asarray(values, dtype=float)
        if not (len(self.rows) == len(self.cols) == len(self.values)):
            raise ValueError("index and value arrays must align")

    def value(self, x):
        diff = x[self.rows, self.cols] - self.values
        return float(diff.dot(diff))

    def gradient(self, out, x):
        out[...] = 0.0
        out[self.rows, self.cols] = 2.0 * (x[self.rows, self.cols] - self.values)
        return out


@dataclass
class MatrixCompletionInstance:
    objective: MatrixCompletionObjective
    test_rows: np.ndarray
    test_cols: np.ndarray
    test_values: np.ndarray
    full_matrix: np.ndarray
    suggested_radius: float
    uncovered_lines: bool

    def test_error(self, x):
        """Mean squared error over the held-out entries."""
        diff = x[self.test_rows, self.test_cols] - self.test_values
        return float(diff.dot(diff) / max(len(self.test_values), 1))


class StochasticLinearOracle:
    """Sampled-gradient oracle for an empirical least-squares pool.

    The pool holds rows ``(a_k, y_k)``; the full objective is the mean of
    ``(a_k . x - y_k)^2`` so a single-sample gradient ``2 (a_k . x - y_k)
    a_k`` is an unbiased estimate of the full gradient.
    """

    def __init__(self, features, targets, seed=0):
        self.features = np.asarray(features, dtype=float)
        self.targets = np.asarray(targets, dtype=float)
        if self.features.shape[0] != self.targets.shape[0]:
            raise ValueError("feature rows and targets must align")
        if self.features.shape[0] == 0:
            raise ValueError("sample pool is empty")
        self.rng = np.random.default_rng(seed)

    @property
    def pool_size(self):
        return self.features.shape[0]

    def value(self, x):
        r = self.features.dot(x) - self.targets
        return float(r.dot(r) / self.pool_size)

    def gradient(self, out, x):
        r = self.features.dot(x) - self.targets
        np.matmul(self.features.T, r, out=out)
        out *= 2.0 / self.pool_size
        return out

    def sample_batch(self, x, batch, out, replace=True):
        """Average of ``batch`` single-sample gradients drawn from the
        seeded stream (with replacement unless the debug flag says
        otherwise)."""
        if batch < 1:
            raise ValueError("batch size must be at least 1")
        if not replace and batch > self.pool_size:
            raise ValueError("cannot draw more than the pool without replacement")
        idx = self.rng.choice(self.pool_size, size=batch, replace=replace)
        rows = self.features[idx]
        resid = rows.dot(x) - self.targets[idx]
        np.matmul(rows.T, resid, out=out)
        out *= 2.0 / batch
        return out


def sample_batch(oracle, x, batch, out, replace=True):
    """Module-level alias for :meth:`StochasticLinearOracle.sample_batch`."""
    return oracle.sample_batch(x, batch, out, replace=replace)


def _exponent_vectors(n_vars, degree):
    """All exponent vectors with total degree 1..degree, graded order,
    lexicographically descending within a degree."""
    from itertools import combinations_with_replacement

    out = []
    for total in range(1, degree + 1):
        for combo in combinations_with_replacement(range(n_vars), total):
            exponents = [0] * n_vars
            for var in combo:
                exponents[var] += 1
            out.append(tuple(exponents))
    return out


def build_monomial_features(samples, degree, max_features=200_000):
    """Monomial feature expansion of a sample matrix.

    Columns enumerate all monomials ``prod_j x_j^{a_j}`` with
    ``1 <= sum a_j <= degree`` in graded order (no constant column), so
    the output has ``C(n + degree, degree) - 1`` columns.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2:
        raise ValueError("expected a 2-d sample matrix")
    n = samples.shape[1]
    m = math.comb(n + degree, degree) - 1
    if m > max_features:
        raise ValueError(
            f"feature expansion would produce {m} columns, above the "
            f"configured limit {max_features}"
        )
    features = np.empty((samples.shape[0], m))
    for col, exponents in enumerate(_exponent_vectors(n, degree)):
        column = np.ones(samples.shape[0])
        for var, power in enumerate(exponents):
            if power:
                column = column * samples[:, var] ** power
        features[:, col] = column
    return features


def generate_sparse_regression(
    n_vars, degree, density, noise_sigma, n_samples, seed=0
):
    """Sparse polynomial regression instance.

    Draws standard Gaussian samples, expands them into monomial features,
    plants a coefficient vector with ``ceil(density * m)`` nonzeros
    uniform on (0, 10), and sets ``y = A c + noise_sigma * gaussian``.
    Returns ``(QuadraticRegression, true_coefficients)``.  The customary
    l1 radius for recovery runs is ``0.95 * |c|_1``.
    """
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((n_samples, n_vars))
    features = build_monomial_features(samples, degree)
    m = features.shape[1]
    n_nonzero = max(1, math.ceil(density * m))
    coeffs = np.zeros(m)
    support = rng.choice(m, size=n_nonzero, replace=False)
    coeffs[support] = rng.uniform(0.0, 10.0, size=n_nonzero)
    targets = features.dot(coeffs)
    if noise_sigma > 0:
        targets = targets + noise_sigma * rng.standard_normal(n_samples)
    return QuadraticRegression(features, targets), coeffs


def matrix_completion_instance(
    n_rows, n_cols, rank, fraction_observed, noise_sigma, seed=0
):
    """Synthetic low-rank completion instance.

    ``Y = U V^T + noise`` with Gaussian factors of the given rank;
    observed cells are sampled without replacement, the rest become the
    held-out test set.  The suggested nuclear radius is ten times the
    top singular value of the fully observed matrix.
    """
    if rank > min(n_rows, n_cols):
        raise ValueError("rank cannot exceed the smaller dimension")
    if not 0 < fraction_observed < 1:
        raise ValueError("observed fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    left = rng.standard_normal((n_rows, rank))
    right = rng.standard_normal((n_cols, rank))
    full = left.dot(right.T)
    if noise_sigma > 0:
        full = full + noise_sigma * rng.standard_normal((n_rows, n_cols))
    total = n_rows * n_cols
    n_obs = max(1, int(round(fraction_observed * total)))
    flat = rng.choice(total, size=n_obs, replace=False)
    rows, cols = np.unravel_index(np.sort(flat), (n_rows, n_cols))
    mask = np.zeros(total, dtype=bool)
    mask[flat] = True
    test_flat = np.nonzero(~mask)[0]
    test_rows, test_cols = np.unravel_index(test_flat, (n_rows, n_cols))
    uncovered = bool(
        len(set(rows.tolist())) < n_rows or len(set(cols.tolist())) < n_cols
    )
    objective = MatrixCompletionObjective(
        (n_rows, n_cols), rows, cols, full[rows, cols]
    )
    sigma_max = float(np.linalg.svd(full, compute_uv=False)[0])
    return MatrixCompletionInstance(
        objective=objective,
        test_rows=test_rows,
        test_cols=test_cols,
        test_values=full[test_rows, test_cols],
        full_matrix=full,
        suggested_radius=10.0 * sigma_max,
        uncovered_lines=uncovered,
    )


def finite_diff_check(objective, gradient_oracle, x, h=1e-5, n_probe=20, seed=0):
    """Max relative error between the analytic gradient and central
    differences: ``max_i |g_i - ghat_i| / (1 + |g_i|)``.

    Checks every coordinate up to dimension 100, a seeded sample of
    ``n_probe`` coordinates above that.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    gradient_oracle(grad, x)
    flat_x = x.ravel()
    flat_g = grad.ravel()
    dim = flat_x.size
    if dim > 100:
        rng = np.random.default_rng(seed)
        coords = rng.choice(dim, size=min(n_probe, dim), replace=False)
    else:
        coords = range(dim)
    work = x.copy()
    flat_w = work.ravel()
    worst = 0.0
    for i in coords:
        orig = flat_w[i]
        flat_w[i] = orig + h
        f_plus = objective(work)
        flat_w[i] = orig - h
        f_minus = objective(work)
        flat_w[i] = orig
        approx = (f_plus - f_minus) / (2.0 * h)
        err = abs(flat_g[i] - approx) / (1.0 + abs(flat_g[i]))
        worst = max(worst, err)
    return worst


INSTANCE_SCHEMA = "cgkit-instance-v1"


def instance_to_dict(kind, **spec):
    """JSON-ready description of a generated instance.

    Generators are deterministic under their seed, so dimensions, seeds
    and (for completion problems) the observed index list are enough to
    replay a run.
    """
    known = {"polyreg", "matcomp"}
    if kind not in known:
        raise ValueError(f"unknown instance kind {kind!r}")
    return {"schema": INSTANCE_SCHEMA, "kind": kind, "spec": spec}


def save_instance(path, kind, **spec):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(kind, **spec), fh, indent=2, sort_keys=True)


def load_instance(path):
    """Rebuild the generated objects described by a saved instance file."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("schema") != INSTANCE_SCHEMA:
        raise ValueError("not a recognized instance file")
    kind = payload["kind"]
    spec = payload["spec"]
    if kind == "polyreg":
        return generate_sparse_regression(
            spec["n_vars"],
            spec["degree"],
            spec["density"],
            spec["noise_sigma"],
            spec["n_samples"],
            seed=spec["seed"],
        )
    if kind == "matcomp":
        instance = matrix_completion_instance(
            spec["n_rows"],
            spec["n_cols"],
            spec["rank"],
            spec["fraction_observed"],
            spec["noise_sigma"],
            seed=spec["seed"],
        )
        recorded = spec.get("observed_rows")
        if recorded is not None:
            regenerated = instance.objective.rows.tolist()
            if regenerated != recorded:
                raise ValueError("observed index list does not match the seed")
        return instance
    raise ValueError(f"unknown instance kind {kind!r}")
