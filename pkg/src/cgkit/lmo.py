"""Linear minimization oracles over the supported feasible regions.

Every oracle maps a dense direction to an extreme point (an
:class:`~cgkit.atoms.Atom`) minimizing the linear function over its
region.  Closed-form oracles are exact; the nuclear-norm oracle is exact
up to its power-iteration tolerance.  Third parties plug in custom
regions by subclassing :class:`LinearMinimizationOracle` and implementing
``compute_extreme_point``.

Sign convention: ``sign(0) := +1`` everywhere.
"""

import math
from collections import namedtuple
from fractions import Fraction

import numpy as np

from cgkit import _core
from cgkit._core import hungarian_py
from cgkit.atoms import (
    Atom,
    DenseVec,
    Permutation,
    RankOne,
    ScaledUnit,
    SignedSupport,
    atom_inner,
    dense_inner,
)

__all__ = [
    "LinearMinimizationOracle",
    "ProbabilitySimplexLMO",
    "LpBallLMO",
    "KSparseLMO",
    "BirkhoffLMO",
    "NuclearNormLMO",
    "EnumerationLMO",
    "VertexCache",
    "probability_simplex_lmo",
    "lp_ball_lmo",
    "ksparse_lmo",
    "hungarian",
    "birkhoff_lmo",
    "top_singular_pair",
    "nuclear_norm_lmo",
    "cached_query",
]


def _sign(value):
    # sign(0) := +1 by convention
    return -1 if value < 0 else 1


def _is_object(arr):
    return arr.dtype == object


class LinearMinimizationOracle:
    """Interface: ``compute_extreme_point(direction) -> Atom``.

    Oracles are stateless after construction and safe to share across
    threads; mutable companions (caches) are single-owner per run.
    """

    def compute_extreme_point(self, direction):
        raise NotImplementedError


def probability_simplex_lmo(direction, radius):
    """Vertex of ``{x >= 0, sum x = radius}`` minimizing the direction:
    ``radius * e_i`` at the smallest coordinate, lowest index on ties."""
    d = np.asarray(direction)
    if d.ndim != 1 or d.size == 0:
        raise ValueError("direction must be a non-empty vector")
    if _is_object(d):
        i_star = min(range(d.size), key=lambda i: (d[i], i))
    else:
        i_star = int(np.argmin(d))
    return ScaledUnit(i_star, radius, d.size)


def lp_ball_lmo(direction, radius, p):
    """Extreme point of the l1 / l2 / linf ball of the given radius.

    l1 returns a signed scaled unit at the largest-magnitude coordinate;
    l2 the normalized negative direction; linf the sign pattern.  A zero
    direction with p=2 returns ``radius * e_0`` flagged as degenerate.
    """
    d = np.asarray(direction)
    if d.ndim != 1 or d.size == 0:
        raise ValueError("direction must be a non-empty vector")
    if p == 1:
        if _is_object(d):
            i_star = min(range(d.size), key=lambda i: (-abs(d[i]), i))
        else:
            i_star = int(np.argmax(np.abs(d)))
        return ScaledUnit(i_star, -radius * _sign(d[i_star]), d.size)
    if p == 2:
        norm = math.sqrt(float(d.dot(d)))
        if norm == 0:
            values = np.zeros(d.size)
            values[0] = radius
            return DenseVec(values, meta={"degenerate": "zero direction"})
        return DenseVec((-float(radius) / norm) * d.astype(float))
    if p in (np.inf, math.inf, "inf"):
        signs = np.where(np.asarray(d, dtype=float) < 0, 1.0, -1.0)
        if _is_object(d):
            values = np.array(
                [radius if di < 0 else -radius for di in d], dtype=object
            )
        else:
            values = float(radius) * signs
        return DenseVec(values)
    raise ValueError(f"unsupported p = {p!r} (use 1, 2 or inf)")


def ksparse_lmo(direction, radius, k):
    """Extreme point of ``radius * (B1(k) ∩ Binf(1))``: the k
    largest-magnitude coordinates (lowest index on ties) get ``-radius *
    sign(d_i)``."""
    d = np.asarray(direction)
    if d.ndim != 1 or d.size == 0:
        raise ValueError("direction must be a non-empty vector")
    if not 1 <= k <= d.size:
        raise ValueError(f"sparsity {k} out of range for dimension {d.size}")
    if _is_object(d):
        order = sorted(range(d.size), key=lambda i: (-abs(d[i]), i))[:k]
    else:
        order = np.argsort(-np.abs(d), kind="stable")[:k].tolist()
    support = sorted(order)
    signs = [-_sign(d[i]) for i in support]
    return SignedSupport(support, signs, radius, d.size)


def hungarian(cost, prefer_compiled=True):
    """Minimum-cost assignment of a square matrix.

    Returns ``(assignment, total_cost)`` where row i is matched to column
    ``assignment[i]``.  float64 matrices go through the compiled kernel
    when it is built; every other dtype (Fractions included) runs the
    generic pure-Python kernel.  Both kernels share the algorithm and
    tie-breaking, so they return identical assignments.
    """
    arr = np.asarray(cost)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("cost matrix must be square")
    n = arr.shape[0]
    if not _is_object(arr):
        if not np.isfinite(arr).all():
            raise ValueError("cost matrix must have finite entries")
        kernel, _ = _core.assignment_kernel(prefer_compiled)
        assignment = np.asarray(
            kernel(np.ascontiguousarray(arr, dtype=np.float64)), dtype=np.intp
        )
        total = 0.0
        for i in range(n):
            total += float(arr[i, assignment[i]])
    else:
        assignment = np.asarray(hungarian_py.solve(arr.tolist()), dtype=np.intp)
        total = sum(arr[i, assignment[i]] for i in range(n))
    return assignment, total


def birkhoff_lmo(direction):
    """Permutation matrix minimizing a linear function over the doubly
    stochastic matrices (vertices suffice by LP theory)."""
    d = np.asarray(direction)
    assignment, _ = hungarian(d)
    return Permutation(assignment)


SingularPair = namedtuple("SingularPair", "sigma u v converged")


def _lcg_unit_vector(dim, seed):
    # Fixed 64-bit linear congruential stream: deterministic start vector
    # independent of any global RNG state.
    mask = (1 << 64) - 1
    state = (int(seed) * 6364136223846793005 + 1442695040888963407) & mask
    vals = np.empty(dim)
    for i in range(dim):
        state = (state * 6364136223846793005 + 1442695040888963407) & mask
        vals[i] = (state >> 11) / float(1 << 53) * 2.0 - 1.0
    norm = math.sqrt(float(vals.dot(vals)))
    if norm == 0:
        vals[0] = 1.0
        norm = 1.0
    return vals / norm


def top_singular_pair(matrix, tol=1e-7, max_iter=500, seed=0):
    """Leading singular triple by power iteration on ``A^T A``.

    Returns ``SingularPair(sigma, u, v, converged)`` with unit vectors
    satisfying ``A v = sigma * u`` by construction.  Convergence is
    declared when the coupled residual ``|A^T u - sigma v|`` drops below
    ``tol * sigma``; hitting ``max_iter`` first returns the best pair
    with ``converged=False``.
    """
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    if not A.any():
        raise ValueError("zero matrix has no leading singular direction")
    n, m = A.shape
    v = _lcg_unit_vector(m, seed)
    for _ in range(max_iter):
        w = A.dot(v)
        sigma = math.sqrt(float(w.dot(w)))
        if sigma == 0:
            # start vector fell in the null space; perturb deterministically
            v = _lcg_unit_vector(m, seed + 1)
            continue
        u = w / sigma
        z = A.T.dot(u)
        resid = z - sigma * v
        znorm = math.sqrt(float(z.dot(z)))
        if znorm > 0:
            v = z / znorm
        if math.sqrt(float(resid.dot(resid))) <= tol * sigma:
            break
    v = _ritz_refine(A, v)
    w = A.dot(v)
    sigma = math.sqrt(float(w.dot(w)))
    if sigma > 0:
        u = w / sigma
    else:
        u = np.zeros(n)
        u[0] = 1.0
    resid = A.T.dot(u) - sigma * v if sigma > 0 else v
    converged = math.sqrt(float(resid.dot(resid))) <= tol * max(sigma, 1e-300)
    return SingularPair(sigma, u, v, converged)


def _ritz_refine(A, v):
    """One Rayleigh-Ritz extraction on span{v, A^T A v}.

    Power iteration stalls when the two leading singular values nearly
    coincide, but by then the iterate lives in their span, so the
    two-dimensional Ritz step recovers the leading vector to roundoff.
    """
    z = A.T.dot(A.dot(v))
    r = z - float(z.dot(v)) * v
    r_norm = math.sqrt(float(r.dot(r)))
    if r_norm <= 1e-14 * max(1.0, math.sqrt(float(z.dot(z)))):
        return v
    q = r / r_norm
    gq = A.T.dot(A.dot(q))
    s11 = float(v.dot(z))
    s12 = float(v.dot(gq))
    s22 = float(q.dot(gq))
    eigvals, eigvecs = np.linalg.eigh(np.array([[s11, s12], [s12, s22]]))
    c = eigvecs[:, int(np.argmax(eigvals))]
    refined = c[0] * v + c[1] * q
    norm = math.sqrt(float(refined.dot(refined)))
    return refined / norm if norm > 0 else v


def nuclear_norm_lmo(matrix, radius, tol=1e-7, max_iter=500, seed=0):
    """Rank-one extreme point of the nuclear-norm ball: ``-radius * u v^T``
    for the top singular pair, so the attained value is ``-radius *
    sigma_1`` up to the power-iteration tolerance."""
    if radius == 0:
        A = np.asarray(matrix, dtype=float)
        e_left = np.zeros(A.shape[0])
        e_left[0] = 1.0
        e_right = np.zeros(A.shape[1])
        e_right[0] = 1.0
        return RankOne(e_left, e_right, 0.0)
    pair = top_singular_pair(matrix, tol=tol, max_iter=max_iter, seed=seed)
    meta = {} if pair.converged else {"not_converged": True}
    return RankOne(pair.u, pair.v, -float(radius), meta=meta)


class ProbabilitySimplexLMO(LinearMinimizationOracle):
    """Scaled probability simplex ``{x >= 0, sum x = radius}``.

    Constructing with a ``Fraction`` radius keeps every returned atom
    exact, which is all a solver needs to run in rational arithmetic.
    """

    def __init__(self, radius=1.0):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = radius

    def compute_extreme_point(self, direction):
        return probability_simplex_lmo(direction, self.radius)

    def vertices(self, dim):
        """All extreme points (for verification at small dimension)."""
        return [ScaledUnit(i, self.radius, dim) for i in range(dim)]


class LpBallLMO(LinearMinimizationOracle):
    """l1, l2 or linf ball of a given radius."""

    def __init__(self, radius=1.0, p=1):
        if radius <= 0:
            raise ValueError("radius must be positive")
        if p not in (1, 2, np.inf, math.inf, "inf"):
            raise ValueError("p must be 1, 2 or inf")
        self.radius = radius
        self.p = p

    def compute_extreme_point(self, direction):
        return lp_ball_lmo(direction, self.radius, self.p)

    def vertices(self, dim):
        if self.p == 1:
            return [
                ScaledUnit(i, s * self.radius, dim)
                for i in range(dim)
                for s in (1, -1)
            ]
        if self.p in (np.inf, math.inf, "inf"):
            verts = []
            for bits in range(1 << dim):
                vals = [
                    self.radius if bits >> i & 1 else -self.radius
                    for i in range(dim)
                ]
                verts.append(DenseVec(np.array(vals, dtype=object)))
            return verts
        raise ValueError("the l2 ball has no finite vertex enumeration")


class KSparseLMO(LinearMinimizationOracle):
    """``radius * (B1(k) ∩ Binf(1))``: k-sparse signed supports."""

    def __init__(self, radius=1.0, k=1):
        if radius <= 0:
            raise ValueError("radius must be positive")
        if k < 1:
            raise ValueError("sparsity must be at least 1")
        self.radius = radius
        self.k = int(k)

    def compute_extreme_point(self, direction):
        return ksparse_lmo(direction, self.radius, self.k)

    def vertices(self, dim):
        from itertools import combinations, product

        verts = []
        for support in combinations(range(dim), self.k):
            for signs in product((1, -1), repeat=self.k):
                verts.append(SignedSupport(support, signs, self.radius, dim))
        return verts


class BirkhoffLMO(LinearMinimizationOracle):
    """Doubly stochastic matrices; extreme points are permutation
    matrices, found by the assignment kernel."""

    def compute_extreme_point(self, direction):
        return birkhoff_lmo(direction)

    def vertices(self, n):
        from itertools import permutations

        return [Permutation(p) for p in permutations(range(n))]


class NuclearNormLMO(LinearMinimizationOracle):
    """Nuclear-norm ball of matrices, ``sum of singular values <= radius``."""

    def __init__(self, radius=1.0, tol=1e-7, max_iter=500, seed=0):
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        self.radius = radius
        self.tol = tol
        self.max_iter = max_iter
        self.seed = seed

    def compute_extreme_point(self, direction):
        return nuclear_norm_lmo(
            direction, self.radius, tol=self.tol, max_iter=self.max_iter, seed=self.seed
        )


class EnumerationLMO(LinearMinimizationOracle):
    """Brute-force minimization over an explicit atom list.

    Useful as an independent verification route and as a drop-in
    replacement oracle for regions small enough to enumerate.
    """

    def __init__(self, atoms):
        self.atoms = list(atoms)
        if not self.atoms:
            raise ValueError("need at least one atom")

    def compute_extreme_point(self, direction):
        direction = np.asarray(direction)
        best = self.atoms[0]
        best_val = best.inner(direction)
        for atom in self.atoms[1:]:
            val = atom.inner(direction)
            if val < best_val:
                best, best_val = atom, val
        return best


class VertexCache:
    """Insertion-ordered atom cache with optional capacity.

    Used by the lazified solvers: lookups scan oldest-first and the first
    atom meeting the caller's threshold wins.  When bounded, inserting
    into a full cache evicts the oldest entry.  ``hits``/``misses`` count
    lookups answered from the cache vs. delegated to the wrapped oracle.
    """

    def __init__(self, capacity=None):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be positive or None")
        self.capacity = capacity
        self.entries = []
        self.hits = 0
        self.misses = 0

    def __len__(self):
        return len(self.entries)

    def insert(self, atom):
        for cached in self.entries:
            if cached == atom:
                return
        self.entries.append(atom)
        if self.capacity is not None and len(self.entries) > self.capacity:
            self.entries.pop(0)

    def find(self, gradient, base_value, threshold):
        """First cached atom v with ``base_value - <gradient, v> >=
        threshold``, or None."""
        for atom in self.entries:
            if base_value - atom.inner(gradient) >= threshold:
                return atom
        return None


def cached_query(cache, wrapped, gradient, x, threshold):
    """Weak-separation lookup: serve any cached atom guaranteeing
    ``<gradient, x - v> >= threshold``, otherwise call the wrapped oracle
    and cache its answer.

    Returns ``(atom, source)`` with source ``"cache"`` or ``"oracle"``.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    gradient = np.asarray(gradient)
    base = dense_inner(gradient, x)
    atom = cache.find(gradient, base, threshold)
    if atom is not None:
        cache.hits += 1
        return atom, "cache"
    cache.misses += 1
    atom = wrapped.compute_extreme_point(gradient)
    cache.insert(atom)
    return atom, "oracle"
