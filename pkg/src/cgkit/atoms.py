"""Structured extreme points and convex decompositions of solver iterates.

Atoms are immutable after construction and cheap to store: a permutation
matrix keeps only its assignment vector, a rank-one matrix keeps its two
factors.  All arithmetic entry points (`atom_inner`, `iterate_blend`,
`ActiveSet`) work both with float64 buffers and with object-dtype buffers
holding exact `fractions.Fraction` scalars.
"""

import numbers
from fractions import Fraction

import numpy as np

__all__ = [
    "Atom",
    "DenseVec",
    "ScaledUnit",
    "SignedSupport",
    "Permutation",
    "RankOne",
    "ActiveSet",
    "atom_inner",
    "iterate_blend",
    "active_set_select",
    "active_set_update",
]

# Relative drift tolerances for float-weight bookkeeping.
WEIGHT_SUM_TOL = 1e-12
RENORM_TRIGGER = 1e-9


def _is_exact(value):
    return isinstance(value, numbers.Rational)


def _as_scalar(value, exact):
    if exact:
        return value if _is_exact(value) else Fraction(value)
    return float(value)


class Atom:
    """Base class for structured extreme points.

    Subclasses implement ``densify``, ``inner`` and ``add_to`` so that
    solvers never need to materialize atoms unless a dense direction is
    required.  ``meta`` carries oracle-side annotations (degenerate
    direction, non-converged factorization) and is ignored by equality.
    """

    __slots__ = ("meta",)

    @property
    def shape(self):
        raise NotImplementedError

    def densify(self, exact=False):
        """Return a fresh dense array equal to this atom."""
        raise NotImplementedError

    def inner(self, direction):
        """Inner product against a dense direction, O(support) when possible."""
        raise NotImplementedError

    def add_to(self, buffer, weight):
        """In-place ``buffer += weight * atom`` touching only the support."""
        raise NotImplementedError

    def _check_shape(self, array):
        if array.shape != self.shape:
            raise ValueError(
                f"dimension mismatch: atom has shape {self.shape}, "
                f"array has shape {array.shape}"
            )


def _dense_zero(shape, exact):
    if exact:
        buf = np.empty(shape, dtype=object)
        buf[...] = Fraction(0)
        return buf
    return np.zeros(shape)


class DenseVec(Atom):
    """Dense vector atom (used by the l2/linf ball oracles)."""

    __slots__ = ("values",)

    def __init__(self, values, meta=None):
        arr = np.asarray(values)
        if arr.ndim != 1:
            raise ValueError("DenseVec expects a one-dimensional array")
        self.values = arr
        self.meta = meta or {}

    @property
    def shape(self):
        return self.values.shape

    def densify(self, exact=False):
        return self.values.copy()

    def inner(self, direction):
        direction = np.asarray(direction)
        self._check_shape(direction)
        return direction.dot(self.values)

    def add_to(self, buffer, weight):
        self._check_shape(buffer)
        buffer += weight * self.values

    def __eq__(self, other):
        return (
            isinstance(other, DenseVec)
            and self.values.shape == other.values.shape
            and bool(np.all(self.values == other.values))
        )

    def __repr__(self):
        return f"DenseVec(dim={self.values.shape[0]})"


class ScaledUnit(Atom):
    """Signed scaled unit vector ``coeff * e_index`` in dimension ``dim``."""

    __slots__ = ("index", "coeff", "dim")

    def __init__(self, index, coeff, dim, meta=None):
        if not 0 <= index < dim:
            raise ValueError(f"index {index} out of range for dimension {dim}")
        self.index = int(index)
        self.coeff = coeff
        self.dim = int(dim)
        self.meta = meta or {}

    @property
    def shape(self):
        return (self.dim,)

    def densify(self, exact=None):
        if exact is None:
            exact = _is_exact(self.coeff)
        buf = _dense_zero((self.dim,), exact)
        buf[self.index] = self.coeff if exact else float(self.coeff)
        return buf

    def inner(self, direction):
        direction = np.asarray(direction)
        self._check_shape(direction)
        return direction[self.index] * self.coeff

    def add_to(self, buffer, weight):
        self._check_shape(buffer)
        buffer[self.index] += weight * self.coeff

    def __eq__(self, other):
        return (
            isinstance(other, ScaledUnit)
            and self.index == other.index
            and self.dim == other.dim
            and self.coeff == other.coeff
        )

    def __repr__(self):
        return f"ScaledUnit(index={self.index}, coeff={self.coeff}, dim={self.dim})"


class SignedSupport(Atom):
    """K-sparse sign pattern: ``scale * sum_i signs[i] * e_indices[i]``."""

    __slots__ = ("indices", "signs", "scale", "dim")

    def __init__(self, indices, signs, scale, dim, meta=None):
        indices = tuple(int(i) for i in indices)
        signs = tuple(int(s) for s in signs)
        if len(indices) != len(signs):
            raise ValueError("indices and signs must have equal length")
        if any(s not in (-1, 1) for s in signs):
            raise ValueError("signs must be +1 or -1")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if indices and not 0 <= indices[0] <= indices[-1] < dim:
            raise ValueError("support index out of range")
        self.indices = indices
        self.signs = signs
        self.scale = scale
        self.dim = int(dim)
        self.meta = meta or {}

    @property
    def shape(self):
        return (self.dim,)

    def densify(self, exact=None):
        if exact is None:
            exact = _is_exact(self.scale)
        buf = _dense_zero((self.dim,), exact)
        for i, s in zip(self.indices, self.signs):
            buf[i] = s * self.scale
        return buf

    def inner(self, direction):
        direction = np.asarray(direction)
        self._check_shape(direction)
        total = sum(s * direction[i] for i, s in zip(self.indices, self.signs))
        return total * self.scale

    def add_to(self, buffer, weight):
        self._check_shape(buffer)
        ws = weight * self.scale
        for i, s in zip(self.indices, self.signs):
            buffer[i] += s * ws

    def __eq__(self, other):
        return (
            isinstance(other, SignedSupport)
            and self.dim == other.dim
            and self.indices == other.indices
            and self.signs == other.signs
            and self.scale == other.scale
        )

    def __repr__(self):
        return f"SignedSupport(k={len(self.indices)}, scale={self.scale}, dim={self.dim})"


class Permutation(Atom):
    """Permutation matrix stored as its assignment: row i has a one in
    column assignment[i]."""

    __slots__ = ("assignment",)

    def __init__(self, assignment, meta=None):
        assignment = tuple(int(j) for j in assignment)
        n = len(assignment)
        if sorted(assignment) != list(range(n)):
            raise ValueError("assignment is not a bijection on {0..n-1}")
        self.assignment = assignment
        self.meta = meta or {}

    @property
    def shape(self):
        n = len(self.assignment)
        return (n, n)

    def densify(self, exact=False):
        n = len(self.assignment)
        buf = _dense_zero((n, n), exact)
        one = Fraction(1) if exact else 1.0
        for i, j in enumerate(self.assignment):
            buf[i, j] = one
        return buf

    def inner(self, direction):
        direction = np.asarray(direction)
        self._check_shape(direction)
        return sum(direction[i, j] for i, j in enumerate(self.assignment))

    def add_to(self, buffer, weight):
        self._check_shape(buffer)
        for i, j in enumerate(self.assignment):
            buffer[i, j] += weight

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.assignment == other.assignment

    def __repr__(self):
        return f"Permutation(n={len(self.assignment)})"


class RankOne(Atom):
    """Scaled rank-one matrix ``scale * outer(left, right)``.

    Storage is O(N + M); densification is the only O(N*M) operation.
    Equality holds up to a simultaneous sign flip of both factors.
    """

    __slots__ = ("left", "right", "scale")

    def __init__(self, left, right, scale, meta=None):
        self.left = np.asarray(left)
        self.right = np.asarray(right)
        if self.left.ndim != 1 or self.right.ndim != 1:
            raise ValueError("rank-one factors must be vectors")
        self.scale = scale
        self.meta = meta or {}

    @property
    def shape(self):
        return (self.left.shape[0], self.right.shape[0])

    def densify(self, exact=False):
        return self.scale * np.outer(self.left, self.right)

    def inner(self, direction):
        direction = np.asarray(direction)
        self._check_shape(direction)
        return self.scale * self.left.dot(direction.dot(self.right))

    def add_to(self, buffer, weight):
        self._check_shape(buffer)
        buffer += (weight * self.scale) * np.outer(self.left, self.right)

    def __eq__(self, other):
        if not isinstance(other, RankOne) or self.shape != other.shape:
            return False
        if self.scale != other.scale:
            return False
        same = np.all(self.left == other.left) and np.all(self.right == other.right)
        flipped = np.all(self.left == -other.left) and np.all(
            self.right == -other.right
        )
        return bool(same or flipped)

    def __repr__(self):
        return f"RankOne(shape={self.shape}, scale={self.scale})"


def atom_inner(direction, atom):
    """Inner product of a dense direction with an atom.

    Runs in O(support size) for sparse atom kinds; raises on any
    dimension mismatch.
    """
    return atom.inner(np.asarray(direction))


def dense_inner(a, b):
    """Frobenius inner product of two dense buffers of matching shape,
    exact when both hold rational scalars."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.dtype == object or b.dtype == object:
        return (a * b).sum()
    return float(np.vdot(a, b))


def iterate_blend(x, gamma, atom):
    """In-place convex combination ``x <- (1 - gamma) * x + gamma * atom``.

    ``gamma`` must lie in [0, 1].  The buffer is scaled once, then only
    the atom's support is touched.
    """
    if not 0 <= gamma <= 1:
        raise ValueError(f"blend weight {gamma} outside [0, 1]")
    exact = x.dtype == object
    if not exact:
        gamma = float(gamma)
    one = Fraction(1) if exact else 1.0
    x *= one - gamma
    if gamma != 0:
        atom.add_to(x, gamma)


class ActiveSet:
    """Convex decomposition ``x = sum_i weights[i] * atoms[i]``.

    Owned by a single solver run.  Weights stay strictly positive and sum
    to one (exactly for rational scalars, with bounded drift for floats:
    a renormalization pass fires whenever ``|sum - 1| > 1e-9``).  The
    dense iterate buffer is kept consistent with the decomposition by
    every update.
    """

    def __init__(self, atoms, weights, iterate=None):
        self.atoms = list(atoms)
        self.weights = list(weights)
        if not self.atoms or len(self.atoms) != len(self.weights):
            raise ValueError("need matching non-empty atoms and weights")
        self._exact = all(_is_exact(w) for w in self.weights)
        if iterate is None:
            iterate = self.reconstruct()
        self.iterate = iterate

    @classmethod
    def from_atom(cls, atom, exact=None):
        """Singleton decomposition ``{atom: 1}``."""
        if exact is None:
            exact = _has_exact_scalars(atom)
        one = Fraction(1) if exact else 1.0
        return cls([atom], [one], iterate=atom.densify(exact))

    def __len__(self):
        return len(self.atoms)

    @property
    def exact(self):
        return self._exact

    def weight_sum(self):
        return sum(self.weights)

    def reconstruct(self):
        """Fresh dense sum of the decomposition (for consistency checks)."""
        buf = _dense_zero(self.atoms[0].shape, self._exact)
        for w, a in zip(self.weights, self.atoms):
            a.add_to(buf, w)
        return buf

    def find(self, atom):
        """Index of a structurally equal atom, or -1."""
        for i, a in enumerate(self.atoms):
            if a == atom:
                return i
        return -1

    def select(self, gradient):
        """Return ``(away_index, local_best_index)`` for a gradient.

        The away atom maximizes the inner product with the gradient, the
        local best minimizes it; ties go to the lowest list index.
        """
        if not self.atoms:
            raise ValueError("active set is empty")
        gradient = np.asarray(gradient)
        away = best = 0
        away_val = best_val = self.atoms[0].inner(gradient)
        for i in range(1, len(self.atoms)):
            val = self.atoms[i].inner(gradient)
            if val > away_val:
                away, away_val = i, val
            if val < best_val:
                best, best_val = i, val
        return away, best

    def update_forward(self, atom, gamma):
        """Shift weight ``gamma`` toward ``atom``: ``w_i *= (1 - gamma)``
        for all i, then ``gamma`` is added to the target (inserted if
        absent).  ``gamma == 1`` collapses the set to the target."""
        one = Fraction(1) if self._exact else 1.0
        if not 0 <= gamma <= 1:
            raise ValueError(f"forward step {gamma} outside [0, 1]")
        if gamma == 1:
            self.atoms = [atom]
            self.weights = [one]
            self.iterate[...] = atom.densify(self._exact)
            return
        iterate_blend(self.iterate, gamma, atom)
        if gamma == 0:
            return
        scale = one - gamma
        self.weights = [w * scale for w in self.weights]
        idx = self.find(atom)
        if idx >= 0:
            self.weights[idx] += gamma
        else:
            self.atoms.append(atom)
            self.weights.append(gamma)
        self._drop_zeros()
        self._maybe_renormalize()

    def away_gamma_max(self, index):
        """Largest admissible away step from the atom at ``index``."""
        alpha = self.weights[index]
        one = Fraction(1) if self._exact else 1.0
        if alpha >= one:
            raise ValueError("away step undefined for a full-weight atom")
        return alpha / (one - alpha)

    def update_away(self, index, gamma):
        """Move away from the atom at ``index``: ``w_i *= (1 + gamma)``
        for i != index and ``w_index = (1 + gamma) * w_index - gamma``.
        Hitting the cap drops the atom."""
        if not 0 <= index < len(self.atoms):
            raise IndexError(f"atom index {index} out of range")
        gamma_max = self.away_gamma_max(index)
        if gamma < 0 or gamma > gamma_max * (1 + 1e-12):
            raise ValueError(f"away step {gamma} outside [0, {gamma_max}]")
        one = Fraction(1) if self._exact else 1.0
        scale = one + gamma
        away_atom = self.atoms[index]
        new_alpha = scale * self.weights[index] - gamma
        self.weights = [w * scale for w in self.weights]
        self.weights[index] = new_alpha
        # iterate <- (1 + gamma) x - gamma * atom
        self.iterate *= scale
        away_atom.add_to(self.iterate, -gamma)
        if gamma == gamma_max or new_alpha <= 0:
            del self.atoms[index]
            del self.weights[index]
        self._drop_zeros()
        self._maybe_renormalize()

    def transfer(self, src, dst, amount):
        """Move ``amount`` of weight from atom ``src`` to atom ``dst``,
        keeping the iterate inside the hull of the current atoms."""
        if src == dst:
            return
        alpha = self.weights[src]
        if amount < 0 or amount > alpha * (1 + 1e-12):
            raise ValueError(f"transfer amount {amount} outside [0, {alpha}]")
        amount = min(amount, alpha)
        self.weights[src] = alpha - amount
        self.weights[dst] += amount
        self.atoms[dst].add_to(self.iterate, amount)
        self.atoms[src].add_to(self.iterate, -amount)
        if self.weights[src] <= 0:
            del self.atoms[src]
            del self.weights[src]
        self._maybe_renormalize()

    def _drop_zeros(self):
        keep = [i for i, w in enumerate(self.weights) if w > 0]
        if len(keep) != len(self.weights):
            self.atoms = [self.atoms[i] for i in keep]
            self.weights = [self.weights[i] for i in keep]

    def _maybe_renormalize(self):
        if self._exact:
            return
        total = self.weight_sum()
        if abs(total - 1.0) > RENORM_TRIGGER and total > 0:
            self.weights = [w / total for w in self.weights]


def _has_exact_scalars(atom):
    # Permutation entries are integral either way; default such sets to
    # float mode and let exact callers pass ``exact=True`` themselves.
    if isinstance(atom, ScaledUnit):
        return _is_exact(atom.coeff)
    if isinstance(atom, SignedSupport):
        return _is_exact(atom.scale)
    if isinstance(atom, DenseVec):
        return atom.values.dtype == object
    return False


def active_set_select(active_set, gradient):
    """Module-level alias for :meth:`ActiveSet.select`."""
    return active_set.select(gradient)


def active_set_update(active_set, target, gamma, kind):
    """Apply a forward or away update to an active set.

    ``target`` is an atom for forward steps and an index for away steps.
    """
    if kind == "forward":
        active_set.update_forward(target, gamma)
    elif kind == "away":
        active_set.update_away(target, gamma)
    else:
        raise ValueError(f"unknown update kind {kind!r}")
