"""Atom arithmetic and active-set bookkeeping."""

from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from cgkit.atoms import (
    ActiveSet,
    DenseVec,
    Permutation,
    RankOne,
    ScaledUnit,
    SignedSupport,
    active_set_select,
    active_set_update,
    atom_inner,
    iterate_blend,
)


class TestAtomInner:
    def test_scaled_unit_single_coordinate(self):
        d = np.array([1.0, -3.0, 2.0])
        assert atom_inner(d, ScaledUnit(1, 2.0, 3)) == -6.0

    def test_rank_one_trace(self):
        d = np.array([[3.0, 0.0], [0.0, 1.0]])
        atom = RankOne(np.array([1.0, 0.0]), np.array([1.0, 0.0]), -2.0)
        assert atom_inner(d, atom) == -6.0

    def test_permutation_vs_enumeration(self):
        d = np.array([[4.0, 1, 3], [2, 0, 5], [3, 2, 2]])
        atom = Permutation((1, 0, 2))
        value = atom_inner(d, atom)
        best = min(sum(d[i, p[i]] for i in range(3)) for p in permutations(range(3)))
        assert value == 5.0
        assert value == best

    def test_signed_support(self):
        d = np.array([5.0, -1.0, -7.0, 2.0])
        atom = SignedSupport((0, 2), (-1, 1), 1.0, 4)
        assert atom_inner(d, atom) == -12.0

    def test_matches_densified_inner_all_variants(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            d = rng.standard_normal(6)
            atoms = [
                DenseVec(rng.standard_normal(6)),
                ScaledUnit(int(rng.integers(0, 6)), float(rng.normal()), 6),
                SignedSupport((0, 3, 5), (1, -1, 1), float(rng.uniform(0.1, 2)), 6),
            ]
            for atom in atoms:
                direct = atom_inner(d, atom)
                dense = float(d.dot(atom.densify()))
                assert direct == pytest.approx(dense, rel=1e-12)
        for _ in range(50):
            d2 = rng.standard_normal((4, 4))
            u = rng.standard_normal(4)
            v = rng.standard_normal(4)
            atoms2 = [
                Permutation(tuple(rng.permutation(4))),
                RankOne(u / np.linalg.norm(u), v / np.linalg.norm(v), 1.7),
            ]
            for atom in atoms2:
                direct = atom_inner(d2, atom)
                dense = float(np.vdot(d2, atom.densify()))
                assert direct == pytest.approx(dense, rel=1e-12)

    def test_dimension_mismatch_raises(self):
        with pytest.raises(ValueError):
            atom_inner(np.zeros(4), ScaledUnit(0, 1.0, 3))
        with pytest.raises(ValueError):
            atom_inner(np.zeros((3, 3)), Permutation((1, 0)))


class TestIterateBlend:
    def test_full_step_lands_on_atom(self):
        x = np.array([1.0, 0.0])
        iterate_blend(x, 1.0, ScaledUnit(1, 1.0, 2))
        assert np.array_equal(x, [0.0, 1.0])

    def test_zero_step_identity(self):
        x = np.array([1.0, 0.0])
        iterate_blend(x, 0.0, ScaledUnit(1, 1.0, 2))
        assert np.array_equal(x, [1.0, 0.0])

    def test_quarter_step(self):
        x = np.array([1.0, 0.0])
        iterate_blend(x, 0.25, ScaledUnit(1, 1.0, 2))
        assert np.allclose(x, [0.75, 0.25])

    def test_gamma_out_of_range(self):
        x = np.array([1.0, 0.0])
        with pytest.raises(ValueError):
            iterate_blend(x, 1.5, ScaledUnit(1, 1.0, 2))
        with pytest.raises(ValueError):
            iterate_blend(x, -0.1, ScaledUnit(1, 1.0, 2))

    def test_exact_blend(self):
        x = np.array([Fraction(1), Fraction(0)], dtype=object)
        iterate_blend(x, Fraction(1, 4), ScaledUnit(1, Fraction(1), 2))
        assert list(x) == [Fraction(3, 4), Fraction(1, 4)]


class TestActiveSetSelect:
    def test_two_atoms(self):
        aset = ActiveSet(
            [ScaledUnit(0, 1.0, 2), ScaledUnit(1, 1.0, 2)], [0.5, 0.5]
        )
        away, best = active_set_select(aset, np.array([2.0, 0.0]))
        assert (away, best) == (0, 1)

    def test_single_atom(self):
        aset = ActiveSet([ScaledUnit(0, 1.0, 2)], [1.0])
        assert aset.select(np.array([1.0, 1.0])) == (0, 0)

    def test_tie_break_lowest_index(self):
        aset = ActiveSet(
            [ScaledUnit(0, 1.0, 2), ScaledUnit(1, 1.0, 2)], [0.5, 0.5]
        )
        away, best = aset.select(np.array([3.0, 3.0]))
        assert (away, best) == (0, 0)


class TestActiveSetUpdate:
    def test_first_forward_step(self):
        aset = ActiveSet.from_atom(ScaledUnit(0, 1.0, 2))
        active_set_update(aset, ScaledUnit(1, 1.0, 2), 0.25, "forward")
        assert aset.weights == [0.75, 0.25]

    def test_away_drop_at_cap(self):
        a, b = ScaledUnit(0, 1.0, 2), ScaledUnit(1, 1.0, 2)
        aset = ActiveSet([a, b], [0.75, 0.25])
        gamma_max = aset.away_gamma_max(1)
        assert gamma_max == pytest.approx(1.0 / 3.0)
        active_set_update(aset, 1, gamma_max, "away")
        assert len(aset) == 1 and aset.atoms[0] == a
        assert aset.weights[0] == pytest.approx(1.0)

    def test_forward_collapse(self):
        a, b, c = (ScaledUnit(i, 1.0, 3) for i in range(3))
        aset = ActiveSet([a, b], [0.6, 0.4])
        aset.update_forward(c, 1.0)
        assert len(aset) == 1 and aset.atoms[0] == c and aset.weights == [1.0]

    def test_away_over_cap_raises(self):
        aset = ActiveSet(
            [ScaledUnit(0, 1.0, 2), ScaledUnit(1, 1.0, 2)], [0.75, 0.25]
        )
        with pytest.raises(ValueError):
            aset.update_away(1, 0.5)

    def test_bad_index_raises(self):
        aset = ActiveSet.from_atom(ScaledUnit(0, 1.0, 2))
        with pytest.raises(IndexError):
            aset.update_away(3, 0.1)

    def test_duplicate_insertion_merges(self):
        aset = ActiveSet.from_atom(ScaledUnit(0, 1.0, 2))
        aset.update_forward(ScaledUnit(1, 1.0, 2), 0.5)
        aset.update_forward(ScaledUnit(1, 1.0, 2), 0.2)
        assert len(aset) == 2
        assert aset.weight_sum() == pytest.approx(1.0)


class TestActiveSetInvariants:
    def test_random_update_sequences_float(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            dim = 5
            aset = ActiveSet.from_atom(ScaledUnit(0, 1.0, dim))
            for _ in range(40):
                if len(aset) > 1 and rng.random() < 0.3:
                    idx = int(rng.integers(0, len(aset)))
                    cap = aset.away_gamma_max(idx)
                    aset.update_away(idx, float(rng.uniform(0, 1)) * cap)
                else:
                    atom = ScaledUnit(int(rng.integers(0, dim)), 1.0, dim)
                    aset.update_forward(atom, float(rng.uniform(0, 0.95)))
            assert abs(aset.weight_sum() - 1.0) <= 1e-12 * len(aset)
            assert all(w > 0 for w in aset.weights)
            recon = aset.reconstruct()
            scale = max(1.0, float(np.abs(recon).max()))
            assert float(np.abs(recon - aset.iterate).max()) <= 1e-10 * scale

    def test_random_update_sequences_exact(self):
        rng = np.random.default_rng(13)
        dim = 4
        aset = ActiveSet.from_atom(ScaledUnit(0, Fraction(1), dim))
        for _ in range(30):
            if len(aset) > 1 and rng.random() < 0.3:
                idx = int(rng.integers(0, len(aset)))
                cap = aset.away_gamma_max(idx)
                aset.update_away(idx, cap * Fraction(int(rng.integers(0, 5)), 4))
            else:
                atom = ScaledUnit(int(rng.integers(0, dim)), Fraction(1), dim)
                aset.update_forward(atom, Fraction(int(rng.integers(0, 4)), 5))
        assert aset.weight_sum() == 1
        assert all(w > 0 for w in aset.weights)
        assert all(a == b for a, b in zip(aset.reconstruct(), aset.iterate))

    def test_full_forward_step_always_singleton(self):
        rng = np.random.default_rng(17)
        aset = ActiveSet.from_atom(ScaledUnit(0, 1.0, 4))
        for i in range(1, 4):
            aset.update_forward(ScaledUnit(i, 1.0, 4), 0.3)
        aset.update_forward(ScaledUnit(2, 1.0, 4), 1.0)
        assert len(aset) == 1

    def test_transfer_keeps_hull(self):
        a, b = ScaledUnit(0, 1.0, 2), ScaledUnit(1, 1.0, 2)
        aset = ActiveSet([a, b], [0.7, 0.3])
        aset.transfer(0, 1, 0.2)
        assert aset.weights == pytest.approx([0.5, 0.5])
        assert np.allclose(aset.iterate, [0.5, 0.5])
        aset.transfer(0, 1, 0.5)  # full transfer drops the source
        assert len(aset) == 1
        assert np.allclose(aset.iterate, [0.0, 1.0])


class TestEquality:
    def test_rank_one_sign_flip(self):
        u = np.array([0.6, 0.8])
        v = np.array([1.0, 0.0])
        assert RankOne(u, v, 2.0) == RankOne(-u, -v, 2.0)
        assert RankOne(u, v, 2.0) != RankOne(-u, v, 2.0)
        assert RankOne(u, v, 2.0) != RankOne(u, v, -2.0)

    def test_permutation_structural(self):
        assert Permutation((1, 0, 2)) == Permutation((1, 0, 2))
        assert Permutation((1, 0, 2)) != Permutation((0, 1, 2))

    def test_permutation_requires_bijection(self):
        with pytest.raises(ValueError):
            Permutation((0, 0, 2))

    def test_signed_support_requires_sorted(self):
        with pytest.raises(ValueError):
            SignedSupport((2, 0), (1, 1), 1.0, 4)
