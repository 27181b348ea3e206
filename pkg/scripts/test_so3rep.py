"""
Tests for rotations, irreps, projectors and Clebsch-Gordan tensors
"""

import numpy as np
import pytest
from so3rep.rotations import Rotation, random_rotation, random_rotations, rotate_cartesian
from so3rep.projectors import (
    decompose, irrep_matrix, lowering_op, multiplicity, projector, real_basis_unitary,
)
from so3rep.clebsch import basis_blocks, cg, change_of_basis_O, coupling_Q, sum_projector, sum_rank
from so3rep.symmetric import is_symmetric_tensor
from tncore.tensors import delta, epsilon
from utils.errors import InvalidType, ShapeMismatch

# (1)^{⊗l} decompositions, highest type first
DECOMPOSITIONS = {
    1: [(1, 1)],
    2: [(2, 1), (1, 1), (0, 1)],
    3: [(3, 1), (2, 2), (1, 3), (0, 1)],
    4: [(4, 1), (3, 3), (2, 6), (1, 6), (0, 3)],
    5: [(5, 1), (4, 4), (3, 10), (2, 15), (1, 15), (0, 6)],
}


def recursive_multiplicities(max_l):
    """Tensor with (1) one step at a time: (s)⊗(1) = (s+1)⊕(s)⊕(s-1), (0)⊗(1) = (1)"""
    table = {1: {1: 1}}
    for l in range(1, max_l):
        nxt = {}
        for s, d in table[l].items():
            targets = [1] if s == 0 else [s - 1, s, s + 1]
            for t in targets:
                nxt[t] = nxt.get(t, 0) + d
        table[l + 1] = nxt
    return table


class TestRotations:

    def test_orthogonal_with_unit_determinant(self):
        for seed in range(10):
            r = random_rotation(seed)
            assert np.max(np.abs(r.m.T @ r.m - np.eye(3))) < 1e-12
            assert np.linalg.det(r.m) == pytest.approx(1.0, abs=1e-12)

    def test_seed_is_reproducible(self):
        np.testing.assert_array_equal(random_rotation(42).m, random_rotation(42).m)

    def test_batch_draws_distinct_rotations(self):
        a, b = random_rotations(2, 3)
        assert not np.allclose(a.m, b.m)

    def test_identity_leaves_tensor_alone(self, rng):
        t = rng.standard_normal((3, 3, 3))
        np.testing.assert_allclose(rotate_cartesian(Rotation.identity(), t), t)

    def test_vector_and_matrix_actions(self, rng):
        r = random_rotation(1)
        v = rng.standard_normal(3)
        np.testing.assert_allclose(rotate_cartesian(r, v), r.m @ v, atol=1e-14)
        a = rng.standard_normal((3, 3))
        naive = np.zeros((3, 3))
        for i in range(3):
            for j in range(3):
                naive[i, j] = sum(r.m[i, k] * r.m[j, l] * a[k, l] for k in range(3) for l in range(3))
        np.testing.assert_allclose(rotate_cartesian(r, a), naive, atol=1e-13)

    def test_rejects_non_spatial_extent(self):
        with pytest.raises(ShapeMismatch):
            rotate_cartesian(Rotation.identity(), np.zeros((3, 4)))


class TestMultiplicity:

    @pytest.mark.parametrize('l,s,expected', [(2, 1, 1), (4, 2, 6), (5, 3, 10)])
    def test_examples(self, l, s, expected):
        assert multiplicity(l, s) == expected

    def test_top_type_is_simple(self):
        for l in range(1, 9):
            assert multiplicity(l, l) == 1

    def test_decomposition_table(self):
        for l, expected in DECOMPOSITIONS.items():
            assert decompose(l) == expected

    def test_dimension_conservation(self):
        for l in range(1, 9):
            assert sum((2 * s + 1) * multiplicity(l, s) for s in range(l + 1)) == 3 ** l

    def test_matches_recursive_decomposition(self):
        table = recursive_multiplicities(8)
        for l in range(1, 9):
            for s in range(l + 1):
                assert multiplicity(l, s) == table[l].get(s, 0), (l, s)

    def test_type_above_rank(self):
        with pytest.raises(InvalidType):
            multiplicity(2, 3)


class TestLoweringOperator:

    def test_l1_entries(self):
        m = lowering_op(1)
        np.testing.assert_allclose(m, [[0, 0, 0], [np.sqrt(2), 0, 0], [0, np.sqrt(2), 0]])

    def test_l0_is_zero(self):
        np.testing.assert_array_equal(lowering_op(0), np.zeros((1, 1)))

    def test_nilpotent(self):
        for l in range(5):
            power = np.linalg.matrix_power(lowering_op(l), 2 * l + 1)
            np.testing.assert_array_equal(power, np.zeros_like(power))


class TestProjectors:

    def test_p1_is_identity(self):
        np.testing.assert_allclose(projector(1).p, np.eye(3), atol=1e-15)

    def test_real_basis_unitary_is_unitary(self):
        for l in range(5):
            u = real_basis_unitary(l)
            np.testing.assert_allclose(u @ u.conj().T, np.eye(2 * l + 1), atol=1e-14)

    @pytest.mark.parametrize('l', [0, 1, 2, 3, 4])
    def test_isometry(self, l):
        m = projector(l).matrix
        np.testing.assert_allclose(m @ m.T, np.eye(2 * l + 1), atol=1e-10)

    @pytest.mark.parametrize('l', [1, 2, 3, 4])
    def test_intertwiner(self, l, rotations):
        m = projector(l).matrix
        for r in rotations:
            power = np.eye(1)
            for _ in range(l):
                power = np.kron(power, r.m)
            assert np.max(np.abs(irrep_matrix(r, l).d @ m - m @ power)) < 1e-8

    def test_p2_image_is_symmetric_traceless(self):
        for row in projector(2).p:
            np.testing.assert_allclose(row, row.T, atol=1e-10)
            assert abs(np.trace(row)) < 1e-10

    def test_p2_keeps_traceless_part_of_outer_product(self):
        v = np.array([0.0, 0.0, 1.0])
        p = projector(2).matrix
        kept = (p.T @ (p @ np.outer(v, v).ravel())).reshape(3, 3)
        np.testing.assert_allclose(kept, np.outer(v, v) - np.eye(3) / 3.0, atol=1e-12)

    def test_projector_is_read_only(self):
        with pytest.raises(ValueError):
            projector(2).p[0, 0, 0] = 1.0

    def test_type_above_cap(self):
        with pytest.raises(InvalidType):
            projector(99)


class TestIrrepMatrices:

    def test_l1_is_the_rotation(self):
        r = random_rotation(11)
        np.testing.assert_allclose(irrep_matrix(r, 1).d, r.m, atol=1e-14)

    def test_l0_is_one(self):
        np.testing.assert_array_equal(irrep_matrix(random_rotation(0), 0).d, [[1.0]])

    @pytest.mark.parametrize('l', [2, 3])
    def test_homomorphism_and_orthogonality(self, l):
        r1, r2 = random_rotations(2, 8)
        d1 = irrep_matrix(r1, l).d
        d2 = irrep_matrix(r2, l).d
        assert np.max(np.abs(irrep_matrix(r1 @ r2, l).d - d1 @ d2)) < 1e-9
        np.testing.assert_allclose(d1.T @ d1, np.eye(2 * l + 1), atol=1e-10)


class TestCouplingAndChangeOfBasis:

    @pytest.mark.parametrize('l', [1, 2, 3, 4])
    def test_q_is_orthogonal(self, l):
        q = coupling_Q(l)
        assert q.shape == (3 * (2 * l + 1), 3 * (2 * l + 1))
        assert np.max(np.abs(q.T @ q - np.eye(q.shape[0]))) < 1e-10

    def test_q1_scalar_channel_is_the_trace(self):
        q = coupling_Q(1)
        scalar = q[:, -1]
        np.testing.assert_allclose(np.abs(scalar), np.eye(3).ravel() / np.sqrt(3), atol=1e-10)

    def test_block_layout(self):
        assert [t for t, _ in basis_blocks(2)] == [2, 1, 0]
        assert [t for t, _ in basis_blocks(3)].count(2) == 2
        assert [start for _, start in basis_blocks(2)] == [0, 5, 8]

    @pytest.mark.parametrize('l', [1, 2, 3, 4])
    def test_o_is_orthogonal(self, l):
        o = change_of_basis_O(l)
        assert np.max(np.abs(o.T @ o - np.eye(3 ** l))) < 1e-9

    def test_o_blocks_are_equivariant(self):
        r = random_rotation(4)
        o = change_of_basis_O(3)
        rotated = np.kron(np.kron(r.m, r.m), r.m)
        for t, start in basis_blocks(3):
            rows = o[start:start + 2 * t + 1]
            np.testing.assert_allclose(rows @ rotated, irrep_matrix(r, t).d @ rows, atol=1e-9)

    def test_sum_projector_is_an_equivariant_isometry(self):
        types = (1, 2)
        r_power = sum_rank(types)
        p = sum_projector(types)
        assert p.shape == (8,) + (3,) * r_power
        m = p.reshape(8, -1)
        np.testing.assert_allclose(m @ m.T, np.eye(8), atol=1e-10)
        r = random_rotation(21)
        block = np.zeros((8, 8))
        block[:3, :3] = irrep_matrix(r, 1).d
        block[3:, 3:] = irrep_matrix(r, 2).d
        full = np.eye(1)
        for _ in range(r_power):
            full = np.kron(full, r.m)
        np.testing.assert_allclose(m @ full, block @ m, atol=1e-9)

    def test_sum_rank_needs_enough_copies(self):
        assert sum_rank((2,)) == 2
        assert sum_rank((1, 1)) == 3
        assert sum_rank((0, 0, 0)) == 4


class TestClebschGordan:

    def test_scalar_channel_is_identity(self):
        c = cg(1, 1, 0).c[:, :, 0]
        np.testing.assert_allclose(c, np.eye(3) / np.sqrt(3), atol=1e-10)

    def test_vector_channel_is_epsilon(self):
        c = cg(1, 1, 1).c
        np.testing.assert_allclose(np.abs(c), np.abs(epsilon()) / np.sqrt(2), atol=1e-10)
        ratio = c[0, 1, 2] / epsilon()[0, 1, 2]
        np.testing.assert_allclose(c, ratio * epsilon(), atol=1e-10)

    @pytest.mark.parametrize('la,lb,lc', [(1, 1, 2), (2, 2, 2), (1, 2, 3), (2, 1, 1)])
    def test_normalization_and_intertwiner(self, la, lb, lc):
        t = cg(la, lb, lc)
        assert t.allowed
        assert np.sum(t.c ** 2) == pytest.approx(2 * lc + 1)
        assert is_symmetric_tensor(t.c, (la, lb, lc), tol=1e-9, rotations=20, seed=3)

    def test_triangle_violation_gives_zero(self):
        t = cg(1, 1, 3)
        assert not t.allowed
        assert not np.any(t.c)
        assert t.c.shape == (3, 3, 7)

    def test_sign_rule(self):
        c = cg(2, 2, 2).c.ravel()
        first = c[np.argmax(np.abs(c) > 1e-8)]
        assert first > 0


class TestSymmetricTensors:

    def test_delta_and_epsilon(self):
        assert is_symmetric_tensor(delta(), (1, 1))
        assert is_symmetric_tensor(epsilon(), (1, 1, 1))

    def test_random_tensor(self, rng):
        assert not is_symmetric_tensor(rng.standard_normal((3, 3)), (1, 1))

    def test_extent_mismatch(self):
        with pytest.raises(ShapeMismatch):
            is_symmetric_tensor(np.zeros((3, 5)), (1, 1))
