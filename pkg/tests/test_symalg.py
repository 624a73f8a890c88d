# 3rd-party imports
import numpy as np
import pytest

# project imports
from symspin.exceptions import DimensionError, IndexSlotError
from symspin.symalg import (
    block_rotation,
    lower_index,
    lower_indices,
    raise_index,
    raise_indices,
    standard_space,
)


@pytest.mark.parametrize('l', [1, 2, 3])
def test_standard_form_is_adapted(l):
    space = standard_space(l)
    for i in range(l):
        assert space.omega_lower[i, l + i] == 1
        assert space.omega_lower[l + i, i] == -1
    assert np.array_equal(space.omega_lower, -space.omega_lower.T)
    assert np.array_equal(space.omega_lower @ space.omega_upper.T, np.eye(2 * l, dtype=int))


def test_standard_space_rejects_zero_modes():
    with pytest.raises(DimensionError):
        standard_space(0)


def test_pairing_of_basis_vectors():
    space = standard_space(2)
    basis = np.eye(4)
    assert space.pairing(basis[0], basis[2]) == 1
    assert space.pairing(basis[2], basis[0]) == -1
    assert space.pairing(basis[0], basis[1]) == 0


@pytest.mark.parametrize('l', [1, 2])
def test_raise_undoes_lower_on_every_slot(l, rng):
    space = standard_space(l)
    tensor = rng.standard_normal((2 * l, 2 * l, 2 * l))
    for slot in range(3):
        assert np.array_equal(raise_index(space, lower_index(space, tensor, slot), slot), tensor)
        assert np.array_equal(lower_index(space, raise_index(space, tensor, slot), slot), tensor)


def test_raising_a_vector_uses_the_dual_form():
    space = standard_space(1)
    # v^i = omega^{ic} v_c
    assert np.array_equal(raise_index(space, np.array([1.0, 0.0]), 0), space.omega_upper[:, 0])


def test_multi_slot_helpers_compose(rng):
    space = standard_space(1)
    tensor = rng.standard_normal((2, 2))
    lowered = lower_indices(space, tensor, [0, 1])
    assert np.allclose(raise_indices(space, lowered, [0, 1]), tensor, atol=0)


def test_bad_slot_is_rejected():
    space = standard_space(1)
    with pytest.raises(IndexSlotError):
        raise_index(space, np.zeros((2, 2)), 2)
    with pytest.raises(IndexSlotError):
        lower_index(space, np.zeros((3, 2)), 0)


@pytest.mark.parametrize('angle', [0.0, 0.3, np.pi / 2])
def test_block_rotation_is_symplectic(angle):
    space = standard_space(2)
    assert space.is_symplectic(block_rotation(space, angle))
