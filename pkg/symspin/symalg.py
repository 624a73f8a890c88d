"""
This module defines the standard symplectic vector space (V, omega_0) of dimension 2l together with
the index conventions every other module relies on.

Conventions (0-based internally):
    * omega_lower[i, l + i] = 1 and omega_lower[l + i, i] = -1 for 0 <= i < l
    * omega_upper is solved from  sum_k omega_lower[i, k] * omega_upper[j, k] = delta[i, j]
    * raising a slot contracts  omega_upper[i, c] * T[..c..]  and puts the new index where the old one sat
    * lowering a slot contracts  T[..t..] * omega_lower[t, i]
"""

# stdlib imports
from dataclasses import dataclass, field
import logging
from typing import Sequence

# 3rd-party imports
import numpy as np
from scipy import linalg

# project imports
from symspin.defs import MIN_HALF_DIMENSION
from symspin.exceptions import DimensionError, IndexSlotError


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SymplecticSpace:
    """The standard symplectic space of half-dimension l in an adapted symplectic basis"""
    l: int
    omega_lower: np.ndarray = field(repr=False)
    omega_upper: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 * self.l

    def pairing(self, u: np.ndarray, v: np.ndarray) -> complex:
        """omega_0(u, v) for coefficient vectors in the adapted basis"""
        return u @ self.omega_lower @ v

    def is_symplectic(self, g: np.ndarray, tolerance: float = 1e-12) -> bool:
        """True when g^T omega g = omega, i.e. g maps adapted bases to adapted bases"""
        return bool(np.max(np.abs(g.T @ self.omega_lower @ g - self.omega_lower)) < tolerance)


def standard_space(l: int) -> SymplecticSpace:
    """
    Build the standard space of half-dimension l. The dual form omega_upper is obtained by solving
    the defining linear system and then checked exactly against it in integer arithmetic.
    """
    if l < MIN_HALF_DIMENSION:
        raise DimensionError(f'Half-dimension must be >= {MIN_HALF_DIMENSION}, got {l}')

    dim = 2 * l
    omega_lower = np.zeros((dim, dim), dtype=int)
    for i in range(l):
        omega_lower[i, l + i] = 1
        omega_lower[l + i, i] = -1

    # sum_k omega_lower[i, k] omega_upper[j, k] = delta  <=>  omega_lower @ omega_upper.T = I
    solved = linalg.solve(omega_lower.astype(float), np.eye(dim)).T
    omega_upper = np.rint(solved).astype(int)
    if not np.array_equal(omega_lower @ omega_upper.T, np.eye(dim, dtype=int)):
        raise ArithmeticError('Dual symplectic form does not satisfy its defining equation')

    omega_lower.setflags(write=False)
    omega_upper.setflags(write=False)
    logger.debug(f'Built standard symplectic space with l={l}')
    return SymplecticSpace(l=l, omega_lower=omega_lower, omega_upper=omega_upper)


def _check_slot(space: SymplecticSpace, tensor: np.ndarray, slot: int) -> None:
    if not 0 <= slot < tensor.ndim:
        raise IndexSlotError(f'Slot {slot} out of range for a rank-{tensor.ndim} tensor')
    if tensor.shape[slot] != space.dim:
        raise IndexSlotError(f'Slot {slot} has length {tensor.shape[slot]}, expected {space.dim}')


def raise_index(space: SymplecticSpace, tensor: np.ndarray, slot: int) -> np.ndarray:
    """T[..i..] = sum_c omega_upper[i, c] T[..c..], new index placed at `slot`"""
    tensor = np.asarray(tensor)
    _check_slot(space, tensor, slot)
    raised = np.tensordot(space.omega_upper, tensor, axes=([1], [slot]))
    return np.moveaxis(raised, 0, slot)


def lower_index(space: SymplecticSpace, tensor: np.ndarray, slot: int) -> np.ndarray:
    """T[..i..] = sum_t T[..t..] omega_lower[t, i], new index placed at `slot`"""
    tensor = np.asarray(tensor)
    _check_slot(space, tensor, slot)
    lowered = np.tensordot(space.omega_lower, tensor, axes=([0], [slot]))
    return np.moveaxis(lowered, 0, slot)


def raise_indices(space: SymplecticSpace, tensor: np.ndarray, slots: Sequence[int]) -> np.ndarray:
    for slot in slots:
        tensor = raise_index(space, tensor, slot)
    return tensor


def lower_indices(space: SymplecticSpace, tensor: np.ndarray, slots: Sequence[int]) -> np.ndarray:
    for slot in slots:
        tensor = lower_index(space, tensor, slot)
    return tensor


def block_rotation(space: SymplecticSpace, angle: float) -> np.ndarray:
    """
    Symplectic change of adapted frame rotating every (e_i, e_{l+i}) plane by `angle`.
    Column j holds the coefficients of the new e_j in the old basis.
    """
    l = space.l
    c, s = np.cos(angle), np.sin(angle)
    g = np.zeros((space.dim, space.dim))
    for i in range(l):
        g[i, i] = c
        g[l + i, i] = s
        g[i, l + i] = -s
        g[l + i, l + i] = c
    return g
