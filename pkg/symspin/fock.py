"""
This module defines the truncated Hermite (Fock) model of the symplectic spinor module S = L^2(R^l).

A FockModel keeps N Hermite levels per mode and orders multi-indices lexicographically, mode 0 being
the most significant digit. Symplectic Clifford multiplication acts as

    e_i.  = i * X_i      (multiplication by x^i)         0 <= i < l
    e_{l+i}. = D_i       (derivative d/dx^i)              0 <= i < l

in the orthonormal Hermite-function basis. The infinite matrices are cut at level N - 1, so operator
identities only hold on the EffectiveSubspace: multi-indices whose entries are <= N - 1 - margin.
A chain of k Clifford factors is exact on inputs with margin >= k - 1.
"""

# stdlib imports
from dataclasses import dataclass, field
from functools import cached_property
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

# 3rd-party imports
import numpy as np
from scipy import linalg
from scipy.special import eval_hermite, factorial

# project imports
from symspin.defs import DEFAULT_MARGIN, MAX_CUTOFF, MIN_CUTOFF
from symspin.exceptions import DimensionError, IndexSlotError, ModelMismatchError


logger = logging.getLogger(__name__)


def annihilation_matrix(cutoff: int) -> np.ndarray:
    """Single-mode annihilation operator a with a h_n = sqrt(n) h_{n-1}"""
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1)


def position_matrix(cutoff: int) -> np.ndarray:
    """X = (a + a^T) / sqrt(2): sqrt(n/2) on (n-1, n) and sqrt((n+1)/2) on (n+1, n)"""
    a = annihilation_matrix(cutoff)
    return (a + a.T) / np.sqrt(2.0)


def derivative_matrix(cutoff: int) -> np.ndarray:
    """D = (a - a^T) / sqrt(2): sqrt(n/2) on (n-1, n) and -sqrt((n+1)/2) on (n+1, n)"""
    a = annihilation_matrix(cutoff)
    return (a - a.T) / np.sqrt(2.0)


def hermite_function(n: int, x: np.ndarray) -> np.ndarray:
    """Normalized Hermite function h_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi))"""
    x = np.asarray(x, dtype=float)
    norm = 1.0 / np.sqrt(2.0 ** n * factorial(n) * np.sqrt(np.pi))
    return norm * eval_hermite(n, x) * np.exp(-0.5 * x ** 2)


@dataclass(frozen=True)
class FockModel:
    """
    Truncated model with `l` modes and `cutoff` Hermite levels per mode. Matrices are built lazily
    and cached on the instance; treat them as read-only.
    """
    l: int
    cutoff: int

    def __post_init__(self) -> None:
        if self.l not in MAX_CUTOFF:
            raise DimensionError(f'Supported number of modes is {sorted(MAX_CUTOFF)}, got {self.l}')
        if not MIN_CUTOFF <= self.cutoff <= MAX_CUTOFF[self.l]:
            raise DimensionError(
                f'Cutoff for l={self.l} must be in [{MIN_CUTOFF}, {MAX_CUTOFF[self.l]}], got {self.cutoff}'
            )

    @property
    def dim(self) -> int:
        return self.cutoff ** self.l

    @cached_property
    def multi_indices(self) -> np.ndarray:
        """(dim, l) array of level tuples in lexicographic order"""
        grid = np.indices((self.cutoff,) * self.l).reshape(self.l, -1).T
        grid.setflags(write=False)
        return grid

    @cached_property
    def total_levels(self) -> np.ndarray:
        return self.multi_indices.sum(axis=1)

    def check_mode(self, mode: int) -> None:
        if not 0 <= mode < self.l:
            raise IndexSlotError(f'Mode {mode} out of range for l={self.l}')

    def embed(self, single_mode: np.ndarray, mode: int) -> np.ndarray:
        """Act with a single-mode matrix on `mode`, identity on the others"""
        self.check_mode(mode)
        before = np.eye(self.cutoff ** mode)
        after = np.eye(self.cutoff ** (self.l - 1 - mode))
        return np.kron(np.kron(before, single_mode), after)

    @cached_property
    def _position(self) -> List[np.ndarray]:
        single = position_matrix(self.cutoff)
        return [self.embed(single, mode) for mode in range(self.l)]

    @cached_property
    def _derivative(self) -> List[np.ndarray]:
        single = derivative_matrix(self.cutoff)
        return [self.embed(single, mode) for mode in range(self.l)]

    @cached_property
    def clifford_matrices(self) -> np.ndarray:
        """(2l, dim, dim) stack: e_i. = i X_i for i < l, e_{l+i}. = D_i"""
        stack = np.empty((2 * self.l, self.dim, self.dim), dtype=complex)
        for mode in range(self.l):
            stack[mode] = 1j * self._position[mode]
            stack[self.l + mode] = self._derivative[mode]
        stack.setflags(write=False)
        return stack

    def effective(self, margin: int = DEFAULT_MARGIN) -> 'EffectiveSubspace':
        return EffectiveSubspace(self, margin)

    def zero(self) -> 'Spinor':
        return Spinor(self, np.zeros(self.dim, dtype=complex))

    def basis_spinor(self, levels: Sequence[int]) -> 'Spinor':
        """The Hermite product state h_{n_1} x ... x h_{n_l}"""
        if len(levels) != self.l or any(not 0 <= n < self.cutoff for n in levels):
            raise IndexSlotError(f'Invalid levels {tuple(levels)} for {self}')
        coeffs = np.zeros(self.dim, dtype=complex)
        coeffs[np.ravel_multi_index(tuple(levels), (self.cutoff,) * self.l)] = 1.0
        return Spinor(self, coeffs)


def hermite_matrices(model: FockModel, mode: int) -> Tuple[np.ndarray, np.ndarray]:
    """(X, D) for `mode`: multiplication by x^mode and d/dx^mode in the Hermite basis"""
    model.check_mode(mode)
    return model._position[mode], model._derivative[mode]


def oscillator(model: FockModel, mode: int) -> np.ndarray:
    """D^2 - X^2 on `mode`; equals -(2n+1) at level n below the truncation boundary"""
    X, D = hermite_matrices(model, mode)
    return D @ D - X @ X


@dataclass(frozen=True, eq=False)
class Spinor:
    """A coefficient vector over the multi-indices of a FockModel"""
    model: FockModel
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.model.dim,):
            raise ModelMismatchError(f'Coefficient vector of shape {coeffs.shape} does not fit {self.model}')
        object.__setattr__(self, 'coeffs', coeffs)

    def _check(self, other: 'Spinor') -> None:
        if self.model != other.model:
            raise ModelMismatchError(f'{self.model} vs {other.model}')

    def __add__(self, other: 'Spinor') -> 'Spinor':
        self._check(other)
        return Spinor(self.model, self.coeffs + other.coeffs)

    def __sub__(self, other: 'Spinor') -> 'Spinor':
        self._check(other)
        return Spinor(self.model, self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> 'Spinor':
        return Spinor(self.model, self.coeffs * scalar)

    def __rmul__(self, scalar: complex) -> 'Spinor':
        return self.__mul__(scalar)

    def __neg__(self) -> 'Spinor':
        return Spinor(self.model, -self.coeffs)

    def inner(self, other: 'Spinor') -> complex:
        """<self, other>, conjugate-linear in self"""
        self._check(other)
        return complex(np.vdot(self.coeffs, other.coeffs))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @property
    def parity(self) -> Optional[int]:
        """0 for S+ (even), 1 for S- (odd), None for mixed or zero spinors"""
        support = np.abs(self.coeffs) > 0
        if not support.any():
            return None
        parities = np.unique(self.model.total_levels[support] % 2)
        return int(parities[0]) if len(parities) == 1 else None

    def apply(self, matrix: np.ndarray) -> 'Spinor':
        return Spinor(self.model, matrix @ self.coeffs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'l': self.model.l,
            'cutoff': self.model.cutoff,
            'coeffs': [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Spinor':
        model = FockModel(int(data['l']), int(data['cutoff']))
        coeffs = np.array([complex(re, im) for re, im in data['coeffs']], dtype=complex)
        return cls(model, coeffs)


def clifford_apply(s: Spinor, vector: Sequence[complex]) -> Spinor:
    """sum_k v^k e_k.s"""
    vector = np.asarray(vector)
    if vector.shape != (2 * s.model.l,):
        raise IndexSlotError(f'Vector of length {vector.shape} for dimension {2 * s.model.l}')
    operator = np.tensordot(vector, s.model.clifford_matrices, axes=1)
    return s.apply(operator)


class EffectiveSubspace:
    """
    Multi-indices with every entry <= N - 1 - margin. Clifford multiplication maps margin m into
    margin m - 1, so identities built from k factors are asserted with margin >= k - 1.
    """
    def __init__(self, model: FockModel, margin: int = DEFAULT_MARGIN) -> None:
        if not 0 <= margin < model.cutoff:
            raise DimensionError(f'Margin {margin} leaves no levels at cutoff {model.cutoff}')
        self.model = model
        self.margin = margin
        self.mask = np.all(model.multi_indices <= model.cutoff - 1 - margin, axis=1)
        self.indices = np.flatnonzero(self.mask)

    @property
    def dim(self) -> int:
        return len(self.indices)

    @property
    def projector(self) -> np.ndarray:
        return np.diag(self.mask.astype(float))

    def contains(self, s: Spinor, tolerance: float = 0.0) -> bool:
        return bool(np.all(np.abs(s.coeffs[~self.mask]) <= tolerance))

    def basis_spinors(self) -> List[Spinor]:
        spinors = []
        for index in self.indices:
            coeffs = np.zeros(self.model.dim, dtype=complex)
            coeffs[index] = 1.0
            spinors.append(Spinor(self.model, coeffs))
        return spinors

    def random_coeffs(self, rng: np.random.Generator, shape: Tuple[int, ...] = ()) -> np.ndarray:
        """Complex Gaussian coefficients supported on the subspace, batch shape `shape`"""
        coeffs = np.zeros(shape + (self.model.dim,), dtype=complex)
        size = shape + (self.dim,)
        coeffs[..., self.indices] = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return coeffs

    def random_spinor(self, rng: np.random.Generator) -> Spinor:
        return Spinor(self.model, self.random_coeffs(rng))

    def compress(self, operator: np.ndarray) -> np.ndarray:
        """The block of `operator` acting within the subspace"""
        return operator[np.ix_(self.indices, self.indices)]

    def __repr__(self) -> str:
        return f'EffectiveSubspace(model={self.model}, margin={self.margin}, dim={self.dim})'


def effective_spectrum(operator: np.ndarray, subspace: EffectiveSubspace) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-solve a Hermitian operator compressed to the effective subspace.

    Returns eigenvalues sorted by ascending |value| (ties: larger value first) and eigenvectors
    embedded back into the full model as columns.
    """
    block = subspace.compress(operator)
    if not np.allclose(block, block.conj().T, atol=1e-12):
        raise ValueError('Operator is not Hermitian on the effective subspace')

    values, vectors = linalg.eigh(block)
    order = np.lexsort((-values, np.round(np.abs(values), 12)))
    values = values[order]
    embedded = np.zeros((subspace.model.dim, len(values)), dtype=complex)
    embedded[subspace.indices, :] = vectors[:, order]
    logger.debug(f'Effective spectrum of size {len(values)} on {subspace}')
    return values, embedded


def oscillator_spectrum(model: FockModel, mode: int = 0, margin: int = DEFAULT_MARGIN) -> np.ndarray:
    """Eigenvalues of the single-mode oscillator at levels 0..N-1-margin, indexed by level"""
    model.check_mode(mode)
    single = FockModel(1, model.cutoff)
    values, _ = effective_spectrum(oscillator(single, 0), single.effective(margin))
    return values
