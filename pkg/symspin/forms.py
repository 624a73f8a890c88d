"""
This module defines spinor-valued exterior forms and the operator algebra acting on them:

    F+ (alpha x s) = sum_i eps^i ^ alpha x e_i.s
    F- (alpha x s) = - sum_ij omega^{ij} iota_{e_i} alpha x e_j.s
    H = F+ F- + F- F+ = i (r - l) on degree r

plus the projections p10 = (i/l) F+ F- on 1-forms and p20 = (1/l) F+ F+ F- F- on 2-forms.

A form of degree r stores one spinor coefficient vector per strictly increasing index tuple, in
itertools.combinations order. Every operator works on arrays of shape (..., n_components, dim), so
the same code serves single forms and form fields sampled on a grid.

Sign conventions:
    * eps^i ^ eps^K = (-1)^p eps^J where p is the position of i in J = sorted(K + {i})
    * iota_{e_i} eps^J = (-1)^p eps^{J - {i}} with the same p, zero if i is not in J
    * omega as a 2-form has component omega_{ab} on a < b; with it (F+)^2 s = -i omega x s
"""

# stdlib imports
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
import logging
from typing import Any, Dict, List, Optional, Tuple

# 3rd-party imports
import numpy as np
from scipy import linalg

# project imports
from symspin.exceptions import DegreeError, ModelMismatchError
from symspin.fock import FockModel, Spinor
from symspin.symalg import SymplecticSpace, standard_space


logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def subsets(dim: int, degree: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(combinations(range(dim), degree))


@lru_cache(maxsize=None)
def subset_positions(dim: int, degree: int) -> Dict[Tuple[int, ...], int]:
    return {subset: position for position, subset in enumerate(subsets(dim, degree))}


def wedge_sign(i: int, subset: Tuple[int, ...]) -> int:
    """Sign of eps^i ^ eps^subset relative to the sorted tuple, 0 if i is already in subset"""
    if i in subset:
        return 0
    return -1 if sum(1 for j in subset if j < i) % 2 else 1


def interior_sign(i: int, subset: Tuple[int, ...]) -> int:
    """Sign of iota_{e_i} eps^subset relative to the sorted remainder, 0 if i is not in subset"""
    if i not in subset:
        return 0
    return -1 if subset.index(i) % 2 else 1


def _frame_data(space: SymplecticSpace, model: FockModel, frame: Optional[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Clifford generators and dual symplectic form in the adapted frame e'_j = sum_k frame[k, j] e_k.
    Without a frame these are the standard ones.
    """
    clifford = model.clifford_matrices
    if frame is None:
        return clifford, space.omega_upper

    clifford = np.einsum('kj,kab->jab', frame, clifford)
    omega_lower = frame.T @ space.omega_lower @ frame
    omega_upper = linalg.inv(omega_lower).T
    return clifford, omega_upper


def apply_f_plus(
    space: SymplecticSpace,
    model: FockModel,
    components: np.ndarray,
    degree: int,
    frame: Optional[np.ndarray] = None,
) -> np.ndarray:
    """F+ on an (..., C(2l, degree), dim) array; returns (..., C(2l, degree + 1), dim)"""
    dim = space.dim
    clifford, _ = _frame_data(space, model, frame)
    source = subset_positions(dim, degree)
    targets = subsets(dim, degree + 1)
    out = np.zeros(components.shape[:-2] + (len(targets), model.dim), dtype=complex)

    for target_pos, target in enumerate(targets):
        for position, i in enumerate(target):
            rest = target[:position] + target[position + 1:]
            sign = -1.0 if position % 2 else 1.0
            out[..., target_pos, :] += sign * (components[..., source[rest], :] @ clifford[i].T)
    return out


def apply_f_minus(
    space: SymplecticSpace,
    model: FockModel,
    components: np.ndarray,
    degree: int,
    frame: Optional[np.ndarray] = None,
) -> np.ndarray:
    """F- on an (..., C(2l, degree), dim) array; returns (..., C(2l, degree - 1), dim)"""
    dim = space.dim
    clifford, omega_upper = _frame_data(space, model, frame)
    # W_i = sum_j omega^{ij} e_j.
    contracted = np.einsum('ij,jab->iab', omega_upper, clifford)
    source = subset_positions(dim, degree)
    targets = subsets(dim, degree - 1)
    out = np.zeros(components.shape[:-2] + (len(targets), model.dim), dtype=complex)

    for target_pos, target in enumerate(targets):
        for i in range(dim):
            if i in target:
                continue
            full = tuple(sorted(target + (i,)))
            sign = interior_sign(i, full)
            out[..., target_pos, :] -= sign * (components[..., source[full], :] @ contracted[i].T)
    return out


@dataclass(frozen=True, eq=False)
class SpinorForm:
    """A spinor-valued exterior form of a fixed degree"""
    space: SymplecticSpace
    model: FockModel
    degree: int
    components: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.space.l != self.model.l:
            raise ModelMismatchError(f'Space with l={self.space.l} and model with l={self.model.l}')
        if not 0 <= self.degree <= self.space.dim:
            raise DegreeError(f'Degree {self.degree} outside 0..{self.space.dim}')
        components = np.asarray(self.components, dtype=complex)
        expected = (len(subsets(self.space.dim, self.degree)), self.model.dim)
        if components.shape != expected:
            raise ModelMismatchError(f'Components of shape {components.shape}, expected {expected}')
        object.__setattr__(self, 'components', components)

    @classmethod
    def zeros(cls, space: SymplecticSpace, model: FockModel, degree: int) -> 'SpinorForm':
        count = len(subsets(space.dim, degree)) if 0 <= degree <= space.dim else 0
        return cls(space, model, degree, np.zeros((count, model.dim), dtype=complex))

    @classmethod
    def random(
        cls,
        space: SymplecticSpace,
        model: FockModel,
        degree: int,
        rng: np.random.Generator,
        margin: int,
    ) -> 'SpinorForm':
        """Random form with every component in the effective subspace of the given margin"""
        count = len(subsets(space.dim, degree))
        return cls(space, model, degree, model.effective(margin).random_coeffs(rng, (count,)))

    @property
    def keys(self) -> Tuple[Tuple[int, ...], ...]:
        return subsets(self.space.dim, self.degree)

    def component(self, key: Tuple[int, ...]) -> Spinor:
        return Spinor(self.model, self.components[subset_positions(self.space.dim, self.degree)[tuple(key)]])

    def as_spinor(self) -> Spinor:
        if self.degree != 0:
            raise DegreeError(f'Only 0-forms are spinors, got degree {self.degree}')
        return Spinor(self.model, self.components[0])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def _check(self, other: 'SpinorForm') -> None:
        if self.model != other.model or self.space.l != other.space.l or self.degree != other.degree:
            raise ModelMismatchError('Forms differ in model, space or degree')

    def __add__(self, other: 'SpinorForm') -> 'SpinorForm':
        self._check(other)
        return SpinorForm(self.space, self.model, self.degree, self.components + other.components)

    def __sub__(self, other: 'SpinorForm') -> 'SpinorForm':
        self._check(other)
        return SpinorForm(self.space, self.model, self.degree, self.components - other.components)

    def __mul__(self, scalar: complex) -> 'SpinorForm':
        return SpinorForm(self.space, self.model, self.degree, self.components * scalar)

    def __rmul__(self, scalar: complex) -> 'SpinorForm':
        return self.__mul__(scalar)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'degree': self.degree,
            'components': {
                ','.join(str(i + 1) for i in key): Spinor(self.model, coeffs).to_dict()
                for key, coeffs in zip(self.keys, self.components)
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SpinorForm':
        spinors = {key: Spinor.from_dict(value) for key, value in data['components'].items()}
        model = next(iter(spinors.values())).model
        space = standard_space(model.l)
        degree = int(data['degree'])
        components = np.zeros((len(subsets(space.dim, degree)), model.dim), dtype=complex)
        positions = subset_positions(space.dim, degree)
        for label, s in spinors.items():
            key = tuple(int(i) - 1 for i in label.split(',')) if label else ()
            components[positions[key]] = s.coeffs
        return cls(space, model, degree, components)


def f_plus(form: SpinorForm, frame: Optional[np.ndarray] = None) -> SpinorForm:
    if form.degree >= form.space.dim:
        raise DegreeError(f'F+ is not defined on top-degree ({form.degree}) forms')
    components = apply_f_plus(form.space, form.model, form.components, form.degree, frame)
    return SpinorForm(form.space, form.model, form.degree + 1, components)


def f_minus(form: SpinorForm, frame: Optional[np.ndarray] = None) -> SpinorForm:
    # Lambda^{-1} = 0
    if form.degree == 0:
        return SpinorForm.zeros(form.space, form.model, 0)
    components = apply_f_minus(form.space, form.model, form.components, form.degree, frame)
    return SpinorForm(form.space, form.model, form.degree - 1, components)


def h_op(form: SpinorForm) -> SpinorForm:
    """{F+, F-}; top-degree forms have F+ = 0 and 0-forms have F- = 0"""
    result = SpinorForm.zeros(form.space, form.model, form.degree)
    if form.degree > 0:
        result = result + f_plus(f_minus(form))
    if form.degree < form.space.dim:
        result = result + f_minus(f_plus(form))
    return result


def p10(form: SpinorForm) -> SpinorForm:
    """Projection of 1-forms onto the image of F+ on 0-forms"""
    if form.degree != 1:
        raise DegreeError(f'p10 acts on 1-forms, got degree {form.degree}')
    return f_plus(f_minus(form)) * (1j / form.space.l)


def p20(form: SpinorForm) -> SpinorForm:
    """Projection of 2-forms onto the image of (F+)^2 on 0-forms"""
    if form.degree != 2:
        raise DegreeError(f'p20 acts on 2-forms, got degree {form.degree}')
    return f_plus(f_plus(f_minus(f_minus(form)))) * (1.0 / form.space.l)


def omega_form(space: SymplecticSpace, s: Spinor) -> SpinorForm:
    """omega x s, component omega_{ab} s on a < b"""
    keys = subsets(space.dim, 2)
    components = np.array([space.omega_lower[a, b] * s.coeffs for a, b in keys], dtype=complex)
    return SpinorForm(space, s.model, 2, components)


def change_frame(form: SpinorForm, frame: np.ndarray) -> SpinorForm:
    """
    Components of `form` in the dual coframe of e'_j = sum_k frame[k, j] e_k:
    alpha'_J = sum_K det(frame[K, J]) alpha_K.
    """
    keys = form.keys
    if form.degree == 0:
        return form
    minors = np.array([
        [linalg.det(frame[np.ix_(source, target)]) for source in keys]
        for target in keys
    ])
    return SpinorForm(form.space, form.model, form.degree, minors @ form.components)


def _operator_matrix(space: SymplecticSpace, model: FockModel, degree: int, apply) -> np.ndarray:
    count = len(subsets(space.dim, degree))
    size = count * model.dim
    basis = np.eye(size, dtype=complex).reshape(size, count, model.dim)
    images = apply(space, model, basis, degree)
    return images.reshape(size, -1).T


def f_plus_matrix(space: SymplecticSpace, model: FockModel, degree: int) -> np.ndarray:
    """Dense matrix of F+ from degree to degree + 1 on flattened (component, level) vectors"""
    if degree >= space.dim:
        raise DegreeError(f'F+ is not defined on top-degree ({degree}) forms')
    return _operator_matrix(space, model, degree, apply_f_plus)


def f_minus_matrix(space: SymplecticSpace, model: FockModel, degree: int) -> np.ndarray:
    if degree == 0:
        raise DegreeError('F- on 0-forms is the zero map')
    return _operator_matrix(space, model, degree, apply_f_minus)


def component_counts(space: SymplecticSpace) -> List[int]:
    return [len(subsets(space.dim, degree)) for degree in range(space.dim + 1)]
