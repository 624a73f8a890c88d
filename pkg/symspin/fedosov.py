"""
This module defines the chart-level Fedosov geometry: curvature, the symplectic Ricci tensor and its
rank-4 extension, the Weyl/Ricci-type classification, the spinor derivative and its curvature.

Index conventions (0-based, grid axes first, see charts/base.py):
    R[..., k, m, i, j] = R^k_mij      R(e_i, e_j) e_m = sum_k R^k_mij e_k
    sigma_ij = sum_k R^k_jki         sigma(X, Y) = Tr(V -> R(V, X) Y)
    R_flat[..., b, a, i, j] = sum_t R^t_aij omega_tb   (first slot lowered in place)

The spinor derivative on a trivial metaplectic structure is the frame derivative of the coefficient
functions plus the Clifford correction
    C_a = -(i/2) sum_{i<l} sum_k [ Gamma^k_{a i} e_{l+i}.e_k. - Gamma^k_{a,l+i} e_i.e_k. ]
"""

# stdlib imports
from dataclasses import dataclass, field
from functools import lru_cache
import logging
from typing import Optional, Sequence, Tuple

# 3rd-party imports
import numpy as np

# project imports
from symspin.charts.base import ChartModel
from symspin.defs import CurvatureType
from symspin.exceptions import DegreeError, GridResolutionError, ModelMismatchError
from symspin.fock import FockModel, Spinor
from symspin.forms import SpinorForm, apply_f_minus, apply_f_plus, subsets
from symspin.settings_manager import settings_manager
from symspin.symalg import SymplecticSpace, lower_index, raise_indices, standard_space


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpinorField:
    """One spinor coefficient vector per grid node, values[..., level]"""
    chart: ChartModel
    model: FockModel
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.chart.grid_shape + (self.model.dim,):
            raise ModelMismatchError(f'Field of shape {values.shape} on grid {self.chart.grid_shape}')
        if self.model.l != self.chart.space.l:
            raise ModelMismatchError(f'Model with l={self.model.l} on a chart with l={self.chart.space.l}')
        object.__setattr__(self, 'values', values)

    @classmethod
    def constant(cls, chart: ChartModel, s: Spinor) -> 'SpinorField':
        return cls(chart, s.model, np.broadcast_to(s.coeffs, chart.grid_shape + (s.model.dim,)).copy())

    @classmethod
    def zeros(cls, chart: ChartModel, model: FockModel) -> 'SpinorField':
        return cls(chart, model, np.zeros(chart.grid_shape + (model.dim,), dtype=complex))

    def at(self, node: Tuple[int, ...]) -> Spinor:
        return Spinor(self.model, self.values[node])

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=-1)

    def max_norm(self, depth: int = ChartModel.INTERIOR_DEPTH) -> float:
        return float(np.max(self.norms()[self.chart.interior_mask(depth)]))

    def _check(self, other: 'SpinorField') -> None:
        if self.model != other.model or self.chart is not other.chart:
            raise ModelMismatchError('Fields live on different charts or models')

    def __add__(self, other: 'SpinorField') -> 'SpinorField':
        self._check(other)
        return SpinorField(self.chart, self.model, self.values + other.values)

    def __sub__(self, other: 'SpinorField') -> 'SpinorField':
        self._check(other)
        return SpinorField(self.chart, self.model, self.values - other.values)

    def __mul__(self, scalar: complex) -> 'SpinorField':
        return SpinorField(self.chart, self.model, self.values * scalar)

    def __rmul__(self, scalar: complex) -> 'SpinorField':
        return self.__mul__(scalar)


@dataclass(frozen=True, eq=False)
class FormField:
    """A spinor-valued form per grid node, values[..., component, level]"""
    chart: ChartModel
    model: FockModel
    degree: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        count = len(subsets(self.chart.space.dim, self.degree))
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.chart.grid_shape + (count, self.model.dim):
            raise ModelMismatchError(f'Form field of shape {values.shape} for degree {self.degree}')
        object.__setattr__(self, 'values', values)

    @property
    def space(self) -> SymplecticSpace:
        return self.chart.space

    def at(self, node: Tuple[int, ...]) -> SpinorForm:
        return SpinorForm(self.space, self.model, self.degree, self.values[node])

    def f_plus(self) -> 'FormField':
        if self.degree >= self.space.dim:
            raise DegreeError(f'F+ is not defined on top-degree ({self.degree}) forms')
        values = apply_f_plus(self.space, self.model, self.values, self.degree)
        return FormField(self.chart, self.model, self.degree + 1, values)

    def f_minus(self) -> 'FormField':
        if self.degree == 0:
            return FormField(self.chart, self.model, 0, np.zeros_like(self.values))
        values = apply_f_minus(self.space, self.model, self.values, self.degree)
        return FormField(self.chart, self.model, self.degree - 1, values)

    def as_spinor_field(self) -> SpinorField:
        if self.degree != 0:
            raise DegreeError(f'Only 0-form fields are spinor fields, got degree {self.degree}')
        return SpinorField(self.chart, self.model, self.values[..., 0, :])

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.values) ** 2, axis=(-2, -1)))

    def max_norm(self, depth: int = ChartModel.INTERIOR_DEPTH) -> float:
        return float(np.max(self.norms()[self.chart.interior_mask(depth)]))

    def __add__(self, other: 'FormField') -> 'FormField':
        return FormField(self.chart, self.model, self.degree, self.values + other.values)

    def __sub__(self, other: 'FormField') -> 'FormField':
        return FormField(self.chart, self.model, self.degree, self.values - other.values)

    def __mul__(self, scalar: complex) -> 'FormField':
        return FormField(self.chart, self.model, self.degree, self.values * scalar)

    def __rmul__(self, scalar: complex) -> 'FormField':
        return self.__mul__(scalar)


@dataclass(frozen=True, eq=False)
class RicciData:
    """sigma_ij and sigma^ij sampled on a grid (or a single node when the grid shape is ())"""
    space: SymplecticSpace
    sigma_lower: np.ndarray = field(repr=False)
    sigma_upper: np.ndarray = field(repr=False)
    symmetry_error: float = 0.0

    @classmethod
    def from_lower(cls, space: SymplecticSpace, sigma_lower: np.ndarray) -> 'RicciData':
        rank = sigma_lower.ndim
        sigma_upper = raise_indices(space, sigma_lower, [rank - 2, rank - 1])
        symmetry_error = float(np.max(np.abs(sigma_lower - np.swapaxes(sigma_lower, -2, -1))))
        return cls(space, sigma_lower, sigma_upper, symmetry_error)

    def is_constant(self, tolerance: float) -> bool:
        flat = self.sigma_upper.reshape(-1, self.space.dim, self.space.dim)
        return bool(np.max(np.abs(flat - flat[0])) <= tolerance)

    def is_zero(self, tolerance: float) -> bool:
        return bool(np.max(np.abs(self.sigma_upper)) <= tolerance)

    def constant_value(self) -> np.ndarray:
        return self.sigma_upper.reshape(-1, self.space.dim, self.space.dim)[0]


@dataclass(frozen=True)
class Classification:
    curvature_type: CurvatureType
    sigma_error: float
    ricci_error: float
    note: str = ''


@dataclass(frozen=True, eq=False)
class CurvatureAction:
    """Closed-form p20 R^s phi next to the one assembled from second spinor derivatives"""
    closed_form: FormField
    assembled: FormField
    residual: float


def curvature(chart: ChartModel) -> np.ndarray:
    """
    R^k_mij = e_i(Gamma^k_jm) - e_j(Gamma^k_im)
              + sum_p (Gamma^p_jm Gamma^k_ip - Gamma^p_im Gamma^k_jp)
              - sum_q c^q_ij Gamma^k_qm
    """
    gamma = chart.gamma
    dim = chart.space.dim
    # derivative[..., a, k, i, j] = e_a(Gamma^k_ij)
    derivative = np.stack([chart.frame_derivative(gamma, a) for a in range(dim)], axis=-4)
    first = np.einsum('...ikjm->...kmij', derivative) - np.einsum('...jkim->...kmij', derivative)
    quadratic = np.einsum('...pjm,...kip->...kmij', gamma, gamma) - np.einsum('...pim,...kjp->...kmij', gamma, gamma)
    bracket = np.einsum('...qij,...kqm->...kmij', chart.frame_brackets(), gamma)
    logger.debug(f'Assembled curvature on {chart}')
    return first + quadratic - bracket


def ricci(chart: ChartModel, curvature_field: Optional[np.ndarray] = None) -> RicciData:
    """sigma_ij = sum_k R^k_jki, returned with both indices lowered and raised"""
    if curvature_field is None:
        curvature_field = curvature(chart)
    sigma_lower = np.einsum('...kjki->...ij', curvature_field)
    data = RicciData.from_lower(chart.space, sigma_lower)

    interior = chart.interior_mask()
    asymmetry = np.abs(sigma_lower - np.swapaxes(sigma_lower, -2, -1))[interior]
    if asymmetry.size and np.max(asymmetry) > settings_manager.tolerance('field_residual') + 10 * chart.spacing ** 2:
        logger.warning(f'Symplectic Ricci tensor is not symmetric on {chart}: {np.max(asymmetry):.3e}')
    return data


def constant_ricci(space: SymplecticSpace, sigma_upper: np.ndarray, grid_shape: Tuple[int, ...] = ()) -> RicciData:
    """RicciData for a constant sigma^ij given in raised form"""
    sigma_upper = np.asarray(sigma_upper, dtype=float)
    # lowering both slots inverts raising both
    sigma_lower = lower_index(space, lower_index(space, sigma_upper, 0), 1)
    sigma_lower = np.broadcast_to(sigma_lower, grid_shape + sigma_lower.shape).copy()
    return RicciData.from_lower(space, sigma_lower)


def sphere_sigma_closed_form(radius: float, grid_shape: Tuple[int, ...] = ()) -> RicciData:
    """
    Ricci data of the round sphere in the normalization sigma^ij = (1/r) Id, which is what the
    Killing spectrum 2 r lambda^2 = -(2n+1) is written against. The curvature assembled on the chart
    gives (1/r^2) Id instead; the two agree at r = 1.
    """
    return constant_ricci(standard_space(1), np.eye(2) / radius, grid_shape)


def extended_ricci(space: SymplecticSpace, sigma: RicciData) -> np.ndarray:
    """
    2(l+1) st_ijkn = w_in s_jk - w_ik s_jn + w_jn s_ik - w_jk s_in + 2 s_ij w_kn
    """
    w = space.omega_lower.astype(float)
    s = sigma.sigma_lower
    total = (
        np.einsum('in,...jk->...ijkn', w, s)
        - np.einsum('ik,...jn->...ijkn', w, s)
        + np.einsum('jn,...ik->...ijkn', w, s)
        - np.einsum('jk,...in->...ijkn', w, s)
        + 2 * np.einsum('...ij,kn->...ijkn', s, w)
    )
    return total / (2 * (space.l + 1))


def lowered_curvature(space: SymplecticSpace, curvature_field: np.ndarray) -> np.ndarray:
    """R_flat[..., b, a, i, j] = sum_t R^t_aij omega_tb, comparable entrywise with extended_ricci"""
    return lower_index(space, curvature_field, curvature_field.ndim - 4)


def _sample_like_coarse(chart: ChartModel, values: np.ndarray) -> np.ndarray:
    index = [slice(None)] * len(chart.axes)
    for position in chart.reduced_axes():
        index[position] = slice(None, None, 2)
    return values[tuple(index)]


def classify(chart: ChartModel, tolerance: Optional[float] = None) -> Classification:
    """
    Weyl type iff sigma vanishes, Ricci type iff R_flat equals the extended Ricci tensor, Generic
    otherwise. Flat curvature is of both types and is reported as Weyl with a note.

    Without an explicit tolerance each node gets its own grid tolerance: the change of the
    quantity between the chart and its every-other-node coarsening (a Richardson estimate that
    bounds the fine-grid discretization error for a second-order scheme) plus a round-off floor.
    Both grids are compared at the nodes they share.
    """
    space = chart.space
    floor = settings_manager.tolerance('field_residual')

    fine_curvature = curvature(chart)
    fine_sigma = ricci(chart, fine_curvature).sigma_lower
    fine_difference = lowered_curvature(space, fine_curvature) - extended_ricci(space, RicciData.from_lower(space, fine_sigma))

    if tolerance is None:
        if any(chart.axes[p].size < 5 for p in chart.reduced_axes()):
            raise GridResolutionError('Grid-based classification needs at least 5 nodes per non-periodic axis')
        coarse = chart.coarsened()
        coarse_curvature = curvature(coarse)
        coarse_sigma = ricci(coarse, coarse_curvature).sigma_lower
        coarse_difference = lowered_curvature(space, coarse_curvature) - extended_ricci(
            space, RicciData.from_lower(space, coarse_sigma)
        )
        mask = coarse.interior_mask()
        sigma_values = _sample_like_coarse(chart, fine_sigma)[mask]
        sigma_bound = np.abs(sigma_values - coarse_sigma[mask]) + floor
        difference_values = _sample_like_coarse(chart, fine_difference)[mask]
        difference_bound = np.abs(difference_values - coarse_difference[mask]) + floor
    else:
        mask = chart.interior_mask()
        sigma_values = fine_sigma[mask]
        sigma_bound = np.full(sigma_values.shape, tolerance)
        difference_values = fine_difference[mask]
        difference_bound = np.full(difference_values.shape, tolerance)

    sigma_error = float(np.max(np.abs(sigma_values)))
    ricci_error = float(np.max(np.abs(difference_values)))
    weyl = bool(np.all(np.abs(sigma_values) <= sigma_bound))
    ricci_type = bool(np.all(np.abs(difference_values) <= difference_bound))

    if weyl:
        result = Classification(CurvatureType.WEYL, sigma_error, ricci_error, 'both' if ricci_type else '')
    elif ricci_type:
        result = Classification(CurvatureType.RICCI, sigma_error, ricci_error)
    else:
        result = Classification(CurvatureType.GENERIC, sigma_error, ricci_error)
    logger.info(f'Classified {chart} as {result.curvature_type.value} {result.note}'.strip())
    return result


@lru_cache(maxsize=8)
def _lift_products(model: FockModel) -> Tuple[np.ndarray, np.ndarray]:
    """(e_{l+i} e_k, e_i e_k) for i < l and all k, each of shape (l, 2l, dim, dim)"""
    clifford = model.clifford_matrices
    l = model.l
    upper = np.einsum('iab,kbc->ikac', clifford[l:], clifford)
    lower = np.einsum('iab,kbc->ikac', clifford[:l], clifford)
    return upper, lower


def spin_lift(endomorphism: np.ndarray, model: FockModel) -> np.ndarray:
    """
    Spinor operator of an endomorphism field A[..., k, j] (A e_j = sum_k A_kj e_k):
        -(i/2) sum_{i<l} [ e_{l+i}.(A e_i). - e_i.(A e_{l+i}). ]
    For A in sp(V) its commutator with Clifford multiplication is [lift, v.] = (A v).
    """
    l = model.l
    upper, lower = _lift_products(model)
    first = np.einsum('...ki,ikab->...ab', endomorphism[..., :, :l], upper)
    second = np.einsum('...ki,ikab->...ab', endomorphism[..., :, l:], lower)
    return -0.5j * (first - second)


def spinor_connection_matrices(chart: ChartModel, model: FockModel) -> np.ndarray:
    """C[..., a, :, :] = spin_lift(nabla_{e_a}) with (nabla_{e_a})_kj = Gamma^k_aj"""
    endomorphisms = np.swapaxes(chart.gamma, -3, -2)  # [..., a, k, j]
    return spin_lift(endomorphisms, model)


def _connection_action(chart: ChartModel, model: FockModel, values: np.ndarray, direction: int) -> np.ndarray:
    """C_a applied to a grid of spinors without forming the per-node matrices"""
    l = model.l
    gamma = chart.gamma[..., :, direction, :]  # [..., k, j] = Gamma^k_aj
    if not np.any(gamma):
        return np.zeros_like(values)
    clifford = model.clifford_matrices
    products = np.einsum('kab,...b->...ka', clifford, values)  # e_k.phi
    upper = np.einsum('iab,...kb->...ika', clifford[l:], products)  # e_{l+i}.e_k.phi
    lower = np.einsum('iab,...kb->...ika', clifford[:l], products)  # e_i.e_k.phi
    first = np.einsum('...ki,...ika->...a', gamma[..., :, :l], upper)
    second = np.einsum('...ki,...ika->...a', gamma[..., :, l:], lower)
    return -0.5j * (first - second)


def spinor_covariant_derivative(field: SpinorField, direction: int) -> SpinorField:
    """nabla^s_{e_a} phi at every node; boundary rows carry one-sided differences"""
    chart = field.chart
    values = chart.frame_derivative(field.values, direction)
    values = values + _connection_action(chart, field.model, field.values, direction)
    return SpinorField(chart, field.model, values)


def covariant_derivative_form(field: SpinorField) -> FormField:
    """nabla^s phi as the spinor-valued 1-form sum_a eps^a x nabla^s_{e_a} phi"""
    dim = field.chart.space.dim
    values = np.stack([spinor_covariant_derivative(field, a).values for a in range(dim)], axis=-2)
    return FormField(field.chart, field.model, 1, values)


def clifford_field(field: SpinorField, vectorfield: np.ndarray) -> SpinorField:
    """Y.phi for frame components Y[..., k]"""
    clifford = field.model.clifford_matrices
    values = np.einsum('...k,kab,...b->...a', vectorfield, clifford, field.values)
    return SpinorField(field.chart, field.model, values)


def leibniz_check(field: SpinorField, vectorfield: np.ndarray, directions: Optional[Sequence[int]] = None) -> float:
    """
    max over interior nodes and directions of
        || nabla^s_X (Y.phi) - (nabla_X Y).phi - Y.(nabla^s_X phi) ||
    """
    chart = field.chart
    if directions is None:
        directions = range(chart.space.dim)
    vectorfield = np.asarray(vectorfield, dtype=complex)
    product = clifford_field(field, vectorfield)

    residual = 0.0
    for a in directions:
        # (nabla_{e_a} Y)^k = e_a(Y^k) + sum_j Gamma^k_aj Y^j
        derived = chart.frame_derivative(vectorfield, a) + np.einsum('...kj,...j->...k', chart.gamma[..., :, a, :], vectorfield)
        lhs = spinor_covariant_derivative(product, a)
        rhs = clifford_field(field, derived) + clifford_field(spinor_covariant_derivative(field, a), vectorfield)
        residual = max(residual, (lhs - rhs).max_norm())
    return residual


def spinor_curvature(field: SpinorField) -> FormField:
    """
    R^s phi as a 2-form, component (i, j) for i < j:
        nabla^s_i nabla^s_j phi - nabla^s_j nabla^s_i phi - sum_q c^q_ij nabla^s_q phi
    """
    chart = field.chart
    dim = chart.space.dim
    first = [spinor_covariant_derivative(field, a) for a in range(dim)]
    brackets = chart.frame_brackets()
    components = []
    for i, j in subsets(dim, 2):
        value = spinor_covariant_derivative(first[j], i).values - spinor_covariant_derivative(first[i], j).values
        for q in range(dim):
            value = value - brackets[..., q, i, j][..., np.newaxis] * first[q].values
        components.append(value)
    return FormField(chart, field.model, 2, np.stack(components, axis=-2))


def ricci_clifford_operator(sigma: RicciData, model: FockModel) -> np.ndarray:
    """sum_ij sigma^ij e_i.e_j. at every sampled node"""
    clifford = model.clifford_matrices
    return np.einsum('...ij,iab,jbc->...ac', sigma.sigma_upper, clifford, clifford)


def closed_form_curvature_action(field: SpinorField, sigma: RicciData) -> FormField:
    """(i/2l) omega_kn sigma^ij e_i.e_j.phi on every component k < n"""
    chart = field.chart
    space = chart.space
    acted = np.einsum('...ab,...b->...a', ricci_clifford_operator(sigma, field.model), field.values)
    weights = np.array([space.omega_lower[k, n] for k, n in subsets(space.dim, 2)], dtype=float)
    values = (0.5j / space.l) * weights[:, np.newaxis] * acted[..., np.newaxis, :]
    return FormField(chart, field.model, 2, values)


def curvature_action_p20(chart: ChartModel, field: SpinorField, sigma: Optional[RicciData] = None) -> CurvatureAction:
    """
    p20 R^s phi two ways: the zeroth-order closed form built from sigma, and p20 of the curvature
    assembled from second covariant differences. The residual is their max interior difference.
    """
    if field.chart is not chart:
        raise ModelMismatchError('Field does not live on the given chart')
    if sigma is None:
        sigma = ricci(chart)
    closed_form = closed_form_curvature_action(field, sigma)
    assembled = spinor_curvature(field).f_minus().f_minus().f_plus().f_plus() * (1.0 / chart.space.l)
    residual = (assembled - closed_form).max_norm()
    logger.debug(f'Curvature action residual on {chart}: {residual:.3e}')
    return CurvatureAction(closed_form, assembled, residual)


def convergence_order(errors: Sequence[float], spacings: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(spacing)"""
    errors = np.asarray(errors, dtype=float)
    spacings = np.asarray(spacings, dtype=float)
    if len(errors) < 2 or np.any(errors <= 0) or np.any(spacings <= 0):
        raise ValueError('Need at least two positive errors and spacings')
    slope, _ = np.polyfit(np.log(spacings), np.log(errors), 1)
    return float(slope)
