"""
This module defines the symplectic Dirac and twistor operators, the Killing spinor equation
    nabla^s phi = lambda F+ phi      (nabla^s_X phi = lambda X.phi for every X)
with its zeroth-order prolongation sigma^ij e_i.e_j.phi = 2 l lambda^2 phi, and the two case
studies built on them: rigidity on the flat chart and nonexistence on the round sphere.

Discretized Killing operator
    Unknowns are spinors on the nodes of the non-periodic axes. Along a non-periodic axis each edge
    (p, p+1) contributes the row block
        E_mid (phi_{p+1} - phi_p) / h + (C_mid - lambda e_a.) (phi_p + phi_{p+1}) / 2
    with midpoint-averaged coefficients, so constant fields are exact solutions for lambda = 0 and
    no spurious checkerboard modes appear. Along a periodic axis a single Fourier mode k is kept and
    the derivative becomes i k; the coefficients must not depend on the periodic coordinates.
"""

# stdlib imports
from dataclasses import dataclass, field
from functools import reduce
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

# 3rd-party imports
import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import eigsh

# project imports
from symspin import debug
from symspin.charts.base import ChartModel
from symspin.charts.flat import build_flat_chart
from symspin.charts.sphere import build_sphere_chart
from symspin.defs import (
    CORPUS_MARGIN,
    CORPUS_SIZE,
    DEFAULT_FLAT_HALF_WIDTH,
    DEFAULT_FOURIER_MODES,
    DEFAULT_MARGIN,
    DEFAULT_PHI_NODES,
    DEFAULT_POLE_MARGIN,
    DEFAULT_SPHERE_CUTOFF,
    DENSE_GRAM_LIMIT,
    DENSE_SVD_LIMIT,
    HERMITE_ZERO_CUTOFF,
    MIN_STABILITY_NODES,
    SPARSE_SHIFT,
    TRANSPORT_X_RANGE,
    TRANSPORT_X_SAMPLES,
    CertificateKind,
)
from symspin.exceptions import GridResolutionError, ModelMismatchError, UnsupportedCaseError
from symspin.fedosov import (
    FormField,
    RicciData,
    SpinorField,
    covariant_derivative_form,
    ricci,
    ricci_clifford_operator,
    spin_lift,
    sphere_sigma_closed_form,
)
from symspin.fock import FockModel, Spinor, effective_spectrum, hermite_function
from symspin.report import sha256_canonical_json, to_jsonable
from symspin.settings_manager import settings_manager


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class KillingCandidate:
    """A symplectic Killing number with the Hermite level of the spinor it was derived from"""
    killing_number: complex
    hermite_level: int
    eigenvalue: float = 0.0
    residual: float = 0.0
    spinor: Optional[Spinor] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.residual < 0:
            raise ValueError(f'Residual must be non-negative, got {self.residual}')

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            'n': self.hermite_level,
            'eigenvalue': self.eigenvalue,
            'lambda': self.killing_number,
            'residual': self.residual,
        })


@dataclass
class Certificate:
    """
    Outcome of a case-study pipeline. The verdict compares the bound against the tolerance in the
    direction the kind asks for; the regression id only depends on the kind and the parameters.
    """
    kind: CertificateKind
    bound: float
    tolerance: float
    params: Dict[str, Any]
    verdict: bool
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def regression_id(self) -> str:
        return sha256_canonical_json({'kind': self.kind.value, 'params': self.params})

    @property
    def outcome(self) -> str:
        if self.kind == CertificateKind.EXISTENCE:
            return 'existence-suspected' if self.verdict else 'inconclusive'
        return self.kind.value if self.verdict else 'inconclusive'

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            'kind': self.kind.value,
            'bound': self.bound,
            'tolerance': self.tolerance,
            'params': self.params,
            'verdict': self.verdict,
            'regression_id': self.regression_id,
            'details': self.details,
        })


@dataclass
class SingularValues:
    values: np.ndarray
    vectors: Optional[np.ndarray]
    method: str


@dataclass
class TransportCheck:
    """e_1-direction transport on the sphere: solution residual and x-independence constraints"""
    transport_residual: float
    constraint_smin: float
    forced_zero: bool
    samples: int


@dataclass
class KillingCharacterization:
    fitted_lambda: complex
    fitted_mu: complex
    killing_residual: float
    dirac_residual: float
    twistor_residual: float
    tolerance: float
    is_killing: bool
    is_dirac_eigen: bool
    is_twistor_kernel: bool
    relation_error: Optional[float]

    @property
    def biconditional_holds(self) -> bool:
        return self.is_killing == (self.is_dirac_eigen and self.is_twistor_kernel)

    @property
    def relation_holds(self) -> bool:
        if self.relation_error is None:
            return True
        return self.relation_error <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable(dict(self.__dict__, biconditional_holds=self.biconditional_holds))


def _as_form(field_: SpinorField) -> FormField:
    return FormField(field_.chart, field_.model, 0, field_.values[..., np.newaxis, :])


def _check_chart(field_: SpinorField, chart: Optional[ChartModel]) -> None:
    if chart is not None and chart is not field_.chart:
        raise ModelMismatchError(f'Field lives on {field_.chart}, not on {chart}')


def dirac(field_: SpinorField, chart: Optional[ChartModel] = None) -> SpinorField:
    """-F- nabla^s phi"""
    _check_chart(field_, chart)
    return (covariant_derivative_form(field_).f_minus() * -1.0).as_spinor_field()


def twistor(field_: SpinorField, chart: Optional[ChartModel] = None) -> FormField:
    """(Id - p10) nabla^s phi"""
    _check_chart(field_, chart)
    derivative = covariant_derivative_form(field_)
    projected = derivative.f_minus().f_plus() * (1j / field_.chart.space.l)
    return derivative - projected


def killing_residual(field_: SpinorField, chart: Optional[ChartModel], killing_number: complex) -> float:
    """max over interior nodes of || nabla^s phi - lambda F+ phi ||"""
    _check_chart(field_, chart)
    difference = covariant_derivative_form(field_) - _as_form(field_).f_plus() * killing_number
    return difference.max_norm()


def prolongation_residual(field_: SpinorField, sigma: RicciData, killing_number: complex) -> float:
    """max over interior nodes of || sigma^ij e_i.e_j.phi - 2 l lambda^2 phi ||"""
    l = field_.chart.space.l
    operator = ricci_clifford_operator(sigma, field_.model)
    acted = np.einsum('...ab,...b->...a', operator, field_.values)
    difference = acted - 2 * l * killing_number ** 2 * field_.values
    return SpinorField(field_.chart, field_.model, difference).max_norm()


def candidate_spectrum(
    sigma: RicciData,
    model: FockModel,
    count: int,
    margin: int = DEFAULT_MARGIN,
) -> List[KillingCandidate]:
    """
    Killing numbers allowed by the prolongation for a constant sigma: eigenvalues mu of
    sigma^ij e_i.e_j on the effective subspace, lambda = +-sqrt(mu / 2l), +i root first.
    """
    if count <= 0:
        return []
    if not sigma.is_constant(settings_manager.tolerance('constant_sigma')):
        raise UnsupportedCaseError('Candidate spectrum needs a sigma that is constant over the chart')
    if sigma.is_zero(settings_manager.tolerance('constant_sigma')):
        logger.info('sigma vanishes: the only Killing number is 0')
        return [KillingCandidate(0j, 0)]

    l = model.l
    constant = RicciData.from_lower(sigma.space, sigma.sigma_lower.reshape(-1, sigma.space.dim, sigma.space.dim)[0])
    operator = ricci_clifford_operator(constant, model)
    values, vectors = effective_spectrum(operator, model.effective(margin))
    if count > len(values):
        logger.warning(f'Only {len(values)} eigenvalues below the truncation margin, {count} requested')

    candidates = []
    for position in range(min(count, len(values))):
        eigenvalue = float(values[position])
        vector = vectors[:, position]
        level = int(model.total_levels[np.argmax(np.abs(vector))])
        root = np.sqrt(complex(eigenvalue / (2 * l)))
        if root.imag < 0 or (root.imag == 0 and root.real < 0):
            root = -root
        spinor = Spinor(model, vector)
        residual = float(np.linalg.norm(operator @ vector - eigenvalue * vector))
        for sign in (1, -1):
            candidates.append(KillingCandidate(sign * root, level, eigenvalue, residual, spinor))
    logger.debug(f'Candidate spectrum: {[c.killing_number for c in candidates]}')
    return candidates


def _difference_matrices(size: int, spacing: float) -> Tuple[sparse.spmatrix, sparse.spmatrix]:
    difference = sparse.diags([-1.0, 1.0], [0, 1], shape=(size - 1, size)) / spacing
    average = sparse.diags([0.5, 0.5], [0, 1], shape=(size - 1, size))
    return difference, average


def _embed_along(operator: sparse.spmatrix, position: int, sizes: Sequence[int]) -> sparse.spmatrix:
    factors = [sparse.identity(n, format='csr') for n in sizes]
    factors[position] = operator
    return reduce(lambda a, b: sparse.kron(a, b, format='csr'), factors)


class KillingAssembly:
    """
    Parts of the discretized Killing operator on one chart and model:
        K(lambda, k) = base - lambda * clifford + sum_p k_p * fourier[p]
    so that sweeps over Killing numbers and Fourier modes only recombine sparse matrices.
    """
    def __init__(self, chart: ChartModel, model: FockModel) -> None:
        self.chart = chart
        self.model = model
        aligned = chart.check_axis_aligned()
        self.reduced = chart.reduced_axes()
        self.periodic = chart.periodic_axes()
        self.sizes = [chart.axes[p].size for p in self.reduced]
        self.node_count = int(np.prod(self.sizes)) if self.sizes else 1

        frame = chart.periodic_slice(chart.frame).reshape(self.node_count, chart.space.dim, chart.space.dim)
        gamma = chart.periodic_slice(chart.gamma)
        connection = None
        if np.any(gamma):
            endomorphisms = np.swapaxes(gamma, -3, -2).reshape(self.node_count, chart.space.dim, chart.space.dim, chart.space.dim)
            connection = spin_lift(endomorphisms, model)  # (nodes, a, dim, dim)

        identity = sparse.identity(model.dim, format='csr')
        clifford = model.clifford_matrices
        base_blocks, clifford_blocks = [], []
        fourier_blocks = {p: [] for p in self.periodic}

        for a, position in enumerate(aligned):
            coefficient = frame[:, a, position]
            if position in self.periodic:
                rows = self.node_count
                derivative = sparse.kron(sparse.diags(1j * coefficient), identity, format='csr')
                average = sparse.identity(self.node_count, format='csr')
                corrections = None if connection is None else connection[:, a]
            else:
                reduced_position = self.reduced.index(position)
                difference, mid = _difference_matrices(chart.axes[position].size, chart.axes[position].spacing)
                difference = _embed_along(difference, reduced_position, self.sizes)
                average = _embed_along(mid, reduced_position, self.sizes)
                rows = average.shape[0]
                derivative = sparse.kron(sparse.diags(average @ coefficient) @ difference, identity, format='csr')
                corrections = None
                if connection is not None:
                    flat = connection[:, a].reshape(self.node_count, -1)
                    corrections = (average @ flat).reshape(rows, model.dim, model.dim)

            averaged = sparse.kron(average, identity, format='csr')
            base = sparse.csr_matrix((rows * model.dim, self.node_count * model.dim), dtype=complex)
            if corrections is not None:
                base = sparse.block_diag(list(corrections), format='csr') @ averaged
            clifford_part = sparse.kron(average, sparse.csr_matrix(clifford[a]), format='csr')

            for p in self.periodic:
                zero = sparse.csr_matrix(base.shape, dtype=complex)
                fourier_blocks[p].append(derivative * (2 * np.pi / chart.axes[p].period) if p == position else zero)
            if position not in self.periodic:
                base = base + derivative
            base_blocks.append(base)
            clifford_blocks.append(clifford_part)

        self.base = sparse.vstack(base_blocks, format='csr')
        self.clifford = sparse.vstack(clifford_blocks, format='csr')
        self.fourier = {p: sparse.vstack(blocks, format='csr') for p, blocks in fourier_blocks.items()}
        logger.debug(f'Killing operator parts on {chart}: {self.base.shape[0]} rows, {self.base.shape[1]} unknowns')

    def operator(self, killing_number: complex, fourier_mode: Union[int, Sequence[int]] = 0) -> sparse.csr_matrix:
        modes = [fourier_mode] if np.isscalar(fourier_mode) else list(fourier_mode)
        if len(modes) != len(self.periodic) and not (len(self.periodic) == 0 and modes == [0]):
            raise UnsupportedCaseError(f'{len(modes)} Fourier modes for {len(self.periodic)} periodic axes')
        operator = self.base - killing_number * self.clifford
        for p, mode in zip(self.periodic, modes):
            operator = operator + mode * self.fourier[p]
        return operator.tocsr()


def killing_operator(
    chart: ChartModel,
    model: FockModel,
    killing_number: complex,
    fourier_mode: Union[int, Sequence[int]] = 0,
) -> sparse.csr_matrix:
    return KillingAssembly(chart, model).operator(killing_number, fourier_mode)


def smallest_singular_values(
    operator: sparse.spmatrix,
    count: int = 1,
    return_vectors: bool = False,
) -> SingularValues:
    """
    The `count` smallest singular values in ascending order. Small operators get a full SVD,
    mid-sized ones a dense eigen-solve of the Gram matrix, large ones a sparse shift-invert
    eigen-solve of the Gram matrix.
    """
    rows, cols = operator.shape
    count = min(count, cols)

    if rows >= cols and rows * cols <= DENSE_SVD_LIMIT:
        dense = operator.toarray() if sparse.issparse(operator) else np.asarray(operator)
        _, values, vh = linalg.svd(dense, full_matrices=False)
        order = np.argsort(values, kind='stable')[:count]
        vectors = vh.conj().T[:, order] if return_vectors else None
        return SingularValues(values[order], vectors, 'svd')

    operator = sparse.csr_matrix(operator)
    gram = (operator.conj().T @ operator).tocsc()
    if cols <= DENSE_GRAM_LIMIT:
        eigenvalues, eigenvectors = linalg.eigh(gram.toarray(), subset_by_index=[0, count - 1])
        method = 'gram'
    else:
        eigenvalues, eigenvectors = eigsh(
            gram,
            k=count,
            sigma=-SPARSE_SHIFT,
            which='LM',
            v0=np.ones(cols, dtype=gram.dtype),
        )
        order = np.argsort(eigenvalues, kind='stable')
        eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]
        method = 'sparse'
    values = np.sqrt(np.clip(eigenvalues, 0.0, None))
    return SingularValues(values, eigenvectors if return_vectors else None, method)


def fourier_modes(count: int) -> List[int]:
    """count consecutive modes centred on 0: [-count/2, count/2)"""
    return list(range(-(count // 2), count - count // 2))


def killing_smin(
    assembly: KillingAssembly,
    killing_number: complex,
    modes: Sequence[int] = (0,),
    inject: bool = False,
) -> float:
    """
    min over Fourier modes of the smallest singular value of K(lambda, k). With `inject` the first
    unknown of mode 0 is made an exact solution (the column is zeroed, K - (K e_0) e_0^H).
    """
    best = np.inf
    for mode in modes:
        operator = assembly.operator(killing_number, mode if assembly.periodic else 0)
        if inject and mode == 0:
            mask = np.ones(operator.shape[1])
            mask[0] = 0.0
            operator = operator @ sparse.diags(mask)
        best = min(best, float(smallest_singular_values(operator).values[0]))
    return best


def flat_rigidity(
    l: int,
    model: FockModel,
    grid: int,
    killing_number: complex = 0.0,
    half_width: float = DEFAULT_FLAT_HALF_WIDTH,
) -> Certificate:
    """
    Rigidity of Killing spinors on the flat chart:
      (a) sigma = 0, so the prolongation leaves lambda = 0 as the only Killing number;
      (b) the kernel of the discretized nabla^s - lambda F+ is exactly the constant fields.
    """
    chart = build_flat_chart(l, grid, half_width)
    sigma = ricci(chart)
    candidates = candidate_spectrum(sigma, model, 1)
    forced_zero = len(candidates) == 1 and candidates[0].killing_number == 0

    operator = killing_operator(chart, model, killing_number)
    expected = model.dim
    result = smallest_singular_values(operator, expected + 1, return_vectors=True)
    tolerance = settings_manager.tolerance('kernel')
    kernel = result.values <= tolerance
    kernel_dim = int(np.count_nonzero(kernel))

    deviation = 0.0
    for vector in result.vectors[:, kernel].T:
        nodes = vector.reshape(-1, model.dim)
        deviation = max(deviation, float(np.max(np.abs(nodes - nodes.mean(axis=0)))))
    constant = deviation <= settings_manager.tolerance('constant_field')

    gap = float(result.values[kernel_dim]) if kernel_dim < len(result.values) else 0.0
    verdict = forced_zero and kernel_dim == expected and constant
    params = {'l': l, 'cutoff': model.cutoff, 'grid': grid, 'half_width': half_width, 'lambda': killing_number}
    details = {
        'kernel_dim': kernel_dim,
        'expected_kernel_dim': expected,
        'constant_deviation': deviation,
        'prolongation_lambdas': [c.killing_number for c in candidates],
        'singular_values': result.values[:min(len(result.values), expected + 1)],
        'solver': result.method,
    }
    logger.info(f'Flat rigidity l={l} N={model.cutoff} grid={grid}: kernel {kernel_dim}/{expected}, verdict {verdict}')
    return Certificate(CertificateKind.RIGIDITY, gap, tolerance, params, verdict, details)


def transport_patch_check(
    radius: float,
    killing_number: complex,
    theta: np.ndarray,
    hermite_level: int = 0,
    x_samples: Optional[np.ndarray] = None,
) -> TransportCheck:
    """
    The e_1 equation (1/r) dc/dtheta = i lambda x c is solved by c = psi_x exp(i lambda r x theta)
    for each fixed x. A smooth coefficient c(theta, phi) cannot depend on x, so all transport
    solutions have to agree; the constraint matrix collects
        psi_a exp(i lambda r x_a theta) - psi_b exp(i lambda r x_b theta)
    over consecutive samples and nodes. A positive smallest singular value forces psi = 0.
    Samples where h_n vanishes are skipped.
    """
    if x_samples is None:
        x_samples = np.linspace(-TRANSPORT_X_RANGE, TRANSPORT_X_RANGE, TRANSPORT_X_SAMPLES)
    x_samples = np.asarray(x_samples, dtype=float)
    x_samples = x_samples[np.abs(hermite_function(hermite_level, x_samples)) > HERMITE_ZERO_CUTOFF]

    phase = np.exp(1j * killing_number * radius * np.outer(theta, x_samples))  # [theta, x]
    spacing = theta[1] - theta[0]
    derivative = np.gradient(phase, spacing, axis=0, edge_order=2) / radius
    residual = derivative - 1j * killing_number * x_samples[np.newaxis, :] * phase
    transport_residual = float(np.max(np.abs(residual[1:-1])))

    count = len(x_samples)
    rows = []
    for a in range(count - 1):
        block = np.zeros((len(theta), count), dtype=complex)
        block[:, a] = phase[:, a]
        block[:, a + 1] = -phase[:, a + 1]
        rows.append(block)
    constraints = np.vstack(rows) if rows else np.zeros((1, max(count, 1)), dtype=complex)
    smin = float(linalg.svdvals(constraints)[-1]) if count > 1 else 0.0
    forced_zero = smin > settings_manager.tolerance('kernel')
    return TransportCheck(transport_residual, smin, forced_zero, count)


def sphere_nonexistence(
    radius: float,
    n_max: int,
    theta_nodes: int,
    fourier_mode_count: int = DEFAULT_FOURIER_MODES,
    cutoff: int = DEFAULT_SPHERE_CUTOFF,
    margin: int = DEFAULT_MARGIN,
    pole_margin: float = DEFAULT_POLE_MARGIN,
    inject: bool = False,
) -> Certificate:
    """
    Numerical nonexistence of Killing spinors on the round sphere. For every candidate Killing
    number up to level n_max the smallest singular value of the discretized Killing operator is
    minimized over Fourier modes, on the chart and on its refinement (2n - 1 theta nodes). The
    certificate holds when the smallest bound exceeds the tolerance, every bound is stable under
    refinement, and the transport check forces the coefficient to vanish for every candidate.
    """
    if theta_nodes < MIN_STABILITY_NODES:
        raise GridResolutionError(f'Stability check needs >= {MIN_STABILITY_NODES} theta nodes, got {theta_nodes}')
    if cutoff - margin <= n_max:
        raise GridResolutionError(f'Cutoff {cutoff} with margin {margin} resolves levels below {cutoff - margin}, n_max={n_max} requested')

    model = FockModel(1, cutoff)
    chart = build_sphere_chart(radius, theta_nodes, DEFAULT_PHI_NODES, pole_margin)
    refined = build_sphere_chart(radius, 2 * theta_nodes - 1, DEFAULT_PHI_NODES, pole_margin)
    candidates = candidate_spectrum(sphere_sigma_closed_form(radius), model, n_max + 1, margin)
    modes = fourier_modes(fourier_mode_count)

    assembly = KillingAssembly(chart, model)
    refined_assembly = None if debug.SKIP_STABILITY_CHECK else KillingAssembly(refined, model)
    threshold = settings_manager.tolerance('stability')

    rows = []
    for candidate in candidates:
        lam = candidate.killing_number
        bound = killing_smin(assembly, lam, modes, inject)
        refined_bound = bound if refined_assembly is None else killing_smin(refined_assembly, lam, modes, inject)
        scale = max(bound, refined_bound)
        variation = abs(refined_bound - bound) / scale if scale > 0 else 0.0
        transport = transport_patch_check(radius, lam, chart.theta, candidate.hermite_level)
        ansatz = SpinorField.constant(chart, candidate.spinor)
        rows.append({
            'n': candidate.hermite_level,
            'lambda': lam,
            's_min': bound,
            's_min_refined': refined_bound,
            'variation': variation,
            'stable': variation < threshold,
            'ansatz_residual': killing_residual(ansatz, chart, lam),
            'transport_residual': transport.transport_residual,
            'transport_smin': transport.constraint_smin,
            'transport_forced_zero': transport.forced_zero,
        })
        logger.info(f'Candidate n={candidate.hermite_level} lambda={lam:.6f}: s_min={bound:.4e} refined={refined_bound:.4e}')

    tolerance = settings_manager.tolerance('certificate')
    bound = min((row['s_min'] for row in rows), default=np.inf)
    stable = all(row['stable'] for row in rows)
    transported = all(row['transport_forced_zero'] for row in rows)
    params = {
        'r': radius,
        'n_max': n_max,
        'theta_nodes': theta_nodes,
        'fourier_modes': fourier_mode_count,
        'cutoff': cutoff,
        'margin': margin,
        'pole_margin': pole_margin,
    }
    details = {
        'candidates': rows,
        'stable': stable,
        'transport_forced_zero': transported,
        'injected': inject,
        # candidates come from sigma^ij = (1/r) Id; the assembled chart curvature carries (1/r^2) Id
        'sigma_scale': 1.0 / radius,
        'chart_sigma_scale': 1.0 / radius ** 2,
    }

    if bound > tolerance and stable and transported:
        certificate = Certificate(CertificateKind.NONEXISTENCE, bound, tolerance, params, True, details)
    else:
        certificate = Certificate(CertificateKind.EXISTENCE, bound, tolerance, params, bound <= tolerance, details)
    logger.info(f'Sphere certificate r={radius}: {certificate.outcome} (bound {bound:.4e})')
    return certificate


def flat_plane_system_residual(
    field_: SpinorField,
    killing_number: complex,
    x_samples: Optional[np.ndarray] = None,
) -> float:
    """
    The Killing equation on the flat 2-plane written for psi(s, t, x) = sum_n c_n(s, t) h_n(x):
        d psi / ds = lambda i x psi,    d psi / dt = lambda d psi / dx
    evaluated at sample points x with exact multiplication and differentiation of the Hermite
    functions (h_n' = sqrt(2n) h_{n-1} - x h_n). Returns the max over interior nodes and samples.
    """
    chart = field_.chart
    if chart.space.l != 1 or chart.periodic_axes():
        raise UnsupportedCaseError('The plane system is written for the flat 2-plane')
    if x_samples is None:
        x_samples = np.linspace(-TRANSPORT_X_RANGE, TRANSPORT_X_RANGE, TRANSPORT_X_SAMPLES)

    levels = np.arange(field_.model.cutoff)
    synthesis = np.stack([hermite_function(n, x_samples) for n in levels], axis=-1)  # [x, n]
    lowered = np.stack([hermite_function(max(n - 1, 0), x_samples) for n in levels], axis=-1)
    slope = np.sqrt(2.0 * levels) * lowered - x_samples[:, np.newaxis] * synthesis

    psi = np.einsum('xn,...n->...x', synthesis, field_.values)
    psi_x = np.einsum('xn,...n->...x', slope, field_.values)
    psi_s = chart.partial(psi, 0)
    psi_t = chart.partial(psi, 1)
    first = psi_s - killing_number * 1j * x_samples * psi
    second = psi_t - killing_number * psi_x
    mask = chart.interior_mask()
    return float(max(np.max(np.abs(first[mask])), np.max(np.abs(second[mask]))))


def characterize_killing(field_: SpinorField, chart: Optional[ChartModel] = None, tolerance: Optional[float] = None) -> KillingCharacterization:
    """
    Killing  <=>  Dirac eigenspinor in the twistor kernel, with lambda fitted as
    <F+ phi, nabla^s phi> / <F+ phi, F+ phi> and mu as <phi, D phi> / <phi, phi> over the interior.
    When both sides hold the numbers must satisfy lambda = -i mu / l.
    """
    _check_chart(field_, chart)
    chart = field_.chart
    l = chart.space.l
    mask = chart.interior_mask()
    if tolerance is None:
        scale = max(1.0, float(np.max(field_.norms()[mask])))
        tolerance = settings_manager.tolerance('field_residual') * scale

    derivative = covariant_derivative_form(field_)
    f_plus = _as_form(field_).f_plus()
    denominator = np.vdot(f_plus.values[mask], f_plus.values[mask])
    fitted_lambda = complex(np.vdot(f_plus.values[mask], derivative.values[mask]) / denominator) if abs(denominator) > 0 else 0j

    dirac_field = dirac(field_)
    norm = np.vdot(field_.values[mask], field_.values[mask])
    fitted_mu = complex(np.vdot(field_.values[mask], dirac_field.values[mask]) / norm) if abs(norm) > 0 else 0j

    killing_error = (derivative - f_plus * fitted_lambda).max_norm()
    dirac_error = (dirac_field - field_ * fitted_mu).max_norm()
    twistor_error = twistor(field_).max_norm()

    is_killing = killing_error <= tolerance
    is_dirac = dirac_error <= tolerance
    is_twistor = twistor_error <= tolerance
    relation = None
    if is_killing and is_dirac:
        relation = abs(fitted_lambda - (-1j * fitted_mu / l))
    return KillingCharacterization(
        fitted_lambda, fitted_mu, killing_error, dirac_error, twistor_error, tolerance,
        is_killing, is_dirac, is_twistor, relation,
    )


def killing_corpus(
    chart: ChartModel,
    model: FockModel,
    rng: np.random.Generator,
    size: int = CORPUS_SIZE,
    margin: int = CORPUS_MARGIN,
) -> List[Tuple[str, SpinorField]]:
    """
    Deterministic test fields for one chart, cycling through
        constant       phi = psi
        linear         phi = psi_0 + sum_k x^k e_k.psi   (twistor kernel, not Dirac eigen)
        smooth         phi = psi_0 + sum_mu sin(x^mu + c_mu) psi_mu
    with every spinor drawn from the effective subspace of the given margin.
    """
    subspace = model.effective(margin)
    coordinates = chart.coordinates()
    clifford = model.clifford_matrices
    kinds = ['constant', 'linear', 'smooth']
    corpus = []
    for index in range(size):
        kind = kinds[index % len(kinds)]
        base = subspace.random_coeffs(rng)
        if kind == 'constant':
            values = np.broadcast_to(base, chart.grid_shape + (model.dim,)).copy()
        elif kind == 'linear':
            psi = subspace.random_coeffs(rng)
            values = np.broadcast_to(base, chart.grid_shape + (model.dim,)).copy()
            for k, coordinate in enumerate(coordinates):
                values = values + coordinate[..., np.newaxis] * (clifford[k] @ psi)
        else:
            values = np.broadcast_to(base, chart.grid_shape + (model.dim,)).copy()
            for coordinate in coordinates:
                shift = rng.uniform(0, 2 * np.pi)
                values = values + np.sin(coordinate + shift)[..., np.newaxis] * subspace.random_coeffs(rng)
        corpus.append((kind, SpinorField(chart, model, values)))
    return corpus
