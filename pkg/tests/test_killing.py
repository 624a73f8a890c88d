# stdlib imports
import json
from pathlib import Path

# 3rd-party imports
import numpy as np
import pytest
from scipy import sparse

# project imports
from symspin.charts.sphere import build_sphere_chart
from symspin.defs import CertificateKind
from symspin.exceptions import GridResolutionError, ModelMismatchError, UnsupportedCaseError
from symspin.fedosov import RicciData, SpinorField, constant_ricci, ricci, sphere_sigma_closed_form
from symspin.fock import FockModel
from symspin.killing import (
    Certificate,
    candidate_spectrum,
    dirac,
    flat_plane_system_residual,
    flat_rigidity,
    fourier_modes,
    killing_corpus,
    killing_operator,
    killing_residual,
    prolongation_residual,
    smallest_singular_values,
    sphere_nonexistence,
    characterize_killing,
    transport_patch_check,
)
from symspin.symalg import standard_space


def test_sphere_candidates_follow_the_oscillator_levels():
    candidates = candidate_spectrum(sphere_sigma_closed_form(1.0), FockModel(1, 16), 6)
    assert len(candidates) == 12
    for n in range(6):
        plus, minus = candidates[2 * n], candidates[2 * n + 1]
        assert plus.hermite_level == minus.hermite_level == n
        assert plus.killing_number.imag > 0
        assert minus.killing_number == -plus.killing_number
        assert abs(2 * plus.killing_number ** 2 + (2 * n + 1)) < 1e-12


def test_ground_state_killing_number():
    first = candidate_spectrum(sphere_sigma_closed_form(1.0), FockModel(1, 32), 1)[0]
    assert np.isclose(first.killing_number, 1j * np.sqrt(0.5), atol=1e-12)
    assert np.isclose(first.eigenvalue, -1.0, atol=1e-12)


def test_candidates_scale_with_the_radius():
    candidates = candidate_spectrum(sphere_sigma_closed_form(2.0), FockModel(1, 16), 2)
    assert candidates[2].hermite_level == 1
    assert np.isclose(candidates[2].killing_number, 1j * np.sqrt(0.75), atol=1e-12)


def test_flat_sigma_leaves_only_zero(flat_chart):
    candidates = candidate_spectrum(ricci(flat_chart), FockModel(1, 8), 3)
    assert [c.killing_number for c in candidates] == [0j]
    assert candidate_spectrum(ricci(flat_chart), FockModel(1, 8), 0) == []


def test_candidates_need_a_constant_sigma():
    space = standard_space(1)
    sigma_lower = constant_ricci(space, np.eye(2), (5,)).sigma_lower.copy()
    sigma_lower[2] *= 2.0
    with pytest.raises(UnsupportedCaseError):
        candidate_spectrum(RicciData.from_lower(space, sigma_lower), FockModel(1, 8), 1)


def test_candidate_serialization():
    data = candidate_spectrum(sphere_sigma_closed_form(1.0), FockModel(1, 8), 1)[0].to_dict()
    assert data['n'] == 0
    assert data['lambda'][0] == 0.0
    assert np.isclose(data['lambda'][1], np.sqrt(0.5))


def test_constant_fields_solve_the_flat_killing_operator(flat_chart, rng):
    model = FockModel(1, 6)
    psi = model.effective(2).random_coeffs(rng)
    operator = killing_operator(flat_chart, model, 0.0)
    values = np.tile(psi, flat_chart.node_count)
    assert np.max(np.abs(operator @ values)) < 1e-12


def test_flat_rigidity_in_one_mode():
    certificate = flat_rigidity(1, FockModel(1, 6), 17)
    assert certificate.kind == CertificateKind.RIGIDITY
    assert certificate.verdict
    assert certificate.outcome == 'rigidity'
    assert certificate.details['kernel_dim'] == 6
    assert certificate.details['constant_deviation'] <= 1e-10
    assert certificate.details['prolongation_lambdas'] == [0j]
    assert certificate.bound > certificate.tolerance


def test_flat_rigidity_in_two_modes():
    certificate = flat_rigidity(2, FockModel(2, 4), 3)
    assert certificate.verdict
    assert certificate.details['kernel_dim'] == 16


def test_flat_chart_has_no_killing_spinors_for_nonzero_lambda():
    certificate = flat_rigidity(1, FockModel(1, 6), 17, killing_number=0.3)
    assert certificate.details['kernel_dim'] == 0
    assert not certificate.verdict
    assert certificate.outcome == 'inconclusive'


def test_regression_id_only_depends_on_kind_and_params():
    params = {'l': 1, 'cutoff': 6, 'grid': 17}
    first = Certificate(CertificateKind.RIGIDITY, 0.1, 1e-6, dict(params), True, {'kernel_dim': 6})
    second = Certificate(CertificateKind.RIGIDITY, 0.2, 1e-6, dict(params), False)
    other = Certificate(CertificateKind.NONEXISTENCE, 0.1, 1e-6, dict(params), True)
    assert first.regression_id == second.regression_id
    assert first.regression_id != other.regression_id
    assert first.to_dict()['regression_id'] == first.regression_id


def test_existence_outcomes():
    suspected = Certificate(CertificateKind.EXISTENCE, 0.0, 1e-3, {}, True)
    assert suspected.outcome == 'existence-suspected'
    assert Certificate(CertificateKind.EXISTENCE, 0.5, 1e-3, {}, False).outcome == 'inconclusive'


def test_transport_forces_the_coefficient_to_vanish(sphere_chart):
    check = transport_patch_check(1.0, 1j * np.sqrt(0.5), sphere_chart.theta)
    assert check.forced_zero
    assert check.samples == 13
    assert check.constraint_smin > 1e-6


def test_transport_skips_hermite_zeros(sphere_chart):
    # h_1 vanishes at x = 0
    check = transport_patch_check(1.0, 1j * np.sqrt(1.5), sphere_chart.theta, hermite_level=1)
    assert check.samples == 12
    assert check.forced_zero


def test_transport_is_not_forced_for_zero_lambda(sphere_chart):
    check = transport_patch_check(1.0, 0.0, sphere_chart.theta)
    assert not check.forced_zero
    assert check.transport_residual == 0.0


def test_fourier_modes_are_centred():
    assert fourier_modes(4) == [-2, -1, 0, 1]
    assert fourier_modes(1) == [0]


def test_sphere_certificate_structure():
    certificate = sphere_nonexistence(1.0, 1, 16, fourier_mode_count=2, cutoff=8)
    rows = certificate.details['candidates']
    assert len(rows) == 4
    assert [row['n'] for row in rows] == [0, 0, 1, 1]
    assert all(row['s_min'] >= 0 for row in rows)
    assert certificate.params == {
        'r': 1.0,
        'n_max': 1,
        'theta_nodes': 16,
        'fourier_modes': 2,
        'cutoff': 8,
        'margin': 2,
        'pole_margin': 0.15,
    }
    assert certificate.bound == min(row['s_min'] for row in rows)


def test_sphere_certificate_needs_enough_nodes():
    with pytest.raises(GridResolutionError):
        sphere_nonexistence(1.0, 0, 8)


def test_injected_solution_is_detected():
    certificate = sphere_nonexistence(1.0, 0, 16, fourier_mode_count=2, cutoff=8, inject=True)
    assert certificate.kind == CertificateKind.EXISTENCE
    assert certificate.verdict
    assert certificate.outcome == 'existence-suspected'
    assert certificate.details['injected']


def test_more_fourier_modes_never_raise_the_bound():
    bounds = [
        sphere_nonexistence(1.0, 0, 16, fourier_mode_count=count, cutoff=8).bound
        for count in (8, 16, 32)
    ]
    assert bounds[0] >= bounds[1] >= bounds[2]


def test_sphere_has_no_killing_spinors():
    certificate = sphere_nonexistence(1.0, 3, 64, fourier_mode_count=8, cutoff=16)
    assert certificate.kind == CertificateKind.NONEXISTENCE
    assert certificate.outcome == 'nonexistence'
    assert len(certificate.details['candidates']) == 8
    assert all(row['stable'] for row in certificate.details['candidates'])
    assert certificate.details['transport_forced_zero']


GOLDEN_DIR = Path(__file__).parent / 'golden'

# Golden entries compared as lower bounds
FLOOR_KEYS = ('bound', 's_min')


def assert_matches_golden(actual, golden, key=None):
    """null in the golden file matches any value; floor keys hold frozen lower bounds"""
    if golden is None:
        return
    if isinstance(golden, dict):
        assert sorted(actual) == sorted(golden), key
        for name in golden:
            assert_matches_golden(actual[name], golden[name], name)
    elif isinstance(golden, list):
        assert len(actual) == len(golden), key
        for item, expected in zip(actual, golden):
            assert_matches_golden(item, expected, key)
    elif key in FLOOR_KEYS:
        assert actual > golden, key
    elif isinstance(golden, bool) or isinstance(golden, str):
        assert actual == golden, key
    else:
        assert np.isclose(actual, golden, rtol=1e-9, atol=1e-12), key


def test_sphere_certificate_matches_the_golden_file():
    golden = json.loads((GOLDEN_DIR / 'sphere_r1.json').read_text())
    certificate = sphere_nonexistence(1.0, 3, 128)
    assert_matches_golden(certificate.to_dict(), golden)
    assert certificate.regression_id == golden['regression_id']


def test_certificate_records_the_sigma_normalization():
    certificate = sphere_nonexistence(2.0, 0, 16, fourier_mode_count=2, cutoff=8)
    assert certificate.details['sigma_scale'] == 0.5
    assert certificate.details['chart_sigma_scale'] == 0.25
    assert np.isclose(certificate.details['candidates'][0]['lambda'], 0.5j, atol=1e-12)


def test_sphere_certificate_needs_every_requested_level():
    with pytest.raises(GridResolutionError):
        sphere_nonexistence(1.0, 3, 16, fourier_mode_count=2, cutoff=4)
    with pytest.raises(GridResolutionError):
        sphere_nonexistence(1.0, 3, 16, fourier_mode_count=2, cutoff=5)


def test_killing_fields_satisfy_the_biconditional(flat_chart, rng):
    corpus = killing_corpus(flat_chart, FockModel(1, 8), rng)
    assert len(corpus) == 50
    assert [kind for kind, _ in corpus[:3]] == ['constant', 'linear', 'smooth']
    for kind, field in corpus:
        report = characterize_killing(field, flat_chart)
        assert report.biconditional_holds, kind
        assert report.relation_holds, kind
        if kind == 'constant':
            assert report.is_killing and report.is_dirac_eigen and report.is_twistor_kernel
        if kind == 'linear':
            assert report.is_twistor_kernel and not report.is_dirac_eigen and not report.is_killing


def test_sphere_corpus_satisfies_the_biconditional(sphere_chart, rng):
    corpus = killing_corpus(sphere_chart, FockModel(1, 8), rng)
    assert len(corpus) == 50
    for kind, field in corpus:
        report = characterize_killing(field, sphere_chart)
        assert report.biconditional_holds, kind
        assert not report.is_killing, kind


def test_killing_fields_satisfy_the_prolongation(flat_chart, rng):
    sigma = ricci(flat_chart)
    for kind, field in killing_corpus(flat_chart, FockModel(1, 8), rng, size=6):
        report = characterize_killing(field)
        if report.is_killing:
            assert prolongation_residual(field, sigma, report.fitted_lambda) < 10 * report.tolerance, kind


def test_constant_fields_are_flat_killing_spinors(flat_chart, rng):
    model = FockModel(1, 8)
    field = SpinorField.constant(flat_chart, model.effective(2).random_spinor(rng))
    assert killing_residual(field, flat_chart, 0.0) < 1e-14
    assert dirac(field).max_norm() < 1e-14
    assert flat_plane_system_residual(field, 0.0) < 1e-12
    assert flat_plane_system_residual(field, 0.5) > 1e-3


def test_plane_system_is_written_for_one_mode(sphere_chart):
    field = SpinorField.zeros(sphere_chart, FockModel(1, 4))
    with pytest.raises(UnsupportedCaseError):
        flat_plane_system_residual(field, 0.0)


def test_residuals_check_the_chart(flat_chart, sphere_chart):
    field = SpinorField.zeros(flat_chart, FockModel(1, 4))
    with pytest.raises(ModelMismatchError):
        killing_residual(field, sphere_chart, 0.0)
    with pytest.raises(ModelMismatchError):
        characterize_killing(field, sphere_chart)


def test_smallest_singular_values_of_a_diagonal():
    operator = sparse.diags([3.0, 1.0, 2.0, 0.5])
    result = smallest_singular_values(operator, 2, return_vectors=True)
    assert result.method == 'svd'
    assert np.allclose(result.values, [0.5, 1.0])
    assert np.isclose(abs(result.vectors[3, 0]), 1.0)


def test_wide_operators_use_the_gram_matrix():
    operator = sparse.csr_matrix(np.arange(15, dtype=float).reshape(3, 5))
    result = smallest_singular_values(operator, 2)
    assert result.method == 'gram'
    assert np.allclose(result.values, 0.0, atol=1e-5)


def test_large_operators_use_the_sparse_solver():
    diagonal = np.arange(1, 2501) / 1000.0
    result = smallest_singular_values(sparse.diags(diagonal, format='csr'), 2)
    assert result.method == 'sparse'
    assert np.allclose(result.values, [0.001, 0.002], rtol=1e-6)


def test_killing_operator_rejects_missing_fourier_modes(sphere_chart):
    with pytest.raises(UnsupportedCaseError):
        killing_operator(sphere_chart, FockModel(1, 4), 0.0, [0, 1])


def test_sphere_chart_killing_operator_shape():
    chart = build_sphere_chart(1.0, 16, 8, 0.15)
    operator = killing_operator(chart, FockModel(1, 4), 0.5j, 1)
    # theta edges plus one phi block per node
    assert operator.shape == ((15 + 16) * 4, 16 * 4)


@pytest.mark.parametrize('radius', [1.0, 2.0])
def test_sphere_prolongation_on_hermite_sections(radius):
    chart = build_sphere_chart(radius, 49, 8, np.pi / 8)
    sigma = sphere_sigma_closed_form(radius, chart.grid_shape)
    model = FockModel(1, 16)
    for n in range(4):
        field = SpinorField.constant(chart, model.basis_spinor([n]) * 2.0)
        for m in range(4):
            killing_number = 1j * np.sqrt((2 * m + 1) / (2 * radius))
            residual = prolongation_residual(field, sigma, killing_number)
            if m == n:
                assert residual < 1e-10
            else:
                assert np.isclose(residual, abs(2 * m - 2 * n) / radius * 2.0, atol=1e-10)
