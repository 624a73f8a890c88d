# stdlib imports
import csv
import json

# 3rd-party imports
import numpy as np
import pytest

# project imports
from symspin.charts.base import Axis
from symspin.charts.flat import FlatChart, axis_names, build_flat_chart, random_symmetric_connection
from symspin.charts.io import ChartConfig, build_chart, export_field_csv, load_chart_config
from symspin.charts.sphere import SphereChart, build_sphere_chart
from symspin.defs import ChartKind
from symspin.exceptions import ChartConfigError, GridResolutionError, PoleMarginError, UnsupportedCaseError
from symspin.symalg import lower_index


def test_axis_spacing():
    assert Axis('s', np.linspace(0, 1, 5)).spacing == 0.25
    assert np.isclose(Axis('phi', np.zeros(8), periodic=True).spacing, np.pi / 4)


def test_flat_chart_geometry():
    chart = build_flat_chart(2, 3, 1.0)
    assert isinstance(chart, FlatChart)
    assert chart.KIND == ChartKind.FLAT
    assert chart.grid_shape == (3, 3, 3, 3)
    assert [axis.name for axis in chart.axes] == axis_names(2) == ['s1', 's2', 't1', 't2']
    assert chart.adapted_residual() == 0.0
    assert chart.torsion_residual() == 0.0
    assert chart.omega_parallel_residual() == 0.0
    assert chart.check_axis_aligned() == [0, 1, 2, 3]


def test_flat_chart_needs_three_nodes():
    with pytest.raises(GridResolutionError):
        build_flat_chart(1, 2)


def test_symmetric_connection_is_torsion_free_and_symplectic(flat_chart, rng):
    space = flat_chart.space
    gamma = random_symmetric_connection(space, rng)
    lowered = lower_index(space, gamma, 0)
    assert np.allclose(lowered, np.transpose(lowered, (1, 0, 2)), atol=1e-15)
    perturbed = flat_chart.with_connection(gamma)
    assert perturbed.params['perturbed']
    assert perturbed.torsion_residual() < 1e-15
    assert perturbed.omega_parallel_residual() < 1e-15


def test_sphere_chart_is_adapted(sphere_chart):
    assert isinstance(sphere_chart, SphereChart)
    assert sphere_chart.grid_shape == (49, 8)
    assert sphere_chart.adapted_residual() < 1e-12
    assert sphere_chart.omega_parallel_residual() < 1e-12
    assert sphere_chart.check_axis_aligned() == [0, 1]


def test_sphere_torsion_converges(sphere_chart, fine_sphere_chart):
    coarse = sphere_chart.torsion_residual()
    fine = fine_sphere_chart.torsion_residual()
    assert fine < coarse / 2


def test_sphere_frame_brackets(fine_sphere_chart):
    chart = fine_sphere_chart
    brackets = chart.frame_brackets()
    cot = np.cos(chart.theta) / np.sin(chart.theta)
    # away from the poles
    mask = chart.interior_mask() & (np.abs(cot) <= 1.0)[:, np.newaxis]
    # [e_2, e_1] = (cot theta / r) e_2
    expected = np.broadcast_to(cot[:, np.newaxis], chart.grid_shape)
    assert np.max(np.abs(brackets[..., 1, 1, 0] - expected)[mask]) < 5e-3


@pytest.mark.parametrize('pole_margin', [0.0, 1e-4, np.pi / 2])
def test_pole_margin_is_enforced(pole_margin):
    with pytest.raises(PoleMarginError):
        build_sphere_chart(1.0, 32, 8, pole_margin)


def test_sphere_needs_positive_radius():
    with pytest.raises(GridResolutionError):
        build_sphere_chart(0.0)


def test_periodic_derivative_is_spectral(sphere_chart):
    _, phi = sphere_chart.coordinates()
    assert np.max(np.abs(sphere_chart.partial(np.sin(phi), 1) - np.cos(phi))) < 1e-12


def test_periodic_slice(sphere_chart):
    theta, phi = sphere_chart.coordinates()
    assert sphere_chart.periodic_slice(theta).shape == (49,)
    with pytest.raises(UnsupportedCaseError):
        sphere_chart.periodic_slice(phi)


def test_coarsened_chart_keeps_kind_and_period(sphere_chart):
    coarse = sphere_chart.coarsened()
    assert coarse.KIND == ChartKind.SPHERE
    assert coarse.grid_shape == (25, 8)
    assert np.array_equal(coarse.axes[0].nodes, sphere_chart.theta[::2])


def test_interior_mask_ignores_periodic_axes(sphere_chart):
    mask = sphere_chart.interior_mask()
    assert not mask[0].any() and not mask[-1].any()
    assert mask[1:-1].all()


def test_chart_config_round_trip(tmp_path):
    path = tmp_path / 'sphere.json'
    path.write_text(json.dumps({'chart': 'sphere', 'radius': 2.0, 'theta_nodes': 33, 'pole_margin': 0.4}))
    chart = load_chart_config(path)
    assert isinstance(chart, SphereChart)
    assert chart.radius == 2.0
    assert chart.grid_shape == (33, 8)

    flat = build_chart(ChartConfig(chart='flat', l=1, grid_nodes=5))
    assert flat.grid_shape == (5, 5)


@pytest.mark.parametrize('payload', [
    {'chart': 'flat', 'nodes': 5},
    {'chart': 'torus'},
    {'chart': 'sphere', 'pole_margin': 2.0},
    'not json',
])
def test_bad_chart_configs(tmp_path, payload):
    path = tmp_path / 'chart.json'
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    with pytest.raises(ChartConfigError):
        load_chart_config(path)


def test_sphere_config_needs_one_mode():
    with pytest.raises(ChartConfigError):
        build_chart(ChartConfig(chart='sphere', l=2))


def test_missing_config_file(tmp_path):
    with pytest.raises(ChartConfigError):
        load_chart_config(tmp_path / 'missing.json')


def test_export_field_csv(tmp_path, flat_chart):
    s, t = flat_chart.coordinates()
    fields = {'f': s * t, 'psi': np.stack([s + 1j * t, t], axis=-1)}
    path = tmp_path / 'fields.csv'
    rows = export_field_csv(flat_chart, fields, path)
    assert rows == flat_chart.node_count

    with open(path, newline='') as handle:
        table = list(csv.reader(handle))
    assert table[0] == ['s', 't', 'f', 'psi[1]_re', 'psi[1]_im', 'psi[2]_re', 'psi[2]_im']
    assert len(table) == rows + 1
    assert float(table[1][0]) == -1.0
    assert float(table[1][4]) == -1.0


def test_export_rejects_mismatched_fields(tmp_path, flat_chart):
    with pytest.raises(ChartConfigError):
        export_field_csv(flat_chart, {'f': np.zeros((3, 3))}, tmp_path / 'bad.csv')
