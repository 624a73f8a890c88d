# 3rd-party imports
import numpy as np
import pytest

# project imports
from symspin.exceptions import DegreeError, ModelMismatchError
from symspin.fock import FockModel
from symspin.forms import (
    SpinorForm,
    change_frame,
    component_counts,
    f_minus,
    f_minus_matrix,
    f_plus,
    f_plus_matrix,
    h_op,
    interior_sign,
    omega_form,
    p10,
    p20,
    subsets,
    wedge_sign,
)
from symspin.symalg import block_rotation, standard_space


def unit_form(space, model, degree, rng, margin):
    form = SpinorForm.random(space, model, degree, rng, margin)
    return form * (1.0 / form.norm)


def test_signs():
    assert wedge_sign(0, (1, 2)) == 1
    assert wedge_sign(1, (0, 2)) == -1
    assert wedge_sign(2, (0, 2)) == 0
    assert interior_sign(0, (0, 2)) == 1
    assert interior_sign(2, (0, 2)) == -1
    assert interior_sign(1, (0, 2)) == 0


def test_component_counts():
    assert component_counts(standard_space(1)) == [1, 2, 1]
    assert component_counts(standard_space(2)) == [1, 4, 6, 4, 1]
    assert subsets(4, 2)[0] == (0, 1)


def test_h_is_scalar_on_every_degree(space, model, rng):
    for degree in range(space.dim + 1):
        alpha = unit_form(space, model, degree, rng, 2)
        error = (h_op(alpha) - alpha * (1j * (degree - space.l))).norm
        assert error < 1e-11, f'degree {degree}'


def test_f_plus_squared_is_omega(space, model, rng):
    s = unit_form(space, model, 0, rng, 2)
    expected = omega_form(space, s.as_spinor()) * -1j
    assert (f_plus(f_plus(s)) - expected).norm < 1e-12


def test_f_minus_f_plus_on_spinors(space, model):
    product = f_minus_matrix(space, model, 1) @ f_plus_matrix(space, model, 0)
    columns = model.effective(1).indices
    expected = -1j * space.l * np.eye(model.dim)
    assert np.max(np.abs(product[:, columns] - expected[:, columns])) < 1e-12


def test_f_minus_kills_the_complement_of_p10(space, model, rng):
    alpha = unit_form(space, model, 1, rng, 2)
    assert f_minus(alpha - p10(alpha)).norm < 1e-10


def test_image_of_f_plus_is_an_eigenspace(space, model, rng):
    psi = f_plus(unit_form(space, model, 0, rng, 2))
    assert (f_plus(f_minus(psi)) * -1.0 - psi * (1j * space.l)).norm < 1e-10


def test_p10_is_a_projection_onto_the_image(space, model, rng):
    alpha = unit_form(space, model, 1, rng, 3)
    assert (p10(p10(alpha)) - p10(alpha)).norm < 1e-10
    psi = f_plus(unit_form(space, model, 0, rng, 2))
    assert (p10(psi) - psi).norm < 1e-10


@pytest.mark.parametrize('l, cutoff', [(1, 16), (2, 8)])
def test_p20_is_a_projection_onto_the_image(l, cutoff, rng):
    space, model = standard_space(l), FockModel(l, cutoff)
    alpha = unit_form(space, model, 2, rng, 7)
    assert (p20(p20(alpha)) - p20(alpha)).norm < 1e-10
    image = f_plus(f_plus(unit_form(space, model, 0, rng, 5)))
    assert (p20(image) - image).norm < 1e-10


def test_f_plus_does_not_depend_on_the_adapted_frame(rng):
    space, model = standard_space(2), FockModel(2, 8)
    g = block_rotation(space, 0.3)
    for degree in range(3):
        alpha = unit_form(space, model, degree, rng, 2)
        direct = change_frame(f_plus(alpha), g)
        rotated = f_plus(change_frame(alpha, g), frame=g)
        assert (direct - rotated).norm < 1e-10
        if degree > 0:
            direct = change_frame(f_minus(alpha), g)
            rotated = f_minus(change_frame(alpha, g), frame=g)
            assert (direct - rotated).norm < 1e-10


def test_degree_errors():
    space, model = standard_space(1), FockModel(1, 4)
    with pytest.raises(DegreeError):
        f_plus(SpinorForm.zeros(space, model, 2))
    with pytest.raises(DegreeError):
        p10(SpinorForm.zeros(space, model, 2))
    with pytest.raises(DegreeError):
        p20(SpinorForm.zeros(space, model, 1))
    with pytest.raises(DegreeError):
        SpinorForm.zeros(space, model, 1).as_spinor()
    assert f_minus(SpinorForm.zeros(space, model, 0)).degree == 0


def test_forms_from_different_models_do_not_mix():
    space = standard_space(1)
    with pytest.raises(ModelMismatchError):
        SpinorForm.zeros(space, FockModel(1, 4), 1) + SpinorForm.zeros(space, FockModel(1, 5), 1)
    with pytest.raises(ModelMismatchError):
        SpinorForm.zeros(standard_space(2), FockModel(1, 4), 0)


def test_form_serialization_uses_one_based_labels(rng):
    space, model = standard_space(1), FockModel(1, 4)
    alpha = SpinorForm.random(space, model, 1, rng, 1)
    data = alpha.to_dict()
    assert sorted(data['components']) == ['1', '2']
    assert np.array_equal(SpinorForm.from_dict(data).components, alpha.components)
