"""
This module defines the identity suite run by the `verify` command.

Every identity is checked on inputs drawn from the effective subspace. An identity whose chain has
k Clifford factors is checked with margin max(configured margin, k - 1); when that margin leaves no
levels at the cutoff the identity is reported as skipped (and passes).

Random inputs are normalized to unit norm, so the reported errors are relative.
"""

# stdlib imports
import logging
from typing import Callable, List, Optional

# 3rd-party imports
import numpy as np

# project imports
from symspin.fock import FockModel, oscillator_spectrum
from symspin.forms import SpinorForm, f_minus, f_plus, h_op, omega_form, p10, p20
from symspin.report import CheckResult
from symspin.settings_manager import settings_manager
from symspin.symalg import SymplecticSpace, lower_index, raise_index, standard_space


logger = logging.getLogger(__name__)


# Number of Clifford factors in the longest chain of each identity
CHAIN_DEPTH = {
    'clifford_commutator': 2,
    'h_relation': 3,
    'f_minus_f_plus': 2,
    'f_plus_squared': 3,
    'f_minus_kills_complement': 3,
    'equation_one': 3,
    'p10_idempotent': 4,
    'p10_fixes_image': 3,
    'p20_idempotent': 8,
    'p20_fixes_image': 6,
    'oscillator_spectrum': 2,
}


def identity_margin(name: str, margin: int) -> int:
    return max(margin, CHAIN_DEPTH[name] - 1)


def _unit(form: SpinorForm) -> SpinorForm:
    return form * (1.0 / form.norm)


def _skipped(name: str, margin: int, model: FockModel, tolerance: float) -> CheckResult:
    logger.info(f'{name}: margin {margin} leaves no levels at cutoff {model.cutoff}, skipped')
    return CheckResult(name, 0.0, tolerance, True, {'skipped': True, 'margin': margin})


class IdentitySuite:
    """
    Runs the algebraic identities for one (l, N). `samples` random inputs are drawn per identity and
    the worst relative error is reported.
    """

    def __init__(
        self,
        model: FockModel,
        margin: int,
        rng: np.random.Generator,
        samples: int = 3,
        space: Optional[SymplecticSpace] = None,
    ) -> None:
        self.model = model
        self.space = space if space is not None else standard_space(model.l)
        self.margin = margin
        self.rng = rng
        self.samples = samples

    def _random_form(self, degree: int, margin: int) -> SpinorForm:
        return _unit(SpinorForm.random(self.space, self.model, degree, self.rng, margin))

    def _check(
        self,
        name: str,
        tolerance_name: str,
        degree: int,
        residual: Callable[[SpinorForm], SpinorForm],
        label: Optional[str] = None,
        **details,
    ) -> CheckResult:
        """Worst ||residual(alpha)|| over random unit forms alpha of the given degree"""
        label = label or name
        tolerance = settings_manager.tolerance(tolerance_name)
        margin = identity_margin(name, self.margin)
        if margin >= self.model.cutoff:
            return _skipped(label, margin, self.model, tolerance)

        error = 0.0
        for _ in range(self.samples):
            error = max(error, residual(self._random_form(degree, margin)).norm)
        return CheckResult(label, error, tolerance, details=dict(details, margin=margin))

    def clifford_commutator(self) -> CheckResult:
        """[e_i., e_j.] + i omega_ij Id on every basis spinor of the effective subspace"""
        name = 'clifford_commutator'
        tolerance = settings_manager.tolerance('commutator')
        margin = identity_margin(name, self.margin)
        if margin >= self.model.cutoff:
            return _skipped(name, margin, self.model, tolerance)

        clifford = self.model.clifford_matrices
        columns = self.model.effective(margin).indices
        identity = np.eye(self.model.dim)
        error = 0.0
        for i in range(self.space.dim):
            for j in range(self.space.dim):
                defect = clifford[i] @ clifford[j] - clifford[j] @ clifford[i] + 1j * self.space.omega_lower[i, j] * identity
                error = max(error, float(np.max(np.linalg.norm(defect[:, columns], axis=0))))
        return CheckResult(name, error, tolerance, details={'margin': margin})

    def h_relation(self) -> List[CheckResult]:
        l = self.space.l
        return [
            self._check(
                'h_relation', 'h_relation', degree,
                lambda alpha, degree=degree: h_op(alpha) - alpha * (1j * (degree - l)),
                label=f'h_relation[r={degree}]',
                form_degree=degree,
            )
            for degree in range(self.space.dim + 1)
        ]

    def f_minus_f_plus(self) -> CheckResult:
        """F- F+ s = -i l s on 0-forms"""
        l = self.space.l
        return self._check('f_minus_f_plus', 'h_relation', 0, lambda s: f_minus(f_plus(s)) + s * (1j * l))

    def f_plus_squared(self) -> CheckResult:
        """(F+)^2 s = -i omega x s"""
        return self._check(
            'f_plus_squared', 'f_plus_squared', 0,
            lambda s: f_plus(f_plus(s)) + omega_form(self.space, s.as_spinor()) * 1j,
        )

    def f_minus_kills_complement(self) -> CheckResult:
        return self._check('f_minus_kills_complement', 'projection', 1, lambda alpha: f_minus(alpha - p10(alpha)))

    def equation_one(self) -> CheckResult:
        """-F+ F- psi = i l psi for psi = F+ s"""
        l = self.space.l

        def residual(s: SpinorForm) -> SpinorForm:
            psi = f_plus(s)
            return f_plus(f_minus(psi)) * -1.0 - psi * (1j * l)

        return self._check('equation_one', 'projection', 0, residual)

    def p10_idempotent(self) -> CheckResult:
        return self._check('p10_idempotent', 'projection', 1, lambda alpha: p10(p10(alpha)) - p10(alpha))

    def p10_fixes_image(self) -> CheckResult:
        return self._check('p10_fixes_image', 'projection', 0, lambda s: p10(f_plus(s)) - f_plus(s))

    def p20_idempotent(self) -> CheckResult:
        return self._check('p20_idempotent', 'projection', 2, lambda alpha: p20(p20(alpha)) - p20(alpha))

    def p20_fixes_image(self) -> CheckResult:
        def residual(s: SpinorForm) -> SpinorForm:
            image = f_plus(f_plus(s))
            return p20(image) - image

        return self._check('p20_fixes_image', 'projection', 0, residual)

    def raise_lower(self) -> CheckResult:
        """raise(lower(T)) = T on every slot of a random 3-tensor"""
        dim = self.space.dim
        tensor = self.rng.standard_normal((dim, dim, dim))
        error = 0.0
        for slot in range(3):
            round_trip = raise_index(self.space, lower_index(self.space, tensor, slot), slot)
            error = max(error, float(np.max(np.abs(round_trip - tensor))))
        return CheckResult('raise_lower', error, settings_manager.tolerance('raise_lower'))

    def oscillator_spectrum(self) -> CheckResult:
        """D^2 - X^2 has eigenvalue -(2n + 1) at every level below the margin"""
        name = 'oscillator_spectrum'
        tolerance = settings_manager.tolerance('algebra')
        margin = identity_margin(name, self.margin)
        if margin >= self.model.cutoff:
            return _skipped(name, margin, self.model, tolerance)

        values = oscillator_spectrum(self.model, 0, margin)
        expected = -(2 * np.arange(len(values)) + 1)
        error = float(np.max(np.abs(values - expected)))
        return CheckResult(name, error, tolerance, details={'margin': margin, 'levels': len(values)})

    def run(self) -> List[CheckResult]:
        results = [self.clifford_commutator()]
        results.extend(self.h_relation())
        results.extend([
            self.f_minus_f_plus(),
            self.f_plus_squared(),
            self.f_minus_kills_complement(),
            self.equation_one(),
            self.p10_idempotent(),
            self.p10_fixes_image(),
            self.p20_idempotent(),
            self.p20_fixes_image(),
            self.raise_lower(),
            self.oscillator_spectrum(),
        ])
        failed = [result.name for result in results if not result.passed]
        logger.info(f'Identity suite l={self.space.l} N={self.model.cutoff}: {len(results) - len(failed)}/{len(results)} passed')
        return results
