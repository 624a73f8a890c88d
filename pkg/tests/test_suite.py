# 3rd-party imports
import numpy as np
import pytest

# project imports
from symspin.fock import FockModel
from symspin.settings_manager import settings_manager
from symspin.suite import CHAIN_DEPTH, IdentitySuite, identity_margin


@pytest.mark.parametrize('l, cutoff', [(1, 16), (2, 8)])
def test_every_identity_passes(l, cutoff, rng):
    results = IdentitySuite(FockModel(l, cutoff), 2, rng).run()
    failures = [result for result in results if not result.passed]
    assert not failures
    names = [result.name for result in results]
    assert 'clifford_commutator' in names
    assert f'h_relation[r={2 * l}]' in names
    assert names[-1] == 'oscillator_spectrum'


def test_deep_identities_are_skipped_on_small_models(rng):
    results = {result.name: result for result in IdentitySuite(FockModel(1, 4), 2, rng).run()}
    assert results['p20_idempotent'].details['skipped']
    assert results['p20_idempotent'].passed
    assert 'skipped' not in results['clifford_commutator'].details


def test_margin_follows_the_chain_depth():
    assert identity_margin('p20_idempotent', 2) == CHAIN_DEPTH['p20_idempotent'] - 1
    assert identity_margin('clifford_commutator', 2) == 2
    assert identity_margin('clifford_commutator', 5) == 5


def test_tightened_tolerances_are_reported(rng):
    settings_manager.update_setting('commutator', 0.0)
    result = IdentitySuite(FockModel(1, 8), 2, rng).clifford_commutator()
    assert result.tolerance == 0.0
    assert result.error < 1e-12


def test_suite_is_deterministic_for_a_seed():
    first = IdentitySuite(FockModel(1, 8), 2, np.random.default_rng(7)).run()
    second = IdentitySuite(FockModel(1, 8), 2, np.random.default_rng(7)).run()
    assert [result.error for result in first] == [result.error for result in second]


def test_h_relation_covers_every_degree(rng):
    results = IdentitySuite(FockModel(2, 8), 2, rng).h_relation()
    assert [result.details['form_degree'] for result in results] == [0, 1, 2, 3, 4]
    assert all(result.passed for result in results)
