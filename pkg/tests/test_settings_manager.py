# 3rd-party imports
import pytest

# project imports
from symspin.defs import DEFAULT_TOLERANCES, STRICT_FACTOR, ToleranceProfile
from symspin.settings_manager import SettingsManager, settings_manager


def test_default_profile_uses_the_table():
    manager = SettingsManager()
    assert manager.as_dict() == dict(sorted(DEFAULT_TOLERANCES.items()))


def test_strict_profile_tightens_algebraic_tolerances():
    manager = SettingsManager(ToleranceProfile.STRICT)
    assert manager.tolerance('commutator') == DEFAULT_TOLERANCES['commutator'] * STRICT_FACTOR
    assert manager.tolerance('certificate') == DEFAULT_TOLERANCES['certificate']


def test_overrides_win_over_the_profile():
    manager = SettingsManager(ToleranceProfile.STRICT)
    manager.update_setting('Commutator', 1e-3)
    manager.update_setting('field-residual', 1e-4)
    assert manager.tolerance('commutator') == 1e-3
    assert manager.tolerance('field_residual') == 1e-4
    manager.reset()
    assert manager.profile == ToleranceProfile.DEFAULT
    assert manager.tolerance('commutator') == DEFAULT_TOLERANCES['commutator']


def test_unknown_names_are_rejected():
    with pytest.raises(ValueError):
        SettingsManager('lenient')
    with pytest.raises(KeyError):
        SettingsManager().update_setting('bogus', 1.0)


def test_shared_manager_is_reset_between_tests():
    assert settings_manager.profile == ToleranceProfile.DEFAULT
    assert not settings_manager.overrides
    assert 'Profile: default' in str(settings_manager)
