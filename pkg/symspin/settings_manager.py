"""
This module defines how tolerances are set and accessed by the numerical modules.

The active profile is read from the SYMSPIN_TOLERANCE_PROFILE env var at import time and can be
changed at runtime (the CLI does so for --profile and tolerance overrides).
"""

# stdlib imports
from typing import Dict, Optional

# project imports
from symspin.defs import (
    ALGEBRAIC_TOLERANCES,
    DEFAULT_TOLERANCES,
    STRICT_FACTOR,
    TOLERANCE_PROFILE,
    ToleranceProfile,
)


class SettingsManager:
    """
    Manages the tolerance table. Overrides set via `update_setting` win over the profile values.
    """
    def __init__(self, profile: str = ToleranceProfile.DEFAULT) -> None:
        self.profile = ToleranceProfile.DEFAULT
        self.overrides: Dict[str, float] = {}
        self.set_profile(profile)

    def set_profile(self, profile: str) -> None:
        if profile not in ToleranceProfile.ALL_PROFILES:
            raise ValueError(f'Unknown tolerance profile: {profile}')
        self.profile = profile

    def update_setting(self, setting_name: str, setting_value: float) -> None:
        setting_name = setting_name.lower().replace(' ', '_').replace('-', '_')
        if setting_name not in DEFAULT_TOLERANCES:
            raise KeyError(f'Unknown tolerance: {setting_name}')
        self.overrides[setting_name] = float(setting_value)

    def reset(self, profile: Optional[str] = None) -> None:
        self.overrides = {}
        self.set_profile(profile or ToleranceProfile.DEFAULT)

    def tolerance(self, name: str) -> float:
        if name in self.overrides:
            return self.overrides[name]

        value = DEFAULT_TOLERANCES[name]
        if self.profile == ToleranceProfile.STRICT and name in ALGEBRAIC_TOLERANCES:
            value *= STRICT_FACTOR
        return value

    def as_dict(self) -> Dict[str, float]:
        return {name: self.tolerance(name) for name in sorted(DEFAULT_TOLERANCES)}

    def __str__(self) -> str:
        return f'Settings[ Profile: {self.profile} | Overrides: {self.overrides} ]'

    def __repr__(self) -> str:
        return self.__str__()


# Unknown profile names in the env var fall back to the default profile
settings_manager = SettingsManager(
    TOLERANCE_PROFILE if TOLERANCE_PROFILE in ToleranceProfile.ALL_PROFILES else ToleranceProfile.DEFAULT
)
