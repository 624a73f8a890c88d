"""
This module defines Global Constants and Definitions.

These constants do not have any dependencies and can be used across all files.
Indices are 0-based everywhere in code; the 1-based labels used in printed output are
produced by `to_label` / `from_label` only.
"""

# stdlib imports
from enum import Enum
import os


# Supported model sizes
MIN_HALF_DIMENSION = 1
MIN_CUTOFF = 4
MAX_CUTOFF = {
    1: 32,
    2: 16,
    3: 8,
}
DEFAULT_MARGIN = 2


# Tolerance profile
TOLERANCE_PROFILE_ENV_VAR = os.environ.get('SYMSPIN_TOLERANCE_PROFILE')
SEED_ENV_VAR = os.environ.get('SYMSPIN_SEED')


class ToleranceProfile:
    DEFAULT = 'default'
    STRICT = 'strict'

    ALL_PROFILES = [DEFAULT, STRICT]


TOLERANCE_PROFILE = ToleranceProfile.DEFAULT if TOLERANCE_PROFILE_ENV_VAR is None else TOLERANCE_PROFILE_ENV_VAR
DEFAULT_SEED = 0 if SEED_ENV_VAR is None else int(SEED_ENV_VAR)

# Strict profile multiplies the algebraic tolerances by this factor
STRICT_FACTOR = 0.1

DEFAULT_TOLERANCES = {
    'commutator': 1e-12,
    'h_relation': 1e-11,
    'f_plus_squared': 1e-12,
    'projection': 1e-10,
    'algebra': 1e-10,
    'raise_lower': 1e-14,
    'kernel': 1e-6,
    'constant_field': 1e-10,
    'certificate': 1e-3,
    'stability': 0.2,
    'field_residual': 1e-8,
    'constant_sigma': 1e-8,
    'spectrum': 1e-12,
}

# Tolerances tightened by the strict profile
ALGEBRAIC_TOLERANCES = ['commutator', 'h_relation', 'f_plus_squared', 'projection', 'algebra']


# Chart geometry
MIN_GRID_NODES = 3
DEFAULT_POLE_MARGIN = 0.15
FRAME_BLOWUP_LIMIT = 1e3  # largest admissible |1/sin(theta)|
DEFAULT_RADIUS = 1.0
DEFAULT_THETA_NODES = 128
DEFAULT_PHI_NODES = 8
DEFAULT_FOURIER_MODES = 16
DEFAULT_FLAT_HALF_WIDTH = 2.0
DEFAULT_FLAT_GRID_NODES = 17
MIN_STABILITY_NODES = 16


# Linear algebra limits
DENSE_SVD_LIMIT = 6_000_000  # rows * cols of an operator solved by a full SVD
DENSE_GRAM_LIMIT = 1024      # unknowns solved by a dense Gram eigen-solve
SPARSE_SHIFT = 1e-10         # shift-invert target for the sparse path


# Case-study defaults
DEFAULT_FLAT_CUTOFF = 6
DEFAULT_SPHERE_CUTOFF = 16
DEFAULT_N_MAX = 3
DEFAULT_SPECTRUM_COUNT = 3
CORPUS_SIZE = 50
CORPUS_MARGIN = 3
TRANSPORT_X_RANGE = 3.0
TRANSPORT_X_SAMPLES = 13
HERMITE_ZERO_CUTOFF = 1e-8  # x samples where |h_n(x)| falls below this are skipped

# Largest flat-chart Killing operator the CLI assembles (grid nodes times spinor dimension)
MAX_FLAT_UNKNOWNS = 20_000
FLAT_GRID_DEFAULTS = {1: 17, 2: 3, 3: 3}


# Curvature classification
class CurvatureType(Enum):
    WEYL = 'weyl'
    RICCI = 'ricci'
    GENERIC = 'generic'


# Certificates
class CertificateKind(Enum):
    EXISTENCE = 'existence'
    NONEXISTENCE = 'nonexistence'
    RIGIDITY = 'rigidity'


class ChartKind:
    FLAT = 'flat'
    SPHERE = 'sphere'

    ALL_KINDS = [FLAT, SPHERE]


# CLI
class OutputFormat:
    JSON = 'json'
    CSV = 'csv'
    TEXT = 'text'

    ALL_FORMATS = [JSON, CSV, TEXT]


class Command:
    VERIFY = 'verify'
    SPECTRUM = 'spectrum'
    KILLING_FLAT = 'killing-flat'
    KILLING_SPHERE = 'killing-sphere'
    REPORT = 'report'

    ALL_COMMANDS = [VERIFY, SPECTRUM, KILLING_FLAT, KILLING_SPHERE, REPORT]


class ExitCode:
    SUCCESS = 0
    VERDICT_FAILURE = 1
    USAGE_ERROR = 2


def to_label(index: int) -> int:
    """0-based index -> 1-based label used in printed output"""
    return index + 1


def from_label(label: int) -> int:
    """1-based label -> 0-based index"""
    return label - 1