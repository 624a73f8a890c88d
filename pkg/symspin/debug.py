"""
This module defines some switches that can be set to shorten or expose certain parts of the code,
which is useful when isolating a single step of a long certificate run.

SKIP_STABILITY_CHECK drops the refinement pass of the sphere certificate. A certificate produced
with it enabled is never stable, so the verdict can only fail; use it to profile the coarse pass.
"""

# stdlib imports
import os


# Set Debug options through Environment variables
DEBUG_ENV_VAR = os.environ.get('SYMSPIN_DEBUG')
SKIP_REFINEMENT_ENV_VAR = os.environ.get('SYMSPIN_SKIP_REFINEMENT')


# Debug options
VERBOSE_LOGGING = True if DEBUG_ENV_VAR is not None and int(DEBUG_ENV_VAR) == 1 else False  # DEBUG level logs
SKIP_STABILITY_CHECK = True if SKIP_REFINEMENT_ENV_VAR is not None and int(SKIP_REFINEMENT_ENV_VAR) == 1 else False
