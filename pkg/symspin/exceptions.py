"""
This lightweight module defines custom exceptions. We don't need to override anything
from the Exceptions module, but we want to be able to raise or check for specific failures
of the numerical library, and the CLI maps the configuration-type ones to exit code 2.
"""

class DimensionError(Exception):
    pass


class IndexSlotError(Exception):
    pass


class DegreeError(Exception):
    pass


class ModelMismatchError(Exception):
    pass


class GridResolutionError(Exception):
    pass


class PoleMarginError(Exception):
    pass


class UnsupportedCaseError(Exception):
    pass


class ChartConfigError(Exception):
    pass
