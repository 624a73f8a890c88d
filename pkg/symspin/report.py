"""
This module defines how results are tracked and rendered.

A CheckResult records one identity or certificate outcome (error against tolerance). The
ReportTracker collects them for a run and renders the combined report as JSON, CSV or text. The
timestamp is kept in a single field so two runs with the same config differ only there.
"""

# stdlib imports
import csv
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
import hashlib
import io
import json
import logging
from typing import Any, Dict, List, Optional

# 3rd-party imports
import numpy as np


logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Plain JSON types for numpy scalars/arrays, complex numbers and enums"""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Enum):
        return value.value
    return value


def canonical_json(value: Any) -> str:
    return json.dumps(to_jsonable(value), sort_keys=True, separators=(',', ':'), ensure_ascii=False)


def sha256_canonical_json(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode('utf-8')).hexdigest()


def timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


@dataclass
class CheckResult:
    """One line of a report"""
    name: str
    error: float
    tolerance: float
    passed: Optional[bool] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.passed is None:
            self.passed = bool(self.error <= self.tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            'name': self.name,
            'error': self.error,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'details': self.details,
        })

    def __repr__(self) -> str:
        return f'CheckResult(Name={self.name}, Error={self.error:.3e}, Tolerance={self.tolerance:.1e}, Passed={self.passed})'


class ReportTracker:
    """
    Tracks every result of one CLI run and renders the combined report.
    """

    OUTPUT_FORMAT = '{status:<5} {name:<44} error={error:<10.3e} tolerance={tolerance:.1e}'
    CSV_FIELDS = ['name', 'error', 'tolerance', 'passed']

    def __init__(self, command: str, params: Dict[str, Any]) -> None:
        self.command = command
        self.params = params
        self.results: List[CheckResult] = []
        self.extra: Dict[str, Any] = {}

    def add(
        self,
        name: str,
        error: float,
        tolerance: float,
        passed: Optional[bool] = None,
        **details: Any,
    ) -> CheckResult:
        result = CheckResult(name, float(error), float(tolerance), passed, details)
        self.results.append(result)
        logger.info(f'{name}: error {result.error:.3e} (tolerance {result.tolerance:.1e}) passed={result.passed}')
        return result

    def extend(self, results: List[CheckResult]) -> None:
        for result in results:
            self.results.append(result)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]

    def to_dict(self, stamp: Optional[str] = None) -> Dict[str, Any]:
        report = {
            'command': self.command,
            'params': to_jsonable(self.params),
            'results': [result.to_dict() for result in self.results],
            'verdict': self.passed,
            'timestamp': stamp if stamp is not None else timestamp(),
        }
        if self.extra:
            report['extra'] = to_jsonable(self.extra)
        return report

    def to_json(self, stamp: Optional[str] = None) -> str:
        return json.dumps(self.to_dict(stamp), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=self.CSV_FIELDS, extrasaction='ignore', lineterminator='\n')
        writer.writeheader()
        for result in self.results:
            writer.writerow({
                'name': result.name,
                'error': f'{result.error:.6e}',
                'tolerance': f'{result.tolerance:.1e}',
                'passed': result.passed,
            })
        return buffer.getvalue()

    def to_text(self) -> str:
        lines = [f'{self.command} {canonical_json(self.params)}']
        for result in self.results:
            lines.append(self.OUTPUT_FORMAT.format(
                status='PASS' if result.passed else 'FAIL',
                name=result.name,
                error=result.error,
                tolerance=result.tolerance,
            ))
        lines.append(f'verdict: {"PASS" if self.passed else "FAIL"}')
        return '\n'.join(lines)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f'ReportTracker(Command={self.command}, Results={len(self.results)}, Passed={self.passed})'
