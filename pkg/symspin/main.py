"""
The Entrypoint to the command line. Each subcommand builds a RunConfig (optionally from a --config
JSON file, with flags overriding file values) and hands it to the handler registered for the
command. Every handler returns a ReportTracker which is then rendered in the requested format.

Summary of program logic:
    * Parse flags, merge with the config file, validate into a RunConfig
    * Apply the tolerance profile and overrides
    * Run the command handler (the report command runs every other handler in turn)
    * Render the report, write certificates, exit with the verdict

Exit codes: 0 success, 1 a mathematical verdict failed, 2 usage or configuration error.
"""

# stdlib imports
import json
import logging
from pathlib import Path
import sys
from typing import Any, Callable, Dict, Literal, Optional, Tuple

# 3rd-party imports
import click
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

# project imports
from symspin import debug
from symspin.charts.flat import build_flat_chart
from symspin.defs import (
    DEFAULT_FLAT_CUTOFF,
    DEFAULT_FLAT_HALF_WIDTH,
    DEFAULT_FOURIER_MODES,
    DEFAULT_MARGIN,
    DEFAULT_N_MAX,
    DEFAULT_POLE_MARGIN,
    DEFAULT_RADIUS,
    DEFAULT_SEED,
    DEFAULT_SPECTRUM_COUNT,
    DEFAULT_SPHERE_CUTOFF,
    DEFAULT_THETA_NODES,
    DEFAULT_TOLERANCES,
    FLAT_GRID_DEFAULTS,
    MAX_CUTOFF,
    MAX_FLAT_UNKNOWNS,
    MIN_CUTOFF,
    MIN_GRID_NODES,
    MIN_HALF_DIMENSION,
    MIN_STABILITY_NODES,
    TOLERANCE_PROFILE,
    CertificateKind,
    ChartKind,
    Command,
    ExitCode,
    OutputFormat,
    ToleranceProfile,
)
from symspin.exceptions import (
    ChartConfigError,
    DimensionError,
    GridResolutionError,
    PoleMarginError,
    UnsupportedCaseError,
)
from symspin.fedosov import ricci, sphere_sigma_closed_form
from symspin.fock import FockModel
from symspin.killing import Certificate, candidate_spectrum, flat_rigidity, sphere_nonexistence
from symspin.report import ReportTracker
from symspin.settings_manager import settings_manager
from symspin.suite import IdentitySuite


logger = logging.getLogger(__name__)


# Errors reported as a one-line message with exit code 2
CONFIG_ERRORS = (
    ValidationError,
    ChartConfigError,
    DimensionError,
    GridResolutionError,
    PoleMarginError,
    UnsupportedCaseError,
)

# Parts of the report command, in the order they run
REPORT_PARTS = [Command.VERIFY, Command.SPECTRUM, Command.KILLING_FLAT, Command.KILLING_SPHERE]
SPHERE_COMMANDS = [Command.KILLING_SPHERE]


class RunConfig(BaseModel):
    """
    Canonical parameter record of one run. It is embedded verbatim in the report, so two runs with
    the same RunConfig produce the same report apart from the timestamp.
    """
    model_config = ConfigDict(extra='forbid')

    command: Literal['verify', 'spectrum', 'killing-flat', 'killing-sphere', 'report']
    l: int = Field(default=1, ge=MIN_HALF_DIMENSION, le=max(MAX_CUTOFF))
    cutoff: Optional[int] = Field(default=None, ge=MIN_CUTOFF)
    margin: int = Field(default=DEFAULT_MARGIN, ge=0)
    case: Literal['sphere', 'flat'] = ChartKind.SPHERE
    count: int = Field(default=DEFAULT_SPECTRUM_COUNT, ge=0)
    radius: float = Field(default=DEFAULT_RADIUS, gt=0)
    theta_nodes: int = Field(default=DEFAULT_THETA_NODES, ge=MIN_STABILITY_NODES)
    fourier_modes: int = Field(default=DEFAULT_FOURIER_MODES, ge=1)
    pole_margin: float = Field(default=DEFAULT_POLE_MARGIN, gt=0, lt=np.pi / 2)
    n_max: int = Field(default=DEFAULT_N_MAX, ge=0)
    grid: Optional[int] = Field(default=None, ge=MIN_GRID_NODES)
    half_width: float = Field(default=DEFAULT_FLAT_HALF_WIDTH, gt=0)
    killing_number: float = 0.0
    inject: bool = False
    seed: int = DEFAULT_SEED
    profile: str = TOLERANCE_PROFILE if TOLERANCE_PROFILE in ToleranceProfile.ALL_PROFILES else ToleranceProfile.DEFAULT
    tolerances: Dict[str, float] = Field(default_factory=dict)

    @field_validator('profile')
    @classmethod
    def known_profile(cls, value: str) -> str:
        if value not in ToleranceProfile.ALL_PROFILES:
            raise ValueError(f'profile must be one of {ToleranceProfile.ALL_PROFILES}')
        return value

    @field_validator('tolerances')
    @classmethod
    def known_tolerances(cls, value: Dict[str, float]) -> Dict[str, float]:
        for name, tolerance in value.items():
            if name not in DEFAULT_TOLERANCES:
                raise ValueError(f'unknown tolerance {name!r}')
            if not tolerance > 0:
                raise ValueError(f'tolerance {name!r} must be positive')
        return value

    @model_validator(mode='after')
    def within_limits(self) -> 'RunConfig':
        parts = REPORT_PARTS if self.command == Command.REPORT else [self.command]
        for part in parts:
            check_limits(self.part(part))
        return self

    def part(self, command: str) -> 'RunConfig':
        """
        The config one part of the report command runs with. The cutoff flag only applies to the
        identity suite there; the sphere parts always run at l = 1.
        """
        if self.command != Command.REPORT:
            return self
        update: Dict[str, Any] = {'command': command}
        if command != Command.VERIFY:
            update['cutoff'] = None
        if command == Command.SPECTRUM:
            update['case'] = ChartKind.SPHERE
        if command in SPHERE_COMMANDS or command == Command.SPECTRUM:
            update['l'] = 1
        return self.model_copy(update=update)

    def resolved_cutoff(self) -> int:
        if self.cutoff is not None:
            return self.cutoff
        if self.command == Command.KILLING_FLAT:
            return DEFAULT_FLAT_CUTOFF if self.l == 1 else MIN_CUTOFF
        if self.command == Command.KILLING_SPHERE:
            return DEFAULT_SPHERE_CUTOFF
        return MAX_CUTOFF[self.l]

    def resolved_grid(self) -> int:
        return self.grid if self.grid is not None else FLAT_GRID_DEFAULTS[self.l]

    def record(self) -> Dict[str, Any]:
        """Parameter record embedded in reports and certificates, with defaults resolved"""
        record = self.model_dump(mode='json')
        record['cutoff'] = self.resolved_cutoff()
        if self.command == Command.KILLING_FLAT:
            record['grid'] = self.resolved_grid()
        return record


def check_limits(config: RunConfig) -> None:
    """Ranges that depend on more than one field; raises ValueError"""
    cutoff = config.resolved_cutoff()
    if cutoff > MAX_CUTOFF[config.l]:
        raise ValueError(f'cutoff for l={config.l} must be in [{MIN_CUTOFF}, {MAX_CUTOFF[config.l]}], got {cutoff}')
    if config.margin >= cutoff:
        raise ValueError(f'margin {config.margin} leaves no levels at cutoff {cutoff}')

    sphere = config.command in SPHERE_COMMANDS or (config.command == Command.SPECTRUM and config.case == ChartKind.SPHERE)
    if sphere and config.l != 1:
        raise ValueError(f'the sphere is two-dimensional (l=1), got l={config.l}')
    if config.command in SPHERE_COMMANDS and cutoff - config.margin <= config.n_max:
        raise ValueError(f'cutoff {cutoff} with margin {config.margin} leaves fewer than n_max + 1 = {config.n_max + 1} levels')

    if config.command == Command.KILLING_FLAT:
        unknowns = config.resolved_grid() ** (2 * config.l) * cutoff ** config.l
        if unknowns > MAX_FLAT_UNKNOWNS:
            raise ValueError(f'flat Killing operator with {unknowns} unknowns exceeds {MAX_FLAT_UNKNOWNS}')


def build_run_config(command: str, config_path: Optional[str], overrides: Dict[str, Any]) -> RunConfig:
    """Config file values first, then every flag that was actually given"""
    payload: Dict[str, Any] = {}
    if config_path is not None:
        try:
            payload = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ChartConfigError(f'Invalid config file {config_path}: {exc}') from exc
        if not isinstance(payload, dict):
            raise ChartConfigError(f'Config file {config_path} must hold a JSON object')

    payload = dict(payload)
    payload.update({key: value for key, value in overrides.items() if value is not None})
    payload['command'] = command
    return RunConfig.model_validate(payload)


def apply_tolerances(config: RunConfig) -> None:
    settings_manager.reset(config.profile)
    for name, value in config.tolerances.items():
        settings_manager.update_setting(name, value)
    logger.debug(f'Tolerances: {settings_manager}')


# Command handlers
def run_verify(config: RunConfig) -> ReportTracker:
    model = FockModel(config.l, config.resolved_cutoff())
    tracker = ReportTracker(Command.VERIFY, config.record())
    suite = IdentitySuite(model, config.margin, np.random.default_rng(config.seed))
    tracker.extend(suite.run())
    return tracker


def run_spectrum(config: RunConfig) -> ReportTracker:
    l = config.l
    model = FockModel(l, config.resolved_cutoff())
    tracker = ReportTracker(Command.SPECTRUM, config.record())
    if config.case == ChartKind.SPHERE:
        sigma = sphere_sigma_closed_form(config.radius)
    else:
        sigma = ricci(build_flat_chart(l, FLAT_GRID_DEFAULTS[l]))

    tolerance = settings_manager.tolerance('spectrum')
    candidates = candidate_spectrum(sigma, model, config.count, config.margin)
    for position in range(0, len(candidates), 2):
        pair = candidates[position:position + 2]
        plus = pair[0]
        minus = pair[-1]
        level = position // 2
        error = abs(2 * l * plus.killing_number ** 2 - plus.eigenvalue)
        if config.case == ChartKind.SPHERE:
            error = max(error, abs(plus.eigenvalue + (2 * level + 1) / config.radius))
        tracker.add(
            f'n={plus.hermite_level}', error, tolerance,
            n=plus.hermite_level,
            eigenvalue=plus.eigenvalue,
            lambda_plus=plus.killing_number,
            lambda_minus=minus.killing_number,
        )
    return tracker


def _add_certificate(tracker: ReportTracker, name: str, certificate: Certificate) -> None:
    tracker.extra.setdefault('certificates', {})[name] = certificate.to_dict()


def run_killing_flat(config: RunConfig) -> ReportTracker:
    model = FockModel(config.l, config.resolved_cutoff())
    tracker = ReportTracker(Command.KILLING_FLAT, config.record())
    certificate = flat_rigidity(config.l, model, config.resolved_grid(), config.killing_number, config.half_width)
    details = certificate.details

    lambdas = details['prolongation_lambdas']
    tracker.add(
        'prolongation_forces_zero', max(abs(value) for value in lambdas), 0.0,
        lambdas=lambdas,
    )
    tracker.add(
        'kernel_dim', abs(details['kernel_dim'] - details['expected_kernel_dim']), 0.0,
        kernel_dim=details['kernel_dim'],
        expected=details['expected_kernel_dim'],
    )
    tracker.add('kernel_constant', details['constant_deviation'], settings_manager.tolerance('constant_field'))
    tracker.add(
        'rigidity', certificate.bound, certificate.tolerance,
        passed=certificate.kind == CertificateKind.RIGIDITY and certificate.verdict,
        outcome=certificate.outcome,
    )
    _add_certificate(tracker, Command.KILLING_FLAT, certificate)
    return tracker


def run_killing_sphere(config: RunConfig) -> ReportTracker:
    tracker = ReportTracker(Command.KILLING_SPHERE, config.record())
    certificate = sphere_nonexistence(
        config.radius,
        config.n_max,
        config.theta_nodes,
        config.fourier_modes,
        config.resolved_cutoff(),
        config.margin,
        config.pole_margin,
        config.inject,
    )
    for row in certificate.details['candidates']:
        sign = '+' if np.imag(row['lambda']) >= 0 else '-'
        tracker.add(
            f"s_min[n={row['n']},{sign}]", row['s_min'], certificate.tolerance,
            passed=row['s_min'] > certificate.tolerance and row['stable'] and row['transport_forced_zero'],
            **row,
        )
    tracker.add(
        'nonexistence', certificate.bound, certificate.tolerance,
        passed=certificate.kind == CertificateKind.NONEXISTENCE and certificate.verdict,
        outcome=certificate.outcome,
    )
    _add_certificate(tracker, Command.KILLING_SPHERE, certificate)
    return tracker


def run_report(config: RunConfig) -> ReportTracker:
    tracker = ReportTracker(Command.REPORT, config.record())
    for command in REPORT_PARTS:
        part = COMMAND_HANDLERS[command](config.part(command))
        for result in part.results:
            result.name = f'{command}/{result.name}'
        tracker.extend(part.results)
        for name, certificate in part.extra.get('certificates', {}).items():
            tracker.extra.setdefault('certificates', {})[name] = certificate
    return tracker


COMMAND_HANDLERS: Dict[str, Callable[[RunConfig], ReportTracker]] = {
    Command.VERIFY: run_verify,
    Command.SPECTRUM: run_spectrum,
    Command.KILLING_FLAT: run_killing_flat,
    Command.KILLING_SPHERE: run_killing_sphere,
    Command.REPORT: run_report,
}


def render(tracker: ReportTracker, output_format: str) -> str:
    if output_format == OutputFormat.JSON:
        return tracker.to_json()
    if output_format == OutputFormat.CSV:
        return tracker.to_csv()
    return tracker.to_text()


def run_command(command: str, options: Dict[str, Any]) -> None:
    """
    Build the config, run the handler for `command` and exit with the verdict. Never returns.
    """
    output_format = options.pop('output_format')
    output = options.pop('output')
    certificate_path = options.pop('certificate', None)
    config_path = options.pop('config')
    tolerances = options.pop('tolerance')

    try:
        if tolerances:
            options['tolerances'] = parse_tolerances(tolerances)
        config = build_run_config(command, config_path, options)
        apply_tolerances(config)
        tracker = COMMAND_HANDLERS[command](config)
    except CONFIG_ERRORS as exc:
        click.echo(f'Error: {_one_line(exc)}', err=True)
        sys.exit(ExitCode.USAGE_ERROR)

    text = render(tracker, output_format)
    if output is not None:
        Path(output).write_text(text + '\n')
        logger.info(f'Wrote {output_format} report to {output}')
    else:
        click.echo(text)

    certificates = tracker.extra.get('certificates', {})
    if certificate_path is not None and certificates:
        payload = certificates[command] if command in certificates else certificates
        Path(certificate_path).write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n')

    sys.exit(ExitCode.SUCCESS if tracker.passed else ExitCode.VERDICT_FAILURE)


def parse_tolerances(entries: Tuple[str, ...]) -> Dict[str, float]:
    tolerances = {}
    for entry in entries:
        name, separator, value = entry.partition('=')
        if not separator:
            raise ChartConfigError(f'Tolerance override {entry!r} must look like name=value')
        try:
            tolerances[name.strip().replace('-', '_')] = float(value)
        except ValueError as exc:
            raise ChartConfigError(f'Tolerance override {entry!r} has a non-numeric value') from exc
    return tolerances


def _one_line(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        return '; '.join(
            f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}"
            for error in exc.errors()
        )
    return str(exc).splitlines()[0] if str(exc) else type(exc).__name__


def common_options(function: Callable) -> Callable:
    """Options shared by every subcommand"""
    options = [
        click.option('--config', 'config', type=click.Path(), default=None,
                     help='JSON file with RunConfig fields; flags override it'),
        click.option('--format', 'output_format', type=click.Choice(OutputFormat.ALL_FORMATS),
                     default=OutputFormat.TEXT, show_default=True, help='Report format'),
        click.option('-o', '--output', type=click.Path(), default=None,
                     help='Write the report here instead of stdout'),
        click.option('--profile', type=str, default=None, help='Tolerance profile (default|strict)'),
        click.option('--tolerance', multiple=True, metavar='NAME=VALUE', help='Override one tolerance'),
        click.option('--seed', type=int, default=None, help='Seed of the random inputs'),
        click.option('--margin', type=int, default=None, help='Truncation margin of the effective subspace'),
    ]
    for option in reversed(options):
        function = option(function)
    return function


@click.group()
@click.option('-v', '--verbose', is_flag=True, help='DEBUG level logging')
def cli(verbose: bool) -> None:
    """Symplectic spinor identities and Killing spinor certificates."""
    level = logging.DEBUG if verbose or debug.VERBOSE_LOGGING else logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s: %(message)s', force=True)


@cli.command()
@click.option('--l', 'l', type=int, default=None, help='Number of modes (phase space dimension 2l)')
@click.option('--cutoff', type=int, default=None, help='Hermite levels per mode')
@common_options
def verify(**options: Any) -> None:
    """Run the operator identity suite at (l, N)."""
    run_command(Command.VERIFY, options)


@cli.command()
@click.option('--case', type=click.Choice(ChartKind.ALL_KINDS), default=None, help='Which sigma to use')
@click.option('--l', 'l', type=int, default=None)
@click.option('--cutoff', type=int, default=None)
@click.option('--radius', type=float, default=None, help='Sphere radius')
@click.option('--count', type=int, default=None, help='Number of Hermite levels to list')
@common_options
def spectrum(**options: Any) -> None:
    """List the Killing numbers allowed by the prolongation."""
    run_command(Command.SPECTRUM, options)


@cli.command('killing-flat')
@click.option('--l', 'l', type=int, default=None)
@click.option('--cutoff', type=int, default=None)
@click.option('--grid', type=int, default=None, help='Nodes per axis')
@click.option('--half-width', type=float, default=None, help='Chart is [-w, w]^2l')
@click.option('--lambda', 'killing_number', type=float, default=None, help='Killing number of the operator')
@click.option('--certificate', type=click.Path(), default=None, help='Also write the certificate JSON here')
@common_options
def killing_flat(**options: Any) -> None:
    """Rigidity certificate on the flat chart."""
    run_command(Command.KILLING_FLAT, options)


@cli.command('killing-sphere')
@click.option('--radius', type=float, default=None)
@click.option('--n-max', 'n_max', type=int, default=None, help='Highest Hermite level of the candidates')
@click.option('--theta-nodes', type=int, default=None)
@click.option('--fourier-modes', type=int, default=None)
@click.option('--cutoff', type=int, default=None)
@click.option('--pole-margin', type=float, default=None)
@click.option('--inject/--no-inject', default=None, help='Make one unknown an exact solution (sanity run)')
@click.option('--certificate', type=click.Path(), default=None, help='Also write the certificate JSON here')
@common_options
def killing_sphere(**options: Any) -> None:
    """Nonexistence certificate on the round sphere."""
    run_command(Command.KILLING_SPHERE, options)


@cli.command()
@click.option('--l', 'l', type=int, default=None)
@click.option('--cutoff', type=int, default=None, help='Cutoff of the identity suite')
@click.option('--radius', type=float, default=None)
@click.option('--n-max', 'n_max', type=int, default=None)
@click.option('--theta-nodes', type=int, default=None)
@click.option('--fourier-modes', type=int, default=None)
@click.option('--count', type=int, default=None)
@click.option('--certificate', type=click.Path(), default=None, help='Also write both certificates here')
@common_options
def report(**options: Any) -> None:
    """Run every command and emit one combined report."""
    run_command(Command.REPORT, options)


if __name__ == '__main__':
    cli()
