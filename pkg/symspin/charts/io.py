"""
This module loads chart configs from JSON files and exports sampled chart fields to CSV.

A chart config names the chart and its discretization, e.g.

    {"chart": "sphere", "radius": 1.0, "theta_nodes": 97, "phi_nodes": 8, "pole_margin": 0.39}
    {"chart": "flat", "l": 1, "grid_nodes": 17, "half_width": 2.0}

Unknown keys are rejected.
"""

# stdlib imports
import csv
from itertools import product
import json
import logging
from pathlib import Path
from typing import Dict, Literal, Union

# 3rd-party imports
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

# project imports
from symspin.charts.base import ChartModel
from symspin.charts.flat import build_flat_chart
from symspin.charts.sphere import build_sphere_chart
from symspin.defs import (
    DEFAULT_FLAT_GRID_NODES,
    DEFAULT_FLAT_HALF_WIDTH,
    DEFAULT_PHI_NODES,
    DEFAULT_POLE_MARGIN,
    DEFAULT_RADIUS,
    DEFAULT_THETA_NODES,
    MAX_CUTOFF,
    MIN_GRID_NODES,
    ChartKind,
    to_label,
)
from symspin.exceptions import ChartConfigError


logger = logging.getLogger(__name__)


class ChartConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    chart: Literal['flat', 'sphere']
    l: int = Field(default=1, ge=1, le=max(MAX_CUTOFF))
    radius: float = Field(default=DEFAULT_RADIUS, gt=0)
    theta_nodes: int = Field(default=DEFAULT_THETA_NODES, ge=MIN_GRID_NODES)
    phi_nodes: int = Field(default=DEFAULT_PHI_NODES, ge=1)
    pole_margin: float = Field(default=DEFAULT_POLE_MARGIN, gt=0, lt=np.pi / 2)
    grid_nodes: int = Field(default=DEFAULT_FLAT_GRID_NODES, ge=MIN_GRID_NODES)
    half_width: float = Field(default=DEFAULT_FLAT_HALF_WIDTH, gt=0)


def build_chart(config: ChartConfig) -> ChartModel:
    if config.chart == ChartKind.SPHERE:
        if config.l != 1:
            raise ChartConfigError(f'The sphere chart is two-dimensional (l=1), got l={config.l}')
        return build_sphere_chart(config.radius, config.theta_nodes, config.phi_nodes, config.pole_margin)
    return build_flat_chart(config.l, config.grid_nodes, config.half_width)


def load_chart_config(path: Union[str, Path]) -> ChartModel:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
        config = ChartConfig.model_validate(payload)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        raise ChartConfigError(f'Invalid chart config {path}: {exc}') from exc

    logger.info(f'Loaded {config.chart} chart config from {path}')
    return build_chart(config)


def export_field_csv(chart: ChartModel, fields: Dict[str, np.ndarray], path: Union[str, Path]) -> int:
    """
    Write one row per grid node: node coordinates followed by every component of every field.
    Component labels are 1-based; complex fields get separate real and imaginary columns.
    Returns the number of rows written.
    """
    grid = chart.grid_shape
    names = [axis.name for axis in chart.axes]
    columns = []
    for name, values in fields.items():
        if values.shape[:len(grid)] != grid:
            raise ChartConfigError(f'Field {name} of shape {values.shape} does not match grid {grid}')
        for index in product(*[range(n) for n in values.shape[len(grid):]]):
            label = name + ('[' + ','.join(str(to_label(i)) for i in index) + ']' if index else '')
            if np.iscomplexobj(values):
                columns.append((f'{label}_re', name, index, np.real))
                columns.append((f'{label}_im', name, index, np.imag))
            else:
                columns.append((label, name, index, np.real))

    coordinates = chart.coordinates()
    rows = 0
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(names + [column[0] for column in columns])
        for node in np.ndindex(*grid):
            row = [f'{coordinates[axis][node]:.12g}' for axis in range(len(grid))]
            for _, name, index, part in columns:
                row.append(f'{float(part(fields[name][node + index])):.12g}')
            writer.writerow(row)
            rows += 1

    logger.debug(f'Exported {rows} rows with {len(columns)} columns to {path}')
    return rows
