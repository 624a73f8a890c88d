"""
This module defines the flat chart: the box [-w, w]^{2l} of (R^{2l}, omega_0) with the coordinate
frame and the trivial connection. A constant, totally symmetric perturbation of the connection can
be layered on top; it stays torsion-free and omega-preserving and gives charts with curvature that
is only quadratic in the perturbation.
"""

# stdlib imports
import logging
from typing import Optional

# 3rd-party imports
import numpy as np

# project imports
from symspin.charts.base import Axis, ChartModel
from symspin.defs import DEFAULT_FLAT_GRID_NODES, DEFAULT_FLAT_HALF_WIDTH, ChartKind
from symspin.symalg import SymplecticSpace, raise_index, standard_space


logger = logging.getLogger(__name__)


def axis_names(l: int):
    if l == 1:
        return ['s', 't']
    return [f's{i + 1}' for i in range(l)] + [f't{i + 1}' for i in range(l)]


class FlatChart(ChartModel):
    KIND = ChartKind.FLAT

    def with_connection(self, gamma: np.ndarray) -> 'FlatChart':
        """The same grid and frame with constant connection coefficients gamma[k, i, j]"""
        sampled = np.broadcast_to(gamma, self.grid_shape + gamma.shape).copy()
        return FlatChart(
            self.space,
            self.axes,
            self.frame,
            sampled,
            self.coordinate_omega,
            dict(self.params, perturbed=True),
        )


def build_flat_chart(
    l: int,
    nodes: int = DEFAULT_FLAT_GRID_NODES,
    half_width: float = DEFAULT_FLAT_HALF_WIDTH,
) -> FlatChart:
    space = standard_space(l)
    coordinates = np.linspace(-half_width, half_width, nodes)
    axes = [Axis(name, coordinates) for name in axis_names(l)]
    grid = tuple(nodes for _ in range(space.dim))

    frame = np.broadcast_to(np.eye(space.dim), grid + (space.dim, space.dim)).copy()
    gamma = np.zeros(grid + (space.dim,) * 3)
    omega = np.broadcast_to(space.omega_lower.astype(float), grid + (space.dim, space.dim)).copy()

    logger.debug(f'Built flat chart with l={l}, {nodes} nodes per axis on [-{half_width}, {half_width}]')
    return FlatChart(space, axes, frame, gamma, omega, {'l': l, 'nodes': nodes, 'half_width': half_width})


def random_symmetric_connection(
    space: SymplecticSpace,
    rng: np.random.Generator,
    scale: float = 0.1,
    symmetric: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Constant connection coefficients Gamma^k_ij = sum_c omega^{kc} S_cij with S totally symmetric.
    Any such Gamma is torsion-free and preserves omega; its curvature is purely quadratic in Gamma.
    """
    dim = space.dim
    if symmetric is None:
        raw = scale * rng.standard_normal((dim, dim, dim))
        symmetric = sum(np.transpose(raw, order) for order in [
            (0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)
        ]) / 6.0
    # lowering the first slot of Gamma gives back S
    return raise_index(space, symmetric, 0)
