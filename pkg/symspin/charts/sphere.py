"""
This module defines the round-sphere chart of radius r in coordinates (theta, phi), with
omega = r^2 sin(theta) dtheta ^ dphi and the adapted frame

    e_1 = (1/r) d_theta,   e_2 = (1/(r sin theta)) d_phi

of the Levi-Civita connection, whose only nonzero coefficients are
    nabla_{e_2} e_1 =  (cot theta / r) e_2
    nabla_{e_2} e_2 = -(cot theta / r) e_1

theta runs over [theta_0, pi - theta_0]; the frame blows up at the poles, so the pole margin theta_0
must keep |1/sin theta| below FRAME_BLOWUP_LIMIT. phi is periodic.
"""

# stdlib imports
import logging

# 3rd-party imports
import numpy as np

# project imports
from symspin.charts.base import Axis, ChartModel
from symspin.defs import (
    DEFAULT_PHI_NODES,
    DEFAULT_POLE_MARGIN,
    DEFAULT_RADIUS,
    DEFAULT_THETA_NODES,
    FRAME_BLOWUP_LIMIT,
    ChartKind,
)
from symspin.exceptions import GridResolutionError, PoleMarginError
from symspin.symalg import standard_space


logger = logging.getLogger(__name__)


class SphereChart(ChartModel):
    KIND = ChartKind.SPHERE

    @property
    def radius(self) -> float:
        return self.params['radius']

    @property
    def theta(self) -> np.ndarray:
        return self.axes[0].nodes


def build_sphere_chart(
    radius: float = DEFAULT_RADIUS,
    theta_nodes: int = DEFAULT_THETA_NODES,
    phi_nodes: int = DEFAULT_PHI_NODES,
    pole_margin: float = DEFAULT_POLE_MARGIN,
) -> SphereChart:
    if radius <= 0:
        raise GridResolutionError(f'Radius must be positive, got {radius}')
    if not 0 < pole_margin < np.pi / 2:
        raise PoleMarginError(f'Pole margin must lie in (0, pi/2), got {pole_margin}')
    if phi_nodes < 1:
        raise GridResolutionError(f'Need at least one phi node, got {phi_nodes}')

    theta = np.linspace(pole_margin, np.pi - pole_margin, theta_nodes)
    phi = np.linspace(0.0, 2 * np.pi, phi_nodes, endpoint=False)
    blowup = float(np.max(np.abs(1.0 / np.sin(theta))))
    if blowup > FRAME_BLOWUP_LIMIT:
        raise PoleMarginError(f'Frame coefficient 1/sin(theta) reaches {blowup:.3g} > {FRAME_BLOWUP_LIMIT}')

    space = standard_space(1)
    grid = (theta_nodes, phi_nodes)
    sin_theta = np.sin(theta)[:, np.newaxis] * np.ones(grid)
    cot_theta = (np.cos(theta) / np.sin(theta))[:, np.newaxis] * np.ones(grid)

    frame = np.zeros(grid + (2, 2))
    frame[..., 0, 0] = 1.0 / radius
    frame[..., 1, 1] = 1.0 / (radius * sin_theta)

    gamma = np.zeros(grid + (2, 2, 2))
    gamma[..., 1, 1, 0] = cot_theta / radius
    gamma[..., 0, 1, 1] = -cot_theta / radius

    omega = np.zeros(grid + (2, 2))
    omega[..., 0, 1] = radius ** 2 * sin_theta
    omega[..., 1, 0] = -radius ** 2 * sin_theta

    axes = [Axis('theta', theta), Axis('phi', phi, periodic=True, period=2 * np.pi)]
    params = {
        'radius': radius,
        'theta_nodes': theta_nodes,
        'phi_nodes': phi_nodes,
        'pole_margin': pole_margin,
    }
    logger.debug(f'Built sphere chart r={radius} with {theta_nodes}x{phi_nodes} nodes, pole margin {pole_margin}')
    return SphereChart(space, axes, frame, gamma, omega, params)
