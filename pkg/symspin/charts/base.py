"""
This module defines the base ChartModel class that is subclassed by the flat and sphere charts.

Every sampled quantity stores the grid axes first and its tensor indices last:
    frame[..., a, mu]        coordinate component mu of the frame vector e_a
    gamma[..., k, i, j]      connection coefficient Gamma^k_ij, nabla_{e_i} e_j = sum_k Gamma^k_ij e_k
    coordinate_omega[..., mu, nu]   the symplectic form in coordinates

Derivatives along non-periodic axes are second-order central differences (boundary layers are
excluded from every assertion through `interior_mask`); periodic axes use spectral differences.
"""

# stdlib imports
from dataclasses import dataclass
import logging
from typing import Any, Dict, List, Tuple

# 3rd-party imports
import numpy as np

# project imports
from symspin.defs import MIN_GRID_NODES
from symspin.exceptions import GridResolutionError, UnsupportedCaseError
from symspin.symalg import SymplecticSpace


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Axis:
    """One coordinate axis of a rectangular grid"""
    name: str
    nodes: np.ndarray
    periodic: bool = False
    period: float = 2 * np.pi

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def spacing(self) -> float:
        if self.periodic:
            return self.period / self.size
        return float(self.nodes[1] - self.nodes[0])


class ChartModel:
    """
    Base chart. Subclasses fill in the frame, the connection coefficients and the coordinate form;
    everything derived from them (brackets, residuals, derivatives) lives here.
    """
    KIND = 'chart'
    INTERIOR_DEPTH = 1

    def __init__(
        self,
        space: SymplecticSpace,
        axes: List[Axis],
        frame: np.ndarray,
        gamma: np.ndarray,
        coordinate_omega: np.ndarray,
        params: Dict[str, Any],
    ) -> None:
        if len(axes) != space.dim:
            raise GridResolutionError(f'{len(axes)} axes for a {space.dim}-dimensional space')
        for axis in axes:
            if not axis.periodic and axis.size < MIN_GRID_NODES:
                raise GridResolutionError(f'Axis {axis.name} has {axis.size} nodes, need >= {MIN_GRID_NODES}')

        self.space = space
        self.axes = axes
        self.frame = frame
        self.gamma = gamma
        self.coordinate_omega = coordinate_omega
        self.params = params

        grid = self.grid_shape
        dim = space.dim
        if frame.shape != grid + (dim, dim) or gamma.shape != grid + (dim, dim, dim):
            raise GridResolutionError('Frame or connection samples do not match the grid')

    @property
    def grid_shape(self) -> Tuple[int, ...]:
        return tuple(axis.size for axis in self.axes)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.grid_shape))

    @property
    def spacing(self) -> float:
        """Largest spacing among the non-periodic axes"""
        spacings = [axis.spacing for axis in self.axes if not axis.periodic]
        return max(spacings) if spacings else 0.0

    def coordinates(self) -> List[np.ndarray]:
        return np.meshgrid(*[axis.nodes for axis in self.axes], indexing='ij')

    def interior_mask(self, depth: int = INTERIOR_DEPTH) -> np.ndarray:
        """Nodes at least `depth` layers away from every non-periodic boundary"""
        mask = np.ones(self.grid_shape, dtype=bool)
        for position, axis in enumerate(self.axes):
            if axis.periodic or depth == 0:
                continue
            index = [slice(None)] * len(self.axes)
            index[position] = slice(0, depth)
            mask[tuple(index)] = False
            index[position] = slice(axis.size - depth, axis.size)
            mask[tuple(index)] = False
        return mask

    def partial(self, values: np.ndarray, position: int) -> np.ndarray:
        """Coordinate derivative along grid axis `position` of an array with grid axes first"""
        axis = self.axes[position]
        if axis.periodic:
            wavenumbers = 2 * np.pi * np.fft.fftfreq(axis.size, d=axis.spacing)
            if axis.size % 2 == 0:
                wavenumbers[axis.size // 2] = 0.0
            shape = [1] * values.ndim
            shape[position] = axis.size
            spectrum = np.fft.fft(values, axis=position) * (1j * wavenumbers.reshape(shape))
            derivative = np.fft.ifft(spectrum, axis=position)
            return derivative if np.iscomplexobj(values) else derivative.real
        return np.gradient(values, axis.spacing, axis=position, edge_order=2)

    def frame_derivative(self, values: np.ndarray, direction: int) -> np.ndarray:
        """e_a(f) = sum_mu E_a^mu d_mu f for every trailing component of `values`"""
        grid_rank = len(self.axes)
        trailing = values.ndim - grid_rank
        result = np.zeros(values.shape, dtype=np.result_type(values, self.frame))
        for position in range(grid_rank):
            coefficient = self.frame[..., direction, position]
            if not np.any(coefficient):
                continue
            coefficient = coefficient.reshape(coefficient.shape + (1,) * trailing)
            result = result + coefficient * self.partial(values, position)
        return result

    def coframe(self) -> np.ndarray:
        """Inverse frame: vector components V^mu = sum_a v^a E_a^mu  =>  v = V @ coframe"""
        return np.linalg.inv(self.frame)

    def frame_brackets(self) -> np.ndarray:
        """Structure functions c[..., q, i, j] with [e_i, e_j] = sum_q c^q_ij e_q"""
        dim = self.space.dim
        derivative = np.stack([self.frame_derivative(self.frame, a) for a in range(dim)], axis=-3)
        # derivative[..., a, j, mu] = e_a(E_j^mu)
        bracket = derivative - np.swapaxes(derivative, -3, -2)
        return np.einsum('...ijm,...mq->...qij', bracket, self.coframe())

    def adapted_residual(self) -> float:
        """max |omega(e_i, e_j) - omega_ij| over all nodes"""
        pulled = np.einsum('...am,...mn,...bn->...ab', self.frame, self.coordinate_omega, self.frame)
        return float(np.max(np.abs(pulled - self.space.omega_lower)))

    def torsion_residual(self) -> float:
        """max |nabla_{e_i} e_j - nabla_{e_j} e_i - [e_i, e_j]| over interior nodes"""
        torsion = self.gamma - np.swapaxes(self.gamma, -2, -1) - self.frame_brackets()
        return float(np.max(np.abs(torsion[self.interior_mask()])))

    def omega_parallel_residual(self) -> float:
        """max |(nabla_{e_a} omega)(e_i, e_j)| with omega constant in the adapted frame"""
        omega = self.space.omega_lower
        first = np.einsum('...kai,kj->...aij', self.gamma, omega)
        second = np.einsum('...kaj,ik->...aij', self.gamma, omega)
        return float(np.max(np.abs((first + second)[self.interior_mask()])))

    def reduced_axes(self) -> List[int]:
        return [position for position, axis in enumerate(self.axes) if not axis.periodic]

    def periodic_axes(self) -> List[int]:
        return [position for position, axis in enumerate(self.axes) if axis.periodic]

    def periodic_slice(self, values: np.ndarray) -> np.ndarray:
        """
        Restrict a sampled quantity to the first node of every periodic axis, after checking it does
        not vary along them.
        """
        index = [slice(None)] * len(self.axes)
        for position in self.periodic_axes():
            index[position] = slice(0, 1)
        restricted = values[tuple(index)]
        if not np.allclose(values, restricted, atol=1e-12, rtol=0.0):
            raise UnsupportedCaseError(f'{self.KIND} chart data varies along a periodic axis')
        for position in reversed(self.periodic_axes()):
            restricted = np.take(restricted, 0, axis=position)
        return restricted

    def check_axis_aligned(self) -> List[int]:
        """The coordinate axis each frame vector points along"""
        aligned = []
        for a in range(self.space.dim):
            nonzero = [mu for mu in range(self.space.dim) if np.any(self.frame[..., a, mu])]
            if len(nonzero) != 1:
                raise UnsupportedCaseError(f'Frame vector e_{a} is not aligned with a coordinate axis')
            aligned.append(nonzero[0])
        return aligned

    def coarsened(self) -> 'ChartModel':
        """The same chart on every other node of each non-periodic axis"""
        index = [slice(None)] * len(self.axes)
        axes = []
        for position, axis in enumerate(self.axes):
            if axis.periodic:
                axes.append(axis)
                continue
            index[position] = slice(None, None, 2)
            axes.append(Axis(axis.name, axis.nodes[::2], axis.periodic, axis.period))
        index = tuple(index)
        chart = ChartModel(
            self.space,
            axes,
            self.frame[index],
            self.gamma[index],
            self.coordinate_omega[index],
            dict(self.params, coarsened=True),
        )
        chart.KIND = self.KIND
        return chart

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(l={self.space.l}, grid={self.grid_shape})'
