"""
Log-infinitely divisible cascades.

The log-layer rho is an R^2-valued independently scattered infinitely
divisible random measure with control measure Lambda = Leb x dr/r^2 and
Levy exponent

    psi(xi) = i<xi|a> - Q(xi)/2 + sum_x pi(x) (e^{i<xi|x>} - 1 - i<xi|x> 1_{|x|<=1}),

extended to complex xi through the bilinear form <xi|x> = xi_1 x_1 + xi_2 x_2.
"""

import math
from typing import NamedTuple, Sequence

import numpy as np

from src.cascades.cone_cascade import ConeCascade
from src.cascades.streams import StreamPurpose, derive_stream
from src.exceptions import ExtensionDomainError
from src.models.cascade import LogInfDivisibleModel

XI0 = (-1j, 1.0 + 0j)


def check_extension_domain(model: LogInfDivisibleModel, xi: Sequence[complex]) -> None:
    """Finite atomic jump measures put every xi in the domain; overflow does not."""
    xi = np.asarray(xi, dtype=complex)
    for atom in model.jumps:
        exponent = -float(np.dot(xi.imag, atom.x))
        if exponent > 700.0:
            raise ExtensionDomainError(f"e^(i<xi|x>) overflows at xi={tuple(xi)}, x={atom.x}")


def levy_exponent(model: LogInfDivisibleModel, xi: Sequence[complex]) -> complex:
    """Unnormalized psi(xi)."""
    check_extension_domain(model, xi)
    xi = np.asarray(xi, dtype=complex)
    drift = np.asarray(model.drift, dtype=float)
    gaussian = np.asarray(model.gaussian, dtype=float)

    value = 1j * np.dot(xi, drift) - 0.5 * (xi @ gaussian @ xi)
    for atom in model.jumps:
        x = np.asarray(atom.x, dtype=float)
        dot = np.dot(xi, x)
        small = 1.0 if math.hypot(*atom.x) <= 1.0 else 0.0
        value += atom.mass * (np.exp(1j * dot) - 1.0 - 1j * dot * small)

    value = complex(value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ExtensionDomainError(f"psi is not finite at xi={tuple(xi)}")
    return value


def normalization_drift(model: LogInfDivisibleModel) -> np.ndarray:
    """Real drift d per unit of Lambda with i<xi0|d> = -psi(xi0)."""
    value = levy_exponent(model, XI0)
    return np.array([-value.real, -value.imag])


def normalized_levy_exponent(model: LogInfDivisibleModel, xi: Sequence[complex]) -> complex:
    """psi~(xi) = psi(xi) + i<xi|d>, so that psi~(xi0) = 0."""
    xi_array = np.asarray(xi, dtype=complex)
    return levy_exponent(model, xi) + complex(1j * np.dot(xi_array, normalization_drift(model)))


def moment_exponent(model: LogInfDivisibleModel, p: float) -> float:
    """psi~(-ip, 0), the exponent of E e^{p rho_1(B)} = exp(Lambda(B) psi~(-ip, 0))."""
    return normalized_levy_exponent(model, (-1j * p, 0.0)).real


class LogIDLevel(NamedTuple):
    centres: np.ndarray
    r_mid: np.ndarray
    cell_measure: np.ndarray
    prefix: np.ndarray


class LogIDCascade(ConeCascade):
    """P_n(t) = exp(rho_1(DeltaC_n(t)) + i rho_2(DeltaC_n(t))).

    The level-n band is cut into m_cells geometric sub-bands in r and cells
    of width b^-n / m_cells in t'. A cone collects the cells whose centre
    (t'_c, r_c) it contains, r_c being the sub-band midpoint.
    """

    family = "log_infinitely_divisible"

    def __init__(self, model: LogInfDivisibleModel, seed: int, replica: int = 0, depth=None):
        super().__init__(model, seed, replica, depth)
        self.m_cells = model.m_cells
        self.drift = np.asarray(model.drift, dtype=float)
        self.shift = normalization_drift(model)
        gaussian = np.asarray(model.gaussian, dtype=float)
        eigenvalues, eigenvectors = np.linalg.eigh(gaussian)
        self.gaussian_root = eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))
        self.compensator = np.zeros(2)
        for atom in model.jumps:
            if math.hypot(*atom.x) <= 1.0:
                self.compensator += atom.mass * np.asarray(atom.x, dtype=float)

    def _layout(self, n: int):
        m = self.m_cells
        scale = float(self.b) ** (-n)
        edges = scale * float(self.b) ** (np.arange(m + 1) / m)
        r_mid = (edges[:-1] + edges[1:]) / 2.0
        width = scale / m
        count = int(math.ceil(self.strip_length / width))
        centres = self.strip[0] + (np.arange(count) + 0.5) * width
        # Lambda(cell) = width * delta * (1/lo - 1/hi), delta = 1
        cell_measure = width * (1.0 / edges[:-1] - 1.0 / edges[1:])
        return centres, r_mid, cell_measure

    def _sample_level(self, n: int) -> LogIDLevel:
        rng = derive_stream(self.seed, StreamPurpose.LOGID_CELLS, self.replica, n)
        centres, r_mid, cell_measure = self._layout(n)
        shape = (self.m_cells, len(centres))
        measure = cell_measure[:, None, None]

        rho = np.broadcast_to((self.drift - self.compensator + self.shift) * measure, shape + (2,)).copy()
        rho += (rng.standard_normal(shape + (2,)) @ self.gaussian_root.T) * np.sqrt(measure)
        for atom in self.model.jumps:
            counts = rng.poisson(atom.mass * np.broadcast_to(cell_measure[:, None], shape))
            rho += counts[..., None] * np.asarray(atom.x, dtype=float)

        prefix = np.concatenate([np.zeros((self.m_cells, 1, 2)), np.cumsum(rho, axis=1)], axis=1)
        return LogIDLevel(centres=centres, r_mid=r_mid, cell_measure=cell_measure, prefix=prefix)

    def _cell_ranges(self, ts: np.ndarray, n: int):
        level = self.level(n)
        for e in range(self.m_cells):
            half = self.beta * level.r_mid[e] / 2.0
            start = np.searchsorted(level.centres, ts - half, side="left")
            end = np.searchsorted(level.centres, ts + half, side="left")
            yield e, start, end

    def cone_rho(self, ts: np.ndarray, n: int) -> np.ndarray:
        """rho(DeltaC_n(t)) for each t, shape (len(ts), 2)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        self._check_location(ts)
        level = self.level(n)
        rho = np.zeros((len(ts), 2))
        for e, start, end in self._cell_ranges(ts, n):
            rho += level.prefix[e, end] - level.prefix[e, start]
        return rho

    def covered_measure(self, t: float, n: int) -> float:
        """Lambda of the cells standing in for DeltaC_n(t)."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        self._check_location(ts)
        level = self.level(n)
        return float(sum(level.cell_measure[e] * (end - start)[0] for e, start, end in self._cell_ranges(ts, n)))

    def eval_P(self, t: float, n: int) -> complex:
        rho = self.cone_rho([t], n)[0]
        return complex(np.exp(rho[0] + 1j * rho[1]))

    def P_on_grid(self, ts: np.ndarray, n: int) -> np.ndarray:
        rho = self.cone_rho(ts, n)
        return np.exp(rho[:, 0] + 1j * rho[:, 1])

    def log_moment_rate(self, p: float) -> float:
        return moment_exponent(self.model, p)
