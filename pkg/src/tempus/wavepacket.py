"""Spreading of a free Gaussian packet and its reversal by a stepwise phase kick.

Internal units: hbar = m = 1, lengths in units of the initial width sigma
unless stated otherwise. SI constants appear only in
:func:`spontaneous_reversal_time`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants, integrate, optimize, special

NORM_TOL = 1e-8
DEFAULT_POINTS = 2**14
SUPPORT_MASS = 1e-12
DEFAULT_EPSILON = 0.05
T_UNIVERSE = 4.3e17


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 2 or self.n_points & (self.n_points - 1):
            raise ValueError("n_points must be a power of two")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n_points, self.dx)


@dataclass(frozen=True)
class GridWavefunction:
    grid: Grid
    values: np.ndarray
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise ValueError("values do not match the grid")
        norm = float(np.sum(np.abs(v) ** 2) * self.grid.dx)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"wavefunction not normalized: {norm!r}")
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def phase(self) -> np.ndarray:
        return np.unwrap(np.angle(self.values))

    def phase_gradient(self) -> np.ndarray:
        """phi'(x) = Im(psi* psi') / |psi|^2 with a spectral derivative."""
        dpsi = np.fft.ifft(1j * self.grid.k * np.fft.fft(self.values))
        p = self.density
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.imag(self.values.conj() * dpsi) / p
        return np.where(p > 0, g, 0.0)

    def width(self) -> float:
        """sqrt(2 <(x - <x>)^2>), equal to sigma for exp(-x^2 / 2 sigma^2)."""
        p = self.density * self.grid.dx
        mean = np.sum(p * self.x)
        return math.sqrt(2 * np.sum(p * (self.x - mean) ** 2))

    def support(self, mass: float = SUPPORT_MASS) -> tuple[float, float]:
        """Smallest interval leaving at most ``mass`` of probability outside."""
        cum = np.cumsum(self.density) * self.grid.dx
        lo = int(np.searchsorted(cum, mass / 2))
        hi = int(np.searchsorted(cum, cum[-1] - mass / 2))
        x = self.x
        return float(x[max(lo - 1, 0)]), float(x[min(hi + 1, len(x) - 1)])

    def conj(self) -> "GridWavefunction":
        return GridWavefunction(self.grid, self.values.conj(), self.mass, self.hbar)

    def to_csv(self) -> str:
        rows = ["x,re,im,prob"]
        rows += [f"{x:.8g},{v.real:.10g},{v.imag:.10g},{p:.10g}" for x, v, p in zip(self.x, self.values, self.density)]
        return "\n".join(rows) + "\n"


# -- free evolution -----------------------------------------------------------

def spread_width(sigma: float, tau: float, hbar: float = 1.0, mass: float = 1.0) -> float:
    return sigma * math.sqrt(1 + (hbar * tau / (mass * sigma**2)) ** 2)


def default_grid(sigma: float, tau: float, n_points: int = DEFAULT_POINTS) -> Grid:
    half = 8 * max(sigma, spread_width(sigma, tau))
    return Grid(-half, half, n_points)


def gaussian_values(x, sigma: float, t: float, hbar: float = 1.0, mass: float = 1.0) -> np.ndarray:
    """Exact free evolution of (pi sigma^2)^{-1/4} exp(-x^2 / 2 sigma^2)."""
    z = 1 + 1j * hbar * t / (mass * sigma**2)
    return (math.pi * sigma**2) ** -0.25 * z**-0.5 * np.exp(-np.asarray(x) ** 2 / (2 * sigma**2 * z))


def evolve_gaussian(sigma: float, tau: float, grid: Grid | None = None) -> GridWavefunction:
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    grid = grid or default_grid(sigma, tau)
    w = spread_width(sigma, tau)
    half = min(-grid.x_min, grid.x_max)
    outside = float(special.erfc(half / w))
    if outside > 1e-6:
        raise ValueError(f"grid too small: {outside:.2e} of the probability lies outside")
    values = gaussian_values(grid.x, sigma, tau)
    # renormalize the discrete sum; the continuum norm is exactly one
    values = values / math.sqrt(np.sum(np.abs(values) ** 2) * grid.dx)
    return GridWavefunction(grid, values)


def free_evolve(psi: GridWavefunction, tau: float) -> GridWavefunction:
    """Exact free propagation of an arbitrary grid state, done in momentum space."""
    k = psi.grid.k
    phase = np.exp(-1j * psi.hbar * k**2 * tau / (2 * psi.mass))
    return GridWavefunction(psi.grid, np.fft.ifft(phase * np.fft.fft(psi.values)), psi.mass, psi.hbar)


def asymptotic_spread(x, sigma: float, tau: float) -> np.ndarray:
    """Large-time form f(x/tau) / sqrt(2 pi tau) e^{i x^2 / 2 tau}, f the momentum profile."""
    q = np.asarray(x) / tau
    f = (4 * math.pi * sigma**2) ** 0.25 * np.exp(-(q**2) * sigma**2 / 2)
    return f / np.sqrt(2j * math.pi * tau) * np.exp(1j * np.asarray(x) ** 2 / (2 * tau))


# -- partitions ---------------------------------------------------------------

@dataclass(frozen=True)
class PartitionPlan:
    cell_edges: np.ndarray
    cell_phases: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.cell_edges, dtype=float)
        phases = np.asarray(self.cell_phases, dtype=float)
        if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("cell edges must be strictly ascending")
        if phases.shape != (len(edges) - 1,):
            raise ValueError("need one phase per cell")
        object.__setattr__(self, "cell_edges", edges)
        object.__setattr__(self, "cell_phases", phases)

    @property
    def n_cells(self) -> int:
        return len(self.cell_phases)

    @property
    def centers(self) -> np.ndarray:
        return (self.cell_edges[1:] + self.cell_edges[:-1]) / 2

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.cell_edges)

    def cell_index(self, x) -> np.ndarray:
        return np.clip(np.searchsorted(self.cell_edges, x, side="right") - 1, 0, self.n_cells - 1)


def cell_density(psi: GridWavefunction) -> np.ndarray:
    """Optimal local cell density (|psi|^2 phi'^2)^{1/3}."""
    return np.cbrt(psi.density * psi.phase_gradient() ** 2)


def lambda_functional(psi: GridWavefunction) -> float:
    return float(integrate.trapezoid(cell_density(psi), psi.x))


def cell_count(epsilon: float, lambda_val: float, d: int = 1) -> float:
    """Minimal number of cells N_d = lambda (lambda / 3 eps)^{d/2}."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if int(d) != d or d < 1:
        raise ValueError("dimension must be a positive integer")
    return lambda_val * (lambda_val / (3 * epsilon)) ** (d / 2)


def gaussian_lambda(sigma: float, tau: float, d: int = 1) -> float:
    """lambda for an isotropic d-dimensional spread Gaussian by radial quadrature.

    Uses (|psi|^2 |grad phi|^2)^{d/(d+2)}, which reduces to the 1-D functional.
    """
    s = tau / sigma**2
    w2 = sigma**2 * (1 + s**2)
    grad2 = (s / (sigma**2 * (1 + s**2))) ** 2  # |grad phi|^2 = grad2 * r^2
    expo = d / (d + 2)
    shell = 2 * math.pi ** (d / 2) / special.gamma(d / 2)
    if d == 1:
        shell = 2.0  # both half-lines

    def integrand(r):
        p = (math.pi * w2) ** (-d / 2) * math.exp(-(r**2) / w2)
        return r ** (d - 1) * (p * grad2 * r**2) ** expo

    val, _ = integrate.quad(integrand, 0, 12 * math.sqrt(w2), limit=200, epsabs=0, epsrel=1e-11)
    return shell * val


def _phase_at(psi: GridWavefunction, points) -> np.ndarray:
    return np.interp(points, psi.x, psi.phase())


def partition_with_cells(psi: GridWavefunction, n_cells: int, layout: str = "optimal") -> PartitionPlan:
    """Partition the support into ``n_cells`` cells.

    ``optimal`` places edges at equal increments of the cumulative cell
    density; ``uniform`` uses equal widths.
    """
    if n_cells < 1:
        raise ValueError("need at least one cell")
    a, b = psi.support()
    if layout == "uniform":
        edges = np.linspace(a, b, n_cells + 1)
    elif layout == "optimal":
        x = psi.x
        inside = (x >= a) & (x <= b)
        xs = x[inside]
        dens = cell_density(psi)[inside]
        cum = np.concatenate(([0.0], integrate.cumulative_trapezoid(dens, xs)))
        if cum[-1] <= 0:
            edges = np.linspace(a, b, n_cells + 1)
        else:
            # a tiny uniform floor keeps the cumulative strictly increasing
            cum = cum / cum[-1] + 1e-12 * (xs - a) / (b - a)
            cum /= cum[-1]
            edges = np.interp(np.linspace(0, 1, n_cells + 1), cum, xs)
            edges[0], edges[-1] = a, b
    else:
        raise ValueError(f"unknown layout {layout!r}")
    edges = np.unique(edges)
    centers = (edges[1:] + edges[:-1]) / 2
    return PartitionPlan(edges, -2 * _phase_at(psi, centers))


def optimal_partition(psi: GridWavefunction, epsilon: float) -> PartitionPlan:
    """Fewest cells reaching conjugation error ``epsilon``: N = (lambda^3 / 3 eps)^{1/2}."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    n = max(1, int(round(cell_count(epsilon, lambda_functional(psi)))))
    return partition_with_cells(psi, n)


def stepwise_conjugate(psi: GridWavefunction, plan: PartitionPlan) -> GridWavefunction:
    """Multiply each cell by exp(i phi_n), phi_n = -2 phi(cell centre)."""
    a, b = psi.support()
    tol = 2 * psi.grid.dx
    if plan.cell_edges[0] > a + tol or plan.cell_edges[-1] < b - tol:
        raise ValueError("partition does not cover the wavefunction support")
    kick = plan.cell_phases[plan.cell_index(psi.x)]
    return GridWavefunction(psi.grid, psi.values * np.exp(1j * kick), psi.mass, psi.hbar)


def overlap_probability(a: GridWavefunction, b: GridWavefunction) -> float:
    if a.grid != b.grid:
        raise ValueError("wavefunctions live on different grids")
    return float(abs(np.sum(a.values.conj() * b.values) * a.grid.dx) ** 2)


def cell_increments(psi: GridWavefunction, plan: PartitionPlan) -> np.ndarray:
    """g(x_n) = phi'(x_n) dx_n at each cell centre."""
    grad = np.interp(plan.centers, psi.x, psi.phase_gradient())
    return grad * plan.widths


def overlap_approximation(psi: GridWavefunction, plan: PartitionPlan) -> float:
    """1 - (1/3) sum_n p(x_n) dx_n g(x_n)^2."""
    p = np.interp(plan.centers, psi.x, psi.density)
    g = cell_increments(psi, plan)
    return float(1 - np.sum(p * plan.widths * g**2) / 3)


@dataclass
class ReversalRun:
    initial: GridWavefunction
    spread: GridWavefunction
    kicked: GridWavefunction
    returned: GridWavefunction
    plan: PartitionPlan

    @property
    def overlap(self) -> float:
        return overlap_probability(self.initial.conj(), self.returned)

    def stages(self) -> dict[str, GridWavefunction]:
        return {"initial": self.initial, "spread": self.spread, "kicked": self.kicked, "returned": self.returned}


def reversal_run(sigma: float, tau: float, n_cells: int, layout: str = "optimal", grid: Grid | None = None) -> ReversalRun:
    """Spread for tau, apply an n-cell stepwise conjugation, spread for tau again.

    Free evolution is real, so a perfect conjugation returns psi(0)^*.
    """
    grid = grid or default_grid(sigma, tau)
    initial = evolve_gaussian(sigma, 0.0, grid)
    spread = evolve_gaussian(sigma, tau, grid)
    plan = partition_with_cells(spread, n_cells, layout)
    kicked = stepwise_conjugate(spread, plan)
    return ReversalRun(initial, spread, kicked, free_evolve(kicked, tau), plan)


def scan_cells(sigma: float, tau: float, cells, layout: str = "optimal") -> dict[int, float]:
    grid = default_grid(sigma, tau)
    return {int(n): reversal_run(sigma, tau, int(n), layout, grid).overlap for n in cells}


# -- spontaneous reversal -----------------------------------------------------

def spontaneous_reversal_time(
    t_universe: float = T_UNIVERSE, temperature: float = 2.72, epsilon: float = DEFAULT_EPSILON
) -> float:
    """Solve 2^{-N(tau)} = tau / t_U with N(tau) = eps^{-1/2} k_B T tau / hbar.

    Bisection on log(tau); the result is accurate to a relative 1e-9.
    """
    if t_universe <= 0 or temperature < 0 or not 0 < epsilon < 1:
        raise ValueError("need t_universe > 0, temperature >= 0 and 0 < epsilon < 1")
    rate = constants.k * temperature / constants.hbar / math.sqrt(epsilon)
    if rate == 0:
        return float(t_universe)
    log_tu = math.log(t_universe)

    def mismatch(log_tau):
        return -rate * math.exp(log_tau) * math.log(2) - (log_tau - log_tu)

    lo, hi = log_tu - 500.0, log_tu
    if not mismatch(lo) > 0 > mismatch(hi):
        raise ValueError("no root in the bracket")
    root = optimize.bisect(mismatch, lo, hi, xtol=1e-12, rtol=1e-15, maxiter=500)
    return math.exp(root)


def cells_at(tau: float, temperature: float, epsilon: float = DEFAULT_EPSILON) -> float:
    return constants.k * temperature * tau / constants.hbar / math.sqrt(epsilon)
