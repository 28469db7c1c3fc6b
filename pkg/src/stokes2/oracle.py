"""Direct Nystrom solution of the characteristic Fredholm equation.

    E(k) L(k) + (q/2pi) int J(k, k1) E(k1) dk1 = 2 q u0 T1_abs(k)

is discretised on a symmetric grid and solved densely, giving a reference
for the Neumann series that does not depend on its convergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

from .errors import ConditioningError, ConfigError, NumericalError
from .grid import GridSpec, KGrid, fourier_weights, make_grid
from .inversion import VelocityProfile
from .kernels import DEFAULT_QUAD, ProblemParams, QuadratureSpec, coupling_matrix, eval_L, eval_T1_abs
from .neumann import kernel_tables

MIN_NODES = 64
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class NystromSystem:
    """Assembled and solved Nystrom system.

    Attributes
    ----------
    grid : KGrid
    params : ProblemParams
    matrix : ndarray
        ``L(k_i) delta_ij + (q/2pi) w_j J(k_i, k_j)``.
    rhs : ndarray
        ``2 q u0 T1_abs(k_i)``.
    solution : ndarray
        ``E(k_i)``.
    residual : float
        ``|A E - rhs|_inf / |rhs|_inf``.
    condition : float
        Estimated 1-norm condition number of ``matrix``.
    """

    grid: KGrid
    params: ProblemParams
    matrix: np.ndarray
    rhs: np.ndarray
    solution: np.ndarray
    residual: float
    condition: float
    quad: QuadratureSpec = DEFAULT_QUAD

    def evaluate(self, k) -> np.ndarray:
        """``E`` at arbitrary wavenumbers, by solving the equation itself for ``E(k)``."""
        k = np.atleast_1d(np.asarray(k, dtype=float))
        p = self.params
        tab = kernel_tables(p, self.grid, self.quad)
        t_k = eval_T1_abs(k, p, self.quad)
        J = coupling_matrix(k, self.grid.nodes, p, self.quad, tables=(t_k, tab.T1_abs))
        integral = J @ (self.grid.weights * self.solution)
        return (2.0 * p.q * p.u0 * t_k - p.q * integral / (2.0 * np.pi)) / eval_L(k, p, self.quad)


def solve_fredholm(params: ProblemParams, nodes_per_panel: int = 16, k_max: float = 40.0, *,
                   grid_spec: Optional[GridSpec] = None, quad: QuadratureSpec = DEFAULT_QUAD,
                   max_condition: float = 1e10) -> NystromSystem:
    """Assemble and solve the Nystrom system by LU with partial pivoting.

    Parameters
    ----------
    params : ProblemParams
    nodes_per_panel, k_max : optional
        Grid parameters (ignored when ``grid_spec`` is given).
    max_condition : float
        Largest acceptable condition estimate.

    Raises
    ------
    ConfigError
        If the grid has fewer than 64 nodes.
    ConditioningError
        If the condition estimate exceeds ``max_condition``.
    NumericalError
        If the relative residual exceeds ``1e-10``.
    """
    spec = grid_spec if grid_spec is not None else GridSpec(k_max=k_max, nodes_per_panel=nodes_per_panel)
    grid = make_grid(spec)
    if grid.size < MIN_NODES:
        raise ConfigError(f"grid has {grid.size} nodes; at least {MIN_NODES} are required")
    tab = kernel_tables(params, grid, quad)
    q = params.q
    A = np.diag(tab.L.astype(complex)) + (q / (2.0 * np.pi)) * tab.J * grid.weights[None, :]
    rhs = 2.0 * q * params.u0 * tab.T1_abs
    lu, piv = lu_factor(A)
    anorm = float(np.max(np.sum(np.abs(A), axis=0)))
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    condition = float("inf") if rcond == 0 else 1.0 / float(rcond)
    if info != 0 or condition > max_condition:
        raise ConditioningError(
            f"Nystrom matrix condition estimate {condition:.3e} exceeds {max_condition:.1e}",
            achieved=condition,
        )
    E = lu_solve((lu, piv), rhs)
    scale = float(np.max(np.abs(rhs)))
    residual = float(np.max(np.abs(A @ E - rhs)) / scale) if scale > 0 else float(np.max(np.abs(A @ E)))
    if residual > RESIDUAL_TOL:
        raise NumericalError(f"Nystrom residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}", achieved=residual)
    for arr in (A, rhs, E):
        arr.flags.writeable = False
    return NystromSystem(grid, params, A, rhs, E, residual, condition, quad)


def oracle_velocity(system: NystromSystem, x_grid) -> VelocityProfile:
    """``U(x) = (1/4pi) int exp(i k x) E(k) dk``; negative ``x`` gives the even continuation."""
    x = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if not np.all(np.isfinite(x)):
        raise ConfigError("positions must be finite")
    F = fourier_weights(system.grid, x)
    U = F @ system.solution / (4.0 * np.pi)
    p = system.params
    meta = {"omega1": p.omega1, "q": p.q, "u0": p.u0, "orders": "nystrom"}
    return VelocityProfile(x, U, U.real / p.u0, meta)
