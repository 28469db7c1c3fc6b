"""Neumann series of the characteristic equation in powers of ``q``.

The spectral density of the mass velocity is expanded as

    E(k) = 2 u0 q [E_0(k) + q E_1(k) + q^2 E_2(k) + ...]

with ``E_0 = T1_abs / L`` and

    E_n(k) L(k) = -(1/2pi) int J(k, k1) E_{n-1}(k1) dk1,

discretised on a symmetric :class:`~stokes2.grid.KGrid` (Nystrom sums).
The distribution spectra are

    Phi_n(k, mu) (z0 + i k mu) = E_n(k) + |mu| c_n(mu),

with ``c_0 = 1`` and ``c_n(mu) = -(1/2pi) int E_{n-1}(k1) / (z0 + i k1 mu) dk1``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError, DegeneracyError, ResolutionError, SeriesDivergenceWarning
from .grid import GridSpec, KGrid, make_grid
from .kernels import (DEFAULT_QUAD, ProblemParams, QuadratureSpec, coupling_matrix,
                      eval_L, eval_T1_abs)

# |L| below this on the grid means omega1 is too close to the hydrodynamic limit
L_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class KernelTables:
    """Kernel values on a grid, shared by the series and the Nystrom oracle."""

    grid: KGrid
    L: np.ndarray
    T1_abs: np.ndarray
    J: np.ndarray

    @property
    def propagator(self) -> np.ndarray:
        """Matrix of ``E_{n-1} -> E_n``: ``-(w_j J_ij) / (2 pi L_i)``."""
        return _propagator(self)


@lru_cache(maxsize=8)
def _propagator(tables: KernelTables) -> np.ndarray:
    P = -(tables.J * tables.grid.weights[None, :]) / (2.0 * np.pi * tables.L[:, None])
    P.flags.writeable = False
    return P


@lru_cache(maxsize=8)
def _tables(omega1: float, spec: GridSpec, quad: QuadratureSpec) -> KernelTables:
    params = ProblemParams(omega1, 0.0)
    grid = make_grid(spec)
    k = grid.nodes
    L = eval_L(k, params, quad)
    T = eval_T1_abs(k, params, quad)
    small = np.abs(L) < L_FLOOR
    if small.any():
        i = int(np.argmax(small))
        raise DegeneracyError(
            f"|L(k)| = {abs(L[i]):.3e} < {L_FLOOR:.0e} at k = {k[i]:.6g}; omega1 = {omega1} "
            "is too close to the hydrodynamic limit",
            achieved=float(abs(L[i])),
        )
    J = coupling_matrix(k, k, params, quad, tables=(T, T))
    for arr in (L, T, J):
        arr.flags.writeable = False
    return KernelTables(grid, L, T, J)


def kernel_tables(params: ProblemParams, grid: KGrid, quad: QuadratureSpec = DEFAULT_QUAD) -> KernelTables:
    """Kernel values on ``grid`` (cached; kernels depend on ``omega1`` only)."""
    return _tables(float(params.omega1), grid.spec, quad)


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """A complex function of wavenumber sampled on a symmetric grid.

    ``parent`` is the previous Neumann term (``None`` for order 0); it lets
    :meth:`evaluate` extend the term to arbitrary wavenumbers through the
    recursion itself.
    """

    grid: KGrid
    values: np.ndarray
    order_index: int
    parent: Optional["SpectralDensity"] = field(default=None, repr=False)

    def __post_init__(self):
        if self.values.shape != self.grid.nodes.shape:
            raise ConfigError("values must align with the grid nodes")
        if not np.all(np.isfinite(self.values)):
            raise ConfigError("spectral density has non-finite values")
        if self.order_index < 0:
            raise ConfigError("order_index must be >= 0")

    @property
    def k(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def peak_norm(self, params: ProblemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
        """Sup-norm of the interpolant: the grid maximum refined between neighbouring nodes.

        Unlike :attr:`sup_norm` this does not depend on where the nodes fall.
        """
        mag = np.abs(self.values)
        i = int(np.argmax(mag))
        if mag[i] == 0:
            return 0.0
        k = self.grid.nodes
        lo, hi = k[max(i - 1, 0)], k[min(i + 1, k.size - 1)]
        res = minimize_scalar(lambda kk: -abs(self.evaluate([kk], params, quad)[0]), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-9 * max(1.0, abs(k[i]))})
        return float(max(-res.fun, mag[i]))

    def evenness_defect(self) -> float:
        """``max |v(k) - v(-k)| / max |v|`` (0 for an identically zero density)."""
        norm = self.sup_norm
        if norm == 0:
            return 0.0
        return float(np.max(np.abs(self.values - self.values[::-1])) / norm)

    def evaluate(self, k, params: ProblemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
        """Values at arbitrary wavenumbers (Nystrom interpolation)."""
        k = np.atleast_1d(np.asarray(k, dtype=float))
        L = eval_L(k, params, quad)
        if self.parent is None:
            return eval_T1_abs(k, params, quad) / L
        tab = kernel_tables(params, self.grid, quad)
        J = coupling_matrix(k, self.grid.nodes, params, quad,
                            tables=(eval_T1_abs(k, params, quad), tab.T1_abs))
        return -(J @ (self.grid.weights * self.parent.values)) / (2.0 * np.pi * L)


def zeroth_term(params: ProblemParams, k_grid: KGrid, quad: QuadratureSpec = DEFAULT_QUAD) -> SpectralDensity:
    """``E_0(k) = T1_abs(k) / L(k)`` on the grid.

    Raises
    ------
    DegeneracyError
        If ``|L|`` falls below ``1e-12`` at some node.
    """
    tab = kernel_tables(params, k_grid, quad)
    return SpectralDensity(k_grid, tab.T1_abs / tab.L, 0)


def next_term(prev: SpectralDensity, params: ProblemParams, quad: QuadratureSpec = DEFAULT_QUAD,
              grid_tol: Optional[float] = None) -> SpectralDensity:
    """Apply one step of the recursion to ``prev``.

    If ``grid_tol`` is given the step is repeated on a grid with doubled
    nodes per panel and the two results are compared at the coarse nodes;
    a relative discrepancy above ``grid_tol`` raises :class:`ResolutionError`.
    """
    grid = prev.grid
    tab = kernel_tables(params, grid, quad)
    values = tab.propagator @ prev.values
    if grid_tol is not None:
        fine = make_grid(grid.spec.refined())
        prev_fine = prev.evaluate(fine.nodes, params, quad)
        ftab = kernel_tables(params, fine, quad)
        J = coupling_matrix(grid.nodes, fine.nodes, params, quad, tables=(tab.T1_abs, ftab.T1_abs))
        values_fine = -(J @ (fine.weights * prev_fine)) / (2.0 * np.pi * tab.L)
        scale = max(float(np.max(np.abs(values_fine))), 1e-300)
        defect = float(np.max(np.abs(values - values_fine))) / scale
        if defect > grid_tol:
            raise ResolutionError(
                f"order {prev.order_index + 1}: doubling the grid changes the term by "
                f"{defect:.3e} (relative) > {grid_tol:.1e}",
                achieved=defect,
            )
    return SpectralDensity(grid, values, prev.order_index + 1, prev)


@dataclass(frozen=True, eq=False)
class SeriesSolution:
    """Neumann terms ``E_0 .. E_N`` with convergence metadata.

    Attributes
    ----------
    params : ProblemParams
    terms : tuple of SpectralDensity
    term_norms : ndarray
        Sup-norm of each ``E_n`` (see :meth:`SpectralDensity.peak_norm`).
    truncation_order : int
        Index ``N`` of the last retained term.
    ratios : ndarray
        ``term_norms[n+1] / term_norms[n]``; the last entry estimates the
        norm of the iteration operator.
    converged : bool
        Whether ``q**N * term_norms[N] <= series_tol * term_norms[0]``.
    """

    params: ProblemParams
    terms: tuple
    term_norms: np.ndarray
    truncation_order: int
    ratios: np.ndarray
    converged: bool
    series_tol: float
    quad: QuadratureSpec = DEFAULT_QUAD

    @property
    def grid(self) -> KGrid:
        return self.terms[0].grid

    @property
    def rho(self) -> float:
        return float(self.ratios[-1]) if self.ratios.size else float("nan")

    def spectral_density(self) -> np.ndarray:
        """Partial sum ``2 u0 q sum_n q^n E_n`` on the grid."""
        p = self.params
        total = np.zeros(self.grid.size, dtype=complex)
        for n, term in enumerate(self.terms):
            total += p.q**n * term.values
        return 2.0 * p.u0 * p.q * total


def build_series(params: ProblemParams, N: int, k_max: float = 40.0, grid_density: int = 16,
                 series_tol: float = 1e-6, *, quad: QuadratureSpec = DEFAULT_QUAD,
                 grid_spec: Optional[GridSpec] = None, grid_tol: Optional[float] = None,
                 tail_tol: float = 1e-6) -> SeriesSolution:
    """Build Neumann terms up to order ``N``.

    Construction stops at the first order ``M <= N`` with
    ``q**M * |E_M| <= series_tol * |E_0|`` (sup-norms); pass
    ``series_tol=0`` to always build all ``N`` orders.

    Parameters
    ----------
    grid_density : int
        Gauss-Legendre nodes per panel (ignored when ``grid_spec`` is given).
    grid_tol : float, optional
        Run the grid-doubling check of :func:`next_term` at every order.
    tail_tol : float
        Required decay of ``|E_0|`` at the outermost node relative to its maximum.

    Warns
    -----
    SeriesDivergenceWarning
        If the series terms ``q**n |E_n|`` have not started to decay after
        five orders.
    """
    if N < 0:
        raise ConfigError(f"N must be >= 0, got {N}")
    if series_tol < 0:
        raise ConfigError(f"series_tol must be >= 0, got {series_tol}")
    spec = grid_spec if grid_spec is not None else GridSpec(k_max=k_max, nodes_per_panel=grid_density)
    grid = make_grid(spec)
    q = params.q
    terms = [zeroth_term(params, grid, quad)]
    norms = [terms[0].peak_norm(params, quad)]
    edge = max(abs(terms[0].values[0]), abs(terms[0].values[-1]))
    if edge > tail_tol * norms[0]:
        raise ResolutionError(
            f"|E_0| at the grid edge is {edge / norms[0]:.3e} of its maximum (> {tail_tol:.1e}); "
            "extend the grid",
            achieved=edge / norms[0],
        )
    converged = N == 0
    warned = False
    for n in range(1, N + 1):
        terms.append(next_term(terms[-1], params, quad, grid_tol))
        norms.append(terms[-1].peak_norm(params, quad))
        if q**n * norms[n] <= series_tol * norms[0]:
            converged = True
            break
        if n >= 5 and not warned and q * norms[n] >= norms[n - 1]:
            history = ", ".join(f"{norms[i + 1] / norms[i]:.4g}" for i in range(n))
            warnings.warn(
                f"Neumann terms are not decaying (q * ratio >= 1); ratio history: {history}",
                SeriesDivergenceWarning,
                stacklevel=2,
            )
            warned = True
    norms = np.asarray(norms)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = norms[1:] / norms[:-1]
    return SeriesSolution(params, tuple(terms), norms, len(terms) - 1, ratios, converged, series_tol, quad)


def boundary_moment(values: np.ndarray, grid: KGrid, mu, params: ProblemParams) -> np.ndarray:
    """``(1/2pi) int E(k) / (z0 + i k mu) dk`` for each ``mu`` (grid quadrature)."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    z0 = params.z0
    k, w = grid.nodes, grid.weights
    kern = 1.0 / (z0 + 1j * mu[:, None] * k[None, :])
    return kern @ (w * values) / (2.0 * np.pi)


def source_coefficient(n: int, series: SeriesSolution, mu) -> np.ndarray:
    """Coefficient ``c_n(mu)`` of ``|mu|`` in the equation for ``Phi_n``."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if n == 0:
        return np.ones(mu.shape, dtype=complex)
    prev = series.terms[n - 1]
    return -boundary_moment(prev.values, prev.grid, mu, series.params)


def phi_term(n: int, series: SeriesSolution, k, mu, params: Optional[ProblemParams] = None,
             quad: Optional[QuadratureSpec] = None):
    """Distribution spectrum ``Phi_n(k, mu)``; ``k`` and ``mu`` broadcast."""
    if not 0 <= n <= series.truncation_order:
        raise ConfigError(f"order {n} not available (truncation order {series.truncation_order})")
    params = params or series.params
    quad = quad or series.quad
    k, mu = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(mu, dtype=float))
    shape = k.shape
    kf, muf = k.ravel(), mu.ravel()
    uk, k_inv = np.unique(kf, return_inverse=True)
    umu, mu_inv = np.unique(muf, return_inverse=True)
    En = series.terms[n].evaluate(uk, params, quad)[k_inv]
    cn = source_coefficient(n, series, umu)[mu_inv]
    out = (En + np.abs(muf) * cn) / (params.z0 + 1j * kf * muf)
    out = out.reshape(shape)
    return complex(out) if out.ndim == 0 else out
