"""Return from wavenumber space to the half-space ``x >= 0``.

Mass velocity: ``U_n(x) = (1/2pi) int exp(i k x) E_n(k) dk`` and
``U(x) = q u0 sum_n q^n U_n(x)``.

Distribution function: ``h_n(x, mu) = (1/pi) int exp(i k x) Phi_n(k, mu) dk``.
The ``|mu| c_n(mu) / (z0 + i k mu)`` part of ``Phi_n`` decays only like
``1/k`` and carries the jump of ``h`` across the wall; it is inverted by
residues,

    (1/2pi) int exp(i k x) / (z0 + i k mu) dk = exp(-x z0 / mu) / mu   (mu > 0)
                                               = 0                     (mu < 0)

for ``x > 0``.  Values at ``x = 0`` are the limits from the gas side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError
from .grid import GridSpec, fourier_weights, grid_from_edges, make_grid, refine_edges
from .kernels import ProblemParams, gauss_legendre
from .neumann import SeriesSolution, source_coefficient

SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True, eq=False)
class VelocityProfile:
    """Complex mass-velocity amplitude on a grid of positions.

    ``w = Re(U) / u0`` is the normalised in-phase velocity.  ``per_order``
    (optional) holds ``U_n(x)`` row by row.
    """

    x: np.ndarray
    U: np.ndarray
    w: np.ndarray
    meta: dict = field(default_factory=dict)
    per_order: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class DistributionSlice:
    """``h(x, mu)`` at one position for a set of velocity projections."""

    x: float
    mu_grid: np.ndarray
    h: np.ndarray
    mu_weights: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)


def gauss_hermite_mu(n: int):
    """Nodes and weights for ``int exp(-mu^2) f(mu) dmu``."""
    if n < 1:
        raise ConfigError(f"need at least one Gauss-Hermite node, got {n}")
    return np.polynomial.hermite.hermgauss(n)


def maxwell_mu_rule(nodes_per_panel: int = 16, panels: int = 40, mu_min: float = 1e-4,
                    mu_max: float = 6.5):
    """Nodes and weights for ``int exp(-mu^2) f(mu) dmu`` with ``f`` broken at ``mu = 0``.

    On each half-line a Gauss-Legendre panel ``[0, mu_min]`` is followed by
    ``panels`` geometrically growing panels up to ``mu_max``.  Unlike
    Gauss-Hermite, the rule integrates ``h(x, mu)`` accurately although
    ``h`` jumps (``x = 0``) or carries ``exp(-x z0 / mu)`` (``x > 0``) for
    ``mu > 0`` only.

    Returns
    -------
    mu, weights : ndarray
        Sorted nodes, symmetric about 0; ``weights`` include ``exp(-mu^2)``.
    """
    if nodes_per_panel < 2 or panels < 1:
        raise ConfigError("need nodes_per_panel >= 2 and panels >= 1")
    if not 0 < mu_min < mu_max:
        raise ConfigError(f"need 0 < mu_min < mu_max, got {mu_min}, {mu_max}")
    edges = np.concatenate([[0.0], np.geomspace(mu_min, mu_max, panels + 1)])
    xg, wg = gauss_legendre(nodes_per_panel)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
    mu = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel() * np.exp(-mu**2)
    return np.concatenate([-mu[::-1], mu]), np.concatenate([w[::-1], w])


def _x_array(x_grid) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if not np.all(np.isfinite(x)):
        raise DomainError("positions must be finite")
    return x


def velocity_term(n: int, series: SeriesSolution, x_grid) -> np.ndarray:
    """``U_n(x) = (1/2pi) int exp(i k x) E_n(k) dk`` at each position."""
    if not 0 <= n <= series.truncation_order:
        raise ConfigError(f"order {n} not available (truncation order {series.truncation_order})")
    x = _x_array(x_grid)
    F = fourier_weights(series.grid, x)
    return F @ series.terms[n].values / (2.0 * np.pi)


def total_velocity(series: SeriesSolution, x_grid, orders: Optional[int] = None) -> VelocityProfile:
    """Sum the velocity series through ``orders`` (default: all available)."""
    p = series.params
    N = series.truncation_order if orders is None else orders
    if not 0 <= N <= series.truncation_order:
        raise ConfigError(f"order {N} not available (truncation order {series.truncation_order})")
    x = _x_array(x_grid)
    F = fourier_weights(series.grid, x)
    E = np.stack([t.values for t in series.terms[:N + 1]], axis=1)
    Un = (F @ E / (2.0 * np.pi)).T
    coeff = p.q * p.u0 * p.q ** np.arange(N + 1)
    U = coeff @ Un
    meta = {"omega1": p.omega1, "q": p.q, "u0": p.u0, "orders": N}
    return VelocityProfile(x, U, U.real / p.u0, meta, Un)


def _slice_terms(series: SeriesSolution, x: float, mu: np.ndarray, N: int) -> np.ndarray:
    """``h_n(x, mu)`` for ``n = 0..N`` (shape (N+1, len(mu)))."""
    p = series.params
    z0 = p.z0
    grid = series.grid
    k = grid.nodes
    F = fourier_weights(grid, [x])[0]
    resolvent = 1.0 / (z0 + 1j * mu[:, None] * k[None, :])
    out = np.empty((N + 1, mu.size), dtype=complex)
    pos = mu > 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        decay = np.where(pos, np.exp(-x * z0 / np.where(pos, mu, 1.0)), 0.0)
    for n in range(N + 1):
        smooth = (resolvent * series.terms[n].values[None, :]) @ F / np.pi
        jump = 2.0 * source_coefficient(n, series, mu) * decay
        out[n] = smooth + jump
    return out


def distribution_slice(series: SeriesSolution, x: float, mu_grid, params: Optional[ProblemParams] = None,
                       quad=None, *, mu_weights=None, orders: Optional[int] = None) -> DistributionSlice:
    """``h(x, mu) = q u0 sum_n q^n h_n(x, mu)`` for ``x >= 0``.

    ``params`` and ``quad`` default to those of ``series``; ``quad`` is
    accepted for interface symmetry (no kernel quadrature is needed here).
    Pass Gauss-Hermite ``mu_weights`` to enable :func:`slice_velocity`.
    """
    p = params or series.params
    if p != series.params:
        raise ConfigError("params differ from those the series was built with")
    x = float(x)
    if not (np.isfinite(x) and x >= 0):
        raise DomainError(f"x must be >= 0 (gas side), got {x}")
    mu = np.atleast_1d(np.asarray(mu_grid, dtype=float))
    N = series.truncation_order if orders is None else orders
    if not 0 <= N <= series.truncation_order:
        raise ConfigError(f"order {N} not available (truncation order {series.truncation_order})")
    hn = _slice_terms(series, x, mu, N)
    h = (p.q * p.u0 * p.q ** np.arange(N + 1)) @ hn
    weights = None if mu_weights is None else np.asarray(mu_weights, dtype=float)
    if weights is not None and weights.shape != mu.shape:
        raise ConfigError("mu_weights must align with mu_grid")
    meta = {"omega1": p.omega1, "q": p.q, "u0": p.u0, "orders": N}
    return DistributionSlice(x, mu, h, weights, meta)


def slice_velocity(dslice: DistributionSlice) -> complex:
    """Velocity moment ``(1/(2 sqrt(pi))) int exp(-mu^2) h(x, mu) dmu`` of a slice."""
    if dslice.mu_weights is None:
        raise ConfigError("slice has no quadrature weights; build it on Gauss-Hermite nodes")
    return complex(np.sum(dslice.mu_weights * dslice.h) / (2.0 * SQRT_PI))


def boundary_residual(series: SeriesSolution, mu, orders: Optional[int] = None) -> np.ndarray:
    """``h(0+, mu) - (1 - q) h(0+, -mu) - 2 q u0`` for ``mu > 0``."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if np.any(mu <= 0):
        raise DomainError("the wall condition applies to mu > 0")
    p = series.params
    both = distribution_slice(series, 0.0, np.concatenate([mu, -mu]), orders=orders).h
    out, back = both[:mu.size], both[mu.size:]
    return out - (1.0 - p.q) * back - 2.0 * p.q * p.u0


_RESIDUE_GRID = GridSpec(k_max=64.0, nodes_per_panel=20, k_first=1.0 / 64.0, width_cap=4.0,
                         tail_ratio=2.0, tail_panels=40)


def residue_check(t: float, x: float, params: ProblemParams):
    """Compare ``(1/2pi i) int exp(i k x) / (z0 + i k t) dk`` with its residue.

    The integrand decays like ``1/k``.  Pairing ``k`` with ``-k`` gives
    ``[2 z0 cos(kx) + 2 k t sin(kx)] / (z0^2 + k^2 t^2)``.  The slowly decaying
    odd part is regularised by subtracting ``k t sin(kx) / (c^2 + k^2 t^2)``
    with real ``c = |z0|``, whose integral ``(pi / 2t) exp(-c x / |t|)`` is
    elementary; what remains decays like ``k^-3`` and is integrated with
    Filon weights.  ``x = 0`` is taken as ``0+``.

    Returns
    -------
    numeric, closed_form : complex
    """
    t = float(t)
    x = float(x)
    if t == 0 or not np.isfinite(t):
        raise DomainError("t must be finite and nonzero")
    if x < 0 or not np.isfinite(x):
        raise DomainError("x must be >= 0")
    z0 = params.z0
    c = abs(z0)
    # place the features at k ~ |z0|/|t| inside the fine part of the grid and
    # resolve the near-pole of 1/(z0^2 + k^2 t^2) at k = omega1/|t|
    scale = c / abs(t)
    base = make_grid(_RESIDUE_GRID)
    pos_edges = base.edges[base.edges >= 0]
    grid = grid_from_edges(refine_edges(pos_edges, params.omega1 / c, 1.0 / c), base.n_per_panel)
    pos = grid.nodes > 0
    kp = grid.nodes[pos] * scale
    F = fourier_weights(grid, [x * scale], tail=False)[0][pos] * scale
    cos_w, sin_w = F.real, F.imag
    den = z0**2 + kp**2 * t**2
    den_c = c**2 + kp**2 * t**2
    even_part = 2.0 * z0 * np.sum(cos_w / den)
    odd_reg = (np.pi / t) * np.exp(-c * x / abs(t))
    odd_rem = 2.0 * np.sum(sin_w * kp * t * (c**2 - z0**2) / (den * den_c))
    numeric = (even_part + odd_reg + odd_rem) / (2j * np.pi)
    closed = np.exp(-x * z0 / t) / (1j * t) if t > 0 else 0.0 + 0.0j
    return complex(numeric), complex(closed)
