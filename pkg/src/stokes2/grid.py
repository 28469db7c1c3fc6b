"""Symmetric wavenumber grids and Fourier-inversion weights.

The grid is a composite Gauss-Legendre rule on ``[-k_far, k_far]``.  On
``[0, k_max]`` panels double in width away from ``k = 0`` (capped at
``width_cap``); beyond ``k_max`` they grow geometrically by ``tail_ratio``
up to ``k_far``.  Spectral densities decay like ``(A log k + B)/k**2``, so
the geometric tail carries the Fredholm integrals to negligible truncation
and the inversion adds the integral of that fitted form beyond ``k_far``.

Oscillatory integrals ``int exp(i k x) v(k) dk`` use a Legendre-Filon rule:
``v`` is interpolated on each panel by its Legendre expansion through the
Gauss nodes, and ``int_{-1}^{1} P_m(u) exp(i b u) du = 2 i^m j_m(b)`` is used
exactly, so panel widths need not resolve the oscillation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import eval_legendre, sici, spherical_jn

from .errors import ConfigError
from .kernels import gauss_legendre


@dataclass(frozen=True)
class GridSpec:
    """Construction parameters of a :class:`KGrid` (hashable cache key)."""

    k_max: float = 40.0
    nodes_per_panel: int = 16
    k_first: float = 1.0 / 16.0
    width_cap: float = 4.0
    tail_ratio: float = 2.0
    tail_panels: int = 20

    def __post_init__(self):
        if not self.k_max > self.k_first > 0:
            raise ConfigError(f"need k_max > k_first > 0, got k_max={self.k_max}, k_first={self.k_first}")
        if self.nodes_per_panel < 4:
            raise ConfigError(f"nodes_per_panel must be >= 4, got {self.nodes_per_panel}")
        if not self.width_cap > 0:
            raise ConfigError(f"width_cap must be > 0, got {self.width_cap}")
        if self.tail_panels < 0 or (self.tail_panels and not self.tail_ratio > 1):
            raise ConfigError("tail_panels must be >= 0 and tail_ratio > 1")

    def refined(self) -> "GridSpec":
        """Same panels with twice the nodes per panel."""
        return GridSpec(self.k_max, 2 * self.nodes_per_panel, self.k_first,
                        self.width_cap, self.tail_ratio, self.tail_panels)


def _positive_edges(spec: GridSpec) -> np.ndarray:
    edges = [0.0]
    e = spec.k_first
    while e < spec.k_max:
        edges.append(e)
        e *= 2.0
    edges.append(spec.k_max)
    fine = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        n_sub = max(1, int(np.ceil((b - a) / spec.width_cap - 1e-12)))
        fine.extend(np.linspace(a, b, n_sub + 1)[1:])
    far = spec.k_max * spec.tail_ratio ** np.arange(1, spec.tail_panels + 1)
    return np.concatenate([fine, far])


@dataclass(frozen=True, eq=False)
class KGrid:
    """Composite Gauss-Legendre rule, symmetric about ``k = 0``.

    Attributes
    ----------
    nodes, weights : ndarray
        Strictly increasing nodes and their weights; ``nodes[::-1] == -nodes``.
    edges : ndarray
        Panel boundaries (increasing, from ``-k_far`` to ``k_far``).
    spec : GridSpec
    """

    nodes: np.ndarray
    weights: np.ndarray
    edges: np.ndarray
    n_per_panel: int
    spec: Optional[GridSpec] = None

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def k_far(self) -> float:
        return float(self.edges[-1])

    def mirror_index(self) -> np.ndarray:
        """Index ``j`` with ``nodes[j] == -nodes[i]``."""
        return np.arange(self.size)[::-1]


@lru_cache(maxsize=32)
def make_grid(spec: GridSpec = GridSpec()) -> KGrid:
    """Symmetric grid described by ``spec`` (cached)."""
    return grid_from_edges(_positive_edges(spec), spec.nodes_per_panel, spec)


def grid_from_edges(positive_edges, n: int, spec: Optional[GridSpec] = None) -> KGrid:
    """Symmetric composite rule from increasing panel edges on ``[0, K]``."""
    pos = np.unique(np.asarray(positive_edges, dtype=float))
    if pos[0] != 0.0 or pos.size < 2:
        raise ConfigError("positive edges must start at 0 and contain at least one panel")
    edges = np.concatenate([-pos[:0:-1], pos])
    xg, wg = gauss_legendre(n)
    a, b = edges[:-1], edges[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    # enforce exact mirror symmetry against rounding in the affine map
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    for arr in (nodes, weights, edges):
        arr.flags.writeable = False
    return KGrid(nodes, weights, edges, n, spec)


@lru_cache(maxsize=None)
def _legendre_projector(n: int) -> np.ndarray:
    """Matrix mapping Gauss-node values to Legendre coefficients (n x n)."""
    xg, wg = gauss_legendre(n)
    m = np.arange(n)
    P = eval_legendre(m[:, None], xg[None, :])
    return (m[:, None] + 0.5) * P * wg[None, :]


def _tail_integrals(K: float, x: np.ndarray) -> np.ndarray:
    """``int_K^inf exp(i k x) / k**2 dk`` for real ``x`` (vectorised).

    Small ``y = K |x|`` uses Si/Ci; large ``y`` uses the integration-by-parts
    series ``(i / (x K^2)) exp(iKx) sum_n (n+1)! (-i / (x K))^n``, which avoids
    the cancellation of the Si/Ci form.
    """
    ax = np.abs(x)
    y = K * ax
    out = np.empty(x.shape, dtype=complex)
    # below y ~ 1e-200 the x-dependent terms are beneath double precision
    zero = y < 1e-200
    out[zero] = 1.0 / K
    small = ~zero & (y < 60.0)
    if small.any():
        si, ci = sici(y[small])
        c = np.cos(y[small]) / K - ax[small] * (0.5 * np.pi - si)
        s = np.sin(y[small]) / K - ax[small] * ci
        out[small] = c + 1j * np.sign(x[small]) * s
    large = y >= 60.0
    if large.any():
        xl = x[large]
        r = -1j / (xl * K)
        term = np.ones(xl.shape, dtype=complex)
        total = np.zeros(xl.shape, dtype=complex)
        for n in range(30):
            total += term
            term = term * (n + 2) * r
        out[large] = 1j / (xl * K * K) * np.exp(1j * K * xl) * total
    return out


@lru_cache(maxsize=None)
def _log_series_coeffs(n: int) -> np.ndarray:
    """``f^(m)(1)`` for ``f(s) = log(s) / s**2``, ``m = 0..n-1`` (Leibniz rule)."""
    from math import comb, factorial
    out = np.zeros(n)
    for m in range(1, n):
        out[m] = sum(comb(m, j) * (-1) ** (j - 1) * factorial(j - 1) * (-1) ** (m - j) * factorial(m - j + 1)
                     for j in range(1, m + 1))
    return out


@lru_cache(maxsize=None)
def _rotated_rule():
    # tau = exp(u) on u in [-20, 40]; covers the decay of log(1 + i tau)/(1 + i tau)^2 at both ends
    edges = np.linspace(-20.0, 40.0, 41)
    xg, wg = gauss_legendre(20)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
    u = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    tau = np.exp(u)
    g = np.log1p(1j * tau) / (1.0 + 1j * tau) ** 2 * tau * w
    return tau, g


def _log_moment(y: np.ndarray) -> np.ndarray:
    """``G(y) = int_1^inf exp(i y s) log(s) / s**2 ds`` for ``y >= 0``.

    ``G(0) = 1``; moderate ``y`` rotates the path to ``s = 1 + i tau``; large
    ``y`` uses ``-exp(iy) sum_m (-1)^m f^(m)(1) / (iy)^(m+1)``.
    """
    out = np.empty(y.shape, dtype=complex)
    out[y == 0] = 1.0
    mid = (y > 0) & (y < 60.0)
    if mid.any():
        tau, g = _rotated_rule()
        ym = y[mid]
        out[mid] = 1j * np.exp(1j * ym) * (np.exp(-np.outer(ym, tau)) @ g)
    big = y >= 60.0
    if big.any():
        yb = y[big]
        c = _log_series_coeffs(30)
        total = np.zeros(yb.shape, dtype=complex)
        for m in range(1, 30):
            total += (-1) ** m * c[m] / (1j * yb) ** (m + 1)
        out[big] = -np.exp(1j * yb) * total
    return out


def _tail_log_integrals(K: float, x: np.ndarray) -> np.ndarray:
    """``int_K^inf exp(i k x) log(k/K) / k**2 dk`` for real ``x``."""
    G = _log_moment(K * np.abs(x))
    return np.where(x < 0, np.conj(G), G) / K


def refine_edges(edges, center: float, width: float, levels: Optional[int] = None) -> np.ndarray:
    """Add edges ``center +- width * 2**j`` (``j < levels``) inside ``[edges[0], edges[-1]]``.

    Resolves a near-pole of relative width ``width / center`` at ``center``.
    By default the levels reach out to a distance of about ``center``.
    """
    edges = np.asarray(edges, dtype=float)
    if levels is None:
        levels = max(1, int(np.ceil(np.log2(max(center / width, 1.0)))) + 1)
    lo, hi = edges[0], edges[-1]
    extra = center + width * np.concatenate([[0.0], 2.0 ** np.arange(levels), -(2.0 ** np.arange(levels))])
    extra = extra[(extra > lo) & (extra < hi)]
    merged = np.unique(np.concatenate([edges, extra]))
    # drop slivers left next to an original edge
    gap = np.diff(merged) > 1e-9 * np.maximum(np.abs(merged[1:]), 1e-300)
    keep = np.concatenate([[True], gap])
    keep[-1] = True
    if not gap[-1]:
        keep[-2] = False
    return merged[keep]


def fourier_weights(grid: KGrid, x, tail: bool = True) -> np.ndarray:
    """Weights ``F`` with ``int exp(i k x) v(k) dk ~= F @ v(grid.nodes)``.

    Parameters
    ----------
    grid : KGrid
    x : array_like
        Real positions (any sign).
    tail : bool
        Add the contribution of ``|k| > k_far`` modelled as
        ``(A log|k| + B) / k**2``, the decay of all spectral densities here,
        with ``A, B`` fitted at the outermost node and the first node of the
        outermost panel on each side.

    Returns
    -------
    F : complex ndarray, shape (len(x), grid.size)
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = grid.n_per_panel
    Q = _legendre_projector(n)
    m = np.arange(n)
    phase_m = 2.0 * (1j ** m)
    a, b = grid.edges[:-1], grid.edges[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    n_pan = mid.size
    beta = half[None, :] * x[:, None]
    ab = np.abs(beta)
    sgn = np.where(beta < 0, -1.0, 1.0)
    # j_m(-b) = (-1)^m j_m(b)
    jm = spherical_jn(m[None, None, :], ab[:, :, None]) * sgn[:, :, None] ** m[None, None, :]
    G = half[None, :, None] * np.exp(1j * mid[None, :] * x[:, None])[:, :, None] * phase_m * jm
    F = np.einsum("xpm,mi->xpi", G, Q).reshape(x.size, n_pan * n)
    if tail:
        K = grid.k_far
        k2 = grid.nodes[-1]
        k1 = grid.nodes[-n]
        delta = np.log(k2 / k1)
        for sign, i2, i1 in ((1.0, -1, -n), (-1.0, 0, n - 1)):
            xs = sign * x
            I0 = _tail_integrals(K, xs)
            # int_K^inf exp(ikx) log(k/k2) / k^2 dk
            D = np.log(K / k2) * I0 + _tail_log_integrals(K, xs)
            F[:, i2] += k2**2 * (I0 + D / delta)
            F[:, i1] -= k1**2 * D / delta
    return F
