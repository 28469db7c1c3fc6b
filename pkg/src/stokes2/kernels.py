"""Complex kernel functions of the characteristic equation.

Every kernel here is a Gaussian-weighted integral over the molecular
velocity projection ``t`` with a factor ``1 / (z0 + i k t)``.  For real
``k != 0`` that factor has a pole at ``t = i z0 / k``, a distance ``1/|k|``
from the real axis, so for large ``|k|`` the integrand is sharply peaked.
The quadrature below folds the integrand onto ``[0, t_cutoff]`` (which
also removes the kink of ``|t|`` and the cancellation between the two
half-lines), splits between pole projections and applies a sinh map
centred on the nearest pole in each piece, followed by composite
Gauss-Legendre in the mapped variable.  The error is estimated by
comparison with a half-order rule.

Notation
--------
``z0 = 1 - i*omega1``.  ``L(k)``, ``T_n(k)``, ``T1_abs(k)``, ``J(k, k1)`` and
``lambda(z)`` are defined in the docstrings of the ``eval_*`` functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DomainError, QuadratureError

SQRT_PI = np.sqrt(np.pi)

# entries evaluated together; bounds the size of the (entries x nodes) buffers
_CHUNK = 2048


@dataclass(frozen=True)
class ProblemParams:
    """Dimensionless problem parameters.

    Parameters
    ----------
    omega1 : float
        Wall oscillation frequency in units of the collision frequency.
    q : float
        Diffuseness (accommodation) coefficient, ``0 <= q <= 1``.
    u0 : float
        Wall velocity amplitude.
    """

    omega1: float
    q: float
    u0: float = 1.0

    def __post_init__(self):
        for name in ("omega1", "q", "u0"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}")
        if not self.omega1 > 0:
            raise ConfigError(f"omega1 must be > 0, got {self.omega1}")
        if not 0.0 <= self.q <= 1.0:
            raise ConfigError(f"q must satisfy 0 <= q <= 1, got {self.q}")
        if not self.u0 > 0:
            raise ConfigError(f"u0 must be > 0, got {self.u0}")

    @property
    def z0(self) -> complex:
        return complex(1.0, -self.omega1)


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the velocity-axis quadrature."""

    t_cutoff: float = 7.0
    nodes_per_panel: int = 32
    rel_tol: float = 1e-10
    max_panels: int = 64

    def __post_init__(self):
        if not self.t_cutoff >= 6.0:
            raise ConfigError(f"t_cutoff must be >= 6, got {self.t_cutoff}")
        if not self.rel_tol > 0:
            raise ConfigError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.nodes_per_panel < 4:
            raise ConfigError(f"nodes_per_panel must be >= 4, got {self.nodes_per_panel}")
        if self.max_panels < 2:
            raise ConfigError(f"max_panels must be >= 2, got {self.max_panels}")


DEFAULT_QUAD = QuadratureSpec()


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Gauss-Legendre nodes and weights on [-1, 1] (cached, read-only)."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def _pole(k, z0):
    """Pole ``i z0 / k`` of ``1/(z0 + i k t)``; ``nan`` where ``k == 0``."""
    k = np.asarray(k, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        p = 1j * z0 / k
    return np.where(k == 0, np.nan + 0j, p)


def _piece_rule(lo, hi, poles, m, n):
    """Nodes/weights of a sinh-mapped composite rule on ``[lo, hi]``.

    ``lo``, ``hi`` have shape (S,), ``poles`` shape (S, P).  Returns ``t`` and
    ``w`` of shape (S, m*n).
    """
    re, im = poles.real, poles.imag
    finite = np.isfinite(re) & np.isfinite(im)
    a_all = np.clip(np.where(finite, re, 0.0), lo[:, None], hi[:, None])
    dist = np.where(finite, np.abs(poles - a_all), np.inf)
    best = np.argmin(dist, axis=1)
    rows = np.arange(lo.size)
    a = a_all[rows, best]
    d = dist[rows, best]
    no_pole = ~np.isfinite(d)
    # without a nearby pole the map is effectively linear
    a = np.where(no_pole, 0.5 * (lo + hi), a)
    d = np.where(no_pole, 1e8, np.maximum(d, 1e-300))
    u_lo = np.arcsinh((lo - a) / d)
    u_hi = np.arcsinh((hi - a) / d)
    xg, wg = gauss_legendre(n)
    edges = u_lo[:, None] + (u_hi - u_lo)[:, None] * np.linspace(0.0, 1.0, m + 1)[None, :]
    mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
    half = 0.5 * (edges[:, 1:] - edges[:, :-1])
    u = mid[:, :, None] + half[:, :, None] * xg[None, None, :]
    t = a[:, None, None] + d[:, None, None] * np.sinh(u)
    w = half[:, :, None] * wg[None, None, :] * d[:, None, None] * np.cosh(u)
    return t.reshape(lo.size, -1), w.reshape(lo.size, -1)


def _fold(poles):
    """Reflect poles into the right half-plane (the integrand is folded onto t >= 0)."""
    return np.where(poles.real < 0, -poles, poles)


def _breaks(poles, cutoff):
    """Piece boundaries on [0, cutoff]: ends plus midpoints between pole projections."""
    S, P = poles.shape
    pts = [np.zeros(S), np.full(S, cutoff)]
    re = poles.real
    for i in range(P):
        for j in range(i + 1, P):
            mid = 0.5 * (re[:, i] + re[:, j])
            mid = np.where(np.isfinite(mid), mid, 0.0)
            pts.append(np.clip(mid, 0.0, cutoff))
    return np.sort(np.stack(pts, axis=1), axis=1)


def _rule(poles, cutoff, m, n):
    B = _breaks(poles, cutoff)
    ts, ws = [], []
    for j in range(B.shape[1] - 1):
        t, w = _piece_rule(B[:, j], B[:, j + 1], poles, m, n)
        ts.append(t)
        ws.append(w)
    return np.concatenate(ts, axis=1), np.concatenate(ws, axis=1)


def gaussian_integral(integrand, poles, quad: QuadratureSpec = DEFAULT_QUAD, folded: bool = False):
    """Compute ``(1/sqrt(pi)) * int exp(-t^2) * integrand(t, idx) dt``.

    Parameters
    ----------
    integrand : callable
        ``integrand(t, idx)`` receives node array ``t`` of shape (s, N) and the
        integer indices (s,) of the entries being evaluated; returns complex
        values of shape (s, N).
    poles : complex array, shape (S, P)
        Singularities of the integrand in the complex ``t`` plane, used to
        place nodes.  ``nan`` marks an absent pole.
    folded : bool
        ``integrand`` already returns ``f(t) + f(-t)`` (lets callers avoid
        cancellation in odd integrands).

    Returns
    -------
    values : complex array, shape (S,)

    Raises
    ------
    QuadratureError
        If an entry does not reach ``quad.rel_tol`` within ``quad.max_panels``.
    """
    poles = _fold(np.atleast_2d(np.asarray(poles, dtype=complex)))
    S = poles.shape[0]
    n_hi = quad.nodes_per_panel
    n_lo = max(n_hi // 2, 2)
    n_pieces = _breaks(poles[:1], quad.t_cutoff).shape[1] - 1
    out = np.empty(S, dtype=complex)
    pending = np.arange(S)
    m = 2
    worst = 0.0
    while pending.size:
        if m * n_pieces > quad.max_panels:
            raise QuadratureError(
                f"kernel quadrature did not converge with {quad.max_panels} panels; "
                f"estimated relative error {worst:.3e} > {quad.rel_tol:.1e}",
                achieved=worst,
            )
        still = []
        for start in range(0, pending.size, _CHUNK):
            idx = pending[start:start + _CHUNK]
            p = poles[idx]
            vals = []
            for n in (n_hi, n_lo):
                t, w = _rule(p, quad.t_cutoff, m, n)
                f = integrand(t, idx) if folded else integrand(t, idx) + integrand(-t, idx)
                f = f * np.exp(-t * t)
                vals.append((np.sum(w * f, axis=1), np.sum(w * np.abs(f), axis=1)))
            (I_hi, scale), (I_lo, _) = vals
            err = np.abs(I_hi - I_lo)
            # the absolute floor only matters for subnormal results
            ok = err <= np.maximum(np.maximum(quad.rel_tol * np.abs(I_hi), 1e-15 * scale), 1e-290)
            out[idx] = I_hi / SQRT_PI
            if not ok.all():
                bad = ~ok
                rel = err[bad] / np.maximum(np.abs(I_hi[bad]), 1e-300)
                worst = max(worst, float(rel.max()))
                still.append(idx[bad])
        pending = np.concatenate(still) if still else np.empty(0, dtype=int)
        m *= 2
    return out


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("wavenumbers must be finite")
    return arr


def _finish(values, shape):
    values = values.reshape(shape)
    return complex(values) if values.ndim == 0 else values


def eval_L(k, params: ProblemParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """Dispersion factor ``L(k) = 1 - (1/sqrt(pi)) int exp(-t^2) / (z0 + i k t) dt``.

    Even in ``k``; ``L(0) = -i*omega1/z0``.  Accepts scalars or arrays.
    """
    k = _as_array(k)
    z0 = params.z0
    kf = k.ravel()

    def g(t, idx):
        return 2.0 * z0 / (z0 * z0 + (kf[idx, None] * t) ** 2)

    vals = 1.0 - gaussian_integral(g, _pole(kf, z0)[:, None], quad, folded=True)
    return _finish(vals, k.shape)


def eval_T(n: int, k, params: ProblemParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """Moment ``T_n(k) = (1/sqrt(pi)) int exp(-t^2) t^n / (z0 + i k t) dt`` for n in {1, 2}."""
    if n not in (1, 2):
        raise DomainError(f"T_n is implemented for n in {{1, 2}}, got {n}")
    k = _as_array(k)
    z0 = params.z0
    kf = k.ravel()

    # t^n [1/(z0 + ikt) + (-1)^n/(z0 - ikt)] without cancellation
    def g(t, idx):
        kt = kf[idx, None] * t
        den = z0 * z0 + kt * kt
        return 2.0 * t * t * (-1j * kf[idx, None] if n == 1 else z0) / den

    return _finish(gaussian_integral(g, _pole(kf, z0)[:, None], quad, folded=True), k.shape)


def eval_T1_abs(k, params: ProblemParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """Source moment ``(1/sqrt(pi)) int exp(-t^2) |t| / (z0 + i k t) dt``; even in ``k``."""
    k = _as_array(k)
    z0 = params.z0
    kf = k.ravel()

    def g(t, idx):
        return 2.0 * z0 * np.abs(t) / (z0 * z0 + (kf[idx, None] * t) ** 2)

    return _finish(gaussian_integral(g, _pole(kf, z0)[:, None], quad, folded=True), k.shape)


def eval_J(k, k1, params: ProblemParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """Coupling kernel ``(1/sqrt(pi)) int exp(-t^2) |t| / ((z0 + i k t)(z0 + i k1 t)) dt``.

    Symmetric in its arguments and invariant under ``(k, k1) -> (-k, -k1)``.
    ``k`` and ``k1`` broadcast against each other.
    """
    k, k1 = np.broadcast_arrays(_as_array(k), _as_array(k1))
    shape = k.shape
    z0 = params.z0
    kf, k1f = k.ravel(), k1.ravel()
    poles = np.stack([_pole(kf, z0), _pole(k1f, z0)], axis=1)

    def g(t, idx):
        return np.abs(t) / ((z0 + 1j * kf[idx, None] * t) * (z0 + 1j * k1f[idx, None] * t))

    return _finish(gaussian_integral(g, poles, quad), shape)


def eval_lambda(z, params: ProblemParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """Dispersion function ``lambda(z) = z0 + (z/sqrt(pi)) int exp(-t^2) / (t - z) dt``.

    Defined off the real axis; ``lambda(-z0/(i k)) / z0 == L(k)``.

    Raises
    ------
    DomainError
        If any ``z`` is real (the cut of the Cauchy integral).
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag == 0):
        raise DomainError("lambda(z) is undefined on the real axis (continuous-spectrum cut)")
    if not np.all(np.isfinite(z)):
        raise DomainError("z must be finite")
    zf = z.ravel()

    def g(t, idx):
        return 1.0 / (t - zf[idx, None])

    integral = gaussian_integral(g, zf[:, None], quad)
    vals = params.z0 + zf * integral
    return _finish(vals, z.shape)


def kernel_table(k, params: ProblemParams, quad: QuadratureSpec = DEFAULT_QUAD):
    """``L``, ``T1_abs`` and the diagonal ``J(k, k)`` at the wavenumbers ``k``."""
    k = np.asarray(k, dtype=float)
    return eval_L(k, params, quad), eval_T1_abs(k, params, quad), eval_J(k, k, params, quad)


def coupling_matrix(k_out, k_in, params: ProblemParams, quad: QuadratureSpec = DEFAULT_QUAD,
                    tables=None):
    """Matrix ``J(k_out[i], k_in[j])``.

    Uses the partial-fraction identity
    ``J(k, k1) = (k T1_abs(k) - k1 T1_abs(k1)) / (z0 (k - k1))``
    so only one-dimensional moments are needed; pairs closer than
    ``1e-4 * max(1, |k|)`` fall back to direct quadrature.

    ``tables`` may supply precomputed ``(T1_abs(k_out), T1_abs(k_in))``.
    """
    k_out = np.asarray(k_out, dtype=float)
    k_in = np.asarray(k_in, dtype=float)
    z0 = params.z0
    if tables is None:
        t_out = eval_T1_abs(k_out, params, quad)
        t_in = eval_T1_abs(k_in, params, quad)
    else:
        t_out, t_in = tables
    f_out = k_out * np.asarray(t_out)
    f_in = k_in * np.asarray(t_in)
    dk = k_out[:, None] - k_in[None, :]
    close = np.abs(dk) < 1e-4 * np.maximum(1.0, np.abs(k_out)[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        J = (f_out[:, None] - f_in[None, :]) / (z0 * dk)
    if close.any():
        i, j = np.nonzero(close)
        J[i, j] = eval_J(k_out[i], k_in[j], params, quad)
    return J
