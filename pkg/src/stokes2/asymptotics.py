"""High-frequency limit of the mass velocity.

For ``omega1 >> 1`` the dispersion factor ``L(k)`` is close to 1 and the
order-0 velocity reduces to

    U(x) / u0 = (q / sqrt(pi)) int_0^inf exp(-t^2 + i x omega1 / t) dt,

so the wall value is ``U(0) = q u0 / 2`` for every frequency.

On the real axis the integrand oscillates without bound as ``t -> 0``.
Rotating the path to ``t = r exp(-i pi/8)`` (the integrand is analytic and
decays in the sector ``-pi/4 < arg t < 0``) gives

    exp(-i pi/8) int_0^inf exp(-r^2 exp(-i pi/4) + i a exp(i pi/8) / r) dr,

with ``a = x omega1``, whose integrand decays like
``exp(-a sin(pi/8) / r)`` at 0 and like ``exp(-r^2 / sqrt(2))`` at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, QuadratureError
from .kernels import gauss_legendre

SQRT_PI = np.sqrt(np.pi)
_ROT = np.exp(-1j * np.pi / 8)
_PANELS = 48
_A_ZERO = 1e-18

FIG1_OMEGAS = (5.0, 6.0)
FIG2_QS = (1.0, 0.5, 0.2)
FIG2_OMEGA = 5.0


def _rotated_integral(a: np.ndarray, n: int) -> np.ndarray:
    """``int_0^inf exp(-t^2 + i a / t) dt`` along the rotated ray, ``n`` nodes per panel."""
    xg, wg = gauss_legendre(n)
    out = np.empty(a.shape, dtype=complex)
    for idx, ai in np.ndenumerate(a):
        # integrand peaks near r ~ a^(1/3); cover [0, r_hi] with geometric panels
        r_hi = 8.0 + 2.0 * np.cbrt(ai)
        if ai < _A_ZERO:
            # the exp(i a / t) factor then moves the result by < a log(1/a)
            ai = 0.0
        # below r_lo the factor exp(-a sin(pi/8) / r) is < exp(-45)
        r_lo = ai * np.sin(np.pi / 8) / 45.0 if ai > 0 else 1e-6
        n_pan = max(_PANELS, int(np.ceil(2.5 * np.log(r_hi / r_lo))))
        edges = np.concatenate([[0.0], np.geomspace(r_lo, r_hi, n_pan)])
        mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
        r = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        w = (half[:, None] * wg[None, :]).ravel()
        t = r * _ROT
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            f = np.exp(-t * t + 1j * ai / t)
        out[idx] = _ROT * np.sum(w * f)
    return out


def hf_velocity(x, q: float, omega1: float, tol: float = 1e-12):
    """``(q / sqrt(pi)) int_0^inf exp(-t^2 + i x omega1 / t) dt``.

    Parameters
    ----------
    x : float or array_like
        Positions, ``x >= 0``.
    q : float
        Diffuseness coefficient in ``[0, 1]``.
    omega1 : float
        Frequency, ``> 0``.
    tol : float
        Absolute tolerance on the integral, checked by doubling the rule.

    Returns
    -------
    complex or ndarray of complex

    Raises
    ------
    QuadratureError
        If the doubled rule changes the result by more than ``tol``.
    """
    if not (np.isfinite(q) and 0.0 <= q <= 1.0):
        raise ConfigError(f"q must satisfy 0 <= q <= 1, got {q}")
    if not (np.isfinite(omega1) and omega1 > 0):
        raise ConfigError(f"omega1 must be > 0, got {omega1}")
    if not tol > 0:
        raise ConfigError(f"tol must be > 0, got {tol}")
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)) or np.any(xa < 0):
        raise DomainError("x must be finite and >= 0")
    a = xa * omega1
    coarse = _rotated_integral(a, 16)
    fine = _rotated_integral(a, 32)
    err = float(np.max(np.abs(fine - coarse))) if a.size else 0.0
    if err > tol:
        raise QuadratureError(f"high-frequency integral: error estimate {err:.3e} > {tol:.1e}", achieved=err)
    out = q / SQRT_PI * fine
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class AsymptoticProfile:
    """High-frequency velocity profile ``w(x) = Re U(x) / u0``."""

    x: np.ndarray
    U: np.ndarray
    w: np.ndarray
    q: float
    omega1: float


def asymptotic_profile(x, q: float, omega1: float, tol: float = 1e-12) -> AsymptoticProfile:
    """Evaluate :func:`hf_velocity` on a grid of positions."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    U = np.atleast_1d(hf_velocity(x, q, omega1, tol))
    return AsymptoticProfile(x, U, U.real, float(q), float(omega1))


def figure_data(which: str, x=None, fig2_omega1: float = FIG2_OMEGA) -> dict:
    """Curves ``w(x)`` of the high-frequency profile.

    ``"fig1"``: ``q = 1`` at ``omega1 = 5`` and ``6``.
    ``"fig2"``: ``omega1 = fig2_omega1`` at ``q = 1, 0.5, 0.2``.

    Parameters
    ----------
    which : {"fig1", "fig2"}
    x : array_like, optional
        Positions; default 201 points on ``[0, 4]``.

    Returns
    -------
    dict
        Label -> :class:`AsymptoticProfile`, in plotting order.
    """
    x = np.linspace(0.0, 4.0, 201) if x is None else np.asarray(x, dtype=float)
    if which == "fig1":
        return {f"q=1 omega1={om:g}": asymptotic_profile(x, 1.0, om) for om in FIG1_OMEGAS}
    if which == "fig2":
        return {f"q={q:g} omega1={fig2_omega1:g}": asymptotic_profile(x, q, fig2_omega1) for q in FIG2_QS}
    raise ConfigError(f"unknown figure {which!r}; expected 'fig1' or 'fig2'")
