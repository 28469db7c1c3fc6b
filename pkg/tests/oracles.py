"""Reference values computed independently of the package's quadrature.

Closed forms use the Faddeeva function ``w`` and the exponential integral
``E1``; brute-force values use scipy's adaptive quadrature.
"""

import numpy as np
from scipy.integrate import quad
from scipy.special import exp1, wofz

SQRT_PI = np.sqrt(np.pi)


def z0_of(omega1):
    return 1.0 - 1j * omega1


def cauchy(zeta):
    """``int exp(-t^2) / (t - zeta) dt`` for ``Im zeta != 0``."""
    zeta = complex(zeta)
    if zeta.imag > 0:
        return 1j * np.pi * wofz(zeta)
    return -1j * np.pi * wofz(-zeta)


def L_closed(k, omega1):
    z0 = z0_of(omega1)
    if k == 0:
        return 1.0 - 1.0 / z0
    zeta = 1j * z0 / k
    # 1/(z0 + i k t) = 1/(i k (t - zeta))
    return 1.0 - cauchy(zeta) / (1j * k * SQRT_PI)


def _exp_e1(a):
    """``exp(a) E1(a)``; asymptotic series where ``exp(a)`` would overflow."""
    if abs(a) < 300:
        return np.exp(a) * exp1(a)
    term, total = 1.0 / a, 0.0j
    for n in range(1, 40):
        total += term
        term *= -n / a
    return total


def T1_abs_closed(k, omega1):
    z0 = z0_of(omega1)
    if k == 0:
        return 1.0 / (SQRT_PI * z0)
    a = z0**2 / k**2
    return z0 / (k**2 * SQRT_PI) * _exp_e1(a)


def T_closed(n, k, omega1):
    """Loses about ``log10(|z0/k|^2)`` digits to cancellation; use for ``|z0/k| <= 10``."""
    z0 = z0_of(omega1)
    if k == 0:
        return 0.0j if n == 1 else 1.0 / (2.0 * z0)
    zeta = 1j * z0 / k
    m1 = SQRT_PI + zeta * cauchy(zeta)  # int t exp(-t^2)/(t - zeta)
    if n == 1:
        return m1 / (1j * k * SQRT_PI)
    return zeta * m1 / (1j * k * SQRT_PI)


def J_closed(k, k1, omega1):
    """Partial fractions in ``t`` reduce ``J`` to two ``T1_abs`` values."""
    z0 = z0_of(omega1)
    if k == k1:
        raise ValueError("use J_quad on the diagonal")
    return (k * T1_abs_closed(k, omega1) - k1 * T1_abs_closed(k1, omega1)) / (z0 * (k - k1))


def lambda_closed(z, omega1):
    return z0_of(omega1) + z / SQRT_PI * cauchy(z)


def E0_closed(k, omega1):
    return T1_abs_closed(k, omega1) / L_closed(k, omega1)


def complex_quad(f, a, b, points=None, **kw):
    """Adaptive quadrature of a complex integrand on ``[a, b]``."""
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=400)
    opts.update(kw)
    if points is not None:
        opts["points"] = points
    re = quad(lambda t: f(t).real, a, b, **opts)[0]
    im = quad(lambda t: f(t).imag, a, b, **opts)[0]
    return re + 1j * im


def gaussian_quad(g, poles=()):
    """``(1/sqrt(pi)) int exp(-t^2) g(t) dt`` over ``[-9, 9]`` split at pole projections."""
    pts = sorted({float(p) for p in poles if -9 < p < 9})
    edges = [-9.0] + pts + [9.0]
    total = 0.0j
    for a, b in zip(edges[:-1], edges[1:]):
        total += complex_quad(lambda t: np.exp(-t * t) * g(t), a, b)
    return total / SQRT_PI


def _proj(k, omega1):
    # real part of the pole i z0 / k of 1/(z0 + i k t)
    return [] if k == 0 else [(1j * z0_of(omega1) / k).real]


def L_quad(k, omega1):
    z0 = z0_of(omega1)
    return 1.0 - gaussian_quad(lambda t: 1.0 / (z0 + 1j * k * t), _proj(k, omega1))


def T_quad(n, k, omega1):
    z0 = z0_of(omega1)
    return gaussian_quad(lambda t: t**n / (z0 + 1j * k * t), _proj(k, omega1) + [0.0])


def T1_abs_quad(k, omega1):
    z0 = z0_of(omega1)
    return gaussian_quad(lambda t: abs(t) / (z0 + 1j * k * t), _proj(k, omega1) + [0.0])


def J_quad(k, k1, omega1):
    z0 = z0_of(omega1)
    return gaussian_quad(lambda t: abs(t) / ((z0 + 1j * k * t) * (z0 + 1j * k1 * t)),
                         _proj(k, omega1) + _proj(k1, omega1) + [0.0])


def E1_at_zero(omega1):
    """``E_1(0) = -(1/(2 pi L(0))) int J(0, k1) E_0(k1) dk1`` with ``J(0, k1) = T1_abs(k1)/z0``.

    The integrand is even and decays like ``log(k)^2/k^4``; integrated on
    ``[0, inf)`` with breakpoints.
    """
    z0 = z0_of(omega1)

    def f(k1):
        return T1_abs_closed(k1, omega1) * E0_closed(k1, omega1) / z0

    edges = [0.0, 0.25, 1.0, 4.0, 16.0, 64.0, 256.0, 1024.0]
    total = sum(complex_quad(f, a, b) for a, b in zip(edges[:-1], edges[1:]))
    total += complex_quad(f, edges[-1], np.inf)
    return -2.0 * total / (2.0 * np.pi * L_closed(0.0, omega1))


def hf_quad(x, omega1):
    """``(1/sqrt(pi)) int_0^inf exp(-t^2 + i x omega1 / t) dt`` on the real axis.

    ``[1, inf)`` directly; ``(0, 1]`` via ``t = 1/s`` as a Fourier integral
    over ``s in [1, inf)`` (QAWF).
    """
    a = x * omega1

    def head(fn):
        return quad(lambda t: np.exp(-t * t) * fn(a / t), 1.0, np.inf, epsabs=1e-15)[0]

    def g(s):
        return np.exp(-1.0 / s**2) / s**2

    if a == 0:
        return (head(np.cos) + quad(g, 1.0, np.inf, epsabs=1e-15)[0]) / SQRT_PI
    c = quad(g, 1.0, np.inf, weight="cos", wvar=a, epsabs=1e-15)[0]
    s = quad(g, 1.0, np.inf, weight="sin", wvar=a, epsabs=1e-15)[0]
    return (head(np.cos) + c + 1j * (head(np.sin) + s)) / SQRT_PI


_K_EDGES = [0.0, 0.25, 1.0, 4.0, 16.0, 64.0, 256.0, 1024.0]


def _line_integral(f, extra=()):
    """``int_{-inf}^{inf} f(k) dk`` for a smooth, algebraically decaying ``f``."""
    pos = sorted(set(_K_EDGES) | {abs(e) for e in extra})
    edges = [-e for e in pos[:0:-1]] + pos
    total = sum(complex_quad(f, a, b) for a, b in zip(edges[:-1], edges[1:]))
    total += complex_quad(f, edges[-1], np.inf) + complex_quad(f, -np.inf, edges[0])
    return total


def E1_at(k, omega1):
    """``E_1(k) = -(1/(2 pi L(k))) int J(k, k1) E_0(k1) dk1`` from closed-form kernels."""
    def f(k1):
        if k1 == k:
            k1 = k1 * (1 + 1e-12) + 1e-300
        return J_closed(k, k1, omega1) * E0_closed(k1, omega1)
    return -_line_integral(f, extra=(k,)) / (2.0 * np.pi * L_closed(k, omega1))


def c1_at(mu, omega1):
    """``c_1(mu) = -(1/2pi) int E_0(k1) / (z0 + i k1 mu) dk1``."""
    z0 = z0_of(omega1)
    return -_line_integral(lambda k1: E0_closed(k1, omega1) / (z0 + 1j * k1 * mu)) / (2.0 * np.pi)
