import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from stokes2 import (ConfigError, DomainError, GridSpec, ProblemParams, SpectralDensity,
                     boundary_residual, build_series, distribution_slice, gauss_hermite_mu,
                     hf_velocity, maxwell_mu_rule, residue_check, slice_velocity, total_velocity,
                     velocity_term)
from oracles import E0_closed, _line_integral
from stokes2.grid import fourier_weights
from stokes2.kernels import gauss_legendre
from stokes2.neumann import SeriesSolution


def _zero_series(p):
    s = build_series(p, 0)
    g = s.grid
    zero = SpectralDensity(g, np.zeros(g.size, complex), 0)
    return SeriesSolution(p, (zero,), np.zeros(1), 0, np.zeros(0), True, 0.0)


# ---------------------------------------------------------------- velocity

def test_zero_density_gives_zero_velocity(p_base):
    s = _zero_series(p_base)
    assert np.all(velocity_term(0, s, [0.0, 1.0, 3.0]) == 0)


def test_q_zero_profile_is_zero():
    s = build_series(ProblemParams(1.0, 0.0), 4)
    prof = total_velocity(s, np.linspace(0, 5, 11))
    assert np.all(prof.U == 0) and np.all(prof.w == 0)


def _log_tail_sum(g, E):
    # int over |k| > k_far of (A log k + B)/k^2, fitted at both ends independently
    n, K = g.n_per_panel, g.k_far
    total = 0.0
    for i2, i1 in ((-1, -n), (0, n - 1)):
        k2, k1 = abs(g.nodes[i2]), abs(g.nodes[i1])
        A = (E[i2] * k2**2 - E[i1] * k1**2) / np.log(k2 / k1)
        B = E[i2] * k2**2 - A * np.log(k2)
        total += (A * (np.log(K) + 1.0) + B) / K
    return total


def test_x_zero_matches_weighted_sum(series_base):
    g = series_base.grid
    assert_allclose(fourier_weights(g, [0.0], tail=False)[0], g.weights, rtol=1e-14)
    for n in (0, 3, 8):
        E = series_base.terms[n].values
        direct = (np.sum(g.weights * E) + _log_tail_sum(g, E)) / (2 * np.pi)
        assert_allclose(velocity_term(n, series_base, [0.0])[0], direct, rtol=1e-8)


def test_x_zero_whole_line_oracle(p_base):
    s = build_series(p_base, 0)
    ref = _line_integral(lambda k: E0_closed(k, 1.0)) / (2 * np.pi)
    assert_allclose(velocity_term(0, s, [0.0])[0], ref, rtol=1e-8)


def test_continuity_near_wall(series_base):
    x = np.array([0.0, 1e-9, 1e-7, 1e-5])
    U = total_velocity(series_base, x).U
    assert np.all(np.abs(np.diff(U)) < 1e-3 * abs(U[0]))


def test_total_is_weighted_sum_of_orders(series_base):
    x = np.array([0.0, 0.7, 2.0])
    prof = total_velocity(series_base, x)
    p = series_base.params
    manual = sum(p.q * p.u0 * p.q**n * velocity_term(n, series_base, x) for n in range(9))
    assert_allclose(prof.U, manual, rtol=1e-13)
    assert_allclose(prof.per_order[2], velocity_term(2, series_base, x), rtol=1e-13)
    assert_allclose(prof.w, prof.U.real / p.u0)


def test_profile_decays(series_base):
    prof = total_velocity(series_base, np.linspace(0, 10, 41))
    assert abs(prof.U[-1]) < abs(prof.U[0])


def test_order_zero_independent_of_q():
    x = np.linspace(0, 4, 9)
    a = build_series(ProblemParams(2.0, 0.2), 0)
    b = build_series(ProblemParams(2.0, 0.9), 0)
    ua = total_velocity(a, x).U / 0.2
    ub = total_velocity(b, x).U / 0.9
    assert_allclose(ua, ub, rtol=1e-13)


def test_forward_transform_recovers_spectrum(series_base):
    p = series_base.params
    edges = np.concatenate([[0.0], np.geomspace(0.01, 60.0, 60)])
    xg, wg = gauss_legendre(16)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * xg).ravel()
    w = (half[:, None] * wg).ravel()
    U = total_velocity(series_base, x).U
    for k in (0.1, 0.5, 1.0, 2.0, 5.0):
        # even extension: int U(x) exp(-ikx) dx = 2 int_0^inf U cos(kx) dx
        forward = 2 * np.sum(w * U * np.cos(k * x))
        spec = p.q * p.u0 * sum(p.q**n * t.evaluate([k], p)[0] for n, t in enumerate(series_base.terms))
        assert abs(forward - spec) <= 1e-3 * abs(spec)


def test_high_frequency_order_zero():
    p = ProblemParams(100.0, 1.0)
    s = build_series(p, 0)
    x = np.linspace(0, 0.05, 11)
    U = total_velocity(s, x).U
    ref = hf_velocity(x, 1.0, 100.0)
    assert np.max(np.abs(U - ref)) <= 2e-2 * np.max(np.abs(ref))


def test_wall_value_onset_of_high_frequency():
    s = build_series(ProblemParams(5.0, 1.0), 0)
    assert abs(total_velocity(s, [0.0]).w[0] - 0.5) <= 5e-2


def test_order_out_of_range(series_base):
    with pytest.raises(ConfigError):
        velocity_term(9, series_base, [0.0])
    with pytest.raises(ConfigError):
        total_velocity(series_base, [0.0], orders=12)


def test_nonfinite_positions(series_base):
    with pytest.raises(DomainError):
        total_velocity(series_base, [np.nan])


# ---------------------------------------------------------------- distribution

def test_q_zero_slice_is_zero():
    s = build_series(ProblemParams(1.0, 0.0), 2)
    sl = distribution_slice(s, 0.5, [-1.0, 0.3, 2.0])
    assert np.all(sl.h == 0)


@pytest.mark.parametrize("omega1, q", [(1.0, 0.5), (1.0, 0.3), (5.0, 0.5)])
def test_moment_consistency(omega1, q):
    s = build_series(ProblemParams(omega1, q), 8, series_tol=0)
    xs = [0.25, 0.5, 1.0, 1.5, 2.0]
    U = total_velocity(s, xs).U
    mu, w = maxwell_mu_rule()
    for x, u in zip(xs, U):
        moment = slice_velocity(distribution_slice(s, x, mu, mu_weights=w))
        assert abs(moment - u) <= 1e-5 * abs(u)


def test_moment_at_wall(series_base):
    mu, w = maxwell_mu_rule()
    u = total_velocity(series_base, [0.0]).U[0]
    moment = slice_velocity(distribution_slice(series_base, 0.0, mu, mu_weights=w))
    assert abs(moment - u) <= 1e-5 * abs(u)


def test_gauss_hermite_moment_is_rough(series_base):
    # h jumps across mu = 0 at the wall, so Gauss-Hermite converges slowly
    mu, w = gauss_hermite_mu(120)
    u = total_velocity(series_base, [0.5]).U[0]
    moment = slice_velocity(distribution_slice(series_base, 0.5, mu, mu_weights=w))
    assert 1e-5 < abs(moment - u) / abs(u) < 5e-2


def test_maxwell_rule_moments():
    mu, w = maxwell_mu_rule()
    assert_allclose(np.sum(w), np.sqrt(np.pi), rtol=1e-13)
    assert_allclose(np.sum(w * mu**2), np.sqrt(np.pi) / 2, rtol=1e-13)
    assert_allclose(np.sum(w[mu > 0] * mu[mu > 0]), 0.5, rtol=1e-13)


@pytest.mark.parametrize("q", [0.1, 0.3, 0.5])
def test_boundary_residual_decreases(q):
    s = build_series(ProblemParams(1.0, q), 8, series_tol=0)
    mu, _ = gauss_hermite_mu(40)
    mu = mu[mu > 0]
    res = [np.max(np.abs(boundary_residual(s, mu, orders=N))) for N in range(0, 9)]
    assert np.all(np.diff(res) < 0)
    assert res[-1] <= 1e-3 * 2 * q


def test_boundary_residual_rejects_nonpositive(series_base):
    with pytest.raises(DomainError):
        boundary_residual(series_base, [0.0, 1.0])


def test_slice_rejects_gas_outside(series_base):
    with pytest.raises(DomainError):
        distribution_slice(series_base, -0.1, [0.5])


def test_slice_param_mismatch(series_base):
    with pytest.raises(ConfigError):
        distribution_slice(series_base, 0.1, [0.5], params=ProblemParams(2.0, 0.5))


def test_slice_velocity_needs_weights(series_base):
    sl = distribution_slice(series_base, 0.1, [0.5, -0.5])
    with pytest.raises(ConfigError):
        slice_velocity(sl)
    with pytest.raises(ConfigError):
        distribution_slice(series_base, 0.1, [0.5, -0.5], mu_weights=[1.0])


def test_slice_far_from_wall_is_small(series_base):
    near = distribution_slice(series_base, 0.0, [0.5]).h[0]
    far = distribution_slice(series_base, 12.0, [0.5]).h[0]
    assert abs(far) < 1e-3 * abs(near)


# ---------------------------------------------------------------- residues

@pytest.mark.parametrize("t, x, omega1", [(1.0, 1.0, 1.0), (2.0, 0.5, 5.0)])
def test_residue_closed_form(t, x, omega1):
    num, closed = residue_check(t, x, ProblemParams(omega1, 0.5))
    z0 = 1 - 1j * omega1
    assert_allclose(closed, np.exp(-x * z0 / t) / (1j * t), rtol=1e-14)
    assert abs(num - closed) <= 1e-8


def test_residue_spec_value():
    num, closed = residue_check(1.0, 1.0, ProblemParams(1.0, 0.5))
    assert_allclose(closed, np.exp(-(1 - 1j)) / 1j, rtol=1e-14)


@pytest.mark.parametrize("t, x", [(-1.0, 0.5), (-1.0, 3.0), (-0.2, 1.0), (-2.0, 0.5)])
def test_residue_negative_t_vanishes(t, x):
    num, closed = residue_check(t, x, ProblemParams(1.0, 0.5))
    assert closed == 0
    assert abs(num) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(t=st.floats(0.05, 10).map(lambda v: v) | st.floats(-10, -0.05),
       x=st.floats(0.0, 10.0), omega1=st.sampled_from([0.3, 1.0, 5.0, 100.0]))
def test_residue_property(t, x, omega1):
    num, closed = residue_check(t, x, ProblemParams(omega1, 0.5))
    assert abs(num - closed) <= 1e-8 * max(1.0, 1.0 / abs(t))


def test_residue_domain():
    p = ProblemParams(1.0, 0.5)
    with pytest.raises(DomainError):
        residue_check(0.0, 1.0, p)
    with pytest.raises(DomainError):
        residue_check(1.0, -1.0, p)
