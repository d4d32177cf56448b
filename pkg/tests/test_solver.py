"""Spectral representation, Green operator, contraction and phase equation."""

import math

import numpy as np
import pytest

from spinorbit.catalog import ResonanceParams, bundled_catalog
from spinorbit.certification import green_norm_bound
from spinorbit.potential import fourier_coefficient, fx_sup_bound, fxx_sup_bound
from spinorbit.solver import (
    AliasingError,
    PeriodicFunction,
    PreconditionError,
    bifurcation_halfwidth,
    green_apply,
    phi_hat,
    phi_mean,
    solve_bifurcation,
    solve_range,
)


def moon_params(eta=0.0):
    return ResonanceParams.from_body(bundled_catalog("moons")[0], eta=eta)


def mercury_params(eta=0.0):
    return ResonanceParams.from_body(bundled_catalog("mercury")[0], eta=eta)


def random_zero_mean(rng, degree, scale=1.0):
    coeffs = np.zeros(degree + 1, dtype=complex)
    coeffs[1:] = scale * (rng.normal(size=degree) + 1j * rng.normal(size=degree))
    return PeriodicFunction(coeffs)


# ---------------------------------------------------------------- periodic fn

def test_periodic_function_round_trip():
    rng = np.random.default_rng(1)
    v = random_zero_mean(rng, 12)
    n = 64
    rebuilt = PeriodicFunction.from_samples(v.samples(n), 12)
    assert np.allclose(rebuilt.coefficients, v.coefficients, atol=1e-14)


def test_periodic_function_rejects_nonzero_mean():
    with pytest.raises(ValueError):
        PeriodicFunction(np.array([1.0, 0.5 + 0j]))


def test_evaluate_matches_samples():
    rng = np.random.default_rng(2)
    v = random_zero_mean(rng, 9)
    n = 32
    grid = 2.0 * math.pi * np.arange(n) / n
    assert np.allclose(v.evaluate(grid), v.samples(n), atol=1e-13)


def test_derivative_and_arithmetic():
    grid = np.linspace(0.0, 2.0 * math.pi, 128, endpoint=False)
    cos_t = PeriodicFunction.from_samples(np.cos(grid), 4)
    dcos = cos_t.derivative()
    assert np.allclose(dcos.evaluate(grid), -np.sin(grid), atol=1e-13)
    doubled = 2.0 * cos_t
    assert np.allclose((doubled - cos_t).evaluate(grid), np.cos(grid), atol=1e-13)


# -------------------------------------------------------------- green operator

def test_green_apply_cosine():
    grid = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    g = PeriodicFunction.from_samples(np.cos(grid), 4)
    u = green_apply(g, 0.0)
    assert np.allclose(u.evaluate(grid), -np.cos(grid), atol=1e-14)


def test_green_apply_second_harmonic():
    grid = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    g = PeriodicFunction.from_samples(np.sin(2.0 * grid), 4)
    u = green_apply(g, 0.0)
    assert np.allclose(u.evaluate(grid), -np.sin(2.0 * grid) / 4.0, atol=1e-14)


def test_green_apply_inverts_operator():
    # L(G g) = g for random forcings and every dissipation in range
    rng = np.random.default_rng(3)
    for eta_hat in (0.0, 0.003, 0.008):
        for _ in range(10):
            g = random_zero_mean(rng, 16)
            u = green_apply(g, eta_hat)
            lu = u.derivative(2).coefficients + eta_hat * u.derivative(1).coefficients
            assert np.max(np.abs(lu - g.coefficients)) <= 1e-10 * g.sup_norm()


def test_green_apply_rejects_negative_dissipation():
    with pytest.raises(ValueError):
        green_apply(PeriodicFunction.zero(4), -0.1)


def test_operator_norm_bound_on_random_forcings():
    rng = np.random.default_rng(4)
    for eta_hat in (0.0, 0.004, 0.008):
        bound = green_norm_bound(eta_hat)
        for _ in range(25):
            g = random_zero_mean(rng, int(rng.integers(1, 32)))
            u = green_apply(g, eta_hat)
            assert u.sup_norm(4096) <= bound * g.sup_norm(4096) * (1.0 + 1e-9)


# --------------------------------------------------- norm inequality suite

def test_zero_mean_norm_inequalities():
    # ||v|| <= (pi/2) ||v'|| and ||v|| <= (pi^2/8) ||v''|| on zero-average
    # periodic functions; sampled sup-norms with a fine grid
    rng = np.random.default_rng(5)
    n = 8192
    for _ in range(100):
        v = random_zero_mean(rng, int(rng.integers(1, 33)))
        sup_v = v.sup_norm(n)
        slack = 1.0 + 1e-6
        assert sup_v <= (math.pi / 2.0) * v.derivative(1).sup_norm(n) * slack
        assert sup_v <= (math.pi**2 / 8.0) * v.derivative(2).sup_norm(n) * slack


def _near_triangle_wave(inverse_power):
    # smoothed truncation of the triangle-wave series (the raw partial sum
    # would overshoot in the derivative and hide the sharp ratio)
    size = 64
    k = np.arange(1, size, 2)
    coeffs = np.zeros(size, dtype=complex)
    coeffs[k] = np.sinc(k / size) / (1j * k) ** inverse_power
    return PeriodicFunction(coeffs)


def test_first_inequality_sharpness_triangle_wave():
    # ||v||/||v'|| approaches pi/2 from below for near-triangle waves
    v = _near_triangle_wave(2)
    ratio = v.sup_norm(8192) / v.derivative(1).sup_norm(8192)
    assert 0.95 * math.pi / 2.0 <= ratio <= math.pi / 2.0 * (1.0 + 1e-9)


def test_second_inequality_sharpness_parabola_wave():
    # ||v||/||v''|| approaches pi^2/8 for the double integral of a
    # (smoothed) square wave
    v = _near_triangle_wave(3)
    ratio = v.sup_norm(8192) / v.derivative(2).sup_norm(8192)
    assert 0.95 * math.pi**2 / 8.0 <= ratio <= math.pi**2 / 8.0 * (1.0 + 1e-9)


# ------------------------------------------------------------------- phi_hat

def test_phi_hat_circular_orbit_mean():
    # at e = 0 the composite collapses to the constant sin(2 xi): the
    # zero-mean part vanishes and the removed mean is -sin(2 xi)
    params = ResonanceParams(p=1, q=1, e=0.0, eps=0.01, eta=0.0, nu=1.0)
    for xi in (0.0, 0.3, math.pi / 4.0):
        pf, removed = phi_hat(xi, PeriodicFunction.zero(16), params)
        assert pf.sup_norm() <= 1e-14
        assert removed == pytest.approx(-math.sin(2.0 * xi), abs=1e-14)


def test_phi_hat_zero_phase_has_zero_mean():
    params = moon_params()
    _, removed = phi_hat(0.0, PeriodicFunction.zero(32), params)
    assert abs(removed) <= 1e-15


def test_phi_hat_mean_matches_quadrature_coefficient():
    # with u = 0 the removed mean equals 2 alpha_j(e) sin(2 xi)
    for params in (moon_params(), mercury_params()):
        alpha = fourier_coefficient(params.e, params.harmonic)
        for xi in (math.pi / 4.0, 0.9):
            _, removed = phi_hat(xi, PeriodicFunction.zero(64), params)
            assert removed == pytest.approx(
                2.0 * alpha * math.sin(2.0 * xi), abs=1e-10
            )


def test_phi_hat_aliasing_guard():
    params = mercury_params()
    with pytest.raises(AliasingError):
        phi_hat(0.3, PeriodicFunction.zero(2), params, n_coll=8)


# --------------------------------------------------------------- solve_range

def test_solve_range_zero_oblateness():
    params = ResonanceParams(p=1, q=1, e=0.1, eps=0.0, eta=0.0, nu=1.0)
    sol = solve_range(0.7, params)
    assert sol.iterations == 1
    assert sol.sup_norm == 0.0


def test_solve_range_ball_containment_and_rate():
    params = moon_params()
    radius = 2.5 * params.eps_hat * fx_sup_bound(params.e)
    rate_bound = 2.5 * params.eps_hat * fxx_sup_bound(params.e) + 1e-3
    sol = solve_range(0.1, params)
    assert sol.sup_norm <= radius
    ratios = [
        b / a
        for a, b in zip(sol.increments, sol.increments[1:])
        if a > 1e-9  # below this, roundoff dominates the quotient
    ]
    assert ratios and all(r <= rate_bound for r in ratios)


def test_solve_range_fixed_point_residual():
    params = mercury_params(eta=0.001)
    tol = 1e-12
    sol = solve_range(1.1, params, N=128, tol=tol)
    pf, _ = phi_hat(1.1, sol.u, params)
    image = params.eps_hat * green_apply(pf, params.eta_hat)
    assert (image - sol.u).sup_norm() <= 2.0 * tol


def test_solve_range_unique_fixed_point_from_two_starts():
    rng = np.random.default_rng(6)
    for params in (moon_params(), mercury_params(eta=0.001)):
        tol = 1e-12
        radius = 2.5 * params.eps_hat * fx_sup_bound(params.e)
        start = random_zero_mean(rng, 16)
        start = (radius / start.sup_norm()) * start
        a = solve_range(0.4, params, tol=tol)
        b = solve_range(0.4, params, tol=tol, initial=start)
        assert (a.u - b.u).sup_norm() <= 10.0 * tol


def test_solution_ball_across_certified_catalog():
    # ||u(.; xi)|| stays inside the contraction ball for every certified
    # body at 16 sampled phases
    from spinorbit.certification import certify

    bodies = [
        b
        for b in bundled_catalog("all") + bundled_catalog("minor")
        if certify(b).certified
    ]
    assert len(bodies) == 21
    phases = 2.0 * math.pi * np.arange(16) / 16.0
    for body in bodies:
        params = ResonanceParams.from_body(body)
        radius = 2.5 * params.eps_hat * fx_sup_bound(params.e)
        modes = 64 if body.q == 1 else 128
        for xi in phases:
            sol = solve_range(float(xi), params, N=modes)
            assert sol.sup_norm <= radius, (body.name, xi)


def test_solve_range_refuses_outside_certified_region():
    phobos = bundled_catalog("minor")[0]
    with pytest.raises(PreconditionError, match="range"):
        solve_range(0.1, ResonanceParams.from_body(phobos))
    with pytest.raises(PreconditionError, match="Green"):
        solve_range(0.1, moon_params(eta=0.05))


# ----------------------------------------------------------------- phi_mean

def test_phi_mean_close_to_leading_term():
    # |phi(xi) - (-2 alpha_j sin 2 xi)| <= eps_hat * 5/(1-e)^6
    for params in (moon_params(), mercury_params()):
        alpha = fourier_coefficient(params.e, params.harmonic)
        m1 = 5.0 / (1.0 - params.e) ** 6
        for xi in (0.2, math.pi / 4.0, 2.0):
            phi = phi_mean(xi, params, N=96)
            leading = -2.0 * alpha * math.sin(2.0 * xi)
            assert abs(phi - leading) <= params.eps_hat * m1


def test_phi_mean_vanishes_at_zero_phase_without_dissipation():
    # time-reversal symmetry forces an odd correction and zero average
    assert abs(phi_mean(0.0, moon_params())) <= 1e-12


# ---------------------------------------------------------- solve_bifurcation

def test_bifurcation_root_without_dissipation():
    params = moon_params()
    orbit = solve_bifurcation(params, scan_points=16)
    assert orbit.xi_star == pytest.approx(math.pi / 2.0, abs=1e-9)
    assert orbit.bifurcation_residual <= 1e-10
    assert math.pi / 4.0 <= orbit.xi_star <= 3.0 * math.pi / 4.0


def test_bifurcation_scan_reports_symmetry_roots():
    orbit = solve_bifurcation(moon_params(), scan_points=64)
    # brackets around each of 0, pi/2, pi, 3pi/2
    assert len(orbit.sign_changes) == 4


def test_bifurcation_with_dissipation():
    params = mercury_params(eta=0.001)
    orbit = solve_bifurcation(params, N=128, scan_points=0)
    assert orbit.bifurcation_residual <= 1e-10
    target = params.eta_hat * params.nu_hat / params.eps_hat
    phi = phi_mean(orbit.xi_star, params, N=128)
    assert phi == pytest.approx(target, abs=1e-9)


def test_bifurcation_at_boundary_target():
    # eta at the certified ceiling puts the target on the interval edge;
    # the seeded bracket still contains a root
    merc = bundled_catalog("mercury")[0]
    from spinorbit.certification import certify

    cap = certify(merc).eta_admissible
    params = mercury_params(eta=cap)
    assert abs(params.eta_hat * params.nu_hat / params.eps_hat) == pytest.approx(
        bifurcation_halfwidth(params), rel=1e-12
    )
    orbit = solve_bifurcation(params, N=128, scan_points=0)
    assert orbit.bifurcation_residual <= 1e-10


def test_bifurcation_refuses_oversized_target():
    params = ResonanceParams(p=1, q=1, e=0.0549, eps=1e-6, eta=0.008, nu=1.2)
    with pytest.raises(PreconditionError, match="half-width"):
        solve_bifurcation(params, scan_points=0)


def test_orbit_reconstruction_identity():
    orbit = solve_bifurcation(moon_params(), scan_points=0)
    s = np.linspace(0.0, 4.0 * math.pi, 50)
    lhs = orbit.x_of(s + 2.0 * math.pi * orbit.params.q)
    rhs = np.asarray(orbit.x_of(s)) + 2.0 * math.pi * orbit.params.p
    assert np.max(np.abs(lhs - rhs)) <= 1e-9


def test_orbit_export_round_trip():
    import json

    orbit = solve_bifurcation(moon_params(), scan_points=0)
    payload = json.loads(orbit.to_json(n_samples=32))
    assert payload["p"] == 1 and payload["q"] == 1
    assert payload["xi_star"] == pytest.approx(orbit.xi_star)
    # the time-average normalization of the phase agrees with the root
    assert payload["xi_average"] == pytest.approx(orbit.xi_star, abs=1e-12)
    coeffs = np.array([complex(re, im) for re, im in payload["u_coefficients"]])
    assert np.allclose(coeffs, orbit.u.coefficients)
    assert len(payload["x"]) == 32
