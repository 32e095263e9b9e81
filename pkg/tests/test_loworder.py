from types import SimpleNamespace

import numpy as np
import pytest

from m1mcl.assembly import assemble_coefficients
from m1mcl.errors import CFLViolationError, RealizabilityError
from m1mcl.loworder import (
    BoundaryMode,
    bar_state,
    bar_state_rhs,
    bar_state_split,
    boundary_term,
    boundary_terms,
    exterior_states,
    imex_euler_stage,
    imex_increment,
    low_order_bar_states,
    low_order_rhs,
    max_stable_dt,
    reactive_scaling,
)
from m1mcl.mesh import build_mesh
from m1mcl.moments import flux, flux_ratio, is_realizable
from m1mcl.utils import edge_scatter

from .conftest import ConstantMaterials, compact_bump, random_states


def test_bar_state_of_equal_states():
    u = np.array([1.0, 0.3, -0.2])
    np.testing.assert_allclose(bar_state(u, u, np.array([0.2, 0.1]), 0.3), u)


def test_bar_state_matches_split_average(rng):
    u_i = random_states(rng, 100, 2)
    u_j = random_states(rng, 100, 2)
    c = rng.normal(size=(100, 2))
    d = np.linalg.norm(c, axis=1) * rng.uniform(1.0, 2.0, 100)

    first, second = bar_state_split(u_i, u_j, c, d)
    np.testing.assert_allclose(
        bar_state(u_i, u_j, c, d), 0.5 * (first + second), rtol=1e-12, atol=1e-13
    )


def test_bar_states_realizable(rng, coeffs2d):
    u = random_states(rng, coeffs2d.n_nodes, 2, max_ratio=0.9)
    bars = low_order_bar_states(u, coeffs2d)

    assert np.all(is_realizable(bars.ij))
    assert np.all(is_realizable(bars.ji))


def test_bar_states_1d_example(coeffs1d):
    u = np.tile([1.0, 0.0], (11, 1))
    u[5] = [2.0, 0.0]
    bars = low_order_bar_states(u, coeffs1d)

    # edge (4, 5): average 1.5, psi1 shifted by -(2/3 - 1/3) / 2
    np.testing.assert_allclose(bars.ij[4], [1.5, -1.0 / 6.0])
    np.testing.assert_allclose(bars.ji[4], [1.5, -1.0 / 6.0])
    np.testing.assert_allclose(bars.ij[5], [1.5, 1.0 / 6.0])


def test_constant_state_has_no_transport(coeffs2d):
    u = np.tile([1.0, 0.2, -0.4], (coeffs2d.n_nodes, 1))
    bars = low_order_bar_states(u, coeffs2d)

    np.testing.assert_allclose(bars.ij, u[coeffs2d.edges[:, 0]], rtol=1e-15)
    np.testing.assert_allclose(bar_state_rhs(u, bars, coeffs2d), 0.0, atol=1e-15)


def test_boundary_term_example():
    term = boundary_term([2.0, 0.0], [1.0, 0.0], [0.5], [[1.0]])
    np.testing.assert_allclose(term, [-0.25, 1.0 / 12.0])


def test_boundary_term_vanishes_for_matching_exterior():
    u = np.array([1.0, 0.5, 0.1])
    weights = [0.25, 0.25]
    normals = [[-1.0, 0.0], [0.0, -1.0]]

    np.testing.assert_allclose(boundary_term(u, u, weights, normals), 0.0, atol=1e-16)


def test_boundary_term_requires_facets():
    with pytest.raises(ValueError):
        boundary_term([1.0, 0.0], [1.0, 0.0], [], np.zeros((0, 1)))


def test_boundary_terms_assembled_per_node(rng, mesh2d, coeffs2d):
    u = random_states(rng, mesh2d.n_nodes, 2)
    u_hat = random_states(rng, mesh2d.n_nodes, 2)
    terms = boundary_terms(u, u_hat, coeffs2d.boundary)

    corner = mesh2d.node_index(0, 0)
    weights, normals = mesh2d.boundary.node_data(corner)
    expected = boundary_term(u[corner], u_hat[corner], weights, normals)
    np.testing.assert_allclose(terms[corner], expected)

    inside = mesh2d.node_index(4, 4)
    np.testing.assert_array_equal(terms[inside], 0.0)


def test_exterior_states():
    u = np.ones((3, 2))

    assert exterior_states(u, BoundaryMode.NONE) is None
    assert exterior_states(u, "do-nothing") is u


def test_max_stable_dt_1d(coeffs1d):
    assert max_stable_dt(coeffs1d) == pytest.approx(0.05)


def test_imex_stage_pure_reaction():
    mesh = build_mesh((0.0,), (2.0,), 2)
    coeffs = assemble_coefficients(mesh, ConstantMaterials(sigma_a=2.0, sigma_s=4.0))
    u = np.tile([1.0, 0.5], (3, 1))

    result = imex_euler_stage(u, 0.5, coeffs)

    np.testing.assert_allclose(result.u, np.tile([0.5, 0.125], (3, 1)), rtol=1e-14)
    assert result.dt == 0.5


def test_reactive_scaling(coeffs1d):
    np.testing.assert_array_equal(reactive_scaling(coeffs1d, 0.01), 1.0)


def test_imex_stage_rejects_large_dt(coeffs1d):
    u = np.tile([1.0, 0.0], (11, 1))

    with pytest.raises(CFLViolationError) as info:
        imex_euler_stage(u, 0.051, coeffs1d)

    assert info.value.required_dt == pytest.approx(0.05)


def test_imex_stage_accepts_exact_cfl_limit(coeffs1d):
    u = np.tile([1.0, 0.0], (11, 1))
    imex_euler_stage(u, max_stable_dt(coeffs1d), coeffs1d)


def test_imex_stage_rejects_non_realizable_input(coeffs1d):
    u = np.tile([1.0, 0.0], (11, 1))
    u[3] = [1.0, 1.5]

    with pytest.raises(RealizabilityError):
        imex_euler_stage(u, 0.01, coeffs1d)


@pytest.mark.parametrize("cfl", [0.25, 0.5, 1.0])
def test_imex_stage_preserves_realizability(rng, mesh2d, cfl):
    materials = ConstantMaterials(sigma_a=1.0, sigma_s=5.0, q=(0.5, 0.1, 0.0))
    coeffs = assemble_coefficients(mesh2d, materials)
    u = random_states(rng, mesh2d.n_nodes, 2, max_ratio=0.99)

    for _ in range(5):
        u = imex_euler_stage(u, cfl * max_stable_dt(coeffs), coeffs).u

    assert np.all(is_realizable(u))


def test_low_order_conserves_mass(mesh2d, coeffs2d):
    u = compact_bump(mesh2d.points)
    mass = coeffs2d.lumped_mass @ u[:, 0]

    u_new = imex_euler_stage(u, 0.5 * max_stable_dt(coeffs2d), coeffs2d).u

    assert coeffs2d.lumped_mass @ u_new[:, 0] == pytest.approx(mass, rel=1e-12)


def test_low_order_rhs_matches_galerkin_for_smooth_field(mesh1d, coeffs1d):
    x = mesh1d.points[:, 0]
    u = np.column_stack((1.0 + 0.5 * x, np.zeros_like(x)))

    rhs = low_order_rhs(u, coeffs1d)

    # d psi1 / dt = -(1/3) d psi0 / dx on the interior, psi0 at rest
    np.testing.assert_allclose(rhs[1:-1, 0], 0.0, atol=1e-14)
    np.testing.assert_allclose(rhs[1:-1, 1] / coeffs1d.lumped_mass[1:-1], -0.5 / 3.0, rtol=1e-12)


def test_low_order_rhs_three_node_oracle(rng):
    mesh = build_mesh((0.0,), (1.0,), 2)
    coeffs = assemble_coefficients(mesh, ConstantMaterials())
    u = random_states(rng, 3, 1, max_ratio=0.9)
    f = flux(u)[:, 0, :]

    # c_ij = 1/2 to the right neighbour, -1/2 to the left one; d_ij = 1/2
    c = {(0, 1): 0.5, (1, 0): -0.5, (1, 2): 0.5, (2, 1): -0.5}
    expected = np.zeros_like(u)
    for (i, j), c_ij in c.items():
        expected[i] += 0.5 * (u[j] - u[i]) - c_ij * (f[j] - f[i])

    np.testing.assert_allclose(coeffs.c_ij[:, 0], 0.5)
    np.testing.assert_allclose(coeffs.c_ji[:, 0], -0.5)
    np.testing.assert_allclose(coeffs.viscosity, 0.5)
    np.testing.assert_allclose(low_order_rhs(u, coeffs), expected, rtol=1e-12, atol=1e-13)


def test_low_order_stage_is_convex_combination_of_bar_states(rng, mesh2d, coeffs2d):
    u = random_states(rng, mesh2d.n_nodes, 2, max_ratio=0.9)
    dt = max_stable_dt(coeffs2d)
    bars = low_order_bar_states(u, coeffs2d)
    d = coeffs2d.viscosity[:, None]
    weight = 2.0 * dt / coeffs2d.lumped_mass[:, None]

    weighted_bars = edge_scatter(coeffs2d.edges, d * bars.ij, d * bars.ji, mesh2d.n_nodes)
    expected = (1.0 - weight * coeffs2d.viscosity_sum[:, None]) * u + weight * weighted_bars

    u_new = imex_euler_stage(u, dt, coeffs2d).u

    interior = np.setdiff1d(np.arange(mesh2d.n_nodes), mesh2d.boundary.nodes)
    assert len(interior) == 49
    np.testing.assert_allclose(
        u_new[interior], expected[interior], rtol=1e-12, atol=1e-12 * np.max(np.abs(u))
    )


def test_imex_increment_reproduces_stage(rng, mesh2d):
    materials = ConstantMaterials(sigma_a=1.0, sigma_s=2.0)
    coeffs = assemble_coefficients(mesh2d, materials)
    u = random_states(rng, mesh2d.n_nodes, 2, max_ratio=0.9)
    dt = 0.5 * max_stable_dt(coeffs)

    stage = imex_euler_stage(u, dt, coeffs).u
    increment = imex_increment(u, dt, coeffs)
    np.testing.assert_allclose(u + dt * increment, stage, rtol=1e-10, atol=1e-13)


def test_bar_states_of_random_edges(rng):
    n = 100_000
    u_i = random_states(rng, n, 2, max_ratio=0.99)
    u_j = random_states(rng, n, 2, max_ratio=0.99)
    c = rng.normal(size=(n, 2))
    d = np.linalg.norm(c, axis=1) * rng.uniform(1.0, 2.0, n)

    assert np.all(is_realizable(bar_state(u_i, u_j, c, d)))


def test_reactive_scaling_keeps_realizability(rng):
    n = 100_000
    u = random_states(rng, n, 2)
    m = rng.uniform(0.1, 2.0, n)
    sigma_a = m * rng.uniform(0.0, 10.0, n)
    sigma_t = sigma_a + m * rng.uniform(0.0, 10.0, n)
    coeffs = SimpleNamespace(
        lumped_mass=m, lumped_sigma=lambda: np.column_stack((sigma_a, sigma_t, sigma_t))
    )

    scaled = reactive_scaling(coeffs, rng.uniform(0.0, 1.0)) * u

    assert np.all(is_realizable(scaled))
    assert np.all(flux_ratio(scaled) <= flux_ratio(u) * (1.0 + 1e-14))
