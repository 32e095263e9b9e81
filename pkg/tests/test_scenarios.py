import numpy as np
import pytest

from m1mcl.errors import ConfigurationError
from m1mcl.loworder import BoundaryMode
from m1mcl.mesh import build_mesh
from m1mcl.moments import is_realizable
from m1mcl.scenarios import (
    SCENARIOS,
    flash,
    get_scenario,
    homogeneous_disk,
    lattice,
    line_source,
)
from m1mcl.scenarios.lattice import ABSORBERS, in_absorber
from m1mcl.stepping import discretize, initial_state


def test_registry():
    assert set(SCENARIOS) == {"line_source", "flash", "disk", "lattice", "pulse1d"}
    assert get_scenario("disk").name == "disk"


def test_unknown_scenario():
    with pytest.raises(ConfigurationError):
        get_scenario("sphere")


def test_source_only_for_lattice():
    assert get_scenario("lattice", "anisotropic").source_kind == "anisotropic"

    with pytest.raises(ConfigurationError):
        get_scenario("flash", "isotropic")


def test_line_source_initial_condition():
    scenario = line_source()
    u = scenario.initial(np.array([[0.0, 0.0], [0.01, 0.0], [0.4, 0.4]]))

    np.testing.assert_allclose(u[:, 0], [1.0, np.exp(-2.5), 1e-4])
    np.testing.assert_array_equal(u[:, 1:], 0.0)
    assert scenario.t_final == 0.45


def test_flash_initial_condition():
    scenario = flash()
    u = scenario.initial(np.array([[0.0, 0.0], [0.5, 0.0], [0.6, 0.0]]))

    np.testing.assert_allclose(u, [[1.0, 0.9, 0.0], [1.0, 0.9, 0.0], [1e-10, 0.0, 0.0]])


def test_disk_materials():
    scenario = homogeneous_disk()
    points = np.array([[0.0, 0.0], [1.0, 0.0], [1.1, 0.0]])

    np.testing.assert_array_equal(scenario.sigma_a(points), [10.0, 10.0, 0.0])
    np.testing.assert_array_equal(scenario.sigma_s(points), 0.0)
    np.testing.assert_array_equal(scenario.source(points)[:, 0], [1.0, 1.0, 0.0])


def test_lattice_layout():
    assert len(ABSORBERS) == 11

    centres = np.array([[x + 0.5, y + 0.5] for x in range(7) for y in range(7)])
    absorbing = in_absorber(centres)
    assert absorbing.sum() == 11
    assert not in_absorber([[3.5, 3.5]])[0]
    assert in_absorber([[3.5, 1.5]])[0]
    # boundary of a closed box belongs to the absorber
    assert in_absorber([[1.0, 1.0]])[0]


def test_lattice_materials_and_sources():
    points = np.array([[3.5, 3.5], [1.5, 1.5], [0.5, 0.5]])

    iso = lattice("isotropic")
    np.testing.assert_array_equal(iso.sigma_a(points), [0.0, 10.0, 0.0])
    np.testing.assert_array_equal(iso.sigma_s(points), [1.0, 0.0, 1.0])
    np.testing.assert_array_equal(iso.source(points), [[1.0, 0.0, 0.0], [0.0] * 3, [0.0] * 3])

    aniso = lattice("anisotropic")
    np.testing.assert_array_equal(aniso.source(points)[0], [1.0, 0.0, -1.0])
    assert aniso.boundary is BoundaryMode.DO_NOTHING


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_initial_states_strictly_realizable(name):
    scenario = SCENARIOS[name]()
    mesh = build_mesh(scenario.lower, scenario.upper, 16)

    assert np.all(is_realizable(scenario.initial(mesh.points)))


def test_lattice_discretizes_with_admissible_source():
    scenario = lattice("anisotropic")
    disc = discretize(scenario, 22)

    assert disc.boundary is BoundaryMode.DO_NOTHING
    assert np.all(is_realizable(disc.coeffs.source, strict=False))
    assert initial_state(scenario, disc.mesh).shape == (22 * 22, 3)


def test_overrides():
    scenario = line_source().with_overrides({"theta": "0.05", "nodes": "33"})

    assert scenario.theta == 0.05
    assert scenario.nodes == 33
    assert scenario.t_final == 0.45

    moved = flash().with_overrides({"lower": "(-5, -5)", "upper": "5, 5"})
    assert moved.lower == (-5.0, -5.0)
    assert moved.upper == (5.0, 5.0)


@pytest.mark.parametrize(
    "overrides",
    [{"radius": "1"}, {"nodes": "many"}, {"source_kind": "directional"}, {"boundary": "open"}],
)
def test_invalid_overrides(overrides):
    with pytest.raises(ConfigurationError):
        lattice().with_overrides(overrides)


def test_describe():
    described = lattice("anisotropic").describe()

    assert described["name"] == "lattice"
    assert described["source_kind"] == "anisotropic"
    assert described["boundary"] == "do-nothing"
    assert described["lower"] == [0.0, 0.0]
