import math

import numpy as np
import pytest

from fieldshaper.errors import (
    ComparisonError,
    NonArrivalError,
    UnsupportedError,
    ValidationError,
)
from fieldshaper.materials import Disk
from fieldshaper.meshing import build_annular_sector_mesh, build_cartesian_mesh
from fieldshaper.metrics import (
    arrival_spread,
    contour_straightness,
    crossing_times,
    exterior_mismatch,
    region_max_abs,
)


class TestExteriorMismatch:
    def test_identical_fields(self):
        u = np.arange(10.0)
        assert exterior_mismatch(u, u) == 0.0

    def test_relative_scaling(self):
        u = np.ones(5)
        assert exterior_mismatch(u, 2 * u) == pytest.approx(1.0)

    def test_zero_reference(self):
        z = np.zeros(4)
        assert exterior_mismatch(z, z) == 0.0
        assert exterior_mismatch(z, np.ones(4)) == math.inf

    def test_region_restriction(self):
        mesh = build_cartesian_mesh((0, 1), (0, 1), 4, 4)
        uA = np.ones(mesh.n_nodes)
        uB = uA.copy()
        inside = Disk(0.5, 0.5, 0.2).contains(mesh.nodes)
        uB[inside] += 100.0  # perturb only inside the excluded disk
        outside = ~inside
        assert exterior_mismatch(uA, uB, mesh, outside) == 0.0
        assert exterior_mismatch(uA, uB, mesh, Disk(0.5, 0.5, 0.2)) > 1.0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ComparisonError):
            exterior_mismatch(np.ones(3), np.ones(4))
        mesh = build_cartesian_mesh((0, 1), (0, 1), 2, 2)
        with pytest.raises(ComparisonError):
            exterior_mismatch(np.ones(4), np.ones(4), mesh)


class TestCrossingTimes:
    def test_linear_interpolation(self):
        times = np.array([0.0, 1.0, 2.0])
        values = np.array([[0.0, 0.0], [0.4, 0.8], [1.0, 1.0]])
        tc = crossing_times(times, values, 0.4)
        assert tc[0] == pytest.approx(1.0)
        assert tc[1] == pytest.approx(0.5)

    def test_non_arrival(self):
        times = np.array([0.0, 1.0])
        values = np.array([[0.0], [0.2]])
        with pytest.raises(NonArrivalError):
            crossing_times(times, values, 0.5)

    def test_already_above_at_start(self):
        times = np.array([0.0, 1.0])
        values = np.array([[0.9], [1.0]])
        assert crossing_times(times, values, 0.5)[0] == 0.0


class TestArrivalSpread:
    def test_synchronous(self):
        times = np.linspace(0, 2, 21)
        ramp = np.clip(times, 0, 1)
        values = np.column_stack([ramp, ramp, ramp])
        assert arrival_spread(times, values, 0.5) == pytest.approx(0.0)

    def test_known_value(self):
        # crossings at t = 1 and t = 2: spread (2-1)/1.5 = 2/3
        times = np.array([0.0, 1.0, 2.0, 3.0])
        values = np.array([[0.0, 0.0], [0.5, 0.0], [1.0, 0.5], [1.0, 1.0]])
        assert arrival_spread(times, values, 0.5) == pytest.approx(2.0 / 3.0)

    def test_needs_multiple_probes(self):
        times = np.array([0.0, 1.0])
        values = np.array([[0.0], [1.0]])
        with pytest.raises(ValidationError):
            arrival_spread(times, values, 0.5)

    def test_positive_threshold_required(self):
        with pytest.raises(ValidationError):
            arrival_spread(np.array([0.0, 1.0]), np.zeros((2, 2)), 0.0)


class TestContourStraightness:
    def sector(self):
        return build_annular_sector_mesh(1.0, 4.0, math.pi / 2, 8, 16)

    def test_angle_only_field_is_straight(self):
        mesh = self.sector()
        theta = np.arctan2(mesh.nodes[:, 0], mesh.nodes[:, 1])
        assert contour_straightness(mesh, 1 - theta / (math.pi / 2)) == pytest.approx(0.0)

    def test_radial_field_is_maximally_bent(self):
        mesh = self.sector()
        r = np.hypot(mesh.nodes[:, 0], mesh.nodes[:, 1])
        assert contour_straightness(mesh, r) == pytest.approx(1.0)

    def test_constant_field(self):
        mesh = self.sector()
        assert contour_straightness(mesh, np.ones(mesh.n_nodes)) == 0.0

    def test_requires_sector_mesh(self):
        mesh = build_cartesian_mesh((0, 1), (0, 1), 4, 4)
        with pytest.raises(UnsupportedError):
            contour_straightness(mesh, np.zeros(mesh.n_nodes))

    def test_scale_invariant(self):
        mesh = self.sector()
        r = np.hypot(mesh.nodes[:, 0], mesh.nodes[:, 1])
        theta = np.arctan2(mesh.nodes[:, 0], mesh.nodes[:, 1])
        u = theta + 0.03 * r
        a = contour_straightness(mesh, u)
        b = contour_straightness(mesh, 10 * u + 5)
        assert a == pytest.approx(b)
        assert 0 < a < 1


class TestRegionMaxAbs:
    def test_basic(self):
        mesh = build_cartesian_mesh((0, 1), (0, 1), 4, 4)
        u = np.zeros(mesh.n_nodes)
        u[mesh.n_nodes // 2] = -3.0
        assert region_max_abs(mesh, u, None) == 3.0

    def test_empty_region(self):
        mesh = build_cartesian_mesh((0, 1), (0, 1), 2, 2)
        assert region_max_abs(mesh, np.ones(mesh.n_nodes), Disk(5, 5, 0.1)) == 0.0

    def test_region_restriction(self):
        mesh = build_cartesian_mesh((0, 1), (0, 1), 8, 8)
        u = mesh.nodes[:, 0]
        assert region_max_abs(mesh, u, Disk(0.0, 0.5, 0.3)) <= 0.3 + 1e-12
