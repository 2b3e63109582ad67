import math

import numpy as np
import pytest

from fieldshaper.errors import GeometryError, PointNotFoundError, ValidationError
from fieldshaper.meshing import (
    GAUSS_POINTS,
    GAUSS_WEIGHTS,
    Mesh,
    build_annular_sector_mesh,
    build_cartesian_mesh,
    composite_gauss,
    locate_point,
    shape_functions,
    shape_gradients,
)
from fieldshaper.transforms import BenderSpec, bender_mapping


class TestShapeFunctions:
    def test_partition_of_unity(self):
        xi = np.linspace(-1, 1, 7)
        eta = np.linspace(-1, 1, 7)
        for a in xi:
            for b in eta:
                assert shape_functions(a, b).sum() == pytest.approx(1.0)
                assert np.allclose(shape_gradients(a, b).sum(axis=0), 0.0, atol=1e-15)

    def test_kronecker_at_corners(self):
        corners = [(-1, -1), (1, -1), (1, 1), (-1, 1)]
        for k, (a, b) in enumerate(corners):
            N = shape_functions(a, b)
            want = np.zeros(4)
            want[k] = 1.0
            assert np.allclose(N, want)


class TestQuadrature:
    def test_plain_rule(self):
        pts, wts = composite_gauss(1)
        assert np.allclose(pts, GAUSS_POINTS)
        assert np.allclose(wts, GAUSS_WEIGHTS)
        assert wts.sum() == pytest.approx(4.0)

    @pytest.mark.parametrize("s", [2, 3, 4])
    def test_composite_weights_and_exactness(self, s):
        pts, wts = composite_gauss(s)
        assert pts.shape == (4 * s * s, 2)
        assert wts.sum() == pytest.approx(4.0)
        # exact for bicubics on each subcell, so in particular for x^2 y^2
        val = np.sum(wts * pts[:, 0] ** 2 * pts[:, 1] ** 2)
        assert val == pytest.approx(4.0 / 9.0, rel=1e-13)

    def test_invalid_subdivision(self):
        with pytest.raises(ValidationError):
            composite_gauss(0)


class TestCartesianMesh:
    def test_counts_and_numbering(self):
        mesh = build_cartesian_mesh((0, 2), (0, 1), 4, 2)
        assert mesh.n_nodes == 15
        assert mesh.n_elements == 8
        # row-major numbering: node (i, j) at j*(nx+1)+i
        assert np.allclose(mesh.nodes[0], [0, 0])
        assert np.allclose(mesh.nodes[4], [2, 0])
        assert np.allclose(mesh.nodes[14], [2, 1])

    def test_element_orientation(self):
        mesh = build_cartesian_mesh((0, 1), (0, 1), 3, 3)
        coords = mesh.element_coords()
        # shoelace area of every quad is positive and equal
        x, y = coords[..., 0], coords[..., 1]
        area = 0.5 * np.sum(
            x * np.roll(y, -1, axis=1) - np.roll(x, -1, axis=1) * y, axis=1
        )
        assert np.allclose(area, 1.0 / 9.0)

    def test_boundary_tags(self):
        mesh = build_cartesian_mesh((0, 1), (0, 1), 3, 2)
        assert set(mesh.boundary_tags) == {"left", "right", "top", "bottom"}
        left = np.unique(mesh.boundary_tags["left"].ravel())
        assert np.allclose(mesh.nodes[left][:, 0], 0.0)
        top = np.unique(mesh.boundary_tags["top"].ravel())
        assert np.allclose(mesh.nodes[top][:, 1], 1.0)

    def test_refinement_nesting(self):
        coarse = build_cartesian_mesh((0, 3), (0, 2), 6, 4)
        fine = build_cartesian_mesh((0, 3), (0, 2), 12, 8)
        fine_set = {tuple(np.round(p, 12)) for p in fine.nodes}
        for p in coarse.nodes:
            assert tuple(np.round(p, 12)) in fine_set

    def test_invalid_ranges(self):
        with pytest.raises(ValidationError):
            build_cartesian_mesh((1, 0), (0, 1), 2, 2)
        with pytest.raises(ValidationError):
            build_cartesian_mesh((0, 1), (0, 1), 0, 2)

    def test_tangled_element_rejected(self):
        nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        elements = np.array([[0, 1, 2, 3]])  # bow-tie ordering
        with pytest.raises(GeometryError):
            Mesh(nodes, elements, {}, (1, 1))


class TestSectorMesh:
    def test_single_element(self):
        mesh = build_annular_sector_mesh(1.0, 2.0, math.pi / 2, 1, 1)
        assert mesh.n_nodes == 4
        assert mesh.n_elements == 1
        radii = np.hypot(mesh.nodes[:, 0], mesh.nodes[:, 1])
        assert sorted(np.round(radii, 12)) == [1.0, 1.0, 2.0, 2.0]

    def test_geometric_radial_grading(self):
        mesh = build_annular_sector_mesh(1.0, 8.0, math.pi / 2, 6, 4)
        r = mesh.meta["r"]
        ratios = r[1:] / r[:-1]
        assert np.allclose(ratios, ratios[0])
        assert r[0] == pytest.approx(1.0)
        assert r[-1] == pytest.approx(8.0)

    def test_boundary_tags(self):
        mesh = build_annular_sector_mesh(1.0, 2.0, math.pi / 2, 4, 8)
        assert set(mesh.boundary_tags) == {"AD", "CB", "inner-arc", "outer-arc"}
        ad = np.unique(mesh.boundary_tags["AD"].ravel())
        # theta = 0 edge lies on the +y axis in this embedding
        assert np.allclose(mesh.nodes[ad][:, 0], 0.0, atol=1e-14)
        inner = np.unique(mesh.boundary_tags["inner-arc"].ravel())
        assert np.allclose(np.hypot(*mesh.nodes[inner].T), 1.0)

    def test_nodes_coincide_with_map_image(self):
        spec = BenderSpec(k=1, a=1, phi=math.pi / 2, r1=1)
        mesh = build_annular_sector_mesh(spec.r1, spec.r2, spec.phi, 12, 24)
        mapping = bender_mapping(spec)
        x = np.linspace(0, spec.k * spec.a, 25)
        y = np.linspace(0, spec.a, 13)
        X, Y = np.meshgrid(x, y)
        images = mapping(np.column_stack([X.ravel(), Y.ravel()]))
        assert np.max(np.abs(images - mesh.nodes)) < 1e-12

    def test_invalid_geometry(self):
        with pytest.raises(ValidationError):
            build_annular_sector_mesh(2.0, 1.0, math.pi / 2, 2, 2)
        with pytest.raises(ValidationError):
            build_annular_sector_mesh(1.0, 2.0, 3 * math.pi, 2, 2)


class TestLocatePoint:
    def test_nodes_and_centers(self):
        mesh = build_cartesian_mesh((0, 1), (0, 1), 4, 4)
        e, xi = locate_point(mesh, (0.125, 0.125))  # center of element 0
        assert e == 0
        assert np.allclose(xi, [0, 0], atol=1e-10)
        e, xi = locate_point(mesh, (1.0, 1.0))
        assert np.allclose(np.abs(xi), [1, 1], atol=1e-9)

    def test_round_trip_random(self):
        mesh = build_annular_sector_mesh(1.0, 4.0, math.pi / 2, 6, 12)
        rng = np.random.default_rng(21)
        r = rng.uniform(1.05, 3.9, 50)
        th = rng.uniform(0.02, math.pi / 2 - 0.02, 50)
        for ri, ti in zip(r, th):
            p = (ri * math.sin(ti), ri * math.cos(ti))
            e, xi = locate_point(mesh, p)
            corners = mesh.element_coords()[e]
            back = shape_functions(xi[0], xi[1]) @ corners
            assert np.hypot(*(back - p)) < 1e-10

    def test_outside_hull(self):
        mesh = build_cartesian_mesh((0, 1), (0, 1), 4, 4)
        with pytest.raises(PointNotFoundError):
            locate_point(mesh, (2.0, 0.5))
