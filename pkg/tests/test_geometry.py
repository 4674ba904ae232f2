import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, VORONOI_SIZES
from curvem.geometry import (G1, G2, CircleArc, CurveDomainError, Edge, Element, Mesh,
                             MeshError, MeshParseError, PolylineSegment, SineGraph,
                             curve_eval, element_diameter, gen_mapped_square_mesh,
                             gen_polar_disk_mesh, kernel_ball, map_to_sine_domain,
                             mesh_from_dict, mesh_read, mesh_to_dict, mesh_validate,
                             mesh_write, polygon_area, unit_square_quads)
from curvem.quadrature import QuadratureOrders, bulk_rule


def unit_square_element():
    edges = [Edge((0, 1)), Edge((1, 2)), Edge((2, 3)), Edge((3, 0))]
    return Mesh([[0, 0], [1, 0], [1, 1], [0, 1]], edges, [Element((1, 2, 3, 4))])


# -- curves ----------------------------------------------------------------

def test_circle_at_angle_zero():
    p, d, speed = curve_eval(CircleArc((0.0, 0.0), 1.0, 0.0, np.pi), 0.0)
    np.testing.assert_allclose(p, [1.0, 0.0], atol=1e-15)
    assert abs(d[0]) < 1e-15 and d[1] > 0
    assert speed == pytest.approx(1.0)


def test_sine_graph_origin():
    p, d, speed = curve_eval(G1, 0.0)
    np.testing.assert_allclose(p, [0.0, 0.0], atol=1e-15)
    assert speed == pytest.approx(np.hypot(1.0, np.pi / 20))


def test_straight_segment_midpoint():
    p, d, speed = curve_eval(PolylineSegment((0.0, 0.0), (2.0, 0.0)), 0.5)
    np.testing.assert_allclose(p, [1.0, 0.0])
    assert speed == pytest.approx(2.0)


@pytest.mark.parametrize("curve, t", [
    (CircleArc((0.0, 0.0), 1.0, 0.0, 1.0), 1.5),
    (G2, -0.1),
    (PolylineSegment(), 1.01),
])
def test_outside_domain_raises(curve, t):
    with pytest.raises(CurveDomainError):
        curve_eval(curve, t)


@settings(max_examples=50, deadline=None)
@given(t=st.floats(-3.0, 3.0), r=st.floats(0.1, 10.0),
       cx=st.floats(-5, 5), cy=st.floats(-5, 5))
def test_circle_stays_on_circle(t, r, cx, cy):
    curve = CircleArc((cx, cy), r, -3.0, 3.0)
    p, d, speed = curve_eval(curve, t)
    assert abs(np.hypot(p[0] - cx, p[1] - cy) - r) <= 1e-14 * max(1.0, r, abs(cx), abs(cy))
    assert speed == pytest.approx(r, rel=1e-14)
    assert abs(np.dot(d, p - (cx, cy))) <= 1e-12 * r * r


@pytest.mark.parametrize("curve", [G1, G2, SineGraph(0.3, 2.0, -1.0, -1.0, 2.0)])
def test_sine_tangent_matches_difference_quotient(curve):
    t = np.linspace(curve.domain[0] + 0.01, curve.domain[1] - 0.01, 7)
    step = 1e-6
    fd = (curve(t + step) - curve(t - step)) / (2 * step)
    np.testing.assert_allclose(curve.evaluate(t)[1], fd, rtol=1e-8, atol=1e-9)


def test_chord_to_arc_ratio_tends_to_one():
    gaps = []
    for sectors in (8, 16, 32, 64):
        mesh = gen_polar_disk_mesh(1, sectors)
        e = next(i for i, edge in enumerate(mesh.edges) if edge.curved)
        arc = 2 * np.pi / sectors
        gaps.append(arc / mesh.chord_length(e) - 1.0)
    gaps = np.array(gaps)
    assert np.all(gaps > 0)
    # quadratic in the edge size
    np.testing.assert_allclose(gaps[:-1] / gaps[1:], 4.0, rtol=0.05)


# -- mesh topology and validation -----------------------------------------

def test_unit_square_validates():
    report = mesh_validate(unit_square_element(), 0.1)
    assert report.passed
    assert report.min_edge_ratio == pytest.approx(1 / np.sqrt(2))
    assert report.elements[0].diameter == pytest.approx(np.sqrt(2))


def test_repeated_vertex_is_a_hard_error():
    # pentagon visiting vertex 1 twice
    verts = [[0, 0], [1, 0], [1, 1], [0, 1]]
    edges = [Edge((0, 1)), Edge((1, 2)), Edge((2, 1)), Edge((1, 3)), Edge((3, 0))]
    mesh = Mesh(verts, edges, [Element((1, 2, 3, 4, 5))])
    with pytest.raises(MeshError) as err:
        mesh_validate(mesh, 0.1)
    assert err.value.offenders == [0]


def test_open_cycle_is_a_hard_error():
    verts = [[0, 0], [1, 0], [1, 1], [0, 1]]
    edges = [Edge((0, 1)), Edge((1, 2)), Edge((3, 0))]
    with pytest.raises(MeshError, match="open"):
        mesh_validate(Mesh(verts, edges, [Element((1, 2, 3))]), 0.1)


def test_dangling_edge_is_a_hard_error():
    mesh = unit_square_element()
    mesh = Mesh(np.vstack([mesh.vertices, [[2.0, 2.0]]]), list(mesh.edges) + [Edge((2, 4))],
                mesh.elements)
    with pytest.raises(MeshError, match="dangling") as err:
        mesh.check_topology()
    assert err.value.offenders == [4]


def test_same_orientation_on_both_sides_is_rejected():
    # two squares both traversing the shared edge forward
    verts = [[0, 0], [1, 0], [2, 0], [2, 1], [1, 1], [0, 1]]
    edges = [Edge((0, 1)), Edge((1, 4)), Edge((4, 5)), Edge((5, 0)),
             Edge((1, 2)), Edge((2, 3)), Edge((3, 4))]
    good = Mesh(verts, edges, [Element((1, 2, 3, 4)), Element((5, 6, 7, -2))])
    good.check_topology()
    bad = Mesh(verts, edges, [Element((1, 2, 3, 4)), Element((5, 6, 7, 2))])
    with pytest.raises(MeshError):
        bad.check_topology()


@pytest.mark.parametrize("bad", [
    dict(edges=[Edge((0, 7))], elements=[]),
    dict(edges=[Edge((0, 1), "nope", (0.0, 1.0))], elements=[]),
    dict(edges=[Edge((0, 1))], elements=[Element((1, 5))]),
])
def test_bad_references(bad):
    with pytest.raises(MeshError):
        Mesh([[0, 0], [1, 0]], **bad)


def test_kernel_ball_of_square_and_nonconvex_polygon():
    c, r = kernel_ball(np.array([[0, 0], [2, 0], [2, 2], [0, 2]], float))
    np.testing.assert_allclose(c, [1, 1], atol=1e-9)
    assert r == pytest.approx(1.0)
    # arrow shape: star-shaped, but the kernel is smaller than the inscribed disk
    arrow = np.array([[0, 0], [2, 1], [4, 0], [2, 3]], float)
    c, r = kernel_ball(arrow)
    assert 0 < r < 1.0
    # a polygon with empty kernel
    comb = np.array([[0, 0], [5, 0], [5, 1], [4, 1], [4, 0.1], [1, 0.1], [1, 1], [0, 1]], float)
    assert kernel_ball(comb)[1] <= 0.1 * 5


def test_diameter_sees_curved_bulge():
    mesh = gen_polar_disk_mesh(1, 3)
    # triangle (0,0), two boundary points 120 degrees apart: chord sqrt(3), arc reaches r=1
    h = element_diameter(mesh, 0)
    assert h > np.sqrt(3) - 1e-12
    assert h <= 2.0


# -- generators --------------------------------------------------------------

def test_sine_mapping_examples():
    x, y = map_to_sine_domain([0.5, 0.3, 0.7], [0.0, 0.5, 0.5])
    np.testing.assert_allclose(x, [0.5, 0.3, 0.7])
    np.testing.assert_allclose(y, [0.05, 0.5, 0.5], atol=1e-15)
    _, y = map_to_sine_domain([0.25], [1.0])
    np.testing.assert_allclose(y, G2.height(0.25))


@settings(max_examples=40, deadline=None)
@given(x=st.floats(0, 1), y=st.floats(0, 1))
def test_mapping_stays_between_the_curves(x, y):
    _, ym = map_to_sine_domain(x, y)
    assert G1.height(x) - 1e-15 <= ym <= G2.height(x) + 1e-15


def test_mapped_square_counts():
    mesh = gen_mapped_square_mesh(2)
    assert mesh.n_elements == 4
    curved = [e for e, edge in enumerate(mesh.edges) if edge.curved]
    assert len(curved) == 4
    assert set(curved) <= set(mesh.boundary_edges)
    mesh.check_topology()


def test_mapped_square_curve_binding():
    mesh = gen_mapped_square_mesh(4)
    for edge in mesh.edges:
        if edge.curved:
            pts, _ = mesh.curves[edge.curve].evaluate(np.array(edge.t))
            np.testing.assert_allclose(pts, mesh.vertices[list(edge.v)], atol=1e-15)
            expected = G1 if edge.curve == "g1" else G2
            assert mesh.curves[edge.curve] == expected


def test_polar_counts():
    mesh = gen_polar_disk_mesh(1, 4)
    assert mesh.n_elements == 4
    assert sum(e.curved for e in mesh.edges) == 4
    assert all(mesh.edges[e].curved for e in mesh.boundary_edges)


def test_polar_interface_kappa():
    mesh = gen_polar_disk_mesh(4, 16, interface_at_half=True)
    for K in range(mesh.n_elements):
        r = np.linalg.norm(mesh.chord_polygon(K), axis=1).max()
        assert mesh.elements[K].kappa == (1.0 if r <= 0.5 + 1e-12 else 5.0)
    on_half = [e for e, edge in enumerate(mesh.edges) if edge.curve == "interface"]
    assert on_half and not any(mesh.boundary_mask[on_half])
    radii = np.linalg.norm(mesh.vertices[[v for e in on_half for v in mesh.edges[e].v]], axis=1)
    np.testing.assert_allclose(radii, 0.5)


def test_polar_interface_needs_even_rings():
    with pytest.raises(ValueError):
        gen_polar_disk_mesh(3, 8, interface_at_half=True)


@pytest.mark.parametrize("sectors", [8, 16, 32, 64])
def test_polar_areas(sectors):
    mesh = gen_polar_disk_mesh(max(2, sectors // 8), sectors)
    chord = sum(polygon_area(mesh.chord_polygon(K)) for K in range(mesh.n_elements))
    curved = sum(bulk_rule(mesh, K, QuadratureOrders.for_order(1)).weights.sum()
                 for K in range(mesh.n_elements))
    assert curved == pytest.approx(np.pi, rel=1e-12)
    # inscribed polygon: pi - (n/2) sin(2 pi/n) ~ (2/3) pi^3 / n^2
    assert 0 < np.pi - chord <= 25.0 / sectors ** 2


@pytest.mark.parametrize("make", [
    lambda: gen_polar_disk_mesh(1, 4),
    lambda: gen_polar_disk_mesh(8, 64),
    lambda: gen_polar_disk_mesh(8, 64, interface_at_half=True),
    lambda: gen_mapped_square_mesh(1),
    lambda: gen_mapped_square_mesh(32),
])
def test_generated_meshes_validate(make):
    mesh = make()
    assert mesh_validate(mesh, 0.05).passed
    assert mesh_validate(mesh, 0.1).passed


def test_orientation_consistency():
    mesh = gen_polar_disk_mesh(4, 32, interface_at_half=True)
    for e, uses in enumerate(mesh.edge_uses):
        signs = sorted(s for _, s in uses)
        assert signs == ([-1, 1] if len(uses) == 2 else signs)
        assert len(uses) in (1, 2)


# -- I/O ---------------------------------------------------------------------

@pytest.mark.parametrize("make", [
    lambda: gen_polar_disk_mesh(4, 16, interface_at_half=True),
    lambda: gen_mapped_square_mesh(3),
    unit_square_element,
])
def test_round_trip(tmp_path, make):
    mesh = make()
    path = tmp_path / "m.json"
    mesh_write(mesh, path)
    back = mesh_read(path)
    assert back == mesh
    assert np.array_equal(back.vertices, mesh.vertices)


def test_unknown_curve_id():
    data = mesh_to_dict(gen_polar_disk_mesh(1, 4))
    e = next(i for i, edge in enumerate(data["edges"]) if edge["curve"])
    data["edges"][e]["curve"] = "missing"
    with pytest.raises(MeshParseError) as err:
        mesh_from_dict(data)
    assert err.value.pointer == f"/edges/{e}/curve"


@pytest.mark.parametrize("mutate, pointer", [
    (lambda d: d["vertices"].__setitem__(2, [0.0]), "/vertices/2"),
    (lambda d: d["elements"][1].__setitem__("kappa", -1.0), "/elements/1/kappa"),
    (lambda d: d["elements"][0]["edges"].__setitem__(0, 99), "/elements/0/edges/0"),
    (lambda d: d["edges"][0].__setitem__("v", [0, 1000]), "/edges/0/v"),
    (lambda d: d.pop("edges"), "/"),
])
def test_schema_errors_carry_pointer(mutate, pointer):
    data = mesh_to_dict(gen_polar_disk_mesh(1, 4))
    mutate(data)
    with pytest.raises(MeshParseError) as err:
        mesh_from_dict(data)
    assert (err.value.pointer or "/") == pointer


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{\"vertices\": [")
    with pytest.raises(MeshParseError, match="invalid JSON"):
        mesh_read(path)


@pytest.mark.parametrize("cells", VORONOI_SIZES)
def test_voronoi_fixture_loads_curved(cells):
    square = mesh_read(FIXTURES / f"voronoi_{cells}.json")
    assert square.n_elements == cells
    assert mesh_validate(square, 0.05).passed
    mesh = gen_mapped_square_mesh(square_mesh=square)
    curved = [e for e, edge in enumerate(mesh.edges) if edge.curved]
    assert curved and set(curved) <= set(mesh.boundary_edges)
    assert mesh_validate(mesh, 0.05).passed
    json.loads((FIXTURES / f"voronoi_{cells}.json").read_text())


def test_straightened_drops_curves():
    mesh = gen_polar_disk_mesh(2, 8).straightened()
    assert not any(e.curved for e in mesh.edges) and not mesh.curves


def test_unit_square_quads_area():
    mesh = unit_square_quads(5)
    assert sum(polygon_area(mesh.chord_polygon(K)) for K in range(25)) == pytest.approx(1.0)
