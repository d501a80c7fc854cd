import xml.etree.ElementTree as ET

import pytest

from apollokit.configs import seed_integral_n2, seed_polystrip
from apollokit.ensembles import distinct_sphere_rows, generate_orbit
from apollokit.errors import DimensionError
from apollokit.render import STROKE, auto_viewport, clip_line, render_svg
from apollokit.spheres import Hyperplane, Sphere

NS = "{http://www.w3.org/2000/svg}"


def test_clip_horizontal_line():
    seg = clip_line((0.0, 1.0), 0.5, (-1, -1, 1, 1))
    assert seg is not None
    xs = sorted([seg[0], seg[2]])
    assert xs == pytest.approx([-1, 1])
    assert seg[1] == pytest.approx(0.5) and seg[3] == pytest.approx(0.5)


def test_clip_line_outside_box():
    assert clip_line((1.0, 0.0), 5.0, (-1, -1, 1, 1)) is None
    assert clip_line((0.6, 0.8), 10.0, (-1, -1, 1, 1)) is None


def test_clip_diagonal_line():
    h = 2 ** -0.5
    seg = clip_line((h, h), 0.0, (-1, -1, 1, 1))
    a, b = (seg[0], seg[1]), (seg[2], seg[3])
    assert sorted([a, b]) == [pytest.approx((-1, 1)), pytest.approx((1, -1))]


def test_seed_svg_counts_and_colors():
    svg = render_svg(seed_integral_n2().spheres())
    root = ET.fromstring(svg)
    circles = root.findall(f"{NS}circle")
    assert len(circles) == 4
    colors = [c.get("stroke") for c in circles]
    assert colors.count(STROKE["outward"]) == 1
    assert colors.count(STROKE["inward"]) == 3


def test_lines_drawn_in_line_color():
    spheres = seed_polystrip(2).spheres()
    root = ET.fromstring(render_svg(spheres, viewport=(-3, -3, 3, 3)))
    lines = root.findall(f"{NS}line")
    assert len(lines) == sum(isinstance(s, Hyperplane) for s in spheres) == 2
    assert all(l.get("stroke") == STROKE["line"] for l in lines)


def test_orbit_render_is_valid_xml():
    o = generate_orbit(seed_integral_n2(), depth=3)
    shapes = [o.elements[ci][1].spheres()[ri] for _, ci, ri in distinct_sphere_rows(o)]
    root = ET.fromstring(render_svg(shapes, size=300))
    assert len(root.findall(f"{NS}circle")) == len(shapes)


def test_auto_viewport_ignores_huge_circles():
    small = [Sphere((0.0, 0.0), 1.0), Sphere((3.0, 0.0), 1.0), Sphere((0.0, 0.0), 1000.0)]
    x0, y0, x1, y1 = auto_viewport(small, margin=0.0)
    assert (x0, x1) == (-1.0, 4.0)
    assert auto_viewport([Hyperplane((1.0, 0.0), 0.0)]) == (-2.0, -2.0, 2.0, 2.0)


def test_three_dimensions_rejected():
    with pytest.raises(DimensionError):
        render_svg(seed_polystrip(3).spheres())


def test_empty_viewport_rejected():
    with pytest.raises(ValueError):
        render_svg(seed_integral_n2().spheres(), viewport=(1, 0, 0, 1))
