import numpy as np
import pytest

from saq.errors import Ambiguous, InequalityBoundary, NotCovered
from saq.relation import load_relation, class_membership, focal_report, tangent_frame
from saq.slicer import SolverConfig, all_feet, in_slice, nearest_foot, representative

from conftest import CORPUS, relation


def test_in_slice_examples():
    pl = relation("parallel_lines")
    assert in_slice(pl, [0, 0], [1, -1])
    assert not in_slice(pl, [0, 0], [1, 1])
    c = relation("circles")
    assert in_slice(c, [1, 0], [2, 0])
    assert not in_slice(c, [1, 0], [0, 2])
    assert not in_slice(c, [0, 0], [2, 0])


def test_nearest_foot_examples():
    f = nearest_foot(relation("parallel_lines"), [2, 0], [0, 0])
    assert np.allclose(f.y_star, [1, -1], atol=1e-12)
    assert f.distance == pytest.approx(2 ** 0.5)
    assert f.regular and f.global_min
    f = nearest_foot(relation("circles"), [3, 4], [1, 0])
    assert np.allclose(f.y_star, [5, 0], atol=1e-10)
    assert f.distance == pytest.approx(4)
    for name in CORPUS:
        rel = relation(name)
        x = np.linspace(0.5, 1.5, rel.n)
        f = nearest_foot(rel, x, x)
        assert np.allclose(f.y_star, x, atol=1e-12) and f.distance < 1e-12


def test_all_feet_examples():
    feet = all_feet(relation("circles"), [3, 4], [1, 0])
    assert len(feet) == 2
    assert np.allclose(feet[0].y_star, [5, 0], atol=1e-9) and feet[0].distance == pytest.approx(4)
    assert np.allclose(feet[1].y_star, [-5, 0], atol=1e-9) and feet[1].distance == pytest.approx(6)
    assert len(all_feet(relation("parallel_lines"), [3, -1], [7, 2])) == 1
    feet = all_feet(relation("rays"), [1, 1], [1, 0])
    assert len(feet) == 1 and np.allclose(feet[0].y_star, [0.5, 0.5], atol=1e-12)


def test_representative_examples():
    c = relation("circles")
    assert np.allclose(representative(c, [3, 4], [1, 0]), [5, 0], atol=1e-9)
    with pytest.raises(NotCovered) as info:
        representative(c, [3, 4], [0, 0])
    assert info.value.reason == "focal"
    pl = relation("parallel_lines")
    for a, b in [(3, -5), (0.25, 7), (-2, -2)]:
        assert np.allclose(representative(pl, [a, b], [0, 0]), [(a - b) / 2, (b - a) / 2], atol=1e-12)


def test_ray_behind_chart_point_not_covered():
    r = relation("rays")
    with pytest.raises(InequalityBoundary):
        nearest_foot(r, [-1, 0.2], [1, 0])
    with pytest.raises(NotCovered) as info:
        representative(r, [-1, 0.2], [1, 0])
    assert info.value.reason == "boundary"


def test_cut_locus_is_ambiguous():
    # classes {|y2| = |x2|} are pairs of lines, equidistant from the x1-axis
    rel = load_relation("""relation { ambient: 2
      class_eqs: ["y2^2 - x2^2"]
      domain: { x2^2 > 0 } }""")
    with pytest.raises(Ambiguous) as info:
        representative(rel, [1, 2], [0, 0])
    assert len(info.value.feet) == 2
    assert np.allclose(representative(rel, [1, 2], [0, 0.5]), [0, 2], atol=1e-9)


def test_axis_points_are_focal_for_revolution_classes():
    rel = relation("horizontal_circles")
    with pytest.raises(NotCovered) as info:
        representative(rel, [3, 0, 0], [0, 0, 1])
    assert info.value.reason == "focal"
    with pytest.raises(NotCovered):
        representative(relation("spheres"), [0, 0, 2], [0, 0, 0])


@pytest.mark.parametrize("name", CORPUS)
def test_returned_feet_are_perpendicular_class_points(name, rng):
    rel = relation(name)
    cfg = SolverConfig()
    for _ in range(40):
        x = rng.uniform(-3, 3, rel.n)
        p = rng.uniform(-3, 3, rel.n)
        if not rel.in_domain(x):
            continue
        for f in all_feet(rel, x, p, cfg=cfg):
            assert class_membership(rel, x, f.y_star, 1e-9)
            assert f.residual <= cfg.tol_foot * max(1.0, f.distance)
            t = tangent_frame(rel, x, f.y_star).basis
            assert np.linalg.norm(t @ (p - f.y_star)) <= 1e-9 * max(1.0, f.distance)


@pytest.mark.parametrize("name", CORPUS)
def test_regular_feet_have_full_rank_slice_differential(name, rng):
    rel = relation(name)
    for _ in range(30):
        x = rng.uniform(-3, 3, rel.n)
        p = rng.uniform(-3, 3, rel.n)
        try:
            f = nearest_foot(rel, x, p)
        except Exception:
            continue
        if f.regular:
            rep = focal_report(rel, x, f.y_star, p)
            assert rep.sigma_min > 1e-6 * rep.sigma_max


@pytest.mark.parametrize("name, chart", [
    ("circles", [1, 0]), ("parallel_lines", [0, 0]), ("rays", [1, 0]), ("spheres", [1, 0, 0]),
])
def test_representative_idempotent(name, chart, rng):
    rel = relation(name)
    done = 0
    for _ in range(40):
        x = rng.uniform(-3, 3, rel.n)
        try:
            y = representative(rel, x, chart)
        except (NotCovered, Ambiguous):
            continue
        assert np.allclose(representative(rel, y, chart), y, atol=1e-7)
        done += 1
    assert done >= 15


def test_solves_independent_of_call_order():
    rel = relation("circles")
    pts = [[3, 4], [-1, 2], [0.5, -0.5]]
    fwd = [all_feet(rel, x, [1, 0.2]) for x in pts]
    back = [all_feet(rel, x, [1, 0.2]) for x in reversed(pts)][::-1]
    for a, b in zip(fwd, back):
        assert [f.y_star.tolist() for f in a] == [f.y_star.tolist() for f in b]
