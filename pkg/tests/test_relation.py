import numpy as np
import pytest

from saq.errors import DimensionError, ParseError, PerpendicularityError, RankDeficiencyError
from saq.relation import (
    PresentationError,
    class_membership,
    focal_regularity,
    load_relation,
    normal_frame,
    nu_differential,
    tangent_frame,
)
from saq import kernels

from conftest import CORPUS, circle_relation, relation


def test_corpus_loads():
    shapes = {name: (relation(name).n, relation(name).k) for name in CORPUS}
    assert shapes["parallel_lines"] == (2, 1)
    assert shapes["circles"] == (2, 1)
    assert shapes["rays"] == (2, 1)
    assert shapes["spheres"] == (3, 1)
    assert shapes["horizontal_circles"] == (3, 2)
    assert len(relation("rays").class_ineqs) == 1


def test_complexity_from_dnf():
    # {g = 0, h > 0} with the domain condition pulled back to both factors
    rel = relation("rays")
    R = rel.as_set()
    assert R.nvars == 4
    assert len(R.pieces) == 1 and len(R.pieces[0].conditions) == 4
    assert rel.complexity.value == 4


def test_text_roundtrip_and_hash():
    for name in CORPUS:
        rel = relation(name)
        again = load_relation(rel.to_text())
        assert again == rel and again.hash == rel.hash


@pytest.mark.parametrize("text, match", [
    ("relation { ambient: 1\n class_eqs: [\"y1 - x1\", \"y1^2 - x1^2\"] }", "exceed"),
    ("relation { ambient: 2\n class_eqs: [] }", "at least one"),
])
def test_presentation_errors(text, match):
    with pytest.raises(PresentationError, match=match):
        load_relation(text)


@pytest.mark.parametrize("text", [
    "relation { ambient: 2 }",
    "relation { ambient: two\n class_eqs: [\"y1\"] }",
    "relation { ambient: 2\n class_eqs: [\"y1 - \"] }",
    "relation { ambient: 2\n class_eqs: [\"y3\"] }",
    "relation { ambient: 2\n class_eqs: [y1] }",
    "ambient: 2",
])
def test_syntax_errors(text):
    with pytest.raises(ParseError):
        load_relation(text)


def test_membership_examples():
    rel = relation("circles")
    assert class_membership(rel, [3, 4], [5, 0])
    assert not class_membership(rel, [3, 4], [1, 0])
    for name in CORPUS:
        r = relation(name)
        x = np.arange(1, r.n + 1, dtype=float) / 2
        assert class_membership(r, x, x)
    with pytest.raises(DimensionError):
        class_membership(rel, [1, 2, 3], [1, 2])
    assert not class_membership(relation("rays"), [1, 1], [-1, -1])


def _same_span(a, b):
    return np.allclose(a.T @ np.linalg.pinv(a.T) @ b.T, b.T, atol=1e-12)


def test_frame_examples():
    rel = relation("circles")
    t = tangent_frame(rel, [5, 0], [5, 0]).basis
    n = normal_frame(rel, [5, 0], [5, 0]).basis
    assert np.allclose(t, [[0, 1]]) and np.allclose(n, [[1, 0]])
    pl = relation("parallel_lines")
    s = 2 ** -0.5
    t = tangent_frame(pl, [1, 2], [4, 5]).basis
    n = normal_frame(pl, [1, 2], [4, 5]).basis
    assert _same_span(t, np.array([[s, s]]))
    assert _same_span(n, np.array([[s, -s]]))


def test_rank_deficiency_reported():
    rel = relation("circles")
    with pytest.raises(RankDeficiencyError) as info:
        tangent_frame(rel, [0, 0], [0, 0])
    assert info.value.rank == 0 and info.value.expected == 1


@pytest.mark.parametrize("name", CORPUS)
def test_frames_orthonormal_and_spanning(name, rng):
    rel = relation(name)
    for _ in range(30):
        x = rng.uniform(-3, 3, rel.n)
        y, gn, _ = kernels.project(rel.system, rel.n, rel.k, x, x + rng.standard_normal(rel.n))
        if gn > 1e-10:
            continue
        t = tangent_frame(rel, x, y).basis
        n = normal_frame(rel, x, y).basis
        B = np.vstack([t, n])
        assert B.shape == (rel.n, rel.n)
        assert np.allclose(B @ B.T, np.eye(rel.n), atol=1e-10)
        assert np.linalg.cond(B) < 1e6
        assert np.allclose(rel.jacobian_y(x, y) @ t.T, 0, atol=1e-9)


def test_focal_examples():
    rel = relation("circles")
    assert not focal_regularity(rel, [3, 4], [5, 0], [0, 0])
    assert focal_regularity(rel, [3, 4], [5, 0], [1, 0])
    pl = relation("parallel_lines")
    for t in (-3.0, 0.0, 0.5, 40.0):
        assert focal_regularity(pl, [2, 0], [1, -1], [1 + t, -1 - t])


def test_focal_precondition():
    rel = relation("circles")
    with pytest.raises(PerpendicularityError) as info:
        focal_regularity(rel, [3, 4], [5, 0], [5, 3])
    assert info.value.residual == pytest.approx(3)


def test_focal_on_shifted_circles():
    rel = circle_relation(("1/2", "-3"))
    c = np.array([0.5, -3.0])
    x = c + [2, 0]
    assert not focal_regularity(rel, x, x, c)
    assert focal_regularity(rel, x, x, c + [0.3, 0])
    assert focal_regularity(rel, x, x, c - [0.3, 0])


def test_focal_invariant_under_presentation_rescaling(rng):
    circles = relation("circles")
    scaled = load_relation("""relation { ambient: 2
      class_eqs: ["5*(y1^2 + y2^2 - x1^2 - x2^2)"]
      domain: { x1^2 + x2^2 > 0 } }""")
    hc = relation("horizontal_circles")
    mixed = load_relation("""relation { ambient: 3
      class_eqs: ["2*(y3 - x3) + (y1^2 + y2^2 - x1^2 - x2^2)", "3*(y1^2 + y2^2 - x1^2 - x2^2)"]
      domain: { x1^2 + x2^2 > 0 } }""")
    flips = 0
    for a, b in [(circles, scaled), (hc, mixed)]:
        for _ in range(250):
            x = rng.uniform(-3, 3, a.n)
            y, gn, _ = kernels.project(a.system, a.n, a.k, x, x + rng.standard_normal(a.n))
            if gn > 1e-10:
                continue
            nb = normal_frame(a, x, y).basis
            # near-focal points: along the normal line, close to the axis
            p = y + nb.T @ rng.uniform(-1.5, 1.5, a.k) * np.linalg.norm(y[:2])
            flips += focal_regularity(a, x, y, p) != focal_regularity(b, x, y, p)
    assert flips == 0


def test_affine_classes_never_focal(rng):
    pl = relation("parallel_lines")
    for _ in range(200):
        x = rng.uniform(-5, 5, 2)
        y = x + rng.uniform(-5, 5) * np.array([1.0, 1.0])
        p = y + rng.uniform(-50, 50) * np.array([1.0, -1.0])
        assert focal_regularity(pl, x, y, p)


def test_nu_differential_shape():
    rel = relation("spheres")
    D, tangent = nu_differential(rel, [1, 2, 2], [3, 0, 0], [0.5])
    assert D.shape == (3, 3) and tangent.shape == (2, 3)
