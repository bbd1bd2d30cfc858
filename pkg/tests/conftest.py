import numpy as np
import pytest

from saq.atlas import AtlasConfig, build_atlas
from saq.relation import corpus_path, load_relation, load_relation_file
from saq.validate import validate_relation

# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []

CORPUS = ["parallel_lines", "circles", "rays", "spheres", "horizontal_circles"]


def relation(name):
    return load_relation_file(corpus_path(name))


def circle_relation(c):
    """Concentric circles around the rational point ``c``."""
    a, b = c
    text = f"""relation {{
      ambient: 2
      class_eqs: ["(y1 - ({a}))^2 + (y2 - ({b}))^2 - (x1 - ({a}))^2 - (x2 - ({b}))^2"]
      domain: {{ (x1 - ({a}))^2 + (x2 - ({b}))^2 > 0 }}
    }}"""
    return load_relation(text)


@pytest.fixture(scope="session")
def rels():
    return {name: relation(name) for name in CORPUS}


@pytest.fixture(scope="session")
def validations(rels):
    return {name: validate_relation(rel, 20, 0) for name, rel in rels.items()}


_ATLAS_CACHE = {}


def cached_atlas(rels, validations, name, **kw):
    key = (name, tuple(sorted(kw.items())))
    if key not in _ATLAS_CACHE:
        from saq.errors import IncompleteCoverage

        try:
            _ATLAS_CACHE[key] = build_atlas(rels[name], AtlasConfig(**kw), validations[name])
        except IncompleteCoverage as exc:
            _ATLAS_CACHE[key] = exc.atlas
    return _ATLAS_CACHE[key]


@pytest.fixture(scope="session")
def atlas_factory(rels, validations):
    def make(name, **kw):
        return cached_atlas(rels, validations, name, **kw)

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda t: int(t.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
