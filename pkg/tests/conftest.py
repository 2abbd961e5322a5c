import numpy as np
import pytest

from germstable.jet_funcs.curve import FormalCurveJet
from germstable.jet_funcs.germ import GermDiffeo, PolynomialMap
from germstable.jet_funcs.jets import UniJet
from germstable.proc_funcs.reduction import attracting_directions, reduce_pair
from germstable.util_funcs.parsers import parse_germ_spec

ORDER = 16

NODE_SPEC = """\
# node at xi = 1, saddle at xi = -1
F1 = x - x^3
F2 = y*(1 - x)
order = 16
"""


def germ_from_terms(terms1, terms2, order=ORDER):
    return GermDiffeo.from_terms(terms1, terms2, order)


def axis_curve(order=ORDER):
    return FormalCurveJet(UniJet.variable(order), UniJet([0], order))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def node_germ():
    """(x - x^3, y (1 - x)): k = 1, p = 1, mu = 1."""
    return germ_from_terms({(1, 0): 1, (3, 0): -1}, {(0, 1): 1, (1, 1): -1})


@pytest.fixture
def saddle_germ():
    """(x - x^2, y (1 + x)): k = 1, p = 0, mu = 1, the x-axis is a parabolic curve."""
    return germ_from_terms({(1, 0): 1, (2, 0): -1}, {(0, 1): 1, (1, 1): 1})


@pytest.fixture
def node_map():
    return PolynomialMap.from_coefficients(
        [[0, 0], [1, 0], [0, 0], [-1, 0]], [[0, 1], [0, -1]]
    )


@pytest.fixture
def saddle_map():
    return PolynomialMap.from_coefficients([[0, 0], [1, 0], [-1, 0]], [[0, 1], [0, 1]])


@pytest.fixture
def node_pair(node_germ):
    return reduce_pair(node_germ, axis_curve())


@pytest.fixture
def saddle_pair(saddle_germ):
    return reduce_pair(saddle_germ, axis_curve())


@pytest.fixture
def node_directions(node_pair):
    return attracting_directions(node_pair)


@pytest.fixture
def node_spec():
    return parse_germ_spec(NODE_SPEC)


@pytest.fixture
def spec_file(tmp_path):
    def write(text, name="germ.spec"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write
