import pytest

from nrtkit.catalog import select_subgroup
from nrtkit.expr import group


def pair(expr: str, selector: str):
    G = group(expr)
    return G, select_subgroup(G, selector)


@pytest.fixture
def d8_pair():
    return pair("D(8)", "gens:(1,2)(3,4)")


@pytest.fixture
def s4_s3():
    return pair("Sym(4)", "stab:4")
