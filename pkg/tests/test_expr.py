import pytest
from hypothesis import given, settings, strategies as st

from nrtkit.errors import ParseError, ValidationError
from nrtkit.expr import group, parse_group_expr, render
from nrtkit.groups import are_isomorphic, is_normal, subgroups_all

EXPRS = [
    "C(1)", "C(7)", "D(2)", "D(4)", "D(10)", "Q8", "Sym(1)", "Sym(4)", "Alt(4)", "Alt(5)",
    "Perm[4: (1,2,3,4); (1,3)]", "Alt(4) x C(2)", "C(3) : C(4) [inv]", "C(7) : C(3) [pow(2)]",
    "Q8 : C(3) [aut(5)]", "(C(3) x C(3)) : C(2) [inv]", "C(2) x (C(2) x C(2))",
    "C(2) x C(2) : C(3) [img(0, 2, 3, 1)]",
]


@pytest.mark.parametrize("text", EXPRS)
def test_render_round_trip(text):
    ast = parse_group_expr(text)
    again = parse_group_expr(render(ast))
    assert again == ast
    G = group(text)
    if G.order <= 24:
        assert are_isomorphic(G, group(render(ast)))


@pytest.mark.parametrize("text,order", [("C(6)", 6), ("D(12)", 12), ("Q8", 8), ("Sym(5)", 120), ("Alt(5)", 60),
                                        ("Alt(4) x C(2)", 24), ("C(7) : C(3) [pow(2)]", 21)])
def test_orders(text, order):
    assert group(text).order == order


@pytest.mark.parametrize("a,b", [
    ("C(3) : C(2) [inv]", "Sym(3)"),
    ("C(6) : C(2) [inv]", "D(12)"),
    ("C(2) x C(3)", "C(6)"),
    ("Alt(4) x C(2)", "C(2) x Alt(4)"),
    ("D(8)", "Perm[4: (1,2,3,4); (1,3)]"),
    ("C(2) x C(2) : C(3) [img(0, 2, 3, 1)]", "Alt(4)"),
])
def test_isomorphic_constructions(a, b):
    assert are_isomorphic(group(a), group(b))


def test_semidirect_not_direct():
    G = group("C(3) : C(4) [inv]")
    assert not G.is_abelian()
    assert sum(1 for h in subgroups_all(G) if h.order == 2) == 1
    assert all(is_normal(group("Q8"), h) for h in subgroups_all(group("Q8")))


@pytest.mark.parametrize("text,pos", [("C(", 2), ("Foo(3)", 0), ("C(0)", 2), ("Sym(8)", 4), ("Alt(9)", 4),
                                      ("Sym(4) x", 8), ("Perm[3: (1,2,4)]", 13), ("C(3) C(3)", 5)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_group_expr(text) if text != "Sym(8)" else group(text)
    assert exc.value.pos == pos
    assert "<HERE>" in str(exc.value)


@pytest.mark.parametrize("text", ["C(4) : C(3) [pow(3)]", "C(3) : C(2) [aut(7)]", "C(5) : C(2) [img(2)]"])
def test_invalid_actions_rejected(text):
    with pytest.raises(ValidationError):
        group(text)


atoms = st.one_of(
    st.integers(1, 6).map(lambda n: f"C({n})"),
    st.integers(1, 4).map(lambda n: f"D({2 * n})"),
    st.sampled_from(["Q8", "Sym(3)", "Alt(4)"]),
)


@settings(max_examples=25, deadline=None)
@given(atoms, atoms)
def test_direct_product_commutes(a, b):
    G, K = group(f"{a} x {b}"), group(f"{b} x {a}")
    assert G.order == K.order
    if G.order <= 24:
        assert are_isomorphic(G, K)
