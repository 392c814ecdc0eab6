"""A small language for naming groups.

Grammar (whitespace-insensitive, products left-associative)::

    expr    := term (('x' term) | (':' term action))*
    term    := atom | '(' expr ')'
    atom    := 'C(' n ')' | 'D(' 2n ')' | 'Q8' | 'Sym(' n ')' | 'Alt(' n ')'
             | 'Perm[' d ':' cycles (';' cycles)* ']'
    action  := '[' ('id' | 'inv' | 'pow(' k ')' | 'aut(' i, ... ')'
                    | 'img(' i, ... (';' i, ...)* ')') ']'

``a : b [action]`` is the semidirect product with ``a`` normal; the action
gives, for each generator of ``b``, an automorphism of ``a``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from . import perm as P
from .errors import ParseError, ValidationError
from .groups import GroupTable, automorphisms, build_from_generators, generating_sequence

MAX_SYM = 7
MAX_CYCLIC = 10_000


@dataclass(frozen=True)
class Cyclic:
    n: int


@dataclass(frozen=True)
class Dihedral:
    order: int


@dataclass(frozen=True)
class Quaternion8:
    pass


@dataclass(frozen=True)
class Sym:
    n: int


@dataclass(frozen=True)
class Alt:
    n: int


@dataclass(frozen=True)
class PermGroup:
    degree: int
    gens: tuple[P.Perm, ...]


@dataclass(frozen=True)
class Action:
    kind: str  # id | inv | pow | aut | img
    args: tuple = ()


@dataclass(frozen=True)
class DirectProduct:
    a: "GroupExpr"
    b: "GroupExpr"


@dataclass(frozen=True)
class SemidirectProduct:
    a: "GroupExpr"
    b: "GroupExpr"
    action: Action


GroupExpr = Union[Cyclic, Dihedral, Quaternion8, Sym, Alt, PermGroup, DirectProduct, SemidirectProduct]


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<punct>[()\[\]:;,]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError("unexpected character", text, start)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        val = m.group(kind)
        # no name starts with 'x', so a leading 'x' is always the product operator
        while kind == "name" and val.startswith("x"):
            toks.append(("x", "x", start))
            val = val[1:]
            start += 1
            if not val:
                break
            if val[0].isdigit():
                raise ParseError("unexpected number", text, start)
        if val:
            toks.append((kind, val, start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg: str, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, self.text, tok[2])

    def take(self, val: str):
        if self.tok[1] != val:
            self.error(f"expected {val!r}, found {self.tok[1] or 'end of input'!r}")
        self.i += 1

    def take_int(self) -> int:
        if self.tok[0] != "int":
            self.error("expected integer")
        v = int(self.tok[1])
        self.i += 1
        return v

    def parse(self) -> GroupExpr:
        e = self.expr()
        if self.tok[0] != "end":
            self.error("trailing input")
        return e

    def expr(self) -> GroupExpr:
        left = self.term()
        while True:
            if self.tok[0] == "x":
                self.i += 1
                left = DirectProduct(left, self.term())
            elif self.tok[1] == ":":
                self.i += 1
                right = self.term()
                left = SemidirectProduct(left, right, self.action())
            else:
                return left

    def term(self) -> GroupExpr:
        if self.tok[1] == "(":
            self.i += 1
            e = self.expr()
            self.take(")")
            return e
        return self.atom()

    def _arg(self, lo: int, hi: int) -> int:
        self.take("(")
        tok = self.tok
        n = self.take_int()
        if not lo <= n <= hi:
            self.error(f"argument {n} out of range [{lo}, {hi}]", tok)
        self.take(")")
        return n

    def atom(self) -> GroupExpr:
        tok = self.tok
        name = tok[1]
        if tok[0] != "name":
            self.error("expected a group")
        self.i += 1
        if name == "C":
            return Cyclic(self._arg(1, MAX_CYCLIC))
        if name == "D":
            n = self._arg(2, MAX_CYCLIC)
            if n % 2:
                self.error("dihedral order must be even", tok)
            return Dihedral(n)
        if name == "Q8":
            return Quaternion8()
        if name == "Sym":
            return Sym(self._arg(1, MAX_SYM))
        if name == "Alt":
            return Alt(self._arg(1, MAX_SYM))
        if name == "Perm":
            return self.perm_body()
        self.error(f"unknown group {name!r}", tok)

    def perm_body(self) -> PermGroup:
        self.take("[")
        tok = self.tok
        degree = self.take_int()
        if not 1 <= degree <= 64:
            self.error("degree out of range [1, 64]", tok)
        self.take(":")
        gens = [self.cycles(degree)]
        while self.tok[1] == ";":
            self.i += 1
            gens.append(self.cycles(degree))
        self.take("]")
        return PermGroup(degree, tuple(g for g in gens if g != P.identity(degree)))

    def cycles(self, degree: int) -> P.Perm:
        result = P.identity(degree)
        if self.tok[1] != "(":
            self.error("expected a cycle")
        while self.tok[1] == "(":
            self.i += 1
            pts = []
            while self.tok[1] != ")":
                tok = self.tok
                v = self.take_int()
                if not 1 <= v <= degree:
                    self.error(f"point {v} outside degree {degree}", tok)
                if v in pts:
                    self.error(f"repeated point {v}", tok)
                pts.append(v)
                if self.tok[1] == ",":
                    self.i += 1
            self.take(")")
            if pts:
                result = P.compose(result, P.from_cycle_list([pts], degree))
        return result

    def action(self) -> Action:
        self.take("[")
        tok = self.tok
        if tok[0] != "name":
            self.error("expected an action name")
        kind = tok[1]
        self.i += 1
        if kind in ("id", "inv"):
            act = Action(kind)
        elif kind == "pow":
            self.take("(")
            k = self.take_int()
            self.take(")")
            act = Action("pow", (k,))
        elif kind == "aut":
            self.take("(")
            idx = [self.take_int()]
            while self.tok[1] == ",":
                self.i += 1
                idx.append(self.take_int())
            self.take(")")
            act = Action("aut", tuple(idx))
        elif kind == "img":
            self.take("(")
            maps = [self.int_list()]
            while self.tok[1] == ";":
                self.i += 1
                maps.append(self.int_list())
            self.take(")")
            act = Action("img", tuple(maps))
        else:
            self.error(f"unknown action {kind!r}", tok)
        self.take("]")
        return act

    def int_list(self) -> tuple[int, ...]:
        vals = [self.take_int()]
        while self.tok[1] == ",":
            self.i += 1
            vals.append(self.take_int())
        return tuple(vals)


def parse_group_expr(text: str) -> GroupExpr:
    return _Parser(text).parse()


def render(e: GroupExpr) -> str:
    """Text form that parses back to an equal expression."""
    if isinstance(e, Cyclic):
        return f"C({e.n})"
    if isinstance(e, Dihedral):
        return f"D({e.order})"
    if isinstance(e, Quaternion8):
        return "Q8"
    if isinstance(e, Sym):
        return f"Sym({e.n})"
    if isinstance(e, Alt):
        return f"Alt({e.n})"
    if isinstance(e, PermGroup):
        body = "; ".join(P.to_cycles(g) for g in e.gens) or "()"
        return f"Perm[{e.degree}: {body}]"
    if isinstance(e, DirectProduct):
        return f"{render(e.a)} x {_wrap(e.b)}"
    if isinstance(e, SemidirectProduct):
        return f"{render(e.a)} : {_wrap(e.b)} [{_render_action(e.action)}]"
    raise TypeError(f"not a group expression: {e!r}")


def _wrap(e: GroupExpr) -> str:
    s = render(e)
    return f"({s})" if isinstance(e, (DirectProduct, SemidirectProduct)) else s


def _render_action(a: Action) -> str:
    if a.kind in ("id", "inv"):
        return a.kind
    if a.kind in ("pow", "aut"):
        return f"{a.kind}({', '.join(map(str, a.args))})"
    return "img(" + "; ".join(", ".join(map(str, m)) for m in a.args) + ")"


# --------------------------------------------------------------------------
# realization


def atom_generators(e: GroupExpr) -> tuple[int, list[P.Perm]]:
    """Degree and generating permutations for an atom."""
    if isinstance(e, Cyclic):
        n = e.n
        return n, [P.from_cycle_list([range(1, n + 1)], n)] if n > 1 else []
    if isinstance(e, Dihedral):
        m = e.order // 2
        if m == 1:
            return 2, [P.from_cycle_list([(1, 2)], 2)]
        if m == 2:
            return 4, [P.from_cycles("(1,2)(3,4)", 4), P.from_cycles("(1,3)(2,4)", 4)]
        rot = P.from_cycle_list([range(1, m + 1)], m)
        refl = tuple((m - i) % m for i in range(m))
        return m, [rot, refl]
    if isinstance(e, Quaternion8):
        return 8, [P.from_cycles("(1,2,3,4)(5,6,7,8)", 8), P.from_cycles("(1,5,3,7)(2,8,4,6)", 8)]
    if isinstance(e, Sym):
        n = e.n
        if n == 1:
            return 1, []
        if n == 2:
            return 2, [P.from_cycle_list([(1, 2)], 2)]
        return n, [P.from_cycle_list([(1, 2)], n), P.from_cycle_list([range(1, n + 1)], n)]
    if isinstance(e, Alt):
        n = e.n
        return n, [P.from_cycle_list([(1, 2, k)], n) for k in range(3, n + 1)]
    if isinstance(e, PermGroup):
        return e.degree, list(e.gens)
    raise TypeError(f"not an atom: {e!r}")


@lru_cache(maxsize=256)
def realize(e: GroupExpr) -> GroupTable:
    label = render(e)
    if isinstance(e, DirectProduct):
        return _direct_product(realize(e.a), realize(e.b), label)
    if isinstance(e, SemidirectProduct):
        A, B = realize(e.a), realize(e.b)
        return _semidirect_product(A, B, _action_maps(A, B, e.action), label)
    degree, gens = atom_generators(e)
    return build_from_generators(degree, gens, label=label)


def _direct_product(A: GroupTable, B: GroupTable, label: str) -> GroupTable:
    na, nb = A.order, B.order
    ia, ib = np.divmod(np.arange(na * nb), nb)
    mul = A.mul[np.ix_(ia, ia)] * nb + B.mul[np.ix_(ib, ib)]
    perms = None
    if A.perms is not None and B.perms is not None:
        da = A.degree
        perms = [tuple(A.perms[i]) + tuple(da + x for x in B.perms[j]) for i, j in zip(ia, ib)]
        names = [P.to_cycles(p) for p in perms]
    else:
        names = [f"[{A.names[i]}, {B.names[j]}]" for i, j in zip(ia, ib)]
    return GroupTable.from_table(mul, names=names, perms=perms, label=label, check=na * nb <= 64)


def _action_maps(A: GroupTable, B: GroupTable, action: Action) -> list[tuple[int, ...]]:
    """One index map on A per generator of B (``generating_sequence`` order)."""
    k = len(generating_sequence(B))
    n = A.order
    if action.kind == "id":
        return [tuple(range(n))] * k
    if action.kind == "inv":
        return [tuple(int(v) for v in A.inv)] * k
    if action.kind == "pow":
        e = action.args[0]
        return [tuple(A.power(x, e) for x in range(n))] * k
    if action.kind == "aut":
        auts = automorphisms(A, bound=max(A.order, 48))
        if len(action.args) != k:
            raise ValidationError(f"action needs {k} automorphism indices, got {len(action.args)}")
        for i in action.args:
            if not 0 <= i < len(auts):
                raise ValidationError(f"automorphism index {i} out of range (|Aut| = {len(auts)})")
        return [auts[i] for i in action.args]
    if action.kind == "img":
        if len(action.args) != k:
            raise ValidationError(f"action needs {k} image lists, got {len(action.args)}")
        return [tuple(m) for m in action.args]
    raise ValidationError(f"unknown action {action.kind!r}")


def _check_automorphism(A: GroupTable, f: tuple[int, ...]) -> None:
    fa = np.asarray(f)
    if fa.shape != (A.order,) or sorted(f) != list(range(A.order)):
        raise ValidationError("action map is not a bijection of the normal factor")
    if not np.array_equal(fa[A.mul], A.mul[np.ix_(fa, fa)]):
        raise ValidationError("action map is not an automorphism of the normal factor")


def _semidirect_product(A: GroupTable, B: GroupTable, gen_maps, label: str) -> GroupTable:
    for f in gen_maps:
        _check_automorphism(A, f)
    gens = generating_sequence(B)
    # extend generator maps to a homomorphism phi: B -> Aut(A), phi(hg) = phi(h) o phi(g)
    phi: dict[int, np.ndarray] = {0: np.arange(A.order)}
    queue = [0]
    for h in queue:
        for g, fg in zip(gens, gen_maps):
            y = int(B.mul[h, g])
            img = phi[h][np.asarray(fg)]
            if y in phi:
                if not np.array_equal(phi[y], img):
                    raise ValidationError("action does not define a homomorphism into Aut of the normal factor")
            else:
                phi[y] = img
                queue.append(y)
    na, nb = A.order, B.order
    ia, ib = np.divmod(np.arange(na * nb), nb)
    phis = np.stack([phi[h] for h in range(nb)])  # phis[h, x]
    # (n1, h1)(n2, h2) = (n1 * phi(h1)(n2), h1 h2)
    twisted = phis[ib[:, None], ia[None, :]]
    mul = A.mul[ia[:, None], twisted] * nb + B.mul[np.ix_(ib, ib)]
    names = [f"<{A.names[i]}|{B.names[j]}>" for i, j in zip(ia, ib)]
    return GroupTable.from_table(mul, names=names, label=label, check=True)


def group(text: str) -> GroupTable:
    """Parse and realize in one step."""
    return realize(parse_group_expr(text))
