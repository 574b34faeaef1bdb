"""Expression language for elements of the two operator algebras.

Grammar (loosest to tightest): binary +/-, then *, then unary minus,
then ^ with a nonnegative integer exponent; commutator brackets [a, b]
and parentheses are primary.  Identifiers name either enveloping-algebra
letters (E12..E32, H1, H2, X11, X22) or coset-space generators
(D12..D32, D123..D321); the two families cannot be mixed in one
expression.  Rational literals and the imaginary unit i are scalars.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from .enveloping import NAME_TO_LETTER, NCElement, basis_element
from .invariant import GENERATOR_ALIASES, ReducedElement, generator, op_multiply
from .scalars import GaussianRational, rational


class ParseError(ValueError):
    def __init__(self, message: str, position: int, expected: Tuple[str, ...] = ()):
        hint = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"at position {position}: {message}{hint}")
        self.position = position
        self.expected = expected


class MixedAlgebra(ValueError):
    """E-letters and D-generators in one expression."""


E_NAMES = frozenset(NAME_TO_LETTER)
D_NAMES = frozenset(GENERATOR_ALIASES)


# -- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: GaussianRational


@dataclass(frozen=True)
class Gen:
    name: str  # verbatim identifier; kind decided by the name table


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Comm:
    left: "Node"
    right: "Node"


Node = Union[Num, Gen, Neg, Add, Sub, Mul, Pow, Comm]


# -- tokenizer ----------------------------------------------------------------

_PUNCT = set("+-*^()[],/")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _PUNCT:
            out.append(("punct", ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            out.append(("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def advance(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, val, at = self.peek()
        if val != value:
            raise ParseError(f"found {val or 'end of input'!r}", at, (value,))
        return self.advance()

    # expr := term (('+'|'-') term)*
    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.advance()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    # term := factor ('*' factor)*
    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] == "*":
            self.advance()
            node = Mul(node, self.factor())
        return node

    # factor := '-' factor | power
    def factor(self) -> Node:
        if self.peek()[1] == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    # power := atom ('^' int)?
    def power(self) -> Node:
        node = self.atom()
        if self.peek()[1] == "^":
            self.advance()
            kind, val, at = self.peek()
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer", at, ("int",))
            self.advance()
            node = Pow(node, int(val))
        return node

    def atom(self) -> Node:
        kind, val, at = self.peek()
        if val == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if val == "[":
            self.advance()
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect("]")
            return Comm(left, right)
        if kind == "int":
            self.advance()
            num = int(val)
            if self.peek()[1] == "/":
                self.advance()
                k2, v2, a2 = self.peek()
                if k2 != "int":
                    raise ParseError("denominator must be an integer", a2, ("int",))
                self.advance()
                return Num(GaussianRational(rational(num, int(v2))))
            return Num(GaussianRational(num))
        if kind == "name":
            self.advance()
            if val in ("i", "I"):
                return Num(GaussianRational(0, 1))
            if val in E_NAMES or val in D_NAMES:
                return Gen(val)
            raise ParseError(f"unknown identifier {val!r}", at)
        raise ParseError(
            f"found {val or 'end of input'!r}", at,
            ("(", "[", "number", "identifier"),
        )


def parse(text: str) -> Node:
    p = _Parser(text)
    node = p.expr()
    kind, val, at = p.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", at)
    algebra_of(node)  # raises MixedAlgebra on mixed identifiers
    return node


def algebra_of(node: Node) -> Optional[str]:
    """'E', 'D', or None for purely scalar expressions."""
    kinds = set()

    def walk(n: Node):
        if isinstance(n, Gen):
            kinds.add("E" if n.name in E_NAMES else "D")
        elif isinstance(n, (Neg, Pow)):
            walk(n.arg if isinstance(n, Neg) else n.base)
        elif isinstance(n, (Add, Sub, Mul, Comm)):
            walk(n.left)
            walk(n.right)

    walk(node)
    if len(kinds) > 1:
        raise MixedAlgebra(
            "enveloping-algebra letters and coset-space generators "
            "cannot appear in one expression"
        )
    return kinds.pop() if kinds else None


# -- pretty printer -----------------------------------------------------------

_PREC = {"add": 1, "mul": 2, "neg": 3, "pow": 4, "atom": 5}


def _render(node: Node) -> Tuple[str, int]:
    if isinstance(node, Num):
        v = node.value
        if not v.im and v.re >= 0:
            return repr(v), _PREC["atom"]
        if not v.re and v.im == 1:
            return "i", _PREC["atom"]
        if not v.im and v.re < 0:
            s, _ = _render(Num(GaussianRational(-v.re, 0)))
            return f"-{s}", _PREC["neg"]
        if not v.re and v.im > 0:
            s = repr(GaussianRational(v.im, 0))
            return f"{s}*i", _PREC["mul"]
        if not v.re and v.im < 0:
            s = repr(GaussianRational(-v.im, 0))
            return f"-{s}*i", _PREC["neg"]
        re_s, _ = _render(Num(GaussianRational(v.re, 0)))
        im_s, _ = _render(Num(GaussianRational(0, v.im)))
        joined = f"{re_s} + {im_s}" if not im_s.startswith("-") else f"{re_s} - {im_s[1:]}"
        return f"({joined})", _PREC["atom"]
    if isinstance(node, Gen):
        return node.name, _PREC["atom"]
    if isinstance(node, Neg):
        s, p = _render(node.arg)
        if p < _PREC["neg"]:
            s = f"({s})"
        return f"-{s}", _PREC["neg"]
    if isinstance(node, (Add, Sub)):
        op = "+" if isinstance(node, Add) else "-"
        ls, lp = _render(node.left)
        rs, rp = _render(node.right)
        if lp < _PREC["add"]:
            ls = f"({ls})"
        if rp <= _PREC["add"]:
            rs = f"({rs})"
        return f"{ls} {op} {rs}", _PREC["add"]
    if isinstance(node, Mul):
        ls, lp = _render(node.left)
        rs, rp = _render(node.right)
        if lp < _PREC["mul"]:
            ls = f"({ls})"
        if rp <= _PREC["mul"]:
            rs = f"({rs})"
        return f"{ls}*{rs}", _PREC["mul"]
    if isinstance(node, Pow):
        bs, bp = _render(node.base)
        if bp < _PREC["atom"]:
            bs = f"({bs})"
        return f"{bs}^{node.exponent}", _PREC["pow"]
    if isinstance(node, Comm):
        ls, _ = _render(node.left)
        rs, _ = _render(node.right)
        return f"[{ls}, {rs}]", _PREC["atom"]
    raise TypeError(f"not an expression node: {node!r}")


def pretty(node: Node) -> str:
    return _render(node)[0]


# -- evaluation ---------------------------------------------------------------


class _Value:
    """Scalar or algebra element during evaluation."""

    __slots__ = ("scalar", "elem")

    def __init__(self, scalar=None, elem=None):
        self.scalar = scalar
        self.elem = elem

    @property
    def is_scalar(self):
        return self.elem is None


def _combine_mul(a: _Value, b: _Value, mul_elems) -> _Value:
    if a.is_scalar and b.is_scalar:
        return _Value(scalar=a.scalar * b.scalar)
    if a.is_scalar:
        return _Value(elem=b.elem * a.scalar if a.scalar != 1 else b.elem)
    if b.is_scalar:
        return _Value(elem=a.elem * b.scalar if b.scalar != 1 else a.elem)
    return _Value(elem=mul_elems(a.elem, b.elem))


def _evaluate(node: Node, make_gen, one, mul_elems) -> _Value:
    def promote(v: _Value):
        # scalars are multiples of the identity element
        return one().scale(v.scalar) if v.is_scalar else v.elem

    if isinstance(node, Num):
        return _Value(scalar=node.value)
    if isinstance(node, Gen):
        return _Value(elem=make_gen(node.name))
    if isinstance(node, Neg):
        v = _evaluate(node.arg, make_gen, one, mul_elems)
        return _Value(scalar=-v.scalar) if v.is_scalar else _Value(elem=-v.elem)
    if isinstance(node, (Add, Sub)):
        a = _evaluate(node.left, make_gen, one, mul_elems)
        b = _evaluate(node.right, make_gen, one, mul_elems)
        if a.is_scalar and b.is_scalar:
            return _Value(
                scalar=a.scalar + b.scalar if isinstance(node, Add)
                else a.scalar - b.scalar
            )
        ea, eb = promote(a), promote(b)
        return _Value(elem=ea + eb if isinstance(node, Add) else ea - eb)
    if isinstance(node, Mul):
        a = _evaluate(node.left, make_gen, one, mul_elems)
        b = _evaluate(node.right, make_gen, one, mul_elems)
        return _combine_mul(a, b, mul_elems)
    if isinstance(node, Pow):
        base = _evaluate(node.base, make_gen, one, mul_elems)
        if base.is_scalar:
            out = GaussianRational(1)
            for _ in range(node.exponent):
                out = out * base.scalar
            return _Value(scalar=out)
        if node.exponent == 0:
            return _Value(scalar=GaussianRational(1))
        out = base.elem
        for _ in range(node.exponent - 1):
            out = mul_elems(out, base.elem)
        return _Value(elem=out)
    if isinstance(node, Comm):
        a = _evaluate(node.left, make_gen, one, mul_elems)
        b = _evaluate(node.right, make_gen, one, mul_elems)
        if a.is_scalar or b.is_scalar:
            return _Value(elem=one() - one())  # scalars are central
        return _Value(elem=mul_elems(a.elem, b.elem) - mul_elems(b.elem, a.elem))
    raise TypeError(f"not an expression node: {node!r}")


def eval_enveloping(node: Node) -> NCElement:
    """Evaluate an E-expression in the enveloping algebra."""
    if algebra_of(node) == "D":
        raise MixedAlgebra("expression lives in the coset-space algebra")
    from .enveloping import ONE_ELEMENT, multiply

    v = _evaluate(
        node,
        lambda name: basis_element(NAME_TO_LETTER[name]),
        lambda: ONE_ELEMENT,
        multiply,
    )
    return ONE_ELEMENT.scale(v.scalar) if v.is_scalar else v.elem


def eval_reduced(node: Node) -> ReducedElement:
    """Evaluate a D-expression directly in the coset-space algebra."""
    if algebra_of(node) == "E":
        raise MixedAlgebra("expression lives in the enveloping algebra")
    from .invariant import ONE_REDUCED

    v = _evaluate(
        node,
        lambda name: generator(name),
        lambda: ONE_REDUCED,
        op_multiply,
    )
    return ONE_REDUCED.scale(v.scalar) if v.is_scalar else v.elem
