"""The algebra of invariant differential operators on the coset space.

Elements are represented by their diagonal-free PBW representatives:
because the diagonal letters sort last, a weight-zero element of U(sl3)
splits into a diagonal-free part plus terms in U(g)*a, and dropping the
latter realises the quotient map onto the operator algebra of the coset
space.  The quotient is generated by five symmetrized elements

    D12, D13, D23   (quadratic)       D123, D213   (cubic)

with D_ij = D_ji and cyclic aliases for the cubic two.  This module
provides the quotient arithmetic, the ordered-product basis expansion,
the degree filtration, the full relation suite, the graded commutator
(lemma) families, and the center machinery.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, List, Tuple

from .enveloping import (
    E12,
    E13,
    E21,
    E23,
    E31,
    E32,
    H1,
    H2,
    NCElement,
    ONE_ELEMENT,
    basis_element,
    is_A_invariant,
    monomial,
    multiply,
    normal_form,
    symmetrize,
    weight,
)
from .scalars import GaussianRational, rational


class NotAInvariant(ValueError):
    """Raised when a quotient operation receives a non-weight-zero element."""


class PeelFailure(RuntimeError):
    """A leading-symbol monomial failed the per-vertex balance conditions."""


class NotCentral(ValueError):
    """Raised with a witnessing nonzero commutator."""

    def __init__(self, generator_name: str, residual: "ReducedElement"):
        super().__init__(f"not central: [{generator_name}, .] != 0")
        self.generator_name = generator_name
        self.residual = residual


NEG_INF = float("-inf")

_LETTER_PAIR = {
    (1, 2): E12,
    (1, 3): E13,
    (2, 3): E23,
    (2, 1): E21,
    (3, 1): E31,
    (3, 2): E32,
}


class ReducedElement:
    """Canonical representative of a coset-space operator.

    Every stored monomial is diagonal-free and weight zero, so equality
    of representatives is equality of operators.
    """

    __slots__ = ("rep",)

    def __init__(self, rep: NCElement, _checked: bool = False):
        if not _checked:
            for m in rep.terms:
                if m[6] or m[7]:
                    raise NotAInvariant("representative carries diagonal factors")
                if weight(m) != (0, 0, 0):
                    raise NotAInvariant("representative has nonzero weight")
        object.__setattr__(self, "rep", rep)

    def __setattr__(self, *a):
        raise AttributeError("ReducedElement is immutable")

    def __add__(self, other):
        return ReducedElement(self.rep + other.rep, _checked=True)

    def __sub__(self, other):
        return ReducedElement(self.rep - other.rep, _checked=True)

    def __neg__(self):
        return ReducedElement(-self.rep, _checked=True)

    def __mul__(self, other):
        if isinstance(other, ReducedElement):
            return op_multiply(self, other)
        return ReducedElement(self.rep.scale(other), _checked=True)

    def __rmul__(self, other):
        return ReducedElement(self.rep.scale(other), _checked=True)

    def scale(self, c):
        return ReducedElement(self.rep.scale(c), _checked=True)

    def __eq__(self, other):
        return isinstance(other, ReducedElement) and self.rep == other.rep

    def __hash__(self):
        return hash(self.rep)

    def __bool__(self):
        return bool(self.rep)

    def is_zero(self):
        return self.rep.is_zero()

    def __repr__(self):
        return f"Reduced[{self.rep!r}]"

    def to_json(self) -> dict:
        data = self.rep.to_json()
        exp = basis_expand(self)
        data["basis"] = exp.to_json()["basis"]
        return data


ZERO_REDUCED = ReducedElement(NCElement(), _checked=True)
ONE_REDUCED = ReducedElement(ONE_ELEMENT, _checked=True)


def mu_reduce(a: NCElement) -> ReducedElement:
    """Quotient map: drop every diagonal-carrying monomial.

    Requires a weight-zero input; the dropped part then lies in U(g)*a,
    so the result represents the same coset-space operator.
    """
    if not is_A_invariant(a):
        raise NotAInvariant("element does not commute with the diagonal subgroup")
    rep = NCElement({m: c for m, c in a.terms.items() if not (m[6] or m[7])})
    return ReducedElement(rep, _checked=True)


def mu_word(*letters: int, coeff=1) -> ReducedElement:
    """mu of a product of basis letters (must be weight zero overall)."""
    return mu_reduce(normal_form(letters, coeff))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

CANONICAL_GENERATORS = ("D12", "D13", "D23", "D123", "D213")

GENERATOR_ALIASES = {
    "D12": "D12", "D21": "D12",
    "D13": "D13", "D31": "D13",
    "D23": "D23", "D32": "D23",
    "D123": "D123", "D231": "D123", "D312": "D123",
    "D213": "D213", "D132": "D213", "D321": "D213",
}


def canonical_generator_name(name: str) -> str:
    try:
        return GENERATOR_ALIASES[name]
    except KeyError:
        raise KeyError(f"unknown generator {name!r}") from None


@lru_cache(maxsize=None)
def generator(name: str) -> ReducedElement:
    """Symmetrized generator (indices resolve through the alias table)."""
    name = canonical_generator_name(name)
    digits = [int(ch) for ch in name[1:]]
    exps = [0] * 8
    cyc = digits + [digits[0]]
    for a, b in zip(cyc, cyc[1:]):
        exps[_LETTER_PAIR[(a, b)]] += 1
    return mu_reduce(symmetrize(exps))


def op_multiply(a: ReducedElement, b: ReducedElement) -> ReducedElement:
    """Product in the quotient: multiply representatives, reduce again.

    Representative independence holds because a weight-zero element
    commutes with the diagonal letters, so diagonal tails stay tails.
    """
    prod = multiply(a.rep, b.rep)
    rep = NCElement({m: c for m, c in prod.terms.items() if not (m[6] or m[7])})
    return ReducedElement(rep, _checked=True)


def op_commutator(a: ReducedElement, b: ReducedElement) -> ReducedElement:
    return op_multiply(a, b) - op_multiply(b, a)


# ---------------------------------------------------------------------------
# Basis expansion (ordered products of the five generators)
# ---------------------------------------------------------------------------

BasisKey = Tuple[int, int, int, int, int]  # (k, j, i, l, m)


@lru_cache(maxsize=8192)
def basis_product(key: BasisKey) -> ReducedElement:
    """D12^k D23^j D31^i D123^l D213^m, multiplied left to right."""
    k, j, i, l, m = key
    if min(k, j, i) < 0 or l < 0 or m < 0:
        raise ValueError(f"negative exponent in basis key {key}")
    if min(k, j, i) != 0:
        raise ValueError(f"basis key needs min(k,j,i)=0, got {key}")
    if k:
        return op_multiply(generator("D12"), basis_product((k - 1, j, i, l, m)))
    if j:
        return op_multiply(generator("D23"), basis_product((0, j - 1, i, l, m)))
    if i:
        return op_multiply(generator("D31"), basis_product((0, 0, i - 1, l, m)))
    if l:
        return op_multiply(generator("D123"), basis_product((0, 0, 0, l - 1, m)))
    if m:
        return op_multiply(generator("D213"), basis_product((0, 0, 0, 0, m - 1)))
    return ONE_REDUCED


def key_degree(key: BasisKey) -> int:
    k, j, i, l, m = key
    return 2 * (k + j + i) + 3 * (l + m)


def key_symbol(key: BasisKey) -> Tuple[int, ...]:
    """Leading commutative symbol of a basis product.

    The map key -> 6-exponent tuple is injective on keys with
    min(k,j,i)=0, which is what makes the peeling below well defined.
    """
    k, j, i, l, m = key
    return (k + l, m + i, j + l, k + m, l + i, j + m)


class SymbolPolynomial:
    """Commutative polynomial over the six off-diagonal symbols."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Tuple[int, ...], GaussianRational]):
        object.__setattr__(self, "terms", {m: c for m, c in terms.items() if c})

    def __setattr__(self, *a):
        raise AttributeError("SymbolPolynomial is immutable")

    def __eq__(self, other):
        return isinstance(other, SymbolPolynomial) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        names = ("u12", "u13", "u23", "u21", "u31", "u32")
        bits = []
        for m in sorted(self.terms):
            mono = "*".join(
                names[i] + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e
            ) or "1"
            bits.append(f"({self.terms[m]!r})*{mono}")
        return " + ".join(bits) or "0"


def symbol_top(a: ReducedElement) -> SymbolPolynomial:
    """Top-total-degree part of the representative, read commutatively."""
    d = a.rep.max_degree()
    if d < 0:
        return SymbolPolynomial({})
    return SymbolPolynomial(
        {m[:6]: c for m, c in a.rep.terms.items() if sum(m) == d}
    )


def _peel_key(a6: Tuple[int, ...]) -> BasisKey:
    """Invert key_symbol on a per-vertex-balanced 6-exponent tuple."""
    l = min(a6[0], a6[2], a6[4])
    k = a6[0] - l
    j = a6[2] - l
    i = a6[4] - l
    m = l - a6[0] + a6[3]
    key = (k, j, i, l, m)
    if m < 0 or key_symbol(key) != a6:
        raise PeelFailure(f"symbol {a6} is not per-vertex balanced")
    return key


class BasisExpansion:
    """Coefficients of an operator over the ordered-product basis."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Dict[BasisKey, GaussianRational]):
        clean = {}
        for key, c in coeffs.items():
            if min(key[:3]) != 0 or min(key) < 0:
                raise ValueError(f"invalid basis key {key}")
            if c:
                clean[key] = c
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError("BasisExpansion is immutable")

    def __eq__(self, other):
        return isinstance(other, BasisExpansion) and self.coeffs == other.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def degree(self):
        return max((key_degree(k) for k in self.coeffs), default=NEG_INF)

    def reconstruct(self) -> ReducedElement:
        out = ZERO_REDUCED
        for key, c in self.coeffs.items():
            out = out + basis_product(key).scale(c)
        return out

    def to_json(self) -> dict:
        basis = []
        for key in sorted(self.coeffs, key=lambda t: (key_degree(t), t)):
            d = {"kjilm": list(key)}
            d.update(self.coeffs[key].to_json())
            basis.append(d)
        return {"basis": basis}

    @classmethod
    def from_json(cls, data: dict) -> "BasisExpansion":
        out: Dict[BasisKey, GaussianRational] = {}
        for t in data["basis"]:
            key = tuple(int(e) for e in t["kjilm"])
            c = GaussianRational(rational(t.get("re", "0")), rational(t.get("im", "0")))
            if c:
                out[key] = out.get(key, GaussianRational(0)) + c
        return cls(out)

    def __repr__(self):
        return f"BasisExpansion({self.coeffs!r})"


def basis_expand(a: ReducedElement) -> BasisExpansion:
    """Expand over the ordered-product basis by leading-symbol peeling.

    Repeatedly read the top homogeneous part, invert each symbol
    monomial to a basis key, subtract the corresponding products, and
    recurse on the strictly smaller degree.
    """
    coeffs: Dict[BasisKey, GaussianRational] = {}
    work = a.rep
    while work:
        d = work.max_degree()
        batch: Dict[BasisKey, GaussianRational] = {}
        for m, c in work.terms.items():
            if sum(m) == d:
                batch[_peel_key(m[:6])] = c
        for key, c in batch.items():
            coeffs[key] = coeffs.get(key, GaussianRational(0)) + c
            work = work - basis_product(key).rep.scale(c)
        if work and work.max_degree() >= d:
            raise PeelFailure("peeling failed to lower the degree")
    return BasisExpansion(coeffs)


def degree(a: ReducedElement):
    """Degree in the filtration: 2 per quadratic factor, 3 per cubic.

    Equals max over expansion keys of 2(k+j+i)+3(l+m).  Because the
    leading symbols of distinct basis keys are distinct monomials, that
    maximum is just the top PBW degree of the representative, which is
    what we compute; the equivalence is property-tested.
    """
    d = a.rep.max_degree()
    return NEG_INF if d < 0 else d


# ---------------------------------------------------------------------------
# Relation suite
# ---------------------------------------------------------------------------


def _g(name: str) -> ReducedElement:
    return generator(name)


def _relation_entries() -> List[Tuple[str, ReducedElement]]:
    """All exact identities of the presentation, as (name, residual)."""
    out: List[Tuple[str, ReducedElement]] = []
    D = _g

    def add(name, lhs, rhs):
        out.append((name, lhs - rhs))

    # presentation, line 1: the two cubic generators commute
    add("[D123,D213]=0", op_commutator(D("D123"), D("D213")), ZERO_REDUCED)

    # presentation, line 2: quadratic pair commutators
    for (i, j, k) in [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)]:
        name = f"[D{i}{j},D{i}{k}]=D{i}{j}{k}-D{i}{k}{j}"
        add(
            name,
            op_commutator(D(f"D{i}{j}"), D(f"D{i}{k}")),
            D(f"D{i}{j}{k}") - D(f"D{i}{k}{j}"),
        )

    # presentation, line 3: cubic-quadratic commutators
    for (i, j, k) in [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)]:
        name = f"[D{i}{j}{k},D{i}{j}]=D{j}{k}D{i}{j}-D{i}{j}D{i}{k}"
        add(
            name,
            op_commutator(D(f"D{i}{j}{k}"), D(f"D{i}{j}")),
            op_multiply(D(f"D{j}{k}"), D(f"D{i}{j}"))
            - op_multiply(D(f"D{i}{j}"), D(f"D{i}{k}")),
        )

    # presentation, line 4: the quartic relation
    q = D("D23") - D("D13") - D("D12")
    lhs4 = 2 * (
        op_multiply(D("D123"), D("D213"))
        + op_multiply(D("D213"), D("D123"))
        - op_multiply(op_multiply(D("D12"), D("D23")), D("D31"))
        - op_multiply(op_multiply(D("D13"), D("D32")), D("D21"))
    )
    add("2(D123D213+D213D123-D12D23D31-D13D32D21)=(D23-D13-D12)^2",
        lhs4, op_multiply(q, q))
    # same content, un-doubled form
    add("D123D213+D213D123-D12D23D31-D13D32D21=(1/2)(D23-D13-D12)^2",
        lhs4.scale(rational(1, 2)), op_multiply(q, q).scale(rational(1, 2)))

    # the anti-symmetrized cubic difference written through mu
    add("D123-D213=mu(E12E23E31)-mu(E13E32E21)",
        D("D123") - D("D213"),
        mu_word(E12, E23, E31) - mu_word(E13, E32, E21))

    # sibling pairs of the cubic-quadratic commutators
    for (a, b, gens) in [
        ("[D123,D12]", "-[D213,D12]", ("D123", "D213", "D12")),
        ("[D312,D31]", "-[D132,D31]", ("D312", "D132", "D31")),
        ("[D231,D23]", "-[D321,D23]", ("D231", "D321", "D23")),
    ]:
        g1, g2, g3 = gens
        add(f"{a}={b}",
            op_commutator(D(g1), D(g3)), -op_commutator(D(g2), D(g3)))

    return out


def _word_identities() -> List[Tuple[str, NCElement]]:
    """Normal-form identities among quartic and cubic words in U(sl3)."""
    W = normal_form
    out = []

    def add(name, lhs, rhs):
        out.append((name, lhs - rhs))

    quart = W([E12, E21, E13, E31])
    cyc = W([E12, E23, E31])
    add("E12E21E13E31=E12E13E21E31+E12E23E31",
        quart, W([E12, E13, E21, E31]) + cyc)
    add("E12E21E13E31=E13E12E31E21+E12E23E31",
        quart, W([E13, E12, E31, E21]) + cyc)
    add("E12E21E13E31=E13E31E12E21+E12E23E31-E13E32E21",
        quart, W([E13, E31, E12, E21]) + cyc - W([E13, E32, E21]))

    add("E21E12E13E31=E13E31E21E12+E23E12E31-E13E21E32",
        W([E21, E12, E13, E31]),
        W([E13, E31, E21, E12]) + W([E23, E12, E31]) - W([E13, E21, E32]))
    add("E12E21E31E13=E31E13E12E21+E12E31E23-E32E13E21",
        W([E12, E21, E31, E13]),
        W([E31, E13, E12, E21]) + W([E12, E31, E23]) - W([E32, E13, E21]))
    add("E21E12E31E13=E31E13E21E12+E31E23E12-E21E32E13",
        W([E21, E12, E31, E13]),
        W([E31, E13, E21, E12]) + W([E31, E23, E12]) - W([E21, E32, E13]))

    # cubic rewriting, forward cycle
    add("E12E31E23=E12E23E31-E12E21", W([E12, E31, E23]), cyc - W([E12, E21]))
    add("E23E12E31=E12E23E31-E13E31", W([E23, E12, E31]), cyc - W([E13, E31]))
    add("E23E31E12=E12E23E31+E23E32-E13E31",
        W([E23, E31, E12]), cyc + W([E23, E32]) - W([E13, E31]))
    add("E31E12E23=E12E23E31+E32E23-E12E21",
        W([E31, E12, E23]), cyc + W([E32, E23]) - W([E12, E21]))
    add("E31E23E12=E12E23E31-E12E21+E32E23-E31E13",
        W([E31, E23, E12]), cyc - W([E12, E21]) + W([E32, E23]) - W([E31, E13]))

    # cubic rewriting, reverse cycle
    rcyc = W([E13, E32, E21])
    add("E32E13E21=E13E32E21-E12E21", W([E32, E13, E21]), rcyc - W([E12, E21]))
    add("E13E21E32=E13E32E21-E13E31", W([E13, E21, E32]), rcyc - W([E13, E31]))
    add("E21E13E32=E13E32E21+E23E32-E13E31",
        W([E21, E13, E32]), rcyc + W([E23, E32]) - W([E13, E31]))
    add("E32E21E13=E13E32E21+E32E23-E12E21",
        W([E32, E21, E13]), rcyc + W([E32, E23]) - W([E12, E21]))
    add("E21E32E13=E13E32E21-E12E21+E32E23-E31E13",
        W([E21, E32, E13]), rcyc - W([E12, E21]) + W([E32, E23]) - W([E31, E13]))

    return out


def quadratic_casimir_lift() -> NCElement:
    """Degree-2 central element of U(sl3), in the X11/X22 notation."""
    x11 = basis_element(H1)
    x22 = basis_element(H2)
    xd = x11 - x22
    W = normal_form
    return (
        -(xd * xd) + xd * x11 - x11 * x11
        - 3 * W([E12, E21]) - 3 * W([E13, E31]) - 3 * W([E23, E32])
        + 3 * x11
    )


def cubic_casimir_lift() -> NCElement:
    """Degree-3 central element of U(sl3).

    The cubic words must appear in the orders below: commuting this
    element with all eight basis letters gives zero, whereas reordering
    the first cubic word's last two factors breaks centrality (see
    tests).
    """
    x11 = basis_element(H1)
    x22 = basis_element(H2)
    xd = x11 - x22
    W = normal_form
    return (
        2 * (xd * xd * xd) - 3 * (xd * xd * x11) - 3 * (xd * (x11 * x11))
        + 2 * (x11 * x11 * x11)
        + 9 * (W([E12, E21]) * xd) - 18 * (W([E12, E21]) * x11)
        - 18 * (W([E13, E31]) * xd) + 9 * (W([E13, E31]) * x11)
        + 9 * (W([E23, E32]) * xd) + 9 * (W([E23, E32]) * x11)
        - 27 * W([E12, E31, E23]) - 27 * W([E21, E13, E32])
        + 18 * (xd * x11) - 9 * (x11 * x11) - 18 * xd + 9 * x11
    )


def casimir_image_residuals() -> List[Tuple[str, ReducedElement]]:
    """Residuals of the two center-image identities."""
    D = _g
    r1 = mu_reduce(quadratic_casimir_lift()) + 3 * (D("D12") + D("D13") + D("D23"))
    r2 = mu_reduce(cubic_casimir_lift()) + 27 * (D("D123") + D("D213"))
    return [
        ("mu(h)=-3(D12+D13+D23)", r1),
        ("mu(k)=-27(D123+D213)", r2),
    ]


def verify_relation(lhs: ReducedElement, rhs: ReducedElement) -> dict:
    """Compare two quotient-algebra expressions exactly."""
    residual = lhs - rhs
    return {"ok": residual.is_zero(), "residual": residual}


def verify_relations() -> List[dict]:
    """Run every exact identity; residuals must be the zero element."""
    report = []
    for name, residual in _relation_entries():
        report.append({
            "name": name,
            "pass": residual.is_zero(),
            "residual_terms": len(residual.rep),
        })
    for name, residual in _word_identities():
        report.append({
            "name": name,
            "pass": residual.is_zero(),
            "residual_terms": len(residual),
        })
    for name, residual in casimir_image_residuals():
        report.append({
            "name": name,
            "pass": residual.is_zero(),
            "residual_terms": len(residual.rep),
        })
    return report


# ---------------------------------------------------------------------------
# Graded commutator families
# ---------------------------------------------------------------------------

# Each line: bracketed generator, active exponent slots of the product
# D12^k D23^j D31^i D123^l D213^m, minimum value per active slot, claimed
# leading terms as (coefficient, key) builders, and the degree bound for
# the remainder.  Exponent deltas below mirror the graded commutation
# rules of the algebra; terms whose coefficient vanishes are skipped, so
# negative key entries never materialise.

LEMMA_FAMILIES: Dict[str, List[dict]] = {
    "cubic_one_block": [
        dict(bracket="D123", slots="klm", mins=(0, 0, 0),
             key=lambda k, l, m: (k, 0, 0, l, m),
             claimed=lambda k, l, m: [(k, (k, 1, 0, l, m)), (-k, (k, 0, 1, l, m))],
             bound=lambda k, l, m: 2 * k + 3 * l + 3 * m + 1),
        dict(bracket="D123", slots="jlm", mins=(0, 0, 0),
             key=lambda j, l, m: (0, j, 0, l, m),
             claimed=lambda j, l, m: [(-j, (1, j, 0, l, m)), (j, (0, j, 1, l, m))],
             bound=lambda j, l, m: 2 * j + 3 * l + 3 * m + 1),
        dict(bracket="D123", slots="ilm", mins=(0, 0, 0),
             key=lambda i, l, m: (0, 0, i, l, m),
             claimed=lambda i, l, m: [(i, (1, 0, i, l, m)), (-i, (0, 1, i, l, m))],
             bound=lambda i, l, m: 2 * i + 3 * l + 3 * m + 1),
    ],
    "cubic_two_blocks": [
        dict(bracket="D123", slots="kjlm", mins=(1, 1, 0, 0),
             key=lambda k, j, l, m: (k, j, 0, l, m),
             claimed=lambda k, j, l, m: [
                 (k, (k, j + 1, 0, l, m)),
                 (j - k, (k - 1, j - 1, 0, l + 1, m + 1)),
                 (-j, (k + 1, j, 0, l, m))],
             bound=lambda k, j, l, m: 2 * k + 2 * j + 3 * l + 3 * m + 1),
        dict(bracket="D123", slots="kilm", mins=(1, 1, 0, 0),
             key=lambda k, i, l, m: (k, 0, i, l, m),
             claimed=lambda k, i, l, m: [
                 (k - i, (k - 1, 0, i - 1, l + 1, m + 1)),
                 (-k, (k, 0, i + 1, l, m)),
                 (i, (k + 1, 0, i, l, m))],
             bound=lambda k, i, l, m: 2 * k + 2 * i + 3 * l + 3 * m + 1),
        dict(bracket="D123", slots="jilm", mins=(1, 1, 0, 0),
             key=lambda j, i, l, m: (0, j, i, l, m),
             claimed=lambda j, i, l, m: [
                 (j, (0, j, i + 1, l, m)),
                 (i - j, (0, j - 1, i - 1, l + 1, m + 1)),
                 (-i, (0, j + 1, i, l, m))],
             bound=lambda j, i, l, m: 2 * j + 2 * i + 3 * l + 3 * m + 1),
    ],
    "quad_cubics_only": [
        dict(bracket="D12", slots="lm", mins=(0, 0),
             key=lambda l, m: (0, 0, 0, l, m),
             claimed=lambda l, m: [
                 (-l, (1, 1, 0, l - 1, m)), (l, (1, 0, 1, l - 1, m)),
                 (m, (1, 1, 0, l, m - 1)), (-m, (1, 0, 1, l, m - 1))],
             bound=lambda l, m: 3 * l + 3 * m),
        dict(bracket="D23", slots="lm", mins=(0, 0),
             key=lambda l, m: (0, 0, 0, l, m),
             claimed=lambda l, m: [
                 (l, (1, 1, 0, l - 1, m)), (-l, (0, 1, 1, l - 1, m)),
                 (-m, (1, 1, 0, l, m - 1)), (m, (0, 1, 1, l, m - 1))],
             bound=lambda l, m: 3 * l + 3 * m),
    ],
    "quad_one_block": [
        dict(bracket="D12", slots="jlm", mins=(1, 0, 0),
             key=lambda j, l, m: (0, j, 0, l, m),
             claimed=lambda j, l, m: [
                 (-l, (1, j + 1, 0, l - 1, m)), (m, (1, j + 1, 0, l, m - 1)),
                 (j + l, (0, j - 1, 0, l, m + 1)), (-(j + m), (0, j - 1, 0, l + 1, m))],
             bound=lambda j, l, m: 2 * j + 3 * l + 3 * m),
        dict(bracket="D12", slots="ilm", mins=(1, 0, 0),
             key=lambda i, l, m: (0, 0, i, l, m),
             claimed=lambda i, l, m: [
                 (l, (1, 0, i + 1, l - 1, m)), (-m, (1, 0, i + 1, l, m - 1)),
                 (i + m, (0, 0, i - 1, l + 1, m)), (-(i + l), (0, 0, i - 1, l, m + 1))],
             bound=lambda i, l, m: 2 * i + 3 * l + 3 * m),
        dict(bracket="D23", slots="klm", mins=(1, 0, 0),
             key=lambda k, l, m: (k, 0, 0, l, m),
             claimed=lambda k, l, m: [
                 (l, (k + 1, 1, 0, l - 1, m)), (-m, (k + 1, 1, 0, l, m - 1)),
                 (-(k + l), (k - 1, 0, 0, l, m + 1)), (k + m, (k - 1, 0, 0, l + 1, m))],
             bound=lambda k, l, m: 2 * k + 3 * l + 3 * m),
        dict(bracket="D23", slots="ilm", mins=(1, 0, 0),
             key=lambda i, l, m: (0, 0, i, l, m),
             claimed=lambda i, l, m: [
                 (-l, (0, 1, i + 1, l - 1, m)), (m, (0, 1, i + 1, l, m - 1)),
                 (i + l, (0, 0, i - 1, l, m + 1)), (-(i + m), (0, 0, i - 1, l + 1, m))],
             bound=lambda i, l, m: 2 * i + 3 * l + 3 * m),
    ],
    "quad_two_blocks": [
        dict(bracket="D12", slots="jilm", mins=(1, 1, 0, 0),
             key=lambda j, i, l, m: (0, j, i, l, m),
             claimed=lambda j, i, l, m: [
                 (-(i + l), (0, j, i - 1, l, m + 1)), (i + m, (0, j, i - 1, l + 1, m)),
                 (j + l, (0, j - 1, i, l, m + 1)), (-(j + m), (0, j - 1, i, l + 1, m))],
             bound=lambda j, i, l, m: 2 * j + 2 * i + 3 * l + 3 * m),
        dict(bracket="D23", slots="kilm", mins=(1, 1, 0, 0),
             key=lambda k, i, l, m: (k, 0, i, l, m),
             claimed=lambda k, i, l, m: [
                 (-(k + l), (k - 1, 0, i, l, m + 1)), (k + m, (k - 1, 0, i, l + 1, m)),
                 (i + l, (k, 0, i - 1, l, m + 1)), (-(i + m), (k, 0, i - 1, l + 1, m))],
             bound=lambda k, i, l, m: 2 * k + 2 * i + 3 * l + 3 * m),
    ],
}

# The default slot cap for exact verification runs.
DEFAULT_LEMMA_CAP = 3

_SLOT_INDEX = {"k": 0, "j": 1, "i": 2, "l": 3, "m": 4}


def _slot_cap(slot: str, caps) -> int:
    return caps[_SLOT_INDEX[slot]]


def verify_lemma_family(which: str, caps=(3, 3, 3, 3, 3)) -> List[dict]:
    """Check one graded commutator family over all exponent tuples.

    For every tuple within the caps, the commutator of the bracketed
    generator with the ordered product, minus the claimed leading terms,
    must have degree at most the stated bound.  Each report row carries
    the actual remainder degree.
    """
    if which not in LEMMA_FAMILIES:
        raise KeyError(f"unknown lemma family {which!r}")
    report = []
    for line_no, line in enumerate(LEMMA_FAMILIES[which], start=1):
        slots = line["slots"]
        ranges = [
            range(line["mins"][pos], _slot_cap(s, caps) + 1)
            for pos, s in enumerate(slots)
        ]
        gen = generator(line["bracket"])

        def _tuples(rs):
            if not rs:
                yield ()
                return
            for head in rs[0]:
                for tail in _tuples(rs[1:]):
                    yield (head,) + tail

        for t in _tuples(ranges):
            prod = basis_product(line["key"](*t))
            comm = op_commutator(gen, prod)
            claimed = ZERO_REDUCED
            for c, key in line["claimed"](*t):
                if c:
                    claimed = claimed + basis_product(key).scale(c)
            rem = comm - claimed
            rdeg = degree(rem)
            bound = line["bound"](*t)
            report.append({
                "family": which,
                "line": line_no,
                "tuple": dict(zip(slots, t)),
                "remainder_degree": rdeg if rdeg != NEG_INF else None,
                "bound": bound,
                "pass": rdeg <= bound,
            })
    return report


def verify_all_lemma_families(caps=(3, 3, 3, 3, 3)) -> List[dict]:
    out = []
    for which in LEMMA_FAMILIES:
        out.extend(verify_lemma_family(which, caps))
    return out


# ---------------------------------------------------------------------------
# Center
# ---------------------------------------------------------------------------


def central_quadratic() -> ReducedElement:
    """D12 + D23 + D31, a generator of the center."""
    return _g("D12") + _g("D23") + _g("D31")


def central_cubic() -> ReducedElement:
    """D123 + D213, the other generator of the center."""
    return _g("D123") + _g("D213")


def center_witness(a: ReducedElement):
    """First generator with nonvanishing commutator, or None."""
    for name in CANONICAL_GENERATORS:
        resid = op_commutator(a, generator(name))
        if resid:
            return name, resid
    return None


def center_check(a: ReducedElement) -> bool:
    return center_witness(a) is None


@lru_cache(maxsize=512)
def _central_power(kind: str, n: int) -> ReducedElement:
    if n == 0:
        return ONE_REDUCED
    base = central_quadratic() if kind == "q" else central_cubic()
    return op_multiply(_central_power(kind, n - 1), base)


def center_expand(a: ReducedElement) -> Dict[Tuple[int, int], GaussianRational]:
    """Write a central element as a polynomial in the two center generators.

    Peels the top degree: among top-degree basis keys only the pattern
    (K,0,0,0,M) can occur for a central element, its coefficient is the
    polynomial coefficient of C1^K C2^M, and subtracting strictly lowers
    the degree.  Raises NotCentral (with witness) otherwise.
    """
    wit = center_witness(a)
    if wit is not None:
        raise NotCentral(wit[0], wit[1])
    out: Dict[Tuple[int, int], GaussianRational] = {}
    work = a
    while work:
        exp = basis_expand(work)
        d = exp.degree()
        picked = {
            key: c for key, c in exp.coeffs.items()
            if key_degree(key) == d and key[1] == key[2] == key[3] == 0
        }
        if not picked:
            raise NotCentral("top-degree", work)
        for (K, _, _, _, M), c in picked.items():
            out[(K, M)] = out.get((K, M), GaussianRational(0)) + c
            work = work - op_multiply(
                _central_power("q", K), _central_power("c", M)
            ).scale(c)
    return {km: c for km, c in out.items() if c}


def center_reconstruct(poly: Dict[Tuple[int, int], GaussianRational]) -> ReducedElement:
    out = ZERO_REDUCED
    for (K, M), c in poly.items():
        out = out + op_multiply(_central_power("q", K), _central_power("c", M)).scale(c)
    return out
