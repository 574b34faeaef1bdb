"""Exact model of the enveloping algebra of sl3 over Q(i).

Basis of sl3: the six off-diagonal matrix units E_ij together with the
two traceless diagonal elements H1 = E11 - E33 and H2 = E22 - E33.  The
fixed total order is

    E12 < E13 < E23 < E21 < E31 < E32 < H1 < H2

and ordered monomials in this basis (exponent 8-tuples) form the PBW
basis.  Putting the diagonal elements last means that a monomial
carrying a diagonal factor lies in U(g)*a, which turns the quotient map
onto the coset-space operator algebra into plain coefficient projection
(see sl3inv.invariant).

Elements are finite maps {exponent tuple -> GaussianRational}; all
arithmetic is exact.
"""

from __future__ import annotations

import sys
from itertools import permutations
from typing import Dict, Iterable, Sequence, Tuple

from .scalars import GaussianRational, ONE, rational

# Letter indices, in the fixed order.
E12, E13, E23, E21, E31, E32, H1, H2 = range(8)

LETTER_NAMES = ("E12", "E13", "E23", "E21", "E31", "E32", "H1", "H2")
NAME_TO_LETTER = {n: i for i, n in enumerate(LETTER_NAMES)}
NAME_TO_LETTER["X11"] = H1
NAME_TO_LETTER["X22"] = H2

Monomial = Tuple[int, ...]  # length-8 exponent vector
IDENTITY_MONO: Monomial = (0,) * 8

# Deep straightening recursion on degree ~30 words needs more headroom
# than CPython's default limit.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


def _letter_matrix(i: int):
    """3x3 integer matrix of basis letter i, rows of row-major tuples."""
    m = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    if i == H1:
        m[0][0], m[2][2] = 1, -1
    elif i == H2:
        m[1][1], m[2][2] = 1, -1
    else:
        r, c = ((1, 2), (1, 3), (2, 3), (2, 1), (3, 1), (3, 2))[i]
        m[r - 1][c - 1] = 1
    return m


def _decompose(m) -> Tuple[Tuple[int, int], ...]:
    """Write a traceless integer matrix in the fixed basis."""
    out = []
    pos = {(1, 2): E12, (1, 3): E13, (2, 3): E23, (2, 1): E21, (3, 1): E31, (3, 2): E32}
    for (r, c), letter in pos.items():
        if m[r - 1][c - 1]:
            out.append((letter, m[r - 1][c - 1]))
    if m[0][0]:
        out.append((H1, m[0][0]))
    if m[1][1]:
        out.append((H2, m[1][1]))
    assert m[2][2] == -m[0][0] - m[1][1]
    return tuple(out)


def _bracket_table():
    table = {}
    mats = [_letter_matrix(i) for i in range(8)]
    for a in range(8):
        for b in range(8):
            ma, mb = mats[a], mats[b]
            comm = [
                [
                    sum(ma[r][k] * mb[k][c] - mb[r][k] * ma[k][c] for k in range(3))
                    for c in range(3)
                ]
                for r in range(3)
            ]
            table[(a, b)] = _decompose(comm)
    return table


#: [a, b] as a tuple of (letter, integer coefficient) pairs.
BRACKET_TABLE = _bracket_table()

# ---------------------------------------------------------------------------
# Straightening kernel
# ---------------------------------------------------------------------------

_LETTER_CACHE: Dict[Tuple[Monomial, int], Dict[Monomial, int]] = {}


def _mul_letter(mono: Monomial, x: int) -> Dict[Monomial, int]:
    """Normal form of (ordered monomial) * letter_x, integer coefficients."""
    y = -1
    for j in range(7, x, -1):
        if mono[j]:
            y = j
            break
    if y < 0:
        lst = list(mono)
        lst[x] += 1
        return {tuple(lst): 1}
    key = (mono, x)
    cached = _LETTER_CACHE.get(key)
    if cached is not None:
        return cached
    # mono = m' * y  with y the last letter;  m*x = (m'*x)*y + m'*[y,x]
    head = list(mono)
    head[y] -= 1
    head_t = tuple(head)
    out: Dict[Monomial, int] = {}
    for m, c in _mul_letter(head_t, x).items():
        for mm, cc in _mul_letter(m, y).items():
            v = out.get(mm, 0) + c * cc
            if v:
                out[mm] = v
            else:
                out.pop(mm, None)
    for letter, c in BRACKET_TABLE[(y, x)]:
        for mm, cc in _mul_letter(head_t, letter).items():
            v = out.get(mm, 0) + c * cc
            if v:
                out[mm] = v
            else:
                out.pop(mm, None)
    _LETTER_CACHE[key] = out
    return out


def clear_caches():
    """Drop the straightening memo (mostly for memory-bound test runs).

    All values in this module are immutable and every operation is pure;
    the memo is the only shared state.  Its entries are written once via
    atomic dict assignment, so concurrent readers can at worst duplicate
    work, never observe a partial result.
    """
    _LETTER_CACHE.clear()


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


class NCElement:
    """Element of U(sl3): finite map from PBW monomials to Q(i) scalars.

    Canonical: zero coefficients are never stored, so equality of the
    underlying maps is equality in the algebra.  Instances are immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Monomial, GaussianRational] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if not isinstance(c, GaussianRational):
                    c = GaussianRational(c)
                if c:
                    clean[m] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("NCElement is immutable")

    # -- ring operations ----------------------------------------------
    def __add__(self, other: "NCElement") -> "NCElement":
        if not isinstance(other, NCElement):
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            v = c if v is None else v + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return _wrap(out)

    def __sub__(self, other: "NCElement") -> "NCElement":
        return self + (-other)

    def __neg__(self) -> "NCElement":
        return _wrap({m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, NCElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)  # scalars commute

    def scale(self, c) -> "NCElement":
        if not isinstance(c, GaussianRational):
            c = GaussianRational(c)
        if not c:
            return ZERO_ELEMENT
        return _wrap({m: v * c for m, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, NCElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- inspection ----------------------------------------------------
    def max_degree(self) -> int:
        """Largest total degree among monomials; -1 for the zero element."""
        return max((sum(m) for m in self.terms), default=-1)

    def homogeneous_part(self, d: int) -> "NCElement":
        return _wrap({m: c for m, c in self.terms.items() if sum(m) == d})

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms, key=lambda t: (sum(t), t)):
            mono = "*".join(
                LETTER_NAMES[i] + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(m)
                if e
            ) or "1"
            bits.append(f"({self.terms[m]!r})*{mono}")
        return " + ".join(bits)

    def to_json(self) -> dict:
        terms = []
        for m in sorted(self.terms, key=lambda t: (sum(t), t)):
            d = {"exp": list(m)}
            d.update(self.terms[m].to_json())
            terms.append(d)
        return {"terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "NCElement":
        out: Dict[Monomial, GaussianRational] = {}
        for t in data["terms"]:
            mono = tuple(int(e) for e in t["exp"])
            if len(mono) != 8 or any(e < 0 for e in mono):
                raise ValueError(f"bad exponent vector {mono}")
            c = GaussianRational(rational(t.get("re", "0")), rational(t.get("im", "0")))
            if c:
                out[mono] = out.get(mono, GaussianRational(0)) + c
        return cls(out)


def _wrap(terms: Dict[Monomial, GaussianRational]) -> NCElement:
    el = NCElement.__new__(NCElement)
    object.__setattr__(el, "terms", {m: c for m, c in terms.items() if c})
    return el


ZERO_ELEMENT = NCElement()
ONE_ELEMENT = NCElement({IDENTITY_MONO: ONE})


def monomial(exponents: Sequence[int], coeff=1) -> NCElement:
    t = tuple(exponents)
    if len(t) != 8 or any(e < 0 for e in t):
        raise ValueError("monomial needs 8 nonnegative exponents")
    return NCElement({t: GaussianRational(coeff) if not isinstance(coeff, GaussianRational) else coeff})


def basis_element(letter: int) -> NCElement:
    e = [0] * 8
    e[letter] = 1
    return monomial(e)


def bracket(a: int, b: int) -> NCElement:
    """Lie bracket [a, b] of two basis letters as a degree <= 1 element."""
    out: Dict[Monomial, GaussianRational] = {}
    for letter, c in BRACKET_TABLE[(a, b)]:
        e = [0] * 8
        e[letter] = 1
        out[tuple(e)] = GaussianRational(c)
    return NCElement(out)


def mono_letters(mono: Monomial) -> Tuple[int, ...]:
    """Monomial as its nondecreasing letter sequence."""
    out = []
    for i, e in enumerate(mono):
        out.extend([i] * e)
    return tuple(out)


def normal_form(word: Iterable[int], coeff=1) -> NCElement:
    """PBW normal form of a product of basis letters (a Word).

    The rewriting terminates because every adjacent swap strictly lowers
    the number of inversions at fixed degree while bracket corrections
    drop the degree.
    """
    acc: Dict[Monomial, int] = {IDENTITY_MONO: 1}
    for x in word:
        if not 0 <= x <= 7:
            raise ValueError(f"unknown basis letter {x}")
        nxt: Dict[Monomial, int] = {}
        for m, c in acc.items():
            for mm, cc in _mul_letter(m, x).items():
                v = nxt.get(mm, 0) + c * cc
                if v:
                    nxt[mm] = v
                else:
                    nxt.pop(mm, None)
        acc = nxt
    if not isinstance(coeff, GaussianRational):
        coeff = GaussianRational(coeff)
    return _wrap({m: coeff * c for m, c in acc.items()})


def _elem_mul_mono(a_terms: Dict[Monomial, GaussianRational], m2: Monomial):
    acc = a_terms
    for x in mono_letters(m2):
        nxt: Dict[Monomial, GaussianRational] = {}
        for m, c in acc.items():
            for mm, cc in _mul_letter(m, x).items():
                v = nxt.get(mm)
                v = c * cc if v is None else v + c * cc
                if v:
                    nxt[mm] = v
                else:
                    nxt.pop(mm, None)
        acc = nxt
    return acc


def multiply(a: NCElement, b: NCElement) -> NCElement:
    """Product in U(sl3); bilinear extension of word concatenation."""
    out: Dict[Monomial, GaussianRational] = {}
    for m2, c2 in b.terms.items():
        for mm, cc in _elem_mul_mono(a.terms, m2).items():
            c = cc * c2
            v = out.get(mm)
            v = c if v is None else v + c
            if v:
                out[mm] = v
            else:
                out.pop(mm, None)
    return _wrap(out)


def commutator(a: NCElement, b: NCElement) -> NCElement:
    return multiply(a, b) - multiply(b, a)


def symmetrize(exponents: Sequence[int]) -> NCElement:
    """Symmetrizer image of a commutative monomial in the basis letters.

    Averages the right-derivative words over all orderings of the
    letters, which for a power of a single letter is just the PBW
    monomial itself.
    """
    exps = tuple(exponents)
    if len(exps) != 8 or any(e < 0 for e in exps):
        raise ValueError("need 8 nonnegative exponents")
    letters = mono_letters(exps)
    k = len(letters)
    if k == 0:
        return ONE_ELEMENT
    rep = 1
    for e in exps:
        for j in range(2, e + 1):
            rep *= j
    fact = 1
    for j in range(2, k + 1):
        fact *= j
    scale = GaussianRational(rational(rep, fact))
    seen = set()
    total = ZERO_ELEMENT
    for perm in permutations(letters):
        if perm in seen:
            continue
        seen.add(perm)
        total = total + normal_form(perm)
    return total.scale(scale)


def symmetrize_element(commutative_terms: Dict[Monomial, GaussianRational]) -> NCElement:
    """Linear extension of the symmetrizer to polynomial arguments."""
    out = ZERO_ELEMENT
    for m, c in commutative_terms.items():
        out = out + symmetrize(m).scale(c)
    return out


def formal_adjoint(a: NCElement) -> NCElement:
    """Formal adjoint: reverse each word, flip sign per letter, conjugate.

    Involutive and anti-multiplicative; fixes the symmetrized quadratic
    generators and the sqrt(-1)-twisted cubic ones.
    """
    out = ZERO_ELEMENT
    for m, c in a.terms.items():
        letters = mono_letters(m)
        sign = -1 if len(letters) % 2 else 1
        out = out + normal_form(reversed(letters), c.conjugate() * sign)
    return out


def weight(mono: Monomial) -> Tuple[int, int, int]:
    """Diagonal torus weight of a monomial: +1 at the column index and
    -1 at the row index of every off-diagonal factor."""
    s = [0, 0, 0]
    pairs = ((1, 2), (1, 3), (2, 3), (2, 1), (3, 1), (3, 2))
    for letter in range(6):
        e = mono[letter]
        if e:
            i, j = pairs[letter]
            s[i - 1] -= e
            s[j - 1] += e
    return tuple(s)


def is_A_invariant(a: NCElement) -> bool:
    """True iff every monomial has weight zero (commutes with the right
    action of the positive diagonal subgroup)."""
    return all(weight(m) == (0, 0, 0) for m in a.terms)
