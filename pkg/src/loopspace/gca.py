"""Free graded-commutative algebra kernel over Q.

Generators are ordered canonically: base generators sorted by (degree,
declaration order), then suspended generators in the same induced order.
A monomial is an exponent tuple over that order; odd-degree generators
carry exponent at most 1.  An element is a plain dict from exponent tuple
to nonzero Fraction.

Sign conventions, fixed once here and used everywhere downstream:

  * products are normalized by merging exponent vectors; the Koszul sign
    counts inversions between odd-degree factors only, since even factors
    commute freely;
  * a derivation theta of degree s satisfies
        theta(a*b) = theta(a)*b + (-1)^(s*|a|) a*theta(b),
    so applying theta to an ordered monomial walks its factors left to
    right and picks up (-1)^(s*|prefix|) at each position.

Monomial order: total degree first, then ascending lexicographic order on
exponent tuples.  basis_of_degree enumerates in exactly that order.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import MissingImage, InternalCheckFailure
from .exactq import SparseMatrix, ZERO, ONE


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    kind: str = "base"          # "base" or "suspended"
    partner: int | None = None  # for suspended: index of the base generator

    def is_odd(self):
        return self.degree % 2 == 1


@dataclass
class DerivationSpec:
    """A derivation given by its degree shift and generator images.

    images maps generator index -> element dict.  An absent index means the
    image was never declared, which is an error on use; an empty dict is an
    explicit zero image.
    """
    degree_shift: int
    images: dict


def check_derivation_spec(gens, spec):
    """Every declared image must be homogeneous of degree |g| + shift."""
    for i, img in spec.images.items():
        want = gens[i].degree + spec.degree_shift
        for mono in img:
            if monomial_degree(gens, mono) != want:
                raise InternalCheckFailure(
                    "image of %s is not homogeneous of degree %d"
                    % (gens[i].name, want))


def monomial_degree(gens, mono):
    return sum(e * g.degree for e, g in zip(mono, gens))


def monomial_word_length(gens, mono):
    """Number of suspended factors, counted with multiplicity."""
    return sum(e for e, g in zip(mono, gens) if g.kind == "suspended")


def unit_monomial(gens):
    return (0,) * len(gens)


def normalize_product(gens, m1, m2):
    """Merge two monomials; return (sign, monomial) or None when zero.

    The sign is (-1)^k where k counts pairs of odd factors that swap past
    each other when the factors of m2 are merged into m1 position by
    position.  A repeated odd factor kills the product.
    """
    out = list(m1)
    swaps = 0
    suffix_odd = 0  # odd factors of m1 strictly above the current index
    for j in range(len(gens) - 1, -1, -1):
        b = m2[j]
        odd = gens[j].degree % 2
        if b:
            if odd:
                if m1[j] or b > 1:
                    return None
                swaps += suffix_odd
            out[j] = m1[j] + b
        if odd and m1[j]:
            suffix_odd += m1[j]
    return (-1 if swaps % 2 else 1), tuple(out)


@lru_cache(maxsize=None)
def basis_of_degree(gens, n):
    """All monomials of total degree n, ascending lexicographic order."""
    if n < 0:
        return ()

    def rec(i, remaining):
        if i == len(gens):
            return [()] if remaining == 0 else []
        g = gens[i]
        cap = 1 if g.degree % 2 else remaining // g.degree
        res = []
        for e in range(cap + 1):
            rest = remaining - e * g.degree
            if rest < 0:
                break
            for tail in rec(i + 1, rest):
                res.append((e,) + tail)
        return res

    return tuple(rec(0, n))


def slice_basis(gens, n, word_length=None):
    """Monomials of degree n, optionally restricted to a word length."""
    if word_length is None:
        return basis_of_degree(gens, n)
    return tuple(m for m in basis_of_degree(gens, n)
                 if monomial_word_length(gens, m) == word_length)


def elem_scale(e, c):
    if not c:
        return {}
    return {m: c * v for m, v in e.items()}


def elem_add_into(acc, e, c=ONE):
    for m, v in e.items():
        s = acc.get(m, ZERO) + c * v
        if s:
            acc[m] = s
        else:
            acc.pop(m, None)
    return acc


def elem_mul(gens, e1, e2):
    out = {}
    for m1, c1 in e1.items():
        for m2, c2 in e2.items():
            p = normalize_product(gens, m1, m2)
            if p is None:
                continue
            sign, m = p
            s = out.get(m, ZERO) + sign * c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def elem_degree(gens, e):
    """Degree of a homogeneous element, None for zero."""
    degs = {monomial_degree(gens, m) for m in e}
    if not degs:
        return None
    if len(degs) > 1:
        raise ValueError("inhomogeneous element, degrees %s" % sorted(degs))
    return degs.pop()


_MISSING = object()


def apply_derivation(gens, spec, elem):
    """Apply a derivation to an element dict, exactly.

    Walks each monomial's factors in canonical order; position i picks up
    the Koszul sign (-1)^(shift * |prefix|) and a factor equal to the
    exponent (even generators only repeat; odd exponents are at most 1).
    """
    images = spec.images
    odd_shift = spec.degree_shift % 2
    out = {}
    n = len(gens)
    for mono, coeff in elem.items():
        prefix_deg = 0
        for i in range(n):
            e = mono[i]
            if not e:
                continue
            img = images.get(i, _MISSING)
            if img is _MISSING:
                raise MissingImage("no image declared for generator %s" % gens[i].name)
            if img:
                left = mono[:i] + (e - 1,) + (0,) * (n - i - 1)
                right = (0,) * (i + 1) + mono[i + 1:]
                sign = -1 if (odd_shift and prefix_deg % 2) else 1
                term = {left: coeff * e * sign}
                term = elem_mul(gens, term, img)
                if right != unit_monomial(gens):
                    term = elem_mul(gens, term, {right: ONE})
                elem_add_into(out, term)
            prefix_deg += e * gens[i].degree
    return out


def matrix_of_degree_slice(gens, spec, n, word_length=None):
    """Matrix of a derivation from the degree-n slice to degree n + shift.

    Columns follow the canonical monomial order of the domain slice, rows
    that of the codomain.  With a word_length filter the derivation must
    preserve word length; a stray image monomial raises, by design.
    """
    dom = slice_basis(gens, n, word_length)
    cod = slice_basis(gens, n + spec.degree_shift, word_length)
    index = {m: r for r, m in enumerate(cod)}
    entries = {}
    for c, mono in enumerate(dom):
        img = apply_derivation(gens, spec, {mono: ONE})
        for m2, v in img.items():
            r = index.get(m2)
            if r is None:
                raise InternalCheckFailure(
                    "derivation image left the degree/word-length slice")
            entries[(r, c)] = v
    return SparseMatrix(len(cod), len(dom), entries)


def render_monomial(gens, mono):
    parts = []
    for e, g in zip(mono, gens):
        if e == 1:
            parts.append(g.name)
        elif e > 1:
            parts.append("%s^%d" % (g.name, e))
    return "*".join(parts) if parts else "1"


def render_element(gens, e):
    if not e:
        return "0"
    out = []
    for mono in sorted(e):
        c = e[mono]
        body = render_monomial(gens, mono)
        if body == "1":
            out.append(str(c))
        elif c == 1:
            out.append(body)
        elif c == -1:
            out.append("-" + body)
        else:
            out.append("%s*%s" % (c, body))
    rendered = " + ".join(out)
    return rendered.replace("+ -", "- ")
