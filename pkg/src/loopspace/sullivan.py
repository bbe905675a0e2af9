"""Sullivan minimal models: file format, validation, cohomology, duality.

A model file is line oriented UTF-8; '#' starts a comment, blank lines are
skipped:

    model NAME            display name (optional)
    dim N                 formal dimension, required
    complete              all generators are present, or
    complete-to C         generators complete through degree C, required
    gen NAME DEGREE       one generator per line, degree >= 2 for validity
    d NAME = POLY         differential; omitted means zero

POLY is a sum of terms [RAT*]NAME[^INT][*NAME[^INT]]..., RAT like -3/2.

The trust rule: with generators complete through degree c the base
cohomology is reliable for n <= c (a degree c+1 generator could change
H^{c+1} and H^{c+2}); loop space quantities built downstream are reliable
for n <= c - 1 because suspensions drop degree by one.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (ParseError, UnknownGenerator, DegreeMismatch, OddExponent,
                     NotPoincareDuality, InternalCheckFailure)
from .exactq import (SparseMatrix, ZERO, ONE, rref, rank, kernel_basis,
                     cohomology_dim, solve_in_span, span_rank,
                     representative_cocycles)
from . import gca
from .gca import Generator, DerivationSpec


@dataclass
class RankTable:
    """Integer table indexed by degree, with an honesty marker.

    Entries above trusted_up_to were computed from a truncated model and
    may change if more generators exist; reports flag them with '?'.
    """
    label: str
    entries: dict
    trusted_up_to: int

    def get(self, n):
        return self.entries.get(n, 0)

    def as_array(self, n_max):
        return [self.entries.get(n, 0) for n in range(n_max + 1)]


@dataclass
class SullivanModel:
    name: str
    generators: tuple          # base Generators, canonical order
    differential: DerivationSpec   # degree +1, images over base generators
    formal_dim: int
    completeness: int | None   # None means complete
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_cache"] = {}
        return state

    def basis(self, n):
        return gca.basis_of_degree(self.generators, n)

    def d_matrix(self, n):
        """Matrix of d from degree n to degree n+1, cached."""
        key = ("d", n)
        m = self._cache.get(key)
        if m is None:
            if n < 0:
                m = SparseMatrix(len(self.basis(n + 1)), 0)
            else:
                m = gca.matrix_of_degree_slice(self.generators, self.differential, n)
            self._cache[key] = m
        return m

    def trusted_base(self, n_max):
        c = self.completeness
        return n_max if c is None else min(n_max, c)

    def trusted_loop(self, n_max):
        c = self.completeness
        return n_max if c is None else min(n_max, c - 1)


_GEN_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_TOKEN_RE = re.compile(r"\s*(?:(\d+/\d+|\d+)|([A-Za-z_][A-Za-z0-9_]*)|([*^+\-])|(\S))")


def _tokenize(text, lineno):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            break
        num, name, op, bad = m.groups()
        if bad is not None:
            raise ParseError("unexpected character %r" % bad, lineno)
        if num is not None:
            tokens.append(("num", num))
        elif name is not None:
            tokens.append(("name", name))
        else:
            tokens.append(("op", op))
        pos = m.end()
    return tokens


def _parse_poly(tokens, gens, index_of, lineno):
    """Parse a token list into an element dict over `gens`."""
    n = len(gens)
    result = {}
    i = 0
    if not tokens:
        raise ParseError("empty polynomial", lineno)
    first = True
    while i < len(tokens):
        sign = ONE
        kind, val = tokens[i]
        if kind == "op" and val in "+-":
            sign = ONE if val == "+" else -ONE
            i += 1
        elif not first:
            raise ParseError("expected '+' or '-' between terms", lineno)
        first = False
        coeff = sign
        if i < len(tokens) and tokens[i][0] == "num":
            coeff *= Fraction(tokens[i][1])
            i += 1
            if i >= len(tokens) or tokens[i] != ("op", "*"):
                raise ParseError("coefficient must be followed by '*' and a generator", lineno)
            i += 1
        expo = [0] * n
        saw_factor = False
        while True:
            if i >= len(tokens) or tokens[i][0] != "name":
                if saw_factor:
                    break
                raise ParseError("expected a generator name", lineno)
            name = tokens[i][1]
            gi = index_of.get(name)
            if gi is None:
                raise UnknownGenerator("unknown generator %r" % name, lineno)
            i += 1
            e = 1
            if i < len(tokens) and tokens[i] == ("op", "^"):
                i += 1
                if i >= len(tokens) or tokens[i][0] != "num" or "/" in tokens[i][1]:
                    raise ParseError("exponent must be a positive integer", lineno)
                e = int(tokens[i][1])
                if e < 1:
                    raise ParseError("exponent must be a positive integer", lineno)
                i += 1
            expo[gi] += e
            if gens[gi].degree % 2 == 1 and expo[gi] > 1:
                raise OddExponent(
                    "odd generator %r squared" % name, lineno)
            saw_factor = True
            if i < len(tokens) and tokens[i] == ("op", "*"):
                i += 1
                continue
            break
        mono = tuple(expo)
        s = result.get(mono, ZERO) + coeff
        if s:
            result[mono] = s
        else:
            result.pop(mono, None)
    return result


def parse_model(text, name_hint="(unnamed)"):
    """Parse a model file into a SullivanModel.

    The parser checks the purely syntactic contract plus degree coherence
    of each differential line: every term of d NAME must be homogeneous of
    degree |NAME| + 1.  Structural requirements (simple connectivity,
    minimality, d^2 = 0) are left to validate().
    """
    name = name_hint
    dim = None
    completeness = "missing"
    raw_gens = []          # (name, degree, lineno) in declaration order
    d_lines = []           # (target name, tokens, lineno)
    seen_names = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split(None, 1)
        head = words[0]
        rest = words[1] if len(words) > 1 else ""
        if head == "model":
            if not rest:
                raise ParseError("model line needs a name", lineno)
            name = rest.strip()
        elif head == "dim":
            try:
                dim = int(rest)
            except ValueError:
                raise ParseError("dim needs an integer", lineno)
            if dim < 1:
                raise ParseError("dim must be positive", lineno)
        elif head == "complete":
            if rest:
                raise ParseError("complete takes no argument", lineno)
            completeness = None
        elif head == "complete-to":
            try:
                completeness = int(rest)
            except ValueError:
                raise ParseError("complete-to needs an integer", lineno)
            if completeness < 1:
                raise ParseError("complete-to must be positive", lineno)
        elif head == "gen":
            parts = rest.split()
            if len(parts) != 2:
                raise ParseError("gen needs: gen NAME DEGREE", lineno)
            gname, gdeg = parts
            if not _GEN_RE.match(gname):
                raise ParseError("bad generator name %r" % gname, lineno)
            try:
                gdeg = int(gdeg)
            except ValueError:
                raise ParseError("generator degree must be an integer", lineno)
            if gdeg < 1:
                raise ParseError("generator degree must be positive", lineno)
            if gname in seen_names:
                raise ParseError("generator %r declared twice" % gname, lineno)
            seen_names.add(gname)
            raw_gens.append((gname, gdeg, lineno))
        elif head == "d":
            m = re.match(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$", rest)
            if not m:
                raise ParseError("differential line needs: d NAME = POLY", lineno)
            d_lines.append((m.group(1), m.group(2), lineno))
        else:
            raise ParseError("unknown directive %r" % head, lineno)

    if dim is None:
        raise ParseError("missing required 'dim' line")
    if completeness == "missing":
        raise ParseError("missing required 'complete' or 'complete-to' line")
    if not raw_gens:
        raise ParseError("model declares no generators")

    # canonical order: (degree, declaration order)
    order = sorted(range(len(raw_gens)), key=lambda i: (raw_gens[i][1], i))
    gens = tuple(Generator(raw_gens[i][0], raw_gens[i][1], "base", None)
                 for i in order)
    index_of = {g.name: i for i, g in enumerate(gens)}

    images = {i: {} for i in range(len(gens))}
    targets_seen = set()
    for tname, polytext, lineno in d_lines:
        ti = index_of.get(tname)
        if ti is None:
            raise UnknownGenerator("differential of unknown generator %r" % tname, lineno)
        if ti in targets_seen:
            raise ParseError("differential of %r declared twice" % tname, lineno)
        targets_seen.add(ti)
        poly = _parse_poly(_tokenize(polytext, lineno), gens, index_of, lineno)
        want = gens[ti].degree + 1
        for mono in poly:
            got = gca.monomial_degree(gens, mono)
            if got != want:
                raise DegreeMismatch(
                    "d %s must be homogeneous of degree %d, found a degree %d term"
                    % (tname, want, got), lineno)
        images[ti] = poly

    model = SullivanModel(name=name, generators=gens,
                          differential=DerivationSpec(1, images),
                          formal_dim=dim, completeness=completeness)
    return model


@dataclass
class ValidationReport:
    checks: list  # of (name, passed, detail)

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.checks)


def validate(model):
    """Structural checks: simple connectivity, minimality, d squared zero."""
    gens = model.generators
    checks = []

    bad = [g.name for g in gens if g.degree < 2]
    checks.append(("simply_connected", not bad,
                   "all generators in degree >= 2" if not bad
                   else "degree <= 1 generators: %s" % ", ".join(bad)))

    non_min = []
    for i, g in enumerate(gens):
        img = model.differential.images.get(i, {})
        for mono in img:
            if sum(mono) < 2:
                non_min.append(g.name)
                break
    checks.append(("minimal", not non_min,
                   "all differentials decomposable" if not non_min
                   else "linear part in d of: %s" % ", ".join(non_min)))

    not_square_zero = []
    for i, g in enumerate(gens):
        img = model.differential.images.get(i, {})
        dd = gca.apply_derivation(gens, model.differential, img)
        if dd:
            not_square_zero.append(g.name)
    checks.append(("d_squared_zero", not not_square_zero,
                   "d*d vanishes on every generator" if not not_square_zero
                   else "d*d nonzero on: %s" % ", ".join(not_square_zero)))

    return ValidationReport(checks)


def cohomology_table(model, n_max):
    """dim H^n for 0 <= n <= n_max, exact."""
    entries = {}
    for n in range(n_max + 1):
        entries[n] = cohomology_dim(model.d_matrix(n), model.d_matrix(n - 1))
    return RankTable("base_betti", entries, model.trusted_base(n_max))


def cocycle_representatives(model, n):
    """Deterministic cocycle vectors representing a basis of H^n."""
    return representative_cocycles(model.d_matrix(n), model.d_matrix(n - 1))


def _vector_to_element(basis, vec):
    return {basis[i]: c for i, c in vec.items() if c}


@dataclass
class PoincareReport:
    formal_dim: int
    window: int
    fundamental_class: dict    # element dict of degree N
    fundamental_render: str
    pairing_ranks: dict        # k -> rank of the cup pairing H^k x H^{N-k}
    betti: RankTable


def check_poincare_duality(model, n_max=None):
    """Verify the rational Poincare duality profile of H(model).

    Checks, in order and failing with the first offending degree:
    dim H^N = 1; H^n = 0 for N < n <= window; dim H^k = dim H^{N-k} and
    the cup product pairing into H^N has full rank, for every 0 <= k <= N.
    Returns a report carrying the fundamental class representative.
    """
    N = model.formal_dim
    window = n_max if n_max is not None else N + 8
    window = max(window, N + 1)
    betti = cohomology_table(model, window)

    if betti.get(N) != 1:
        raise NotPoincareDuality(N, "dim H^%d = %d, expected 1" % (N, betti.get(N)))
    for n in range(N + 1, window + 1):
        if betti.get(n) != 0:
            raise NotPoincareDuality(
                n, "H^%d has dimension %d above the formal dimension" % (n, betti.get(n)))

    gens = model.generators
    basis_N = model.basis(N)
    b_cols = model.d_matrix(N - 1).columns()
    b_rank = span_rank(b_cols, len(basis_N))

    # fundamental class: first monomial cocycle completing H^N, else the
    # first representative kernel vector
    omega = None
    for j, mono in enumerate(basis_N):
        if gca.apply_derivation(gens, model.differential, {mono: ONE}):
            continue
        cand = {j: ONE}
        if span_rank(b_cols + [cand], len(basis_N)) > b_rank:
            omega = cand
            break
    if omega is None:
        for vec in cocycle_representatives(model, N):
            if span_rank(b_cols + [vec], len(basis_N)) > b_rank:
                omega = vec
                break
    if omega is None:
        raise NotPoincareDuality(N, "no cocycle represents the top class")

    def top_coefficient(vec):
        coeffs = solve_in_span(b_cols + [omega], vec, len(basis_N))
        if coeffs is None:
            raise InternalCheckFailure("degree-N cocycle escaped span of boundaries and top class")
        return coeffs[-1]

    reps = {k: cocycle_representatives(model, k) for k in range(N + 1)}
    pairing_ranks = {}
    for k in range(N + 1):
        hk, hnk = betti.get(k), betti.get(N - k)
        if hk != hnk:
            raise NotPoincareDuality(
                k, "dim H^%d = %d but dim H^%d = %d" % (k, hk, N - k, hnk))
        rows = {}
        for i, u in enumerate(reps[k]):
            eu = _vector_to_element(model.basis(k), u)
            for j, v in enumerate(reps[N - k]):
                ev = _vector_to_element(model.basis(N - k), v)
                prod = gca.elem_mul(gens, eu, ev)
                pvec = {basis_N.index(m): c for m, c in prod.items()}
                c = top_coefficient(pvec)
                if c:
                    rows[(i, j)] = c
        pr = rank(SparseMatrix(hk, hnk, rows))
        pairing_ranks[k] = pr
        if pr != hk:
            raise NotPoincareDuality(
                k, "cup pairing H^%d x H^%d has rank %d, expected %d"
                % (k, N - k, pr, hk))

    omega_elem = _vector_to_element(basis_N, omega)
    return PoincareReport(
        formal_dim=N, window=window,
        fundamental_class=omega_elem,
        fundamental_render=gca.render_element(gens, omega_elem),
        pairing_ranks=pairing_ranks,
        betti=betti)
