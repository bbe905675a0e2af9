"""Loop cohomology through the finite quotient, duality, and aut ranks.

Three chain-level objects are built on top of the quotient algebra A:

  * the extended complex A (x) L sV with differential Dbar, the image of
    the loop differential under the projection rho (x) 1; its word-length
    one slice A (x) sV carries the degrees that matter here;
  * the duality map Du : A -> A-dual, Du(a)(b) = coefficient of the
    fundamental class in a*b, a chain map of degree -N up to the sign
    (-1)^N;
  * the dual complex A-dual (x) sV with the differential

      delta(a_j' (x) sv) = (-1)^{|a_j|} [ sum_{i,l} alpha_il^j a_l' (x) t_i(v)
                                          - sum_r beta_r^j a_r' (x) sv ]

    where Dbar(1 (x) sv) = sum_i a_i (x) t_i(v) and a' denotes the dual
    basis vector.  This formula is forced by asking the evaluation pairing
    to be compatible with Dbar, and it makes Du (x) 1 a chain map up to
    (-1)^N whether or not Du is invertible; that square identity is
    verified on every degree slice, exactly.

The ranks of interest are dim H^{n+N}(A (x) sV): they are checked against
the word-length one loop cohomology, against the dual complex, and
against an independent computation with derivations of the base model
(the classical description of the rational homotopy of the identity
component of the self-equivalences).
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (ValidationFailure, DifferentialSquareNonzero,
                     SignIdentityFailure, DualMismatch, TheoremMismatch,
                     SingularDuality, InternalCheckFailure, ChainMapFailure,
                     QuasiIsoFailure)
from .exactq import (SparseMatrix, ZERO, ONE, rank, cohomology_dim,
                     representative_cocycles, induced_quotient_rank)
from . import gca
from .gca import DerivationSpec
from .sullivan import RankTable, validate, check_poincare_duality
from .freeloop import build_free_loop_model, hodge_betti_table, loop_betti
from .pdquotient import build_quotient, structure_identities, verify_quasi_iso


@dataclass
class ExtendedQuotientModel:
    """A (x) L sV with the projected loop differential.

    Basis elements of a slice are pairs (i, m): class a_i tensored with a
    monomial m in the suspended generators, ordered by (i, m).  dbar_sv[j]
    holds Dbar(1 (x) sv_j) as {(class index, suspended index): coeff}.
    """
    algebra: object
    qmap: object
    flm: object
    sgens: tuple
    dbar_sv: dict
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_cache"] = {}
        return state

    def slice_basis(self, n, k=None):
        key = ("basis", n, k)
        got = self._cache.get(key)
        if got is None:
            pairs = []
            for i, p in enumerate(self.algebra.degrees):
                if n - p < 0:
                    continue
                for m in gca.slice_basis(self.sgens, n - p, k):
                    pairs.append((i, m))
            got = tuple(pairs)
            self._cache[key] = got
        return got

    def dbar_on_svmono(self, m):
        """Dbar(1 (x) m) as {(class, sv monomial): coeff}, by Leibniz."""
        sgens = self.sgens
        nb = len(sgens)
        degs = self.algebra.degrees
        out = {}
        prefix_deg = 0
        for pos in range(nb):
            e = m[pos]
            if e:
                hit = self.dbar_sv.get(pos)
                if hit:
                    left = m[:pos] + (e - 1,) + (0,) * (nb - pos - 1)
                    right = (0,) * (pos + 1) + m[pos + 1:]
                    sgn_pref = -1 if prefix_deg % 2 else 1
                    ldeg = gca.monomial_degree(sgens, left)
                    for (ai, j2), c in hit.items():
                        sv2 = tuple(1 if t == j2 else 0 for t in range(nb))
                        p1 = gca.normalize_product(sgens, left, sv2)
                        if p1 is None:
                            continue
                        s1, mid = p1
                        p2 = gca.normalize_product(sgens, mid, right)
                        if p2 is None:
                            continue
                        s2, full = p2
                        sgn_a = -1 if (ldeg * degs[ai]) % 2 else 1
                        coeff = c * e * sgn_pref * sgn_a * s1 * s2
                        key = (ai, full)
                        s = out.get(key, ZERO) + coeff
                        if s:
                            out[key] = s
                        else:
                            out.pop(key, None)
            prefix_deg += e * sgens[pos].degree
        return out

    def dbar_pair(self, i, m):
        """Dbar(a_i (x) m) as {(class, sv monomial): coeff}."""
        out = {}
        for j, c in self.algebra.differential(i).items():
            key = (j, m)
            s = out.get(key, ZERO) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        sgn = -1 if self.algebra.degrees[i] % 2 else 1
        for (ai, m2), c in self.dbar_on_svmono(m).items():
            for k, a in self.algebra.product(i, ai).items():
                key = (k, m2)
                s = out.get(key, ZERO) + sgn * c * a
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return out

    def d_matrix(self, n, k=None):
        key = ("Dbar", n, k)
        got = self._cache.get(key)
        if got is None:
            if n < 0:
                got = SparseMatrix(len(self.slice_basis(n + 1, k)), 0)
            else:
                dom = self.slice_basis(n, k)
                cod = self.slice_basis(n + 1, k)
                pos = {p: r for r, p in enumerate(cod)}
                entries = {}
                for c, (i, m) in enumerate(dom):
                    for p2, v in self.dbar_pair(i, m).items():
                        r = pos.get(p2)
                        if r is None:
                            raise InternalCheckFailure(
                                "extended differential left its slice at degree %d" % n)
                        entries[(r, c)] = v
                got = SparseMatrix(len(cod), len(dom), entries)
            self._cache[key] = got
        return got

    def betti(self, n, k=None):
        return cohomology_dim(self.d_matrix(n, k), self.d_matrix(n - 1, k))

    def rho_tensor_matrix(self, n, k=None):
        """Matrix of rho (x) 1 from the loop slice (n, k) to this one."""
        key = ("rho", n, k)
        got = self._cache.get(key)
        if got is None:
            model = self.flm.base
            nb = len(model.generators)
            dom = self.flm.slice_basis(n, k)
            cod = self.slice_basis(n, k)
            pos = {p: r for r, p in enumerate(cod)}
            entries = {}
            for c, mono in enumerate(dom):
                b, s = mono[:nb], mono[nb:]
                bdeg = gca.monomial_degree(model.generators, b)
                img = self.qmap.apply(model, self.algebra, {b: ONE}, bdeg)
                for ai, v in img.items():
                    r = pos.get((ai, s))
                    if r is None:
                        raise InternalCheckFailure(
                            "projection left the slice at degree %d" % n)
                    entries[(r, c)] = v
            got = SparseMatrix(len(cod), len(dom), entries)
            self._cache[key] = got
        return got


def extend_to_quotient_loop(model, algebra, qmap, flm=None, check_to=None):
    """Push the loop differential through the quotient and verify it.

    Checks, slice by slice up to check_to (default: top degree of A plus
    two): Dbar composed with itself vanishes, and rho (x) 1 intertwines
    the two differentials.
    """
    if flm is None:
        flm = build_free_loop_model(model)
    nb = len(model.generators)
    sgens = flm.generators[nb:]

    dbar_sv = {}
    for j in range(nb):
        img = flm.loop_differential.images[nb + j]
        acc = {}
        for mono, c in img.items():
            b, s = mono[:nb], mono[nb:]
            if sum(s) != 1:
                raise InternalCheckFailure(
                    "loop differential of a suspension has word length != 1")
            j2 = s.index(1)
            bdeg = gca.monomial_degree(model.generators, b)
            for ai, c2 in qmap.apply(model, algebra, {b: ONE}, bdeg).items():
                key = (ai, j2)
                v = acc.get(key, ZERO) + c * c2
                if v:
                    acc[key] = v
                else:
                    acc.pop(key, None)
        if acc:
            dbar_sv[j] = acc

    eqm = ExtendedQuotientModel(algebra=algebra, qmap=qmap, flm=flm,
                                sgens=sgens, dbar_sv=dbar_sv)

    top = check_to if check_to is not None else algebra.top_degree + 2
    for n in range(top + 1):
        for k in range(n + 2):
            d0 = eqm.d_matrix(n, k)
            d1 = eqm.d_matrix(n + 1, k)
            if not d1.mul(d0).is_zero():
                raise DifferentialSquareNonzero(
                    "Dbar*Dbar nonzero on slice (%d, %d)" % (n, k))
            left = eqm.rho_tensor_matrix(n + 1, k).mul(flm.d_matrix(n, k))
            right = d0.mul(eqm.rho_tensor_matrix(n, k))
            if left != right:
                raise ChainMapFailure(
                    "rho (x) 1 fails to commute with the differentials "
                    "on slice (%d, %d)" % (n, k))
    return eqm


def verify_rho_tensor_quasi_iso(eqm, n_max):
    """Check rho (x) 1 induces isomorphisms on every (degree, word) slice."""
    flm = eqm.flm
    slices = 0
    for n in range(n_max + 1):
        for k in range(n + 1):
            if not (flm.slice_basis(n, k) or eqm.slice_basis(n, k)):
                continue
            h_loop = cohomology_dim(flm.d_matrix(n, k), flm.d_matrix(n - 1, k))
            h_ext = eqm.betti(n, k)
            if h_loop != h_ext:
                raise QuasiIsoFailure(
                    n, "slice (%d, %d): loop model gives %d, quotient gives %d"
                    % (n, k, h_loop, h_ext))
            reps = representative_cocycles(flm.d_matrix(n, k),
                                           flm.d_matrix(n - 1, k))
            rho = eqm.rho_tensor_matrix(n, k)
            images = [rho.apply(v) for v in reps]
            bdry = eqm.d_matrix(n - 1, k).columns()
            got = induced_quotient_rank(images, bdry, len(eqm.slice_basis(n, k)))
            if got != h_loop:
                raise QuasiIsoFailure(
                    n, "slice (%d, %d): induced map has rank %d, expected %d"
                    % (n, k, got, h_loop))
            slices += 1
    return slices


@dataclass
class DualityMap:
    """Du : A^k -> (A^{N-k})-dual, Du(a_i) = sum_j alpha_ij^top a_j'.

    blocks[k] is the degree-k matrix (rows: degree N-k classes, columns:
    degree k classes).  cochain_perfect says every block is square and
    invertible; the map always induces isomorphisms on cohomology for a
    verified duality quotient, and that is checked separately.
    """
    formal_dim: int
    blocks: dict
    cochain_perfect: bool
    singular_degrees: tuple


def dual_diff_matrix(algebra, q):
    """Differential (A^q)-dual -> (A^{q-1})-dual of the dual complex.

    With d'(f) = -(-1)^{|f|} f o d and |a_j'| = -q this comes out as
    d'(a_j') = -(-1)^q sum_r beta_r^j a_r'.
    """
    dom = algebra.by_degree(q)
    cod = algebra.by_degree(q - 1)
    sgn = -1 if q % 2 else 1
    entries = {}
    for c, j in enumerate(dom):
        for r, jr in enumerate(cod):
            b = algebra.differential(jr).get(j, ZERO)
            if b:
                entries[(r, c)] = -sgn * b
    return SparseMatrix(len(cod), len(dom), entries)


def duality_map(algebra):
    """Build Du and verify its chain property and cohomological strength.

    Raises ChainMapFailure if d-dual o Du differs from (-1)^N Du o d, and
    SingularDuality if Du fails to induce an isomorphism on some H^k.
    Blocks may legitimately be non invertible at the cochain level.
    """
    N = algebra.top_degree
    top = algebra.top_index
    blocks = {}
    singular = []
    for k in range(N + 1):
        dom = algebra.by_degree(k)
        cod = algebra.by_degree(N - k)
        entries = {}
        for c, i in enumerate(dom):
            for r, j in enumerate(cod):
                v = algebra.product(i, j).get(top, ZERO)
                if v:
                    entries[(r, c)] = v
        m = SparseMatrix(len(cod), len(dom), entries)
        blocks[k] = m
        if len(dom) != len(cod) or rank(m) < len(dom):
            singular.append(k)

    sgn = -1 if N % 2 else 1
    for k in range(N + 1):
        left = dual_diff_matrix(algebra, N - k).mul(blocks[k])
        right = blocks.get(k + 1, SparseMatrix(len(algebra.by_degree(N - k - 1)), 0))
        right = right.mul(algebra.d_matrix(k))
        if left != SparseMatrix(left.rows, left.cols,
                                {rc: sgn * v for rc, v in right.entries.items()}):
            raise ChainMapFailure(
                "duality map fails the chain property at degree %d" % k)

    for k in range(N + 1):
        h = algebra.betti(k)
        h_dual = cohomology_dim(dual_diff_matrix(algebra, N - k),
                                dual_diff_matrix(algebra, N - k + 1))
        reps = representative_cocycles(algebra.d_matrix(k), algebra.d_matrix(k - 1))
        images = [blocks[k].apply(v) for v in reps]
        bdry = dual_diff_matrix(algebra, N - k + 1).columns()
        got = induced_quotient_rank(images, bdry, len(algebra.by_degree(N - k)))
        if h_dual != h or got != h:
            raise SingularDuality(
                "duality map is not an isomorphism on H^%d (rank %d of %d)"
                % (k, got, h))

    return DualityMap(formal_dim=N, blocks=blocks,
                      cochain_perfect=not singular,
                      singular_degrees=tuple(singular))


@dataclass
class DualSectionComplex:
    """A-dual (x) sV with the forced differential delta.

    Basis pairs (i, j) stand for a_i' (x) sv_j in degree |sv_j| - |a_i|.
    """
    algebra: object
    sgens: tuple
    pairs: tuple
    delta: dict
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def degree_of(self, pair):
        i, j = pair
        return self.sgens[j].degree - self.algebra.degrees[i]

    def degree_range(self):
        degs = [self.degree_of(p) for p in self.pairs]
        return min(degs), max(degs)

    def by_degree(self, n):
        key = ("deg", n)
        got = self._cache.get(key)
        if got is None:
            got = tuple(p for p in self.pairs if self.degree_of(p) == n)
            self._cache[key] = got
        return got

    def d_matrix(self, n):
        key = ("delta", n)
        got = self._cache.get(key)
        if got is None:
            dom = self.by_degree(n)
            cod = self.by_degree(n + 1)
            pos = {p: r for r, p in enumerate(cod)}
            entries = {}
            for c, p in enumerate(dom):
                for p2, v in self.delta.get(p, {}).items():
                    r = pos.get(p2)
                    if r is None:
                        raise InternalCheckFailure(
                            "dual differential left its degree slice at %d" % n)
                    entries[(r, c)] = v
            got = SparseMatrix(len(cod), len(dom), entries)
            self._cache[key] = got
        return got

    def betti(self, n):
        return cohomology_dim(self.d_matrix(n), self.d_matrix(n - 1))


def _du_tensor_matrix(algebra, eqm, dual, n):
    """Matrix of Du (x) 1 from the (n, 1) slice of A (x) sV to the dual."""
    top = algebra.top_index
    dom = eqm.slice_basis(n, 1)
    cod = dual.by_degree(n - algebra.top_degree)
    pos = {p: r for r, p in enumerate(cod)}
    entries = {}
    for c, (i, m) in enumerate(dom):
        j = m.index(1)
        for l in range(algebra.size):
            v = algebra.product(i, l).get(top, ZERO)
            if v:
                r = pos.get((l, j))
                if r is None:
                    raise InternalCheckFailure(
                        "Du (x) 1 left its degree slice at %d" % n)
                entries[(r, c)] = v
    return SparseMatrix(len(cod), len(dom), entries)


def build_dual_complex(algebra, eqm, dual_map=None):
    """Assemble (A-dual (x) sV, delta) and verify it exactly.

    Checks delta o delta = 0 on every degree, then the square identity

        delta o (Du (x) 1) = (-1)^N (Du (x) 1) o Dbar

    on every degree slice of A (x) sV.  The identity holds whether or not
    Du is invertible; a failure raises SignIdentityFailure.
    """
    if dual_map is None:
        dual_map = duality_map(algebra)
    sgens = eqm.sgens
    nb = len(sgens)
    size = algebra.size
    degs = algebra.degrees

    alpha_into = {}
    for (i, l), coeffs in algebra.products.items():
        for k, v in coeffs.items():
            alpha_into.setdefault(k, []).append((i, l, v))
    beta_into = {}
    for r, coeffs in algebra.diff.items():
        for j, v in coeffs.items():
            beta_into.setdefault(j, []).append((r, v))

    delta = {}
    for jc in range(size):
        sgn = -1 if degs[jc] % 2 else 1
        for sv in range(nb):
            out = {}
            tmap = {}
            for (ai, j2), c in eqm.dbar_sv.get(sv, {}).items():
                tmap.setdefault(ai, []).append((j2, c))
            for (i, l, a) in alpha_into.get(jc, ()):
                for j2, c in tmap.get(i, ()):
                    key = (l, j2)
                    s = out.get(key, ZERO) + sgn * a * c
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
            for (r, b) in beta_into.get(jc, ()):
                key = (r, sv)
                s = out.get(key, ZERO) - sgn * b
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
            if out:
                delta[(jc, sv)] = out

    pairs = tuple((i, j) for i in range(size) for j in range(nb))
    dual = DualSectionComplex(algebra=algebra, sgens=sgens,
                              pairs=pairs, delta=delta)

    lo, hi = dual.degree_range()
    for n in range(lo - 1, hi + 1):
        d0 = dual.d_matrix(n)
        d1 = dual.d_matrix(n + 1)
        if not d1.mul(d0).is_zero():
            raise DifferentialSquareNonzero(
                "delta*delta nonzero in degree %d of the dual complex" % n)

    N = algebra.top_degree
    sgn_n = -1 if N % 2 else 1
    checked = 0
    for n in range(lo + N - 1, hi + N + 1):
        du_n = _du_tensor_matrix(algebra, eqm, dual, n)
        du_n1 = _du_tensor_matrix(algebra, eqm, dual, n + 1)
        left = dual.d_matrix(n - N).mul(du_n)
        right = du_n1.mul(eqm.d_matrix(n, 1))
        right = SparseMatrix(right.rows, right.cols,
                             {rc: sgn_n * v for rc, v in right.entries.items()})
        if left != right:
            raise SignIdentityFailure(
                "square identity fails on the degree %d slice" % n)
        checked += 1

    dual._cache["lemma_slices"] = checked
    return dual


def verify_duality_quasi_iso(algebra, eqm, dual):
    """Check Du (x) 1 induces isomorphisms H^n(A (x) sV) -> H^{n-N}(dual)."""
    N = algebra.top_degree
    lo, hi = dual.degree_range()
    for n in range(lo + N, hi + N + 1):
        h_sec = eqm.betti(n, 1)
        h_dual = dual.betti(n - N)
        if h_sec != h_dual:
            raise DualMismatch(
                "degree %d: section complex gives %d, dual complex gives %d"
                % (n, h_sec, h_dual))
        reps = representative_cocycles(eqm.d_matrix(n, 1), eqm.d_matrix(n - 1, 1))
        du = _du_tensor_matrix(algebra, eqm, dual, n)
        images = [du.apply(v) for v in reps]
        bdry = dual.d_matrix(n - N - 1).columns()
        got = induced_quotient_rank(images, bdry, len(dual.by_degree(n - N)))
        if got != h_sec:
            raise DualMismatch(
                "degree %d: induced duality map has rank %d, expected %d"
                % (n, got, h_sec))
    return hi - lo + 1


def aut_rank_table(eqm, n_aut_max, dual=None):
    """dim H^{n+N}(A (x) sV) for n = 1..n_aut_max, cross-checked if dual given."""
    algebra = eqm.algebra
    N = algebra.top_degree
    model = eqm.flm.base
    entries = {}
    for n in range(1, n_aut_max + 1):
        dim = eqm.betti(n + N, 1)
        if dual is not None:
            dd = dual.betti(n)
            if dd != dim:
                raise DualMismatch(
                    "aut rank at %d: section complex gives %d, dual gives %d"
                    % (n, dim, dd))
        entries[n] = dim
    c = model.completeness
    trusted = n_aut_max if c is None else min(n_aut_max, c - 1 - N)
    return RankTable("aut_ranks", entries, trusted)


def low_degree_section_classes(eqm):
    """dim H^n(A (x) sV) for 1 <= n <= N, kept apart from the aut ranks."""
    N = eqm.algebra.top_degree
    return {n: eqm.betti(n, 1) for n in range(1, N + 1)}


def _derivation_basis(model, m):
    """Basis of degree -m derivations: pairs (generator, image monomial)."""
    out = []
    for gi, g in enumerate(model.generators):
        for mono in model.basis(g.degree - m):
            out.append((gi, mono))
    return out


def _derivation_boundary(model, m):
    """Matrix of theta -> d o theta - (-1)^m theta o d on the level-m basis."""
    gens = model.generators
    dom = _derivation_basis(model, m)
    cod = _derivation_basis(model, m - 1)
    pos = {p: r for r, p in enumerate(cod)}
    sgn = Fraction(1) if m % 2 else Fraction(-1)
    entries = {}
    for c, (gi, mono) in enumerate(dom):
        spec = DerivationSpec(-m, {t: ({mono: ONE} if t == gi else {})
                                   for t in range(len(gens))})
        for hi in range(len(gens)):
            img = {}
            if hi == gi:
                gca.elem_add_into(
                    img, gca.apply_derivation(gens, model.differential, {mono: ONE}))
            theta_dh = gca.apply_derivation(
                gens, spec, model.differential.images.get(hi, {}))
            gca.elem_add_into(img, theta_dh, sgn)
            for mono2, v in img.items():
                r = pos.get((hi, mono2))
                if r is None:
                    raise InternalCheckFailure(
                        "derivation boundary left its level at m=%d" % m)
                entries[(r, c)] = v
    return SparseMatrix(len(cod), len(dom), entries)


def derivation_oracle(model, m_max):
    """Homology of negative-degree derivations of the base model.

    H_m = ker(level m -> level m-1) / im(level m+1 -> level m), computed
    for 1 <= m <= m_max with level 0 included as the target of level 1.
    H_{n+1} here must match the rank table at n, for n >= 1; that shift is
    what the theorem checks exploit.
    """
    mats = {m: _derivation_boundary(model, m) for m in range(1, m_max + 2)}
    entries = {}
    for m in range(1, m_max + 1):
        entries[m] = cohomology_dim(mats[m], mats[m + 1])
    c = model.completeness
    trusted = m_max if c is None else min(m_max, c - model.formal_dim)
    return RankTable("derivation_ranks", entries, trusted)


@dataclass
class TheoremReport:
    model_name: str
    formal_dim: int
    n_max: int
    pd_report: object
    algebra: object
    identity_counts: dict
    quasi_iso: dict
    rho_tensor_slices: int
    cochain_perfect: bool
    singular_degrees: tuple
    lemma_slices: int
    duality_degrees: int
    hodge: object
    loop: RankTable
    aut: RankTable
    oracle: RankTable
    low_degree: dict
    compared: list


def verify_theorems(model, n_max=None, jobs=1, _tamper=None):
    """End-to-end verification on one model, raising on the first failure.

    Pipeline: structural validation, duality of H, quotient construction
    with its structure constant identities, quasi isomorphism checks for
    rho and rho (x) 1, the square identity for the duality map, and the
    triple rank agreement (section complex, word-length one loop
    cohomology, derivation homology, the last shifted by one).

    _tamper is a fault injection hook: it receives the freshly built
    quotient algebra before any identity is checked, so tests can confirm
    that a perturbed structure constant is caught and not silently used.
    """
    N = model.formal_dim
    if n_max is None:
        n_max = N + 8
    n_max = max(n_max, N + 2)

    vrep = validate(model)
    if not vrep.passed:
        bad = "; ".join(d for _, ok, d in vrep.checks if not ok)
        raise ValidationFailure("model is not a valid input: %s" % bad)

    pd = check_poincare_duality(model, n_max)
    algebra, qmap = build_quotient(model, pd)
    if _tamper is not None:
        _tamper(algebra)
    counts = structure_identities(algebra)
    qiso = verify_quasi_iso(model, algebra, qmap, n_max)

    flm = build_free_loop_model(model)
    eqm = extend_to_quotient_loop(model, algebra, qmap, flm, check_to=n_max)
    slices = verify_rho_tensor_quasi_iso(eqm, n_max)

    dmap = duality_map(algebra)
    dual = build_dual_complex(algebra, eqm, dmap)
    dual_degrees = verify_duality_quasi_iso(algebra, eqm, dual)

    hodge = hodge_betti_table(flm, n_max, jobs=jobs)
    loop = loop_betti(flm, n_max, hodge=hodge)

    n_aut = n_max - N
    aut = aut_rank_table(eqm, n_aut, dual=dual)
    oracle = derivation_oracle(model, n_aut + 1)

    compared = []
    for n in range(1, n_aut + 1):
        if n > aut.trusted_up_to:
            break
        a = aut.get(n)
        h1 = hodge.get(n + N, 1)
        o = oracle.get(n + 1)
        if not (a == h1 == o):
            raise TheoremMismatch(
                "rank disagreement at n=%d: section %d, loop word-length-one %d, "
                "derivation %d" % (n, a, h1, o))
        compared.append((n, a, h1, o))

    return TheoremReport(
        model_name=model.name, formal_dim=N, n_max=n_max,
        pd_report=pd, algebra=algebra, identity_counts=counts,
        quasi_iso=qiso, rho_tensor_slices=slices,
        cochain_perfect=dmap.cochain_perfect,
        singular_degrees=dmap.singular_degrees,
        lemma_slices=dual._cache.get("lemma_slices", 0),
        duality_degrees=dual_degrees,
        hodge=hodge, loop=loop, aut=aut, oracle=oracle,
        low_degree=low_degree_section_classes(eqm),
        compared=compared)
