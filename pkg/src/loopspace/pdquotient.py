"""Finite Poincare duality quotient of a Sullivan model.

Writing Z^k for the cocycles in degree k, pick a complement S^k of Z^k
spanned by monomials (the pivot columns of the reduced differential), and
set, for formal dimension N,

    I = S^{N-1} (+) d S^{N-1} (+) S^N (+) everything above degree N.

I is a differential ideal: d S^{N-1} lands in I by fiat, d S^N in degree
N+1, and any product with I lands above degree N because all generators
have degree at least 2.  The quotient A keeps degrees <= N-2 untouched,
degree N-1 becomes isomorphic to Z^{N-1} with the surviving monomials as
basis, and degree N collapses to one line spanned by the fundamental
class.  The quotient map is a quasi isomorphism whenever H vanishes above
N, which the duality check guarantees.

A is stored by structure constants: a_i a_j = sum_k alpha_ij^k a_k and
d a_i = sum_j beta_i^j a_j, both exact rationals.
"""

from dataclasses import dataclass, field

from .errors import (IncompleteModel, IdentityViolation, QuasiIsoFailure,
                     ChainMapFailure, TopClassCollapse, InternalCheckFailure)
from .exactq import (SparseMatrix, ZERO, ONE, rref, rank, cohomology_dim,
                     solve_in_span, induced_quotient_rank)
from . import gca


@dataclass
class FiniteCdga:
    """A finite-dimensional cdga by structure constants.

    Basis indices are global, sorted by (degree, slice position); the unit
    is a_0 and the fundamental class is the last index.  products maps
    (i, j) to {k: alpha_ij^k}, diff maps i to {j: beta_i^j}; absent keys
    mean zero.
    """
    name: str
    degrees: tuple
    labels: tuple
    products: dict
    diff: dict
    unit_index: int
    top_index: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_cache"] = {}
        return state

    @property
    def size(self):
        return len(self.degrees)

    @property
    def top_degree(self):
        return self.degrees[self.top_index]

    def by_degree(self, k):
        key = ("deg", k)
        got = self._cache.get(key)
        if got is None:
            got = tuple(i for i, d in enumerate(self.degrees) if d == k)
            self._cache[key] = got
        return got

    def product(self, i, j):
        return self.products.get((i, j), {})

    def differential(self, i):
        return self.diff.get(i, {})

    def d_matrix(self, k):
        """Differential from the degree-k slice to degree k+1, local coords."""
        key = ("d", k)
        m = self._cache.get(key)
        if m is None:
            dom = self.by_degree(k)
            cod = self.by_degree(k + 1)
            pos = {g: r for r, g in enumerate(cod)}
            entries = {}
            for c, i in enumerate(dom):
                for j, v in self.differential(i).items():
                    entries[(pos[j], c)] = v
            m = SparseMatrix(len(cod), len(dom), entries)
            self._cache[key] = m
        return m

    def betti(self, k):
        return cohomology_dim(self.d_matrix(k), self.d_matrix(k - 1))


@dataclass
class QuotientMap:
    """The projection LV -> A, degree by degree.

    rho[k] is the matrix from the degree-k monomial basis to the degree-k
    slice of A (local coordinates); degrees above the formal dimension map
    to zero.  reps[i] is a lift of basis class i back into LV.
    """
    formal_dim: int
    rho: dict
    reps: list
    s_pivots: dict     # degree -> tuple of pivot monomial positions
    omega: dict        # fundamental class element in LV

    def matrix(self, k, n_cols):
        m = self.rho.get(k)
        if m is None:
            return SparseMatrix(0, n_cols)
        return m

    def apply(self, model, algebra, elem, degree):
        """Project an element dict of LV to {global class index: coeff}."""
        if not elem or degree > self.formal_dim:
            return {}
        basis = model.basis(degree)
        pos = {m: c for c, m in enumerate(basis)}
        vec = {pos[m]: c for m, c in elem.items()}
        mat = self.rho.get(degree)
        if mat is None:
            return {}
        local = mat.apply(vec)
        slice_idx = algebra.by_degree(degree)
        return {slice_idx[r]: c for r, c in local.items() if c}


def _apply_quotient(qmap, model, algebra, elem, degree):
    return qmap.apply(model, algebra, elem, degree)


def build_quotient(model, pd_report):
    """Build the finite quotient cdga and its projection.

    Needs the generator list to be reliable through degree N+1, otherwise
    unseen generators could change the cocycle complements.
    """
    N = model.formal_dim
    if model.completeness is not None and model.completeness < N + 1:
        raise IncompleteModel(
            "quotient needs generators through degree %d, model is only "
            "complete to %d" % (N + 1, model.completeness))

    gens = model.generators

    # monomial complements of the cocycles in degrees N-1 and N
    s_pivots = {}
    for k in (N - 1, N):
        _, pivots, _ = rref(model.d_matrix(k))
        s_pivots[k] = pivots

    basis_N = model.basis(N)
    pos_N = {m: c for c, m in enumerate(basis_N)}
    omega_elem = pd_report.fundamental_class
    omega_vec = {pos_N[m]: c for m, c in omega_elem.items()}

    # lambda functional: coefficient of omega modulo S^N + d S^{N-1}
    kill = [{c: ONE} for c in s_pivots[N]] + model.d_matrix(N - 1).columns()
    span_cols = [omega_vec] + kill
    lam = {}
    for c in range(len(basis_N)):
        coeffs = solve_in_span(span_cols, {c: ONE}, len(basis_N))
        if coeffs is None:
            raise InternalCheckFailure(
                "degree-%d monomial escaped omega + S + boundaries" % N)
        if coeffs[0]:
            lam[c] = coeffs[0]
    check = sum(lam.get(c, ZERO) * v for c, v in omega_vec.items())
    if check != 1:
        raise TopClassCollapse(
            "functional evaluates to %s on the fundamental class" % check)

    # global basis of A with lifts back to LV
    degrees = []
    labels = []
    reps = []
    rho = {}
    for k in range(N + 1):
        basis_k = model.basis(k)
        if k <= N - 2:
            picked = list(range(len(basis_k)))
            rho[k] = SparseMatrix(len(basis_k), len(basis_k),
                                  {(i, i): ONE for i in range(len(basis_k))})
        elif k == N - 1:
            pivotset = set(s_pivots[k])
            picked = [c for c in range(len(basis_k)) if c not in pivotset]
            rho[k] = SparseMatrix(len(picked), len(basis_k),
                                  {(r, c): ONE for r, c in enumerate(picked)})
        else:
            picked = None
            rho[k] = SparseMatrix(1, len(basis_k),
                                  {(0, c): v for c, v in lam.items()})
            degrees.append(k)
            labels.append(gca.render_element(gens, omega_elem))
            reps.append(dict(omega_elem))
        if picked is not None:
            for c in picked:
                degrees.append(k)
                labels.append(gca.render_monomial(gens, basis_k[c]))
                reps.append({basis_k[c]: ONE})

    algebra = FiniteCdga(name=model.name, degrees=tuple(degrees),
                         labels=tuple(labels), products={}, diff={},
                         unit_index=0, top_index=len(degrees) - 1)
    qmap = QuotientMap(formal_dim=N, rho=rho, reps=reps,
                       s_pivots=s_pivots, omega=dict(omega_elem))

    for i, rep_i in enumerate(reps):
        di = gca.apply_derivation(gens, model.differential, rep_i)
        beta = _apply_quotient(qmap, model, algebra, di, degrees[i] + 1)
        if beta:
            algebra.diff[i] = beta
        for j, rep_j in enumerate(reps):
            dsum = degrees[i] + degrees[j]
            if dsum > N:
                continue
            prod = gca.elem_mul(gens, rep_i, rep_j)
            alpha = _apply_quotient(qmap, model, algebra, prod, dsum)
            if alpha:
                algebra.products[(i, j)] = alpha

    return algebra, qmap


def structure_identities(algebra):
    """Exhaustively check the cdga axioms on the structure constants.

    Unit, graded commutativity, d * d = 0, associativity and the Leibniz
    rule, all as exact identities over every index combination.  Returns
    the number of checks per family; raises IdentityViolation otherwise.
    """
    n = algebra.size
    deg = algebra.degrees
    u = algebra.unit_index
    counts = {"unit": 0, "commutativity": 0, "d_squared": 0,
              "associativity": 0, "leibniz": 0}

    for j in range(n):
        if algebra.product(u, j) != {j: ONE}:
            raise IdentityViolation("unit axiom fails at a_%d" % j)
        counts["unit"] += 1

    for i in range(n):
        for j in range(n):
            sign = -1 if (deg[i] % 2 and deg[j] % 2) else 1
            left = algebra.product(i, j)
            right = {k: sign * v for k, v in algebra.product(j, i).items()}
            if left != right:
                raise IdentityViolation(
                    "graded commutativity fails at (a_%d, a_%d)" % (i, j))
            counts["commutativity"] += 1

    for i in range(n):
        acc = {}
        for j, v in algebra.differential(i).items():
            for k, w in algebra.differential(j).items():
                s = acc.get(k, ZERO) + v * w
                if s:
                    acc[k] = s
                else:
                    acc.pop(k, None)
        if acc:
            raise IdentityViolation("d*d nonzero on a_%d" % i)
        counts["d_squared"] += 1

    for i in range(n):
        for j in range(n):
            for k in range(n):
                if deg[i] + deg[j] + deg[k] > algebra.top_degree:
                    continue
                left = {}
                for r, v in algebra.product(i, j).items():
                    for t, w in algebra.product(r, k).items():
                        s = left.get(t, ZERO) + v * w
                        if s:
                            left[t] = s
                        else:
                            left.pop(t, None)
                right = {}
                for s_, v in algebra.product(j, k).items():
                    for t, w in algebra.product(i, s_).items():
                        val = right.get(t, ZERO) + v * w
                        if val:
                            right[t] = val
                        else:
                            right.pop(t, None)
                if left != right:
                    raise IdentityViolation(
                        "associativity fails at (a_%d, a_%d, a_%d)" % (i, j, k))
                counts["associativity"] += 1

    for i in range(n):
        for j in range(n):
            left = {}
            for r, v in algebra.product(i, j).items():
                for s_, w in algebra.differential(r).items():
                    val = left.get(s_, ZERO) + v * w
                    if val:
                        left[s_] = val
                    else:
                        left.pop(s_, None)
            right = {}
            for t, v in algebra.differential(i).items():
                for s_, w in algebra.product(t, j).items():
                    val = right.get(s_, ZERO) + v * w
                    if val:
                        right[s_] = val
                    else:
                        right.pop(s_, None)
            sign = -1 if deg[i] % 2 else 1
            for l, v in algebra.differential(j).items():
                for s_, w in algebra.product(i, l).items():
                    val = right.get(s_, ZERO) + sign * v * w
                    if val:
                        right[s_] = val
                    else:
                        right.pop(s_, None)
            if left != right:
                raise IdentityViolation(
                    "Leibniz rule fails at (a_%d, a_%d)" % (i, j))
            counts["leibniz"] += 1

    return counts


def verify_quasi_iso(model, algebra, qmap, n_max):
    """Check the projection is a chain and algebra map inducing isos on H.

    Compares dimensions, the rank of the induced map on cohomology, the
    chain map identity rho d = d_A rho on every degree slice, and the
    multiplicativity of rho on all monomial pairs up to the formal
    dimension.  Returns per-degree dimensions; raises on any failure.
    """
    from .sullivan import cocycle_representatives

    N = model.formal_dim
    gens = model.generators
    dims = {}
    for n in range(n_max + 1):
        h_model = cohomology_dim(model.d_matrix(n), model.d_matrix(n - 1))
        h_alg = algebra.betti(n)
        if h_model != h_alg:
            raise QuasiIsoFailure(
                n, "H^%d: model gives %d, quotient gives %d" % (n, h_model, h_alg))
        dims[n] = h_model

        if n <= N:
            reps = cocycle_representatives(model, n)
            slice_idx = algebra.by_degree(n)
            local = {g: r for r, g in enumerate(slice_idx)}
            images = []
            for vec in reps:
                elem = {model.basis(n)[c]: v for c, v in vec.items()}
                im = _apply_quotient(qmap, model, algebra, elem, n)
                images.append({local[g]: v for g, v in im.items()})
            bdry = algebra.d_matrix(n - 1).columns()
            got = induced_quotient_rank(images, bdry, len(slice_idx))
            if got != h_model:
                raise QuasiIsoFailure(
                    n, "induced map on H^%d has rank %d, expected %d"
                    % (n, got, h_model))

        # chain map on the whole slice, not just cocycles
        basis_n = model.basis(n)
        rho_n = qmap.matrix(n, len(basis_n))
        rho_n1 = qmap.matrix(n + 1, len(model.basis(n + 1)))
        left = rho_n1.mul(model.d_matrix(n))
        right = algebra.d_matrix(n).mul(rho_n)
        if left != right:
            raise ChainMapFailure(
                "projection fails to commute with d on degree %d" % n)

    pairs = 0
    for p in range(2, N - 1):
        for q in range(p, N - p + 1):
            for m1 in model.basis(p):
                e1 = {m1: ONE}
                r1 = _apply_quotient(qmap, model, algebra, e1, p)
                for m2 in model.basis(q):
                    e2 = {m2: ONE}
                    r2 = _apply_quotient(qmap, model, algebra, e2, q)
                    prod = gca.elem_mul(gens, e1, e2)
                    via_model = _apply_quotient(qmap, model, algebra, prod, p + q)
                    via_alg = {}
                    for i, v in r1.items():
                        for j, w in r2.items():
                            for k, a in algebra.product(i, j).items():
                                s = via_alg.get(k, ZERO) + v * w * a
                                if s:
                                    via_alg[k] = s
                                else:
                                    via_alg.pop(k, None)
                    if via_model != via_alg:
                        raise QuasiIsoFailure(
                            p + q, "projection is not multiplicative on %s * %s"
                            % (gca.render_monomial(gens, m1),
                               gca.render_monomial(gens, m2)))
                    pairs += 1
    return {"dims": dims, "multiplicative_pairs": pairs}
