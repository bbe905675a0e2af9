"""Free loop space model and the word-length (Hodge) decomposition.

From a base model (LV, d) build (LV (x) L sV, D) where sV has a degree
shifted generator sv for each v, |sv| = |v| - 1, and

    D(v)  = d(v),
    D(sv) = -s(d(v)),

with s the degree -1 derivation sending v to sv and sv to 0.  D preserves
the number of suspended factors in a monomial, so each cohomology group
splits by that word length; the pieces are computed slice by slice and
cross-checked against the full slice.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DifferentialSquareNonzero, HodgeSumMismatch
from .exactq import SparseMatrix, cohomology_dim
from . import gca
from .gca import Generator, DerivationSpec
from .sullivan import RankTable


@dataclass
class FreeLoopModel:
    base: object                    # SullivanModel
    generators: tuple               # base generators then suspended ones
    loop_differential: DerivationSpec
    suspension: DerivationSpec
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_cache"] = {}
        return state

    @property
    def n_base(self):
        return len(self.base.generators)

    def slice_basis(self, n, word_length=None):
        return gca.slice_basis(self.generators, n, word_length)

    def d_matrix(self, n, word_length=None):
        key = ("D", n, word_length)
        m = self._cache.get(key)
        if m is None:
            if n < 0:
                m = SparseMatrix(len(self.slice_basis(n + 1, word_length)), 0)
            else:
                m = gca.matrix_of_degree_slice(
                    self.generators, self.loop_differential, n, word_length)
            self._cache[key] = m
        return m


def _lift_monomial(mono, nb):
    return tuple(mono) + (0,) * nb


def build_free_loop_model(model):
    """Construct the free loop model and verify D * D = 0 exactly."""
    base_gens = model.generators
    nb = len(base_gens)
    gens = tuple(base_gens) + tuple(
        Generator("s" + g.name, g.degree - 1, "suspended", i)
        for i, g in enumerate(base_gens))

    lifted = {}
    for i in range(nb):
        img = model.differential.images.get(i, {})
        lifted[i] = {_lift_monomial(m, nb): c for m, c in img.items()}

    susp_images = {}
    for i in range(nb):
        sv = tuple(1 if j == nb + i else 0 for j in range(2 * nb))
        susp_images[i] = {sv: Fraction(1)}
        susp_images[nb + i] = {}
    suspension = DerivationSpec(-1, susp_images)

    d_images = {}
    for i in range(nb):
        d_images[i] = dict(lifted[i])
        s_dv = gca.apply_derivation(gens, suspension, lifted[i])
        d_images[nb + i] = gca.elem_scale(s_dv, Fraction(-1))
    loop_d = DerivationSpec(1, d_images)

    for i in range(2 * nb):
        dd = gca.apply_derivation(gens, loop_d, d_images[i])
        if dd:
            raise DifferentialSquareNonzero(
                "D*D nonzero on %s: %s" % (gens[i].name, gca.render_element(gens, dd)))

    return FreeLoopModel(base=model, generators=gens,
                         loop_differential=loop_d, suspension=suspension)


@dataclass
class HodgeTable:
    """dim H^n restricted to word length k, for every populated slice."""
    entries: dict      # (n, k) -> int
    n_max: int
    trusted_up_to: int

    def get(self, n, k):
        return self.entries.get((n, k), 0)

    def row(self, n):
        return {k: v for (m, k), v in self.entries.items() if m == n}

    def row_sum(self, n):
        return sum(self.row(n).values())

    def column(self, k):
        """Word-length k dimensions by degree, as a RankTable."""
        entries = {n: v for (n, kk), v in self.entries.items() if kk == k}
        return RankTable("hodge_k%d" % k, entries, self.trusted_up_to)


def _hodge_cell(flm, n, k):
    return n, k, cohomology_dim(flm.d_matrix(n, k), flm.d_matrix(n - 1, k))


def hodge_betti_table(flm, n_max, jobs=1):
    cells = [(n, k) for n in range(n_max + 1) for k in range(n + 1)
             if flm.slice_basis(n, k)]
    entries = {}
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_hodge_cell, flm, n, k) for n, k in cells]
            for f in futs:
                n, k, dim = f.result()
                entries[(n, k)] = dim
    else:
        for n, k in cells:
            _, _, dim = _hodge_cell(flm, n, k)
            entries[(n, k)] = dim
    return HodgeTable(entries=entries, n_max=n_max,
                      trusted_up_to=flm.base.trusted_loop(n_max))


def loop_betti(flm, n_max, hodge=None):
    """dim H^n of the whole loop model; checks the word-length split adds up."""
    entries = {}
    for n in range(n_max + 1):
        entries[n] = cohomology_dim(flm.d_matrix(n), flm.d_matrix(n - 1))
    if hodge is not None:
        top = min(n_max, hodge.n_max)
        for n in range(top + 1):
            if hodge.row_sum(n) != entries[n]:
                raise HodgeSumMismatch(
                    "degree %d: word-length pieces sum to %d, full slice gives %d"
                    % (n, hodge.row_sum(n), entries[n]))
    return RankTable("loop_betti", entries, flm.base.trusted_loop(n_max))


def integer_nth_root(x, n):
    """floor(x ** (1/n)) by pure integer bisection."""
    if x < 0 or n < 1:
        raise ValueError("integer_nth_root needs x >= 0, n >= 1")
    if x in (0, 1) or n == 1:
        return x
    hi = 1
    while hi ** n <= x:
        hi <<= 1
    lo = hi >> 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid ** n <= x:
            lo = mid
        else:
            hi = mid
    return lo


def _root_decimal(s, n, places=6):
    """s ** (1/n) truncated to `places` decimals, as a string."""
    scaled = integer_nth_root(s * 10 ** (places * n), n)
    return "%d.%0*d" % (scaled // 10 ** places, places, scaled % 10 ** places)


@dataclass
class GrowthReport:
    partial_sums: list   # s_n for n = 0..T
    ratios: list         # Fraction s_{n+1}/s_n for each n with s_n > 0
    roots: list          # (n, "d.dddddd") for s_n^(1/n), n >= 1, s_n > 0
    verdict: str


_RATIO_BAR = Fraction(9, 8)


def growth_report(betti_table, n_max=None):
    """Partial-sum growth of loop space cohomology, judged conservatively.

    The verdict looks only at the last three ratios of consecutive partial
    sums: all at most 9/8 reads as sub-exponential, all at least 9/8 as
    exponential within the window, anything else (or a window shorter than
    degree 6) is inconclusive.
    """
    T = n_max if n_max is not None else max(betti_table.entries, default=0)
    sums = []
    acc = 0
    for n in range(T + 1):
        acc += betti_table.get(n)
        sums.append(acc)
    ratios = [Fraction(sums[n + 1], sums[n]) for n in range(T) if sums[n] > 0]
    roots = [(n, _root_decimal(sums[n], n)) for n in range(1, T + 1) if sums[n] > 0]

    if sums and sums[-1] == 0:
        verdict = "degenerate"
    elif T < 6 or len(ratios) < 3:
        verdict = "inconclusive"
    else:
        tail = ratios[-3:]
        if all(r <= _RATIO_BAR for r in tail):
            verdict = "sub-exponential"
        elif all(r >= _RATIO_BAR for r in tail):
            verdict = "exponential-in-window"
        else:
            verdict = "inconclusive"
    return GrowthReport(partial_sums=sums, ratios=ratios, roots=roots,
                        verdict=verdict)
