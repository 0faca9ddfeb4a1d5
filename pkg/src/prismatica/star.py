"""Star complexes, the star simplicial set and the comparison map ``pbar``.

``St(S)`` is the simplicial subset of the diagonal of ``S x S`` generated by
the pairs ``(s_nu d_nu x, s_mu d_mu x)``.  Concretely a pair ``(a, b)`` lies
in it exactly when ``a = alpha^* x`` and ``b = beta^* x`` for one simplex
``x`` and monotone maps ``alpha, beta``; for ``K^s`` this says the vertices
of ``a`` and ``b`` together span a simplex of ``K``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    DimensionOutOfRange,
    IndexOutOfRange,
    InternalInvariantBroken,
    NotFromComplex,
    ShapeMismatch,
)
from .prismatic import MultiDegree, PrismCell, block_positions, prism_cells
from .simplicial import NormalForm, SimplicialSet, from_complex, mu_apply

# -- St(K) as a simplicial complex ---------------------------------------------------

def _chains(points):
    """All nonempty chains of ``points`` (sorted) in the product order."""
    points = sorted(points)
    out = []

    def grow(chain, start):
        out.append(tuple(chain))
        last = chain[-1]
        for k in range(start, len(points)):
            a, b = points[k]
            if a >= last[0] and b >= last[1]:
                chain.append(points[k])
                grow(chain, k + 1)
                chain.pop()

    for k, pt in enumerate(points):
        grow([pt], k + 1)
    return out


def star_complex(vertices, simplices) -> dict:
    """``St(K)`` as a complex document.

    Vertices are pairs ``(a, b)`` of vertices of ``K`` spanning a simplex,
    ordered lexicographically; simplices are chains in the product order
    whose coordinates together span a simplex of ``K``.
    """
    K = from_complex(vertices, simplices)
    maximal = _maximal_simplices(K)
    pairs = sorted({(a, b) for s in maximal for a in s for b in s})
    index = {v: k for k, v in enumerate(pairs)}
    chains = set()
    for s in maximal:
        for c in _chains([(a, b) for a in s for b in s]):
            if len(c) > 1:
                chains.add(tuple(index[v] for v in c))
    labels = [f"({vertices[a]},{vertices[b]})" for a, b in pairs]
    doc = {"vertices": labels, "simplices": sorted(map(list, chains), key=lambda c: (len(c), c)),
           "pairs": [list(v) for v in pairs]}
    from_complex(doc["vertices"], doc["simplices"])  # closure check
    return doc


def _maximal_simplices(K: SimplicialSet):
    tuples = [K.simplex_tuples[g] for g in K.all_generators()]
    sets = [set(t) for t in tuples]
    return [t for t, s in zip(tuples, sets) if not any(s < o for o in sets)]


# -- St(S) membership ------------------------------------------------------------------

def _monotone_maps(n: int, m: int):
    """Monotone maps ``[n] -> [m]`` as value tuples."""
    return itertools.combinations_with_replacement(range(m + 1), n + 1)


def star_membership(S: SimplicialSet, a: NormalForm, b: NormalForm, max_results: int | None = 1):
    """Literal witnesses ``(x, nu, mu)`` with ``(s_nu d_nu x, s_mu d_mu x) = (a, b)``.

    ``x`` ranges over ``S_n``, ``nu`` over subsets of ``{0..n-1}`` and ``mu``
    over subsets of ``{0..n}`` disjoint from ``nu``; composites that are not
    defined (a degeneracy index too large for its dimension) are skipped.
    Returns a list of witnesses, empty when none exists.
    """
    if a.dim != b.dim:
        raise ShapeMismatch("components of a pair must have the same dimension")
    n = a.dim
    found = []
    for x in S.simplices(n):
        for r in range(n + 1):
            for nu in itertools.combinations(range(n), r):
                first = _apply_sd(S, x, nu)
                if first != a:
                    continue
                rest = [k for k in range(n + 1) if k not in nu]
                for t in range(len(rest) + 1):
                    for mu in itertools.combinations(rest, t):
                        if _apply_sd(S, x, mu) == b:
                            found.append((x, nu, mu))
                            if max_results and len(found) >= max_results:
                                return found
    return found


def _apply_sd(S, x, idx):
    """``s_{i_k} ... s_{i_1} d_{i_1} ... d_{i_k} x``, or None if undefined."""
    word = [("s", i) for i in reversed(idx)] + [("d", i) for i in idx]
    try:
        return S.apply(word, x)
    except (IndexOutOfRange, DimensionOutOfRange):
        return None


def star_witness(S: SimplicialSet, a: NormalForm, b: NormalForm):
    """A simplex ``x`` and monotone ``alpha, beta`` with ``(alpha^* x, beta^* x) = (a, b)``.

    Returns ``None`` if the pair is not in ``St(S)``.  It suffices to search
    generators ``x`` and jointly surjective ``(alpha, beta)``.
    """
    if a.dim != b.dim:
        raise ShapeMismatch("components of a pair must have the same dimension")
    n = a.dim
    for m in range(min(2 * n + 1, S.top_dim) + 1):
        for g in S.generators(m):
            x = NormalForm((), g)
            alphas = [al for al in _monotone_maps(n, m) if S.pullback(x, al) == a]
            if not alphas:
                continue
            for be in _monotone_maps(n, m):
                if S.pullback(x, be) != b:
                    continue
                for al in alphas:
                    if set(al) | set(be) == set(range(m + 1)):
                        return x, al, be
    return None


def in_star(S: SimplicialSet, a: NormalForm, b: NormalForm) -> bool:
    if S.is_complex:
        verts = set(S.to_tuple(a)) | set(S.to_tuple(b))
        return tuple(sorted(verts)) in S._tuple_index
    return star_witness(S, a, b) is not None


def star_pairs(S: SimplicialSet, n: int) -> list:
    """All of ``St(S)_n``."""
    xs = S.simplices(n)
    return [(a, b) for a in xs for b in xs if in_star(S, a, b)]


def star_closure(S: SimplicialSet, n: int, max_m: int | None = None) -> set:
    """Brute-force ``St(S)_n``: all ``theta^*`` of the defining pairs.

    Independent of :func:`in_star`; used as an oracle on small inputs.
    """
    if max_m is None:
        max_m = min(2 * n + 1, S.D)
    out = set()
    for m in range(max_m + 1):
        for x in S.simplices(m):
            for r in range(m + 1):
                for nu in itertools.combinations(range(m), r):
                    rest = [k for k in range(m + 1) if k not in nu]
                    for t in range(len(rest) + 1):
                        for mu in itertools.combinations(rest, t):
                            first, second = _apply_sd(S, x, nu), _apply_sd(S, x, mu)
                            if first is None or second is None:
                                continue
                            for theta in _monotone_maps(n, m):
                                out.add((S.pullback(first, theta), S.pullback(second, theta)))
    return out


# -- the prismatic star and pbar --------------------------------------------------------

@dataclass(frozen=True, order=True)
class StarCell:
    p: int
    q: tuple
    sigma: NormalForm
    tau: NormalForm
    sigma_bar: NormalForm

    @property
    def deg(self) -> MultiDegree:
        return MultiDegree(self.p, self.q)

    def to_json(self) -> dict:
        return {"p": self.p, "q": list(self.q), "sigma": self.sigma.to_json(),
                "tau": self.tau.to_json(), "sigma_bar": self.sigma_bar.to_json()}


def star_cells(S: SimplicialSet, deg) -> list:
    """``P_p St(S)_{q_0..q_p}``: triples ``(mu(sigma_bar), tau, sigma_bar)`` in ``St(S)``."""
    if not isinstance(deg, MultiDegree):
        deg = MultiDegree(*deg)
    n = deg.total
    out = []
    for sb in S.simplices(deg.p):
        sigma = mu_apply(S, deg.q, sb)
        for tau in S.simplices(n):
            if in_star(S, sigma, tau):
                out.append(StarCell(deg.p, deg.q, sigma, tau, sb))
    return out


def _stars(q):
    return [block_positions("Pbar", q, i)[-1] for i in range(len(q))]


def pbar(gamma: PrismCell) -> StarCell:
    """``(sigma, tau, sigma_bar)`` from a Pbar cell.

    ``sigma_bar`` keeps the star vertex of every block, ``tau`` deletes them
    and ``sigma = mu_q(sigma_bar)``.
    """
    if gamma.construction != "Pbar":
        raise ShapeMismatch("pbar takes a Pbar cell")
    S, q = gamma.space, gamma.q
    stars = _stars(q)
    sigma_bar = S.keep(gamma.payload, stars)
    tau = S.delete(gamma.payload, stars)
    sigma = mu_apply(S, q, sigma_bar)
    # explicit witness: alpha sends block i to its star, beta skips stars
    alpha, beta = [], []
    for i, s in enumerate(stars):
        alpha.extend([s] * (q[i] + 1))
    beta = [k for k in range(gamma.payload.dim + 1) if k not in stars]
    if S.pullback(gamma.payload, alpha) != sigma or S.pullback(gamma.payload, beta) != tau:
        raise InternalInvariantBroken("pbar image is not in St(S)")
    return StarCell(gamma.p, q, sigma, tau, sigma_bar)


def pbar_inverse(cell: StarCell, S: SimplicialSet) -> PrismCell:
    """The Pbar cell interleaving ``tau``'s blocks with ``sigma_bar``'s vertices.

    Only for ``S = K^s``.  Vertices of ``tau``'s block ``k`` are clamped into
    ``[sigma_bar_{k-1}, sigma_bar_k]`` so the result is always a simplex of
    ``K^s``; when a clamp moves a vertex, ``pbar`` of the result differs from
    ``cell``.
    """
    if not S.is_complex:
        raise NotFromComplex("pbar_inverse needs a simplicial set built from a complex")
    sb = S.to_tuple(cell.sigma_bar)
    tau = S.to_tuple(cell.tau)
    gamma, k = [], 0
    for i, qi in enumerate(cell.q):
        lo = sb[i - 1] if i > 0 else None
        hi = sb[i]
        for v in tau[k:k + qi + 1]:
            if lo is not None and v < lo:
                v = lo
            v = min(v, hi)
            gamma.append(v)
        gamma.append(hi)
        k += qi + 1
    return PrismCell("Pbar", cell.p, cell.q, S.from_tuple(gamma), S)


def surjectivity_report(S: SimplicialSet, deg) -> dict:
    """Compare the pbar image with all of ``P St(S)`` in one multidegree."""
    if not isinstance(deg, MultiDegree):
        deg = MultiDegree(*deg)
    need = sum(deg.q) + 2 * deg.p + 1
    if S.D < need:
        S = S.truncated(need)
    image = {}
    for g in prism_cells(S, "Pbar", deg):
        image.setdefault(pbar(g), []).append(g)
    target = star_cells(S, deg)
    missing = [c for c in target if c not in image]
    collisions = sum(1 for v in image.values() if len(v) > 1)
    return {"deg": str(deg), "pbar_cells": sum(map(len, image.values())),
            "star_cells": len(target), "image": len(image),
            "missing": missing, "collisions": collisions}


def multidegrees(max_p: int, max_q: int):
    for p in range(max_p + 1):
        for q in itertools.product(range(max_q + 1), repeat=p + 1):
            yield MultiDegree(p, q)


# -- Lemma: St(K)^s and St(K^s) ------------------------------------------------------------

def st_iso(vertices, simplices, D: int) -> dict:
    """Match ``St(K)^s`` with ``St(K^s)`` dimension by dimension up to ``D``.

    A simplex of ``St(K)^s`` is a chain of pair-vertices with repetitions;
    ``st`` sends it to (first coordinates, second coordinates).  Returns
    per-dimension counts and any failures (as data).
    """
    doc = star_complex(vertices, simplices)
    L = from_complex(doc["vertices"], doc["simplices"], D)
    K = from_complex(vertices, simplices, D)
    pairs = [tuple(v) for v in doc["pairs"]]
    report = []
    for n in range(D + 1):
        images = {}
        failures = []
        for x in L.simplices(n):
            chain = [pairs[v] for v in L.to_tuple(x)]
            img = (K.from_tuple([a for a, _ in chain]), K.from_tuple([b for _, b in chain]))
            if img in images:
                failures.append({"kind": "not injective", "cell": x.to_json()})
            images[img] = x
        right = star_pairs(K, n)
        right_set = set(right)
        failures += [{"kind": "image outside St(K^s)"} for img in images if img not in right_set]
        failures += [{"kind": "not surjective"} for pr in right if pr not in images]
        report.append({"dim": n, "left": L.simplices(n).__len__(), "right": len(right),
                       "failures": failures})
    return {"dims": report, "ok": all(not r["failures"] and r["left"] == r["right"] for r in report)}
