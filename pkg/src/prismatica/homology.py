"""Integer chain complexes, Smith normal form and homology."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from math import gcd

from .errors import NotAComplex


class IntMatrix:
    """Sparse integer matrix; zero entries are never stored."""

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            if v:
                self.entries[(r, c)] = int(v)

    @classmethod
    def from_dense(cls, rows):
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        return cls(nr, nc, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    def to_dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row = defaultdict(list)
        for (r, c), v in other.entries.items():
            by_row[r].append((c, v))
        acc = defaultdict(int)
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                acc[(r, c)] += v * w
        return IntMatrix(self.rows, other.cols, acc)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.shape == other.shape
                and self.entries == other.entries)

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


# -- Smith normal form ---------------------------------------------------------

def _dense_snf_diagonal(A):
    """Invariant factors of a small dense integer matrix (list of lists)."""
    A = [row[:] for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        nonzero = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nonzero:
            break
        _, pi, pj = min(nonzero)
        A[t], A[pi] = A[pi], A[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]
        while True:
            piv = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // piv
                    if q:
                        A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // piv
                    if q:
                        for row in A:
                            row[j] -= q * row[t]
                    if A[t][j]:
                        done = False
            if not done:
                # move the smallest remaining entry of row/column t to the pivot
                cands = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
                cands += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
                _, pi, pj = min(cands)
                A[t], A[pi] = A[pi], A[t]
                for row in A:
                    row[t], row[pj] = row[pj], row[t]
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % piv), None)
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def smith_normal_form(M: IntMatrix):
    """Invariant factors ``d_1 | d_2 | ... | d_r`` and the rank ``r``.

    Unit pivots are eliminated sparsely first; whatever is left has no unit
    entries and is reduced densely.
    """
    rows = defaultdict(dict)
    cols = defaultdict(set)
    for (r, c), v in M.entries.items():
        rows[r][c] = v
        cols[c].add(r)
    ones = 0
    progress = True
    while progress:
        progress = False
        for c in sorted(cols, key=lambda c: len(cols[c])):
            if c not in cols:
                continue
            units = [r for r in cols[c] if abs(rows[r][c]) == 1]
            if not units:
                continue
            p = min(units, key=lambda r: (len(rows[r]), r))
            prow = rows.pop(p)
            piv = prow[c]
            for r in list(cols[c]):
                if r == p:
                    continue
                row = rows[r]
                f = row[c] * piv
                for cc, v in prow.items():
                    nv = row.get(cc, 0) - f * v
                    if nv:
                        if cc not in row:
                            cols[cc].add(r)
                        row[cc] = nv
                    else:
                        if cc in row:
                            del row[cc]
                            cols[cc].discard(r)
                if not row:
                    del rows[r]
            for cc in prow:
                cols[cc].discard(p)
                if not cols[cc]:
                    del cols[cc]
            cols.pop(c, None)
            ones += 1
            progress = True
    rest = []
    if rows:
        rlist = sorted(rows)
        clist = sorted({c for row in rows.values() for c in row})
        cindex = {c: j for j, c in enumerate(clist)}
        for r in rlist:
            dense = [0] * len(clist)
            for c, v in rows[r].items():
                dense[cindex[c]] = v
            rest.append(dense)
    tail = sorted(d for d in _dense_snf_diagonal(rest) if d) if rest else []
    factors = [1] * ones + _divisibility_chain(tail)
    return factors, len(factors)


def _divisibility_chain(ds):
    """Rewrite a diagonal so each entry divides the next."""
    ds = list(ds)
    for i in range(len(ds)):
        for j in range(i + 1, len(ds)):
            a, b = ds[i], ds[j]
            g = gcd(a, b)
            ds[i], ds[j] = g, a * b // g
    return ds


# -- chain complexes -------------------------------------------------------------

@dataclass
class ChainComplex:
    """Bases per degree and boundary matrices ``d_n: C_n -> C_{n-1}``.

    ``top`` is the highest degree whose basis is known; homology there is
    flagged unreliable when ``truncated`` is set, because boundaries from the
    missing degree above are not included.
    """

    bases: dict
    boundaries: dict
    truncated: bool = False
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def top(self) -> int:
        return max(self.bases) if self.bases else -1

    def index(self, n):
        if n not in self._index:
            self._index[n] = {c: k for k, c in enumerate(self.bases.get(n, []))}
        return self._index[n]

    def boundary(self, n) -> IntMatrix:
        if n in self.boundaries:
            return self.boundaries[n]
        return IntMatrix(len(self.bases.get(n - 1, [])), len(self.bases.get(n, [])))

    def boundary_of(self, n, cell) -> dict:
        """Boundary of one basis cell as ``{cell: coefficient}``."""
        k = self.index(n)[cell]
        prev = self.bases.get(n - 1, [])
        return {prev[r]: v for (r, c), v in self.boundary(n).entries.items() if c == k}

    def check_d_squared(self) -> list:
        bad = []
        for n in range(2, self.top + 1):
            if not (self.boundary(n - 1) @ self.boundary(n)).is_zero():
                bad.append(n)
        return bad


def complex_from_boundary(bases, boundary_fn, truncated=False) -> ChainComplex:
    """Assemble a complex from ``boundary_fn(n, cell) -> {cell: coeff}``."""
    bases = {n: list(b) for n, b in bases.items()}
    index = {n: {c: k for k, c in enumerate(b)} for n, b in bases.items()}
    boundaries = {}
    for n in sorted(bases):
        if n == 0 or (n - 1) not in bases:
            continue
        entries = defaultdict(int)
        for k, cell in enumerate(bases[n]):
            for tgt, v in boundary_fn(n, cell).items():
                r = index[n - 1].get(tgt)
                if r is None:
                    continue  # cells dropped by normalization
                entries[(r, k)] += v
        boundaries[n] = IntMatrix(len(bases[n - 1]), len(bases[n]), entries)
    return ChainComplex(bases, boundaries, truncated)


@dataclass(frozen=True)
class HomologyGroup:
    betti: int
    torsion: tuple = ()

    def __str__(self):
        parts = ["Z"] * self.betti + [f"Z/{t}" for t in self.torsion]
        if not parts:
            return "0"
        if self.betti > 1 and not self.torsion:
            return f"Z^{self.betti}"
        return " + ".join(parts)


def homology(C: ChainComplex, check: bool = True) -> list:
    """Homology groups in degrees ``0..top`` as a list of dicts.

    Each entry has ``degree``, ``group`` (a :class:`HomologyGroup`) and
    ``reliable``.
    """
    if check:
        bad = C.check_d_squared()
        if bad:
            raise NotAComplex(f"boundary squares to nonzero in degrees {bad}")
    snf = {}
    for n in range(1, C.top + 1):
        snf[n] = smith_normal_form(C.boundary(n))
    out = []
    for n in range(C.top + 1):
        dim = len(C.bases.get(n, []))
        r_in = snf[n][1] if n in snf else 0
        factors_above, r_above = snf.get(n + 1, ([], 0))
        betti = dim - r_in - r_above
        torsion = tuple(d for d in factors_above if d > 1)
        reliable = not (C.truncated and n == C.top)
        out.append({"degree": n, "group": HomologyGroup(betti, torsion), "reliable": reliable})
    return out


def simplicial_chain_complex(S) -> ChainComplex:
    """Normalized chain complex: nondegenerate simplices, degenerate faces dropped."""
    from .simplicial import NormalForm

    bases = {n: [NormalForm((), g) for g in S.generators(n)] for n in range(S.top_dim + 1)}

    def bd(n, x):
        out = defaultdict(int)
        for i in range(n + 1):
            f = S.face(x, i)
            if not f.is_degenerate:
                out[f] += (-1) ** i
        return out

    return complex_from_boundary(bases, bd)


def verify_chain_map(f, C: ChainComplex, D: ChainComplex, shift: int = 0) -> list:
    """Check ``f d_C = d_D f`` on every basis cell of ``C``.

    ``f(n, cell)`` returns ``{cell: coeff}`` in degree ``n + shift`` of ``D``;
    target cells absent from ``D``'s basis count as zero.  Returns a list of
    violations.
    """
    def clean(chain, n):
        idx = D.index(n)
        return {c: v for c, v in chain.items() if v and c in idx}

    def push(chain, n):
        acc = defaultdict(int)
        for c, v in chain.items():
            for t, w in f(n, c).items():
                acc[t] += v * w
        return acc

    def bd(chain, n):
        acc = defaultdict(int)
        for c, v in chain.items():
            for t, w in D.boundary_of(n, c).items():
                acc[t] += v * w
        return acc

    violations = []
    for n in sorted(C.bases):
        if n + shift - 1 < 0 or (n + shift) not in D.bases or (n + shift - 1) not in D.bases:
            continue
        for cell in C.bases[n]:
            lhs = clean(push(C.boundary_of(n, cell) if n > 0 else {}, n - 1), n + shift - 1)
            rhs = clean(bd(clean(f(n, cell), n + shift), n + shift), n + shift - 1)
            if lhs != rhs:
                violations.append({"degree": n, "cell": cell, "f_of_boundary": lhs,
                                   "boundary_of_f": rhs})
    return violations


# -- prismatic double complexes ----------------------------------------------------

def is_fiber_degenerate(cell) -> bool:
    """True when the payload is degenerate in some fiber direction."""
    from .prismatic import block_start

    if cell.construction == "E":
        return any(x.is_degenerate for x in cell.payload)
    x = cell.payload[0] if cell.construction == "Pf" else cell.payload
    if not x.degens:
        return False
    fiber = set()
    for i, qi in enumerate(cell.q):
        start = block_start(cell.construction, cell.q, i)
        fiber.update(range(start, start + qi))
    return any(j in fiber for j in x.degens)


def prism_boundary(cell, vertical_only: bool = False) -> dict:
    """Total differential of one cell.

    Vertical part ``sum_i (-1)^(Q_i+i) sum_j (-1)^j d_j^(i)`` over blocks with
    ``q_i > 0``; horizontal part ``sum_k (-1)^(Q_k+k) d_(k)`` over blocks with
    ``q_k = 0``.
    """
    from .prismatic import prism_operator

    out = defaultdict(int)
    Q = 0
    for i, qi in enumerate(cell.q):
        sign = -1 if (Q + i) % 2 else 1
        if qi > 0:
            for j in range(qi + 1):
                out[prism_operator(cell, "fiber_face", i, j)] += sign * (-1) ** j
        elif cell.p > 0 and not vertical_only:
            out[prism_operator(cell, "base_face", i)] += sign
        Q += qi
    return out


def _payload_bound(construction, N):
    return 2 * N + 1 if construction == "Pbar" else N


def prismatic_total_complex(space, construction: str, N: int, column: int | None = None) -> ChainComplex:
    """Normalized total complex of ``P``, ``Pbar`` or ``Pf`` up to total degree ``N``.

    Total degree of ``(p; q)`` is ``p + q_0 + ... + q_p``.  With ``column``
    set, only cells with that ``p`` are kept and the differential is the
    vertical one.  Degree ``N`` is flagged unreliable in homology unless only
    a column is built and the fiber degree is complete.
    """
    from .prismatic import MultiDegree, SimplicialMap, compositions, prism_cells

    if construction not in ("P", "Pbar", "Pf"):
        raise ValueError(f"no total complex for {construction!r}")
    need = _payload_bound(construction, N)
    if isinstance(space, SimplicialMap):
        if space.source.D < need or space.target.D < N:
            space = SimplicialMap(space.source.truncated(max(need, space.source.D)),
                                  space.target.truncated(max(N, space.target.D)),
                                  space.images)
    elif space.D < need:
        space = space.truncated(need)
    bases = {}
    for n in range(N + 1):
        cells = []
        ps = [column] if column is not None else range(n + 1)
        for p in ps:
            if p > n:
                continue
            for q in compositions(n - p, p + 1):
                cells.extend(c for c in prism_cells(space, construction, MultiDegree(p, q))
                             if not is_fiber_degenerate(c))
        bases[n] = sorted(cells)
    vertical = column is not None
    return complex_from_boundary(bases, lambda n, c: prism_boundary(c, vertical), truncated=True)


def aw_violations(S, p: int, signed: bool = True, flip=None) -> list:
    """``verify_chain_map`` for ``aw`` from ``C_*(S)`` into column ``p`` of the P complex.

    ``flip`` names one generator whose aw terms get the opposite sign, to show
    that the check notices a single wrong sign.
    """
    from .prismatic import aw_map

    N = S.top_dim + p
    if S.D < N:
        S = S.truncated(N)
    C = simplicial_chain_complex(S)
    D = prismatic_total_complex(S, "P", N, column=p)

    def f(n, x):
        out = {}
        sign = -1 if flip is not None and x.gen == tuple(flip) and not x.degens else 1
        for c, cell in aw_map(S, x, p, signed=signed):
            if not is_fiber_degenerate(cell):
                out[cell] = out.get(cell, 0) + sign * c
        return out

    return verify_chain_map(f, C, D, shift=p)
