"""Finite, dimension-truncated simplicial sets.

A simplicial set is stored by its nondegenerate simplices (generators) and
the faces of each generator.  Every simplex, degenerate or not, is handled in
Eilenberg-Zilber normal form ``s_{i_1} ... s_{i_k} x`` with
``i_1 > ... > i_k`` and ``x`` a generator; degenerate simplices are never
stored.

Operator words are sequences of letters ``(kind, index)`` with kind ``"d"``
or ``"s"``, read as a composite: the rightmost letter acts first, so
``[("d", 0), ("s", 0)]`` is ``d_0 s_0``.
"""
from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import (
    DimensionOutOfRange,
    IndexOutOfRange,
    NotClosedUnderFaces,
    UnorderedVertices,
)

EPS_TOL = 1e-12

Gen = tuple  # (dim, index)
Letter = tuple  # (kind, index)


@dataclass(frozen=True, order=True)
class NormalForm:
    """A simplex ``s_{degens[0]} ... s_{degens[-1]} gen``."""

    degens: tuple
    gen: Gen

    @property
    def dim(self) -> int:
        return self.gen[0] + len(self.degens)

    @property
    def is_degenerate(self) -> bool:
        return bool(self.degens)

    def to_json(self) -> dict:
        return {"degens": list(self.degens), "gen": list(self.gen)}

    @classmethod
    def from_json(cls, obj) -> NormalForm:
        return cls(tuple(obj["degens"]), tuple(obj["gen"]))

    def __repr__(self) -> str:
        word = "".join(f"s{i}" for i in self.degens)
        return f"<{word}{'·' if word else ''}x{self.gen[0]}_{self.gen[1]}>"


def nf(gen: Gen, degens: Iterable[int] = ()) -> NormalForm:
    return NormalForm(tuple(degens), tuple(gen))


class SimplicialSet:
    """Immutable truncated simplicial set.

    Parameters
    ----------
    D : int
        Truncation bound; no operation produces simplices above dimension D.
    counts : sequence of int
        Number of generators in each dimension ``0..len(counts)-1``.
    faces : dict
        Maps each generator ``(n, k)`` with ``n >= 1`` to the tuple of its
        ``n + 1`` faces, each a :class:`NormalForm` of dimension ``n - 1``.
    labels : dict, optional
        Display labels for generators.
    simplex_tuples : dict, optional
        For sets built by :func:`from_complex`: generator -> vertex tuple.
        Its presence marks the set as ``K^s`` for a complex ``K``.
    """

    def __init__(self, D, counts, faces, labels=None, simplex_tuples=None,
                 vertex_labels=None):
        counts = tuple(counts)
        while counts and counts[-1] == 0:
            counts = counts[:-1]
        if len(counts) - 1 > D:
            raise DimensionOutOfRange(
                f"generators up to dim {len(counts) - 1} exceed truncation {D}")
        self.D = D
        self.counts = counts
        self._faces = dict(faces)
        self.labels = dict(labels or {})
        self.simplex_tuples = dict(simplex_tuples) if simplex_tuples is not None else None
        self.vertex_labels = tuple(vertex_labels) if vertex_labels is not None else None
        self._tuple_index = None
        if self.simplex_tuples is not None:
            self._tuple_index = {v: k for k, v in self.simplex_tuples.items()}
        self._simplex_cache = {}

    # -- basic structure -------------------------------------------------
    @property
    def is_complex(self) -> bool:
        return self.simplex_tuples is not None

    @property
    def top_dim(self) -> int:
        return len(self.counts) - 1

    def truncated(self, D: int) -> SimplicialSet:
        """Copy of this set with a different truncation bound."""
        return SimplicialSet(D, self.counts, self._faces, self.labels,
                             self.simplex_tuples, self.vertex_labels)

    def generators(self, n: int) -> list:
        if n < 0 or n > self.D:
            raise DimensionOutOfRange(f"dimension {n} outside [0, {self.D}]")
        if n >= len(self.counts):
            return []
        return [(n, k) for k in range(self.counts[n])]

    def all_generators(self) -> list:
        return [(n, k) for n in range(len(self.counts)) for k in range(self.counts[n])]

    def generator_faces(self, g: Gen) -> tuple:
        return self._faces.get(tuple(g), ())

    def label(self, g: Gen) -> str:
        return self.labels.get(tuple(g), f"x{g[0]}_{g[1]}")

    def _check_dim(self, n: int) -> None:
        if n < 0 or n > self.D:
            raise DimensionOutOfRange(f"dimension {n} outside [0, {self.D}]")

    # -- operators ---------------------------------------------------------
    def face(self, x: NormalForm, i: int) -> NormalForm:
        n = x.dim
        if n < 1:
            raise DimensionOutOfRange("a vertex has no faces")
        if not 0 <= i <= n:
            raise IndexOutOfRange(f"d_{i} undefined in dimension {n}")
        return self._face(x.degens, x.gen, i)

    def _face(self, degens, gen, i):
        if not degens:
            return self._faces[gen][i]
        j, rest = degens[0], degens[1:]
        if i < j:
            return self.degeneracy(self._face(rest, gen, i), j - 1)
        if i == j or i == j + 1:
            return NormalForm(rest, gen)
        return self.degeneracy(self._face(rest, gen, i - 1), j)

    def degeneracy(self, x: NormalForm, j: int) -> NormalForm:
        n = x.dim
        if not 0 <= j <= n:
            raise IndexOutOfRange(f"s_{j} undefined in dimension {n}")
        self._check_dim(n + 1)
        return NormalForm(_insert_degeneracy(x.degens, j), x.gen)

    def apply(self, word: Sequence[Letter], x: NormalForm) -> NormalForm:
        """Apply an operator word, rightmost letter first."""
        for kind, i in reversed(list(word)):
            if kind == "d":
                x = self.face(x, i)
            elif kind == "s":
                x = self.degeneracy(x, i)
            else:
                raise ValueError(f"unknown operator kind {kind!r}")
        return x

    def delete(self, x: NormalForm, positions: Iterable[int]) -> NormalForm:
        """Delete the vertices at ``positions`` (indices into ``x``)."""
        for i in sorted(set(positions), reverse=True):
            x = self.face(x, i)
        return x

    def keep(self, x: NormalForm, positions: Iterable[int]) -> NormalForm:
        keep = set(positions)
        return self.delete(x, [i for i in range(x.dim + 1) if i not in keep])

    def pullback(self, x: NormalForm, alpha: Sequence[int]) -> NormalForm:
        """``alpha^* x`` for a monotone map ``alpha: [m] -> [dim x]``."""
        image = sorted(set(alpha))
        y = self.keep(x, image)
        pos = {v: k for k, v in enumerate(image)}
        # alpha = (injection onto image) o (surjection collapsing repeats)
        seq = [pos[a] for a in alpha]
        for k in range(len(seq) - 1):
            if seq[k] == seq[k + 1]:
                y = self.degeneracy(y, k)
        return y

    # -- enumeration -------------------------------------------------------
    def simplices(self, n: int) -> list:
        """All simplices of dimension ``n`` (degenerate included), sorted."""
        self._check_dim(n)
        cached = self._simplex_cache.get(n)
        if cached is not None:
            return cached
        out = []
        for m in range(min(n, self.top_dim) + 1):
            words = [tuple(reversed(c)) for c in itertools.combinations(range(n), n - m)]
            for g in self.generators(m):
                for w in words:
                    out.append(NormalForm(tuple(sorted(w, reverse=True)), g))
        out.sort()
        self._simplex_cache[n] = out
        return out

    # -- complexes ---------------------------------------------------------
    def to_tuple(self, x: NormalForm) -> tuple:
        """Vertex tuple (with repetitions) of a simplex of ``K^s``."""
        if self.simplex_tuples is None:
            raise TypeError("not built from a simplicial complex")
        t = list(self.simplex_tuples[x.gen])
        for j in reversed(x.degens):
            t.insert(j, t[j])
        return tuple(t)

    def from_tuple(self, t: Sequence[int]) -> NormalForm:
        if self._tuple_index is None:
            raise TypeError("not built from a simplicial complex")
        t = tuple(t)
        if any(t[k] > t[k + 1] for k in range(len(t) - 1)):
            raise UnorderedVertices(f"{t} is not nondecreasing")
        base = tuple(v for k, v in enumerate(t) if k == 0 or t[k - 1] != v)
        degens = tuple(k for k in range(len(t) - 2, -1, -1) if t[k] == t[k + 1])
        try:
            g = self._tuple_index[base]
        except KeyError:
            raise KeyError(f"{base} is not a simplex") from None
        return NormalForm(degens, g)

    def __repr__(self) -> str:
        return f"SimplicialSet(D={self.D}, counts={list(self.counts)})"

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        gens = {str(n): [self.label((n, k)) for k in range(c)]
                for n, c in enumerate(self.counts)}
        faces = {f"{g[0]}:{g[1]}": [f.to_json() for f in fs]
                 for g, fs in sorted(self._faces.items())}
        return {"D": self.D, "generators": gens, "faces": faces}

    @classmethod
    def from_json(cls, obj) -> SimplicialSet:
        gens = obj["generators"]
        counts = [len(gens.get(str(n), [])) for n in range(len(gens))]
        labels = {(n, k): lab for n in range(len(counts))
                  for k, lab in enumerate(gens.get(str(n), []))}
        faces = {}
        for key, fs in obj.get("faces", {}).items():
            d, k = (int(v) for v in key.split(":"))
            faces[(d, k)] = tuple(NormalForm.from_json(f) for f in fs)
        return cls(obj["D"], counts, faces, labels)


def _insert_degeneracy(degens: tuple, j: int) -> tuple:
    # s_j s_i = s_{i+1} s_j for j <= i
    if not degens or j > degens[0]:
        return (j,) + degens
    return (degens[0] + 1,) + _insert_degeneracy(degens[1:], j)


def from_complex(vertices, simplices, D=None) -> SimplicialSet:
    """Simplicial set ``K^s`` of an ordered simplicial complex.

    ``vertices`` are labels ordered by position; ``simplices`` are index
    lists, each strictly increasing.  Vertices are implicitly 0-simplices.
    """
    nverts = len(vertices)
    by_dim = {0: {(v,) for v in range(nverts)}}
    for s in simplices:
        s = tuple(int(v) for v in s)
        if any(v < 0 or v >= nverts for v in s):
            raise NotClosedUnderFaces(f"simplex {s} uses an unknown vertex")
        if any(s[k] >= s[k + 1] for k in range(len(s) - 1)):
            raise UnorderedVertices(f"simplex {s} is not strictly increasing")
        if s:
            by_dim.setdefault(len(s) - 1, set()).add(s)
    top = max(by_dim) if by_dim[0] else 0
    for n in range(1, top + 1):
        for s in by_dim.get(n, ()):
            for i in range(n + 1):
                if s[:i] + s[i + 1:] not in by_dim.get(n - 1, set()):
                    raise NotClosedUnderFaces(f"face {i} of {s} missing")
    ordered = {n: sorted(by_dim.get(n, ())) for n in range(top + 1)}
    index = {s: (n, k) for n, ss in ordered.items() for k, s in enumerate(ss)}
    faces = {}
    for n in range(1, top + 1):
        for s in ordered[n]:
            faces[index[s]] = tuple(NormalForm((), index[s[:i] + s[i + 1:]])
                                    for i in range(n + 1))
    labels = {g: ",".join(str(vertices[v]) for v in s) for s, g in index.items()}
    tuples = {g: s for s, g in index.items()}
    counts = [len(ordered[n]) for n in range(top + 1)] if nverts else []
    if D is None:
        D = max(top, 0)
    return SimplicialSet(D, counts, faces, labels, tuples, vertices)


def complex_from_json(obj, D=None) -> SimplicialSet:
    return from_complex(obj["vertices"], obj.get("simplices", []), D)


# -- operator algebra ---------------------------------------------------------

def normalize_word(S: SimplicialSet, word: Sequence[Letter], x: NormalForm) -> NormalForm:
    return S.apply(word, x)


_KINDS = {"face": "d", "d": "d", "degeneracy": "s", "s": "s"}


def apply_operator(S: SimplicialSet, kind: str, i: int, x: NormalForm) -> NormalForm:
    try:
        letter = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown operator kind {kind!r}") from None
    return S.apply([(letter, i)], x)


def nondegenerate_cells(S: SimplicialSet, n: int) -> list:
    return S.generators(n)


def mu_operator(qvec: Sequence[int]):
    """The degeneracy ``mu_{q_0..q_p}: S_p -> S_{q+p}`` and its coordinate dual.

    Returns ``(word, coord_map)``.  The word repeats vertex ``i`` of a
    p-simplex ``q_i + 1`` times; ``coord_map`` sums barycentric coordinates
    blockwise, block ``i`` having ``q_i + 1`` entries.
    """
    qvec = tuple(int(q) for q in qvec)
    if any(q < 0 for q in qvec):
        raise ValueError("block sizes must be nonnegative")
    word = []
    start = 0
    for i, q in enumerate(qvec):
        # block i occupies positions start..start+q
        word = [("s", start + j) for j in reversed(range(q))] + word
        start += q + 1
    word = tuple(word)

    def coord_map(t):
        t = tuple(t)
        if len(t) != sum(qvec) + len(qvec):
            raise IndexOutOfRange("point does not match block sizes")
        out, k = [], 0
        for q in qvec:
            out.append(math.fsum(t[k:k + q + 1]))
            k += q + 1
        return tuple(out)

    return word, coord_map


def mu_apply(S: SimplicialSet, qvec: Sequence[int], x: NormalForm) -> NormalForm:
    word, _ = mu_operator(qvec)
    return S.apply(word, x)


# -- standard simplex coordinates --------------------------------------------

def check_bary(t, tol: float = EPS_TOL) -> tuple:
    t = tuple(float(v) for v in t)
    if not t or any(v < -tol for v in t) or abs(math.fsum(t) - 1.0) > tol * max(1, len(t)):
        from .errors import InvalidPoint
        raise InvalidPoint(f"{t} is not a barycentric point")
    return t


def eval_coord_map(kind: str, i: int, t: Sequence[float]) -> tuple:
    """Coface ``epsilon^i`` (kind "face") or codegeneracy ``eta^i`` ("degeneracy")."""
    t = tuple(t)
    if kind in ("face", "epsilon", "d"):
        if not 0 <= i <= len(t):
            raise IndexOutOfRange(f"epsilon^{i} undefined on a point of length {len(t)}")
        return t[:i] + (0.0,) + t[i:]
    if kind in ("degeneracy", "eta", "s"):
        if not 0 <= i <= len(t) - 2:
            raise IndexOutOfRange(f"eta^{i} undefined on a point of length {len(t)}")
        return t[:i] + (t[i] + t[i + 1],) + t[i + 2:]
    raise ValueError(f"unknown coordinate map kind {kind!r}")


def epsilon(i: int, t):
    return eval_coord_map("face", i, t)


def eta(i: int, t):
    return eval_coord_map("degeneracy", i, t)


# -- identity checks ------------------------------------------------------------

def verify_identities(S: SimplicialSet) -> list:
    """Check the simplicial identities on every generator; return violations."""
    violations = []

    def report(identity, g, detail):
        violations.append({"identity": identity, "generator": list(g), "detail": detail})

    for g in S.all_generators():
        n = g[0]
        faces = S.generator_faces(g)
        if n >= 1:
            if len(faces) != n + 1:
                report("face_count", g, f"expected {n + 1} faces, found {len(faces)}")
                continue
            bad = False
            for i, f in enumerate(faces):
                fg = f.gen
                if f.dim != n - 1 or fg[0] >= len(S.counts) or fg[1] >= S.counts[fg[0]]:
                    report("face_reference", g, f"d_{i} = {f!r} is invalid")
                    bad = True
            if bad:
                continue
        x = NormalForm((), g)
        try:
            for j in range(2, n + 1):
                for i in range(j):
                    lhs = S.face(S.face(x, j), i)
                    rhs = S.face(S.face(x, i), j - 1)
                    if lhs != rhs:
                        report(f"d_{i} d_{j} = d_{j - 1} d_{i}", g, f"{lhs!r} != {rhs!r}")
            if n + 1 <= S.D:
                for j in range(n + 1):
                    y = S.degeneracy(x, j)
                    for i in range(n + 2):
                        lhs = S.face(y, i)
                        if i < j:
                            rhs = S.degeneracy(S.face(x, i), j - 1)
                        elif i in (j, j + 1):
                            rhs = x
                        else:
                            rhs = S.degeneracy(S.face(x, i - 1), j)
                        if lhs != rhs:
                            report(f"d_{i} s_{j}", g, f"{lhs!r} != {rhs!r}")
            if n + 2 <= S.D:
                for j in range(n + 1):
                    for i in range(j + 1):
                        lhs = S.degeneracy(S.degeneracy(x, j), i)
                        rhs = S.degeneracy(S.degeneracy(x, i), j + 1)
                        if lhs != rhs:
                            report(f"s_{i} s_{j} = s_{j + 1} s_{i}", g, f"{lhs!r} != {rhs!r}")
        except (KeyError, IndexOutOfRange, DimensionOutOfRange) as exc:
            report("evaluation", g, str(exc))
    return violations
