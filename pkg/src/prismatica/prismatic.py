"""Prismatic constructions over a simplicial set.

Four constructions are supported, all indexed by a multidegree
``(p; q_0, ..., q_p)`` with ``q = q_0 + ... + q_p``:

* ``P``     prismatic subdivision, cells are simplices of dimension ``q + p``.
* ``Pbar``  star prismatic set, cells are simplices of dimension ``q + 2p + 1``.
  Block ``i`` of a cell has ``q_i + 2`` vertices; the last is the star vertex.
* ``Pf``    prismatic subdivision of a simplicial map ``f: S -> T``, cells are
  pairs ``(sigma, sigma_bar)`` with ``f(sigma) = mu_q(sigma_bar)``.
* ``E``     ``E_p S = S x ... x S`` (``p + 1`` factors), the one strong example.

Block ``i`` of a ``P`` cell occupies vertex positions ``Q_i + i .. Q_i + q_i + i``
with ``Q_i = q_0 + ... + q_{i-1}``; for ``Pbar`` it is ``Q_i + 2i .. Q_i + q_i + 2i + 1``.
Fiber operators act inside one block, base faces delete a whole block.
"""
from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import (
    DimensionOutOfRange,
    IndexOutOfRange,
    InternalInvariantBroken,
    ShapeMismatch,
    UnorderedVertices,
)
from .simplicial import NormalForm, SimplicialSet, check_bary, mu_apply

CONSTRUCTIONS = ("P", "Pbar", "Pf", "E")
KINDS = ("fiber_face", "fiber_degeneracy", "base_face", "base_degeneracy")


@dataclass(frozen=True)
class MultiDegree:
    p: int
    q: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))
        if self.p < 0 or len(self.q) != self.p + 1 or any(v < 0 for v in self.q):
            raise ShapeMismatch(f"bad multidegree p={self.p}, q={self.q}")

    @property
    def total(self) -> int:
        return self.p + sum(self.q)

    def __str__(self):
        return f"({self.p}; {','.join(map(str, self.q))})"


def payload_dim(construction: str, q: Sequence[int]) -> int:
    p = len(q) - 1
    if construction in ("P", "Pf"):
        return sum(q) + p
    if construction == "Pbar":
        return sum(q) + 2 * p + 1
    raise ValueError(f"no single payload dimension for {construction!r}")


def block_start(construction: str, q: Sequence[int], i: int) -> int:
    """First vertex position of block ``i``."""
    Q = sum(q[:i])
    return Q + (2 * i if construction == "Pbar" else i)


def block_positions(construction: str, q: Sequence[int], i: int) -> range:
    start = block_start(construction, q, i)
    width = q[i] + (2 if construction == "Pbar" else 1)
    return range(start, start + width)


class SimplicialMap:
    """A simplicial map given by the images of generators."""

    def __init__(self, source: SimplicialSet, target: SimplicialSet, images: dict):
        self.source = source
        self.target = target
        self.images = {tuple(g): v for g, v in images.items()}
        for g in source.all_generators():
            if g not in self.images:
                raise KeyError(f"no image for generator {g}")
            if self.images[g].dim != g[0]:
                raise ShapeMismatch(f"image of {g} has the wrong dimension")

    @classmethod
    def from_vertex_map(cls, source, target, vmap):
        """Map of complexes from an order-preserving vertex map."""
        images = {}
        for g in source.all_generators():
            t = tuple(vmap[v] for v in source.simplex_tuples[g])
            if any(t[k] > t[k + 1] for k in range(len(t) - 1)):
                raise UnorderedVertices(f"vertex map reverses the order on {t}")
            images[g] = target.from_tuple(t)
        return cls(source, target, images)

    def __call__(self, x: NormalForm) -> NormalForm:
        return self.target.apply([("s", j) for j in x.degens], self.images[x.gen])

    def violations(self) -> list:
        """Generators where ``f d_i != d_i f``."""
        bad = []
        for g in self.source.all_generators():
            if g[0] == 0:
                continue
            x = NormalForm((), g)
            for i in range(g[0] + 1):
                if self(self.source.face(x, i)) != self.target.face(self(x), i):
                    bad.append({"generator": list(g), "face": i})
        return bad


@dataclass(frozen=True, order=True)
class PrismCell:
    construction: str
    p: int
    q: tuple
    payload: object
    space: object = field(default=None, compare=False, repr=False, hash=False)

    @property
    def deg(self) -> MultiDegree:
        return MultiDegree(self.p, self.q)

    def to_json(self) -> dict:
        if self.construction in ("Pf", "E"):
            payload = [x.to_json() for x in self.payload]
        else:
            payload = self.payload.to_json()
        return {"construction": self.construction, "p": self.p, "q": list(self.q),
                "payload": payload}


def make_cell(space, construction: str, q, payload) -> PrismCell:
    """Validated cell constructor."""
    q = tuple(q)
    p = len(q) - 1
    MultiDegree(p, q)
    if construction in ("P", "Pbar"):
        if payload.dim != payload_dim(construction, q):
            raise ShapeMismatch(f"payload dim {payload.dim} does not fit {construction} {q}")
    elif construction == "Pf":
        sigma, sigma_bar = payload
        if sigma.dim != payload_dim("Pf", q) or sigma_bar.dim != p:
            raise ShapeMismatch("Pf payload dimensions do not fit")
        if space(sigma) != mu_apply(space.target, q, sigma_bar):
            raise InternalInvariantBroken("f(sigma) != mu(sigma_bar)")
    elif construction == "E":
        if len(payload) != p + 1 or any(x.dim != qi for x, qi in zip(payload, q)):
            raise ShapeMismatch("E payload dimensions do not fit")
    else:
        raise ValueError(f"unknown construction {construction!r}")
    return PrismCell(construction, p, q, payload, space)


def _base_set(space):
    return space.source if isinstance(space, SimplicialMap) else space


def prism_cells(space, construction: str, deg) -> list:
    """Every cell of the given multidegree, degenerate payloads included."""
    if not isinstance(deg, MultiDegree):
        deg = MultiDegree(*deg)
    q = deg.q
    if construction in ("P", "Pbar"):
        return [PrismCell(construction, deg.p, q, x, space)
                for x in space.simplices(payload_dim(construction, q))]
    if construction == "Pf":
        S, T = space.source, space.target
        n = payload_dim("Pf", q)
        by_image = {}
        for sigma in S.simplices(n):
            by_image.setdefault(space(sigma), []).append(sigma)
        out = []
        for sigma_bar in T.simplices(deg.p):
            for sigma in by_image.get(mu_apply(T, q, sigma_bar), ()):
                out.append(PrismCell("Pf", deg.p, q, (sigma, sigma_bar), space))
        return sorted(out)
    if construction == "E":
        factors = [space.simplices(qi) for qi in q]
        return [PrismCell("E", deg.p, q, tuple(xs), space) for xs in itertools.product(*factors)]
    raise ValueError(f"unknown construction {construction!r}")


def operator_indices(construction: str, q: Sequence[int], kind: str, i: int, j: int | None = None):
    """Raw operator word on the payload given by the index formulas.

    No range checks beyond the block index; ``prism_operator`` validates.
    Words read right to left, as in ``SimplicialSet.apply``.
    """
    q = tuple(q)
    if not 0 <= i < len(q):
        raise IndexOutOfRange(f"block {i} outside 0..{len(q) - 1}")
    if construction == "E":
        raise ValueError("E cells act factorwise; there is no payload word")
    start = block_start(construction, q, i)
    if kind == "fiber_face":
        return (("d", start + j),)
    if kind == "fiber_degeneracy":
        return (("s", start + j),)
    if kind == "base_face":
        return tuple(("d", k) for k in block_positions(construction, q, i))
    raise ValueError(f"no payload word for {kind!r}")


def prism_operator(cell: PrismCell, kind: str, i: int, j: int | None = None) -> PrismCell:
    """Apply a fiber face/degeneracy of block ``i`` or the base face ``d_(i)``."""
    p, q = cell.p, cell.q
    if not 0 <= i <= p:
        raise IndexOutOfRange(f"block {i} outside 0..{p}")
    if kind in ("fiber_face", "fiber_degeneracy"):
        if j is None:
            raise IndexOutOfRange(f"{kind} needs an inner index")
        if kind == "fiber_face" and q[i] < 1:
            raise IndexOutOfRange(f"block {i} has no fiber faces (q_{i} = 0)")
        if not 0 <= j <= q[i]:
            raise IndexOutOfRange(f"inner index {j} outside 0..{q[i]}")
        new_q = q[:i] + (q[i] + (1 if kind == "fiber_degeneracy" else -1),) + q[i + 1:]
    elif kind == "base_face":
        if p < 1:
            raise IndexOutOfRange("base faces need p >= 1")
        new_q = q[:i] + q[i + 1:]
    elif kind == "base_degeneracy":
        if cell.construction != "E":
            raise ValueError("base degeneracies exist only for E")
        new_q = q[:i + 1] + (q[i],) + q[i + 1:]
    else:
        raise ValueError(f"unknown operator kind {kind!r}")

    space = cell.space
    if cell.construction == "E":
        xs = list(cell.payload)
        if kind == "fiber_face":
            xs[i] = space.face(xs[i], j)
        elif kind == "fiber_degeneracy":
            xs[i] = space.degeneracy(xs[i], j)
        elif kind == "base_face":
            del xs[i]
        else:
            xs.insert(i, xs[i])
        return PrismCell("E", len(new_q) - 1, new_q, tuple(xs), space)

    word = operator_indices(cell.construction, q, kind, i, j)
    if cell.construction == "Pf":
        sigma, sigma_bar = cell.payload
        sigma = space.source.apply(word, sigma)
        if kind == "base_face":
            sigma_bar = space.target.face(sigma_bar, i)
        if space(sigma) != mu_apply(space.target, new_q, sigma_bar):
            raise InternalInvariantBroken(f"{kind} left P(f): f(sigma) != mu(sigma_bar)")
        return PrismCell("Pf", len(new_q) - 1, new_q, (sigma, sigma_bar), space)
    payload = space.apply(word, cell.payload)
    return PrismCell(cell.construction, len(new_q) - 1, new_q, payload, space)


# -- realization ---------------------------------------------------------------

def lambda_eval(cell: PrismCell, t, s):
    """``lambda(t, s, x) = (t_0 s^0, ..., t_p s^p; x)`` for P and Pf cells."""
    if cell.construction not in ("P", "Pf"):
        raise ShapeMismatch(f"lambda_eval is defined on P and Pf cells, not {cell.construction}")
    t = check_bary(t)
    if len(t) != cell.p + 1 or len(s) != cell.p + 1:
        raise ShapeMismatch("point does not match the base dimension")
    target = []
    for ti, si, qi in zip(t, s, cell.q):
        si = check_bary(si)
        if len(si) != qi + 1:
            raise ShapeMismatch(f"fiber point of length {len(si)} for q_i = {qi}")
        target.extend(ti * v for v in si)
    simplex = cell.payload[0] if cell.construction == "Pf" else cell.payload
    return tuple(target), simplex


# -- comparison maps between P-bar and P ----------------------------------------

def inclusion_i(S: SimplicialSet, x: NormalForm, t=None) -> PrismCell:
    """``i(t, x) = (t, 1, s_0 ... s_p x)``: the Pbar cell at degree ``(p; 0,...,0)``."""
    p = x.dim
    if 2 * p + 1 > S.D:
        raise DimensionOutOfRange(f"inclusion needs dimension {2 * p + 1} > D = {S.D}")
    if t is not None and len(check_bary(t)) != p + 1:
        raise ShapeMismatch("t does not match dim x")
    y = S.apply([("s", k) for k in range(p + 1)], x)
    return PrismCell("Pbar", p, (0,) * (p + 1), y, S)


def retraction_r(cell: PrismCell) -> NormalForm:
    """Keep only the star vertex of every block; lands in ``S_p``."""
    _require(cell, "Pbar")
    stars = [block_positions("Pbar", cell.q, i)[-1] for i in range(cell.p + 1)]
    return cell.space.keep(cell.payload, stars)


def map_f(cell: PrismCell) -> PrismCell:
    """Delete the star vertices: a P cell of the same multidegree."""
    _require(cell, "Pbar")
    stars = [block_positions("Pbar", cell.q, i)[-1] for i in range(cell.p + 1)]
    y = cell.space.delete(cell.payload, stars)
    return PrismCell("P", cell.p, cell.q, y, cell.space)


def comparison_map(kind: str, *args, **kwargs):
    maps = {"inclusion_i": inclusion_i, "retraction_r": retraction_r, "map_f": map_f}
    try:
        return maps[kind](*args, **kwargs)
    except KeyError:
        raise ValueError(f"unknown comparison map {kind!r}") from None


def _require(cell, construction):
    if cell.construction != construction:
        raise ShapeMismatch(f"expected a {construction} cell, got {cell.construction}")


# -- Alexander-Whitney type map --------------------------------------------------

def compositions(n: int, parts: int):
    """All ``(q_0..q_{parts-1})`` of nonnegative integers summing to ``n``."""
    for cuts in itertools.combinations(range(n + parts - 1), parts - 1):
        prev, out = -1, []
        for c in cuts + (n + parts - 1,):
            out.append(c - prev - 1)
            prev = c
        yield tuple(out)


def aw_sign(q: Sequence[int]) -> int:
    """Sign making ``aw`` a chain map for the vertical differential."""
    return -1 if sum(i * qi for i, qi in enumerate(q)) % 2 else 1


def aw_map(S: SimplicialSet, x: NormalForm, p: int, signed: bool = True) -> list:
    """``aw(x) = sum over q_0+...+q_p = n of s_{Q_p+p-1} ... s_{q_0}(x)`` at ``(p; q)``.

    Returns ``[(coefficient, cell)]``.  With ``signed=False`` every coefficient
    is +1; see :func:`aw_sign` for why the default carries signs.
    """
    if isinstance(x, tuple):
        x = NormalForm((), x)
    n = x.dim
    if n + p > S.D:
        raise DimensionOutOfRange(f"aw needs dimension {n + p} > D = {S.D}")
    out = []
    for q in compositions(n, p + 1):
        word = [("s", sum(q[:k]) + k - 1) for k in range(p, 0, -1)]
        y = S.apply(word, x)
        c = aw_sign(q) if signed else 1
        out.append((c, PrismCell("P", p, q, y, S)))
    return out


def pf_map_lambda_check(cell: PrismCell, t, s, tol: float = 1e-12) -> bool:
    """``mu^q`` of the lambda target equals ``t`` (the pullback square, pointwise)."""
    target, _ = lambda_eval(cell, t, s)
    k, out = 0, []
    for qi in cell.q:
        out.append(math.fsum(target[k:k + qi + 1]))
        k += qi + 1
    return all(abs(a - b) <= tol for a, b in zip(out, t))
