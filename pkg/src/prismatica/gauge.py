"""Lattice gauge data: compatible transition functions over a simplicial set.

A transition set assigns to every nondegenerate ``sigma`` of dimension
``p >= 1`` a function ``v_sigma`` on ``Delta^{p-1}`` with values in a group.
``v_{sigma, d_i sigma}`` is ``v_sigma`` for the last face and the identity for
the others; everything else (degenerate simplices, deeper faces, parallel
transport) is derived from that.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, MissingEntry, ShapeMismatch, UnsupportedFaceSpec
from .simplicial import NormalForm, SimplicialSet, eval_coord_map

MATRIX_TOL = 1e-9


# -- groups -----------------------------------------------------------------------------

class ZMod:
    kind = "zmod"
    exact = True

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("modulus must be positive")
        self.m = m

    def identity(self):
        return 0

    def multiply(self, a, b):
        return (a + b) % self.m

    def inverse(self, a):
        return (-a) % self.m

    def equal(self, a, b, tol=None):
        return a % self.m == b % self.m

    def distance(self, a, b) -> float:
        return 0.0 if self.equal(a, b) else 1.0

    def element(self, obj):
        return int(obj) % self.m

    def to_json(self, a):
        return int(a)

    def random(self, rng):
        return rng.next_u64() % self.m

    def spec(self):
        return {"kind": "zmod", "m": self.m}


class Perm:
    """Permutations of ``0..n-1`` as tuples; ``multiply(a, b)`` is ``a o b``."""

    kind = "perm"
    exact = True

    def __init__(self, n: int):
        self.n = n

    def identity(self):
        return tuple(range(self.n))

    def multiply(self, a, b):
        return tuple(a[b[i]] for i in range(self.n))

    def inverse(self, a):
        out = [0] * self.n
        for i, v in enumerate(a):
            out[v] = i
        return tuple(out)

    def equal(self, a, b, tol=None):
        return tuple(a) == tuple(b)

    def distance(self, a, b) -> float:
        return 0.0 if self.equal(a, b) else 1.0

    def element(self, obj):
        a = tuple(int(v) for v in obj)
        if sorted(a) != list(range(self.n)):
            raise ValueError(f"{list(obj)} is not a permutation of 0..{self.n - 1}")
        return a

    def to_json(self, a):
        return list(a)

    def random(self, rng):
        a = list(range(self.n))
        for i in range(self.n - 1, 0, -1):
            j = rng.next_u64() % (i + 1)
            a[i], a[j] = a[j], a[i]
        return tuple(a)

    def spec(self):
        return {"kind": "perm", "n": self.n}


class MatrixGroup:
    """Invertible real ``dim x dim`` matrices, compared with a tolerance."""

    kind = "matrix"
    exact = False

    def __init__(self, dim: int, tol: float = MATRIX_TOL):
        self.dim = dim
        self.tol = tol
        self._eye = np.eye(dim)
        self._eye.flags.writeable = False

    def identity(self):
        return self._eye

    def multiply(self, a, b):
        return a @ b

    def inverse(self, a):
        if self.dim == 2:
            det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
            if det == 0:
                raise np.linalg.LinAlgError("singular matrix")
            return np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det
        return np.linalg.inv(a)

    def distance(self, a, b) -> float:
        return float(np.abs(np.asarray(a) - np.asarray(b)).max())

    def equal(self, a, b, tol=None):
        return self.distance(a, b) <= (self.tol if tol is None else tol)

    def element(self, obj):
        a = np.array(obj, dtype=float)
        if a.shape != (self.dim, self.dim):
            raise ShapeMismatch(f"expected a {self.dim}x{self.dim} matrix")
        return a

    def to_json(self, a):
        return [[float(x) for x in row] for row in np.asarray(a)]

    def random(self, rng):
        if self.dim == 2:
            return rotation(2 * math.pi * rng.random())
        m = np.array([[rng.random() for _ in range(self.dim)] for _ in range(self.dim)])
        return m + self.dim * np.eye(self.dim)

    def spec(self):
        return {"kind": "matrix", "dim": self.dim}


def rotation(theta: float):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def group_from_json(spec: dict):
    kind = spec.get("kind")
    if kind == "zmod":
        return ZMod(int(spec["m"]))
    if kind == "perm":
        return Perm(int(spec["n"]))
    if kind == "matrix":
        return MatrixGroup(int(spec["dim"]), float(spec.get("tol", MATRIX_TOL)))
    raise ValueError(f"unknown group kind {kind!r}")


# -- seeded sampling -----------------------------------------------------------------------

_MASK = (1 << 64) - 1


class SplitMix64:
    """splitmix64: 64-bit state, increment 0x9E3779B97F4A7C15, standard mixer."""

    def __init__(self, seed: int = 0):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform in (0, 1]."""
        return ((self.next_u64() >> 11) + 1) * 2.0 ** -53

    def simplex_point(self, n: int) -> tuple:
        """Uniform point of Delta^n (normalized exponentials)."""
        e = [-math.log(self.random()) for _ in range(n + 1)]
        s = math.fsum(e)
        return tuple(x / s for x in e)


def sample_points(n: int, count: int, rng: SplitMix64) -> list:
    """Barycenter, vertices, edge midpoints, then ``count`` random points of Delta^n."""
    if n == 0:
        return [(1.0,)]
    pts = [tuple(1.0 / (n + 1) for _ in range(n + 1))]
    for k in range(n + 1):
        pts.append(tuple(1.0 if j == k else 0.0 for j in range(n + 1)))
    for a in range(n + 1):
        for b in range(a + 1, n + 1):
            pts.append(tuple(0.5 if j in (a, b) else 0.0 for j in range(n + 1)))
    pts.extend(rng.simplex_point(n) for _ in range(count))
    return pts


# -- transition functions --------------------------------------------------------------------

class TransitionFn:
    kind = "evaluator"

    def __call__(self, t):
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(TransitionFn):
    group: object
    value: object
    kind = "constant"

    def __call__(self, t):
        return self.value


@dataclass(frozen=True)
class RotationAffine(TransitionFn):
    """SO(2) rotation by the angle ``sum_k t_k * angles[k]``."""

    group: object
    angles: tuple

    def __call__(self, t):
        if len(t) != len(self.angles):
            raise ShapeMismatch("point does not match the evaluator's simplex")
        return rotation(math.fsum(a * x for a, x in zip(self.angles, t)))


@dataclass(frozen=True)
class MatrixAffine(TransitionFn):
    """``sum_k t_k * M_k``; the caller keeps it invertible."""

    group: object
    mats: tuple

    def __call__(self, t):
        if len(t) != len(self.mats):
            raise ShapeMismatch("point does not match the evaluator's simplex")
        return sum(x * m for x, m in zip(t, self.mats))


@dataclass(frozen=True)
class Precompose(TransitionFn):
    """``fn o phi`` for a coordinate map ``phi`` (a callable on points)."""

    fn: TransitionFn
    phi: Callable

    def __call__(self, t):
        return self.fn(self.phi(tuple(t)))


@dataclass(frozen=True)
class Product(TransitionFn):
    group: object
    factors: tuple

    def __call__(self, t):
        if not self.factors:
            return self.group.identity()
        out = self.factors[0](t)
        for f in self.factors[1:]:
            out = self.group.multiply(out, f(t))
        return out


@dataclass(frozen=True)
class Inverse(TransitionFn):
    group: object
    fn: TransitionFn

    def __call__(self, t):
        return self.group.inverse(self.fn(t))


def eps(i: int):
    return lambda t: eval_coord_map("face", i, t)


def eta(j: int):
    return lambda t: eval_coord_map("degeneracy", j, t)


def insert_zeros(positions: Sequence[int]):
    """Coface inserting zeros so they land at ``positions`` (ascending)."""
    positions = sorted(positions)

    def phi(t):
        t = tuple(t)
        for k in positions:
            t = t[:k] + (0.0,) + t[k:]
        return t

    return phi


def fn_from_json(group, spec, p: int) -> TransitionFn:
    """Evaluator on ``Delta^{p-1}`` from a config entry."""
    if not isinstance(spec, dict):
        spec = {"const": spec}
    if "const" in spec:
        return Constant(group, group.element(spec["const"]))
    if "angles" in spec:
        if not isinstance(group, MatrixGroup) or group.dim != 2:
            raise ValueError("angles need the 2x2 matrix group")
        angles = tuple(float(a) for a in spec["angles"])
        if len(angles) != p:
            raise ShapeMismatch(f"need {p} angles for a {p}-simplex")
        return RotationAffine(group, angles)
    if "affine" in spec:
        mats = tuple(group.element(m) for m in spec["affine"])
        if len(mats) != p:
            raise ShapeMismatch(f"need {p} matrices for a {p}-simplex")
        return MatrixAffine(group, mats)
    raise ValueError(f"unrecognized transition spec {spec!r}")


def fn_to_json(group, fn):
    if isinstance(fn, Constant):
        return {"const": group.to_json(fn.value)}
    if isinstance(fn, RotationAffine):
        return {"angles": list(fn.angles)}
    if isinstance(fn, MatrixAffine):
        return {"affine": [group.to_json(m) for m in fn.mats]}
    raise ValueError("only constant and affine evaluators serialize")


# -- transition sets ----------------------------------------------------------------------------

class TransitionSet:
    """Compatible transition functions ``v_sigma`` on the generators of ``S``."""

    def __init__(self, S: SimplicialSet, group, values: dict):
        self.S = S
        self.group = group
        self.values = {tuple(g): fn for g, fn in values.items()}

    def _identity(self):
        return Constant(self.group, self.group.identity())

    def require_all(self):
        missing = [g for g in self.S.all_generators() if g[0] >= 1 and g not in self.values]
        if missing:
            raise MissingEntry(f"no transition function for generators {missing[:5]}")

    def v(self, x: NormalForm) -> TransitionFn:
        """``v_x`` on ``Delta^{dim x - 1}``; degenerate ``x`` via ``v_{s_j y} = v_y o eta^j``.

        ``v_{s_j y}`` is the identity when ``j = dim y`` (the new vertex is last).
        """
        if x.dim < 1:
            raise IndexOutOfRange("v is defined on simplices of dimension >= 1")
        if not x.degens:
            try:
                return self.values[x.gen]
            except KeyError:
                raise MissingEntry(f"no transition function for generator {x.gen}") from None
        j, y = x.degens[0], NormalForm(x.degens[1:], x.gen)
        if j == y.dim:
            return self._identity()
        return Precompose(self.v(y), eta(j))

    def edge(self, x: NormalForm, i: int) -> TransitionFn:
        """``v_{x, d_i x}`` on ``Delta^{dim x - 1}``.

        Nondegenerate ``x``: ``v_x`` for the last face, identity otherwise.
        Degenerate ``x = s_j y`` follows the case table for degenerate simplices.
        """
        p = x.dim
        if not 0 <= i <= p:
            raise IndexOutOfRange(f"face {i} of a {p}-simplex")
        if not x.degens:
            return self.v(x) if i == p else self._identity()
        j, y = x.degens[0], NormalForm(x.degens[1:], x.gen)
        if i < j:
            return Precompose(self.edge(y, i), eta(j - 1))
        if i in (j, j + 1):
            return self._identity()
        return Precompose(self.edge(y, i - 1), eta(j))

    def edge_via_eta(self, x: NormalForm, i: int) -> TransitionFn:
        """Same value computed only from ``v_x``; used to cross-check :meth:`edge`."""
        return self.v(x) if i == x.dim else self._identity()

    def transition(self, x: NormalForm, deleted) -> TransitionFn:
        """``v_{x, tau}`` for ``tau`` = ``x`` with the vertices at ``deleted`` removed.

        Chains single faces highest-first with the cocycle rule
        ``v_{x,tau} = (v_{x,gamma} o eps) . v_{gamma,tau}``.
        """
        deleted = sorted(set(deleted))
        if not deleted:
            raise UnsupportedFaceSpec("tau must be a proper face")
        if deleted[0] < 0 or deleted[-1] > x.dim or len(deleted) > x.dim:
            raise UnsupportedFaceSpec(f"cannot delete {deleted} from a {x.dim}-simplex")
        k, rest = deleted[-1], deleted[:-1]
        first = self.edge(x, k)
        if not rest:
            return first
        second = self.transition(self.S.face(x, k), rest)
        if isinstance(first, Constant):
            if self.group.equal(first.value, self.group.identity()):
                return second
            head = first
        else:
            head = Precompose(first, insert_zeros(rest))
        if isinstance(second, Constant):
            if self.group.equal(second.value, self.group.identity()):
                return head
            if isinstance(head, Constant):
                return Constant(self.group, self.group.multiply(head.value, second.value))
        return Product(self.group, (head, second))

    def to_json(self) -> dict:
        return {"group": self.group.spec(),
                "values": {f"{g[0]}:{g[1]}": fn_to_json(self.group, fn)
                           for g, fn in sorted(self.values.items())}}


def face_spec_to_deleted(p: int, spec) -> list:
    """Deleted vertex positions for a face spec of a ``p``-simplex.

    ``spec`` is an integer ``i`` (``tau = d_i ... d_p sigma``), a list of
    letters ``("d", k)`` read right to left, or ``{"delete": [...]}``.
    """
    if isinstance(spec, int):
        if not 1 <= spec <= p:
            raise UnsupportedFaceSpec(f"iterated last face index {spec} outside 1..{p}")
        return list(range(spec, p + 1))
    if isinstance(spec, dict) and "delete" in spec:
        return sorted(set(int(k) for k in spec["delete"]))
    try:
        letters = [(str(kind), int(k)) for kind, k in spec]
    except (TypeError, ValueError):
        raise UnsupportedFaceSpec(f"unrecognized face spec {spec!r}") from None
    alive = list(range(p + 1))
    for kind, k in reversed(letters):
        if kind != "d" or not 0 <= k < len(alive) or len(alive) == 1:
            raise UnsupportedFaceSpec(f"letter {kind}_{k} not applicable")
        del alive[k]
    return [k for k in range(p + 1) if k not in alive]


def extend_to_faces(T: TransitionSet, sigma, spec) -> TransitionFn:
    """``v_{sigma, tau}`` for a face ``tau`` of ``sigma`` given by ``spec``."""
    if isinstance(sigma, tuple):
        sigma = NormalForm((), sigma)
    return T.transition(sigma, face_spec_to_deleted(sigma.dim, spec))


def iterated_last_product(T: TransitionSet, sigma: NormalForm, i: int) -> TransitionFn:
    """The displayed product for ``tau = d_i ... d_p sigma``, written out directly.

    ``(v_sigma o (eps^i)^{p-i}) . (v_{d~1 sigma} o (eps^i)^{p-i-1}) ... v_{d~{p-i} sigma}``
    where ``d~k sigma`` keeps the first ``p - k + 1`` vertices.
    """
    p = sigma.dim
    if not 1 <= i <= p:
        raise UnsupportedFaceSpec(f"iterated last face index {i} outside 1..{p}")
    factors = []
    for k in range(p - i + 1):
        front = T.S.keep(sigma, range(p - k + 1))
        pad = p - i - k

        def phi(t, pad=pad):
            return tuple(t) + (0.0,) * pad

        factors.append(Precompose(T.v(front), phi))
    return Product(T.group, tuple(factors))


# -- checks -------------------------------------------------------------------------------------

class _Tally:
    def __init__(self, group):
        self.group = group
        self.checked = 0
        self.max_discrepancy = 0.0
        self.violations = []

    def compare(self, a, b, where):
        self.checked += 1
        d = self.group.distance(a, b)
        self.max_discrepancy = max(self.max_discrepancy, d)
        if not self.group.equal(a, b):
            self.violations.append(dict(where, lhs=self.group.to_json(a),
                                        rhs=self.group.to_json(b), discrepancy=d))

    def report(self, **extra):
        out = {"ok": not self.violations, "checked": self.checked,
               "max_discrepancy": self.max_discrepancy,
               "violations": self.violations[:50], "violation_count": len(self.violations)}
        out.update(extra)
        return out


def _gen_key(S, g):
    return {"generator": [g[0], g[1]], "label": S.label(g)}


def check_compatibility(T: TransitionSet, samples: int = 25, seed: int = 0) -> dict:
    """Check ``v_sigma o eps^i`` against faces, and the degeneracy rule.

    For ``sigma`` of dimension ``p >= 2``: ``v_{d_i sigma}`` when ``i < p-1`` and
    ``v_{d_{p-1} sigma} . v_{d_p sigma}^{-1}`` when ``i = p-1``.
    """
    T.require_all()
    S, G = T.S, T.group
    rng = SplitMix64(seed)
    tally = _Tally(G)
    for g in S.all_generators():
        p = g[0]
        if p < 2:
            continue
        x = NormalForm((), g)
        pts = sample_points(p - 2, samples, rng)
        for i in range(p):
            lhs = Precompose(T.v(x), eps(i))
            if i < p - 1:
                rhs = T.v(S.face(x, i))
            else:
                rhs = Product(G, (T.v(S.face(x, p - 1)), Inverse(G, T.v(S.face(x, p)))))
            for t in pts:
                tally.compare(lhs(t), rhs(t), dict(_gen_key(S, g), face=i, point=list(t)))
    # degenerate simplices: case table against the eta rule
    for g in S.all_generators():
        if g[0] + 1 > S.D:
            continue
        x = NormalForm((), g)
        for j in range(g[0] + 1):
            y = S.degeneracy(x, j)
            pts = sample_points(y.dim - 1, min(samples, 5), rng)
            for i in range(y.dim + 1):
                a, b = T.edge(y, i), T.edge_via_eta(y, i)
                for t in pts:
                    tally.compare(a(t), b(t), dict(_gen_key(S, g), degeneracy=j, face=i,
                                                   point=list(t)))
    return tally.report(check="compatibility")


def check_cocycle(T: TransitionSet, samples: int = 25, seed: int = 0) -> dict:
    """``v_{sigma,tau} = (v_{sigma,gamma} o eps^i) . v_{gamma,tau}`` for ``gamma = d_j sigma``, ``tau = d_i gamma``."""
    T.require_all()
    S, G = T.S, T.group
    rng = SplitMix64(seed)
    tally = _Tally(G)
    for g in S.all_generators():
        p = g[0]
        if p < 2:
            continue
        x = NormalForm((), g)
        pts = sample_points(p - 2, samples, rng)
        for j in range(p + 1):
            gamma = S.face(x, j)
            for i in range(p):
                deleted = [j, i if i < j else i + 1]
                lhs = T.transition(x, deleted)
                rhs = Product(G, (Precompose(T.edge(x, j), eps(i)), T.edge(gamma, i)))
                for t in pts:
                    tally.compare(lhs(t), rhs(t), dict(_gen_key(S, g), j=j, i=i, point=list(t)))
    return tally.report(check="cocycle")


# -- Phillips-Stone parallel transport ----------------------------------------------------------

def pl_path(r: int, s: Sequence[float]):
    """Points ``P_1..P_{r-1}`` (barycentric on the r-simplex) and ``t``.

    ``P_k = (1 - s_k) P_{k-1} + s_k a_k`` with ``P_0 = a_0``; ``t`` is ``P_{r-1}``
    in the coordinates of the face ``<a_0..a_{r-1}>``.
    """
    s = tuple(float(v) for v in s)
    if len(s) != max(r - 1, 0):
        raise ShapeMismatch(f"an {r}-simplex needs {r - 1} cube coordinates")
    if any(v < 0 or v > 1 for v in s):
        raise ValueError("cube coordinates must lie in [0, 1]")
    P = [1.0] + [0.0] * r
    points = []
    for k in range(1, r):
        sk = s[k - 1]
        P = [(1 - sk) * v for v in P]
        P[k] += sk
        points.append(tuple(P))
    return points, tuple(P[:r])


def _fronts(T, sigma, r, s):
    """``[(v_{<a_0..a_k>}, t_{k-1})]`` for ``k = 1..r``."""
    points, _ = pl_path(r, s)
    path = [tuple([1.0] + [0.0] * r)] + points
    out = []
    for k in range(1, r + 1):
        front = T.S.keep(sigma, range(k + 1))
        out.append((T.v(front), path[k - 1][:k]))
    return out


def transport_V(T: TransitionSet, sigma, s: Sequence[float]):
    """Parallel transport along the PL path through ``sigma``.

    ``V_sigma(s) = (v_sigma(t_{r-1}) . v_{<a_0..a_{r-1}>}(t_{r-2}) ... v_{<a_0 a_1>}(t_0))^{-1}``
    where ``t_k`` are the coordinates of ``P_k`` in ``<a_0..a_k>``.
    """
    if isinstance(sigma, tuple):
        sigma = NormalForm((), sigma)
    r = sigma.dim
    if r < 1:
        raise IndexOutOfRange("transport needs a simplex of dimension >= 1")
    G = T.group
    out = G.identity()
    for fn, t in reversed(_fronts(T, sigma, r, s)):
        out = G.multiply(out, fn(t))
    return G.inverse(out)


def transport_literal(T: TransitionSet, sigma, s: Sequence[float]):
    """``v_sigma(t)`` with ``t`` the path's last interior point, without the lower factors."""
    if isinstance(sigma, tuple):
        sigma = NormalForm((), sigma)
    _, t = pl_path(sigma.dim, s)
    return T.v(sigma)(t)


def check_transport(T: TransitionSet, samples: int = 25, seed: int = 0, V=None) -> dict:
    """Both cube-boundary conditions of a parallel transport function.

    At ``s_p = 1``: ``V_sigma = V_{<a_0..a_p>} . V_{<a_p..a_r>}``.
    At ``s_p = 0``: ``V_sigma = V_{sigma without a_p}``.
    """
    V = V or transport_V
    S, G = T.S, T.group
    rng = SplitMix64(seed)
    tally = _Tally(G)
    for g in S.all_generators():
        r = g[0]
        if r < 2:
            continue
        x = NormalForm((), g)
        for p in range(1, r):
            for _ in range(samples):
                s = [rng.random() for _ in range(r - 1)]
                for edge_value in (1.0, 0.0):
                    s[p - 1] = edge_value
                    lhs = V(T, x, s)
                    if edge_value == 1.0:
                        front = S.keep(x, range(p + 1))
                        back = S.keep(x, range(p, r + 1))
                        rhs = G.multiply(V(T, front, s[:p - 1]), V(T, back, s[p:]))
                        cond = 1
                    else:
                        rest = S.delete(x, [p])
                        rhs = V(T, rest, s[:p - 1] + s[p:])
                        cond = 2
                    tally.compare(lhs, rhs, dict(_gen_key(S, g), condition=cond, p=p,
                                                 s=list(s)))
    return tally.report(check="transport")


# -- gauge normalization -------------------------------------------------------------------------

def normalize_gauge(S: SimplicialSet, group, family: dict) -> TransitionSet:
    """Re-trivialize a full family ``{(g, i): v_{g, d_i g}}`` so that faces ``i < p`` carry 1.

    Works up the skeleta, generators in index order.  ``h_sigma`` on
    ``Delta^p`` is fixed on the faces ``i < p`` by
    ``h_sigma o eps^i = h_{d_i sigma} . v_{sigma, d_i sigma}^{-1}`` and extended
    by the retraction that subtracts ``min(t_0..t_{p-1})`` from those
    coordinates.  The result is ``v'_sigma = (h_sigma o eps^p) . v_{sigma, d_p sigma} . h_{d_p sigma}^{-1}``.
    The input must satisfy the cocycle condition for the faces to agree.
    """
    h = {}

    def h_of(x: NormalForm):
        if x.dim == 0 and not x.degens:
            return Constant(group, group.identity())
        if x.degens:
            j, y = x.degens[0], NormalForm(x.degens[1:], x.gen)
            return Precompose(h_of(y), eta(j))
        return h[x.gen]

    def make_h(x: NormalForm):
        p = x.dim
        faces = [(h_of(S.face(x, i)), family[(x.gen, i)]) for i in range(p)]

        def fn(t):
            m = min(t[:p])
            u = [v - m for v in t[:p]] + [t[p] + p * m]
            i = min(range(p), key=lambda k: (u[k], k))
            u = tuple(u[:i] + u[i + 1:])
            hf, vf = faces[i]
            return group.multiply(hf(u), group.inverse(vf(u)))

        class _H(TransitionFn):
            def __call__(self, t):
                return fn(tuple(t))

        return _H()

    values = {}
    for n in range(1, S.top_dim + 1):
        for g in S.generators(n):
            x = NormalForm((), g)
            h[g] = make_h(x)
            values[g] = Product(group, (Precompose(h[g], eps(n)), family[(g, n)],
                                        Inverse(group, h_of(S.face(x, n)))))
    return TransitionSet(S, group, values)


# -- configs and shipped fixtures -----------------------------------------------------------------

def transition_set_from_json(S: SimplicialSet, doc: dict) -> TransitionSet:
    """``{"group": {...}, "values": {key: spec}}``; keys are ``"dim:index"`` or labels."""
    group = group_from_json(doc["group"])
    by_label = {S.label(g): g for g in S.all_generators()}
    values = {}
    for key, spec in doc.get("values", {}).items():
        if key in by_label:
            g = by_label[key]
        else:
            try:
                d, k = (int(v) for v in key.split(":"))
                g = (d, k)
            except ValueError:
                raise MissingEntry(f"unknown generator key {key!r}") from None
            if g not in S.all_generators():
                raise MissingEntry(f"unknown generator key {key!r}")
        if g[0] < 1:
            raise ShapeMismatch(f"{key!r}: vertices carry no transition function")
        values[g] = fn_from_json(group, spec, g[0])
    return TransitionSet(S, group, values)


def identity_set(S: SimplicialSet, group) -> TransitionSet:
    e = Constant(group, group.identity())
    return TransitionSet(S, group, {g: e for g in S.all_generators() if g[0] >= 1})


def potential_config(S: SimplicialSet, group_spec: dict, potential: dict) -> dict:
    """Flat constant data from vertex values ``g``: ``v_{xy} = g_y g_x^{-1}``.

    Higher simplices carry the value of their last edge, which is what the
    compatibility conditions force for constant data.
    """
    group = group_from_json(group_spec)
    g = {v: group.element(val) for v, val in potential.items()}
    values = {}
    for gen in S.all_generators():
        if gen[0] < 1:
            continue
        t = S.simplex_tuples[gen]
        x, y = t[-2], t[-1]
        val = group.multiply(g[y], group.inverse(g[x]))
        values[S.label(gen)] = {"const": group.to_json(val)}
    return {"group": group_spec, "values": values}


def edge_angle_config(S: SimplicialSet, angles: dict) -> dict:
    """SO(2) data from edge angles ``e_{xy}``; compatible for any choice.

    On ``<a_0..a_p>`` the rotation angle is affine with coefficients
    ``e_{a_k a_p} - e_{a_k a_{p-1}}`` (``k < p-1``) and ``e_{a_{p-1} a_p}``.
    It is constant (flat) exactly when all coefficients agree.
    """
    values = {}
    for gen in S.all_generators():
        if gen[0] < 1:
            continue
        t = S.simplex_tuples[gen]
        p = len(t) - 1
        coeffs = [angles[(t[k], t[p])] - angles[(t[k], t[p - 1])] for k in range(p - 1)]
        coeffs.append(angles[(t[p - 1], t[p])])
        values[S.label(gen)] = {"angles": coeffs}
    return {"group": {"kind": "matrix", "dim": 2}, "values": values}


def _build_fixtures():
    from .fixtures import fixture

    tet = fixture("tetrahedron")
    pot_z5 = {0: 0, 1: 1, 2: 4, 3: 2}
    pot_s3 = {0: [0, 1, 2], 1: [1, 0, 2], 2: [1, 2, 0], 3: [0, 2, 1]}
    # e_xy = phi_y - phi_x is flat; bumping e_02 and e_13 gives compatible non-flat data
    phi = {0: 0.0, 1: 0.3, 2: 0.8, 3: 1.7}
    flat = {(x, y): phi[y] - phi[x] for x in range(4) for y in range(x + 1, 4)}
    bent = dict(flat)
    bent[(0, 2)] += 0.4
    bent[(1, 3)] -= 0.25
    out = {
        "z5": {"fixture": "triangle", "group": {"kind": "zmod", "m": 5},
               "values": {"a0,a1": {"const": 1}, "a0,a2": {"const": 3},
                          "a1,a2": {"const": 2}, "a0,a1,a2": {"const": 2}}},
        "z5_tetra": potential_config(tet, {"kind": "zmod", "m": 5}, pot_z5),
        "s3_tetra": potential_config(tet, {"kind": "perm", "n": 3}, pot_s3),
        "so2_tetra": edge_angle_config(tet, flat),
        "so2_bent_tetra": edge_angle_config(tet, bent),
    }
    for name in ("z5_tetra", "s3_tetra", "so2_tetra", "so2_bent_tetra"):
        out[name]["fixture"] = "tetrahedron"
    return out


GAUGE_FIXTURES = _build_fixtures()
# the three configs used for the gauge and classifying-map acceptance checks
ACCEPTANCE_GAUGES = ("z5_tetra", "s3_tetra", "so2_tetra")


def gauge_fixture(name: str, D: int | None = None):
    """``(S, T)`` for a shipped gauge config."""
    from .fixtures import fixture

    try:
        doc = GAUGE_FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown gauge fixture {name!r}; choose from {', '.join(GAUGE_FIXTURES)}") from None
    S = fixture(doc["fixture"], D)
    return S, transition_set_from_json(S, doc)
