"""Pointwise evaluation of the classifying map on the star prismatic set.

For a Pbar cell ``gamma`` of multidegree ``(p; q)`` and a point ``(t, s)`` of
``Delta^p x Delta^{q_0} x ... x Delta^{q_p}`` the map returns a tuple
``(a_0, ..., a_p)`` of group elements with ``a_p = 1`` and

    a_i = v_{gamma, tau_i}(rho^(i+1) lambda(t)(s))^{-1},

where ``tau_i`` keeps blocks ``0..i`` of ``gamma``.  Tuples are compared
modulo a common translation (the quotient defining the classifying space).

Points use interior coordinates ``1 >= t_1 >= ... >= t_p >= 0`` where noted;
``t_k = t'_k + ... + t'_p`` in terms of barycentric ``t'``.
"""
from __future__ import annotations

import math
from functools import lru_cache

from .errors import IndexOutOfRange, InvalidPoint, ShapeMismatch
from .gauge import SplitMix64, extend_to_faces
from .prismatic import MultiDegree, PrismCell, prism_operator
from .simplicial import check_bary, eval_coord_map

TOL = 1e-12
DUAL_TOL = 1e-12


def to_interior(t) -> tuple:
    """Barycentric ``(t'_0..t'_p)`` to interior ``(t_1..t_p)``."""
    t = check_bary(t)
    return tuple(math.fsum(t[k:]) for k in range(1, len(t)))


def from_interior(u) -> tuple:
    u = tuple(float(v) for v in u)
    check_interior(u)
    full = (1.0,) + u + (0.0,)
    return tuple(full[k] - full[k + 1] for k in range(len(u) + 1))


def check_interior(u, tol: float = TOL) -> tuple:
    prev = 1.0
    for v in u:
        if v > prev + tol or v < -tol:
            raise InvalidPoint(f"{u} is not of the form 1 >= t_1 >= ... >= t_p >= 0")
        prev = v
    return tuple(u)


def _deg(deg):
    return deg if isinstance(deg, MultiDegree) else MultiDegree(*deg)


def lambda_bar(deg, t, s) -> tuple:
    """Barycentric point of ``Delta^{q+2p+1}`` from the interior-coordinate formula.

    ``t`` holds interior coordinates ``(t_1..t_p)``; ``s[i]`` holds interior
    coordinates ``(s^i_1..s^i_{q_i})``.  Block ``i < p`` contributes
    ``s^i_k (t_i - t_{i+1}) + t_{i+1}`` for each ``k`` followed by ``t_{i+1}``
    twice (``t_0 = 1``); the last block contributes ``s^p_k t_p`` then ``0``.
    """
    deg = _deg(deg)
    t = check_interior(tuple(t))
    if len(t) != deg.p or len(s) != deg.p + 1:
        raise ShapeMismatch("point does not match the multidegree")
    tt = (1.0,) + t
    u = []
    for i, qi in enumerate(deg.q):
        si = check_interior(tuple(s[i]))
        if len(si) != qi:
            raise ShapeMismatch(f"fiber point {i} needs {qi} interior coordinates")
        if i < deg.p:
            u.extend(v * (tt[i] - tt[i + 1]) + tt[i + 1] for v in si)
            u.extend([tt[i + 1], tt[i + 1]])
        else:
            u.extend(v * tt[i] for v in si)
            u.append(0.0)
    full = [1.0] + u + [0.0]
    return tuple(full[k] - full[k + 1] for k in range(len(full) - 1))


def lambda_bar_blocks(deg, t_bary, s_bary) -> tuple:
    """Same point assembled blockwise: ``(t'_0 s^0, 0, ..., t'_p s^p, 0)``.

    Independent of :func:`lambda_bar`; used as the second path of the oracle.
    """
    deg = _deg(deg)
    t_bary = check_bary(t_bary)
    out = []
    for ti, si, qi in zip(t_bary, s_bary, deg.q):
        si = check_bary(si)
        if len(si) != qi + 1:
            raise ShapeMismatch("fiber point does not match the multidegree")
        out.extend(ti * v for v in si)
        out.append(0.0)
    return tuple(out)


def rho_start(i: int, deg) -> int:
    deg = _deg(deg)
    return sum(deg.q[:i]) + 2 * i - 1


def rho_eval(i: int, deg, u) -> tuple:
    """``rho^(i)``: keep coordinates before ``a = Q_i + 2i - 1`` and put the rest at ``a``."""
    deg = _deg(deg)
    if not 1 <= i <= deg.p:
        raise IndexOutOfRange(f"rho^({i}) needs 1 <= i <= {deg.p}")
    u = tuple(u)
    if len(u) != sum(deg.q) + 2 * deg.p + 2:
        raise ShapeMismatch("point does not match the multidegree")
    a = rho_start(i, deg)
    return u[:a] + (math.fsum(u[a:]),)


def rho_eval_composite(i: int, deg, u) -> tuple:
    """``rho^(i)`` as the composite ``eta^a o ... o eta^{q+2p}`` of coordinate maps."""
    deg = _deg(deg)
    if not 1 <= i <= deg.p:
        raise IndexOutOfRange(f"rho^({i}) needs 1 <= i <= {deg.p}")
    u = tuple(u)
    for j in range(sum(deg.q) + 2 * deg.p, rho_start(i, deg) - 1, -1):
        u = eval_coord_map("degeneracy", j, u)
    return u


def kept_face_start(i: int, deg) -> int:
    """First deleted position of ``tau_i`` (blocks ``i+1..p`` removed)."""
    deg = _deg(deg)
    return sum(deg.q[:i + 1]) + 2 * i + 2


def face_functions(T, gamma: PrismCell) -> list:
    """``v_{gamma, tau_i}`` for ``i < p``; reusable across sample points."""
    if gamma.construction != "Pbar":
        raise ShapeMismatch("classify_cell takes a Pbar cell")
    return [extend_to_faces(T, gamma.payload, kept_face_start(i, gamma.deg))
            for i in range(gamma.p)]


def classify_cell(T, gamma: PrismCell, t, s, check: bool = True, fns=None) -> tuple:
    """``(a_0, ..., a_p)`` at the point with interior coordinates ``t`` and ``s``."""
    if fns is None:
        fns = face_functions(T, gamma)
    deg = gamma.deg
    G = T.group
    u = lambda_bar(deg, t, s)
    out = []
    for i, fn in enumerate(fns):
        out.append(G.inverse(fn(rho_eval(i + 1, deg, u))))
    out.append(G.identity())
    if check and not G.equal(out[-1], G.identity()):
        raise AssertionError("a_p must be the identity")
    return tuple(out)


# -- sampling ---------------------------------------------------------------------------------

def random_interior(n: int, rng: SplitMix64) -> tuple:
    return to_interior(rng.simplex_point(n)) if n > 0 else ()


def interior_grid(n: int) -> list:
    """Monotone interior points with coordinates in {0, 1/2, 1}."""
    pts = [()]
    for _ in range(n):
        pts = [p + (v,) for p in pts for v in (1.0, 0.5, 0.0) if not p or v <= p[-1]]
    return pts


def _face_point(i: int, p: int, t_face_bary) -> tuple:
    """Interior coordinates of ``eps^i`` applied to a point of ``Delta^{p-1}``."""
    return to_interior(eval_coord_map("face", i, t_face_bary))


def _discrepancy(G, a, b, side):
    """Largest deviation from ``a_j = b_j g`` (right) or ``a_j = g b_j`` (left)."""
    if side == "right":
        g = G.multiply(G.inverse(b[-1]), a[-1])
        return max(G.distance(x, G.multiply(y, g)) for x, y in zip(a, b))
    g = G.multiply(a[-1], G.inverse(b[-1]))
    return max(G.distance(x, G.multiply(g, y)) for x, y in zip(a, b))


@lru_cache(maxsize=4096)
def _dual_path_gap(deg, t, s) -> float:
    """Disagreement of the two lambda and rho evaluations at one point.

    Depends only on the multidegree and the point, which repeat across cells.
    """
    u = lambda_bar(deg, t, s)
    w = lambda_bar_blocks(deg, from_interior(t), [from_interior(v) for v in s])
    gap = max(abs(x - y) for x, y in zip(u, w))
    for i in range(1, deg.p + 1):
        r1, r2 = rho_eval(i, deg, u), rho_eval_composite(i, deg, w)
        gap = max(gap, max(abs(x - y) for x, y in zip(r1, r2)))
    return gap


def _tolerance(G):
    return 0.0 if G.exact else G.tol


def check_m_compatibility(T, gamma: PrismCell, i: int, samples: int = 25, seed: int = 0) -> dict:
    """Compare ``m(d_(i) gamma)`` with ``m(gamma)`` restricted to the ``i``-th base face.

    The restriction drops ``a_i``; the two tuples must agree up to one common
    translation (right translation is the convention, left is reported too).
    Also checks that, on the face, no component depends on ``s^i``.
    """
    p = gamma.p
    if not 0 <= i <= p or p < 1:
        raise IndexOutOfRange(f"base face {i} of a cell with p = {p}")
    G = T.group
    face = prism_operator(gamma, "base_face", i)
    deg = gamma.deg
    fns, face_fns = face_functions(T, gamma), face_functions(T, face)
    rng = SplitMix64(seed)
    pts = [from_interior(v) for v in interior_grid(p - 1)]
    pts += [rng.simplex_point(p - 1) for _ in range(samples)]
    holds = {"right": True, "left": True}
    worst = {"right": 0.0, "left": 0.0}
    independent = True
    a_p_identity = True
    dual = 0.0
    checked = 0
    for tf in pts:
        t = _face_point(i, p, tf)
        s_face = [random_interior(qj, rng) for j, qj in enumerate(gamma.q) if j != i]
        s_full = list(s_face)
        s_full.insert(i, random_interior(gamma.q[i], rng))
        a = classify_cell(T, gamma, t, s_full, check=False, fns=fns)
        b = classify_cell(T, face, to_interior(tf) if p > 1 else (), s_face, check=False,
                          fns=face_fns)
        a_p_identity &= G.equal(a[-1], G.identity()) and G.equal(b[-1], G.identity())
        dual = max(dual, _dual_path_gap(deg, t, tuple(s_full)))
        a_restr = a[:i] + a[i + 1:]
        for side in holds:
            d = _discrepancy(G, a_restr, b, side)
            worst[side] = max(worst[side], d)
            if d > _tolerance(G):
                holds[side] = False
        # vary s^i with everything else fixed
        s_alt = list(s_full)
        s_alt[i] = random_interior(gamma.q[i], rng)
        a_alt = classify_cell(T, gamma, t, s_alt, fns=fns)
        if not all(G.equal(x, y) for j, (x, y) in enumerate(zip(a, a_alt)) if j != i):
            independent = False
        checked += 1
    return {"ok": holds["right"] and independent and a_p_identity and dual <= DUAL_TOL,
            "right_translation": holds["right"], "a_p_identity": a_p_identity,
            "dual_path_discrepancy": dual,
            "left_translation": holds["left"], "independent_of_s_i": independent,
            "max_discrepancy": worst["right"], "max_discrepancy_left": worst["left"],
            "checked": checked, "face": i}
