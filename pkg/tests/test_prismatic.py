import itertools
import random

import pytest

from prismatica.errors import IndexOutOfRange, InternalInvariantBroken, ShapeMismatch
from prismatica.fixtures import fixture
from prismatica.prismatic import (
    MultiDegree,
    PrismCell,
    SimplicialMap,
    aw_map,
    block_positions,
    comparison_map,
    inclusion_i,
    lambda_eval,
    make_cell,
    map_f,
    operator_indices,
    pf_map_lambda_check,
    prism_cells,
    prism_operator,
    retraction_r,
)
from prismatica.simplicial import NormalForm


def _degrees(max_p, max_q):
    for p in range(max_p + 1):
        for q in itertools.product(range(max_q + 1), repeat=p + 1):
            yield MultiDegree(p, q)


def _blocks(construction, S, cell):
    """Oracle view of a K^s payload: the vertex tuple cut into blocks."""
    t = S.to_tuple(cell.payload)
    width = 1 if construction == "P" else 2
    out, k = [], 0
    for qi in cell.q:
        out.append(t[k:k + qi + width])
        k += qi + width
    assert k == len(t)
    return out


def _oracle(construction, blocks, kind, i, j=None):
    blocks = [list(b) for b in blocks]
    if kind == "fiber_face":
        del blocks[i][j]
    elif kind == "fiber_degeneracy":
        blocks[i].insert(j, blocks[i][j])
    else:
        del blocks[i]
    return [tuple(b) for b in blocks]


def _operators(cell):
    for i, qi in enumerate(cell.q):
        if qi >= 1:
            for j in range(qi + 1):
                yield ("fiber_face", i, j)
        for j in range(qi + 1):
            yield ("fiber_degeneracy", i, j)
        if cell.p >= 1:
            yield ("base_face", i, None)


def test_cell_counts():
    S = fixture("circle", 5)
    assert len(prism_cells(S, "P", (1, (0, 0)))) == 6
    assert prism_cells(S, "P", (0, (2,))) == [PrismCell("P", 0, (2,), x, S) for x in S.simplices(2)]
    assert len(prism_cells(S, "Pbar", (0, (0,)))) == 6


def test_operator_index_examples():
    assert operator_indices("Pbar", (0, 0), "fiber_face", 1, 0) == (("d", 2),)
    assert operator_indices("Pbar", (0, 0), "base_face", 1) == (("d", 2), ("d", 3))
    assert operator_indices("P", (2, 1), "fiber_face", 1, 0) == (("d", 3),)
    assert operator_indices("Pf", (0, 0), "fiber_face", 0, 0) == (("d", 0),)


def test_fiber_face_needs_a_positive_block():
    S = fixture("triangle", 5)
    cell = prism_cells(S, "Pbar", (1, (0, 0)))[0]
    with pytest.raises(IndexOutOfRange):
        prism_operator(cell, "fiber_face", 1, 0)
    with pytest.raises(IndexOutOfRange):
        prism_operator(cell, "base_face", 2)


@pytest.mark.parametrize("construction", ["P", "Pbar"])
def test_operators_match_block_oracle(construction):
    S = fixture("triangle", 9)
    for deg in _degrees(2, 1):
        for cell in prism_cells(S, construction, deg):
            blocks = _blocks(construction, S, cell)
            for kind, i, j in _operators(cell):
                if kind == "fiber_degeneracy" and cell.payload.dim + 1 > S.D:
                    continue
                out = prism_operator(cell, kind, i, j)
                assert _blocks(construction, S, out) == _oracle(construction, blocks, kind, i, j)


@pytest.mark.parametrize("construction", ["P", "Pbar"])
def test_prismatic_identities(construction):
    S = fixture("circle", 9)
    op = prism_operator
    for deg in _degrees(2, 2 if construction == "P" else 1):
        for c in prism_cells(S, construction, deg)[::5]:
            q, p = c.q, c.p
            # Delta-set identity for base faces
            for i in range(p + 1 if p >= 2 else 0):
                for j in range(i + 1, p + 1):
                    assert op(op(c, "base_face", j), "base_face", i) == \
                        op(op(c, "base_face", i), "base_face", j - 1)
            for b in range(p + 1):
                # simplicial identities inside one block
                for j in range(q[b] + 1):
                    for k in range(j + 1, q[b] + 1):
                        if q[b] >= 2:
                            assert op(op(c, "fiber_face", b, k), "fiber_face", b, j) == \
                                op(op(c, "fiber_face", b, j), "fiber_face", b, k - 1)
                    if c.payload.dim + 1 <= S.D:
                        s = op(c, "fiber_degeneracy", b, j)
                        assert op(s, "fiber_face", b, j) == c
                        assert op(s, "fiber_face", b, j + 1) == c
                # base faces commute with fiber faces of other blocks
                for i in range(p + 1):
                    if i == b or q[b] == 0 or p == 0:
                        continue
                    nb = b if b < i else b - 1
                    for j in range(q[b] + 1):
                        assert op(op(c, "fiber_face", b, j), "base_face", i) == \
                            op(op(c, "base_face", i), "fiber_face", nb, j)
                # fiber faces of different blocks commute
                for b2 in range(b + 1, p + 1):
                    if q[b] and q[b2]:
                        assert op(op(c, "fiber_face", b, 0), "fiber_face", b2, 0) == \
                            op(op(c, "fiber_face", b2, 0), "fiber_face", b, 0)


def test_lambda_examples():
    S = fixture("circle", 3)
    cell = prism_cells(S, "P", (1, (0, 0)))[0]
    target, simplex = lambda_eval(cell, (0.3, 0.7), [(1.0,), (1.0,)])
    assert target == pytest.approx((0.3, 0.7)) and simplex == cell.payload
    cell = prism_cells(S, "P", (1, (1, 1)))[0]
    target, _ = lambda_eval(cell, (0.0, 1.0), [(0.5, 0.5), (0.25, 0.75)])
    assert target == pytest.approx((0, 0, 0.25, 0.75))
    with pytest.raises(ShapeMismatch):
        lambda_eval(cell, (0.5, 0.5), [(1.0,), (1.0,)])


def test_lambda_base_face_compatibility():
    S = fixture("triangle", 6)
    rng = random.Random(4)
    for deg in _degrees(2, 1):
        if deg.p == 0:
            continue
        for c in prism_cells(S, "P", deg)[::11]:
            for i in range(deg.p + 1):
                w = [rng.random() for _ in range(deg.p)]
                tf = tuple(x / sum(w) for x in w)
                t = tf[:i] + (0.0,) + tf[i:]
                s = []
                for qi in deg.q:
                    v = [rng.random() for _ in range(qi + 1)]
                    s.append(tuple(x / sum(v) for x in v))
                big, x = lambda_eval(c, t, s)
                face = prism_operator(c, "base_face", i)
                small, y = lambda_eval(face, tf, s[:i] + s[i + 1:])
                pos = list(block_positions("P", deg.q, i))
                assert S.delete(x, pos) == y
                assert [v for k, v in enumerate(big) if k not in pos] == pytest.approx(list(small))
                assert all(big[k] == 0 for k in pos)


def test_comparison_map_examples():
    S = fixture("triangle", 7)
    cell = prism_cells(S, "Pbar", (1, (0, 0)))[-1]
    f = map_f(cell)
    assert f.construction == "P" and f.q == (0, 0)
    assert f.payload == S.apply([("d", 1), ("d", 3)], cell.payload)
    v = NormalForm((), (0, 0))
    assert inclusion_i(S, v).payload == S.degeneracy(v, 0)
    for n in range(3):
        for x in S.simplices(n):
            assert retraction_r(comparison_map("inclusion_i", S, x)) == x


def test_map_f_commutes_with_fiber_operators():
    S = fixture("triangle", 9)
    for deg in _degrees(2, 1):
        for c in prism_cells(S, "Pbar", deg):
            for kind, i, j in _operators(c):
                if kind == "fiber_degeneracy" and c.payload.dim + 1 > S.D:
                    continue
                assert map_f(prism_operator(c, kind, i, j)) == prism_operator(map_f(c), kind, i, j)


def test_aw_examples():
    S = fixture("circle", 4)
    e = NormalForm((), (1, 0))
    [(c, cell)] = aw_map(S, e, 0)
    assert (c, cell.q, cell.payload) == (1, (1,), e)
    terms = aw_map(S, e, 1)
    assert sorted((cell.q, cell.payload) for _, cell in terms) == sorted(
        [((0, 1), S.degeneracy(e, 0)), ((1, 0), S.degeneracy(e, 1))])
    v = NormalForm((), (0, 0))
    [(c, cell)] = aw_map(S, v, 1)
    assert cell.q == (0, 0) and cell.payload == S.degeneracy(v, 0)
    # the literal +1 coefficients survive behind a flag
    assert all(c == 1 for c, _ in aw_map(S, e, 2, signed=False))


def test_pf_of_map_to_point_is_p():
    S = fixture("circle", 5)
    point = fixture("point", 5)
    f = SimplicialMap.from_vertex_map(S, point, {0: 0, 1: 0, 2: 0})
    for deg in _degrees(2, 1):
        pf = prism_cells(f, "Pf", deg)
        p = prism_cells(S, "P", deg)
        assert sorted(c.payload[0] for c in pf) == sorted(c.payload for c in p)
        for c in pf[::3]:
            for kind, i, j in _operators(c):
                if kind == "fiber_degeneracy" and c.payload[0].dim + 1 > S.D:
                    continue
                assert prism_operator(c, kind, i, j).payload[0] == \
                    prism_operator(PrismCell("P", c.p, c.q, c.payload[0], S), kind, i, j).payload


def test_pf_of_identity_keeps_only_collapsed_cells():
    S = fixture("circle", 5)
    f = SimplicialMap.from_vertex_map(S, S, {0: 0, 1: 1, 2: 2})
    from prismatica.simplicial import mu_apply
    for deg in _degrees(2, 1):
        cells = prism_cells(f, "Pf", deg)
        assert len(cells) == len(S.simplices(deg.p))
        assert all(c.payload[0] == mu_apply(S, deg.q, c.payload[1]) for c in cells)


def test_pf_operators_keep_the_pullback_condition():
    src = fixture("triangle", 6)
    tgt = fixture("interval", 6)
    f = SimplicialMap.from_vertex_map(src, tgt, {0: 0, 1: 0, 2: 1})
    assert f.violations() == []
    n = 0
    for deg in _degrees(2, 1):
        for c in prism_cells(f, "Pf", deg):
            n += 1
            for kind, i, j in _operators(c):
                if kind == "fiber_degeneracy" and c.payload[0].dim + 1 > src.D:
                    continue
                prism_operator(c, kind, i, j)
            t = tuple(1.0 / (c.p + 1) for _ in range(c.p + 1))
            s = [tuple(1.0 / (qi + 1) for _ in range(qi + 1)) for qi in c.q]
            assert pf_map_lambda_check(c, t, s)
    assert n > 0


def test_pf_rejects_cells_off_the_pullback():
    src = fixture("interval", 3)
    f = SimplicialMap.from_vertex_map(src, src, {0: 0, 1: 1})
    # s_0 of vertex a0 lies over (a0, a0), not over the edge (a0, a1)
    with pytest.raises(InternalInvariantBroken):
        make_cell(f, "Pf", (0, 0), (NormalForm((0,), (0, 0)), NormalForm((), (1, 0))))


def test_e_construction():
    S = fixture("interval", 3)
    for deg in _degrees(2, 1):
        for c in prism_cells(S, "E", deg):
            for i in range(c.p + 1):
                s = prism_operator(c, "base_degeneracy", i)
                assert prism_operator(s, "base_face", i) == c
                assert prism_operator(s, "base_face", i + 1) == c
