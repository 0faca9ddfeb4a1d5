import pytest

from prismatica.classifying import (
    check_m_compatibility,
    classify_cell,
    face_functions,
    from_interior,
    interior_grid,
    kept_face_start,
    lambda_bar,
    lambda_bar_blocks,
    random_interior,
    rho_eval,
    rho_eval_composite,
    to_interior,
)
from prismatica.errors import IndexOutOfRange, InvalidPoint, ShapeMismatch
from prismatica.fixtures import fixture
from prismatica.gauge import (
    Perm,
    SplitMix64,
    gauge_fixture,
    identity_set,
    iterated_last_product,
)
from prismatica.prismatic import MultiDegree, prism_cells
from prismatica.star import multidegrees


def _random_point(deg, rng):
    t = random_interior(deg.p, rng)
    s = [random_interior(qi, rng) for qi in deg.q]
    return t, s


def test_interior_coordinates():
    assert to_interior((1.0, 0.0, 0.0)) == (0.0, 0.0)
    assert to_interior((0.0, 0.0, 1.0)) == (1.0, 1.0)
    assert to_interior((0.25, 0.75)) == pytest.approx((0.75,))
    assert from_interior((0.75,)) == pytest.approx((0.25, 0.75))
    with pytest.raises(InvalidPoint):
        from_interior((0.2, 0.5))


def test_lambda_examples():
    deg = MultiDegree(1, (0, 0))
    t1 = 0.3
    assert to_interior(lambda_bar(deg, (t1,), [(), ()])) == pytest.approx((t1, t1, 0.0))
    assert lambda_bar(deg, (0.0,), [(), ()]) == pytest.approx((1.0, 0.0, 0.0, 0.0))
    with pytest.raises(ShapeMismatch):
        lambda_bar(deg, (0.3,), [(0.5,), ()])


def test_lambda_against_blockwise_assembly():
    rng = SplitMix64(5)
    for deg in multidegrees(3, 2):
        for _ in range(10):
            t, s = _random_point(deg, rng)
            got = lambda_bar(deg, t, s)
            want = lambda_bar_blocks(deg, from_interior(t), [from_interior(v) for v in s])
            assert got == pytest.approx(want, abs=1e-12)


def test_rho_example():
    deg = MultiDegree(1, (0, 0))
    assert rho_eval(1, deg, (0.1, 0.2, 0.3, 0.4)) == pytest.approx((0.1, 0.9))
    with pytest.raises(IndexOutOfRange):
        rho_eval(0, deg, (0.1, 0.2, 0.3, 0.4))
    with pytest.raises(IndexOutOfRange):
        rho_eval(2, deg, (0.1, 0.2, 0.3, 0.4))


def test_rho_against_composite_of_degeneracies():
    rng = SplitMix64(6)
    for deg in multidegrees(3, 1):
        n = sum(deg.q) + 2 * deg.p + 1
        for i in range(1, deg.p + 1):
            u = rng.simplex_point(n)
            assert rho_eval(i, deg, u) == pytest.approx(rho_eval_composite(i, deg, u), abs=1e-12)


def test_kept_face_start_removes_the_later_blocks():
    deg = MultiDegree(2, (1, 0, 2))
    # blocks occupy 0..2, 3..4, 5..8
    assert [kept_face_start(i, deg) for i in range(2)] == [3, 5]


def test_identity_gauge_gives_identity_tuples():
    S = fixture("triangle", 8)
    T = identity_set(S, Perm(3))
    rng = SplitMix64(2)
    for deg in multidegrees(2, 1):
        for gamma in prism_cells(S, "Pbar", deg)[::7]:
            t, s = _random_point(deg, rng)
            assert classify_cell(T, gamma, t, s) == tuple([(0, 1, 2)] * (deg.p + 1))


def test_p_zero_gives_the_identity():
    S, T = gauge_fixture("z5", 3)
    for gamma in prism_cells(S, "Pbar", (0, (1,))):
        assert classify_cell(T, gamma, (), [(0.4,)]) == (0,)


def test_z5_first_component_two_ways():
    S, T = gauge_fixture("z5", 5)
    deg = MultiDegree(1, (0, 0))
    rng = SplitMix64(9)
    seen = set()
    for gamma in prism_cells(S, "Pbar", deg):
        t, s = _random_point(deg, rng)
        a0, a1 = classify_cell(T, gamma, t, s)
        u = lambda_bar(deg, t, s)
        # tau_0 keeps the first block, i.e. d_2 d_3 gamma
        v = iterated_last_product(T, gamma.payload, 2)((1 - t[0], t[0]))
        assert a0 == (-v) % 5 and a1 == 0
        assert rho_eval(1, deg, u) == pytest.approx((1 - t[0], t[0]))
        seen.add(a0)
    assert len(seen) > 1


def test_classify_rejects_p_cells():
    S, T = gauge_fixture("z5", 3)
    with pytest.raises(ShapeMismatch):
        face_functions(T, prism_cells(S, "P", (1, (0, 0)))[0])


def test_interior_grid():
    assert interior_grid(1) == [(1.0,), (0.5,), (0.0,)]
    assert len(interior_grid(2)) == 6
    assert all(p[0] >= p[1] for p in interior_grid(2))


@pytest.mark.parametrize("name", ["z5", "z5_tetra", "so2_tetra"])
def test_m_compatibility_on_flat_data(name):
    S, T = gauge_fixture(name, 6)
    for deg in [MultiDegree(1, (0, 0)), MultiDegree(1, (1, 0)), MultiDegree(2, (0, 0, 0))]:
        for gamma in prism_cells(S, "Pbar", deg)[::5]:
            for i in range(deg.p + 1):
                rep = check_m_compatibility(T, gamma, i, samples=3)
                assert rep["ok"] and rep["independent_of_s_i"], rep


def test_nonabelian_data_needs_right_translation():
    S, T = gauge_fixture("s3_tetra", 6)
    left_fails = 0
    for deg in [MultiDegree(1, (0, 0)), MultiDegree(2, (0, 0, 0))]:
        for gamma in prism_cells(S, "Pbar", deg)[::3]:
            for i in range(deg.p + 1):
                rep = check_m_compatibility(T, gamma, i, samples=3)
                assert rep["right_translation"]
                left_fails += not rep["left_translation"]
    assert left_fails > 0


def test_bent_so2_data_breaks_the_last_face():
    # compatible but non-flat data: only the face i = p of p = 2 cells disagrees
    S, T = gauge_fixture("so2_bent_tetra", 6)
    deg = MultiDegree(2, (0, 0, 0))
    bad = {0: 0, 1: 0, 2: 0}
    for gamma in prism_cells(S, "Pbar", deg):
        for i in range(3):
            bad[i] += not check_m_compatibility(T, gamma, i, samples=3)["ok"]
    assert bad[0] == bad[1] == 0 and bad[2] > 0
