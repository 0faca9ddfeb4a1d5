import random

import pytest
from oracles import complex_homology, determinantal_factors, textbook_snf

from prismatica.errors import NotAComplex
from prismatica.fixtures import FIXTURE_NAMES, KNOWN_HOMOLOGY, fixture, fixture_complex
from prismatica.homology import (
    ChainComplex,
    HomologyGroup,
    IntMatrix,
    aw_violations,
    homology,
    prismatic_total_complex,
    simplicial_chain_complex,
    smith_normal_form,
    verify_chain_map,
)
from prismatica.simplicial import NormalForm

try:
    import sympy
except ImportError:  # pragma: no cover
    sympy = None


def _groups(rows):
    return [(r["group"].betti, tuple(r["group"].torsion)) for r in rows]


def test_snf_examples():
    assert smith_normal_form(IntMatrix.from_dense([[2, 0], [0, 0]])) == ([2], 1)
    assert smith_normal_form(IntMatrix.from_dense([[1, 1], [1, 1]])) == ([1], 1)
    assert smith_normal_form(IntMatrix.from_dense([[2, 4], [6, 8]])) == ([2, 4], 2)


def test_snf_against_determinantal_divisors():
    rng = random.Random(11)
    for _ in range(300):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        M = [[rng.randint(-6, 6) for _ in range(c)] for _ in range(r)]
        factors, rank = smith_normal_form(IntMatrix.from_dense(M))
        assert factors == determinantal_factors(M)
        assert rank == len(factors)


def test_snf_against_textbook_on_larger_matrices():
    rng = random.Random(5)
    for _ in range(60):
        r, c = rng.randint(3, 12), rng.randint(3, 12)
        M = [[rng.choice([0, 0, 0, 1, -1, 2, 3, -4]) for _ in range(c)] for _ in range(r)]
        assert smith_normal_form(IntMatrix.from_dense(M))[0] == textbook_snf(M)


@pytest.mark.skipif(sympy is None, reason="sympy not installed")
def test_snf_against_sympy():
    from sympy import ZZ, Matrix
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf

    rng = random.Random(2)
    for _ in range(40):
        n = rng.randint(2, 5)
        M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        S = sympy_snf(Matrix(M), domain=ZZ)
        want = [abs(int(S[k, k])) for k in range(n) if S[k, k] != 0]
        assert smith_normal_form(IntMatrix.from_dense(M))[0] == want


def test_snf_handles_big_entries():
    M = [[10**30 + 7, 3], [2 * 10**30, 6]]
    assert smith_normal_form(IntMatrix.from_dense(M))[0] == determinantal_factors(M)


def test_intmatrix_has_no_stored_zeros():
    M = IntMatrix.from_dense([[0, 1], [2, 0]])
    assert all(v for v in M.entries.values())
    assert M.to_dense() == [[0, 1], [2, 0]]
    assert (M @ IntMatrix.from_dense([[1, 0], [0, 0]])).to_dense() == [[0, 0], [2, 0]]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_simplicial_homology_matches_oracle(name):
    doc = fixture_complex(name)
    want = complex_homology(len(doc["vertices"]), doc["simplices"])
    assert want == KNOWN_HOMOLOGY[name]
    assert _groups(homology(simplicial_chain_complex(fixture(name)))) == want


def test_circle_boundary_matrix():
    C = simplicial_chain_complex(fixture("circle"))
    dense = C.boundary(1).to_dense()
    assert len(dense) == 3 and len(dense[0]) == 3
    for col in zip(*dense):
        assert sorted(col) == [-1, 0, 1]


def test_homology_group_strings():
    assert str(HomologyGroup(1, ())) == "Z"
    assert str(HomologyGroup(2, ())) == "Z^2"
    assert str(HomologyGroup(0, (2,))) == "Z/2"
    assert str(HomologyGroup(0, ())) == "0"


def test_not_a_complex():
    bad = ChainComplex({0: ["a"], 1: ["b"], 2: ["c"]},
                       {1: IntMatrix.from_dense([[1]]), 2: IntMatrix.from_dense([[1]])})
    with pytest.raises(NotAComplex):
        homology(bad)


def test_point_prism_complexes():
    S = fixture("point")
    for construction in ("P", "Pbar"):
        rows = homology(prismatic_total_complex(S, construction, 4))
        assert [r["group"].betti for r in rows if r["reliable"]] == [1, 0, 0, 0]


@pytest.mark.parametrize("construction", ["P", "Pbar"])
def test_circle_prism_homology(construction):
    rows = homology(prismatic_total_complex(fixture("circle"), construction, 3))
    assert _groups(rows)[:2] == [(1, ()), (1, ())]
    assert rows[-1]["reliable"] is False


def test_pf_complex_of_identity_matches():
    from prismatica.prismatic import SimplicialMap

    S = fixture("circle", 3)
    f = SimplicialMap.from_vertex_map(S, S, {0: 0, 1: 1, 2: 2})
    C = prismatic_total_complex(f, "Pf", 3)
    assert C.check_d_squared() == []
    assert _groups(homology(C))[:2] == [(1, ()), (1, ())]


def test_identity_chain_map():
    C = simplicial_chain_complex(fixture("triangle"))
    assert verify_chain_map(lambda n, c: {c: 1}, C, C) == []


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_aw_is_a_chain_map(name):
    S = fixture(name)
    for p in range(3):
        assert aw_violations(S, p) == []


def test_aw_without_signs_fails():
    assert aw_violations(fixture("circle"), 1, signed=False)


def test_flipped_aw_term_is_reported_at_its_generator():
    S = fixture("circle")
    bad = aw_violations(S, 1, flip=(1, 0))
    assert NormalForm((), (1, 0)) in [v["cell"] for v in bad]


try:
    from hypothesis import given, settings
    from hypothesis import strategies as st
except ImportError:  # pragma: no cover
    given = None

if given is not None:
    _small = st.integers(1, 4).flatmap(lambda c: st.lists(
        st.lists(st.integers(-8, 8), min_size=c, max_size=c), min_size=1, max_size=4))

    @settings(max_examples=150, deadline=None)
    @given(_small)
    def test_snf_property_against_determinantal_divisors(M):
        factors, rank = smith_normal_form(IntMatrix.from_dense(M))
        assert factors == determinantal_factors(M)
        assert all(b % a == 0 for a, b in zip(factors, factors[1:]))
