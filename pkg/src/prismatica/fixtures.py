"""Small triangulations used by the CLI and the test suite."""
from __future__ import annotations

import itertools

from .simplicial import from_complex


def closure(maximal):
    """All faces of the given simplices, as sorted index tuples."""
    out = set()
    for s in maximal:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(itertools.combinations(s, k))
    return sorted(out, key=lambda t: (len(t), t))


def _torus7():
    tris = []
    for i in range(7):
        tris.append((i, (i + 1) % 7, (i + 3) % 7))
        tris.append((i, (i + 2) % 7, (i + 3) % 7))
    return tris


_RP2 = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2),
        (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4)]

_MAXIMAL = {
    "point": (1, []),
    "interval": (2, [(0, 1)]),
    "circle": (3, [(0, 1), (1, 2), (0, 2)]),
    "triangle": (3, [(0, 1, 2)]),
    "torus7": (7, _torus7()),
    "rp2_6": (6, [tuple(v - 1 for v in t) for t in _RP2]),
    "mobius5": (5, [(i, (i + 1) % 5, (i + 2) % 5) for i in range(5)]),
    "two_edges": (4, [(0, 1), (2, 3)]),
}

FIXTURE_NAMES = tuple(_MAXIMAL)

# extra complexes, not part of the standard fixture list
_MAXIMAL["tetrahedron"] = (4, [(0, 1, 2, 3)])

# expected integral homology (betti, torsion) per degree
KNOWN_HOMOLOGY = {
    "point": [(1, ())],
    "interval": [(1, ()), (0, ())],
    "circle": [(1, ()), (1, ())],
    "triangle": [(1, ()), (0, ()), (0, ())],
    "torus7": [(1, ()), (2, ()), (1, ())],
    "rp2_6": [(1, ()), (0, (2,)), (0, ())],
    "mobius5": [(1, ()), (1, ()), (0, ())],
    "two_edges": [(2, ()), (0, ())],
    "tetrahedron": [(1, ()), (0, ()), (0, ()), (0, ())],
}


def fixture_complex(name: str) -> dict:
    """The fixture as a complex document ``{"vertices", "simplices"}``."""
    try:
        n, maximal = _MAXIMAL[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(_MAXIMAL)}") from None
    simplices = [list(s) for s in closure(maximal) if len(s) > 1]
    return {"vertices": [f"a{v}" for v in range(n)], "simplices": simplices}


def fixture(name: str, D: int | None = None):
    doc = fixture_complex(name)
    return from_complex(doc["vertices"], doc["simplices"], D)
