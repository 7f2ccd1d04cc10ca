import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from generators import (
    delta_join_from_paths, random_disjoint_paths, random_face_potential,
    random_planar_embedding, random_word,
)
from graphgroup.cohomology import Arc, CohomologyInstance, is_feasible
from graphgroup.convexity import FiniteClosed
from graphgroup.surface import (
    EmbeddedDigraph, EmbeddingError, OccurrenceViolation, add_pendant, apply_face_potential, dual,
    dual_label, extended_dual, format_embedding, load_embedding, r_faces, vertex_product,
    verify_circulation, verify_delta_join,
)
from graphgroup.word import Alphabet

g, h = 1, 2
FREE2 = Alphabet(2)

SQUARE = """surface
4
a 0 1
b 1 2
c 2 3
d 3 0
face: a b c d
face: d' c' b' a'
"""

TORUS = """surface
1
a 0 0
b 0 0
face: a b a' b'
"""


def square():
    return load_embedding(SQUARE)


def star(k=3):
    # center 0 with arcs out to leaves 1..k, one face
    arcs = [(0, v) for v in range(1, k + 1)]
    face = []
    for i in range(k):
        face += [2 * i, 2 * i + 1]
    return EmbeddedDigraph(k + 1, arcs, [face])


# -- embeddings ------------------------------------------------------------------------

def test_square_is_planar():
    D = square()
    assert (D.n, len(D.arcs), len(D.faces), D.genus) == (4, 4, 2, 0)
    assert all(D.degree(v) == 2 for v in range(4))


def test_torus_genus():
    D = load_embedding(TORUS)
    assert (D.n, len(D.arcs), len(D.faces)) == (1, 2, 1)
    assert D.genus == 1
    assert len(D.rotation[0]) == 4


def test_format_round_trip():
    for text in (SQUARE, TORUS):
        D = load_embedding(text)
        back = load_embedding(format_embedding(D))
        assert back.arcs == D.arcs and back.faces == D.faces and back.names == D.names


def test_arc_twice_forward_is_rejected():
    with pytest.raises(OccurrenceViolation):
        load_embedding("surface\n2\na 0 1\nface: a a'\nface: a\n")
    with pytest.raises(OccurrenceViolation):
        load_embedding("surface\n2\na 0 1\nface: a\n")


@pytest.mark.parametrize("text", [
    "",
    "graph\n2\n",
    "surface\nx\n",
    "surface\n2\na 0 5\nface: a a'\n",
    "surface\n2\na 0 1\nface: a z'\n",
    "surface\n2\na 0 1\na 1 0\nface: a a'\n",
    "surface\n3\na 0 1\nface: a a'\n",
    # the two corners at the loop vertex never meet
    "surface\n1\na 0 0\nface: a a'\n",
])
def test_bad_embeddings(text):
    with pytest.raises(EmbeddingError):
        load_embedding(text)


# -- duals --------------------------------------------------------------------------

def test_square_dual():
    D = square()
    Ds = dual(D)
    assert Ds.n == 2 and len(Ds.arcs) == 4
    assert len(set(Ds.arcs)) == 1  # four parallel arcs
    (F, G), = set(Ds.arcs)
    assert F != G


def test_dual_label_inverts_backwards():
    phi = [(g,), (h,), (), ()]
    assert dual_label(FREE2, phi, [0, 2]) == (g, h)
    assert dual_label(FREE2, phi, [3, 1]) == (-h, -g)


def test_extended_dual_contains_dual():
    D = square()
    phi = [(g,), (h,), (g, h), ()]
    ext = extended_dual(D, phi, FREE2)
    for i in range(len(D.arcs)):
        a = ext.arcs[ext.base[i]]
        assert (a.tail, a.head) == dual(D).arcs[i]
        assert a.label == phi[i] and a.path == (2 * i,)


def test_extended_dual_of_degree_three_face():
    D = star(3)
    A = FREE2
    # distinct labels: 3 dual arcs plus the 3 two-step paths; full cycles are left out
    ext = extended_dual(D, [(g,), (h,), (g, g)], A)
    assert len(ext.arcs) == 6
    assert sorted(len(a.path) for a in ext.arcs) == [1, 1, 1, 2, 2, 2]
    for a in ext.arcs:
        assert a.label == dual_label(A, [(g,), (h,), (g, g)], a.path)
    # all-1 labels collapse every chord onto a dual arc
    assert len(extended_dual(D, [(), (), ()], A).arcs) == 3


def test_extended_dual_chords_stay_on_one_dual_face():
    D = square()
    ext = extended_dual(D, [(g,), (h,), (g,), (h,)], FREE2)
    for a in ext.arcs:
        walk = D.dual_walk(a.vertex)
        L = len(walk)
        assert len(a.path) < L
        assert any(tuple(walk[(s + j) % L] for j in range(len(a.path))) == a.path for s in range(L))


# -- circulations and joins ---------------------------------------------------------------

def test_all_ones_is_a_circulation():
    D = load_embedding(TORUS)
    assert verify_circulation(D, [(), ()], FREE2)


def test_directed_cycle_is_a_circulation():
    D = square()
    assert verify_circulation(D, [(g,)] * 4, FREE2)
    assert not verify_circulation(D, [(g,), (g,), (g,), (h,)], FREE2)


def test_torus_loops():
    D = load_embedding(TORUS)
    # both ends of each loop count, giving a commutator at the vertex
    assert verify_circulation(D, [(g,), ()], FREE2)
    assert not verify_circulation(D, [(g,), (h,)], FREE2)
    assert verify_circulation(D, [(g,), (h,)], Alphabet(2, [(1, 2)]))


def test_pendant_terminals():
    # the product at a degree-one vertex is its single term:
    # a leaving arc gives phi(a), an entering arc gives phi(a)^-1
    D = EmbeddedDigraph(3, [(0, 1), (1, 2)], [[0, 2, 3, 1]])
    phi = [(g,), (g,)]
    assert vertex_product(D, phi, 0, FREE2) == (g,)
    assert vertex_product(D, phi, 2, FREE2) == (-g,)
    assert verify_delta_join(D, phi, {0: (g,), 2: (-g,)}, FREE2)
    assert not verify_delta_join(D, phi, {0: (g,), 2: (g,)}, FREE2)
    # demand on a vertex of degree two is not allowed
    assert not verify_delta_join(D, phi, {1: (g,)}, FREE2)


def test_add_pendant():
    D = square()
    D2, p, j = add_pendant(D, 2, D.face_of[2], outward=False)
    assert D2.n == 5 and D2.arcs[j] == (p, 2) and D2.degree(p) == 1
    assert D2.genus == 0 and len(D2.faces) == 2
    with pytest.raises(EmbeddingError):
        add_pendant(load_embedding(TORUS), 0, 3)


def test_r_faces():
    D = square()
    assert r_faces(D, [0]) == {0, 1}
    assert r_faces(D, []) == frozenset()


# -- properties -------------------------------------------------------------------------

seeds = st.integers(0, 10**9)


def _labels(rng, D, A, size=2):
    return [random_word(rng, A, size) for _ in D.arcs]


@given(seeds)
def test_homology_transfer(seed):
    rng = random.Random(seed)
    D = random_planar_embedding(rng, rng.randint(2, 8))
    A = FREE2
    phi = _labels(rng, D, A)
    p = random_face_potential(rng, D, A)
    psi = apply_face_potential(D, phi, p, A)
    # undoing the potential restores phi
    back = apply_face_potential(D, psi, [A.inv(w) for w in p], A)
    assert all(A.equals(x, y) for x, y in zip(back, phi))
    # on the dual, f = p^-1 turns phi* into psi*; check with singleton constraints
    Ds = dual(D)
    arcs = [Arc(t, hd, phi[i], FiniteClosed(A, [psi[i]] if psi[i] else []))
            for i, (t, hd) in enumerate(Ds.arcs)]
    inst = CohomologyInstance(A, Ds.n, arcs)
    assert is_feasible(inst, [A.inv(w) for w in p])


def _random_cycle_labels(rng, D, A):
    G = nx.Graph()
    G.add_edges_from((t, hd, {"i": i}) for i, (t, hd) in enumerate(D.arcs))
    phi = [() for _ in D.arcs]
    basis = nx.cycle_basis(G)
    if not basis:
        return phi
    cyc = rng.choice(basis)
    w = random_word(rng, A, 3)
    for u, v in zip(cyc, cyc[1:] + cyc[:1]):
        i = G[u][v]["i"]
        phi[i] = w if D.arcs[i] == (u, v) else A.inv(w)
    return phi


@given(seeds)
def test_face_potentials_keep_circulations(seed):
    rng = random.Random(seed)
    D = random_planar_embedding(rng, rng.randint(3, 9))
    A = FREE2
    phi = _random_cycle_labels(rng, D, A)
    assert verify_circulation(D, phi, A)
    psi = apply_face_potential(D, phi, random_face_potential(rng, D, A), A)
    assert verify_circulation(D, psi, A)


@given(seeds)
def test_r_homology_keeps_delta_joins(seed):
    rng = random.Random(seed)
    D = random_planar_embedding(rng, rng.randint(3, 10))
    paths = random_disjoint_paths(rng, D, rng.randint(1, 3))
    if not paths:
        return
    D2, phi, delta, A = delta_join_from_paths(rng, D, paths)
    assert verify_delta_join(D2, phi, delta, A)
    R = r_faces(D2, list(delta))
    p = random_face_potential(rng, D2, A, fixed=R)
    psi = apply_face_potential(D2, phi, p, A)
    assert verify_delta_join(D2, psi, delta, A)
