import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphgroup.two_sat import PairSystem, Unsat, closure_f3, f7_holds, solve_pairs


def brute(system):
    n = system.n
    for bits in itertools.product((0, 1), repeat=n):
        Y = {i + 1 for i, b in enumerate(bits) if b}
        if system.satisfied_by(Y):
            return Y
    return None


@st.composite
def systems(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    item = st.integers(1, n)
    pair = st.tuples(item, item)
    E = draw(st.lists(pair, max_size=2 * n))
    Ep = draw(st.lists(pair, max_size=2 * n))
    return PairSystem.build(n, E, Ep)


def test_examples():
    Y = solve_pairs(PairSystem.build(2, [(1, 2)]))
    assert Y in ({1}, {2}, {1, 2})
    out = solve_pairs(PairSystem.build(2, [(1, 2)], [(1,), (2,)]))
    assert isinstance(out, Unsat)
    assert out.pair == frozenset({1, 2})
    assert solve_pairs(PairSystem.build(3, [], [(1, 2), (3,)])) == frozenset()


def test_closure_examples():
    s = PairSystem.build(4, [(2, 3)], [(1, 2), (3, 4)])
    c = closure_f3(s)
    assert frozenset({1, 4}) in c.at_most
    empty = PairSystem.build(3, [], [(1, 2)])
    assert closure_f3(empty) == empty
    assert closure_f3(c) == c


def test_rejects_bad_items():
    with pytest.raises(ValueError):
        PairSystem.build(2, [(1, 3)])


@given(systems())
def test_solver_matches_brute_force(system):
    out = solve_pairs(system)
    ref = brute(system)
    if ref is None:
        assert isinstance(out, Unsat)
    else:
        assert not isinstance(out, Unsat)
        assert system.satisfied_by(out)


@given(systems())
def test_closure_preserves_solutions(system):
    c = closure_f3(system)
    n = system.n
    for bits in itertools.product((0, 1), repeat=n):
        Y = {i + 1 for i, b in enumerate(bits) if b}
        assert system.satisfied_by(Y) == c.satisfied_by(Y)


@given(systems())
def test_f7_characterisation(system):
    assert f7_holds(closure_f3(system)) == (brute(system) is not None)


def test_brute_force_sixteen_variables():
    rng = random.Random(5)
    for _ in range(6):
        n = 16
        E = [(rng.randint(1, n), rng.randint(1, n)) for _ in range(rng.randint(5, 24))]
        Ep = [(rng.randint(1, n), rng.randint(1, n)) for _ in range(rng.randint(5, 24))]
        s = PairSystem.build(n, E, Ep)
        out = solve_pairs(s)
        assert isinstance(out, Unsat) == (brute(s) is None)
