"""At-least-one / at-most-one pair systems over {0,1} variables.

A system on items 1..n has two families of pairs (singletons allowed):
every pair in ``at_least`` must meet the chosen set Y and no pair in
``at_most`` may lie inside Y.  Solved through the usual implication graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable


def _norm(pairs: Iterable[Iterable[int]], n: int) -> frozenset:
    out = set()
    for p in pairs:
        e = frozenset(p)
        if not 1 <= len(e) <= 2:
            raise ValueError(f"constraint {tuple(p)} must have one or two items")
        if any(not 1 <= i <= n for i in e):
            raise ValueError(f"constraint {tuple(p)} outside 1..{n}")
        out.add(e)
    return frozenset(out)


@dataclass(frozen=True)
class PairSystem:
    n: int
    at_least: frozenset = field(default_factory=frozenset)
    at_most: frozenset = field(default_factory=frozenset)

    @classmethod
    def build(cls, n: int, at_least=(), at_most=()) -> "PairSystem":
        return cls(n, _norm(at_least, n), _norm(at_most, n))

    def satisfied_by(self, Y: Iterable[int]) -> bool:
        Y = set(Y)
        return (all(e & Y for e in self.at_least)
                and not any(e <= Y for e in self.at_most))


@dataclass(frozen=True)
class Unsat:
    """No solution.  ``variable`` has x and not-x in one strongly connected
    component; ``pair`` is an at-least pair whose items are both excluded
    by at-most singletons after closure, when such a pair exists."""

    variable: int
    pair: frozenset | None = None


def _literal(i: int, value: bool) -> int:
    return 2 * (i - 1) + (0 if value else 1)


def _scc(n_nodes: int, adj: list[list[int]]) -> list[int]:
    """Iterative Tarjan; component ids come out in reverse topological order."""
    index = [-1] * n_nodes
    low = [0] * n_nodes
    comp = [-1] * n_nodes
    on_stack = [False] * n_nodes
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n_nodes):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            if i < len(adj[v]):
                work.append((v, i + 1))
                w = adj[v][i]
                if index[w] == -1:
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return comp


def solve_pairs(system: PairSystem) -> frozenset | Unsat:
    """A set Y satisfying the system, or an Unsat certificate."""
    n = system.n
    adj: list[list[int]] = [[] for _ in range(2 * n)]

    def clause(a: int, b: int):
        # a or b, as implications not-a -> b and not-b -> a
        adj[a ^ 1].append(b)
        adj[b ^ 1].append(a)

    for e in system.at_least:
        i, j = (min(e), max(e))
        clause(_literal(i, True), _literal(j, True))
    for e in system.at_most:
        i, j = (min(e), max(e))
        clause(_literal(i, False), _literal(j, False))

    comp = _scc(2 * n, adj)
    Y = set()
    for i in range(1, n + 1):
        t, f = comp[_literal(i, True)], comp[_literal(i, False)]
        if t == f:
            closed = closure_f3(system)
            bad = next((e for e in sorted(closed.at_least, key=sorted)
                        if all(frozenset({j}) in closed.at_most for j in e)), None)
            return Unsat(i, bad)
        # Tarjan numbers sinks first; pick the literal whose component is later in topological order
        if t < f:
            Y.add(i)
    # dropping items never breaks an at-most pair, so shrink to an inclusion-minimal Y
    for i in sorted(Y):
        if all(e & (Y - {i}) for e in system.at_least):
            Y.discard(i)
    return frozenset(Y)


def closure_f3(system: PairSystem) -> PairSystem:
    """Extend at_most to a fixpoint of: {h,i} in E', {i,j} in E, {j,k} in E' gives {h,k} in E'."""
    n = system.n
    nbr: dict[int, set[int]] = {i: set() for i in range(1, n + 1)}

    def add(h: int, k: int) -> bool:
        if k in nbr[h]:
            return False
        nbr[h].add(k)
        nbr[k].add(h)
        return True

    for e in system.at_most:
        items = sorted(e)
        add(items[0], items[-1])
    ends = []
    for e in system.at_least:
        items = sorted(e)
        ends.append((items[0], items[-1]))
        if items[0] != items[-1]:
            ends.append((items[-1], items[0]))
    changed = True
    while changed:
        changed = False
        for i, j in ends:
            for h in list(nbr[i]):
                for k in list(nbr[j]):
                    if add(h, k):
                        changed = True
    at_most = frozenset(frozenset((h, k)) for h in nbr for k in nbr[h])
    return PairSystem(n, system.at_least, at_most)


def f7_holds(system: PairSystem) -> bool:
    """No at-least pair has both of its items excluded by at-most singletons."""
    single = {next(iter(e)) for e in system.at_most if len(e) == 1}
    return not any(e <= single for e in system.at_least)
