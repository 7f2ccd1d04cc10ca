"""Noncrossing path and cycle decompositions of delta-joins over a free group.

Every arc a with label phi(a) of length t is split into strands
(a, 0) .. (a, t-1), numbered from right to left; strand j carries the j-th
symbol of phi(a).  Around each vertex outside W the strand ends are read
counterclockwise and paired like balanced parentheses.  Following the
pairs turns the strands into routes: paths between vertices of W and
closed cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .surface import EmbeddedDigraph, verify_delta_join
from .word import Alphabet, Word


class NotDeltaJoin(ValueError):
    pass


class NonFreeAlphabet(ValueError):
    pass


class InconsistentSystem(ValueError):
    pass


# a strand end is (arc, strand index, end) with end 0 = tail side, 1 = head side

@dataclass(frozen=True)
class Step:
    arc: int
    strand: int
    forward: bool

    def start_vertex(self, D: EmbeddedDigraph) -> int:
        t, h = D.arcs[self.arc]
        return t if self.forward else h

    def end_vertex(self, D: EmbeddedDigraph) -> int:
        t, h = D.arcs[self.arc]
        return h if self.forward else t


@dataclass
class Route:
    kind: str  # "path" or "cycle"
    xi: int  # the symbol carried, always a positive generator
    steps: list
    vertices: list  # v0 v1 ... vt; for cycles v0 == vt

    def is_directed(self) -> bool:
        return all(s.forward for s in self.steps)

    def is_simple(self) -> bool:
        inner = self.vertices[:-1] if self.kind == "cycle" else self.vertices
        return len(set(inner)) == len(inner)


@dataclass
class RoutedSystem:
    D: EmbeddedDigraph
    routes: list
    lengths: list  # strands per arc
    matching: dict = field(default_factory=dict)  # vertex -> list of matched (end, end) pairs

    def strand_owner(self) -> dict:
        out = {}
        for r, route in enumerate(self.routes):
            for s in route.steps:
                out[(s.arc, s.strand)] = r
        return out


def _strand_ends(D: EmbeddedDigraph, phi: Sequence[Word], v: int) -> list:
    """Strand ends at v counterclockwise, with their signed symbols."""
    seq = []
    for i, end in D.rotation[v]:
        t = len(phi[i])
        if end == 0:
            seq.extend(((i, j, 0), phi[i][j]) for j in range(t))
        else:
            seq.extend(((i, j, 1), -phi[i][j]) for j in reversed(range(t)))
    return seq


def decompose(D: EmbeddedDigraph, phi: Sequence[Word], delta: dict, A: Alphabet) -> RoutedSystem:
    """Split a delta-join into noncrossing routes by stack pairing at every vertex."""
    if A.independence:
        raise NonFreeAlphabet("decompositions are defined over free groups only")
    phi = [A.reduce(w) for w in phi]
    if not verify_delta_join(D, phi, delta, A):
        raise NotDeltaJoin("labels do not form a delta-join")
    W = {v for v, w in delta.items() if w}
    partner: dict = {}
    matching: dict = {}
    for v in range(D.n):
        if v in W:
            continue
        stack: list = []
        pairs = []
        for e, sym in _strand_ends(D, phi, v):
            if stack and stack[-1][1] == -sym:
                f, _ = stack.pop()
                partner[e], partner[f] = f, e
                pairs.append((f, e))
            else:
                stack.append((e, sym))
        if stack:
            raise NotDeltaJoin(f"strands at vertex {v} do not cancel")
        matching[v] = pairs

    lengths = [len(w) for w in phi]
    used: set = set()
    routes = []

    def trace(arc: int, strand: int, forward: bool) -> tuple[list, bool]:
        """Walk from a strand until a W vertex or back to the start."""
        steps = []
        a, j, fw = arc, strand, forward
        while True:
            steps.append(Step(a, j, fw))
            used.add((a, j))
            far = (a, j, 1 if fw else 0)
            if far not in partner:
                return steps, False
            b, k, end = partner[far]
            if (b, k) == (arc, strand):
                return steps, True
            a, j, fw = b, k, end == 0

    # paths first, from every strand end at a W vertex
    for v in sorted(W):
        for i, end in D.rotation[v]:
            for j in range(lengths[i]):
                if (i, j) in used:
                    continue
                steps, closed = trace(i, j, end == 0)
                if closed:
                    raise InconsistentSystem("a path closed up on itself")
                routes.append(_orient(D, phi, "path", steps))
    for i in range(len(phi)):
        for j in range(lengths[i]):
            if (i, j) not in used:
                steps, closed = trace(i, j, True)
                if not closed:
                    raise InconsistentSystem("a cycle ended at a vertex outside W")
                routes.append(_orient(D, phi, "cycle", steps))
    system = RoutedSystem(D, routes, lengths, matching)
    check_system(system, phi, A)
    return system


def _orient(D, phi, kind, steps):
    first = steps[0]
    sym = phi[first.arc][first.strand]
    if not first.forward:
        sym = -sym
    if sym < 0:
        steps = [Step(s.arc, s.strand, not s.forward) for s in reversed(steps)]
        sym = -sym
    if kind == "cycle":
        # canonical start: least (vertex, arc, strand)
        keys = [(s.start_vertex(D), s.arc, s.strand) for s in steps]
        r = keys.index(min(keys))
        steps = steps[r:] + steps[:r]
    vertices = [steps[0].start_vertex(D)] + [s.end_vertex(D) for s in steps]
    return Route(kind, sym, steps, vertices)


def recompose(system: RoutedSystem) -> list[Word]:
    """Labels determined by the routes and their symbols."""
    labels: list[list] = [[None] * t for t in system.lengths]
    for route in system.routes:
        for s in route.steps:
            if labels[s.arc][s.strand] is not None:
                raise InconsistentSystem(f"strand {s.arc}[{s.strand}] is used twice")
            labels[s.arc][s.strand] = route.xi if s.forward else -route.xi
    for i, lab in enumerate(labels):
        if any(x is None for x in lab):
            raise InconsistentSystem(f"arc {i} has an unused strand")
    return [tuple(lab) for lab in labels]


def _crossing(p, q, pos) -> bool:
    a, b = sorted((pos[p[0]], pos[p[1]]))
    c, d = sorted((pos[q[0]], pos[q[1]]))
    return a < c < b < d or c < a < d < b


def check_system(system: RoutedSystem, phi: Sequence[Word], A: Alphabet) -> None:
    """Partition, pairing-sign and noncrossing checks; raises InconsistentSystem."""
    D = system.D
    rec = recompose(system)
    if any(not A.equals(x, y) for x, y in zip(rec, phi)):
        raise InconsistentSystem("routes do not reproduce the labels")
    for v, pairs in system.matching.items():
        seq = _strand_ends(D, phi, v)
        pos = {e: t for t, (e, _) in enumerate(seq)}
        sym = dict(seq)
        for e, f in pairs:
            if sym[e] != -sym[f]:
                raise InconsistentSystem(f"pair at vertex {v} is not inverse")
        for x in range(len(pairs)):
            for y in range(x + 1, len(pairs)):
                if _crossing(pairs[x], pairs[y], pos):
                    raise InconsistentSystem(f"crossing pairs at vertex {v}")


def classify(system: RoutedSystem) -> dict:
    routes = system.routes
    simple = all(r.is_simple() for r in routes)
    directed = all(r.is_directed() for r in routes)
    disjoint = True
    clash = []
    for x in range(len(routes)):
        for y in range(x + 1, len(routes)):
            common = set(routes[x].vertices) & set(routes[y].vertices)
            if common:
                disjoint = False
                clash.append((x, y, sorted(common)))
    return {
        "simple_directed": simple and directed,
        "simple": simple,
        "directed": directed,
        "vertex_disjoint": disjoint,
        "clashes": clash,
        "paths": sum(r.kind == "path" for r in routes),
        "cycles": sum(r.kind == "cycle" for r in routes),
    }


def format_routes(system: RoutedSystem) -> str:
    D = system.D
    lines = []
    for r in system.routes:
        parts = [r.kind, "ξ=" + Alphabet.render((r.xi,)), str(r.vertices[0])]
        for s, v in zip(r.steps, r.vertices[1:]):
            parts.append(f"{D.names[s.arc]}{'' if s.forward else chr(39)}[{s.strand}]")
            parts.append(str(v))
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")
