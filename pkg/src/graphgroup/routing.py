"""Vertex-disjoint directed paths and rooted trees on embedded digraphs.

The solver reduces routing to cohomology over a free group with one
generator per demand.  Terminals become degree-one pendants carrying the
demand g_i (root) or g_i^-1 (sink).  Each representative delta-join from
homology_enum is transferred to the extended dual, where the sets H keep
the labels of the dual arcs in {1, g_1, ..., g_k} and the labels of the
boundary chords within a single generator.  A feasible potential there
gives a delta-join whose path decomposition is the routing.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .cohomology import Aborted, Arc, CohomologyInstance, Feasible, solve
from .convexity import PowerSet, SymbolSet
from .decomposition import decompose
from .homology_enum import DEFAULT_BUDGET, EnumerationBudgetExceeded, enumerate_representatives
from .surface import EmbeddedDigraph, EmbeddingError, _parse_body, add_pendant, extended_dual, r_faces
from .word import Alphabet


class RoutingFormatError(ValueError):
    pass


class RoutingError(ValueError):
    pass


class InternalCheckFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class Demand:
    root: int
    sinks: tuple
    arcs: frozenset | None = None  # allowed arcs, None for all
    kind: str = "pair"


@dataclass
class RoutingInstance:
    D: EmbeddedDigraph
    demands: list
    p: int | None = None

    @property
    def k(self) -> int:
        return len(self.demands)

    def terminals(self) -> list[int]:
        return [v for d in self.demands for v in (d.root, *d.sinks)]

    def allowed(self, i: int, arc: int) -> bool:
        A = self.demands[i].arcs
        return A is None or arc in A


# -- file format ---------------------------------------------------------------------

def parse_routing(text: str) -> RoutingInstance:
    lines = []
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].strip()
        if ln:
            lines.append(ln)
    if not lines or lines[0] != "routing":
        raise RoutingFormatError("missing 'routing' header")
    try:
        D, rest = _parse_body(lines[1:], stop=("pair", "tree", "p"))
    except EmbeddingError as exc:
        raise RoutingFormatError(str(exc)) from None
    index = {name: i for i, name in enumerate(D.names)}
    demands, p = [], None
    for ln in rest:
        head, *toks = ln.split()
        if head == "p":
            if len(toks) != 1 or not toks[0].isdigit():
                raise RoutingFormatError(f"bad p line {ln!r}")
            p = int(toks[0])
            continue
        arcs = None
        if "arcs:" in toks:
            cut = toks.index("arcs:")
            names = toks[cut + 1:]
            toks = toks[:cut]
            unknown = [a for a in names if a not in index]
            if unknown:
                raise RoutingFormatError(f"unknown arc {unknown[0]!r}")
            arcs = frozenset(index[a] for a in names)
        try:
            verts = [int(t) for t in toks]
        except ValueError:
            raise RoutingFormatError(f"bad terminal in {ln!r}") from None
        if any(not 0 <= v < D.n for v in verts):
            raise RoutingFormatError(f"terminal out of range in {ln!r}")
        if head == "pair" and len(verts) != 2:
            raise RoutingFormatError(f"pair needs two vertices: {ln!r}")
        if head == "tree" and len(verts) < 2:
            raise RoutingFormatError(f"tree needs a root and a sink: {ln!r}")
        demands.append(Demand(verts[0], tuple(verts[1:]), arcs, head))
    if not demands:
        raise RoutingFormatError("no demands")
    return RoutingInstance(D, demands, p)


def format_routing(inst: RoutingInstance) -> str:
    from .surface import format_embedding

    body = format_embedding(inst.D).splitlines()[1:]
    lines = ["routing", *body]
    for d in inst.demands:
        ln = f"{d.kind} {d.root} " + " ".join(map(str, d.sinks))
        if d.arcs is not None:
            ln += " arcs: " + " ".join(inst.D.names[a] for a in sorted(d.arcs))
        lines.append(ln)
    if inst.p is not None:
        lines.append(f"p {inst.p}")
    return "\n".join(lines) + "\n"


# -- solutions ------------------------------------------------------------------------

@dataclass
class RoutingSolution:
    kind: str  # "path" or "tree"
    routes: list  # paths: (vertices, arcs); trees: (root, sorted arcs)


def format_solution(inst: RoutingInstance, sol: RoutingSolution) -> str:
    names = inst.D.names
    lines = []
    for i, route in enumerate(sol.routes, start=1):
        if sol.kind == "path":
            verts, arcs = route
            parts = [str(verts[0])]
            for a, v in zip(arcs, verts[1:]):
                parts += [names[a], str(v)]
        else:
            root, arcs = route
            parts = [str(root)] + [names[a] for a in arcs]
        lines.append(f"{sol.kind} {i}: " + " ".join(parts))
    return "\n".join(lines) + "\n"


def parse_solution(inst: RoutingInstance, text: str) -> RoutingSolution:
    index = {name: i for i, name in enumerate(inst.D.names)}
    kinds, routes = set(), {}
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].strip()
        if not ln:
            continue
        head, _, body = ln.partition(":")
        try:
            kind, num = head.split()
            i = int(num)
        except ValueError:
            raise RoutingFormatError(f"bad solution line {ln!r}") from None
        if kind not in ("path", "tree") or i in routes:
            raise RoutingFormatError(f"bad solution line {ln!r}")
        toks = body.split()
        if not toks:
            raise RoutingFormatError(f"empty route in {ln!r}")
        try:
            if kind == "path":
                verts = [int(t) for t in toks[0::2]]
                arcs = [index[t] for t in toks[1::2]]
                if len(verts) != len(arcs) + 1:
                    raise RoutingFormatError(f"path must end at a vertex: {ln!r}")
                routes[i] = (verts, arcs)
            else:
                routes[i] = (int(toks[0]), sorted(index[t] for t in toks[1:]))
        except (KeyError, ValueError):
            raise RoutingFormatError(f"unknown vertex or arc in {ln!r}") from None
        kinds.add(kind)
    if len(kinds) != 1 or sorted(routes) != list(range(1, len(routes) + 1)):
        raise RoutingFormatError("routes must be numbered 1..k and of one kind")
    return RoutingSolution(kinds.pop(), [routes[i] for i in sorted(routes)])


def verify_solution(inst: RoutingInstance, sol: RoutingSolution) -> bool:
    """Check a solution against the instance without trusting the solver."""
    D = inst.D
    if len(sol.routes) != inst.k:
        return False
    used: set = set()
    for i, (dem, route) in enumerate(zip(inst.demands, sol.routes)):
        if sol.kind == "path":
            if len(dem.sinks) != 1:
                return False
            verts, arcs = route
            if verts[0] != dem.root or verts[-1] != dem.sinks[0]:
                return False
            if len(verts) != len(arcs) + 1 or len(set(verts)) != len(verts):
                return False
            for a, u, v in zip(arcs, verts, verts[1:]):
                if not 0 <= a < len(D.arcs) or D.arcs[a] != (u, v) or not inst.allowed(i, a):
                    return False
            vs = set(verts)
        else:
            root, arcs = route
            if root != dem.root or len(set(arcs)) != len(arcs):
                return False
            if any(not 0 <= a < len(D.arcs) or not inst.allowed(i, a) for a in arcs):
                return False
            into: dict = {}
            for a in arcs:
                t, h = D.arcs[a]
                if h in into or h == root:
                    return False
                into[h] = t
            vs = {root} | set(into)
            for v in into:
                # walking up must reach the root without a cycle
                seen, x = set(), v
                while x != root:
                    if x in seen or x not in into:
                        return False
                    seen.add(x)
                    x = into[x]
            if any(s not in vs for s in dem.sinks):
                return False
        if vs & used:
            return False
        used |= vs
    return True


# -- normalization ------------------------------------------------------------------

@dataclass
class Normalized:
    D: EmbeddedDigraph
    roots: list  # vertex carrying delta for each demand
    sinks: list  # list of sink vertices per demand
    added: frozenset  # pendant arcs created here
    cover: tuple  # faces covering the original terminals
    arcsets: list  # allowed arcs per demand in the new graph (None for all)
    original_n: int


def terminal_cover(inst: RoutingInstance) -> tuple:
    """Lexicographically first smallest set of faces touching every terminal."""
    D = inst.D
    T = set(inst.terminals())
    limit = inst.p if inst.p is not None else len(D.faces)
    at = [D.faces_at(v) for v in range(D.n)]
    for size in range(1, limit + 1):
        for combo in itertools.combinations(range(len(D.faces)), size):
            cs = set(combo)
            if all(at[v] & cs for v in T):
                return combo
    raise RoutingError(f"terminals are not covered by {limit} faces")


def normalize_terminals(inst: RoutingInstance) -> Normalized:
    """Give every terminal role its own degree-one vertex.

    A terminal that already has degree one and plays a single role is
    kept.  Otherwise a pendant is hung inside the first cover face at the
    vertex: new -> v for a root, v -> new for a sink.
    """
    D = inst.D
    cover = terminal_cover(inst)
    roles: dict = {}
    for v in inst.terminals():
        roles[v] = roles.get(v, 0) + 1
    added = []
    arcsets = [None if d.arcs is None else set(d.arcs) for d in inst.demands]
    roots, sinks = [], []

    def place(v, outward, i):
        nonlocal D
        if roles[v] == 1 and D.degree(v) == 1:
            return v
        face = min(f for f in cover if f in D.faces_at(v))
        D, p, j = add_pendant(D, v, face, outward=outward, name=f"t{len(added)}")
        added.append(j)
        if arcsets[i] is not None:
            arcsets[i].add(j)
        return p

    for i, dem in enumerate(inst.demands):
        roots.append(place(dem.root, False, i))
        sinks.append([place(s, True, i) for s in dem.sinks])
    arcsets = [None if a is None else frozenset(a) for a in arcsets]
    return Normalized(D, roots, sinks, frozenset(added), cover, arcsets, inst.D.n)


# -- solving ------------------------------------------------------------------------

@dataclass
class Found:
    solution: RoutingSolution
    diagnostics: dict = field(default_factory=dict)
    verdict: str = "found"


@dataclass
class NoSolution:
    reason: str
    diagnostics: dict = field(default_factory=dict)
    verdict: str = "infeasible"


@dataclass
class BudgetExhausted:
    reason: str
    diagnostics: dict = field(default_factory=dict)
    verdict: str = "budget"


def _demand(norm: Normalized, trees: bool) -> dict:
    delta = {}
    for i, (r, S) in enumerate(zip(norm.roots, norm.sinks), start=1):
        delta[r] = (i,) * (len(S) if trees else 1)
        for s in S:
            delta[s] = (-i,)
    return delta


def _dual_instance(D, phi, A, norm, R, trees) -> tuple:
    """The cohomology instance on the extended dual for one representative."""
    ext = extended_dual(D, phi, A)
    k = A.k
    allowed = []
    for a in range(len(D.arcs)):
        allowed.append([i for i in range(1, k + 1)
                        if norm.arcsets[i - 1] is None or a in norm.arcsets[i - 1]])
    if trees:
        chord = PowerSet(A, {i: "*" for i in range(1, k + 1)})
        base = [PowerSet(A, {i: "+" for i in gens}) for gens in allowed]
    else:
        chord = SymbolSet(A, [s for i in range(1, k + 1) for s in (i, -i)])
        base = [SymbolSet(A, gens) for gens in allowed]
    arcs = []
    is_base = {b: a for a, b in enumerate(ext.base)}
    for idx, ea in enumerate(ext.arcs):
        H = base[is_base[idx]] if idx in is_base else chord
        arcs.append(Arc(ea.tail, ea.head, ea.label, H))
    return CohomologyInstance(A, ext.n, arcs, R=R), ext


def _solve(inst: RoutingInstance, trees: bool, budget: int, max_iterations: int,
           dump=None) -> Found | NoSolution | BudgetExhausted:
    norm = normalize_terminals(inst)
    D = norm.D
    A = Alphabet(inst.k)
    delta = _demand(norm, trees)
    W = list(delta)
    R = r_faces(D, W)
    diag = {"faces_R": sorted(R), "genus": D.genus, "cover": list(norm.cover)}
    # a tree solution carries g_i^l with l <= |S_i| on every arc
    m = max(len(S) for S in norm.sinks) if trees else 1
    try:
        reps = enumerate_representatives(D, delta, m, R, A, budget=budget)
    except EnumerationBudgetExceeded as exc:
        return BudgetExhausted(str(exc), diag)
    diag["representatives"] = len(reps)
    if dump is not None:
        dump(D, reps)
    aborted = 0
    for j, phi in enumerate(reps):
        cinst, ext = _dual_instance(D, phi, A, norm, R, trees)
        out = solve(cinst, max_iterations=max_iterations)
        if isinstance(out, Aborted):
            aborted += 1
            continue
        if not isinstance(out, Feasible):
            continue
        psi = [out.psi[b] for b in ext.base]
        sol = _extract(inst, norm, D, psi, delta, A, trees)
        if not verify_solution(inst, sol):
            raise InternalCheckFailed(f"representative {j} gave an invalid routing")
        diag.update(tried=j + 1, aborted=aborted)
        return Found(sol, diag)
    diag.update(tried=len(reps), aborted=aborted)
    if aborted:
        return BudgetExhausted(f"{aborted} cohomology solves hit the iteration cap", diag)
    return NoSolution("no representative admits a feasible labelling", diag)


def _extract(inst, norm, D, psi, delta, A, trees) -> RoutingSolution:
    """Read the routing off the path decomposition of psi, dropping cycles."""
    system = decompose(D, psi, delta, A)
    paths = [r for r in system.routes if r.kind == "path"]
    expected = sum(len(S) for S in norm.sinks)
    if len(paths) != expected or any(not r.is_directed() for r in paths):
        raise InternalCheckFailed("decomposition does not consist of directed paths")
    by_gen: dict = {}
    for r in paths:
        by_gen.setdefault(r.xi, []).append(r)
    n0 = norm.original_n
    routes = []
    for i, dem in enumerate(inst.demands, start=1):
        arcs = sorted({s.arc for r in by_gen.get(i, []) for s in r.steps} - norm.added)
        if not trees and len(dem.sinks) == 1:
            (r,) = by_gen[i]
            verts = [v for v in r.vertices if v < n0]
            steps = [s.arc for s in r.steps if s.arc not in norm.added]
            routes.append((verts, steps))
        else:
            routes.append((dem.root, _arborescence(inst.D, dem.root, dem.sinks, arcs)))
    kind = "tree" if trees else "path"
    return RoutingSolution(kind, routes)


def _arborescence(D: EmbeddedDigraph, root: int, sinks: Sequence[int], arcs: Sequence[int]) -> list[int]:
    """Breadth-first arborescence inside ``arcs``, pruned to the sinks."""
    out: dict = {}
    for a in arcs:
        out.setdefault(D.arcs[a][0], []).append(a)
    parent = {root: None}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for a in out.get(v, []):
            h = D.arcs[a][1]
            if h not in parent:
                parent[h] = a
                queue.append(h)
    keep = set()
    for s in sinks:
        x = s
        while parent.get(x) is not None:
            a = parent[x]
            if a in keep:
                break
            keep.add(a)
            x = D.arcs[a][0]
    return sorted(keep)


def solve_disjoint_paths(inst: RoutingInstance, budget: int = DEFAULT_BUDGET,
                         max_iterations: int = 1_000_000, dump=None):
    """k vertex-disjoint directed r_i -> s_i paths, or a reason why none exist."""
    if any(len(d.sinks) != 1 for d in inst.demands):
        raise RoutingError("path demands need exactly one sink each")
    return _solve(inst, False, budget, max_iterations, dump)


def solve_disjoint_trees(inst: RoutingInstance, budget: int = DEFAULT_BUDGET,
                         max_iterations: int = 1_000_000, dump=None):
    """k vertex-disjoint arborescences rooted at r_i covering S_i inside A_i."""
    return _solve(inst, True, budget, max_iterations, dump)


def solve_routing(inst: RoutingInstance, **kw):
    """Paths when every demand is a pair, trees otherwise."""
    if all(d.kind == "pair" for d in inst.demands):
        return solve_disjoint_paths(inst, **kw)
    return solve_disjoint_trees(inst, **kw)
