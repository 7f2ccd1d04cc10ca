"""Cohomology feasibility over graph groups.

Given a digraph with arc labels phi(a) and closed sets H(a), find a vertex
potential f with f(u)^-1 phi(a) f(w) in H(a) for every arc a = (u, w).

Arcs are used in both directions: directed arc ``2*i`` is arc i forward and
``2*i + 1`` is its reverse, carrying phi(a)^-1 and H(a)^-1.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .convexity import ClosedSet, SymbolSet, View, chain_member, closure_point, convex_min, parse_closed_set
from .two_sat import PairSystem, Unsat, solve_pairs
from .word import Alphabet, AlphabetError, Word

Potential = tuple  # tuple of words indexed by vertex


class InstanceFormatError(ValueError):
    pass


class IterationCapExceeded(RuntimeError):
    def __init__(self, msg, trail=None):
        super().__init__(msg)
        self.trail = trail or []


class CycleViolation(Exception):
    """A closed walk C with no x such that x^-1 phi(C) x lies in H(C)."""

    def __init__(self, walk):
        super().__init__(f"closed walk {walk} has no valid conjugator")
        self.walk = walk


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    phi: Word
    H: ClosedSet


@dataclass
class CohomologyInstance:
    alphabet: Alphabet
    n: int
    arcs: list
    R: frozenset = frozenset()

    def __post_init__(self):
        A = self.alphabet
        if self.n < 1:
            raise InstanceFormatError("need at least one vertex")
        arcs = []
        for a in self.arcs:
            if not (0 <= a.tail < self.n and 0 <= a.head < self.n):
                raise InstanceFormatError(f"arc {a.tail}->{a.head} leaves the vertex range")
            arcs.append(Arc(a.tail, a.head, A.reduce(A.check(a.phi)), a.H))
        self.arcs = arcs
        self.R = frozenset(self.R)
        if any(not 0 <= r < self.n for r in self.R):
            raise InstanceFormatError("R names an unknown vertex")
        self._dcache = None

    # directed arcs ------------------------------------------------------

    def darcs(self):
        """List of (tail, head, phi, H) for both directions of every arc."""
        if self._dcache is None:
            A = self.alphabet
            out = []
            for a in self.arcs:
                out.append((a.tail, a.head, a.phi, a.H))
                out.append((a.head, a.tail, A.inv(a.phi), a.H.inverse()))
            self._dcache = out
        return self._dcache

    def out_darcs(self):
        out = [[] for _ in range(self.n)]
        for d, (u, _, _, _) in enumerate(self.darcs()):
            out[u].append(d)
        return out

    @property
    def sigma(self) -> int:
        return max((len(a.phi) for a in self.arcs), default=0)


# -- basic predicates -------------------------------------------------------

def psi(inst: CohomologyInstance, f: Sequence[Word]) -> list[Word]:
    A = inst.alphabet
    return [A.reduce(A.inv(f[a.tail]) + a.phi + tuple(f[a.head])) for a in inst.arcs]


def is_feasible(inst: CohomologyInstance, f: Sequence[Word]) -> bool:
    return all(a.H.contains(p) for a, p in zip(inst.arcs, psi(inst, f)))


class _Kview(View):
    """K = phi^-1 . (elements >= x) . H, the set whose minimum is beta."""

    def __init__(self, A, x, phi, H):
        self.alphabet = A
        self.x, self.phi, self.H = tuple(x), tuple(phi), H
        self._xi_phi = A.inv(x) + tuple(phi)

    def contains(self, z):
        A = self.alphabet
        y = A.reduce(self._xi_phi + tuple(z))
        x = self.x
        if A.is_free:
            # the longest prefix of y that x does not cancel into
            u = () if x and y and y[0] == -x[-1] else y
        else:
            u = closure_point(_Divisible(A, x), y, A)
        return self.H.contains(A.reduce(A.inv(u) + y))

    def witness(self):
        A = self.alphabet
        return A.reduce(A.inv(self.phi) + self.x)


class _Divisible:
    """{s : |x s| = |x| + |s|}, left-closed."""

    def __init__(self, A, x):
        self.alphabet, self.x = A, tuple(x)

    def contains(self, s):
        return self.alphabet.divides(self.x, s)


class _Delta:
    """{y : not y >= z} for a left-interval z."""

    def __init__(self, A, z):
        self.A, self.z = A, tuple(z)

    def contains(self, y):
        return not self.A.leq(self.z, y)


class Solver:
    """Caches beta values for one instance."""

    def __init__(self, inst: CohomologyInstance, max_iterations: int = 1_000_000,
                 growth_check: int | None = None, diagnostics: bool = False):
        self.inst = inst
        self.A = inst.alphabet
        self.darcs = inst.darcs()
        self.out = inst.out_darcs()
        self.max_iterations = max_iterations
        self.growth_check = growth_check or 4 * inst.n * (inst.sigma + 1) + 8
        self.diagnostics = diagnostics
        self._beta: dict = {}
        self.stats = dict(beta_calls=0, closure_iterations=0)

    # beta and pre-feasibility ----------------------------------------------

    def beta(self, d: int, x: Sequence[int]) -> Word:
        A = self.A
        key = (d, A.key(x))
        got = self._beta.get(key)
        if got is None:
            self.stats["beta_calls"] += 1
            _, _, phi, H = self.darcs[d]
            got = convex_min(_Kview(A, x, phi, H))
            self._beta[key] = got
        return got

    def in_K(self, d: int, x, z) -> bool:
        _, _, phi, H = self.darcs[d]
        return _Kview(self.A, x, phi, H).contains(z)

    def is_pre_feasible(self, f) -> bool:
        return all(self.A.leq(self.beta(d, f[u]), f[w]) for d, (u, w, _, _) in enumerate(self.darcs))

    def in_U(self, f) -> bool:
        """For pre-feasible f: some x >= f(u), z >= f(w) with x^-1 phi z in H, on every arc."""
        return all(self.in_K(2 * i, f[a.tail], f[a.head]) for i, a in enumerate(self.inst.arcs))

    def closure(self, f) -> Potential | None:
        """Smallest pre-feasible g >= f, or None for infinity.

        Raises CycleViolation when runaway growth exposes a closed walk
        with no valid conjugator, and IterationCapExceeded otherwise.
        """
        A = self.A
        f = [tuple(w) for w in f]
        rho = max((len(w) for w in f), default=0)
        src: list = [None] * len(f)
        queue = deque(range(len(self.darcs)))
        queued = [True] * len(self.darcs)
        it = 0
        limit = rho + self.growth_check
        while queue:
            d = queue.popleft()
            queued[d] = False
            u, w, _, _ = self.darcs[d]
            b = self.beta(d, f[u])
            if A.leq(b, f[w]):
                continue
            it += 1
            self.stats["closure_iterations"] += 1
            j = A.join(f[w], b)
            if j is None:
                return None
            f[w] = j
            src[w] = d
            if len(j) > limit:
                walk = self._runaway_cycle(src, w)
                if walk is not None:
                    raise CycleViolation(walk)
                limit *= 2
            if it > self.max_iterations:
                raise IterationCapExceeded(f"closure exceeded {self.max_iterations} updates",
                                           trail=self._trail(src, w))
            for e in self.out[w]:
                if not queued[e]:
                    queued[e] = True
                    queue.append(e)
        return tuple(f)

    def _trail(self, src, w, limit=None):
        limit = limit or 4 * self.inst.n + 4
        trail = []
        v = w
        while src[v] is not None and len(trail) < limit:
            d = src[v]
            trail.append(d)
            v = self.darcs[d][0]
        trail.reverse()
        return trail

    def _runaway_cycle(self, src, w):
        trail = self._trail(src, w)
        verts = [self.darcs[d][0] for d in trail]
        if trail:
            verts.append(self.darcs[trail[-1]][1])
        seen = set()
        for i in range(len(trail)):
            for j in range(i + 1, len(trail) + 1):
                if verts[i] == verts[j]:
                    walk = tuple(trail[i:j])
                    if walk in seen:
                        continue
                    seen.add(walk)
                    if check_cycle_pair(self.inst, walk, ()) is None:
                        return list(walk)
        return short_violating_cycle(self.inst, max_len=min(6, 2 * self.inst.n + 2))

    # the pair system ----------------------------------------------------

    def membership_E(self, d: int, x, z) -> bool:
        """phi(a) not in Delta_x H(a) Delta_z^-1, for x <= phi(a), z <= phi(a)^-1."""
        A = self.A
        _, _, phi, H = self.darcs[d]
        if not x or not z:
            return False  # Delta_1 is empty
        c = closure_point(_Delta(A, x), phi, A)
        y = A.reduce(A.inv(c) + phi)
        c2 = closure_point(_Delta(A, z), A.inv(y), A)
        return not H.contains(A.reduce(y + c2))

    def interval_pairs(self):
        X = []
        index = {}
        for d, (u, _, phi, _) in enumerate(self.darcs):
            for x in self.A.join_irreducibles(phi):
                k = (u, self.A.key(x))
                if k not in index:
                    index[k] = len(X)
                    X.append((u, x))
        return X, index

    def solve(self) -> "SolveOutcome":
        inst, A = self.inst, self.A
        n = inst.n
        try:
            X, index = self.interval_pairs()
            E = set()
            for i, a in enumerate(inst.arcs):
                d = 2 * i
                for x in A.join_irreducibles(a.phi):
                    for z in A.join_irreducibles(A.inv(a.phi)):
                        if self.membership_E(d, x, z):
                            E.add(frozenset((index[(a.tail, A.key(x))], index[(a.head, A.key(z))])))
            one = [()] * n
            fbar = []
            for v, x in X:
                f = list(one)
                f[v] = x
                fbar.append(self.closure(f))
            Ep = set()
            for i, j in itertools.combinations_with_replacement(range(len(X)), 2):
                if fbar[i] is None or fbar[j] is None:
                    Ep.add(frozenset((i, j)))
                    continue
                g = _join_potentials(A, fbar[i], fbar[j])
                if g is None or not self.in_U(g):
                    Ep.add(frozenset((i, j)))
        except CycleViolation as cv:
            return Infeasible("cycle", {"walk": cv.walk})
        except IterationCapExceeded as exc:
            return Aborted(str(exc), {"trail": exc.trail, **self.stats})

        system = PairSystem(max(len(X), 1), frozenset(frozenset(i + 1 for i in e) for e in E),
                            frozenset(frozenset(i + 1 for i in e) for e in Ep))
        Y = solve_pairs(system)
        if isinstance(Y, Unsat):
            detail = {"unsat": Y, "X": X}
            return Infeasible("pair-system", detail)
        f = one
        for i in sorted(Y):
            f = _join_potentials(A, f, fbar[i - 1])
            if f is None:
                return Aborted("join of chosen closures is infinite", dict(self.stats))
        f = tuple(f)
        if not is_feasible(inst, f):
            bad = [i for i, (a, p) in enumerate(zip(inst.arcs, psi(inst, f))) if not a.H.contains(p)]
            return Aborted("assembled potential failed the final check", {"arcs": bad, **self.stats})
        return Feasible(f, psi(inst, f))


def _join_potentials(A, f, g):
    out = []
    for x, y in zip(f, g):
        j = A.join(x, y)
        if j is None:
            return None
        out.append(j)
    return tuple(out)


# -- outcomes -----------------------------------------------------------------

@dataclass
class Feasible:
    f: tuple
    psi: list
    verdict: str = "feasible"


@dataclass
class Infeasible:
    reason: str
    certificate: dict = field(default_factory=dict)
    verdict: str = "infeasible"


@dataclass
class Aborted:
    reason: str
    diagnostics: dict = field(default_factory=dict)
    verdict: str = "aborted"


SolveOutcome = Feasible | Infeasible | Aborted


# -- public functions ---------------------------------------------------------

def beta(inst: CohomologyInstance, arc: int, x: Sequence[int], reverse: bool = False) -> Word:
    return Solver(inst).beta(2 * arc + int(reverse), inst.alphabet.reduce(x))


def is_pre_feasible(inst: CohomologyInstance, f) -> bool:
    return Solver(inst).is_pre_feasible([inst.alphabet.reduce(w) for w in f])


def pre_feasible_closure(inst: CohomologyInstance, f, max_iterations: int = 1_000_000):
    """Smallest pre-feasible potential above f, or None when it is infinite.

    The iteration is only guaranteed to settle when every cycle passes the
    conjugation test.  If values keep growing and a failing closed walk is
    found, CycleViolation is raised with that walk.
    """
    return Solver(inst, max_iterations=max_iterations).closure([inst.alphabet.reduce(w) for w in f])


def membership_E(inst: CohomologyInstance, arc: int, x, z) -> bool:
    return Solver(inst).membership_E(2 * arc, x, z)


def reduce_r_cohomology(inst: CohomologyInstance, R: Iterable[int] | None = None) -> CohomologyInstance:
    """Add a loop labelled by a fresh generator, with H = {1, g0}, at every vertex of R."""
    R = frozenset(inst.R if R is None else R)
    if not R:
        return CohomologyInstance(inst.alphabet, inst.n, list(inst.arcs))
    A2 = inst.alphabet.extended(1)
    g0 = A2.k
    arcs = [Arc(a.tail, a.head, a.phi, a.H.with_alphabet(A2)) for a in inst.arcs]
    marker = SymbolSet(A2, [g0])
    arcs += [Arc(r, r, (g0,), marker) for r in sorted(R)]
    return CohomologyInstance(A2, inst.n, arcs)


def solve(inst: CohomologyInstance, max_iterations: int = 1_000_000, diagnostics: bool = False) -> SolveOutcome:
    """Solve the (R-)cohomology feasibility problem."""
    if not inst.R:
        return Solver(inst, max_iterations, diagnostics=diagnostics).solve()
    aug = reduce_r_cohomology(inst)
    out = Solver(aug, max_iterations, diagnostics=diagnostics).solve()
    if not isinstance(out, Feasible):
        return out
    A, g0 = inst.alphabet, aug.alphabet.k
    # killing g0 keeps every original constraint and makes f trivial on R
    f = tuple(A.reduce(tuple(s for s in w if abs(s) != g0)) for w in out.f)
    if not is_feasible(inst, f) or any(f[r] for r in inst.R):
        return Aborted("projection of the augmented solution failed", {})
    return Feasible(f, psi(inst, f))


# -- walks and the cycle-pair test -----------------------------------------

def walk_phi(inst: CohomologyInstance, walk: Sequence[int]) -> Word:
    A = inst.alphabet
    d = inst.darcs()
    return A.reduce(sum((d[e][2] for e in walk), ()))


def walk_sets(inst: CohomologyInstance, walk: Sequence[int]) -> list:
    d = inst.darcs()
    return [d[e][3] for e in walk]


def walk_vertices(inst: CohomologyInstance, walk: Sequence[int]) -> list[int]:
    d = inst.darcs()
    if not walk:
        return []
    vs = [d[walk[0]][0]]
    for e in walk:
        if d[e][0] != vs[-1]:
            raise ValueError("walk is not connected")
        vs.append(d[e][1])
    return vs


def check_cycle_pair(inst: CohomologyInstance, P: Sequence[int], Q: Sequence[int]) -> Word | None:
    """Some x with x^-1 phi(P) x in H(P) and x^-1 phi(Q) x in H(Q), or None.

    P and Q are closed walks given as directed-arc indices (2i forward,
    2i+1 reverse).  Candidates for x are the prefixes of phi(P), phi(Q)
    and their inverses, tried by increasing size.
    """
    A = inst.alphabet
    for W in (P, Q):
        vs = walk_vertices(inst, W)
        if vs and vs[0] != vs[-1]:
            raise ValueError("walk is not closed")
    if P and Q and walk_vertices(inst, P)[0] != walk_vertices(inst, Q)[0]:
        raise ValueError("walks start at different vertices")
    pp, qq = walk_phi(inst, P), walk_phi(inst, Q)
    hp, hq = walk_sets(inst, P), walk_sets(inst, Q)
    cands = {}
    for w in (pp, A.inv(pp), qq, A.inv(qq)):
        for x in A.prefixes(w):
            cands.setdefault(A.key(x), x)
    for x in sorted(cands.values(), key=lambda w: (len(w), w)):
        xi = A.inv(x)
        if chain_member(hp, A.reduce(xi + pp + x), A) and chain_member(hq, A.reduce(xi + qq + x), A):
            return x
    return None


def short_violating_cycle(inst: CohomologyInstance, max_len: int = 4):
    """Search closed walks without immediate backtracking for one failing the conjugation test."""
    d = inst.darcs()
    out = inst.out_darcs()
    seen = set()
    for start in range(inst.n):
        stack = [(start, ())]
        while stack:
            v, walk = stack.pop()
            if walk and v == start:
                if walk not in seen:
                    seen.add(walk)
                    if check_cycle_pair(inst, walk, ()) is None:
                        return list(walk)
            if len(walk) >= max_len:
                continue
            for e in out[v]:
                if walk and e == walk[-1] ^ 1:
                    continue
                stack.append((d[e][1], walk + (e,)))
    return None


# -- text format ----------------------------------------------------------

def parse_instance(text: str) -> CohomologyInstance:
    """Parse the line format::

        cohomology
        alphabet 2            # optional: generator count
        independent 1 2       # optional, repeatable
        3                     # vertex count
        0 1 phi=g1 g2' H=len<=2
        R: 0 2                # optional
    """
    lines = []
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].strip()
        if ln:
            lines.append(ln)
    if not lines or lines[0] != "cohomology":
        raise InstanceFormatError("missing 'cohomology' header")
    k = None
    pairs = []
    n = None
    raw_arcs = []
    R = []
    for ln in lines[1:]:
        head = ln.split()[0]
        try:
            if head == "alphabet":
                k = int(ln.split()[1])
            elif head == "independent":
                _, i, j = ln.split()
                pairs.append((int(i), int(j)))
            elif head == "R:":
                R = [int(t) for t in ln.split()[1:]]
            elif n is None and ln.isdigit():
                n = int(ln)
            else:
                if " phi=" not in ln or " H=" not in ln:
                    raise InstanceFormatError(f"bad arc line {ln!r}")
                ends, rest = ln.split(" phi=", 1)
                phi, hs = rest.split(" H=", 1)
                u, w = (int(t) for t in ends.split())
                raw_arcs.append((u, w, phi.strip(), hs.strip()))
        except ValueError as exc:
            if isinstance(exc, InstanceFormatError):
                raise
            raise InstanceFormatError(f"bad line {ln!r}: {exc}") from None
    if n is None:
        raise InstanceFormatError("missing vertex count")
    if k is None:
        k = 1
        for _, _, phi, hs in raw_arcs:
            for tok in (phi + " " + hs).replace("{", " ").replace("}", " ").replace(",", " ").split():
                tok = tok.rstrip("'").split(":")[0]
                if tok.startswith("g") and tok[1:].isdigit():
                    k = max(k, int(tok[1:]))
    try:
        A = Alphabet(k, pairs)
        arcs = [Arc(u, w, A.parse(phi), parse_closed_set(hs, A)) for u, w, phi, hs in raw_arcs]
    except (AlphabetError, ValueError) as exc:
        raise InstanceFormatError(str(exc)) from None
    return CohomologyInstance(A, n, arcs, frozenset(R))


def format_solution(inst: CohomologyInstance, out: Feasible) -> str:
    A = inst.alphabet
    lines = [f"f {v} {A.render(w)}" for v, w in enumerate(out.f)]
    lines += [f"psi {i} {A.render(w)}" for i, w in enumerate(out.psi)]
    return "\n".join(lines) + "\n"


def parse_solution(inst: CohomologyInstance, text: str) -> tuple:
    A = inst.alphabet
    f: list = [None] * inst.n
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].strip()
        if not ln:
            continue
        parts = ln.split(None, 2)
        if parts[0] == "f":
            try:
                v = int(parts[1])
                f[v] = A.reduce(A.parse(parts[2] if len(parts) > 2 else "1"))
            except (ValueError, IndexError, AlphabetError) as exc:
                raise InstanceFormatError(f"bad solution line {ln!r}: {exc}") from None
        elif parts[0] != "psi":
            raise InstanceFormatError(f"bad solution line {ln!r}")
    if any(w is None for w in f):
        raise InstanceFormatError("solution does not cover every vertex")
    return tuple(f)
