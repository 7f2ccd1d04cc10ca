"""Brute-force reference implementations used only by the tests.

Everything here is written against the definitions directly, without
calling into the package, so disagreements point at real bugs.
"""

from __future__ import annotations

import itertools


class TraceOracle:
    """Slow graph-group arithmetic over ints +-1..+-k."""

    def __init__(self, k, pairs=()):
        self.k = k
        self.pairs = {frozenset(p) for p in pairs}

    def commute(self, a, b):
        return abs(a) != abs(b) and frozenset((abs(a), abs(b))) in self.pairs

    def reduce(self, w):
        w = list(w)
        changed = True
        while changed:
            changed = False
            for i in range(len(w)):
                for j in range(i + 1, len(w)):
                    if w[j] == -w[i] and all(self.commute(w[i], w[t]) for t in range(i + 1, j)):
                        del w[j], w[i]
                        changed = True
                        break
                if changed:
                    break
        return tuple(w)

    @staticmethod
    def inv(w):
        return tuple(-a for a in reversed(w))

    def canon(self, w):
        """Lexicographically least word among commutation rearrangements."""
        w = list(self.reduce(w))
        out = []
        while w:
            mins = [i for i in range(len(w))
                    if all(self.commute(w[i], w[j]) for j in range(i))]
            i = min(mins, key=lambda t: (abs(w[t]), w[t] < 0))
            out.append(w.pop(i))
        return tuple(out)

    def size(self, w):
        return len(self.reduce(w))

    def eq(self, x, y):
        return self.canon(x) == self.canon(y)

    def leq(self, x, y):
        return self.size(x) + self.size(self.inv(x) + tuple(y)) == self.size(y)

    def symbols(self):
        return [s * g for g in range(1, self.k + 1) for s in (1, -1)]

    def common_lower_bounds(self, *xs):
        """All w below every x, by climbing one symbol at a time."""
        seen = {(): ()}
        stack = [()]
        while stack:
            w = stack.pop()
            for a in self.symbols():
                v = self.reduce(w + (a,))
                if len(v) != len(w) + 1:
                    continue
                c = self.canon(v)
                if c in seen:
                    continue
                if all(self.leq(c, x) for x in xs):
                    seen[c] = c
                    stack.append(c)
        return list(seen.values())

    def lower_covers(self, x):
        x = self.reduce(x)
        out = []
        for i in range(len(x)):
            if all(self.commute(x[i], x[j]) for j in range(i + 1, len(x))):
                out.append(x[:i] + x[i + 1:])
        return out

    def elements(self, n):
        """Canonical words of every element of size <= n."""
        level = {()}
        out = [()]
        for _ in range(n):
            nxt = set()
            for w in level:
                for a in self.symbols():
                    v = self.reduce(w + (a,))
                    if len(v) == len(w) + 1:
                        nxt.add(self.canon(v))
            out.extend(sorted(nxt))
            level = nxt
        return out

    def join_irreducibles(self, x):
        """Elements y <= x with exactly one lower cover."""
        return [y for y in self.common_lower_bounds(x) if y and len(self.lower_covers(y)) == 1]


def identity_by_matching(word, commute):
    """Perfect matching characterisation of the identity, unoptimised."""
    n = len(word)
    if n % 2:
        return False
    # every symbol needs a partner of opposite sign, so the signed counts balance
    for a in set(map(abs, word)):
        if sum(1 if t == a else -1 for t in word if abs(t) == a):
            return False
    idx = list(range(n))

    def rec(free, pairs):
        if not free:
            return True
        i = free[0]
        for j in free[1:]:
            if word[j] != -word[i]:
                continue
            good = True
            for p, q in pairs:
                crosses = (p < i < q < j) or (i < p < j < q)
                if crosses and not commute(word[p], word[i]):
                    good = False
                    break
            if good:
                rest = [t for t in free if t not in (i, j)]
                if rec(rest, pairs + [(i, j)]):
                    return True
        return False

    return rec(idx, [])


def all_subsets(items, max_size):
    for r in range(max_size + 1):
        yield from itertools.combinations(items, r)


def brute_cohomology(inst, bound=4):
    """A feasible potential with every |f(v)| <= bound, or None.

    Backtracks over vertices in BFS order.  Once a tree neighbour is fixed,
    f(v) is one of finitely many values forced by the members of H(a).
    """
    A = inst.alphabet
    n = inst.n
    universe = A.elements_up_to(bound)
    adj = [[] for _ in range(n)]
    for i, a in enumerate(inst.arcs):
        adj[a.tail].append((i, a.head))
        adj[a.head].append((i, a.tail))
    comps, parent = [], {}
    for s in range(n):
        if s in parent:
            continue
        parent[s] = None
        queue, order = [s], []
        comps.append(order)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for i, w in adj[v]:
                if w not in parent:
                    parent[w] = (i, v)
                    queue.append(w)

    def members(H):
        return H.elements() if hasattr(H, "elements") else None

    f = [None] * n

    def consistent(v):
        for i, w in adj[v]:
            if f[w] is None:
                continue
            a = inst.arcs[i]
            val = A.reduce(A.inv(f[a.tail]) + a.phi + f[a.head])
            if not a.H.contains(val):
                return False
        return True

    def candidates(v):
        if parent[v] is None:
            return universe
        i, u = parent[v]
        a = inst.arcs[i]
        hs = members(a.H)
        if hs is None:
            return universe
        out = {}
        for h in hs:
            if a.tail == u and a.head == v:
                c = A.reduce(A.inv(a.phi) + f[u] + h)
            else:
                c = A.reduce(a.phi + f[u] + A.inv(h))
            if len(c) <= bound:
                out[A.key(c)] = c
        return list(out.values())

    def rec(order, t):
        if t == len(order):
            return True
        v = order[t]
        for c in candidates(v):
            f[v] = c
            if consistent(v) and rec(order, t + 1):
                return True
        f[v] = None
        return False

    # components share no arcs, so each is searched on its own
    return tuple(f) if all(rec(order, 0) for order in comps) else None


# -- routing ----------------------------------------------------------------------

def _out_arcs(D, allowed):
    out = [[] for _ in range(D.n)]
    for a, (t, h) in enumerate(D.arcs):
        if allowed is None or a in allowed:
            out[t].append((a, h))
    return out


def _simple_paths(out, s, t, blocked):
    """All simple directed s -> t paths avoiding ``blocked``, as (vertices, arcs)."""
    if s in blocked or t in blocked:
        return
    if s == t:
        yield [s], []
        return
    verts, arcs = [s], []
    on = {s}

    def rec(v):
        for a, w in out[v]:
            if w in on or w in blocked:
                continue
            verts.append(w)
            arcs.append(a)
            if w == t:
                yield list(verts), list(arcs)
            else:
                on.add(w)
                yield from rec(w)
                on.discard(w)
            verts.pop()
            arcs.pop()

    yield from rec(s)


def brute_disjoint_paths(D, demands):
    """First tuple of pairwise vertex-disjoint paths found by backtracking, or None.

    ``demands`` is a list of (r, s, allowed arcs or None).
    """
    terminals = [v for r, s, _ in demands for v in (r, s)]
    outs = [_out_arcs(D, allowed) for _, _, allowed in demands]

    def rec(i, used):
        if i == len(demands):
            return []
        r, s, _ = demands[i]
        # the other demands' terminals may not be touched either
        others = {v for j, v in enumerate(terminals) if j // 2 > i}
        for verts, arcs in _simple_paths(outs[i], r, s, used | others):
            rest = rec(i + 1, used | set(verts))
            if rest is not None:
                return [(verts, arcs)] + rest
        return None

    return rec(0, set())


def brute_disjoint_trees(D, demands):
    """Vertex-disjoint arborescences by growing one root-to-sink path at a time.

    ``demands`` is a list of (r, sinks, allowed arcs or None).  Returns a
    list of (root, arcs) or None.
    """
    outs = [_out_arcs(D, allowed) for _, _, allowed in demands]
    reserved = [{r, *S} for r, S, _ in demands]

    def grow(i, tree_vs, tree_arcs, todo, used):
        if not todo:
            rest = rec(i + 1, used | tree_vs)
            return None if rest is None else [(demands[i][0], sorted(tree_arcs))] + rest
        s = todo[0]
        if s in tree_vs:
            return grow(i, tree_vs, tree_arcs, todo[1:], used)
        others = set().union(*(reserved[j] for j in range(len(demands)) if j != i))
        for start in sorted(tree_vs):
            blocked = (used | others | tree_vs) - {start}
            for verts, arcs in _simple_paths(outs[i], start, s, blocked):
                out = grow(i, tree_vs | set(verts), tree_arcs | set(arcs), todo[1:], used)
                if out is not None:
                    return out
        return None

    def rec(i, used):
        if i == len(demands):
            return []
        r, S, _ = demands[i]
        if r in used:
            return None
        return grow(i, {r}, set(), list(S), used)

    return rec(0, set())


# -- elementary delta-joins ------------------------------------------------------------

def _free_reduce(w):
    out = []
    for a in w:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def _inv(w):
    return tuple(-a for a in reversed(w))


def free_words(k, m):
    """Reduced words over g1..gk of length <= m."""
    out = [()]
    frontier = [()]
    for _ in range(m):
        nxt = []
        for w in frontier:
            for a in range(-k, k + 1):
                if a and not (w and w[-1] == -a):
                    nxt.append(w + (a,))
        out += nxt
        frontier = nxt
    return out


def arc_end_rotations(D):
    """Counterclockwise arc-ends (arc, 0 tail / 1 head) at each vertex, from the faces."""
    def head(d):
        t, h = D.arcs[d // 2]
        return t if d % 2 else h

    nxt = {}
    for F in D.faces:
        for x, y in zip(F, F[1:] + F[:1]):
            nxt[(x // 2, 1 - x % 2)] = (y // 2, y % 2)
    rot = [[] for _ in range(D.n)]
    done = set()
    for v in range(D.n):
        ends = sorted((i, e) for i, (t, h) in enumerate(D.arcs) for e in (0, 1) if (t, h)[e] == v)
        if not ends:
            continue
        cur = ends[0]
        while cur not in done:
            done.add(cur)
            rot[v].append(cur)
            cur = nxt[cur]
    return rot


def _strand_ends(rot_v, phi):
    seq = []
    for i, e in rot_v:
        w = phi[i]
        idx = range(len(w)) if e == 0 else reversed(range(len(w)))
        for j in idx:
            seq.append(((i, j), w[j] if e == 0 else -w[j]))
    return seq


def _noncrossing(seq):
    """Every perfect matching of seq into inverse pairs with no two pairs interleaving."""
    def rec(lo, hi):
        if lo > hi:
            yield []
            return
        for mid in range(lo + 1, hi + 1, 2):
            if seq[lo][1] != -seq[mid][1]:
                continue
            for a in rec(lo + 1, mid - 1):
                for b in rec(mid + 1, hi):
                    yield [(lo, mid)] + a + b
    if len(seq) % 2 == 0:
        yield from rec(0, len(seq) - 1)


def is_elementary(D, phi, W, rot=None):
    """Some choice of noncrossing pairings leaves only paths (no closed strand loops)."""
    rot = rot or arc_end_rotations(D)
    strands = [(i, j) for i, w in enumerate(phi) for j in range(len(w))]
    if not strands:
        return True
    per_vertex = []
    for v in range(D.n):
        if v in W:
            continue
        seq = _strand_ends(rot[v], phi)
        options = [[(seq[x][0], seq[y][0]) for x, y in M] for M in _noncrossing(seq)]
        if not options:
            return False
        per_vertex.append(options)
    touches = set()
    for v in W:
        for s, _ in _strand_ends(rot[v], phi):
            touches.add(s)
    for choice in itertools.product(*per_vertex):
        parent = {s: s for s in strands}

        def find(s):
            while parent[s] != s:
                parent[s] = parent[parent[s]]
                s = parent[s]
            return s

        for pairs in choice:
            for a, b in pairs:
                parent[find(a)] = find(b)
        roots = {find(s) for s in strands}
        if roots <= {find(s) for s in touches}:
            return True
    return False


def brute_elementary_joins(D, delta, k, m):
    """All elementary delta-joins with every label of length <= m, by backtracking."""
    rot = arc_end_rotations(D)
    W = {v for v, w in delta.items() if w}
    words = free_words(k, m)
    order, seen = [], set()
    for v in range(D.n):
        for i, _ in rot[v]:
            if i not in seen:
                seen.add(i)
                order.append(i)
    pos = {i: t for t, i in enumerate(order)}
    closes = [[] for _ in order]
    for v in range(D.n):
        if rot[v]:
            closes[max(pos[i] for i, _ in rot[v])].append(v)
    phi = [None] * len(D.arcs)
    out = []

    def product(v):
        w = []
        for i, e in rot[v]:
            w.extend(phi[i] if e == 0 else _inv(phi[i]))
        return _free_reduce(w)

    def rec(t):
        if t == len(order):
            if is_elementary(D, phi, W, rot):
                out.append(list(phi))
            return
        i = order[t]
        for w in words:
            phi[i] = w
            if all(product(v) == _free_reduce(delta.get(v, ())) for v in closes[t]):
                rec(t + 1)
        phi[i] = None

    rec(0)
    return out


def face_potential_between(D, phi, psi, R):
    """p with p = 1 on R and psi(a) = p(right) phi(a) p(left)^-1, or None.

    The dual graph is connected, so the potential is forced by walking out
    from R; it only remains to check every arc.
    """
    face_of = {}
    for fi, F in enumerate(D.faces):
        for d in F:
            face_of[d] = fi
    p = {F: () for F in R}
    todo = list(R)
    while todo:
        F = todo.pop()
        for i in range(len(D.arcs)):
            right, left = face_of[2 * i], face_of[2 * i + 1]
            if right == F and left not in p:
                p[left] = _free_reduce(_inv(psi[i]) + p[F] + tuple(phi[i]))
                todo.append(left)
            elif left == F and right not in p:
                p[right] = _free_reduce(tuple(psi[i]) + p[F] + _inv(phi[i]))
                todo.append(right)
    for i in range(len(D.arcs)):
        right, left = face_of[2 * i], face_of[2 * i + 1]
        if _free_reduce(p[right] + tuple(phi[i]) + _inv(p[left])) != _free_reduce(psi[i]):
            return None
    return p
