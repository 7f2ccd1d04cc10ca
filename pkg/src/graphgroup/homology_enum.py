"""Representatives of R-homology classes of delta-joins with bounded labels.

Two reductions bring an embedded graph down to something small.

First a forest of dual arcs is grown from the faces of R.  Pushing labels
off the forest with a face potential (fixed to 1 on R) gives every labelling
a unique normal form that is 1 on the forest arcs, so two labellings are
R-homologous exactly when their normal forms agree.  Deleting the forest
arcs leaves one face per member of R.

Then a spanning tree of the vertices outside W is contracted to a hub u.
What is left is u with some loops and the pendant arcs to W.  A delta-join
on this core is fixed by its loop labels; the labels on the contracted tree
are recovered by peeling leaves.  The loop labels are constrained by the
single product condition at u, which is solved for one loop at a time as a
conjugacy equation in the free group.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .surface import EmbeddedDigraph, apply_face_potential, verify_delta_join
from .word import Alphabet, Word


class CoreError(ValueError):
    pass


class EnumerationBudgetExceeded(RuntimeError):
    pass


DEFAULT_BUDGET = 200_000


def demand_alphabet(delta: dict, k: int | None = None) -> Alphabet:
    top = max((abs(s) for w in delta.values() for s in w), default=1)
    return Alphabet(max(top, k or 1))


# -- free group helpers ---------------------------------------------------------

def _strip(A: Alphabet, a: Word) -> tuple[Word, Word]:
    """a = t c t^-1 with c cyclically reduced (free group)."""
    i, j = 0, len(a) - 1
    while i < j and a[i] == -a[j]:
        i, j = i + 1, j - 1
    return a[:i], a[i:j + 1]


def conjugator(A: Alphabet, a: Sequence[int], b: Sequence[int]) -> Word | None:
    """Some c with c a c^-1 = b, or None when a and b are not conjugate."""
    a, b = A.reduce(a), A.reduce(b)
    ta, ca = _strip(A, a)
    tb, cb = _strip(A, b)
    if len(ca) != len(cb):
        return None
    if not ca:
        return ()
    for i in range(len(ca)):
        if ca[i:] + ca[:i] == cb:
            # cb = x^-1 ca x with x = ca[:i]
            c = A.reduce(tb + A.inv(ca[:i]) + A.inv(ta))
            return c
    return None


def primitive_root(A: Alphabet, a: Sequence[int]) -> Word:
    """The r with a = r^n, n >= 1 maximal.  The centralizer of a != 1 is <r>."""
    a = A.reduce(a)
    t, c = _strip(A, a)
    L = len(c)
    for d in range(1, L + 1):
        if L % d == 0 and c[:d] * (L // d) == c:
            return A.reduce(t + c[:d] + A.inv(t))
    return a


def reduced_words(gens: Sequence[int], bound: int, caps: dict | None = None) -> Iterator[Word]:
    """Reduced words over the given generators of length <= bound.

    ``caps`` limits how many letters g^{+-1} each generator may contribute.
    """
    letters = [s for g in sorted(gens) for s in (g, -g)]
    used = dict.fromkeys(gens, 0)

    def rec(prefix):
        yield tuple(prefix)
        if len(prefix) == bound:
            return
        for s in letters:
            if prefix and prefix[-1] == -s:
                continue
            g = abs(s)
            if caps is not None and used[g] >= caps.get(g, 0):
                continue
            used[g] += 1
            prefix.append(s)
            yield from rec(prefix)
            prefix.pop()
            used[g] -= 1

    yield from rec([])


# -- dual forest and normal forms -------------------------------------------------

@dataclass
class DualForest:
    parent: list  # parent[F] = (arc, parent face) or None at a root
    depth: list
    order: list  # faces in breadth-first order
    arcs: frozenset  # arcs whose dual lies in the forest


def dual_forest(D: EmbeddedDigraph, R: Iterable[int]) -> DualForest:
    """Breadth-first forest in D* with one tree per face of R."""
    R = sorted(set(R))
    if not R:
        raise CoreError("R must contain at least one face")
    nf = len(D.faces)
    adj = [[] for _ in range(nf)]
    for i in range(len(D.arcs)):
        F, G = D.right_face(i), D.left_face(i)
        if F != G:
            adj[F].append((i, G))
            adj[G].append((i, F))
    parent: list = [None] * nf
    depth = [-1] * nf
    order = []
    queue = deque(R)
    for F in R:
        depth[F] = 0
    while queue:
        F = queue.popleft()
        order.append(F)
        for i, G in adj[F]:
            if depth[G] < 0:
                depth[G] = depth[F] + 1
                parent[G] = (i, F)
                queue.append(G)
    if min(depth) < 0:
        raise CoreError("dual graph is not connected")
    arcs = frozenset(p[0] for p in parent if p is not None)
    return DualForest(parent, depth, order, arcs)


def normal_potential(D: EmbeddedDigraph, phi: Sequence[Word], forest: DualForest, A: Alphabet) -> list[Word]:
    """The face potential, 1 on the roots, that makes phi trivial on the forest."""
    p: list = [()] * len(D.faces)
    for F in forest.order:
        if forest.parent[F] is None:
            continue
        i, up = forest.parent[F]
        if D.right_face(i) == up:
            p[F] = A.reduce(p[up] + tuple(phi[i]))
        else:
            p[F] = A.reduce(p[up] + A.inv(phi[i]))
    return p


def normal_form(D: EmbeddedDigraph, phi: Sequence[Word], R: Iterable[int], A: Alphabet,
                forest: DualForest | None = None) -> list[Word]:
    """Canonical member of the R-homology class of phi."""
    forest = forest or dual_forest(D, R)
    return apply_face_potential(D, phi, normal_potential(D, phi, forest, A), A)


# -- the core ---------------------------------------------------------------------

@dataclass
class CoreInstance:
    D: EmbeddedDigraph
    delta: dict
    kept: frozenset  # arcs that survive the face reduction
    W: frozenset
    tree: list  # (vertex, arc to its parent) leaf first; contracted arcs
    root: int | None  # the vertex that becomes the hub u
    loops: list  # arcs of D that become loops at u
    rotation: list  # arc-ends around u, counterclockwise
    groups: list  # runs of pendant ends between consecutive loop ends

    def fixed_label(self, i: int, A: Alphabet) -> Word | None:
        """Label forced on a pendant arc by delta, or None for other arcs."""
        t, h = self.D.arcs[i]
        if t in self.W:
            return A.reduce(self.delta[t])
        if h in self.W:
            return A.inv(A.reduce(self.delta[h]))
        return None

    def hub_items(self, A: Alphabet) -> list:
        """The product at u as items: ('w', word) or ('x', loop arc, sign)."""
        out = []
        loops = set(self.loops)
        for i, end in self.rotation:
            if i in loops:
                out.append(("x", i, -1 if end else 1))
            else:
                w = self.fixed_label(i, A)
                out.append(("w", A.inv(w) if end else w))
        return out

    def expand(self, loop_labels: dict, A: Alphabet) -> list[Word] | None:
        """The unique delta-join on D with these loop labels, 1 off the kept arcs."""
        D = self.D
        phi: list = [None] * len(D.arcs)
        for i in range(len(D.arcs)):
            if i not in self.kept:
                phi[i] = ()
            else:
                phi[i] = self.fixed_label(i, A)
        for i, w in loop_labels.items():
            phi[i] = A.reduce(w)
        for v, a in self.tree:
            # everything at v but the parent arc is known
            rot = [e for e in D.rotation[v] if e[0] in self.kept]
            pos = rot.index(next(e for e in rot if e[0] == a))
            end = rot[pos][1]
            rest: list[int] = []
            for i, e in rot[pos + 1:] + rot[:pos]:
                rest.extend(A.inv(phi[i]) if e else phi[i])
            x = A.inv(A.reduce(rest))  # the parent end must contribute this
            phi[a] = A.inv(x) if end else x
        if any(w is None for w in phi):
            return None
        return [A.reduce(w) for w in phi]

    def genus(self) -> int:
        return self.D.genus


def contract_core(D: EmbeddedDigraph, delta: dict, keep: Iterable[int] | None = None) -> CoreInstance:
    """Contract a spanning tree of the non-terminal vertices to a single hub."""
    W = frozenset(v for v, w in delta.items() if w)
    for v in W:
        if D.degree(v) != 1:
            raise CoreError(f"terminal {v} does not have degree one")
    kept = frozenset(range(len(D.arcs)) if keep is None else keep)
    inner = [v for v in range(D.n) if v not in W]
    adj: dict = {v: [] for v in inner}
    for i in sorted(kept):
        t, h = D.arcs[i]
        if t in W or h in W or t == h:
            continue
        adj[t].append((i, h))
        adj[h].append((i, t))
    if not inner:
        return CoreInstance(D, dict(delta), kept, W, [], None, [], [], [])
    root = inner[0]
    seen = {root}
    order = [root]
    parent_arc = {}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for i, w in adj[v]:
            if w not in seen:
                seen.add(w)
                parent_arc[w] = i
                order.append(w)
                queue.append(w)
    if len(seen) != len(inner):
        raise CoreError("the non-terminal vertices do not form a connected graph")
    tree_arcs = set(parent_arc.values())
    tree = [(v, parent_arc[v]) for v in reversed(order[1:])]
    loops = sorted(i for i in kept if i not in tree_arcs
                   and D.arcs[i][0] not in W and D.arcs[i][1] not in W)
    rotation = _hub_rotation(D, kept, tree_arcs, root)
    groups, cur = [], []
    loopset = set(loops)
    for e in rotation:
        if e[0] in loopset:
            groups.append(cur)
            cur = []
        else:
            cur.append(e)
    if loops:
        groups[0] = cur + groups[0]
    else:
        groups = [cur]
    return CoreInstance(D, dict(delta), kept, W, tree, root, loops, rotation, groups)


def _hub_rotation(D: EmbeddedDigraph, kept, tree_arcs, root) -> list:
    """Counterclockwise arc-ends around the contracted tree (an Euler tour)."""
    rot = {v: [e for e in D.rotation[v] if e[0] in kept] for v in range(D.n)}
    where = {}
    for v, r in rot.items():
        for idx, e in enumerate(r):
            where[e] = (v, idx)
    total = sum(1 for v in rot for e in rot[v] if e[0] not in tree_arcs and _on_tree(D, v, tree_arcs, root))
    start = None
    for v in rot:
        if not _on_tree(D, v, tree_arcs, root):
            continue
        for idx, e in enumerate(rot[v]):
            if e[0] not in tree_arcs:
                start = (v, idx)
                break
        if start:
            break
    if start is None:
        return []
    out = []
    v, idx = start
    while True:
        e = rot[v][idx]
        if e[0] in tree_arcs:
            v, idx = where[(e[0], 1 - e[1])]
        else:
            out.append(e)
        idx = (idx + 1) % len(rot[v])
        if (v, idx) == start:
            break
    if len(out) != total:
        raise CoreError("hub rotation lost arc-ends")
    return out


def _on_tree(D, v, tree_arcs, root):
    if v == root:
        return True
    return any(e[0] in tree_arcs for e in D.rotation[v])


# -- labellings at the hub ----------------------------------------------------------

def _solve_last(A: Alphabet, items: list, loop: int, bound: int) -> tuple[list, bool]:
    """Labels for ``loop`` making the hub product trivial.

    ``items`` holds known words and exactly two ends of ``loop``.  Returns
    the solutions of length <= bound and a flag telling whether the label
    was unconstrained (every word works).
    """
    pos = [j for j, it in enumerate(items) if it[0] == "x"]
    j0, j1 = pos
    first_sign = items[j0][2]
    mid = A.reduce(tuple(s for it in items[j0 + 1:j1] for s in it[1]))
    rest = A.reduce(tuple(s for it in items[j1 + 1:] + items[:j0] for s in it[1]))
    # v mid v^-1 rest = 1 with v the contribution of the first end
    if not mid:
        return ([] if rest else [None]), not rest
    c = conjugator(A, mid, A.inv(rest))
    if c is None:
        return [], False
    r = primitive_root(A, mid)
    period = len(_strip(A, r)[1])
    out = []
    for sign in (1, -1):
        n = 0 if sign == 1 else -1
        # |c r^n| >= |n| * period - |c|, so the scan can stop
        while abs(n) * period <= bound + len(c):
            step = r * n if n >= 0 else A.inv(r) * -n
            v = A.reduce(c + step)
            if len(v) <= bound:
                out.append(v if first_sign == 1 else A.inv(v))
            n += sign
    return out, False


def hub_labellings(core: CoreInstance, A: Alphabet, bounds: dict, caps: dict | None = None,
                   budget: int = DEFAULT_BUDGET) -> Iterator[dict]:
    """Loop labellings with a trivial product at the hub.

    The last loop is solved from the others.  When its label is left free,
    all reduced words within the bound are used, limited per generator by
    ``caps`` if given.
    """
    gens = sorted({abs(s) for w in core.delta.values() for s in w}) or [1]
    base = core.hub_items(A)
    if core.root is None:
        return
    if not core.loops:
        if not A.reduce(tuple(s for it in base for s in it[1])):
            yield {}
        return
    *free, last = core.loops
    count = 0
    for choice in _product(gens, [bounds[i] for i in free]):
        labels = dict(zip(free, choice))
        items = []
        for it in base:
            if it[0] == "x" and it[1] != last:
                w = labels[it[1]]
                items.append(("w", w if it[2] == 1 else A.inv(w)))
            else:
                items.append(it)
        sols, unconstrained = _solve_last(A, items, last, bounds[last])
        if unconstrained:
            cap = caps if (caps is not None and not free) else None
            sols = reduced_words(gens, bounds[last], cap)
        for w in sols:
            count += 1
            if count > budget:
                raise EnumerationBudgetExceeded(f"more than {budget} hub labellings")
            out = dict(labels)
            out[last] = w
            yield out


def _product(gens, bounds):
    if not bounds:
        yield ()
        return
    for w in reduced_words(gens, bounds[0]):
        for rest in _product(gens, bounds[1:]):
            yield (w,) + rest


def owned_caps(core: CoreInstance, A: Alphabet) -> dict | None:
    """Per-generator letter caps for a single free loop, when they are sound.

    With one loop the hub splits the pendants into two groups.  If every
    generator has all of its demand letters in one group, each path stays
    on one side and crosses the loop at most once in reduced form, so a
    generator appears at most (number of its paths) times in the label.
    """
    if len(core.loops) != 1:
        return None
    side = {}
    count: dict = {}
    for gi, group in enumerate(core.groups):
        for i, end in group:
            w = core.fixed_label(i, A)
            for s in w:
                g = abs(s)
                if side.setdefault(g, gi) != gi:
                    return None
                count[g] = count.get(g, 0) + 1
    return {g: c // 2 for g, c in count.items()}


def _trivial_core(core: CoreInstance, A: Alphabet) -> list | None:
    """Labels when no vertex is outside W: every arc joins two terminals."""
    D = core.D
    phi = []
    for i, (t, h) in enumerate(D.arcs):
        if i not in core.kept:
            phi.append(())
            continue
        w = A.reduce(core.delta[t])
        if not A.equals(A.inv(w), core.delta[h]):
            return None
        phi.append(w)
    return phi


# -- elementary test ------------------------------------------------------------------

def is_elementary_core(core: CoreInstance, loop_labels: dict, A: Alphabet, limit: int = 100_000) -> bool:
    """Whether some noncrossing pairing at the hub decomposes into paths only."""
    slots = []  # (kind, arc, strand, end, symbol)
    loops = set(core.loops)
    for i, end in core.rotation:
        w = loop_labels[i] if i in loops else core.fixed_label(i, A)
        idx = range(len(w)) if end == 0 else reversed(range(len(w)))
        for j in idx:
            slots.append((i, j, end, w[j] if end == 0 else -w[j]))
    n = len(slots)
    if n % 2:
        return False
    budget = [limit]

    def matchings(lo, hi):
        if lo > hi:
            yield []
            return
        budget[0] -= 1
        if budget[0] < 0:
            return
        for mid in range(lo + 1, hi + 1, 2):
            if slots[lo][3] != -slots[mid][3]:
                continue
            for inner in matchings(lo + 1, mid - 1):
                for outer in matchings(mid + 1, hi):
                    yield [(lo, mid)] + inner + outer

    for pairs in matchings(0, n - 1):
        if _paths_only(slots, pairs, loops):
            return True
    return False


def _paths_only(slots, pairs, loops) -> bool:
    partner = {}
    for x, y in pairs:
        partner[x], partner[y] = y, x
    index = {(s[0], s[1], s[2]): t for t, s in enumerate(slots)}
    seen = set()
    for t, (i, j, end, _) in enumerate(slots):
        if i in loops or t in seen:
            continue
        cur = t
        while True:
            seen.add(cur)
            nxt = partner[cur]
            seen.add(nxt)
            a, b, e, _ = slots[nxt]
            if a not in loops:
                break
            cur = index[(a, b, 1 - e)]
    return len(seen) == len(slots)


# -- public enumerations --------------------------------------------------------------

def enumerate_elementary(core: CoreInstance, m: int, A: Alphabet | None = None,
                         budget: int = DEFAULT_BUDGET) -> list[list[Word]]:
    """All elementary delta-joins on the kept arcs with loop labels of length <= m."""
    A = A or demand_alphabet(core.delta)
    if core.root is None:
        phi = _trivial_core(core, A)
        return [phi] if phi is not None else []
    out, seen = [], set()
    bounds = {i: m for i in core.loops}
    for labels in hub_labellings(core, A, bounds, None, budget):
        if not is_elementary_core(core, labels, A):
            continue
        phi = core.expand(labels, A)
        if phi is None or not verify_delta_join(core.D, phi, core.delta, A):
            continue
        key = tuple(phi)
        if key not in seen:
            seen.add(key)
            out.append(phi)
    return out


def enumerate_representatives(D: EmbeddedDigraph, delta: dict, m: int, R: Iterable[int] | None = None,
                              A: Alphabet | None = None, budget: int = DEFAULT_BUDGET,
                              use_caps: bool = True) -> list[list[Word]]:
    """delta-joins covering every R-homology class of elementary joins with |phi(a)| <= m.

    Each output is a normal form, so distinct outputs lie in distinct
    classes.  Outputs are sorted by total label length.
    """
    from .surface import r_faces

    A = A or demand_alphabet(delta)
    W = [v for v, w in delta.items() if w]
    R = frozenset(r_faces(D, W) if R is None else R)
    if not R:
        R = frozenset({0})  # no terminals: pin one face, which loses nothing
    forest = dual_forest(D, R)
    keep = [i for i in range(len(D.arcs)) if i not in forest.arcs]
    core = contract_core(D, delta, keep)
    if core.root is None:
        phi = _trivial_core(core, A)
        return [phi] if phi is not None else []
    bounds = {}
    for i in core.loops:
        F, G = D.right_face(i), D.left_face(i)
        bounds[i] = m * (forest.depth[F] + forest.depth[G] + 1)
    caps = owned_caps(core, A) if use_caps else None
    out, seen = [], set()
    for labels in hub_labellings(core, A, bounds, caps, budget):
        phi = core.expand(labels, A)
        if phi is None or not verify_delta_join(D, phi, delta, A):
            continue
        key = tuple(phi)
        if key not in seen:
            seen.add(key)
            out.append(phi)
    out.sort(key=lambda phi: (sum(map(len, phi)), phi))
    return out


def format_representatives(D: EmbeddedDigraph, reps: Sequence[Sequence[Word]]) -> str:
    lines = []
    for j, phi in enumerate(reps):
        parts = [f"{D.names[i]}={Alphabet.render(w)}" for i, w in enumerate(phi) if w]
        lines.append(f"type {j}: " + (" ".join(parts) if parts else "1"))
    return "\n".join(lines) + ("\n" if lines else "")
