"""Directed graphs embedded on orientable surfaces, given by face cycles.

Arcs are numbered 0..m-1.  A dart is ``2*i`` (arc i forward) or ``2*i + 1``
(arc i backward), the same numbering the cohomology solver uses for
directed arcs.  Faces are lists of darts read clockwise, so the face
traversing arc i forward lies on its right.

An arc-end is ``(i, 0)`` for the tail end of arc i and ``(i, 1)`` for its
head end.  Rotations are stored counterclockwise.  The signed product at a
vertex reads the arc-ends counterclockwise, taking phi(a) at a tail end
and phi(a)^-1 at a head end.  Loops contribute both ends separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .word import Alphabet, Word


class EmbeddingError(ValueError):
    pass


class OccurrenceViolation(EmbeddingError):
    """Some dart is missing from the faces or appears more than once."""


class NonIntegerGenus(EmbeddingError):
    pass


def dart_arc(d: int) -> int:
    return d >> 1


def reverse(d: int) -> int:
    return d ^ 1


@dataclass
class EmbeddedDigraph:
    n: int
    arcs: list  # (tail, head) pairs
    faces: list  # clockwise dart cycles
    names: list = field(default_factory=list)

    def __post_init__(self):
        self.arcs = [tuple(a) for a in self.arcs]
        self.faces = [list(F) for F in self.faces]
        if not self.names:
            self.names = [f"a{i}" for i in range(len(self.arcs))]
        if self.n < 1:
            raise EmbeddingError("need at least one vertex")
        for t, h in self.arcs:
            if not (0 <= t < self.n and 0 <= h < self.n):
                raise EmbeddingError(f"arc {t}->{h} leaves the vertex range")
        if not self.arcs:
            if self.n != 1:
                raise EmbeddingError("an embedding without arcs must have one vertex")
            self.faces = [[]]
        self._validate()

    # darts ----------------------------------------------------------------

    def tail(self, d: int) -> int:
        t, h = self.arcs[d >> 1]
        return h if d & 1 else t

    def head(self, d: int) -> int:
        t, h = self.arcs[d >> 1]
        return t if d & 1 else h

    @staticmethod
    def leaving_end(d: int) -> tuple[int, int]:
        return (d >> 1, d & 1)

    @staticmethod
    def arriving_end(d: int) -> tuple[int, int]:
        return (d >> 1, 1 - (d & 1))

    # validation -------------------------------------------------------------

    def _validate(self):
        m = len(self.arcs)
        seen = [None] * (2 * m)
        for fi, F in enumerate(self.faces):
            if not F and m:
                raise EmbeddingError(f"face {fi} is empty")
            for d in F:
                if not 0 <= d < 2 * m:
                    raise EmbeddingError(f"face {fi} names an unknown arc")
                if seen[d] is not None:
                    raise OccurrenceViolation(
                        f"{self.dart_name(d)} occurs in faces {seen[d]} and {fi}")
                seen[d] = fi
        missing = [d for d in range(2 * m) if seen[d] is None]
        if missing:
            raise OccurrenceViolation(f"{self.dart_name(missing[0])} occurs in no face")
        for fi, F in enumerate(self.faces):
            for x, y in zip(F, F[1:] + F[:1]):
                if self.head(x) != self.tail(y):
                    raise EmbeddingError(
                        f"face {fi} is not a closed walk at {self.dart_name(x)} {self.dart_name(y)}")
        self.face_of = seen

        # thread face corners into counterclockwise rotations
        succ = {}
        for F in self.faces:
            for x, y in zip(F, F[1:] + F[:1]):
                succ[self.arriving_end(x)] = self.leaving_end(y)
        self.rotation = [[] for _ in range(self.n)]
        ends_at = [[] for _ in range(self.n)]
        for i, (t, h) in enumerate(self.arcs):
            ends_at[t].append((i, 0))
            ends_at[h].append((i, 1))
        for v in range(self.n):
            if not ends_at[v]:
                if self.n > 1:
                    raise EmbeddingError(f"vertex {v} is isolated")
                continue
            start = min(ends_at[v])
            cyc = [start]
            e = succ[start]
            while e != start:
                cyc.append(e)
                e = succ[e]
            if len(cyc) != len(ends_at[v]):
                raise EmbeddingError(f"faces around vertex {v} do not form a single disk")
            self.rotation[v] = cyc

        if not self._connected():
            raise EmbeddingError("graph is not connected")
        twice = len(self.arcs) + 2 - self.n - len(self.faces)
        if twice < 0 or twice % 2:
            raise NonIntegerGenus(f"Euler count gives genus {twice / 2}")
        self.genus = twice // 2

    def _connected(self) -> bool:
        adj = [[] for _ in range(self.n)]
        for t, h in self.arcs:
            adj[t].append(h)
            adj[h].append(t)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    # derived data -------------------------------------------------------

    def dart_name(self, d: int) -> str:
        return self.names[d >> 1] + ("'" if d & 1 else "")

    def right_face(self, i: int) -> int:
        return self.face_of[2 * i]

    def left_face(self, i: int) -> int:
        return self.face_of[2 * i + 1]

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def clockwise(self, v: int) -> list:
        r = self.rotation[v]
        return r[:1] + r[:0:-1]

    def faces_at(self, v: int) -> set[int]:
        """Faces incident with v."""
        out = set()
        for i, end in self.rotation[v]:
            out.add(self.face_of[2 * i])
            out.add(self.face_of[2 * i + 1])
        if not self.arcs:
            out.add(0)
        return out

    def dual_walk(self, v: int) -> list[int]:
        """The boundary of the dual face around v as dual darts, counterclockwise.

        Dual dart 2i is a* (right face to left face of a); a tail end of a
        gives a* forward and a head end gives a* backward.
        """
        return [2 * i + end for i, end in self.rotation[v]]


def load_embedding(text: str) -> EmbeddedDigraph:
    """Parse ``surface`` / vertex count / ``id u w`` arc lines / ``face: ...`` lines."""
    lines = []
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].strip()
        if ln:
            lines.append(ln)
    if not lines or lines[0] != "surface":
        raise EmbeddingError("missing 'surface' header")
    return _parse_body(lines[1:])[0]


def _parse_body(lines: list[str], stop=()) -> tuple[EmbeddedDigraph, list[str]]:
    """Read the vertex count, arcs and faces; return the unused trailing lines."""
    if not lines:
        raise EmbeddingError("missing vertex count")
    try:
        n = int(lines[0])
    except ValueError:
        raise EmbeddingError(f"bad vertex count {lines[0]!r}") from None
    names, arcs, faces_raw, rest = [], [], [], []
    index: dict[str, int] = {}
    for ln in lines[1:]:
        if ln.split()[0] in stop:
            rest.append(ln)
        elif ln.startswith("face:"):
            faces_raw.append(ln[5:].split())
        else:
            parts = ln.split()
            if len(parts) != 3:
                raise EmbeddingError(f"bad arc line {ln!r}")
            name = parts[0]
            if name in index or name.endswith("'"):
                raise EmbeddingError(f"bad or repeated arc id {name!r}")
            try:
                t, h = int(parts[1]), int(parts[2])
            except ValueError:
                raise EmbeddingError(f"bad arc line {ln!r}") from None
            index[name] = len(arcs)
            names.append(name)
            arcs.append((t, h))
    faces = []
    for toks in faces_raw:
        F = []
        for tok in toks:
            back = tok.endswith("'")
            name = tok[:-1] if back else tok
            if name not in index:
                raise EmbeddingError(f"face names unknown arc {name!r}")
            F.append(2 * index[name] + back)
        faces.append(F)
    return EmbeddedDigraph(n, arcs, faces, names), rest


def format_embedding(D: EmbeddedDigraph) -> str:
    lines = ["surface", str(D.n)]
    lines += [f"{name} {t} {h}" for name, (t, h) in zip(D.names, D.arcs)]
    lines += ["face: " + " ".join(D.dart_name(d) for d in F) for F in D.faces if F]
    return "\n".join(lines) + "\n"


# -- duals ----------------------------------------------------------------------

@dataclass(frozen=True)
class DualGraph:
    n: int  # one vertex per face of D
    arcs: tuple  # arc i of the dual is a_i*: (right face, left face)


def dual(D: EmbeddedDigraph) -> DualGraph:
    return DualGraph(len(D.faces), tuple((D.right_face(i), D.left_face(i)) for i in range(len(D.arcs))))


def dual_label(A: Alphabet, phi: Sequence[Word], walk: Sequence[int]) -> Word:
    """phi* along a walk of dual darts."""
    out: list[int] = []
    for d in walk:
        w = phi[d >> 1]
        out.extend(A.inv(w) if d & 1 else w)
    return A.reduce(out)


@dataclass(frozen=True)
class ExtArc:
    tail: int
    head: int
    path: tuple  # dual darts along the boundary of one dual face
    vertex: int  # the vertex of D whose dual face carries the path
    label: Word


@dataclass
class ExtendedDual:
    n: int
    arcs: list
    base: list  # base[i] = index of the arc for a_i* itself


def extended_dual(D: EmbeddedDigraph, phi: Sequence[Word], A: Alphabet) -> ExtendedDual:
    """D* plus an arc for every proper boundary path of every dual face.

    Paths are read counterclockwise around each vertex of D, from every
    start and with every length short of the full cycle.  Arcs of D* are
    always kept; other arcs are dropped when their (tail, head, label)
    triple is already present.
    """
    arcs: list[ExtArc] = []
    seen = set()
    base = []
    for i, (t, h) in enumerate(D.arcs):
        lab = A.reduce(phi[i])
        arcs.append(ExtArc(D.right_face(i), D.left_face(i), (2 * i,), t, lab))
        seen.add((D.right_face(i), D.left_face(i), A.key(lab)))
        base.append(i)
    for v in range(D.n):
        walk = D.dual_walk(v)
        L = len(walk)
        for start in range(L):
            for length in range(1, L):
                path = tuple(walk[(start + j) % L] for j in range(length))
                if length == 1 and not path[0] & 1:
                    continue  # already added as a dual arc
                tail = _dual_tail(D, path[0])
                head = _dual_head(D, path[-1])
                lab = dual_label(A, phi, path)
                key = (tail, head, A.key(lab))
                if key in seen:
                    continue
                seen.add(key)
                arcs.append(ExtArc(tail, head, path, v, lab))
    return ExtendedDual(len(D.faces), arcs, base)


def _dual_tail(D: EmbeddedDigraph, d: int) -> int:
    i = d >> 1
    return D.left_face(i) if d & 1 else D.right_face(i)


def _dual_head(D: EmbeddedDigraph, d: int) -> int:
    i = d >> 1
    return D.right_face(i) if d & 1 else D.left_face(i)


# -- circulations, joins and homology --------------------------------------------

def vertex_product(D: EmbeddedDigraph, phi: Sequence[Word], v: int, A: Alphabet) -> Word:
    """Signed product of labels around v, counterclockwise, tail ends positive."""
    out: list[int] = []
    for i, end in D.rotation[v]:
        out.extend(A.inv(phi[i]) if end else phi[i])
    return A.reduce(out)


def verify_circulation(D: EmbeddedDigraph, phi: Sequence[Word], A: Alphabet) -> bool:
    return all(not vertex_product(D, phi, v, A) for v in range(D.n))


def demand_vertices(D: EmbeddedDigraph, delta: dict) -> set[int]:
    return {v for v, w in delta.items() if w}


def valid_demand(D: EmbeddedDigraph, delta: dict) -> bool:
    return all(0 <= v < D.n and D.degree(v) == 1 for v in demand_vertices(D, delta))


def verify_delta_join(D: EmbeddedDigraph, phi: Sequence[Word], delta: dict, A: Alphabet) -> bool:
    """Product at every v equals delta(v); False also when delta breaks the degree-one rule."""
    if not valid_demand(D, delta):
        return False
    return all(A.equals(vertex_product(D, phi, v, A), delta.get(v, ()))
               for v in range(D.n))


def r_faces(D: EmbeddedDigraph, W) -> frozenset:
    """Faces incident with at least one vertex of W."""
    return frozenset(F for v in W for F in D.faces_at(v))


def apply_face_potential(D: EmbeddedDigraph, phi: Sequence[Word], p: Sequence[Word], A: Alphabet) -> list[Word]:
    """psi(a) = p(right face) phi(a) p(left face)^-1."""
    return [A.reduce(tuple(p[D.right_face(i)]) + tuple(phi[i]) + A.inv(p[D.left_face(i)]))
            for i in range(len(D.arcs))]


def add_pendant(D: EmbeddedDigraph, v: int, face: int, outward: bool = True,
                name: str | None = None) -> tuple[EmbeddedDigraph, int, int]:
    """Attach a new degree-one vertex to v inside ``face``.

    The new arc runs v -> new vertex when ``outward``, else new vertex -> v.
    It is spliced into the first corner of the face at v.  Returns the new
    embedding, the new vertex and the new arc index.
    """
    if face not in D.faces_at(v):
        raise EmbeddingError(f"vertex {v} is not on face {face}")
    j = len(D.arcs)
    p = D.n
    arcs = list(D.arcs) + [(v, p) if outward else (p, v)]
    there, back = (2 * j, 2 * j + 1) if outward else (2 * j + 1, 2 * j)
    faces = [list(F) for F in D.faces]
    F = faces[face]
    if not F:
        faces[face] = [there, back]
    else:
        for pos, d in enumerate(F):
            if D.tail(d) == v:
                break
        else:
            raise EmbeddingError(f"vertex {v} is not on face {face}")
        faces[face] = F[:pos] + [there, back] + F[pos:]
    names = list(D.names) + [name or f"p{p}"]
    return EmbeddedDigraph(D.n + 1, arcs, faces, names), p, j
