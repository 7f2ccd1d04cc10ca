"""Closed and left-convex subsets of a graph group.

Closed sets are membership oracles over reduced words.  Left-convex views
(up-sets, down-sets, Delta sets, translates, intersections) each know one
element of themselves, which is enough to find their minimum by descent.
"""

from __future__ import annotations

import re
from typing import Callable, Iterable, Mapping, Sequence

from .word import Alphabet, AlphabetError, Word, symbol_key


class ClosedSetError(ValueError):
    pass


class EmptyView(ValueError):
    """No element of a left-convex view could be found."""


class BudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# closed sets


class ClosedSet:
    """Membership oracle for a subset of G containing 1.

    Subclasses implement ``contains`` for reduced words and ``inverse``.
    """

    alphabet: Alphabet

    def contains(self, x: Sequence[int]) -> bool:
        raise NotImplementedError

    def inverse(self) -> "ClosedSet":
        raise NotImplementedError

    def __contains__(self, x) -> bool:
        return self.contains(tuple(x))

    def with_alphabet(self, alphabet: Alphabet) -> "ClosedSet":
        """Same set regarded inside a larger alphabet."""
        raise NotImplementedError


class FiniteClosed(ClosedSet):
    """An explicit finite set, completed under segments and finite joins."""

    def __init__(self, alphabet: Alphabet, words: Iterable[Sequence[int]] = (),
                 complete: bool = True, cap: int = 100_000):
        self.alphabet = alphabet
        A = alphabet
        members: dict[Word, Word] = {(): ()}
        for w in words:
            r = A.reduce(A.check(w))
            members[A.key(r)] = r
        if complete:
            members = _complete(A, members, cap)
        else:
            bad = _closure_defect(A, members)
            if bad is not None:
                raise ClosedSetError(f"set is not closed: missing {A.render(bad)}")
        self._members = members

    @classmethod
    def _raw(cls, alphabet: Alphabet, members: dict) -> "FiniteClosed":
        obj = cls.__new__(cls)
        obj.alphabet = alphabet
        obj._members = members
        return obj

    def contains(self, x: Sequence[int]) -> bool:
        return self.alphabet.key(x) in self._members

    def elements(self) -> list[Word]:
        return list(self._members.values())

    def __len__(self):
        return len(self._members)

    def inverse(self) -> "FiniteClosed":
        A = self.alphabet
        return FiniteClosed._raw(A, {A.key(A.inv(w)): A.inv(w) for w in self._members.values()})

    def with_alphabet(self, alphabet: Alphabet) -> "FiniteClosed":
        return FiniteClosed._raw(alphabet, {alphabet.key(w): w for w in self._members.values()})

    def frozen(self) -> frozenset:
        return frozenset(self._members)

    def __eq__(self, other):
        return isinstance(other, FiniteClosed) and self.frozen() == other.frozen()

    def __hash__(self):
        return hash(self.frozen())

    def __repr__(self):
        items = sorted(self._members.values(), key=lambda w: (len(w), w))
        return "finite{" + ",".join(Alphabet.render(w) for w in items) + "}"


def _complete(A: Alphabet, members: dict, cap: int) -> dict:
    todo = list(members.values())
    members = dict(members)

    def add(w):
        k = A.key(w)
        if k not in members:
            members[k] = w
            todo.append(w)
            if len(members) > cap:
                raise ClosedSetError(f"completion exceeded {cap} elements")

    while todo:
        w = todo.pop()
        for s in A.segments(w):
            add(s)
        wi = A.inv(w)
        for v in list(members.values()):
            j = A.join(w, v)
            if j is not None:
                add(j)
            j = A.join(wi, A.inv(v))
            if j is not None:
                add(A.inv(j))
    return members


def _closure_defect(A: Alphabet, members: dict) -> Word | None:
    vals = list(members.values())
    for w in vals:
        for s in A.segments(w):
            if A.key(s) not in members:
                return s
    for v in vals:
        for w in vals:
            j = A.join(v, w)
            if j is not None and A.key(j) not in members:
                return j
            j = A.join(A.inv(v), A.inv(w))
            if j is not None and A.key(A.inv(j)) not in members:
                return A.inv(j)
    return None


class SymbolSet(ClosedSet):
    """{1} together with a chosen set of single symbols."""

    def __init__(self, alphabet: Alphabet, symbols: Iterable[int]):
        self.alphabet = alphabet
        self.symbols = frozenset(alphabet.check(symbols))

    def contains(self, x):
        return len(x) == 0 or (len(x) == 1 and x[0] in self.symbols)

    def inverse(self):
        return SymbolSet(self.alphabet, [-a for a in self.symbols])

    def with_alphabet(self, alphabet):
        return SymbolSet(alphabet, self.symbols)

    def __repr__(self):
        return "symbols{" + ",".join(Alphabet.render((a,)) for a in sorted(self.symbols, key=symbol_key)) + "}"


class PowerSet(ClosedSet):
    """{g_i^n : i in I} with a sign rule per generator: '+' n>=0, '-' n<=0, '*' any n."""

    def __init__(self, alphabet: Alphabet, rules: Mapping[int, str]):
        self.alphabet = alphabet
        for g, r in rules.items():
            if not 1 <= g <= alphabet.k:
                raise AlphabetError(f"generator {g} out of range")
            if r not in "+-*":
                raise ClosedSetError(f"bad power rule {r!r}")
        self.rules = dict(rules)

    def contains(self, x):
        if not x:
            return True
        a = x[0]
        rule = self.rules.get(abs(a))
        if rule is None or any(b != a for b in x):
            return False
        return rule == "*" or (rule == "+") == (a > 0)

    def inverse(self):
        flip = {"+": "-", "-": "+", "*": "*"}
        return PowerSet(self.alphabet, {g: flip[r] for g, r in self.rules.items()})

    def with_alphabet(self, alphabet):
        return PowerSet(alphabet, self.rules)

    def __repr__(self):
        return "powers{" + ",".join(f"g{g}:{r}" for g, r in sorted(self.rules.items())) + "}"


class BoundedLength(ClosedSet):
    """{w : |w| <= L}."""

    def __init__(self, alphabet: Alphabet, bound: int):
        self.alphabet = alphabet
        self.bound = bound

    def contains(self, x):
        return len(x) <= self.bound

    def inverse(self):
        return self

    def with_alphabet(self, alphabet):
        return BoundedLength(alphabet, self.bound)

    def __repr__(self):
        return f"len<={self.bound}"


class Predicate(ClosedSet):
    """External membership callback; the caller promises the set is closed."""

    def __init__(self, alphabet: Alphabet, fn: Callable[[Word], bool],
                 inverse_fn: Callable[[Word], bool] | None = None):
        self.alphabet = alphabet
        self.fn = fn
        self.inverse_fn = inverse_fn

    def contains(self, x):
        return bool(self.fn(tuple(x)))

    def inverse(self):
        A = self.alphabet
        fn = self.inverse_fn or (lambda w, f=self.fn: f(A.inv(w)))
        return Predicate(A, fn, self.fn)

    def with_alphabet(self, alphabet):
        return Predicate(alphabet, self.fn, self.inverse_fn)


_CLOSED_RE = re.compile(r"^\s*(len<=|symbols|powers|finite)\s*(.*)$")


def parse_closed_set(text: str, alphabet: Alphabet) -> ClosedSet:
    """Parse ``len<=L``, ``symbols{g1,g2'}``, ``powers{g1:+,g2:*}`` or ``finite{w1,w2}``."""
    m = _CLOSED_RE.match(text)
    if not m:
        raise ClosedSetError(f"unknown closed-set syntax {text!r}")
    kind, rest = m.groups()
    rest = rest.strip()
    if kind == "len<=":
        try:
            return BoundedLength(alphabet, int(rest))
        except ValueError:
            raise ClosedSetError(f"bad length bound {rest!r}") from None
    if not (rest.startswith("{") and rest.endswith("}")):
        raise ClosedSetError(f"expected braces in {text!r}")
    items = [t.strip() for t in rest[1:-1].split(",") if t.strip()]
    if kind == "symbols":
        syms = []
        for t in items:
            w = alphabet.parse(t)
            if len(w) != 1:
                raise ClosedSetError(f"{t!r} is not a single symbol")
            syms.append(w[0])
        return SymbolSet(alphabet, syms)
    if kind == "powers":
        rules = {}
        for t in items:
            g, _, r = t.partition(":")
            w = alphabet.parse(g)
            if len(w) != 1 or w[0] < 0:
                raise ClosedSetError(f"{g!r} is not a generator")
            rules[w[0]] = r.strip() or "*"
        return PowerSet(alphabet, rules)
    return FiniteClosed(alphabet, [alphabet.parse(t) for t in items])


# ---------------------------------------------------------------------------
# greedy closure point and products


def closure_point(H, x: Sequence[int], alphabet: Alphabet | None = None) -> Word:
    """Largest y <= x inside the left-closed set H (anything with ``contains``)."""
    A = alphabet or H.alphabet
    got: Word = ()
    rest = tuple(x)
    while rest:
        for a in sorted(A.first(rest), key=symbol_key):
            cand = got + (a,)
            if H.contains(cand):
                got = cand
                rest = A.remove_first(rest, a)
                break
        else:
            break
    return got


def product_member(H, Hp, x: Sequence[int], alphabet: Alphabet | None = None) -> bool:
    """x in H H' for left-closed H and right-closed H'."""
    A = alphabet or H.alphabet
    y = closure_point(H, x, A)
    return Hp.contains(A.reduce(A.inv(y) + tuple(x)))


def chain_member(sets: Sequence, x: Sequence[int], alphabet: Alphabet) -> bool:
    """x in H_1 H_2 ... H_t for closed H_i, peeling from the left."""
    A = alphabet
    y = tuple(x)
    for H in sets[:-1]:
        c = closure_point(H, y, A)
        y = A.reduce(A.inv(c) + y)
    if not sets:
        return not y
    return sets[-1].contains(y)


class Product:
    """Membership oracle for H H' with H left-closed and H' right-closed."""

    def __init__(self, H, Hp, alphabet: Alphabet):
        self.H, self.Hp, self.alphabet = H, Hp, alphabet

    def contains(self, x):
        return product_member(self.H, self.Hp, x, self.alphabet)


class InverseOf:
    """Membership oracle for S^{-1}."""

    def __init__(self, S, alphabet: Alphabet):
        self.S, self.alphabet = S, alphabet

    def contains(self, x):
        return self.S.contains(self.alphabet.inv(x))


# ---------------------------------------------------------------------------
# left-convex views


class View:
    alphabet: Alphabet

    def contains(self, x: Sequence[int]) -> bool:
        raise NotImplementedError

    def witness(self) -> Word | None:
        raise NotImplementedError


class UpSet(View):
    """{y : y >= x}."""

    def __init__(self, alphabet: Alphabet, x: Sequence[int]):
        self.alphabet, self.x = alphabet, tuple(x)

    def contains(self, y):
        return self.alphabet.leq(self.x, y)

    def witness(self):
        return self.x


class DownSet(View):
    """{y : y <= x}."""

    def __init__(self, alphabet: Alphabet, x: Sequence[int]):
        self.alphabet, self.x = alphabet, tuple(x)

    def contains(self, y):
        return self.alphabet.leq(y, self.x)

    def witness(self):
        return ()


class Delta(View):
    """{y' : not y' >= y} for a left-interval y."""

    def __init__(self, alphabet: Alphabet, y: Sequence[int]):
        self.alphabet, self.y = alphabet, tuple(y)

    def contains(self, w):
        return not self.alphabet.leq(self.y, w)

    def witness(self):
        return () if self.y else None


class Translate(View):
    """z . S for a left-convex S (closed set or view)."""

    def __init__(self, alphabet: Alphabet, z: Sequence[int], S):
        self.alphabet, self.z, self.S = alphabet, tuple(z), S

    def contains(self, w):
        A = self.alphabet
        return self.S.contains(A.reduce(A.inv(self.z) + tuple(w)))

    def witness(self):
        inner = self.S.witness() if isinstance(self.S, View) else ()
        if inner is None:
            return None
        return self.alphabet.reduce(self.z + tuple(inner))


class Intersection(View):
    def __init__(self, alphabet: Alphabet, views: Sequence[View]):
        self.alphabet, self.views = alphabet, list(views)

    def contains(self, w):
        return all(v.contains(w) for v in self.views)

    def witness(self):
        return helly_intersect(self.views)


def convex_min(view: View, witness: Sequence[int] | None = None) -> Word:
    """The minimum of a left-convex view, by unit-step descent from a member."""
    A = view.alphabet
    w = view.witness() if witness is None else tuple(witness)
    if w is None or not view.contains(w):
        raise EmptyView("no member of the view is known")
    w = tuple(w)
    moved = True
    while moved and w:
        moved = False
        for y in A.lower_covers(w):
            if view.contains(y):
                w = y
                moved = True
                break
    return w


def helly_intersect(views: Sequence[View], budget: int = 10_000) -> Word | None:
    """A common element of left-convex views, or None if there is none.

    Pairwise witnesses come from joins of minima (a nonempty intersection
    of two left-convex sets contains the join of their minima).  Three sets
    are combined by translating one pairwise witness to 1 and taking a meet;
    more sets are handled by folding the last ones into the others.
    """
    views = list(views)
    if not views:
        return ()
    A = views[0].alphabet
    counter = [0]

    def tick():
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExceeded("helly_intersect probe budget exhausted")

    def pair(u: View, v: View) -> Word | None:
        tick()
        try:
            j = A.join(convex_min(u), convex_min(v))
        except EmptyView:
            return None
        if j is not None and u.contains(j) and v.contains(j):
            return j
        return None

    def solve(vs: list[View]) -> Word | None:
        tick()
        if len(vs) == 1:
            return convex_min(vs[0])
        if len(vs) == 2:
            return pair(vs[0], vs[1])
        if len(vs) == 3:
            H1, H2, H3 = vs
            x, y, z = pair(H1, H2), pair(H1, H3), pair(H2, H3)
            if x is None or y is None or z is None:
                return None
            zi = A.inv(z)
            m = A.meet(A.reduce(zi + x), A.reduce(zi + y))
            return A.reduce(z + m)
        rest = vs[3:]
        merged = [Intersection(A, [v] + rest) for v in vs[:3]]
        for m in merged:
            m.witness = (lambda m=m: solve(m.views))
        # every pair of the merged sets is an intersection of fewer views
        return solve(merged)

    for i in range(len(views)):
        try:
            convex_min(views[i])
        except EmptyView:
            return None
    w = solve(views)
    if w is None or not all(v.contains(w) for v in views):
        return None
    return w
