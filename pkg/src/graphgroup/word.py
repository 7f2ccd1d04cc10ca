"""Exact arithmetic in free partially commutative groups.

A symbol is a nonzero int: ``+i`` stands for the generator g_i and ``-i``
for its inverse.  Words are tuples of symbols.  The :class:`Alphabet` does
the heavy lifting on raw tuples; :class:`GroupElement` is a thin immutable
wrapper that keeps its word reduced and offers operator syntax.

Most ``Alphabet`` methods expect reduced words as input.  ``reduce`` and
``is_identity`` accept arbitrary raw words.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator, Sequence

Word = tuple[int, ...]

DEFAULT_ORACLE_BOUND = 12


class AlphabetError(ValueError):
    """Raised for generator indices outside the alphabet or mixed alphabets."""


class OracleBoundError(ValueError):
    """Raised when a word is too long for the exponential matching oracle."""


def symbol_key(a: int) -> tuple[int, int]:
    """Total order on symbols: generator index first, then + before -."""
    return (abs(a), 0 if a > 0 else 1)


class Alphabet:
    """Generators g_1..g_k together with a set of commuting (independent) pairs."""

    __slots__ = ("k", "independence", "_block", "_free")

    def __init__(self, k: int, independence: Iterable[Iterable[int]] = ()):
        if k < 0:
            raise AlphabetError("generator count must be nonnegative")
        pairs = set()
        for pair in independence:
            i, j = tuple(pair)
            if i == j:
                raise AlphabetError(f"generator {i} cannot be independent of itself")
            for g in (i, j):
                if not 1 <= g <= k:
                    raise AlphabetError(f"generator index {g} out of range 1..{k}")
            pairs.add((min(i, j), max(i, j)))
        self.k = k
        self.independence = frozenset(pairs)
        # _block[g] is a bitmask of the generators that do NOT commute with g
        # (g itself included).
        block = [0] * (k + 1)
        for g in range(1, k + 1):
            mask = 0
            for h in range(1, k + 1):
                if (min(g, h), max(g, h)) not in pairs:
                    mask |= 1 << h
            block[g] = mask
        self._block = block
        self._free = not pairs

    # -- basics -----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Alphabet)
            and self.k == other.k
            and self.independence == other.independence
        )

    def __hash__(self):
        return hash((self.k, self.independence))

    def __repr__(self):
        return f"Alphabet({self.k}, {sorted(self.independence)})"

    @property
    def is_free(self) -> bool:
        return self._free

    def extended(self, extra: int = 1) -> "Alphabet":
        """Same relations plus ``extra`` fresh generators that commute with nothing."""
        return Alphabet(self.k + extra, self.independence)

    def symbols(self) -> list[int]:
        out = []
        for g in range(1, self.k + 1):
            out += [g, -g]
        return out

    def commute(self, a: int, b: int) -> bool:
        """True iff symbols a and b are independent (distinct commuting generators)."""
        return not (self._block[abs(a)] >> abs(b)) & 1

    def independent(self, x: Sequence[int], y: Sequence[int]) -> bool:
        """True iff every symbol of x commutes with every symbol of y."""
        mask = 0
        for a in x:
            mask |= self._block[abs(a)]
        for b in y:
            if (mask >> abs(b)) & 1:
                return False
        return True

    def check(self, word: Iterable[int]) -> Word:
        word = tuple(word)
        for a in word:
            if not isinstance(a, int) or a == 0 or abs(a) > self.k:
                raise AlphabetError(f"symbol {a!r} not in alphabet of size {self.k}")
        return word

    # -- reduction and products ------------------------------------------

    def reduce(self, word: Iterable[int]) -> Word:
        """Reduced word for ``word``.

        Appends symbols one at a time.  A new symbol ``a`` cancels against
        the last occurrence of ``a^-1`` when everything after it commutes
        with ``a``; otherwise it is appended.
        """
        out: list[int] = []
        if self._free:
            for a in word:
                if out and out[-1] == -a:
                    out.pop()
                else:
                    out.append(a)
            return tuple(out)
        block = self._block
        for a in word:
            mask = block[abs(a)]
            j = len(out) - 1
            while j >= 0:
                b = out[j]
                if (mask >> abs(b)) & 1:
                    if b == -a:
                        del out[j]
                    else:
                        out.append(a)
                    break
                j -= 1
            else:
                out.append(a)
        return tuple(out)

    def inv(self, x: Sequence[int]) -> Word:
        return tuple(-a for a in reversed(x))

    def mul(self, *words: Sequence[int]) -> Word:
        raw: list[int] = []
        for w in words:
            raw.extend(w)
        return self.reduce(raw)

    def is_identity(self, word: Iterable[int]) -> bool:
        return not self.reduce(word)

    def equals(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return not self.reduce(tuple(x) + self.inv(y))

    def size(self, x: Sequence[int]) -> int:
        return len(self.reduce(x))

    def dist(self, x: Sequence[int], y: Sequence[int]) -> int:
        return len(self.reduce(self.inv(x) + tuple(y)))

    def divides(self, x: Sequence[int], y: Sequence[int]) -> bool:
        """x | y, i.e. |xy| = |x| + |y| (both reduced)."""
        if self._free:
            return not x or not y or x[-1] != -y[0]
        return len(self.reduce(tuple(x) + tuple(y))) == len(x) + len(y)

    # -- prefix order -----------------------------------------------------

    def leq(self, x: Sequence[int], y: Sequence[int]) -> bool:
        """x <= y in the prefix order (both reduced).

        Peels the symbols of x off the front of y one by one; each must be
        a first symbol of what is left of y.
        """
        if len(x) > len(y):
            return False
        if self._free:
            return tuple(y[:len(x)]) == tuple(x)
        block = self._block
        rest = list(y)
        for a in x:
            mask = block[abs(a)]
            for j, b in enumerate(rest):
                if (mask >> abs(b)) & 1:
                    if b != a:
                        return False
                    del rest[j]
                    break
            else:
                return False
        return True

    def first(self, x: Sequence[int]) -> frozenset:
        """All symbols a with a <= x."""
        block = self._block
        seen = 0
        res = set()
        for a in x:
            g = abs(a)
            if not block[g] & seen:
                res.add(a)
            seen |= 1 << g
        return frozenset(res)

    def last(self, x: Sequence[int]) -> frozenset:
        """All symbols a such that x = x'a with |x'| = |x| - 1."""
        return frozenset(-a for a in self.first(self.inv(x)))

    def remove_first(self, x: Sequence[int], a: int) -> Word:
        """Delete the first occurrence of a first symbol ``a`` of x."""
        i = list(x).index(a)
        return tuple(x[:i]) + tuple(x[i + 1:])

    def remove_last(self, x: Sequence[int], a: int) -> Word:
        """Delete the last occurrence of a last symbol ``a`` of x."""
        i = len(x) - 1 - list(reversed(x)).index(a)
        return tuple(x[:i]) + tuple(x[i + 1:])

    def lower_covers(self, x: Sequence[int]) -> list[Word]:
        """Elements y <= x with |y| = |x| - 1."""
        return [self.remove_last(x, a) for a in sorted(self.last(x), key=symbol_key)]

    def meet(self, x: Sequence[int], y: Sequence[int]) -> Word:
        """Greatest lower bound, grown one common first symbol at a time."""
        z: list[int] = []
        x, y = tuple(x), tuple(y)
        if self._free:
            for a, b in zip(x, y):
                if a != b:
                    break
                z.append(a)
            return tuple(z)
        while x and y:
            common = self.first(x) & self.first(y)
            if not common:
                break
            a = min(common, key=symbol_key)
            z.append(a)
            x = self.remove_first(x, a)
            y = self.remove_first(y, a)
        return tuple(z)

    def residuals(self, x: Sequence[int], y: Sequence[int]) -> tuple[Word, Word, Word]:
        """(z, x', y') with z = x meet y, x = z x', y = z y'."""
        z = self.meet(x, y)
        zi = self.inv(z)
        return z, self.reduce(zi + tuple(x)), self.reduce(zi + tuple(y))

    def join(self, x: Sequence[int], y: Sequence[int]) -> Word | None:
        """Least upper bound, or None for infinity."""
        z, xr, yr = self.residuals(x, y)
        if not self.independent(xr, yr):
            return None
        return z + xr + yr

    def join_all(self, elements: Iterable[Sequence[int]]) -> Word | None:
        acc: Word | None = ()
        for e in elements:
            acc = self.join(acc, e)
            if acc is None:
                return None
        return acc

    def meet_all(self, elements: Iterable[Sequence[int]]) -> Word:
        it = iter(elements)
        acc = tuple(next(it))
        for e in it:
            acc = self.meet(acc, e)
        return acc

    def median(self, x: Sequence[int], y: Sequence[int], z: Sequence[int]) -> Word:
        """(x meet y) join (x meet z) join (y meet z); always finite."""
        m = self.join_all([self.meet(x, y), self.meet(x, z), self.meet(y, z)])
        assert m is not None
        return m

    # -- structure ----------------------------------------------------------

    def _down_masks(self, x: Sequence[int]) -> list[int]:
        """Bitmask of positions j with j preceding-or-equal i in the dependency order."""
        block = self._block
        masks: list[int] = []
        for i, a in enumerate(x):
            m = 1 << i
            row = block[abs(a)]
            for j in range(i):
                if (row >> abs(x[j])) & 1:
                    m |= masks[j]
            masks.append(m)
        return masks

    def join_irreducibles(self, x: Sequence[int]) -> list[Word]:
        """The |x| join-irreducible elements below x, one per position."""
        x = tuple(x)
        out = []
        for m in self._down_masks(x):
            out.append(tuple(a for j, a in enumerate(x) if (m >> j) & 1))
        return out

    def canonical(self, x: Sequence[int]) -> Word:
        """Lexicographically least reduced word for x (x reduced)."""
        rest = list(x)
        out = []
        while rest:
            a = min(self.first(rest), key=symbol_key)
            out.append(a)
            rest.remove(a)
        return tuple(out)

    def key(self, x: Sequence[int]) -> Word:
        """Hashable normal form of an arbitrary raw word."""
        r = self.reduce(x)
        if self._free:
            return r
        return self.canonical(r)

    def cyclic_reduce(self, a: Sequence[int]) -> tuple[Word, Word]:
        """(b, c) with a = b c b^-1, b = a meet a^-1, c cyclically reduced."""
        b = self.meet(a, self.inv(a))
        c = self.reduce(self.inv(b) + tuple(a) + b)
        return b, c

    def components(self, a: Sequence[int]) -> list[Word]:
        """Connected pieces of the dependency graph on the positions of a."""
        a = tuple(a)
        n = len(a)
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i, j in combinations(range(n), 2):
            if not self.commute(a[i], a[j]):
                parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return [tuple(a[i] for i in idx) for idx in sorted(groups.values())]

    def prefixes(self, x: Sequence[int]) -> list[Word]:
        """Every y <= x (as reduced subwords of x), each exactly once."""
        x = tuple(x)
        n = len(x)
        preds = []
        block = self._block
        for i, a in enumerate(x):
            m = 0
            for j in range(i):
                if (block[abs(a)] >> abs(x[j])) & 1:
                    m |= 1 << j
            preds.append(m)
        out: list[Word] = []

        def rec(i, chosen, word):
            if i == n:
                out.append(tuple(word))
                return
            rec(i + 1, chosen, word)
            if preds[i] & chosen == preds[i]:
                word.append(x[i])
                rec(i + 1, chosen | (1 << i), word)
                word.pop()

        rec(0, 0, [])
        return out

    def segments(self, x: Sequence[int]) -> list[Word]:
        """All y with x = a y b and |x| = |a| + |y| + |b|, deduplicated."""
        seen = {}
        for a in self.prefixes(x):
            rest = self.reduce(self.inv(a) + tuple(x))
            for y in self.prefixes(rest):
                seen.setdefault(self.key(y), y)
        return list(seen.values())

    def elements_up_to(self, n: int) -> list[Word]:
        """All group elements of size <= n, as canonical words."""
        level = {(): ()}
        out = [()]
        syms = self.symbols()
        for _ in range(n):
            nxt = {}
            for w in level.values():
                for a in syms:
                    r = self.reduce(w + (a,))
                    if len(r) == len(w) + 1:
                        k = self.key(r)
                        if k not in nxt:
                            nxt[k] = k
            out.extend(nxt.values())
            level = nxt
        return out

    # -- the matching oracle ---------------------------------------------

    def identity_by_matching(self, word: Sequence[int], bound: int = DEFAULT_ORACLE_BOUND) -> bool:
        """Decide w = 1 by searching for a perfect matching of positions.

        Matched symbols must be mutually inverse and any two crossing pairs
        must be independent.  Exponential; intended as a test oracle.
        """
        w = tuple(word)
        if len(w) > bound:
            raise OracleBoundError(f"word of length {len(w)} exceeds oracle bound {bound}")
        if len(w) % 2:
            return False
        balance: dict[int, int] = {}
        for a in w:
            balance[abs(a)] = balance.get(abs(a), 0) + (1 if a > 0 else -1)
        if any(balance.values()):
            return False
        n = len(w)
        partner = [-1] * n
        pairs: list[tuple[int, int]] = []

        def ok(i, j):
            for p, q in pairs:
                if (p < i < q < j) or (i < p < j < q):
                    if not self.commute(w[i], w[p]):
                        return False
            return True

        def rec():
            try:
                i = partner.index(-1)
            except ValueError:
                return True
            for j in range(i + 1, n):
                if partner[j] == -1 and w[j] == -w[i] and ok(i, j):
                    partner[i], partner[j] = j, i
                    pairs.append((i, j))
                    if rec():
                        return True
                    pairs.pop()
                    partner[i] = partner[j] = -1
            return False

        return rec()

    # -- text ---------------------------------------------------------------

    def parse(self, text: str) -> Word:
        """Parse ``"g1 g2' g3"``; ``"1"`` or an empty string is the identity."""
        out = []
        for tok in text.replace(",", " ").split():
            if tok in ("1", "e"):
                continue
            sign = 1
            if tok.endswith("'"):
                sign = -1
                tok = tok[:-1]
            if not tok.startswith("g") or not tok[1:].isdigit():
                raise AlphabetError(f"bad symbol token {tok!r}")
            out.append(sign * int(tok[1:]))
        return self.check(out)

    @staticmethod
    def render(word: Sequence[int]) -> str:
        if not word:
            return "1"
        return " ".join(f"g{a}" if a > 0 else f"g{-a}'" for a in word)


def parse_alphabet(text: str) -> Alphabet:
    """First non-comment line is k, every further line is an ``i j`` pair."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise AlphabetError("empty alphabet description")
    try:
        k = int(lines[0])
        pairs = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise AlphabetError(f"malformed alphabet description: {exc}") from None
    for p in pairs:
        if len(p) != 2:
            raise AlphabetError(f"independence line needs two indices, got {p}")
    return Alphabet(k, pairs)


class Infinity:
    """The element adjoined above everything; absorbs joins."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"

    def __or__(self, other):
        return self

    __ror__ = __or__


INFINITY = Infinity()


class GroupElement:
    """An immutable reduced word bound to an alphabet."""

    __slots__ = ("alphabet", "word")

    def __init__(self, alphabet: Alphabet, symbols: Iterable[int] = ()):
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "word", alphabet.reduce(alphabet.check(symbols)))

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    @classmethod
    def parse(cls, alphabet: Alphabet, text: str) -> "GroupElement":
        return cls(alphabet, alphabet.parse(text))

    def _same(self, other: "GroupElement") -> Alphabet:
        if not isinstance(other, GroupElement):
            raise TypeError(f"expected GroupElement, got {type(other).__name__}")
        if other.alphabet != self.alphabet:
            raise AlphabetError("elements over different alphabets")
        return self.alphabet

    def _wrap(self, word: Word) -> "GroupElement":
        return GroupElement(self.alphabet, word)

    def __len__(self):
        return len(self.word)

    def __iter__(self) -> Iterator[int]:
        return iter(self.word)

    def __mul__(self, other):
        A = self._same(other)
        return self._wrap(A.mul(self.word, other.word))

    def __invert__(self):
        return self._wrap(self.alphabet.inv(self.word))

    inverse = __invert__

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self._same(other).equals(self.word, other.word)

    def __hash__(self):
        return hash((self.alphabet, self.alphabet.key(self.word)))

    def __le__(self, other):
        return self._same(other).leq(self.word, other.word)

    def __ge__(self, other):
        return self._same(other).leq(other.word, self.word)

    def __lt__(self, other):
        return self <= other and len(self) < len(other)

    def __gt__(self, other):
        return other < self

    def __and__(self, other):
        return self._wrap(self._same(other).meet(self.word, other.word))

    def __or__(self, other):
        if other is INFINITY:
            return INFINITY
        j = self._same(other).join(self.word, other.word)
        return INFINITY if j is None else self._wrap(j)

    def first(self) -> frozenset:
        return self.alphabet.first(self.word)

    def canonical(self) -> Word:
        return self.alphabet.canonical(self.word)

    def __repr__(self):
        return f"GroupElement({Alphabet.render(self.word)!r})"

    def __str__(self):
        return Alphabet.render(self.word)


# Module-level conveniences mirroring the operation names.

def reduce(raw: Iterable[int], alphabet: Alphabet) -> GroupElement:
    return GroupElement(alphabet, raw)


def equals(x: GroupElement, y: GroupElement) -> bool:
    return x == y


def identity_by_matching(raw: Sequence[int], alphabet: Alphabet, bound: int = DEFAULT_ORACLE_BOUND) -> bool:
    return alphabet.identity_by_matching(alphabet.check(raw), bound)


def leq(x: GroupElement, y: GroupElement) -> bool:
    return x <= y


def meet(x: GroupElement, y: GroupElement) -> GroupElement:
    return x & y


def join(x: GroupElement, y: GroupElement):
    return x | y


def median(x: GroupElement, y: GroupElement, z: GroupElement) -> GroupElement:
    A = x._same(y)
    y._same(z)
    return GroupElement(A, A.median(x.word, y.word, z.word))


def first_symbols(x: GroupElement) -> frozenset:
    return x.first()


def join_irreducibles(x: GroupElement) -> list[GroupElement]:
    return [GroupElement(x.alphabet, w) for w in x.alphabet.join_irreducibles(x.word)]


def cyclic_reduce(a: GroupElement) -> tuple[GroupElement, GroupElement]:
    b, c = a.alphabet.cyclic_reduce(a.word)
    return GroupElement(a.alphabet, b), GroupElement(a.alphabet, c)


def components(a: GroupElement) -> list[GroupElement]:
    return [GroupElement(a.alphabet, w) for w in a.alphabet.components(a.word)]
