"""Geometric presentations of surface groups.

Letters are small integers: generator ``g`` is letter ``2*g`` and its inverse
is ``2*g + 1``, so ``inv(i) == i ^ 1``.  The planar cyclic order of the ``2n``
letters is reconstructed from the relators (every consecutive pair ``w_k w_{k+1}``
of a cyclic relator makes ``inv(w_k)`` and ``w_{k+1}`` adjacent in the link of a
vertex) and stored as a tuple ``order``; corner ``i`` is the adjacent pair
``(order[i], order[i + 1])``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

Word = tuple[int, ...]

_NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


class PresentationError(Exception):
    """Base class for presentation problems."""


class ParseError(PresentationError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class ValidationError(PresentationError):
    kind = "ValidationError"


class NotGeometric(ValidationError):
    kind = "NotGeometric"


class GeneratorCount(ValidationError):
    kind = "GeneratorCount"


class TooSmall(ValidationError):
    kind = "TooSmall"


def inv(letter: int) -> int:
    return letter ^ 1


def inverse_word(word: Sequence[int]) -> Word:
    return tuple(inv(x) for x in reversed(word))


def free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for x in word:
        if out and out[-1] == inv(x):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word: Iterable[int]) -> Word:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == inv(w[-1]):
        w = w[1:-1]
    return tuple(w)


def is_cyclically_reduced(word: Sequence[int]) -> bool:
    n = len(word)
    if n == 0:
        return False
    if n == 1:
        return True
    return all(word[k] != inv(word[(k + 1) % n]) for k in range(n))


def canonical_relation(word: Sequence[int]) -> Word:
    """Least rotation of ``word`` or of its inverse (decidable equality)."""
    word = tuple(word)
    candidates = []
    for w in (word, inverse_word(word)):
        for k in range(len(w)):
            candidates.append(w[k:] + w[:k])
    return min(candidates)


@dataclass(frozen=True)
class Presentation:
    """A structural parse: generator names and cyclic relator words."""

    names: tuple[str, ...]
    relations: tuple[Word, ...]

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def num_letters(self) -> int:
        return 2 * len(self.names)

    def letter_name(self, letter: int) -> str:
        name = self.names[letter >> 1]
        return name + "^-1" if letter & 1 else name

    def word_str(self, word: Sequence[int], sep: str = " ") -> str:
        return sep.join(self.letter_name(x) for x in word)

    def parse_word(self, text: str) -> Word:
        """Parse a whitespace or dot separated word such as ``a b^-1``."""
        lookup = {name: i for i, name in enumerate(self.names)}
        out = []
        for tok in re.split(r"[\s.·]+", text.strip()):
            if not tok:
                continue
            out.append(_parse_token(tok, lookup, 0, 0))
        return tuple(out)

    def serialize(self) -> str:
        lines = ["generators: " + " ".join(self.names)]
        for rel in self.relations:
            lines.append("relation: " + self.word_str(rel))
        return "\n".join(lines) + "\n"


def _parse_token(tok: str, lookup: dict[str, int], line: int, col: int) -> int:
    inverse = False
    base = tok
    if tok.endswith("^-1"):
        inverse = True
        base = tok[:-3]
    elif "^" in tok:
        raise ParseError(f"unsupported exponent in {tok!r}", line, col)
    if base not in lookup:
        if not _NAME_RE.match(base):
            raise ParseError(f"malformed token {tok!r}", line, col)
        raise ParseError(f"undeclared letter {base}", line, col)
    return 2 * lookup[base] + int(inverse)


def parse_presentation(text: str) -> Presentation:
    """Parse the line-oriented presentation grammar.

    ``generators: a b c d`` followed by one or more ``relation: ...`` lines; a
    relation token is ``name`` or ``name^-1``.  ``#`` starts a comment.  The
    keyword ``relations:`` is accepted as an alias and ``(none)`` means no
    tokens.  A single line may also use ``/`` to separate the two sections.
    """
    names: list[str] | None = None
    lookup: dict[str, int] = {}
    relations: list[Word] = []
    raw_lines = text.splitlines()
    # allow the compact one-line form "generators: a b / relations: a b"
    segments: list[tuple[int, int, str]] = []
    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0]
        offset = 0
        for part in line.split("/"):
            segments.append((lineno, offset, part))
            offset += len(part) + 1
    for lineno, offset, part in segments:
        if not part.strip():
            continue
        key, sep, rest = part.partition(":")
        col = offset + len(part) - len(part.lstrip()) + 1
        if not sep:
            raise ParseError(f"expected 'generators:' or 'relation:', got {part.strip()!r}", lineno, col)
        key = key.strip()
        rest_col = offset + len(key) + 2
        tokens = _tokens_with_columns(rest, rest_col)
        if key == "generators":
            if names is not None:
                raise ParseError("generators declared twice", lineno, col)
            names = []
            for tcol, tok in tokens:
                if not _NAME_RE.match(tok):
                    raise ParseError(f"malformed generator name {tok!r}", lineno, tcol)
                if tok in lookup:
                    raise ParseError(f"duplicate generator name {tok}", lineno, tcol)
                lookup[tok] = len(names)
                names.append(tok)
        elif key in ("relation", "relations"):
            if names is None:
                raise ParseError("relation before generators", lineno, col)
            if len(tokens) == 1 and tokens[0][1] == "(none)":
                continue
            if not tokens:
                continue
            word = tuple(_parse_token(tok, lookup, lineno, tcol) for tcol, tok in tokens)
            relations.append(word)
        else:
            raise ParseError(f"unknown section {key!r}", lineno, col)
    if names is None:
        raise ParseError("no generators given")
    if not names:
        raise ParseError("empty generator list")
    if not relations:
        raise ParseError("no relations given")
    return Presentation(tuple(names), tuple(relations))


def _tokens_with_columns(text: str, base_col: int) -> list[tuple[int, str]]:
    return [(base_col + m.start(), m.group()) for m in re.finditer(r"\S+", text)]


@dataclass(frozen=True)
class Corner:
    """Adjacent pair of outgoing edge labels; ``index`` is the cyclic position."""

    index: int
    left: int
    right: int

    @property
    def letters(self) -> frozenset[int]:
        return frozenset((self.left, self.right))


@dataclass(frozen=True)
class GeometricPresentation:
    """A presentation whose vertex link is a single ``2n``-cycle.

    ``order[i]`` is the letter at cyclic position ``i`` (clockwise), ``pos`` is
    its inverse, and ``chi[letter]`` is ``-1`` when the letter reverses the
    planar orientation (non-orientable surfaces).
    """

    base: Presentation
    order: tuple[int, ...]
    chi: tuple[int, ...]
    relations: tuple[Word, ...]
    flags: tuple[str, ...] = ()
    pos: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pos = [0] * len(self.order)
        for i, x in enumerate(self.order):
            pos[x] = i
        object.__setattr__(self, "pos", tuple(pos))

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def num_letters(self) -> int:
        return len(self.order)

    @property
    def names(self) -> tuple[str, ...]:
        return self.base.names

    @property
    def orientable(self) -> bool:
        return all(c == 1 for c in self.chi)

    def letter_name(self, letter: int) -> str:
        return self.base.letter_name(letter)

    def word_str(self, word: Sequence[int], sep: str = " ") -> str:
        return self.base.word_str(word, sep)

    def parse_word(self, text: str) -> Word:
        return self.base.parse_word(text)

    def letter(self, name: str) -> int:
        """Letter index for ``'a'`` or ``'a^-1'``."""
        (x,) = self.base.parse_word(name)
        return x

    @cached_property
    def corners(self) -> tuple[Corner, ...]:
        m = len(self.order)
        return tuple(Corner(i, self.order[i], self.order[(i + 1) % m]) for i in range(m))

    def corner_of(self, u: int, v: int) -> int:
        """Index of the corner made by the adjacent letters ``u`` and ``v``."""
        m = len(self.order)
        i, j = self.pos[u], self.pos[v]
        if (i + 1) % m == j:
            return i
        if (j + 1) % m == i:
            return j
        raise ValueError(f"{self.letter_name(u)} and {self.letter_name(v)} are not adjacent")

    def adjacent(self, u: int, v: int) -> bool:
        m = len(self.order)
        d = (self.pos[u] - self.pos[v]) % m
        return d == 1 or d == m - 1

    def corner_name(self, c: int) -> str:
        k = self.corners[c]
        return f"({self.letter_name(k.left)},{self.letter_name(k.right)})"

    @cached_property
    def _corner_faces(self) -> dict[int, tuple[int, int]]:
        # corner index -> (relation index, k) with {inv w_k, w_{k+1}} the corner
        table: dict[int, tuple[int, int]] = {}
        for r, w in enumerate(self.relations):
            L = len(w)
            for k in range(L):
                c = self.corner_of(inv(w[k]), w[(k + 1) % L])
                table[c] = (r, k)
        return table

    def face_word(self, c: int, start: int) -> Word:
        """Boundary of the 2-cell in corner ``c`` read from the vertex along ``start``.

        The word begins with ``start`` and ends with the inverse of the other
        letter of the corner.
        """
        corner = self.corners[c]
        if start not in (corner.left, corner.right):
            raise ValueError("start letter must belong to the corner")
        other = corner.right if start == corner.left else corner.left
        r, k = self._corner_faces[c]
        w = self.relations[r]
        L = len(w)
        if w[(k + 1) % L] == start and inv(w[k]) == other:
            j = (k + 1) % L
            return w[j:] + w[:j]
        # read the relator backwards
        wi = inverse_word(w)
        # position of inv(w[k]) in wi
        j = (L - 1 - k) % L
        rot = wi[j:] + wi[:j]
        assert rot[0] == start and rot[-1] == inv(other)
        return rot

    def relation_of_corner(self, c: int) -> tuple[int, int]:
        """(relation index, position k) with the corner spelled by ``w_k w_{k+1}``."""
        return self._corner_faces[c]

    def opposite_corner(self, c: int) -> int:
        return (c + self.n) % len(self.order)

    def serialize(self) -> str:
        return self.base.serialize()


def validate_geometric(
    P: Presentation, *, allow_length_two: bool = False, min_letters: int = 8
) -> GeometricPresentation:
    """Check the link-cycle condition and build the planar cyclic order."""
    m = P.num_letters
    rels = []
    for w in P.relations:
        if not is_cyclically_reduced(w):
            raise ValidationError(f"relation {P.word_str(w)} is not cyclically reduced")
        if len(w) < 2 or (len(w) == 2 and not allow_length_two):
            raise NotGeometric(f"relation {P.word_str(w)} is too short")
        rels.append(tuple(w))

    counts = [0] * P.n
    for w in rels:
        for x in w:
            counts[x >> 1] += 1
    bad = [P.names[g] for g, c in enumerate(counts) if c != 2]
    if bad:
        raise GeneratorCount(f"generators not appearing exactly twice: {', '.join(bad)}")
    if m < min_letters:
        raise TooSmall(f"2n = {m} < {min_letters}")

    adj: list[list[int]] = [[] for _ in range(m)]
    seen: set[frozenset[int]] = set()
    ordered_pairs: list[tuple[int, int]] = []
    for w in rels:
        L = len(w)
        for k in range(L):
            u, v = inv(w[k]), w[(k + 1) % L]
            key = frozenset((u, v))
            if u == v or key in seen:
                raise NotGeometric(f"corner {{{P.letter_name(u)}, {P.letter_name(v)}}} occurs twice")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
            ordered_pairs.append((u, v))
    if any(len(a) != 2 for a in adj):
        raise NotGeometric("link graph is not 2-regular")

    # walk the cycle from letter 0 in the direction fixed by the first relator pair
    u0, v0 = ordered_pairs[0]
    order = [u0, v0]
    while True:
        prev, cur = order[-2], order[-1]
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        if nxt == order[0]:
            break
        if nxt in order:
            raise NotGeometric("link graph is not a single cycle")
        order.append(nxt)
    if len(order) != m:
        raise NotGeometric(f"link graph splits: cycle through {P.letter_name(u0)} has {len(order)} of {m} letters")
    k0 = order.index(0)
    order = order[k0:] + order[:k0]
    pos = [0] * m
    for i, x in enumerate(order):
        pos[x] = i

    # orientation character: the traversal sense of each face must be constant
    chi: list[int | None] = [None] * m
    for w in rels:
        L = len(w)
        f = []
        for k in range(L):
            u, v = inv(w[k]), w[(k + 1) % L]
            f.append(1 if (pos[u] + 1) % m == pos[v] else -1)
        for k in range(L):
            letter = w[(k + 1) % L]
            val = f[k] * f[(k + 1) % L]
            for x in (letter, inv(letter)):
                if chi[x] is None:
                    chi[x] = val
                elif chi[x] != val:
                    raise NotGeometric("inconsistent orientation character")
    flags = []
    if any(len(w) == 3 and len({x >> 1 for x in w}) < 3 for w in rels):
        flags.append("xxy")
    if any(len(w) == 2 for w in rels):
        flags.append("length2")
    if any(c == -1 for c in chi):
        flags.append("non-orientable")
    return GeometricPresentation(P, tuple(order), tuple(int(c) for c in chi), tuple(rels), tuple(flags))


def load_presentation(text: str, **kwargs) -> GeometricPresentation:
    return validate_geometric(parse_presentation(text), **kwargs)
