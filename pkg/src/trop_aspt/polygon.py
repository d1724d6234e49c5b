"""Combinatorics of the regular 2n-gon.

Conventions
-----------
* Vertices are ``0 .. 2n-1`` counterclockwise; side ``s`` joins vertices
  ``s`` and ``s+1 (mod 2n)``.
* The symmetry axis is the long diagonal ``{0, n}``.  The mirror in it maps
  vertex ``v`` to ``-v`` and side ``s`` to ``-s-1``; the central symmetry maps
  ``v`` to ``v+n`` and ``s`` to ``s+n``.
* A signed label ``i`` or ``i~`` (``i`` barred) is stored as the integer
  ``2*(i-1) + barred``.  Integer order is then ``1 < 1~ < 2 < 2~ < ...`` and
  barring is ``a ^ 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Literal, Sequence

from .errors import CapacityError, ContractError, InputError

MAX_N = 5
MAX_N_ALL_ORDERINGS = 4

Diagonal = tuple[int, int]
SymmetryMode = Literal["all", "axially_symmetric", "centrally_symmetric"]
OrderingClass = Literal["ASDO", "CSDO", "generic"]


# ---------------------------------------------------------------- labels


def label(i: int, barred: bool = False) -> int:
    if i < 1:
        raise InputError(f"label index must be positive, got {i}")
    return 2 * (i - 1) + int(barred)


def bar(a: int) -> int:
    return a ^ 1


def index_of(a: int) -> int:
    """``|a|``: the unsigned index in ``1..n``."""
    return a // 2 + 1


def is_barred(a: int) -> bool:
    return bool(a & 1)


def label_str(a: int) -> str:
    return f"{index_of(a)}~" if is_barred(a) else str(index_of(a))


def parse_label(text: str) -> int:
    text = text.strip()
    barred = text.endswith("~") or text.endswith("̄")
    digits = text.rstrip("~̄")
    if not digits.isdigit():
        raise InputError(f"cannot parse label {text!r}")
    return label(int(digits), barred)


def all_labels(n: int) -> range:
    return range(2 * n)


def check_n(n: int, limit: int = MAX_N, what: str = "n") -> None:
    if n < 3:
        raise InputError(f"{what} must be at least 3, got {n}")
    if n > limit:
        raise CapacityError(f"{what}={n} exceeds the configured limit {limit}")


# ---------------------------------------------------------------- diagonals


def make_diagonal(v1: int, v2: int, m: int) -> Diagonal:
    """Validated diagonal of an ``m``-gon, endpoints sorted."""
    if not (0 <= v1 < m and 0 <= v2 < m):
        raise InputError(f"vertex out of range for a {m}-gon: {(v1, v2)}")
    a, b = sorted((v1, v2))
    if b - a < 2 or (a == 0 and b == m - 1):
        raise InputError(f"{(v1, v2)} is not a diagonal of a {m}-gon")
    return (a, b)


def all_diagonals(m: int) -> list[Diagonal]:
    return [(a, b) for a in range(m) for b in range(a + 2, m) if not (a == 0 and b == m - 1)]


def crosses(d1: Diagonal, d2: Diagonal, n: int) -> bool:
    """Whether two diagonals of the 2n-gon meet in a single interior point."""
    m = 2 * n
    a, b = make_diagonal(*d1, m)
    c, d = make_diagonal(*d2, m)
    return _crosses(a, b, c, d)


def _crosses(a: int, b: int, c: int, d: int) -> bool:
    return (a < c < b < d) or (c < a < d < b)


def mirror_image(d: Diagonal, n: int) -> Diagonal:
    m = 2 * n
    a, b = make_diagonal(*d, m)
    return make_diagonal((-a) % m, (-b) % m, m)


def central_image(d: Diagonal, n: int) -> Diagonal:
    m = 2 * n
    a, b = make_diagonal(*d, m)
    return make_diagonal((a + n) % m, (b + n) % m, m)


def mirror_side(s: int, n: int) -> int:
    return (-s - 1) % (2 * n)


def opposite_side(s: int, n: int) -> int:
    return (s + n) % (2 * n)


# ---------------------------------------------------------------- subdivisions


@dataclass(frozen=True)
class Subdivision:
    """A set of pairwise noncrossing diagonals of an ``n_vertices``-gon."""

    n_vertices: int
    diagonals: tuple[Diagonal, ...]

    def __post_init__(self) -> None:
        m = self.n_vertices
        diags = tuple(sorted({make_diagonal(a, b, m) for a, b in self.diagonals}))
        object.__setattr__(self, "diagonals", diags)
        for (a, b), (c, d) in itertools.combinations(diags, 2):
            if _crosses(a, b, c, d):
                raise InputError(f"diagonals {(a, b)} and {(c, d)} cross")

    @classmethod
    def of_2n_gon(cls, n: int, diagonals: Iterable[Sequence[int]] = ()) -> Subdivision:
        return cls(2 * n, tuple(tuple(d) for d in diagonals))

    @property
    def n(self) -> int:
        return self.n_vertices // 2

    @property
    def is_triangulation(self) -> bool:
        return len(self.diagonals) == self.n_vertices - 3

    @cached_property
    def axially_symmetric(self) -> bool:
        if self.n_vertices % 2:
            return False
        s = set(self.diagonals)
        return all(mirror_image(d, self.n) in s for d in s)

    @cached_property
    def centrally_symmetric(self) -> bool:
        if self.n_vertices % 2:
            return False
        s = set(self.diagonals)
        return all(central_image(d, self.n) in s for d in s)

    def issubset(self, other: Subdivision) -> bool:
        return set(self.diagonals) <= set(other.diagonals)

    @cached_property
    def cells(self) -> tuple[tuple[int, ...], ...]:
        """Polygonal cells, each as its vertices in counterclockwise order."""
        cells = [tuple(range(self.n_vertices))]
        for a, b in self.diagonals:
            for k, cell in enumerate(cells):
                if a in cell and b in cell:
                    i, j = sorted((cell.index(a), cell.index(b)))
                    first = cell[i : j + 1]
                    second = cell[j:] + cell[: i + 1]
                    cells[k : k + 1] = [first, second]
                    break
        return tuple(sorted(cells))

    def as_json(self) -> list[list[int]]:
        return [list(d) for d in self.diagonals]

    @classmethod
    def from_json(cls, n: int, data: Sequence[Sequence[int]]) -> Subdivision:
        return cls.of_2n_gon(n, data)


def _noncrossing_sets(m: int) -> Iterator[tuple[Diagonal, ...]]:
    diags = all_diagonals(m)

    def extend(start: int, chosen: list[Diagonal]) -> Iterator[tuple[Diagonal, ...]]:
        yield tuple(chosen)
        for k in range(start, len(diags)):
            a, b = diags[k]
            if any(_crosses(a, b, c, d) for c, d in chosen):
                continue
            chosen.append(diags[k])
            yield from extend(k + 1, chosen)
            chosen.pop()

    yield from extend(0, [])


def enumerate_polygon_subdivisions(m: int) -> Iterator[Subdivision]:
    """All subdivisions of an ``m``-gon (empty one included), lexicographically."""
    if m < 3:
        raise InputError("a polygon needs at least 3 vertices")
    if m > 2 * MAX_N + 2:
        raise CapacityError(f"{m}-gon exceeds the configured limit")
    for diags in _noncrossing_sets(m):
        yield Subdivision(m, diags)


def enumerate_subdivisions(n: int, mode: SymmetryMode = "all") -> Iterator[Subdivision]:
    """Subdivisions of the 2n-gon satisfying ``mode``, lexicographic by diagonals."""
    check_n(n)
    if mode not in ("all", "axially_symmetric", "centrally_symmetric"):
        raise InputError(f"unknown mode {mode!r}")
    for sub in enumerate_polygon_subdivisions(2 * n):
        if mode == "axially_symmetric" and not sub.axially_symmetric:
            continue
        if mode == "centrally_symmetric" and not sub.centrally_symmetric:
            continue
        yield sub


@lru_cache(maxsize=None)
def subdivisions(n: int, mode: SymmetryMode = "all") -> tuple[Subdivision, ...]:
    return tuple(enumerate_subdivisions(n, mode))


def triangulations(n: int, mode: SymmetryMode = "all") -> tuple[Subdivision, ...]:
    """Maximal subdivisions among those satisfying ``mode``.

    A maximal axially symmetric subdivision need not be a triangulation of
    the 2n-gon: a symmetric pair of crossing diagonals cannot both be added.
    """
    subs = subdivisions(n, mode)
    sets = [frozenset(s.diagonals) for s in subs]
    return tuple(s for s, d in zip(subs, sets) if not any(d < e for e in sets))


# ---------------------------------------------------------------- labelings


@dataclass(frozen=True)
class Labeling:
    """Bijection from signed labels to sides; ``sides[a]`` is the side of label ``a``."""

    n: int
    sides: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.sides) != list(range(2 * self.n)):
            raise InputError(f"not a bijection onto the sides of the {2 * self.n}-gon")

    def side_of(self, a: int) -> int:
        return self.sides[a]

    @cached_property
    def word(self) -> tuple[int, ...]:
        """Labels read from side 0 to side 2n-1."""
        out = [0] * (2 * self.n)
        for a, s in enumerate(self.sides):
            out[s] = a
        return tuple(out)

    @classmethod
    def from_word(cls, word: Sequence[int]) -> Labeling:
        n = len(word) // 2
        sides = [0] * len(word)
        for s, a in enumerate(word):
            sides[a] = s
        return cls(n, tuple(sides))

    @property
    def axially_symmetric(self) -> bool:
        return all(self.sides[a ^ 1] == mirror_side(self.sides[a], self.n) for a in range(2 * self.n))

    @property
    def centrally_symmetric(self) -> bool:
        return all(self.sides[a ^ 1] == opposite_side(self.sides[a], self.n) for a in range(2 * self.n))

    def as_json(self) -> list[int]:
        """Sides in the order ``1..n, 1~..n~``."""
        return [self.sides[2 * i] for i in range(self.n)] + [self.sides[2 * i + 1] for i in range(self.n)]

    @classmethod
    def from_json(cls, data: Sequence[int]) -> Labeling:
        n = len(data) // 2
        sides = [0] * (2 * n)
        for i in range(n):
            sides[2 * i] = data[i]
            sides[2 * i + 1] = data[n + i]
        return cls(n, tuple(sides))


def standard_labeling(n: int) -> Labeling:
    """``i`` on side ``i-1`` and ``i~`` on side ``2n-i``; axially symmetric."""
    sides = [0] * (2 * n)
    for i in range(1, n + 1):
        sides[label(i)] = i - 1
        sides[label(i, True)] = 2 * n - i
    return Labeling(n, tuple(sides))


def enumerate_labelings(n: int, mode: SymmetryMode) -> Iterator[Labeling]:
    """All axially or centrally symmetric labelings, sorted by side tuple."""
    check_n(n)
    if mode == "axially_symmetric":
        partner = lambda s: mirror_side(s, n)  # noqa: E731
    elif mode == "centrally_symmetric":
        partner = lambda s: opposite_side(s, n)  # noqa: E731
    else:
        raise InputError(f"labelings are enumerated by symmetry, got mode {mode!r}")
    side_pairs = sorted({tuple(sorted((s, partner(s)))) for s in range(2 * n)})
    out = []
    for perm in itertools.permutations(range(n)):
        for flips in itertools.product((0, 1), repeat=n):
            sides = [0] * (2 * n)
            for i, k in enumerate(perm):
                s, t = side_pairs[k]
                if flips[i]:
                    s, t = t, s
                sides[2 * i] = s
                sides[2 * i + 1] = t
            out.append(tuple(sides))
    for sides in sorted(out):
        yield Labeling(n, sides)


@lru_cache(maxsize=None)
def labelings(n: int, mode: SymmetryMode) -> tuple[Labeling, ...]:
    return tuple(enumerate_labelings(n, mode))


# ---------------------------------------------------------------- dihedral orderings


def canonical_word(seq: Sequence[int]) -> tuple[int, ...]:
    """Lexicographic minimum over all rotations and reversals."""
    seq = tuple(seq)
    m = len(seq)
    best = seq
    for w in (seq, seq[::-1]):
        for r in range(m):
            cand = w[r:] + w[:r]
            if cand < best:
                best = cand
    return best


@dataclass(frozen=True, order=True)
class DihedralOrdering:
    n: int
    word: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.word) != list(range(2 * self.n)):
            raise InputError("each signed label must appear exactly once")
        object.__setattr__(self, "word", canonical_word(self.word))

    @classmethod
    def parse(cls, text: str) -> DihedralOrdering:
        word = [parse_label(t) for t in text.split(",") if t.strip()]
        return cls(len(word) // 2, tuple(word))

    def as_json(self) -> list[str]:
        return [label_str(a) for a in self.word]

    def __str__(self) -> str:
        return ",".join(self.as_json())

    def labeling(self) -> Labeling:
        """A representative labeling reading this ordering from side 0."""
        return Labeling.from_word(self.word)


def ordering_of(phi: Labeling) -> DihedralOrdering:
    return DihedralOrdering(phi.n, phi.word)


@lru_cache(maxsize=None)
def _symmetric_orderings(n: int, mode: SymmetryMode) -> frozenset[DihedralOrdering]:
    return frozenset(ordering_of(phi) for phi in labelings(n, mode))


def classify(lam: DihedralOrdering) -> OrderingClass:
    """ASDO / CSDO / generic, by searching for a realizing symmetric labeling."""
    if lam in _symmetric_orderings(lam.n, "axially_symmetric"):
        return "ASDO"
    if lam in _symmetric_orderings(lam.n, "centrally_symmetric"):
        return "CSDO"
    return "generic"


def enumerate_orderings(n: int, cls: Literal["ASDO", "CSDO", "all"] = "all") -> list[DihedralOrdering]:
    """Every dihedral ordering of the given class, sorted by canonical word."""
    if cls == "ASDO":
        check_n(n)
        return sorted(_symmetric_orderings(n, "axially_symmetric"))
    if cls == "CSDO":
        check_n(n)
        return sorted(_symmetric_orderings(n, "centrally_symmetric"))
    if cls != "all":
        raise InputError(f"unknown ordering class {cls!r}")
    check_n(n, MAX_N_ALL_ORDERINGS)
    out = []
    # label 0 first fixes rotation; keep one of each reversal pair
    for rest in itertools.permutations(range(1, 2 * n)):
        if rest[0] < rest[-1]:
            out.append(DihedralOrdering(n, (0,) + rest))
    return sorted(out)


# ---------------------------------------------------------------- contraction


def contract_to_small_polygon(theta: Subdivision) -> Subdivision:
    """Collapse vertices ``1..n-1`` of an axially symmetric subdivision to one vertex.

    The image lives on the ``(n+2)``-gon with vertices, in order, the collapsed
    vertex (new index 0) followed by old vertices ``n, n+1, ..., 2n-1, 0``.
    Diagonals inside the collapsed half are dropped (they are mirrors of kept
    ones); a diagonal perpendicular to the axis keeps its far endpoint.
    """
    if theta.n_vertices % 2 or not theta.axially_symmetric:
        raise ContractError("contraction needs an axially symmetric subdivision")
    n = theta.n
    m = 2 * n

    def new_index(v: int) -> int:
        if 1 <= v <= n - 1:
            return 0
        return n + 1 if v == 0 else v - n + 1

    kept = set(range(n, m)) | {0}
    out = set()
    for a, b in theta.diagonals:
        if a in kept and b in kept:
            out.add(tuple(sorted((new_index(a), new_index(b)))))
        elif (a in kept) != (b in kept) and (-a) % m == b:
            out.add(tuple(sorted((0, new_index(b if b in kept else a)))))
    return Subdivision(n + 2, tuple(out))
