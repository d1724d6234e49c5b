"""Phylogenetic trees dual to polygon subdivisions, and their symmetries.

Every edge of a phylogenetic tree is identified with the split it induces on
the leaf labels, stored as a bitmask over label codes normalized to the side
*not* containing label ``1`` (code 0).  Splits determine the tree, which makes
contraction, symmetry and reconstruction purely combinatorial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Literal, Sequence

from . import polygon
from .errors import ContractError, InputError, IntegrityError
from .polygon import DihedralOrdering, Labeling, Subdivision, label_str, parse_label


def _full(n: int) -> int:
    return (1 << (2 * n)) - 1


def normalize_split(mask: int, n: int) -> int:
    return mask ^ _full(n) if mask & 1 else mask


def bar_mask(mask: int, n: int) -> int:
    even = sum(1 << (2 * i) for i in range(n))
    return ((mask & even) << 1) | ((mask >> 1) & even)


def bar_split(split: int, n: int) -> int:
    return normalize_split(bar_mask(split, n), n)


def leaf_split(a: int, n: int) -> int:
    return normalize_split(1 << a, n)


def separates(split: int, a: int, b: int) -> bool:
    return bool((split >> a) & 1) != bool((split >> b) & 1)


@dataclass(frozen=True, eq=False)
class PhyloTree:
    """A tree with leaves labeled bijectively by the 2n signed labels.

    ``adjacency[v]`` lists the neighbours of vertex ``v``; ``leaves[a]`` is
    the vertex carrying label code ``a``.  Equality is label-preserving
    isomorphism, i.e. equality of :attr:`canonical_code`.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    leaves: tuple[int, ...]

    def __post_init__(self) -> None:
        nv = len(self.adjacency)
        if len(self.leaves) != 2 * self.n or len(set(self.leaves)) != 2 * self.n:
            raise InputError("leaf labeling must be a bijection from the 2n labels")
        n_edges = sum(len(nb) for nb in self.adjacency)
        if n_edges != 2 * (nv - 1):
            raise InputError("not a tree: wrong edge count")
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in self.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if len(seen) != nv:
            raise InputError("not a tree: disconnected")
        leafset = set(self.leaves)
        for v, nb in enumerate(self.adjacency):
            if (len(nb) == 1) != (v in leafset):
                raise InputError("leaf labels must sit exactly on the degree-1 vertices")
            if len(nb) == 2:
                raise InputError("phylogenetic trees have no degree-2 vertices")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], leaves: Sequence[int]) -> PhyloTree:
        edges = [tuple(e) for e in edges]
        nv = 1 + max(max(e) for e in edges)
        adj: list[list[int]] = [[] for _ in range(nv)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        return cls(n, tuple(tuple(sorted(a)) for a in adj), tuple(leaves))

    @classmethod
    def from_splits(cls, n: int, splits: Iterable[int]) -> PhyloTree:
        """Rebuild the tree from a set of pairwise compatible splits.

        Trivial (single-leaf) splits are implied and may be omitted.
        """
        full = _full(n)
        # vertex 0 is the star centre, leaf of label a is vertex a + 1;
        # branches[v][u] is the leaf mask on u's side of the edge v-u
        branches: dict[int, dict[int, int]] = {0: {a + 1: 1 << a for a in range(2 * n)}}
        nxt = 2 * n + 1
        for s in sorted({normalize_split(x, n) for x in splits}):
            if bin(s).count("1") < 2 or bin(s ^ full).count("1") < 2:
                continue
            found = None
            for v, br in branches.items():
                for side in (s, s ^ full):
                    inside = [u for u, m in br.items() if m & side]
                    if 2 <= len(inside) <= len(br) - 2 and all(br[u] & ~side == 0 for u in inside):
                        found = v, inside, side
                        break
                if found:
                    break
            if found is None:
                if any(s in (m, m ^ full) for br in branches.values() for m in br.values()):
                    continue
                raise InputError("splits are not pairwise compatible")
            v, inside, side = found
            w = nxt
            nxt += 1
            branches[w] = {u: branches[v].pop(u) for u in inside}
            for u in inside:
                if u in branches:
                    branches[u][w] = branches[u].pop(v)
            branches[w][v] = side ^ full
            branches[v][w] = side
        internal_ids = sorted(branches)
        ren = {v: k for k, v in enumerate(internal_ids)}
        for a in range(2 * n):
            ren[a + 1] = len(internal_ids) + a
        edges = {tuple(sorted((ren[u], ren[v]))) for v, br in branches.items() for u in br}
        return cls.from_edges(n, sorted(edges), [len(internal_ids) + a for a in range(2 * n)])

    # ------------------------------------------------------------ structure

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((u, v) for u in range(self.n_vertices) for v in self.adjacency[u] if u < v))

    @cached_property
    def leaf_vertex_label(self) -> dict[int, int]:
        return {v: a for a, v in enumerate(self.leaves)}

    @cached_property
    def edge_splits(self) -> dict[tuple[int, int], int]:
        """Normalized split of every edge, keyed by the sorted vertex pair."""
        root = self.leaves[0]
        below: dict[int, int] = {}
        parent = {root: -1}
        order = [root]
        for v in order:
            for u in self.adjacency[v]:
                if u not in parent:
                    parent[u] = v
                    order.append(u)
        lab = self.leaf_vertex_label
        for v in reversed(order):
            m = (1 << lab[v]) if v in lab else 0
            for u in self.adjacency[v]:
                if parent.get(u) == v:
                    m |= below[u]
            below[v] = m
        return {tuple(sorted((v, parent[v]))): below[v] for v in order if parent[v] >= 0}

    @cached_property
    def splits(self) -> frozenset[int]:
        return frozenset(self.edge_splits.values())

    @cached_property
    def internal_splits(self) -> frozenset[int]:
        trivial = {leaf_split(a, self.n) for a in range(2 * self.n)}
        return self.splits - trivial

    @cached_property
    def canonical_code(self) -> bytes:
        return canonical_encode(self)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PhyloTree) and self.canonical_code == other.canonical_code

    def __hash__(self) -> int:
        return hash(self.canonical_code)

    def relabel(self, perm: Sequence[int]) -> PhyloTree:
        """Tree with label ``a`` moved to ``perm[a]``."""
        leaves = [0] * (2 * self.n)
        for a, v in enumerate(self.leaves):
            leaves[perm[a]] = v
        return PhyloTree(self.n, self.adjacency, tuple(leaves))

    def as_json(self) -> dict:
        return {
            "n": self.n,
            "edges": [list(e) for e in self.edges],
            "leaves": {label_str(a): v for a, v in sorted(enumerate(self.leaves), key=lambda t: (t[0] & 1, t[0]))},
        }

    @classmethod
    def from_json(cls, data: dict) -> PhyloTree:
        n = int(data["n"])
        leaves = [0] * (2 * n)
        for key, v in data["leaves"].items():
            leaves[parse_label(key)] = int(v)
        return cls.from_edges(n, data["edges"], leaves)


# ------------------------------------------------------------------ canonical form


def _centroids(adj: Sequence[Sequence[int]]) -> list[int]:
    nv = len(adj)
    parent = {0: -1}
    order = [0]
    for v in order:
        for u in adj[v]:
            if u not in parent:
                parent[u] = v
                order.append(u)
    size = [1] * nv
    for v in reversed(order):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
    best, out = nv + 1, []
    for v in range(nv):
        heaviest = nv - size[v]
        for u in adj[v]:
            if parent.get(u) == v:
                heaviest = max(heaviest, size[u])
        if heaviest < best:
            best, out = heaviest, [v]
        elif heaviest == best:
            out.append(v)
    return out


def _ahu(root: int, adj: Sequence[Sequence[int]], leaf_label: dict[int, int]) -> str:
    codes: dict[int, str] = {}
    parent = {root: -1}
    order = [root]
    for v in order:
        for u in adj[v]:
            if u not in parent:
                parent[u] = v
                order.append(u)
    for v in reversed(order):
        if v in leaf_label:
            codes[v] = f"{leaf_label[v]},"
        else:
            codes[v] = "(" + "".join(sorted(codes[u] for u in adj[v] if parent.get(u) == v)) + ")"
    return codes[root]


def canonical_encode(tree: PhyloTree) -> bytes:
    """AHU string of the tree rooted at its centroid, leaves as label tokens.

    With two centroids the lexicographically smaller encoding wins.
    """
    lab = tree.leaf_vertex_label
    return min(_ahu(c, tree.adjacency, lab) for c in _centroids(tree.adjacency)).encode("ascii")


# ------------------------------------------------------------------ dual trees


@lru_cache(maxsize=None)
def _cell_structure(theta: Subdivision) -> tuple[tuple[tuple[int, int], ...], tuple[int, ...]]:
    """Cell adjacency (via shared diagonals) and the cell owning each side."""
    m = theta.n_vertices
    cells = theta.cells
    side_cell = [0] * m
    by_diag: dict[tuple[int, int], list[int]] = {}
    for k, cell in enumerate(cells):
        for i in range(len(cell)):
            a, b = cell[i], cell[(i + 1) % len(cell)]
            if b == (a + 1) % m:
                side_cell[a] = k
            elif a == (b + 1) % m:
                side_cell[b] = k
            else:
                by_diag.setdefault(tuple(sorted((a, b))), []).append(k)
    links = tuple(tuple(v) for v in by_diag.values())
    return links, tuple(side_cell)


def dual_tree(theta: Subdivision, phi: Labeling) -> PhyloTree:
    """Dual tree: cells become internal vertices, each label a leaf on its side's cell."""
    if theta.n_vertices != 2 * phi.n:
        raise InputError("subdivision and labeling live on different polygons")
    links, side_cell = _cell_structure(theta)
    n = phi.n
    nc = len(theta.cells)
    adj: list[list[int]] = [[] for _ in range(nc + 2 * n)]
    for u, v in links:
        adj[u].append(v)
        adj[v].append(u)
    for a in range(2 * n):
        c = side_cell[phi.sides[a]]
        adj[c].append(nc + a)
        adj[nc + a].append(c)
    return PhyloTree(n, tuple(tuple(x) for x in adj), tuple(nc + a for a in range(2 * n)))


# ------------------------------------------------------------------ symmetry


@dataclass(frozen=True)
class Symmetry:
    """Involutive automorphism swapping the leaves ``a`` and ``a~``."""

    vertex_map: tuple[int, ...]

    def edge_image(self, e: tuple[int, int]) -> tuple[int, int]:
        return tuple(sorted((self.vertex_map[e[0]], self.vertex_map[e[1]])))


def _vertex_signature(tree: PhyloTree, v: int) -> frozenset[int]:
    es = tree.edge_splits
    return frozenset(es[tuple(sorted((v, u)))] for u in tree.adjacency[v])


def find_symmetry(tree: PhyloTree) -> Symmetry | None:
    """The automorphism exchanging each ``a`` with ``a~``, if it exists.

    Each vertex is pinned down by the splits of its incident edges, so the
    automorphism is unique whenever it exists.
    """
    n = tree.n
    if {bar_split(s, n) for s in tree.splits} != set(tree.splits):
        return None
    sig = {_vertex_signature(tree, v): v for v in range(tree.n_vertices)}
    vmap = []
    for v in range(tree.n_vertices):
        image = frozenset(bar_split(s, n) for s in _vertex_signature(tree, v))
        if image not in sig:
            return None
        vmap.append(sig[image])
    for a in range(2 * n):
        if vmap[tree.leaves[a]] != tree.leaves[a ^ 1]:
            raise IntegrityError("symmetry does not swap barred leaves")
    if any(vmap[vmap[v]] != v for v in range(len(vmap))):
        raise IntegrityError("symmetry is not an involution")
    return Symmetry(tuple(vmap))


@dataclass(frozen=True)
class OrbitDecomposition:
    """Edge orbits of the symmetry, as tuples of splits.

    Orbit ``i-1`` (for ``i`` in ``1..n``) holds the leaf edges of ``i`` and
    ``i~``; the internal orbits follow, ordered by their smallest split.
    """

    n: int
    orbits: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.orbits)

    @property
    def leaf_orbit_ids(self) -> range:
        return range(self.n)

    @property
    def internal_orbit_ids(self) -> range:
        return range(self.n, len(self.orbits))

    def orbit_of_split(self, split: int) -> int:
        for k, orb in enumerate(self.orbits):
            if split in orb:
                return k
        raise KeyError(split)


def orbit_decomposition(tree: PhyloTree) -> OrbitDecomposition:
    n = tree.n
    leaf_orbits = [tuple(sorted({leaf_split(2 * i, n), leaf_split(2 * i + 1, n)})) for i in range(n)]
    internal = sorted({tuple(sorted({s, bar_split(s, n)})) for s in tree.internal_splits})
    return OrbitDecomposition(n, tuple(leaf_orbits + internal))


@dataclass(frozen=True)
class ASPT:
    tree: PhyloTree
    symmetry: Symmetry
    orbits: OrbitDecomposition

    @property
    def code(self) -> bytes:
        return self.tree.canonical_code

    @property
    def k(self) -> int:
        return self.orbits.k

    @property
    def n(self) -> int:
        return self.tree.n


def make_aspt(tree: PhyloTree) -> ASPT:
    sym = find_symmetry(tree)
    if sym is None:
        raise InputError("tree has no bar-swapping involution")
    return ASPT(tree, sym, orbit_decomposition(tree))


# ------------------------------------------------------------------ enumeration


@lru_cache(maxsize=None)
def _realized_codes(n: int, mode: polygon.SymmetryMode) -> dict[bytes, PhyloTree]:
    out: dict[bytes, PhyloTree] = {}
    for theta in polygon.subdivisions(n, mode):
        for phi in polygon.labelings(n, mode):
            t = dual_tree(theta, phi)
            out.setdefault(t.canonical_code, t)
    return out


@lru_cache(maxsize=None)
def enumerate_aspts(n: int) -> tuple[ASPT, ...]:
    """Every ASPT for ``n``, sorted by canonical code."""
    polygon.check_n(n)
    trees = _realized_codes(n, "axially_symmetric")
    return tuple(make_aspt(trees[c]) for c in sorted(trees))


@lru_cache(maxsize=None)
def aspt_index(n: int) -> dict[bytes, ASPT]:
    return {a.code: a for a in enumerate_aspts(n)}


def is_aspt(tree: PhyloTree) -> bool:
    return tree.canonical_code in aspt_index(tree.n)


def cspt_codes(n: int) -> frozenset[bytes]:
    return frozenset(_realized_codes(n, "centrally_symmetric"))


def is_cspt(tree: PhyloTree) -> bool:
    """Realizable by a centrally symmetric subdivision and labeling."""
    return tree.canonical_code in cspt_codes(tree.n)


def hyperoctahedral_relabelings(n: int) -> list[tuple[int, ...]]:
    """All label permutations generated by permuting indices and swapping ``i``/``i~``."""
    out = []
    for perm in itertools.permutations(range(n)):
        for flips in itertools.product((0, 1), repeat=n):
            p = [0] * (2 * n)
            for i in range(n):
                p[2 * i] = 2 * perm[i] + flips[i]
                p[2 * i + 1] = 2 * perm[i] + 1 - flips[i]
            out.append(tuple(p))
    return out


def shape_code(tree: PhyloTree) -> bytes:
    """Canonical code of the tree's orbit under signed relabelings of ``1..n``."""
    return min(tree.relabel(p).canonical_code for p in hyperoctahedral_relabelings(tree.n))


# ------------------------------------------------------------------ contraction


def contract_orbit(aspt: ASPT, orbit: int) -> ASPT:
    """Contract every edge of an internal orbit; the result must again be an ASPT."""
    if orbit in aspt.orbits.leaf_orbit_ids:
        raise ContractError("leaf orbits cannot be contracted")
    if orbit not in aspt.orbits.internal_orbit_ids:
        raise ContractError(f"no orbit {orbit}")
    drop = set(aspt.orbits.orbits[orbit])
    tree = PhyloTree.from_splits(aspt.n, [s for s in aspt.tree.internal_splits if s not in drop])
    index = aspt_index(aspt.n)
    if tree.canonical_code not in index:
        raise IntegrityError("orbit contraction left the set of ASPTs")
    return index[tree.canonical_code]


# ------------------------------------------------------------------ compatibility


@lru_cache(maxsize=None)
def trees_compatible_with(lam: DihedralOrdering) -> frozenset[bytes]:
    """Codes of all trees ``T(theta, phi)`` with ``phi`` reading as ``lam``.

    Rotating or reflecting ``(theta, phi)`` together leaves the dual tree
    unchanged, so one representative labeling and every subdivision suffice.
    """
    phi = lam.labeling()
    return frozenset(dual_tree(theta, phi).canonical_code for theta in polygon.subdivisions(lam.n))


@lru_cache(maxsize=None)
def symmetric_trees_for(lam: DihedralOrdering) -> frozenset[bytes]:
    """Trees realized with both subdivision and labeling symmetric of ``lam``'s type."""
    kind = polygon.classify(lam)
    if kind == "generic":
        raise InputError("ordering is neither an ASDO nor a CSDO")
    mode = "axially_symmetric" if kind == "ASDO" else "centrally_symmetric"
    phis = [phi for phi in polygon.labelings(lam.n, mode) if polygon.ordering_of(phi) == lam]
    return frozenset(
        dual_tree(theta, phi).canonical_code for theta in polygon.subdivisions(lam.n, mode) for phi in phis
    )


def compatible_orderings(
    tree: PhyloTree, cls: Literal["ASDO", "CSDO", "all"] = "all"
) -> list[DihedralOrdering]:
    """Orderings ``lam`` such that the tree is some ``T(theta, phi)`` with ``lam(phi) = lam``."""
    code = tree.canonical_code
    return [lam for lam in polygon.enumerate_orderings(tree.n, cls) if code in trees_compatible_with(lam)]


# ------------------------------------------------------------------ weights


@dataclass(frozen=True)
class Weighting:
    """Edge lengths, one exact rational per symmetry orbit (orbit order as in the decomposition)."""

    orbit_weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "orbit_weights", tuple(Fraction(x) for x in self.orbit_weights))

    def validate(self, orbits: OrbitDecomposition) -> None:
        if len(self.orbit_weights) != orbits.k:
            raise InputError(f"expected {orbits.k} orbit weights, got {len(self.orbit_weights)}")
        if any(self.orbit_weights[o] <= 0 for o in orbits.internal_orbit_ids):
            raise InputError("internal edges need strictly positive weight")
