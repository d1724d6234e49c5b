"""The space of ASPTs as an explicit rational fan in Q^D."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from importlib import resources
from typing import Iterable, Sequence

import networkx as nx

from . import linalg, polygon, trees
from .errors import IntegrityError, UnsupportedClassError
from .polygon import DihedralOrdering, Subdivision, label, label_str
from .trees import ASPT, PhyloTree, Weighting, separates

Vector = tuple[Fraction, ...]


# ------------------------------------------------------------------ the index set D


@lru_cache(maxsize=None)
def index_set(n: int) -> tuple[tuple[int, int], ...]:
    """Pairs ``(i, j)``, ``i < j``, then ``(i, j~)``, ``i <= j``, as label codes."""
    plain = [(label(i), label(j)) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    mixed = [(label(i), label(j, True)) for i in range(1, n + 1) for j in range(i, n + 1)]
    return tuple(plain + mixed)


def d_position(n: int) -> dict[frozenset[int], int]:
    """Coordinate of every unordered pair ``{a, b}`` of distinct labels (class representative)."""
    out = {}
    for k, (a, b) in enumerate(index_set(n)):
        out[frozenset((a, b))] = k
        out[frozenset((a ^ 1, b ^ 1))] = k
    return out


def d_names(n: int) -> list[list[str]]:
    return [[label_str(a), label_str(b)] for a, b in index_set(n)]


def lineality_vector(n: int, i: int) -> tuple[int, ...]:
    """``L_i``: counts how many entries of the pair have index ``i``."""
    return tuple(int(polygon.index_of(a) == i) + int(polygon.index_of(b) == i) for a, b in index_set(n))


# ------------------------------------------------------------------ distance vectors


def orbit_generators(aspt: ASPT) -> list[tuple[int, ...]]:
    """Distance vector of the unit weighting of each orbit, in orbit order."""
    D = index_set(aspt.n)
    return [tuple(sum(separates(s, a, b) for s in orb) for a, b in D) for orb in aspt.orbits.orbits]


def distance_vector(aspt: ASPT, weighting: Weighting) -> Vector:
    """Path-length distances ``d(a, b)`` for all ``(a, b)`` in D."""
    weighting.validate(aspt.orbits)
    gens = orbit_generators(aspt)
    return tuple(
        sum((w * g[k] for w, g in zip(weighting.orbit_weights, gens)), Fraction(0)) for k in range(len(gens[0]))
    )


def tree_distance(tree: PhyloTree, edge_lengths: dict[int, Fraction], a: int, b: int) -> Fraction:
    """Brute-force path sum between two leaves, lengths keyed by split.

    Independent of :func:`distance_vector`: walks the actual vertex path.
    """
    src, dst = tree.leaves[a], tree.leaves[b]
    parent = {src: -1}
    queue = [src]
    for v in queue:
        for u in tree.adjacency[v]:
            if u not in parent:
                parent[u] = v
                queue.append(u)
    total = Fraction(0)
    v = dst
    es = tree.edge_splits
    while parent[v] >= 0:
        total += edge_lengths[es[tuple(sorted((v, parent[v])))]]
        v = parent[v]
    return total


# ------------------------------------------------------------------ cones


@dataclass(frozen=True, eq=False)
class ConeRecord:
    aspt: ASPT
    lineality_basis: tuple[tuple[int, ...], ...]
    rays: tuple[tuple[int, ...], ...]
    dim: int

    @property
    def code(self) -> bytes:
        return self.aspt.code

    @property
    def interior_point(self) -> tuple[int, ...]:
        """Image of leaf weights 0 and internal weights 1."""
        m = len(self.lineality_basis[0])
        return tuple(sum(r[k] for r in self.rays) for k in range(m))

    @cached_property
    def inverse(self) -> linalg.LeftInverse:
        return linalg.LeftInverse(list(self.lineality_basis) + list(self.rays))

    def coordinates(self, w: Sequence[Fraction | int]) -> list[Fraction] | None:
        """Orbit weights reproducing ``w`` exactly (any signs), or ``None``."""
        return self.inverse.apply(w)

    def contains(self, w: Sequence[Fraction | int], closed: bool = False) -> bool:
        coef = self.coordinates(w)
        if coef is None:
            return False
        internal = coef[self.aspt.n :]
        return all(c >= 0 for c in internal) if closed else all(c > 0 for c in internal)


def cone_of(aspt: ASPT) -> ConeRecord:
    gens = orbit_generators(aspt)
    n = aspt.n
    cone = ConeRecord(aspt, tuple(gens[:n]), tuple(gens[n:]), aspt.k)
    if linalg.rank(gens) != aspt.k:
        raise IntegrityError(f"cone generators of {aspt.code!r} are rank deficient")
    return cone


@dataclass(frozen=True)
class Facet:
    cone: int
    facet: int
    orbit: int


@dataclass(frozen=True, eq=False)
class FanGraph:
    """Cones of the fan (or a subfan) with their facet relations.

    ``facets`` holds every pair (cone, facet obtained by contracting one
    internal orbit) with both ends in the collection.
    """

    n: int
    cones: tuple[ConeRecord, ...]
    facets: tuple[Facet, ...]

    @cached_property
    def index(self) -> dict[bytes, int]:
        return {c.code: k for k, c in enumerate(self.cones)}

    def by_dim(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for k, c in enumerate(self.cones):
            out.setdefault(c.dim, []).append(k)
        return dict(sorted(out.items()))

    def census(self) -> dict[int, int]:
        return {d: len(v) for d, v in self.by_dim().items()}

    @property
    def max_dim(self) -> int:
        return max(c.dim for c in self.cones)

    def maximal_cones(self) -> list[int]:
        top = 2 * self.n - 1
        return [k for k, c in enumerate(self.cones) if c.dim == top]

    def restrict(self, codes: Iterable[bytes]) -> FanGraph:
        keep = set(codes)
        cones = tuple(c for c in self.cones if c.code in keep)
        new = {c.code: k for k, c in enumerate(cones)}
        facets = tuple(
            Facet(new[self.cones[f.cone].code], new[self.cones[f.facet].code], f.orbit)
            for f in self.facets
            if self.cones[f.cone].code in new and self.cones[f.facet].code in new
        )
        return FanGraph(self.n, cones, facets)

    def ray_graph(self) -> nx.Graph:
        """Fan modulo lineality, 1-skeleton: nodes are rays, edges are 2-dimensional cones."""
        g = nx.Graph()
        for k, c in enumerate(self.cones):
            if c.dim == self.n + 1:
                g.add_node(k)
        for f in self.facets:
            if self.cones[f.cone].dim == self.n + 2:
                g.add_node(f.facet)
        for k, c in enumerate(self.cones):
            if c.dim == self.n + 2:
                ends = [f.facet for f in self.facets if f.cone == k]
                if len(ends) == 2:
                    g.add_edge(*ends, cone=k)
        return g

    def as_json(self) -> dict:
        return {
            "n": self.n,
            "D": d_names(self.n),
            "cones": [
                {
                    "tree": c.code.hex(),
                    "dim": c.dim,
                    "rays": [list(r) for r in c.rays],
                    "interior": list(c.interior_point),
                }
                for c in self.cones
            ],
            "facets": [[f.cone, f.facet, f.orbit] for f in self.facets],
        }

    def to_dot(self, name: str = "omega") -> str:
        g = self.ray_graph()
        lines = [f"graph {name} {{"]
        for v in sorted(g.nodes):
            lines.append(f'  c{v} [label="{self.cones[v].code.decode()}"];')
        for u, v, data in sorted(g.edges(data=True)):
            lines.append(f'  c{min(u, v)} -- c{max(u, v)} [cone={data["cone"]}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _facet_relations(cones: Sequence[ConeRecord], verify: bool) -> list[Facet]:
    index = {c.code: k for k, c in enumerate(cones)}
    out = []
    for k, cone in enumerate(cones):
        for orb in cone.aspt.orbits.internal_orbit_ids:
            facet = trees.contract_orbit(cone.aspt, orb)
            j = index[facet.code]
            if verify:
                f = cones[j]
                if f.dim != cone.dim - 1:
                    raise IntegrityError("facet dimension is not one less")
                for g in list(f.lineality_basis) + list(f.rays):
                    if not cone.contains(g, closed=True):
                        raise IntegrityError("facet generator outside the closed cone")
            out.append(Facet(k, j, orb))
    return out


@lru_cache(maxsize=None)
def build_fan(n: int, verify: bool = True) -> FanGraph:
    """All cones ``C(T)`` over the ASPTs, with exactly verified facet relations."""
    polygon.check_n(n)
    cones = tuple(cone_of(a) for a in trees.enumerate_aspts(n))
    return FanGraph(n, cones, tuple(_facet_relations(cones, verify)))


# ------------------------------------------------------------------ membership


@dataclass(frozen=True)
class Reconstruction:
    """The weighted tree with a given distance vector.

    ``boundary`` is true when the point also lies in the closure of a strictly
    larger cone, i.e. it sits on a proper face of some other cone.
    """

    aspt: ASPT
    weighting: Weighting
    boundary: bool


def _detect_splits(w: Sequence[Fraction], n: int) -> list[int] | None:
    pos = d_position(n)
    labels = range(2 * n)

    def d(a: int, b: int) -> Fraction:
        return Fraction(0) if a == b else Fraction(w[pos[frozenset((a, b))]])

    full = (1 << (2 * n)) - 1
    found = []
    for mask in range(2, full, 2):  # label 0 on the complement side
        side = [a for a in labels if (mask >> a) & 1]
        rest = [a for a in labels if not (mask >> a) & 1]
        if len(side) < 2 or len(rest) < 2:
            continue
        ok = True
        for a, a2 in itertools.combinations(side, 2):
            for b, b2 in itertools.combinations(rest, 2):
                inner = d(a, a2) + d(b, b2)
                if not (inner < d(a, b) + d(a2, b2) and inner < d(a, b2) + d(a2, b)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(mask)
    return found


def member_reconstruct(
    w: Sequence[Fraction | int], fan: FanGraph, exhaustive: bool = False
) -> Reconstruction | None:
    """The unique ASWPT whose distance vector is ``w``, if there is one.

    The default path reads the tree topology off ``w`` through strict
    four-point inequalities and solves in that single cone.  ``exhaustive``
    solves in every cone instead and raises if two cones claim ``w``.
    """
    w = tuple(Fraction(x) for x in w)
    if exhaustive:
        hits = [k for k, c in enumerate(fan.cones) if c.contains(w)]
        if len(hits) > 1:
            raise IntegrityError(f"point lies in {len(hits)} distinct cones")
        if not hits:
            return None
        k = hits[0]
    else:
        splits = _detect_splits(w, fan.n)
        try:
            tree = PhyloTree.from_splits(fan.n, splits)
        except Exception:
            return None
        k = fan.index.get(tree.canonical_code)
        if k is None or not fan.cones[k].contains(w):
            return None
    cone = fan.cones[k]
    coef = cone.coordinates(w)
    boundary = any(
        f.facet == k and fan.cones[f.cone].contains(w, closed=True) for f in fan.facets
    )
    return Reconstruction(cone.aspt, Weighting(tuple(coef)), boundary)


def random_weighting(aspt: ASPT, rng: random.Random, max_num: int = 50, max_den: int = 20) -> Weighting:
    """Random admissible weights: rational leaf weights of any sign, internal ones positive."""
    out = []
    for o in range(aspt.k):
        num = rng.randint(-max_num, max_num)
        den = rng.randint(1, max_den)
        if o >= aspt.n:
            num = abs(num) or 1
        out.append(Fraction(num, den))
    return Weighting(tuple(out))


def perturbed_interior_point(cone: ConeRecord, rng: random.Random) -> Vector:
    """Interior point with random positive internal weights (odd denominators) and random lineality shift."""
    coef = [Fraction(rng.randint(-9, 9), 2 * rng.randint(0, 4) + 1) for _ in cone.lineality_basis]
    coef += [Fraction(rng.randint(1, 30), 2 * rng.randint(0, 4) + 1) for _ in cone.rays]
    gens = list(cone.lineality_basis) + list(cone.rays)
    return tuple(sum((c * g[i] for c, g in zip(coef, gens)), Fraction(0)) for i in range(len(gens[0])))


# ------------------------------------------------------------------ subfans and posets


def subfan_for_ordering(lam: DihedralOrdering, fan: FanGraph) -> FanGraph:
    """Cones whose trees are compatible with an ASDO or CSDO."""
    if polygon.classify(lam) == "generic":
        raise UnsupportedClassError(f"{lam} is neither an ASDO nor a CSDO")
    return fan.restrict(trees.trees_compatible_with(lam))


@dataclass(frozen=True)
class FacePoset:
    """Finite graded poset given by its elements (as sets) ordered by inclusion."""

    name: str
    elements: tuple[frozenset, ...]
    ranks: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.ranks:
            object.__setattr__(self, "ranks", tuple(len(e) for e in self.elements))

    def hasse(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for k, r in enumerate(self.ranks):
            g.add_node(k, rank=r)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                if self.ranks[j] == self.ranks[i] + 1 and a < b:
                    g.add_edge(i, j)
        return g


def fan_face_poset(fan: FanGraph) -> FacePoset:
    """Cones modulo lineality, ordered by the face relation (split-set inclusion)."""
    elements = tuple(frozenset(c.aspt.tree.internal_splits) for c in fan.cones)
    ranks = tuple(c.dim - fan.n for c in fan.cones)
    return FacePoset("fan", elements, ranks)


def _orbit_rank(sub: Subdivision, kind: str) -> int:
    if kind == "centrally_symmetric":
        return len({frozenset((d, polygon.central_image(d, sub.n))) for d in sub.diagonals})
    return len(sub.diagonals)


@lru_cache(maxsize=None)
def associahedron_poset(n: int) -> FacePoset:
    """Subdivisions of the (n+2)-gon under refinement."""
    subs = list(polygon.enumerate_polygon_subdivisions(n + 2))
    return FacePoset("associahedron", tuple(frozenset(s.diagonals) for s in subs))


@lru_cache(maxsize=None)
def cyclohedron_poset(n: int) -> FacePoset:
    """Centrally symmetric subdivisions of the 2n-gon, ranked by diagonal orbits."""
    subs = polygon.subdivisions(n, "centrally_symmetric")
    return FacePoset(
        "cyclohedron",
        tuple(frozenset(s.diagonals) for s in subs),
        tuple(_orbit_rank(s, "centrally_symmetric") for s in subs),
    )


def face_poset_isomorphic(a: FanGraph | FacePoset, b: FacePoset) -> bool:
    """Order isomorphism test between a (sub)fan modulo lineality and a reference lattice."""
    pa = fan_face_poset(a) if isinstance(a, FanGraph) else a
    if len(pa.elements) != len(b.elements) or sorted(pa.ranks) != sorted(b.ranks):
        return False
    ga, gb = pa.hasse(), b.hasse()
    return nx.is_isomorphic(ga, gb, node_match=lambda x, y: x["rank"] == y["rank"])


def fan_schema() -> dict:
    """JSON schema that :meth:`FanGraph.as_json` output conforms to."""
    text = resources.files("trop_aspt").joinpath("schema/fan.schema.json").read_text()
    return json.loads(text)
