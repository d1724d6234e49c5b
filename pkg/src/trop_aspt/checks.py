"""Named verification suites over the fan and the cluster variety.

Each suite returns a :class:`Check`; a failing check carries a small
certificate (the offending tree, point, or count) for the report.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import networkx as nx

from . import cluster, fan as fanmod, polygon
from .fan import FanGraph
from .linalg import rank


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    certificate: dict = field(default_factory=dict)
    reported_only: bool = False
    seconds: float = 0.0

    def as_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.reported_only:
            out["reported_only"] = True
        if self.certificate:
            out["certificate"] = self.certificate
        return out


@dataclass
class Context:
    n: int
    seed: int
    samples: int = 1000
    perturbations: int = 10
    fan: FanGraph = field(init=False)
    _relations: tuple | None = field(default=None, init=False)

    def __post_init__(self) -> None:
        self.fan = fanmod.build_fan(self.n)

    @property
    def relations(self) -> tuple[cluster.QuadraticRelation, ...]:
        if self._relations is None:
            self._relations = cluster.discover_relations(self.n, self.seed)
        return self._relations

    def rng(self, salt: str) -> random.Random:
        return random.Random(f"{self.seed}:{salt}")


def check_purity(ctx: Context) -> Check:
    fan = ctx.fan
    top = 2 * ctx.n - 1
    covered = {f.facet for f in fan.facets}
    bad = [c.code.decode() for k, c in enumerate(fan.cones) if c.dim < top and k not in covered]
    census = fan.census()
    detail = "cones by dimension " + ", ".join(f"dim{d}:{c}" for d, c in census.items())
    ok = not bad and max(census) == top
    return Check("purity", ok, detail, {"not a facet of anything": bad[:3]} if bad else {})


def check_dimensions(ctx: Context) -> Check:
    bad = [c.code.decode() for c in ctx.fan.cones if c.dim != c.aspt.k]
    return Check("dimension", not bad, "dim C(T) = k(T) for every cone", {"trees": bad[:3]} if bad else {})


def check_lineality(ctx: Context) -> Check:
    n = ctx.n
    want = [fanmod.lineality_vector(n, i) for i in range(1, n + 1)]
    bad = [c.code.decode() for c in ctx.fan.cones if list(c.lineality_basis) != want]
    ok = not bad and rank(want) == n
    return Check("lineality", ok, f"shared lineality basis L_1..L_{n} of dimension {n}",
                 {"trees": bad[:3]} if bad else {})


def check_facets(ctx: Context) -> Check:
    fan = ctx.fan
    per_cone: dict[int, int] = {}
    for f in fan.facets:
        per_cone[f.cone] = per_cone.get(f.cone, 0) + 1
    bad = [c.code.decode() for k, c in enumerate(fan.cones) if per_cone.get(k, 0) != c.dim - ctx.n]
    g = fan.ray_graph()
    connected = g.number_of_nodes() > 0 and nx.is_connected(g)
    detail = (f"{len(fan.facets)} facet relations; ray graph {g.number_of_nodes()} nodes, "
              f"{g.number_of_edges()} edges, {'connected' if connected else 'disconnected'}")
    return Check("facets", not bad and connected, detail, {"trees": bad[:3]} if bad else {})


def check_injectivity(ctx: Context) -> Check:
    """Random ASWPTs reconstruct exactly; interior points lie in exactly one cone."""
    fan = ctx.fan
    rng = ctx.rng("injectivity")
    aspts = [c.aspt for c in fan.cones]
    for t in range(ctx.samples):
        aspt = rng.choice(aspts)
        wt = fanmod.random_weighting(aspt, rng)
        w = fanmod.distance_vector(aspt, wt)
        rec = fanmod.member_reconstruct(w, fan)
        if rec is None or rec.aspt.code != aspt.code or rec.weighting != wt:
            return Check("injectivity", False, f"roundtrip failed at sample {t}",
                         {"tree": aspt.code.decode(), "w": [str(x) for x in w]})
    for k, c in enumerate(fan.cones):
        hits = [j for j, other in enumerate(fan.cones) if other.contains(c.interior_point)]
        if hits != [k]:
            return Check("injectivity", False, "interior point in several cones",
                         {"tree": c.code.decode(), "hits": len(hits)})
    return Check("injectivity", True,
                 f"{ctx.samples} random roundtrips exact; {len(fan.cones)} interior points in one cone each")


def check_posets(ctx: Context) -> Check:
    n = ctx.n
    assoc, cyclo = fanmod.associahedron_poset(n), fanmod.cyclohedron_poset(n)
    counts = {"ASDO": 0, "CSDO": 0}
    for cls, ref in (("ASDO", assoc), ("CSDO", cyclo)):
        for lam in polygon.enumerate_orderings(n, cls):
            sub = fanmod.subfan_for_ordering(lam, ctx.fan)
            if not fanmod.face_poset_isomorphic(sub, ref):
                return Check("posets", False, f"{cls} subfan not isomorphic to the {ref.name}",
                             {"ordering": str(lam)})
            counts[cls] += 1
    return Check("posets", True,
                 f"{counts['ASDO']} ASDO subfans ~ associahedron, {counts['CSDO']} CSDO subfans ~ cyclohedron")


def check_relations(ctx: Context) -> Check:
    rels = ctx.relations
    bad = [str(r) for r in rels if not cluster.verify_relation(r)]
    in_span = cluster.in_relation_span(cluster.brahmagupta_relation(ctx.n), rels)
    ok = not bad and in_span
    return Check("relations", ok,
                 f"{len(rels)} quadrics, all vanish symbolically; Brahmagupta identity in span: {in_span}",
                 {"failing": bad[:3]} if bad else {})


def check_prevariety(ctx: Context) -> Check:
    rng = ctx.rng("prevariety")
    rels = ctx.relations
    total = 0
    for c in ctx.fan.cones:
        points = [c.interior_point] + [fanmod.perturbed_interior_point(c, rng) for _ in range(ctx.perturbations)]
        for w in points:
            total += 1
            if not cluster.prevariety_check(w, rels):
                return Check("prevariety", False, "interior point fails the quadric certificate",
                             {"tree": c.code.decode(), "w": [str(x) for x in w]})
    return Check("prevariety", True, f"{total} points of the fan pass every quadric")


def check_reverse_inclusion(ctx: Context) -> Check:
    """Report only: how often random points off the fan fail the certificate."""
    rng = ctx.rng("reverse")
    rels = ctx.relations
    m = ctx.n * ctx.n
    off = fail = 0
    for _ in range(ctx.samples):
        w = tuple(Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(m))
        if fanmod.member_reconstruct(w, ctx.fan) is not None:
            continue
        off += 1
        fail += not cluster.prevariety_check(w, rels)
    frac = fail / off if off else 0.0
    return Check("reverse-inclusion", True,
                 f"{fail}/{off} random points off the fan fail the certificate ({frac:.3f})",
                 reported_only=True)


def check_sign_patterns(ctx: Context) -> Check:
    pats = _patterns(ctx)
    want = cluster.expected_pattern_count(ctx.n)
    ok = len(pats) == want
    return Check("sign-patterns", ok, f"occurring sign patterns: {len(pats)} (expected {want})",
                 {} if ok else {"found": len(pats), "expected": want})


def check_signed_tropicalizations(ctx: Context) -> Check:
    cl = cluster.classify_signed(_patterns(ctx), ctx.fan, ctx.relations)
    got = cl.counts()
    want = cluster.expected_subfan_counts(ctx.n)
    fibers = sorted(set(cl.fiber_sizes()))
    matched = all(v is not None for v in cl.ordering.values())
    ok = (got["subfans"] == want["subfans"] and got["associahedral"] == want["associahedral"]
          and got["cyclohedral"] == want["cyclohedral"] and fibers == [2 ** ctx.n] and matched)
    detail = (f"signed tropicalizations: {got['subfans']} ({got['associahedral']} associahedral, "
              f"{got['cyclohedral']} cyclohedral), fiber sizes {fibers}; expected {want['subfans']} "
              f"({want['associahedral']}, {want['cyclohedral']}), fiber size {2 ** ctx.n}")
    cert = {} if ok else {"counts": got, "fiber_sizes": fibers,
                          "orderings": sorted(str(v) for v in cl.ordering.values())}
    return Check("signed-tropicalizations", ok, detail, cert)


def check_positivity(ctx: Context) -> Check:
    n = ctx.n
    lam = polygon.DihedralOrdering(n, tuple(range(0, 2 * n, 2)) + tuple(range(1, 2 * n, 2)))
    codes = cluster.SignedTropicalizer(ctx.fan, ctx.relations).subfan_codes([1] * (n * n))
    want = frozenset(fanmod.subfan_for_ordering(lam, ctx.fan).index)
    ok = codes == want
    return Check("positivity", ok, f"all-positive subfan = subfan of {lam}: {ok}",
                 {} if ok else {"cones": len(codes), "expected": len(want)})


_PATTERN_CACHE: dict[tuple[int, int], dict] = {}


def _patterns(ctx: Context) -> list[cluster.SignPattern]:
    key = (ctx.n, ctx.seed)
    if key not in _PATTERN_CACHE:
        _PATTERN_CACHE[key] = cluster.sample_sign_patterns(ctx.n, 10**6, ctx.seed, saturate=True)
    return list(_PATTERN_CACHE[key])


SUITES: dict[str, Callable[[Context], Check]] = {
    "purity": check_purity,
    "dimension": check_dimensions,
    "lineality": check_lineality,
    "facets": check_facets,
    "injectivity": check_injectivity,
    "posets": check_posets,
    "relations": check_relations,
    "prevariety": check_prevariety,
    "reverse-inclusion": check_reverse_inclusion,
    "sign-patterns": check_sign_patterns,
    "signed-tropicalizations": check_signed_tropicalizations,
    "positivity": check_positivity,
}


def run_all(n: int, seed: int, names: list[str] | None = None) -> list[Check]:
    polygon.check_n(n, 4)
    ctx = Context(n, seed)
    out = []
    for name in names or list(SUITES):
        start = time.perf_counter()
        result = SUITES[name](ctx)
        result.seconds = time.perf_counter() - start
        out.append(result)
    return out
