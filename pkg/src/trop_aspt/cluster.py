"""Type C cluster variety side: Delta coordinates, quadrics, initial forms, signs.

Coordinates of the ambient space are indexed by D (see :func:`fan.index_set`);
a point ``z`` of the 2 x n ambient matrix space maps to

* ``Delta[i, j]  = z[0][i] z[1][j] - z[0][j] z[1][i]``  for ``i < j``
* ``Delta[i, j~] = z[0][i] z[0][j] + z[1][i] z[1][j]``  for ``i <= j``
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from . import fan as fanmod
from . import linalg, polygon, trees
from .errors import InputError, SamplingError
from .fan import FanGraph, index_set

Monomial = tuple[int, ...]  # sorted D-indices, length <= 2
SAMPLE_RANGE = 10**4


# ------------------------------------------------------------------ ambient points


@dataclass(frozen=True)
class AmbientPoint:
    z: tuple[tuple[Fraction, ...], tuple[Fraction, ...]]

    def __post_init__(self) -> None:
        if len(self.z) != 2 or len(self.z[0]) != len(self.z[1]):
            raise InputError("an ambient point is a 2 x n matrix")
        object.__setattr__(self, "z", tuple(tuple(Fraction(x) for x in row) for row in self.z))

    @property
    def n(self) -> int:
        return len(self.z[0])

    @classmethod
    def random(cls, n: int, rng: random.Random, bound: int = SAMPLE_RANGE, integral: bool = False) -> AmbientPoint:
        def entry() -> Fraction:
            num = rng.randint(-bound, bound)
            return Fraction(num) if integral else Fraction(num, rng.randint(1, bound))

        return cls(tuple(tuple(entry() for _ in range(n)) for _ in range(2)))

    def as_json(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.z]


def delta_eval(p: AmbientPoint) -> tuple[Fraction, ...]:
    z1, z2 = p.z
    out = []
    for a, b in index_set(p.n):
        i, j = polygon.index_of(a) - 1, polygon.index_of(b) - 1
        if polygon.is_barred(b):
            out.append(z1[i] * z1[j] + z2[i] * z2[j])
        else:
            out.append(z1[i] * z2[j] - z1[j] * z2[i])
    return tuple(out)


# ------------------------------------------------------------------ polynomials in S

Poly = dict[tuple[int, ...], Fraction]


def _var(n: int, t: int, i: int) -> tuple[int, ...]:
    e = [0] * (2 * n)
    e[t * n + i] = 1
    return tuple(e)


def _mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _add(p: Poly, q: Poly, scale: Fraction = Fraction(1)) -> Poly:
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0) + scale * c
    return {e: c for e, c in out.items() if c}


@lru_cache(maxsize=None)
def delta_polys(n: int) -> tuple[Poly, ...]:
    """Each Delta coordinate as a polynomial in ``z[t][i]`` (variable ``t*n + i``)."""
    out = []
    for a, b in index_set(n):
        i, j = polygon.index_of(a) - 1, polygon.index_of(b) - 1
        if polygon.is_barred(b):
            p = _add(_mul({_var(n, 0, i): Fraction(1)}, {_var(n, 0, j): Fraction(1)}),
                     _mul({_var(n, 1, i): Fraction(1)}, {_var(n, 1, j): Fraction(1)}))
        else:
            p = _add(_mul({_var(n, 0, i): Fraction(1)}, {_var(n, 1, j): Fraction(1)}),
                     _mul({_var(n, 0, j): Fraction(1)}, {_var(n, 1, i): Fraction(1)}), Fraction(-1))
        out.append(p)
    return tuple(out)


# ------------------------------------------------------------------ relations


@dataclass(frozen=True)
class QuadraticRelation:
    """Polynomial of degree <= 2 in the variables ``x_d``, ``d`` in D."""

    n: int
    terms: tuple[tuple[Fraction, Monomial], ...]

    def __post_init__(self) -> None:
        merged: dict[Monomial, Fraction] = {}
        for c, mono in self.terms:
            mono = tuple(sorted(mono))
            if len(mono) > 2:
                raise InputError("only monomials of degree <= 2 are allowed")
            merged[mono] = merged.get(mono, Fraction(0)) + Fraction(c)
        object.__setattr__(
            self, "terms", tuple((c, m) for m, c in sorted(merged.items(), key=lambda t: (len(t[0]), t[0])) if c)
        )

    def __len__(self) -> int:
        return len(self.terms)

    def as_json(self) -> dict:
        names = fanmod.d_names(self.n)
        return {"terms": [{"c": str(c), "mono": [names[d] for d in m]} for c, m in self.terms]}

    @classmethod
    def from_json(cls, n: int, data: dict) -> QuadraticRelation:
        lookup = {tuple(v): k for k, v in enumerate(fanmod.d_names(n))}
        terms = []
        for t in data["terms"]:
            mono = tuple(lookup[tuple(pair)] for pair in t["mono"])
            terms.append((Fraction(t["c"].replace("−", "-")), mono))
        return cls(n, tuple(terms))

    def __str__(self) -> str:
        names = ["x(" + ",".join(p) + ")" for p in fanmod.d_names(self.n)]
        parts = []
        for c, m in self.terms:
            mono = "*".join(names[d] for d in m) or "1"
            parts.append(f"{c:+} {mono}" if c not in (1, -1) else f"{'+' if c > 0 else '-'} {mono}")
        return " ".join(parts)


def relation_from_pairs(n: int, terms: Iterable[tuple[int | Fraction, Sequence[tuple[str, str]]]]) -> QuadraticRelation:
    """Build a relation from label-pair names, e.g. ``(1, [("1", "2"), ("1", "2")])``."""
    pos = fanmod.d_position(n)
    out = []
    for c, mono in terms:
        out.append((Fraction(c), tuple(pos[frozenset(polygon.parse_label(x) for x in pair)] for pair in mono)))
    return QuadraticRelation(n, tuple(out))


def substitute(r: QuadraticRelation) -> Poly:
    """Expand ``r`` after ``x_d -> Delta_d``, as a polynomial in S."""
    deltas = delta_polys(r.n)
    one: Poly = {tuple([0] * (2 * r.n)): Fraction(1)}
    out: Poly = {}
    for c, mono in r.terms:
        p = one
        for d in mono:
            p = _mul(p, deltas[d])
        out = _add(out, p, c)
    return out


def verify_relation(r: QuadraticRelation) -> bool:
    return not substitute(r)


def evaluate(r: QuadraticRelation, x: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for c, mono in r.terms:
        v = c
        for d in mono:
            v *= x[d]
        total += v
    return total


def monomials(n: int) -> list[Monomial]:
    m = n * n
    return [()] + [(d,) for d in range(m)] + [(d, e) for d in range(m) for e in range(d, m)]


def _kernel(n: int, rng: random.Random, extra: int = 4) -> list[list[int]]:
    """Kernel of the evaluation matrix, one torus multidegree block at a time.

    The torus scaling the columns of ``z`` acts on Delta diagonally, so the
    vanishing ideal is multigraded and its degree <= 2 part is the direct sum
    of the kernels of the blocks.
    """
    monos = monomials(n)
    blocks: dict[tuple[int, ...], list[int]] = {}
    for k, m in enumerate(monos):
        blocks.setdefault(_multidegree(n, m), []).append(k)
    points = []
    need = max(len(cols) for cols in blocks.values()) + extra
    while len(points) < need:
        x = delta_eval(AmbientPoint.random(n, rng, integral=True))
        if all(v != 0 for v in x):
            points.append(x)
    basis = []
    for cols in blocks.values():
        rows = [[_mono_value(monos[c], x) for c in cols] for x in points[: len(cols) + extra]]
        for vec in linalg.nullspace(rows, len(cols)):
            full = [0] * len(monos)
            for c, v in zip(cols, vec):
                full[c] = v
            basis.append(full)
    return basis


def _mono_value(mono: Monomial, x: Sequence[Fraction]) -> Fraction:
    v = Fraction(1)
    for d in mono:
        v *= x[d]
    return v


@lru_cache(maxsize=None)
def discover_relations(n: int, seed: int = 0) -> tuple[QuadraticRelation, ...]:
    """Basis of the degree <= 2 polynomials vanishing on the variety.

    Kernel of the evaluation matrix at random points, computed twice from
    independent seeds; the reduced basis must agree, and every element is
    re-verified symbolically.
    """
    polygon.check_n(n, 4)
    monos = monomials(n)
    rng = random.Random(seed)
    first = _kernel(n, rng)
    second = _kernel(n, random.Random(rng.getrandbits(64)))
    if _canonical_basis(first) != _canonical_basis(second):
        raise SamplingError(f"kernel unstable under resampling: dims {len(first)} vs {len(second)}")
    basis = _canonical_basis(first)
    rels = tuple(
        QuadraticRelation(n, tuple((Fraction(c), monos[k]) for k, c in enumerate(vec) if c)) for vec in basis
    )
    for r in rels:
        if not verify_relation(r):
            raise SamplingError(f"sampled kernel element does not vanish identically: {r}")
    return rels


def _canonical_basis(vectors: list[list[int]]) -> list[tuple[int, ...]]:
    """Reduced echelon basis of the span; unique for a given subspace."""
    red, _ = linalg.echelon(vectors) if vectors else ([], [])
    return [tuple(r) for r in red]


def in_relation_span(r: QuadraticRelation, rels: Sequence[QuadraticRelation]) -> bool:
    monos = monomials(r.n)
    pos = {m: k for k, m in enumerate(monos)}

    def vec(q: QuadraticRelation) -> list[Fraction]:
        v = [Fraction(0)] * len(monos)
        for c, m in q.terms:
            v[pos[m]] = c
        return v

    return linalg.in_span([vec(q) for q in rels], vec(r))


def brahmagupta_relation(n: int = 3) -> QuadraticRelation:
    """``x(1,2)^2 + x(1,2~)^2 - x(1,1~) x(2,2~)``."""
    return relation_from_pairs(n, [(1, [("1", "2"), ("1", "2")]), (1, [("1", "2~"), ("1", "2~")]),
                                   (-1, [("1", "1~"), ("2", "2~")])])


def relation_circuits(rels: Sequence[QuadraticRelation]) -> tuple[QuadraticRelation, ...]:
    """Elements of minimal support in the span of ``rels``.

    Every element of the span is a sum of circuits conformal to it; the
    circuit set is a basis-independent generating set for certificates.
    """
    if not rels:
        return ()
    n = rels[0].n
    monos = sorted({m for r in rels for c, m in r.terms}, key=lambda m: (len(m), m))
    pos = {m: k for k, m in enumerate(monos)}
    vecs = []
    for r in rels:
        v = [Fraction(0)] * len(monos)
        for c, m in r.terms:
            v[pos[m]] = c
        vecs.append(v)
    # the span splits into blocks of monomials sharing a torus multidegree
    blocks: dict[tuple[int, ...], list[int]] = {}
    for k, m in enumerate(monos):
        blocks.setdefault(_multidegree(n, m), []).append(k)
    out = set()
    for cols in blocks.values():
        sub = [[v[c] for c in cols] for v in vecs]
        basis, _ = linalg.echelon(sub)
        r = len(basis)
        if r == 0:
            continue
        # circuits: span vectors vanishing on r-1 chosen coordinates with 1-dim solution set
        for zeros in itertools.combinations(range(len(cols)), r - 1):
            cons = [[b[z] for b in basis] for z in zeros]
            null = linalg.nullspace(cons, r) if cons else [[1 if i == j else 0 for i in range(r)] for j in range(r)]
            if len(null) != 1:
                continue
            coef = null[0]
            vec = [sum(c * b[i] for c, b in zip(coef, basis)) for i in range(len(cols))]
            vec = linalg.integral_row(vec)
            first = next(x for x in vec if x)
            if first < 0:
                vec = [-x for x in vec]
            out.add(tuple((cols[i], x) for i, x in enumerate(vec) if x))
    circuits = []
    for sup in sorted(out):
        circuits.append(QuadraticRelation(n, tuple((Fraction(x), monos[c]) for c, x in sup)))
    return tuple(circuits)


def _multidegree(n: int, mono: Monomial) -> tuple[int, ...]:
    deg = [0] * n
    D = index_set(n)
    for d in mono:
        for a in D[d]:
            deg[polygon.index_of(a) - 1] += 1
    return tuple(deg)


# ------------------------------------------------------------------ initial forms


def w_degree(mono: Monomial, w: Sequence[Fraction | int]) -> Fraction:
    return sum((Fraction(w[d]) for d in mono), Fraction(0))


def init_form(r: QuadraticRelation, w: Sequence[Fraction | int]) -> QuadraticRelation:
    """Terms of maximal ``w``-degree."""
    if not r.terms:
        raise InputError("initial form of the zero polynomial")
    degs = [w_degree(m, w) for c, m in r.terms]
    top = max(degs)
    return QuadraticRelation(r.n, tuple(t for t, d in zip(r.terms, degs) if d == top))


def max_twice(r: QuadraticRelation, w: Sequence[Fraction | int]) -> bool:
    return len(init_form(r, w)) >= 2


def prevariety_check(w: Sequence[Fraction | int], relations: Sequence[QuadraticRelation]) -> bool:
    return all(max_twice(r, w) for r in relations)


# ------------------------------------------------------------------ sign patterns


@dataclass(frozen=True)
class SignPattern:
    """Vector in ``{+1, -1}^D``; ``witness`` is a real point of the variety with these signs."""

    signs: tuple[int, ...]
    witness: tuple[Fraction, ...] | None = field(default=None, compare=False, hash=False)
    source: tuple[AmbientPoint, int] | None = field(default=None, compare=False, hash=False)

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)

    @classmethod
    def parse(cls, text: str) -> SignPattern:
        text = text.replace("\u2212", "-")
        if set(text) - {"+", "-"}:
            raise InputError(f"sign pattern must use + and -, got {text!r}")
        return cls(tuple(1 if ch == "+" else -1 for ch in text))

    def flip(self, other: Sequence[int]) -> SignPattern:
        return SignPattern(tuple(a * b for a, b in zip(self.signs, other)))

    def as_json(self) -> dict:
        out: dict = {"pattern": str(self)}
        if self.witness is not None:
            out["witness"] = [str(x) for x in self.witness]
        if self.source is not None:
            point, scale = self.source
            out["z"] = point.as_json()
            out["scale"] = scale
        return out


def sign_pattern_of(p: AmbientPoint, scale: int = 1) -> SignPattern | None:
    """Signs of ``scale * Delta(p)``; ``None`` if some coordinate vanishes.

    The variety is a cone (its ideal is homogeneous), so ``scale = -1`` gives
    another real point of it.
    """
    x = tuple(scale * v for v in delta_eval(p))
    if any(v == 0 for v in x):
        return None
    return SignPattern(tuple(1 if v > 0 else -1 for v in x), x, (p, scale))


def sample_sign_patterns(
    n: int,
    trials: int,
    seed: int = 0,
    saturate: bool = False,
    include_negatives: bool = True,
    bound: int = SAMPLE_RANGE,
) -> dict[SignPattern, SignPattern]:
    """Occurring sign patterns found by sampling real points, each with a witness.

    With ``saturate`` sampling stops once no new pattern has appeared for ten
    times the current number of trials (``trials`` then caps the total).
    """
    rng = random.Random(seed)
    found: dict[SignPattern, SignPattern] = {}
    last_new = 0
    for t in range(1, trials + 1):
        p = AmbientPoint.random(n, rng, bound)
        for scale in ((1, -1) if include_negatives else (1,)):
            sp = sign_pattern_of(p, scale)
            if sp is not None and sp not in found:
                found[sp] = sp
                last_new = t
        if saturate and t - last_new > 10 * max(last_new, 1) and t >= 1000:
            break
    return dict(sorted(found.items(), key=lambda kv: str(kv[0])))


def apply_signs(r: QuadraticRelation, nu: Sequence[int]) -> QuadraticRelation:
    """``alpha_nu``: substitute ``x_d -> nu_d x_d``."""
    terms = []
    for c, mono in r.terms:
        s = 1
        for d in mono:
            s *= nu[d]
        terms.append((c * s, mono))
    return QuadraticRelation(r.n, tuple(terms))


def signed_compatible(nu: SignPattern | Sequence[int], w: Sequence[Fraction | int],
                      relations: Sequence[QuadraticRelation]) -> bool:
    """Every initial form of ``alpha_nu(r)`` has coefficients of both signs."""
    signs = nu.signs if isinstance(nu, SignPattern) else tuple(nu)
    for r in relations:
        init = init_form(apply_signs(r, signs), w)
        if not (any(c > 0 for c, _ in init.terms) and any(c < 0 for c, _ in init.terms)):
            return False
    return True


def signed_trop_subfan(nu: SignPattern | Sequence[int], fan: FanGraph,
                       relations: Sequence[QuadraticRelation]) -> FanGraph:
    """Cones of the fan whose interior point passes :func:`signed_compatible`."""
    keep = [c.code for c in fan.cones if signed_compatible(nu, c.interior_point, relations)]
    return fan.restrict(keep)


class SignedTropicalizer:
    """Signed subfans for many patterns against one fan and relation set.

    The initial-form supports at each cone's interior point do not depend on
    the pattern, so they are computed once; each pattern then only flips
    coefficient signs.
    """

    def __init__(self, fan: FanGraph, relations: Sequence[QuadraticRelation]):
        self.fan = fan
        self.relations = tuple(relations)
        self._supports = [
            [init_form(r, c.interior_point).terms for r in self.relations] for c in fan.cones
        ]

    def _passes(self, k: int, signs: Sequence[int]) -> bool:
        for terms in self._supports[k]:
            pos = neg = False
            for c, mono in terms:
                s = c
                for d in mono:
                    s *= signs[d]
                if s > 0:
                    pos = True
                else:
                    neg = True
            if not (pos and neg):
                return False
        return True

    def subfan_codes(self, nu: SignPattern | Sequence[int]) -> frozenset[bytes]:
        signs = nu.signs if isinstance(nu, SignPattern) else tuple(nu)
        return frozenset(c.code for k, c in enumerate(self.fan.cones) if self._passes(k, signs))

    def subfan(self, nu: SignPattern | Sequence[int]) -> FanGraph:
        return self.fan.restrict(self.subfan_codes(nu))


@dataclass
class SignedClassification:
    """Distinct signed subfans of a pattern set, each matched to an ordering if possible."""

    n: int
    fibers: dict[frozenset[bytes], list[SignPattern]]
    ordering: dict[frozenset[bytes], polygon.DihedralOrdering | None]
    shape: dict[frozenset[bytes], str]

    def counts(self) -> dict[str, int]:
        out = {"subfans": len(self.fibers), "associahedral": 0, "cyclohedral": 0, "other": 0}
        for s in self.shape.values():
            out[s] += 1
        return out

    def fiber_sizes(self) -> list[int]:
        return sorted(len(v) for v in self.fibers.values())

    def as_json(self) -> dict:
        items = []
        for codes, pats in sorted(self.fibers.items(), key=lambda kv: str(kv[1][0])):
            lam = self.ordering[codes]
            items.append({
                "ordering": str(lam) if lam is not None else None,
                "shape": self.shape[codes],
                "cones": len(codes),
                "patterns": [str(p) for p in pats],
            })
        return {"n": self.n, "counts": self.counts(), "subfans": items}


def classify_signed(
    patterns: Iterable[SignPattern], fan: FanGraph, relations: Sequence[QuadraticRelation]
) -> SignedClassification:
    """Group patterns by signed subfan; match subfans to ASDO/CSDO subfans and reference lattices."""
    n = fan.n
    tropic = SignedTropicalizer(fan, relations)
    fibers: dict[frozenset[bytes], list[SignPattern]] = {}
    for p in patterns:
        fibers.setdefault(tropic.subfan_codes(p), []).append(p)
    known: dict[frozenset[bytes], polygon.DihedralOrdering] = {}
    for cls in ("ASDO", "CSDO"):
        for lam in polygon.enumerate_orderings(n, cls):
            known.setdefault(frozenset(fan.restrict(trees.trees_compatible_with(lam)).index), lam)
    ordering = {codes: known.get(codes) for codes in fibers}
    shape = {}
    for codes in fibers:
        sub = fan.restrict(codes)
        if sub.cones and fanmod.face_poset_isomorphic(sub, fanmod.associahedron_poset(n)):
            shape[codes] = "associahedral"
        elif sub.cones and fanmod.face_poset_isomorphic(sub, fanmod.cyclohedron_poset(n)):
            shape[codes] = "cyclohedral"
        else:
            shape[codes] = "other"
    return SignedClassification(n, fibers, ordering, shape)


def expected_pattern_count(n: int) -> int:
    return 2 ** (2 * n - 2) * (n + 1) * math.factorial(n - 1)


def expected_subfan_counts(n: int) -> dict[str, int]:
    return {
        "subfans": 2 ** (n - 2) * (n + 1) * math.factorial(n - 1),
        "associahedral": 2 ** (n - 2) * math.factorial(n),
        "cyclohedral": 2 ** (n - 2) * math.factorial(n - 1),
    }
