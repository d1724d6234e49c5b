from __future__ import annotations

import itertools
import random
from collections import Counter

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from trop_aspt import polygon as P
from trop_aspt import trees as T
from trop_aspt.errors import ContractError, InputError


def _labeling(labels: str) -> P.Labeling:
    """Labeling from the labels read on sides 0, 1, ..., 2n-1."""
    return P.Labeling.from_word([P.parse_label(x) for x in labels.split(",")])


# Three labeled subdivisions of the octagon (axis through vertices 0 and 4).
FAN = (P.Subdivision.of_2n_gon(4, [(0, 2), (0, 4), (0, 6)]), _labeling("2,4~,1,3~,3,1~,4,2~"))
TRIANGLE = (P.Subdivision.of_2n_gon(4, [(0, 3), (0, 5), (3, 5)]), _labeling("1,3~,2,4,4~,2~,3,1~"))
ZIGZAG = (P.Subdivision.of_2n_gon(4, [(1, 5), (1, 7), (3, 5)]), _labeling("4,1,3~,2,4~,1~,3,2~"))


def _swap_unbarred(phi: P.Labeling, i: int, j: int) -> P.Labeling:
    a, b = P.label(i), P.label(j)
    sides = list(phi.sides)
    sides[a], sides[b] = sides[b], sides[a]
    return P.Labeling(phi.n, tuple(sides))


def _tree(n: int, groups: list[list[str]], links: list[tuple[int, int]]) -> T.PhyloTree:
    """Tree with internal vertices 0..len(groups)-1 carrying the listed leaves."""
    edges = list(links)
    leaves = [0] * (2 * n)
    nxt = len(groups)
    for v, group in enumerate(groups):
        for name in group:
            leaves[P.parse_label(name)] = nxt
            edges.append((v, nxt))
            nxt += 1
    return T.PhyloTree.from_edges(n, edges, leaves)


def _star(n: int) -> T.PhyloTree:
    return _tree(n, [[P.label_str(a) for a in range(2 * n)]], [])


# ---------------------------------------------------------------- dual trees


def test_fan_triangulation_dual_tree_is_expected_caterpillar():
    expected = _tree(4, [["2", "4~"], ["1", "3~"], ["3", "1~"], ["4", "2~"]], [(0, 1), (1, 2), (2, 3)])
    assert T.dual_tree(*FAN) == expected


def test_triangle_subdivision_dual_tree():
    expected = _tree(4, [[], ["1", "3~", "2"], ["4", "4~"], ["2~", "3", "1~"]], [(0, 1), (0, 2), (0, 3)])
    assert T.dual_tree(*TRIANGLE) == expected


def test_first_and_third_examples_give_same_tree():
    assert T.dual_tree(*FAN).canonical_code == T.dual_tree(*ZIGZAG).canonical_code
    assert T.dual_tree(*FAN).canonical_code != T.dual_tree(*TRIANGLE).canonical_code


def test_example_symmetries():
    assert FAN[0].axially_symmetric and FAN[1].axially_symmetric
    assert TRIANGLE[0].axially_symmetric and TRIANGLE[1].axially_symmetric
    assert not ZIGZAG[0].axially_symmetric and not ZIGZAG[1].axially_symmetric
    assert ZIGZAG[0].centrally_symmetric and ZIGZAG[1].centrally_symmetric


@pytest.mark.parametrize("example", [FAN, TRIANGLE, ZIGZAG])
def test_examples_are_aspts_and_break_when_1_and_4_swap(example):
    theta, phi = example
    assert T.find_symmetry(T.dual_tree(theta, phi)) is not None
    assert T.is_aspt(T.dual_tree(theta, phi))
    broken = T.dual_tree(theta, _swap_unbarred(phi, 1, 4))
    assert T.find_symmetry(broken) is None
    assert not T.is_aspt(broken)


def test_cspt_examples():
    assert T.is_cspt(T.dual_tree(*ZIGZAG))
    assert T.is_cspt(T.dual_tree(*FAN))
    assert not T.is_cspt(T.dual_tree(*TRIANGLE))


def test_empty_subdivision_gives_star():
    for n in (3, 4):
        for phi in P.labelings(n, "axially_symmetric")[:5]:
            tree = T.dual_tree(P.Subdivision.of_2n_gon(n), phi)
            assert tree == _star(n)
            assert tree.n_vertices == 2 * n + 1


def test_dual_tree_rejects_mismatched_polygons():
    with pytest.raises(InputError):
        T.dual_tree(P.Subdivision.of_2n_gon(3), P.standard_labeling(4))


def _rotate(theta: P.Subdivision, phi: P.Labeling, r: int, reflect: bool):
    m = theta.n_vertices

    def v(x):
        return ((-x if reflect else x) + r) % m

    def s(x):
        return ((-x - 1 if reflect else x) + r) % m

    diags = [P.make_diagonal(v(a), v(b), m) for a, b in theta.diagonals]
    return P.Subdivision(m, tuple(diags)), P.Labeling(phi.n, tuple(s(x) for x in phi.sides))


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 4), st.data())
def test_dual_tree_invariant_under_joint_dihedral_motion(n, data):
    theta = data.draw(st.sampled_from(P.subdivisions(n)))
    perm = data.draw(st.permutations(list(range(2 * n))))
    phi = P.Labeling(n, tuple(perm))
    r = data.draw(st.integers(0, 2 * n - 1))
    reflect = data.draw(st.booleans())
    assert T.dual_tree(theta, phi) == T.dual_tree(*_rotate(theta, phi, r, reflect))


# ---------------------------------------------------------------- canonical codes


def _relabel_internal(tree: T.PhyloTree, rng: random.Random) -> T.PhyloTree:
    perm = list(range(tree.n_vertices))
    rng.shuffle(perm)
    edges = [(perm[u], perm[v]) for u, v in tree.edges]
    rng.shuffle(edges)
    return T.PhyloTree.from_edges(tree.n, edges, [perm[x] for x in tree.leaves])


@given(st.integers(0, 10**6))
def test_canonical_code_ignores_vertex_ids(seed):
    rng = random.Random(seed)
    tree = rng.choice(T.enumerate_aspts(3)).tree
    assert _relabel_internal(tree, rng).canonical_code == tree.canonical_code


def test_canonical_code_agrees_with_split_sets_n3():
    # labeled trees are isomorphic exactly when their split systems agree
    code_of_splits: dict[frozenset, bytes] = {}
    for theta in P.subdivisions(3):
        for perm in itertools.permutations(range(6)):
            tree = T.dual_tree(theta, P.Labeling(3, perm))
            assert code_of_splits.setdefault(tree.splits, tree.canonical_code) == tree.canonical_code
    assert len(set(code_of_splits.values())) == len(code_of_splits)


def test_tree_json_roundtrip_and_format():
    tree = T.dual_tree(*FAN)
    data = tree.as_json()
    assert data["n"] == 4
    assert set(data["leaves"]) == {"1", "1~", "2", "2~", "3", "3~", "4", "4~"}
    assert T.PhyloTree.from_json(data) == tree
    assert tree.canonical_code.hex() == tree.canonical_code.hex().lower()


@pytest.mark.parametrize("n", [3, 4])
def test_from_splits_roundtrip(n):
    for a in T.enumerate_aspts(n):
        assert T.PhyloTree.from_splits(n, a.tree.internal_splits) == a.tree


def test_from_splits_rejects_incompatible():
    # {1,2} and {2,3} overlap without nesting
    one, two, three = (P.label(i) for i in (1, 2, 3))
    with pytest.raises(InputError):
        T.PhyloTree.from_splits(3, [(1 << one) | (1 << two), (1 << two) | (1 << three)])


def test_phylo_tree_validation():
    with pytest.raises(InputError):
        T.PhyloTree.from_edges(3, [(0, 1), (1, 2)], [2, 0, 0, 0, 0, 0])
    with pytest.raises(InputError):  # degree-2 vertex
        _tree(3, [["1", "1~", "2"], [], ["2~", "3", "3~"]], [(0, 1), (1, 2)])


# ---------------------------------------------------------------- symmetry


def _brute_symmetries(tree: T.PhyloTree) -> list[tuple[int, ...]]:
    """All graph automorphisms swapping a and a~, by trying every internal permutation."""
    leaf_set = set(tree.leaves)
    internal = [v for v in range(tree.n_vertices) if v not in leaf_set]
    edges = {frozenset(e) for e in tree.edges}
    out = []
    for perm in itertools.permutations(internal):
        vmap = [0] * tree.n_vertices
        for a in range(2 * tree.n):
            vmap[tree.leaves[a]] = tree.leaves[a ^ 1]
        for u, w in zip(internal, perm):
            vmap[u] = w
        if {frozenset((vmap[u], vmap[w])) for u, w in map(tuple, edges)} == edges:
            out.append(tuple(vmap))
    return out


def test_symmetry_exists_and_is_unique_n3():
    for a in T.enumerate_aspts(3):
        brute = _brute_symmetries(a.tree)
        assert brute == [a.symmetry.vertex_map]


def test_star_symmetry_fixes_centre():
    aspt = T.make_aspt(_star(3))
    centre = next(v for v in range(aspt.tree.n_vertices) if len(aspt.tree.adjacency[v]) > 1)
    assert aspt.symmetry.vertex_map[centre] == centre


@pytest.mark.slow
def test_symmetry_unique_n4():
    for a in T.enumerate_aspts(4)[::7]:
        assert _brute_symmetries(a.tree) == [a.symmetry.vertex_map]


# ---------------------------------------------------------------- enumeration


def test_aspt_counts_n3():
    assert Counter(a.k for a in T.enumerate_aspts(3)) == {3: 1, 4: 13, 5: 21}


def test_aspt_counts_n4():
    assert Counter(a.k for a in T.enumerate_aspts(4)) == {4: 1, 5: 43, 6: 210, 7: 228}


@pytest.mark.parametrize("n", [3, 4])
def test_orbit_structure(n):
    for a in T.enumerate_aspts(n):
        assert len(a.orbits.leaf_orbit_ids) == n
        assert a.k == len(a.orbits.orbits)
        assert all(len(o) in (1, 2) for o in a.orbits.orbits)
        assert sum(len(o) for o in a.orbits.orbits) == a.tree.n_vertices - 1
        for o in a.orbits.orbits:
            for s in o:
                assert T.bar_split(s, n) in o


def _pairing_graph(tree: T.PhyloTree) -> nx.Graph:
    """Unlabeled tree with a marked edge joining each leaf pair a, a~."""
    g = nx.Graph()
    g.add_edges_from(tree.edges, kind="tree")
    for i in range(tree.n):
        g.add_edge(tree.leaves[2 * i], tree.leaves[2 * i + 1], kind="pair")
    return g


def test_seven_shapes_n3():
    aspts = T.enumerate_aspts(3)
    assert len({T.shape_code(a.tree) for a in aspts}) == 7
    # oracle: isomorphism classes of the tree plus leaf pairing
    reps: list[nx.Graph] = []
    match = lambda x, y: x["kind"] == y["kind"]  # noqa: E731
    for a in aspts:
        g = _pairing_graph(a.tree)
        if not any(nx.is_isomorphic(g, h, edge_match=match) for h in reps):
            reps.append(g)
    assert len(reps) == 7


def test_cspts_are_strict_subset_of_aspts():
    for n in (3, 4):
        aspts = {a.code for a in T.enumerate_aspts(n)}
        assert T.cspt_codes(n) < aspts
    assert len(T.cspt_codes(3)) == 23


def test_is_aspt_needs_realization():
    rng = random.Random(3)
    perm = list(range(6))
    hits = 0
    for _ in range(40):
        rng.shuffle(perm)
        tree = T.dual_tree(P.triangulations(3)[rng.randrange(14)], P.Labeling(3, tuple(perm)))
        assert T.is_aspt(tree) == (T.find_symmetry(tree) is not None)
        hits += T.is_aspt(tree)
    assert 0 < hits < 40


# ---------------------------------------------------------------- contraction


def test_contract_single_internal_orbit_gives_star():
    for a in T.enumerate_aspts(3):
        if a.k == 4:
            assert T.contract_orbit(a, 3).tree == _star(3)


@pytest.mark.parametrize("n", [3, 4])
def test_contracting_everything_gives_star(n):
    for a in T.enumerate_aspts(n):
        while a.k > n:
            a = T.contract_orbit(a, a.k - 1)
        assert a.tree == _star(n)


@pytest.mark.parametrize("n", [3, 4])
def test_contraction_lowers_k_and_covers_non_maximal(n):
    reached = set()
    for a in T.enumerate_aspts(n):
        for o in a.orbits.internal_orbit_ids:
            b = T.contract_orbit(a, o)
            assert b.k == a.k - 1
            reached.add(b.code)
    non_maximal = {a.code for a in T.enumerate_aspts(n) if a.k < 2 * n - 1}
    assert reached == non_maximal


def test_contract_leaf_orbit_rejected():
    a = T.enumerate_aspts(3)[-1]
    with pytest.raises(ContractError):
        T.contract_orbit(a, 0)
    with pytest.raises(ContractError):
        T.contract_orbit(a, 99)


def test_caterpillar_contraction_merges_ends_into_hub():
    tree = _tree(3, [["1~", "2"], ["3", "3~"], ["2~", "1"]], [(0, 1), (1, 2)])
    a = T.make_aspt(tree)
    assert a.k == 4
    assert T.contract_orbit(a, 3).tree == _star(3)


# ---------------------------------------------------------------- compatibility


def test_star_compatible_with_every_ordering():
    assert len(T.compatible_orderings(_star(3))) == 60


def test_maximal_compatibility_double_counting_n3():
    maximal = [a for a in T.enumerate_aspts(3) if a.k == 5]
    counts = [len(T.compatible_orderings(a.tree, "ASDO")) for a in maximal]
    assert sum(counts) == 12 * 5
    shapes = Counter(T.shape_code(a.tree) for a in maximal)
    big = [a for a in maximal if shapes[T.shape_code(a.tree)] == 12]
    assert len(big) == 12
    assert all(len(T.compatible_orderings(a.tree, "ASDO")) == 2 for a in big)
    csdo = [len(T.compatible_orderings(a.tree, "CSDO")) for a in maximal]
    assert sum(csdo) == 4 * 6


@pytest.mark.parametrize("n", [3, pytest.param(4, marks=pytest.mark.slow)])
def test_compatibility_matches_symmetric_realization(n):
    aspts = {a.code for a in T.enumerate_aspts(n)}
    for cls in ("ASDO", "CSDO"):
        for lam in P.enumerate_orderings(n, cls):
            assert T.trees_compatible_with(lam) & aspts == T.symmetric_trees_for(lam)


def test_weighting_validation():
    a = next(x for x in T.enumerate_aspts(3) if x.k == 5)
    T.Weighting((1, -2, 0, 1, 1)).validate(a.orbits)
    with pytest.raises(InputError):
        T.Weighting((1, 2, 3)).validate(a.orbits)
    with pytest.raises(InputError):
        T.Weighting((1, 2, 3, 1, 0)).validate(a.orbits)
