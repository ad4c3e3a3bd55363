from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from app.gallai_covers.config.models import Graph
from app.gallai_covers.services.generator_service import gen_sp_random, random_sp_tree
from app.gallai_covers.services.spqtree_service import (
    NodeKind,
    SpqTreeBuilder,
    expand,
    is_normalized,
    normalize,
    recognize_and_build,
    to_dot,
)
from app.gallai_covers.utils.validators import GraphValidationError, MultiEdge, NotSeriesParallel


def edge_multiset(edges):
    return Counter((u, v) if u < v else (v, u) for u, v in edges)


def test_triangle_without_terminals(triangle):
    tree = recognize_and_build(triangle)
    tree.check()
    assert tree.q_count() == 3
    assert edge_multiset(tree.in_order_edges()) == edge_multiset(triangle.edges)
    assert tree.kind(tree.root) is NodeKind.P


def test_terminals_are_kept(diamond):
    tree = recognize_and_build(diamond)
    tree.check()
    assert tree.terminals == (0, 3)
    assert tree.vertex_counts()[tree.root] == 4


def test_single_edge():
    tree = recognize_and_build(Graph(n=2, edges=((0, 1),), terminals=(1, 0)))
    assert tree.kind(tree.root) is NodeKind.Q
    assert tree.terminals == (1, 0)


@pytest.mark.parametrize("graph", [
    Graph(n=4, edges=((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)), terminals=(0, 1)),
    Graph(n=4, edges=((0, 1), (0, 2), (0, 3))),
])
def test_not_series_parallel(graph):
    with pytest.raises(NotSeriesParallel):
        recognize_and_build(graph)


def test_empty_graph_is_rejected():
    with pytest.raises(GraphValidationError):
        recognize_and_build(Graph(n=2))


def test_builder_rejects_two_parallel_edges():
    builder = SpqTreeBuilder()
    with pytest.raises(MultiEdge):
        builder.parallel(builder.q(0, 1), builder.q(0, 1))


def test_builder_checks_series_composition():
    builder = SpqTreeBuilder()
    with pytest.raises(ValueError):
        builder.series(builder.q(0, 1), builder.q(2, 3))


def test_normalize_reshapes_left_nested_chains():
    builder = SpqTreeBuilder()
    inner = builder.series(builder.q(0, 1), builder.q(1, 2))
    chain = builder.series(inner, builder.q(2, 3))
    tree = builder.build(chain)
    assert not is_normalized(tree)

    fixed = normalize(tree)
    assert is_normalized(fixed)
    assert fixed.shape() == ("S", ("Q", 0, 1), ("S", ("Q", 1, 2), ("Q", 2, 3)))


def test_normalized_tree_is_returned_unchanged(diamond):
    tree = normalize(recognize_and_build(diamond))
    assert normalize(tree) is tree


@settings(max_examples=200, deadline=None)
@given(n=st.integers(min_value=2, max_value=60), seed=st.integers(min_value=0, max_value=10 ** 6))
def test_normalization_keeps_the_graph(n, seed):
    tree = random_sp_tree(n, seed)
    fixed = normalize(tree)
    fixed.check()
    assert is_normalized(fixed)
    assert fixed.terminals == tree.terminals
    assert edge_multiset(fixed.in_order_edges()) == edge_multiset(tree.in_order_edges())
    assert fixed.vertex_counts()[fixed.root] == n


@settings(max_examples=100, deadline=None)
@given(n=st.integers(min_value=2, max_value=80), seed=st.integers(min_value=0, max_value=10 ** 6))
def test_generated_graphs_are_recognised(n, seed):
    g = gen_sp_random(n, seed)
    tree = recognize_and_build(g)
    tree.check()
    assert tree.terminals == g.terminals
    assert expand(tree).edge_set == g.edge_set


def test_dot_export_labels_nodes(diamond):
    source = to_dot(normalize(recognize_and_build(diamond)), name="diamond").source
    assert source.startswith("digraph diamond")
    assert "P 0-3" in source
    assert "Q" in source


def component_operands(tree, kind):
    """Operand terminals of every maximal `kind`-component, in order"""

    def operands(x):
        node = tree.nodes[x]
        if node.kind is not kind:
            return [(node.kind.value, node.source, node.sink)]
        return operands(node.left) + operands(node.right)

    found = Counter()
    parent_kind = {tree.root: None}
    for x in tree.preorder():
        node = tree.nodes[x]
        if node.kind is NodeKind.Q:
            continue
        parent_kind[node.left] = parent_kind[node.right] = node.kind
        if node.kind is kind and parent_kind[x] is not kind:
            found[tuple(operands(x))] += 1
    return found


@settings(max_examples=200, deadline=None)
@given(n=st.integers(min_value=2, max_value=60), seed=st.integers(min_value=0, max_value=10 ** 6))
def test_normalization_keeps_series_order(n, seed):
    tree = random_sp_tree(n, seed)
    fixed = normalize(tree)
    assert component_operands(fixed, NodeKind.S) == component_operands(tree, NodeKind.S)

    def unordered(counter):
        out = Counter()
        for ops, k in counter.items():
            out[tuple(sorted(ops))] += k
        return out

    assert unordered(component_operands(fixed, NodeKind.P)) == unordered(component_operands(tree, NodeKind.P))


def test_left_nested_path_keeps_its_edge_sequence():
    builder = SpqTreeBuilder()
    chain = builder.q(0, 1)
    for v in range(1, 6):
        chain = builder.series(chain, builder.q(v, v + 1))
    tree = builder.build(chain)
    assert normalize(tree).in_order_edges() == [(v, v + 1) for v in range(6)]
