import pytest
from hypothesis import given, settings, strategies as st

from app.gallai_covers.config.models import StackingSequence
from app.gallai_covers.services.apollonian_service import (
    bound_report,
    build_graph,
    cover_3tree,
    face_table,
    group_partition,
    stacking_tree,
)
from app.gallai_covers.services.generator_service import gen_3tree
from app.gallai_covers.services.graph_service import verify_cover
from app.gallai_covers.services.oracle_service import min_path_cover
from app.gallai_covers.utils.helpers import ceil_half, ceil_third
from app.gallai_covers.utils.validators import InvalidFace


def endpoints(pc):
    return {p[0] for p in pc.paths} | {p[-1] for p in pc.paths}


def test_triangle_base():
    pc, stats = cover_3tree(StackingSequence())
    assert pc.paths == ((0, 1, 2), (2, 0))
    assert (stats.alpha, stats.beta, stats.gamma, stats.bound) == (0, 0, 0, 2)


def test_k4_base(k4_stacking):
    pc, stats = cover_3tree(k4_stacking)
    assert pc.size == 2 == stats.bound
    assert verify_cover(build_graph(k4_stacking), pc).valid
    assert min_path_cover(build_graph(k4_stacking)).min_size == 2


def test_reused_face_is_invalid():
    seq = StackingSequence(ops=((3, (0, 1, 2)), (4, (0, 1, 2))))
    with pytest.raises(InvalidFace):
        build_graph(seq)


def test_face_table_after_one_stack(k4_stacking):
    faces = face_table(k4_stacking)
    assert set(faces) == {(0, 1, 3), (0, 2, 3), (1, 2, 3)}
    assert set(faces.values()) == {3}


def test_stacking_tree_parents():
    seq = StackingSequence(ops=((3, (0, 1, 2)), (4, (0, 1, 3)), (5, (1, 2, 3)), (6, (0, 1, 4))))
    tree = stacking_tree(seq)
    assert tree.root == 3
    assert tree.children(3) == [4, 5]
    assert tree.parent[6] == 4
    assert tree.depth(6) == 2
    assert sorted(tree.leaves()) == [5, 6]


def test_type_one_group():
    # 3 -> 4 is a single type I group, nothing is left for the first group
    seq = StackingSequence(ops=((3, (0, 1, 2)), (4, (0, 1, 3))))
    partition = group_partition(stacking_tree(seq))
    assert [g.kind for g in partition.groups] == ["first", "I"]
    assert partition.groups[0].nodes == ()
    pc, stats = cover_3tree(seq)
    assert pc.size == 3 == stats.bound
    assert verify_cover(build_graph(seq), pc).valid


def test_type_two_group():
    seq = StackingSequence(ops=((3, (0, 1, 2)), (4, (0, 1, 3)), (5, (1, 2, 3))))
    partition = group_partition(stacking_tree(seq))
    assert [g.kind for g in partition.groups] == ["first", "II"]
    pc, stats = cover_3tree(seq, check_invariants=True)
    assert pc.size == 4 == stats.bound


def test_type_three_group():
    seq = StackingSequence(ops=((3, (0, 1, 2)), (4, (0, 1, 3)), (5, (1, 2, 3)), (6, (0, 2, 3))))
    partition = group_partition(stacking_tree(seq))
    assert [g.kind for g in partition.groups] == ["first", "III"]
    assert partition.groups[0].nodes == (3,)
    pc, stats = cover_3tree(seq, check_invariants=True)
    assert pc.size == 3 == stats.bound


def test_checkpoint_sees_every_group():
    seq = gen_3tree("random", 40, seed=3)
    seen = []

    def checkpoint(graph_i, cover_i):
        assert verify_cover(graph_i, cover_i).valid
        seen.append(cover_i.size)

    _, stats = cover_3tree(seq, checkpoint=checkpoint)
    groups = group_partition(stacking_tree(seq)).groups
    assert len(seen) == len(groups)
    assert seen[0] == 2
    assert seen[-1] == stats.bound
    assert all(later > earlier for earlier, later in zip(seen, seen[1:]))


@settings(max_examples=200, deadline=None)
@given(n=st.integers(min_value=4, max_value=300), seed=st.integers(min_value=0, max_value=10 ** 6))
def test_exact_accounting(n, seed):
    seq = gen_3tree("random", n, seed)
    partition = group_partition(stacking_tree(seq))
    assert partition.sizes_ok(n)

    pc, stats = cover_3tree(seq)
    assert pc.size == 2 + stats.alpha + 2 * stats.beta + stats.gamma
    assert verify_cover(build_graph(seq), pc).valid


@settings(max_examples=100, deadline=None)
@given(n=st.integers(min_value=4, max_value=200), seed=st.integers(min_value=0, max_value=10 ** 6))
def test_leaves_end_paths(n, seed):
    seq = gen_3tree("random", n, seed)
    pc, _ = cover_3tree(seq)
    assert set(stacking_tree(seq).leaves()) <= endpoints(pc)


@pytest.mark.parametrize("k", range(1, 31))
def test_full_trees_meet_a_third(k):
    n = 3 * k + 1
    seq = gen_3tree("full", n, seed=0)
    assert stacking_tree(seq).is_proper_ternary()
    pc, _ = cover_3tree(seq)
    assert pc.size <= ceil_third(n)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(min_value=4, max_value=300), seed=st.integers(min_value=0, max_value=10 ** 6))
def test_serpentine_trees_meet_a_half(n, seed):
    seq = gen_3tree("serpentine", n, seed)
    assert stacking_tree(seq).is_path()
    pc, _ = cover_3tree(seq)
    assert pc.size <= ceil_half(n)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(min_value=4, max_value=300), seed=st.integers(min_value=0, max_value=10 ** 6))
def test_five_eighths_regime(n, seed):
    seq = gen_3tree("random", n, seed)
    report = bound_report(seq)
    if report.regime_holds:
        pc, _ = cover_3tree(seq)
        assert pc.size <= report.five_eighths
    else:
        assert report.dk_hypothesis
        assert report.n_odd >= report.beta + 1 > n / 4
    assert report.leaf_witness


@pytest.mark.parametrize("k", [2, 3, 5, 10])
def test_all_type_two_chain(k):
    seq = gen_3tree("all_type_II", 3 * k, seed=k)
    partition = group_partition(stacking_tree(seq))
    assert (partition.alpha, partition.beta, partition.gamma) == (0, k - 1, 0)

    report = bound_report(seq)
    assert not report.regime_holds
    assert report.dk_hypothesis
    assert report.leaf_count == k


def test_triangle_report_has_no_leaf_witness():
    report = bound_report(StackingSequence())
    assert report.leaf_witness is None
    assert report.dk_hypothesis is None
    assert report.constructive_bound == 2


def test_prebuilt_graph_gives_the_same_cover():
    seq = gen_3tree("random", 60, seed=11)
    graph = build_graph(seq)
    pc, _ = cover_3tree(seq, graph=graph)
    assert pc.paths == cover_3tree(seq)[0].paths
    assert pc.host is graph
