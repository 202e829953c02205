from itertools import combinations_with_replacement

import pytest

from combinatorics import ArcMultiset, Arc, find_conflicts, parse_multiset
from decomposition import resolve_conflict_pair, restrict_arc
from sweeps import all_arcs
from conflict_poset import admits_shrinking_injection, comparable, down_set, one_step_descents
from errors import GuardExceededError, SearchBoundExceeded


def test_left_conflict_without_inner_nodes():
    steps = one_step_descents(parse_multiset("1-1-2,1-1-3", 2), (1, 2, 3))
    assert [step.rule for step in steps] == ["PL"]
    assert steps[0].child.to_text() == "1-1-3"


def test_left_conflict_with_inner_node():
    steps = one_step_descents(parse_multiset("1-1-3,1-1-4", 2), (1, 2, 3, 4))
    assert sorted(step.child.to_text() for step in steps) == ["1-1-4", "1-1-4,2-1-3"]


def test_node_conflict_deletes_or_shrinks():
    multiset = ArcMultiset([Arc(1, 3, 1)], 2, (1, 2, 3))
    steps = one_step_descents(multiset, (1, 2))
    assert [step.rule for step in steps] == ["PN", "PN"]
    assert sorted(step.child.to_text() for step in steps) == ["", "1-1-2"]
    shrunk = next(step for step in steps if step.child.arcs)
    assert shrunk.injection == ((Arc(1, 2, 1), 0),)


def test_step_text():
    step = one_step_descents(parse_multiset("1-1-2,1-1-3", 2), (1, 2, 3))[0]
    assert step.to_text() == "{1-1-2,1-1-3} => {1-1-3} [PL, CL@1[1-1-3@1,1-1-2@0]]"


def test_conflict_free_has_no_descents():
    assert one_step_descents(parse_multiset("1-1-3,2-1-4", 2), (1, 2, 3, 4)) == []


def test_descent_guard():
    with pytest.raises(GuardExceededError):
        one_step_descents(parse_multiset("1-1-5,1-1-5", 3), range(1, 6), guard=3)


def test_shrinking_injection():
    upper = parse_multiset("1-1-5,2-1-4", 2)
    assert admits_shrinking_injection(parse_multiset("2-1-3", 2), upper)
    assert admits_shrinking_injection(parse_multiset("1-1-4,2-1-3", 2), upper)
    assert not admits_shrinking_injection(parse_multiset("1-1-6", 2), upper)
    assert not admits_shrinking_injection(parse_multiset("2-1-3,2-1-3,2-1-3", 2), upper)


def test_comparable_one_step_below():
    upper = parse_multiset("1-1-3,1-1-4", 2)
    lower = parse_multiset("1-1-4,2-1-3", 2)
    assert comparable(lower, upper, (1, 2, 3, 4), 1)
    assert comparable(upper, upper, (1, 2, 3, 4), 0)


def test_incomparable_by_shrinking():
    assert not comparable(parse_multiset("1-1-5", 2), parse_multiset("1-1-3,1-1-4", 2), range(1, 6), 3)


def test_comparable_exhausts_search():
    upper = parse_multiset("1-1-3,1-1-4", 2)
    assert not comparable(parse_multiset("1-1-3", 2), upper, (1, 2, 3, 4), 3)


def test_comparable_depth_too_small():
    upper = parse_multiset("1-1-4,1-1-4,1-1-4", 2)
    lower = parse_multiset("1-1-2", 2)
    with pytest.raises(SearchBoundExceeded):
        comparable(lower, upper, (1, 2, 3, 4), 1)


def test_down_set_levels():
    found = down_set(parse_multiset("1-1-2,1-1-3", 2), (1, 2, 3), 3)
    assert found.levels == (1, 1)
    assert found.complete
    assert found.to_dict()["members"] == ["1-1-2,1-1-3", "1-1-3"]


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_pair_descents_match_pair_rule(n, q):
    K = range(1, n + 1)
    checked = 0
    for first, second in combinations_with_replacement(all_arcs(n, q), 2):
        multiset = ArcMultiset([first, second], q, K)
        if len(find_conflicts(multiset, K)) != 1:
            continue
        children = {step.child.arcs for step in one_step_descents(multiset, K)}
        assert children == set(resolve_conflict_pair(first, second, K, q).terms)
        checked += 1
    assert checked > 0


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_node_descents_match_arc_restriction(n, q):
    L = range(1, n + 1)
    for arc in all_arcs(n, q):
        for outside in (arc.left, arc.right):
            K = [node for node in L if node != outside]
            children = {step.child.arcs for step in one_step_descents(ArcMultiset([arc], q, L), K)}
            assert children == set(restrict_arc(arc, K, L, q).terms)
