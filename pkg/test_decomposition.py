import json

import pytest
from hypothesis import HealthCheck, assume, given, settings

import decomposition
from combinatorics import (
    Arc,
    ArcMultiset,
    ALTERNATE_PRIORITY,
    QSetPartition,
    conjugate,
    crossings,
    degree,
    enumerate_set_partitions,
    parse_multiset,
)
from decomposition import (
    CharacterCombination,
    cache_info,
    coefficient,
    expand,
    resolve_conflict_pair,
    restrict,
    restrict_arc,
    tensor,
    transport,
)
from errors import GuardExceededError, ParseError, PreconditionError, VerificationError
import strategies


def test_restrict_arc_both_endpoints_in_k():
    comb = restrict_arc(Arc(1, 3, 1), (1, 3), (1, 2, 3), 2)
    assert comb.to_dict() == {"1-1-3": 2}


def test_restrict_arc_right_endpoint_in_k():
    comb = restrict_arc(Arc(1, 3, 1), (2, 3), (1, 2, 3), 3)
    assert comb.to_dict() == {"": 1, "2-1-3": 1, "2-2-3": 1}


def test_restrict_arc_both_endpoints_outside():
    comb = restrict_arc(Arc(1, 4, 1), (2, 3), (1, 2, 3, 4), 2)
    # trivial coefficient m(q-1)+1 with m = 2 nodes of K under the arc
    assert comb.to_dict() == {"": 3, "2-1-3": 1}


def test_restrict_arc_needs_k_inside_l():
    with pytest.raises(PreconditionError):
        restrict_arc(Arc(1, 3, 1), (1, 5), (1, 2, 3), 2)


def test_resolve_left_conflict():
    comb = resolve_conflict_pair(Arc(1, 3, 1), Arc(1, 4, 1), (1, 2, 3, 4), 2)
    assert comb.to_dict() == {"1-1-4": 1, "1-1-4,2-1-3": 1}


def test_resolve_right_conflict():
    comb = resolve_conflict_pair(Arc(1, 4, 1), Arc(2, 4, 1), (1, 2, 3, 4), 2)
    assert comb.to_dict() == {"1-1-4": 1, "1-1-4,2-1-3": 1}


def test_resolve_parallel_nonzero_sum():
    comb = resolve_conflict_pair(Arc(1, 3, 1), Arc(1, 3, 1), (1, 2, 3), 3)
    assert comb.to_dict() == {"1-2-3": 3}


def test_resolve_parallel_zero_sum():
    comb = resolve_conflict_pair(Arc(1, 3, 1), Arc(1, 3, 1), (1, 2, 3), 2)
    assert comb.to_dict() == {"": 1, "1-1-2": 1, "2-1-3": 1, "1-1-2,2-1-3": 1}


def test_trivial_tensor_trivial():
    empty = ArcMultiset((), 2, (1,))
    assert tensor(empty, empty, (1,)).to_dict() == {"": 1}


@pytest.mark.parametrize("q,labels,expected", [(3, "1,1,1", 7), (5, "1,1,3", 13)])
def test_three_parallel_arcs_summing_to_zero(q, labels, expected):
    text = ",".join(f"1-{a}-5" for a in labels.split(","))
    comb = expand(parse_multiset(text, q), range(1, 6))
    assert comb.coefficient(()) == expected == 3 * q - 2


@pytest.mark.parametrize("q", [2, 3])
def test_restriction_without_trivial_constituent(q):
    partition = parse_multiset("1-1-3,2-1-10,4-1-7,7-1-9,3-1-8,5-1-6", q, partition=True)
    comb = restrict(partition, (1, 4, 5, 6, 7, 9), range(1, 11))
    assert comb.coefficient(()) == 0


@pytest.mark.slow
def test_restriction_with_significant_crossings():
    partition = parse_multiset("1-1-5,2-1-7,3-1-9,4-1-12,6-1-10,8-1-11", 2, partition=True)
    comb = restrict(partition, (4, 5, 7, 8, 9, 10), range(1, 13))
    assert comb.coefficient(()) == 2 ** 7 * 2 ** 5


@pytest.mark.parametrize("b,d", [(1, 1), (1, 2)])
@pytest.mark.parametrize("f,nonzero", [(2, True), (1, False)])
def test_tensor_coefficient_depends_on_outer_labels(b, d, f, nonzero):
    K = range(1, 7)
    first = parse_multiset(f"1-1-6,2-{b}-5", 3, K, partition=True)
    second = parse_multiset(f"1-1-6,2-{d}-5,3-1-4", 3, K, partition=True)
    target = parse_multiset(f"1-{f}-6,2-1-3,3-1-5", 3, K, partition=True)
    assert (tensor(first, second, K).coefficient(target) > 0) is nonzero


def test_restrict_rejects_bad_inputs():
    partition = parse_multiset("1-1-3", 2, partition=True)
    with pytest.raises(PreconditionError):
        restrict(partition, (1, 4), (1, 2, 3))
    with pytest.raises(PreconditionError):
        restrict(partition, (1,), (1, 2))
    with pytest.raises(PreconditionError):
        restrict(parse_multiset("1-1-3,2-1-3", 2), (1, 3), (1, 2, 3))


def test_expand_support_outside_k():
    with pytest.raises(PreconditionError):
        expand(parse_multiset("1-1-4", 2), (1, 2, 3))


def test_expansion_is_over_set_partitions():
    comb = expand(parse_multiset("1-1-4,1-1-4,2-1-4", 3), range(1, 5))
    assert isinstance(comb, CharacterCombination)
    assert all(len({a.left for a in p.arcs}) == len(p.arcs) for p in comb.keys())


def test_coefficient_of_missing_term_is_zero():
    comb = expand(parse_multiset("1-1-3", 2), (1, 2, 3))
    assert coefficient(comb, parse_multiset("1-1-2", 2)) == 0
    assert coefficient(comb, parse_multiset("1-1-3", 2)) == 1


def test_transport_relabels_nodes():
    comb = restrict_arc(Arc(1, 3, 1), (1, 3), (1, 2, 3), 2)
    moved = transport(comb, {1: 2, 3: 5})
    assert moved.to_dict() == {"2-1-5": 2}
    assert moved.ambient == (2, 5)


def test_divide_exact():
    comb = restrict_arc(Arc(1, 3, 1), (1, 3), (1, 2, 3), 2)
    assert comb.divide_exact(2).to_dict() == {"1-1-3": 1}
    with pytest.raises(VerificationError):
        comb.divide_exact(4)


def test_nonnegative_coefficients_only():
    with pytest.raises(PreconditionError):
        CharacterCombination({(Arc(1, 2, 1),): -1}, 2, (1, 2))


def test_memo_is_used(fresh_cache):
    multiset = parse_multiset("1-1-4,1-1-4,1-1-4", 2)
    expand(multiset, range(1, 5))
    expand(multiset, range(1, 5))
    assert cache_info().hits > 0


@given(strategies.multisets(4, 3, max_arcs=3))
@settings(max_examples=60, deadline=None)
def test_degree_conserved_and_order_independent(multiset):
    K = range(1, 5)
    comb = expand(multiset, K)
    assert comb.degree_sum() == degree(multiset, K)
    assert comb == expand(multiset, K, ALTERNATE_PRIORITY)


@pytest.mark.parametrize("q", [2, 3])
def test_orthogonality_on_four_nodes(q):
    K = range(1, 5)
    partitions = list(enumerate_set_partitions(K, q))
    for first in partitions[::3]:
        for second in partitions:
            expected = q ** len(crossings(first)) if second == conjugate(first) else 0
            assert tensor(first, second, K).coefficient(()) == expected


@given(strategies.multisets(4, 3, max_arcs=3))
@settings(max_examples=40, deadline=None)
def test_combination_dict_round_trip(multiset):
    K = range(1, 5)
    comb = expand(multiset, K)
    assert CharacterCombination.from_dict(json.loads(json.dumps(comb.to_dict())), 3, K) == comb


def test_combination_from_dict_validates_terms():
    assert CharacterCombination.from_dict({"": 2, "1-1-3": 1}, 2, (1, 2, 3)).coefficient(()) == 2
    with pytest.raises(PreconditionError):
        CharacterCombination.from_dict({"1-1-2,1-1-3": 1}, 2, (1, 2, 3))
    with pytest.raises(PreconditionError):
        CharacterCombination.from_dict({"1-1-5": 1}, 2, (1, 2, 3))
    with pytest.raises(PreconditionError):
        CharacterCombination.from_dict({"1-1-3": -1}, 2, (1, 2, 3))
    with pytest.raises(ParseError):
        CharacterCombination.from_dict({"1-x-3": 1}, 2, (1, 2, 3))


@given(strategies.multisets(4, 3, max_arcs=3))
@settings(max_examples=40, deadline=None)
def test_expansion_commutes_with_conjugation(multiset):
    K = range(1, 5)
    comb = expand(multiset, K)
    mirrored = expand(conjugate(multiset), K)
    assert len(mirrored) == len(comb)
    for term, coeff in comb.items():
        assert mirrored.coefficient(conjugate(term)) == coeff


@given(strategies.set_partitions(5, 2), strategies.node_sets(5))
@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
def test_half_in_arc_does_not_decide_trivial_constituent(partition, K):
    L = range(1, 6)
    halves = [arc for arc in partition.arcs if (arc.left in K) != (arc.right in K)]
    assume(halves)
    rest = QSetPartition([arc for arc in partition.arcs if arc != halves[0]], 2, L)
    with_arc = restrict(partition, K, L).coefficient(()) > 0
    without_arc = restrict(rest, K, L).coefficient(()) > 0
    assert with_arc == without_arc


@given(strategies.set_partitions(5, 2), strategies.node_sets(5))
@settings(max_examples=60, deadline=None)
def test_single_arc_at_free_node_forces_trivial_constituent(partition, K):
    L = range(1, 6)
    comb = restrict(partition, K, L)
    starts = {arc.left for arc in partition.arcs}
    ends = {arc.right for arc in partition.arcs}
    singles = [term.arcs[0] for term in comb.keys() if len(term.arcs) == 1]
    if any(arc.left not in starts or arc.right not in ends for arc in singles):
        assert comb.coefficient(()) > 0


def test_runaway_recursion_is_a_guard(monkeypatch):
    def too_deep(*args):
        raise RecursionError("maximum recursion depth exceeded")

    monkeypatch.setattr(decomposition, "_expand_terms", too_deep)
    with pytest.raises(GuardExceededError):
        expand(parse_multiset("1-1-3,1-1-3", 2), (1, 2, 3))
    with pytest.raises(GuardExceededError):
        restrict(parse_multiset("1-1-3", 2, partition=True), (1, 3), (1, 2, 3))
