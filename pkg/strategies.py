"""Hypothesis strategies for arcs, node sets, multisets and q-set partitions."""
from hypothesis import strategies as st

from combinatorics import Arc, ArcMultiset, NodeSet, QSetPartition

PRIMES = st.sampled_from([2, 3, 5])
SMALL_PRIMES = st.sampled_from([2, 3])


def arcs(n, q):
    """An arc i-a-l with 1 <= i < l <= n."""
    return st.tuples(st.integers(1, n - 1), st.integers(1, q - 1)).flatmap(
        lambda pair: st.integers(pair[0] + 1, n).map(lambda right: Arc(pair[0], right, pair[1]))
    )


def node_sets(n):
    return st.sets(st.integers(1, n)).map(NodeSet)


def multisets(n, q, max_arcs=4):
    """Arc multisets supported on [1, n]."""
    return st.lists(arcs(n, q), max_size=max_arcs).map(lambda found: ArcMultiset(found, q, range(1, n + 1)))


@st.composite
def set_partitions(draw, n, q):
    """A q-set partition of [1, n]: a random set partition with labels on consecutive blocks."""
    block_of = []
    for node in range(n):
        block_of.append(draw(st.integers(0, len(set(block_of)))))
    blocks = {}
    for node, block in enumerate(block_of, start=1):
        blocks.setdefault(block, []).append(node)
    found = []
    for members in blocks.values():
        for left, right in zip(members, members[1:]):
            found.append(Arc(left, right, draw(st.integers(1, q - 1))))
    return QSetPartition(found, q, range(1, n + 1))


@st.composite
def nested_node_sets(draw, n):
    """(K, L) with K a subset of L a subset of [1, n]."""
    L = draw(node_sets(n))
    K = draw(st.sets(st.sampled_from(sorted(L)))) if L else set()
    return NodeSet(K), L
