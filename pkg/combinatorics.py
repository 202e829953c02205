"""
Arcs, arc multisets and q-set partitions over finite node sets.

Everything here is immutable.  Arc multisets keep their arcs sorted by
(left, right, label); the position of an arc in that order is its occurrence
index, which is how crossings, labelings and graphs refer to one copy of a
repeated arc.
"""
import re
import logging
from enum import Enum
from functools import lru_cache
from dataclasses import dataclass
from typing import NamedTuple, Iterator, Sequence

import numpy as np
from sympy import isprime

import config
from errors import ParseError, PreconditionError, GuardExceededError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Field and node sets
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _checked_prime(q):
    if not isinstance(q, (int, np.integer)) or isinstance(q, bool) or not isprime(int(q)):
        raise PreconditionError(f"q must be a prime, got {q!r}")
    return int(q)


@dataclass(frozen=True)
class PrimeModulus:
    q: int

    def __post_init__(self):
        object.__setattr__(self, "q", _checked_prime(self.q))

    def __int__(self):
        return self.q

    def nonzero(self):
        return range(1, self.q)


@dataclass(frozen=True)
class FieldElement:
    """An element of F_q realized as an integer mod the prime q."""
    value: int
    q: int

    def __post_init__(self):
        q = _checked_prime(self.q)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "value", int(self.value) % q)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.q != self.q:
                raise PreconditionError(f"cannot mix F_{self.q} and F_{other.q}")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.q)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.q)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.q)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.q)

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return (self.value, self.q) == (other.value, other.q)
        if isinstance(other, int):
            return self.value == other % self.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.q))

    def is_zero(self):
        return self.value == 0


class NodeSet(tuple):
    """Strictly increasing tuple of positive integers (K, L, K', L', ...)."""

    def __new__(cls, nodes=()):
        values = sorted({int(node) for node in nodes})
        if values and values[0] < 1:
            raise PreconditionError(f"nodes must be positive integers, got {values[0]}")
        return super().__new__(cls, values)

    def issubset(self, other):
        return set(self) <= set(other)

    def union(self, *others):
        merged = set(self)
        for other in others:
            merged.update(other)
        return NodeSet(merged)

    def difference(self, other):
        return NodeSet(set(self) - set(other))

    def between(self, low, high):
        """Nodes strictly between low and high."""
        return tuple(node for node in self if low < node < high)

    def count_between(self, low, high):
        return sum(1 for node in self if low < node < high)

    def to_text(self):
        return ",".join(str(node) for node in self)

    def __repr__(self):
        return f"NodeSet({{{self.to_text()}}})"


# ---------------------------------------------------------------------------
# Arcs and multisets
# ---------------------------------------------------------------------------

class Arc(NamedTuple):
    left: int
    right: int
    label: int

    @property
    def length(self):
        return self.right - self.left

    def to_text(self):
        return f"{self.left}-{self.label}-{self.right}"

    def nests(self, other):
        """True if ``other`` sits strictly inside this arc."""
        return self.left < other.left < other.right < self.right


class ArcMultiset:
    """A finite multiset of arcs over an ambient node set (the support)."""

    __slots__ = ("q", "arcs", "support")

    def __init__(self, arcs=(), q=2, support=None):
        q = _checked_prime(q)
        normalized = []
        for arc in arcs:
            left, right, label = (int(x) for x in arc)
            label %= q
            if left < 1 or left >= right:
                raise PreconditionError(f"arc endpoints must satisfy 1 <= i < l, got {left}-{right}")
            if label == 0:
                raise PreconditionError(f"arc {left}-{right} has label 0 in F_{q}")
            normalized.append(Arc(left, right, label))
        normalized.sort()
        endpoints = NodeSet(node for arc in normalized for node in (arc.left, arc.right))
        support = endpoints if support is None else NodeSet(support)
        if not endpoints.issubset(support):
            missing = endpoints.difference(support)
            raise PreconditionError(f"arc endpoints {missing.to_text()} lie outside the support")
        self.q = q
        self.arcs = tuple(normalized)
        self.support = support
        self._validate()

    def _validate(self):
        """Subclass hook run after normalisation; any multiset is valid here."""

    @classmethod
    def from_canonical(cls, arcs, q, support):
        """Build from an already sorted, validated arc tuple (no checks)."""
        obj = cls.__new__(cls)
        obj.q = q
        obj.arcs = arcs
        obj.support = support
        return obj

    def with_support(self, support):
        return type(self)(self.arcs, self.q, support)

    def __iter__(self):
        return iter(self.arcs)

    def __len__(self):
        return len(self.arcs)

    def __getitem__(self, index):
        return self.arcs[index]

    def __bool__(self):
        return bool(self.arcs)

    def __eq__(self, other):
        if isinstance(other, ArcMultiset):
            return self.q == other.q and self.arcs == other.arcs
        return NotImplemented

    def __hash__(self):
        return hash((self.q, self.arcs))

    def __repr__(self):
        return f"{type(self).__name__}({{{self.to_text()}}}, q={self.q})"

    def to_text(self):
        return ",".join(arc.to_text() for arc in self.arcs)

    def nodes(self):
        return NodeSet(node for arc in self.arcs for node in (arc.left, arc.right))

    def total_length(self):
        return sum(arc.length for arc in self.arcs)

    def occurrence_text(self, index):
        return f"{self.arcs[index].to_text()}@{index}"


class QSetPartition(ArcMultiset):
    """An arc multiset in which no two arcs share a left or a right endpoint."""

    __slots__ = ()

    def _validate(self):
        if not _is_set_partition(self.arcs):
            raise PreconditionError(f"{{{self.to_text()}}} is not a q-set partition")


def _is_set_partition(arcs):
    lefts = [arc.left for arc in arcs]
    rights = [arc.right for arc in arcs]
    return len(set(lefts)) == len(lefts) and len(set(rights)) == len(rights)


def multiset_union(*multisets):
    """The multiset sum of arc multisets over the union of their supports."""
    if not multisets:
        raise PreconditionError("multiset_union needs at least one operand")
    q = multisets[0].q
    if any(m.q != q for m in multisets):
        raise PreconditionError("cannot combine multisets over different fields")
    arcs = [arc for m in multisets for arc in m.arcs]
    support = NodeSet().union(*(m.support for m in multisets))
    return ArcMultiset(arcs, q, support)


def as_partition(multiset, support=None):
    """Promote a multiset to a QSetPartition (raises if it has shared endpoints)."""
    return QSetPartition(multiset.arcs, multiset.q, multiset.support if support is None else support)


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------

class PairStats(NamedTuple):
    arcs: tuple
    m: int
    wt: FieldElement


def stats(multiset, j, k):
    """Occurrences from j to k, their number and the sum of their labels."""
    if not j < k:
        raise PreconditionError(f"stats needs j < k, got {j}, {k}")
    found = tuple(arc for arc in multiset.arcs if arc.left == j and arc.right == k)
    return PairStats(found, len(found), FieldElement(sum(arc.label for arc in found), multiset.q))


def is_set_partition(multiset):
    return _is_set_partition(multiset.arcs)


def crossings(multiset):
    """Ordered occurrence pairs (p, s) with arcs p = i-a-k, s = j-b-l and i < j < k < l."""
    arcs = multiset.arcs
    found = []
    for p, first in enumerate(arcs):
        for s, second in enumerate(arcs):
            if first.left < second.left < first.right < second.right:
                found.append((p, s))
    return tuple(found)


def r_exponent(multiset, K, L):
    """Number of pairs (j, arc) with j in L but not K, strictly under the arc."""
    K, L = NodeSet(K), NodeSet(L)
    if not K.issubset(L):
        raise PreconditionError(f"K = {{{K.to_text()}}} is not a subset of L = {{{L.to_text()}}}")
    if not multiset.nodes().issubset(L):
        raise PreconditionError("multiset support is not contained in L")
    outside = L.difference(K)
    return sum(outside.count_between(arc.left, arc.right) for arc in multiset.arcs)


def degree_exponent(multiset, L):
    L = NodeSet(L)
    return sum(L.count_between(arc.left, arc.right) for arc in multiset.arcs)


def degree(multiset, L):
    """chi^lambda(1) as a character of U_L(q)."""
    return multiset.q ** degree_exponent(multiset, L)


def conjugate(multiset):
    return type(multiset)(
        ((arc.left, arc.right, -arc.label) for arc in multiset.arcs), multiset.q, multiset.support
    )


def is_linear(multiset, K):
    """No node of K lies strictly under any arc."""
    K = NodeSet(K)
    return all(K.count_between(arc.left, arc.right) == 0 for arc in multiset.arcs)


def is_crossing_free(multiset):
    return not crossings(multiset)


def supercharacter_norm(partition):
    """<chi^lambda, chi^lambda> = q^{number of crossings}."""
    return partition.q ** len(crossings(partition))


# ---------------------------------------------------------------------------
# Conflicts
# ---------------------------------------------------------------------------

class ConflictKind(Enum):
    CB = "CB"
    CL = "CL"
    CR = "CR"
    CN = "CN"


_KIND_RANK = {ConflictKind.CB: 0, ConflictKind.CL: 1, ConflictKind.CR: 2, ConflictKind.CN: 3}

DEFAULT_PRIORITY = (ConflictKind.CB, ConflictKind.CL, ConflictKind.CR)
ALTERNATE_PRIORITY = (ConflictKind.CR, ConflictKind.CL, ConflictKind.CB)


@dataclass(frozen=True)
class Conflict:
    """
    One conflict of a multiset over K.

    For CL and CR ``arcs`` is (long, short); for CB it is the two parallel
    occurrences in canonical order; for CN it is the incident multiset at
    ``node``.  ``occurrences`` holds the matching occurrence indices.
    """
    kind: ConflictKind
    arcs: tuple
    occurrences: tuple
    node: int

    def to_text(self):
        body = ",".join(f"{arc.to_text()}@{occ}" for arc, occ in zip(self.arcs, self.occurrences))
        return f"{self.kind.value}@{self.node}[{body}]"


def _pair_conflict(kind, arcs, first, second):
    node = arcs[first].right if kind is ConflictKind.CR else arcs[first].left
    return Conflict(kind, (arcs[first], arcs[second]), (first, second), node)


def _first_cb(arcs):
    for p in range(len(arcs) - 1):
        if arcs[p].left == arcs[p + 1].left and arcs[p].right == arcs[p + 1].right:
            return p, p + 1
    return None


def _first_cl(arcs):
    for p, short in enumerate(arcs):
        for s in range(p + 1, len(arcs)):
            other = arcs[s]
            if other.left != short.left:
                break
            if other.right > short.right:
                return s, p
    return None


def _first_cr(arcs):
    for p, long in enumerate(arcs):
        for s in range(p + 1, len(arcs)):
            other = arcs[s]
            if other.right == long.right and other.left > long.left:
                return p, s
    return None


_FINDERS = {ConflictKind.CB: _first_cb, ConflictKind.CL: _first_cl, ConflictKind.CR: _first_cr}


def select_conflict(arcs, priority=DEFAULT_PRIORITY):
    """
    The pair conflict the rewriting engines resolve next.

    ``arcs`` is a canonical arc tuple.  The first kind in ``priority`` that
    occurs wins; within a kind the first pair in canonical order wins.
    """
    for kind in priority:
        found = _FINDERS[kind](arcs)
        if found is not None:
            return _pair_conflict(kind, arcs, *found)
    return None


def find_conflicts(multiset, K):
    """
    Every conflict of the multiset over K, in canonical order.

    Pair conflicts are reported when their shared endpoints lie in K; a pair
    sharing an endpoint outside K belongs to the CN conflict at that node.
    Order is by location node (left endpoint for CL/CB, right endpoint for
    CR, the node itself for CN), then kind, then occurrence indices.
    """
    K = set(NodeSet(K))
    arcs = multiset.arcs
    found = []
    for p, first in enumerate(arcs):
        for s in range(p + 1, len(arcs)):
            second = arcs[s]
            same_left = first.left == second.left
            same_right = first.right == second.right
            if same_left and same_right:
                if first.left in K and first.right in K:
                    found.append(_pair_conflict(ConflictKind.CB, arcs, p, s))
            elif same_left:
                if first.left in K:
                    found.append(_pair_conflict(ConflictKind.CL, arcs, s, p))
            elif same_right:
                if first.right in K:
                    found.append(_pair_conflict(ConflictKind.CR, arcs, p, s))

    for node in multiset.support:
        if node in K:
            continue
        incident = [p for p, arc in enumerate(arcs) if node in (arc.left, arc.right)]
        if incident:
            found.append(Conflict(ConflictKind.CN, tuple(arcs[p] for p in incident), tuple(incident), node))

    found.sort(key=lambda c: (c.node, _KIND_RANK[c.kind], c.occurrences))
    return found


# ---------------------------------------------------------------------------
# Enumeration of S_K(q)
# ---------------------------------------------------------------------------

def _check_guard(K, guard):
    guard = config.ENUMERATION_GUARD if guard is None else guard
    if len(K) > guard:
        raise GuardExceededError(f"|K| = {len(K)} exceeds the enumeration guard {guard}")


def _partition_arcs(nodes, q):
    results = []
    last = len(nodes) - 1

    def visit(pos, pending, arcs):
        if pos == len(nodes):
            if not pending:
                results.append(tuple(sorted(arcs)))
            return
        if len(pending) > len(nodes) - pos:
            return
        node = nodes[pos]
        options = [(pending, arcs)]
        for opened in pending:
            remaining = tuple(p for p in pending if p != opened)
            options.extend((remaining, arcs + (Arc(opened, node, label),)) for label in range(1, q))
        for remaining, closed in options:
            visit(pos + 1, remaining, closed)
            if pos < last:
                visit(pos + 1, remaining + (node,), closed)

    visit(0, (), ())
    results.sort()
    return results


def enumerate_set_partitions(K, q, arc_count=None, guard=None) -> Iterator[QSetPartition]:
    """Yield every element of S_K(q) once, in canonical order."""
    K = NodeSet(K)
    q = PrimeModulus(q).q
    _check_guard(K, guard)
    for arcs in _partition_arcs(tuple(K), q):
        if arc_count is None or len(arcs) == arc_count:
            yield QSetPartition.from_canonical(arcs, q, K)


def count_set_partitions(K, q, guard=None):
    K = NodeSet(K)
    _check_guard(K, guard)
    return len(_partition_arcs(tuple(K), PrimeModulus(q).q))


def q_stirling_table(n_max, q, guard=None):
    """
    Table S_q(n, k) counted by enumeration: entry [n, k] is the number of
    elements of S_[1,n](q) with n - k arcs.

    These are (q-1)-analogues of Stirling numbers of the second kind; the
    q-subscript follows the customary name.
    """
    table = np.zeros((n_max + 1, n_max + 1), dtype=np.int64)
    for n in range(n_max + 1):
        for partition in enumerate_set_partitions(range(1, n + 1), q, guard=guard):
            table[n, n - len(partition)] += 1
    return table


def q_stirling_by_recursion(n_max, q):
    """S_q(n,k) = S_q(n-1,k-1) + k(q-1) S_q(n-1,k), S_q(0,0) = 1."""
    table = np.zeros((n_max + 1, n_max + 1), dtype=np.int64)
    table[0, 0] = 1
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            table[n, k] = table[n - 1, k - 1] + k * (q - 1) * table[n - 1, k]
    return table


# ---------------------------------------------------------------------------
# Text grammar
# ---------------------------------------------------------------------------

_ARC_RE = re.compile(r"^\s*(\d+)-(\d+)-(\d+)\s*$")
_RANGE_RE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")


def parse_nodes(text) -> NodeSet:
    """'1,4,5', '1..10', '1..3,7' or '' (the empty set)."""
    nodes = []
    for chunk in (text or "").split(","):
        if not chunk.strip():
            continue
        span = _RANGE_RE.match(chunk)
        if span:
            low, high = int(span.group(1)), int(span.group(2))
            if low > high:
                raise ParseError(f"empty node range {chunk.strip()!r}")
            nodes.extend(range(low, high + 1))
        elif chunk.strip().isdigit():
            nodes.append(int(chunk))
        else:
            raise ParseError(f"bad node {chunk.strip()!r}")
    if 0 in nodes:
        raise ParseError("nodes are positive integers")
    return NodeSet(nodes)


def parse_arc(text, q) -> Arc:
    """'i-a-l' with 1 <= a < q and i < l."""
    match = _ARC_RE.match(text)
    if not match:
        raise ParseError(f"bad arc {text.strip()!r}, expected i-a-l")
    left, label, right = (int(g) for g in match.groups())
    if not 1 <= label < q:
        raise ParseError(f"arc label {label} is not in [1, {q})")
    if not 1 <= left < right:
        raise ParseError(f"arc {text.strip()!r} needs 1 <= i < l")
    return Arc(left, right, label)


def parse_multiset(text, q, support=None, partition=False) -> ArcMultiset:
    q = PrimeModulus(q).q
    arcs = [parse_arc(chunk, q) for chunk in (text or "").split(",") if chunk.strip()]
    cls = QSetPartition if partition else ArcMultiset
    return cls(arcs, q, support)


def canonical_key(arcs: Sequence) -> tuple:
    return tuple(sorted(Arc(*arc) for arc in arcs))

