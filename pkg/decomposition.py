"""
Brute-force decomposition of restrictions and tensor products.

Characters of U_K(q) indexed by arc multisets are rewritten with the two
local rules (single-arc restriction, and resolution of a conflicting arc
pair) until only q-set partitions remain.  The result is the exact
nonnegative integer combination of supercharacters; every other module
checks itself against it.
"""
import logging
from collections import Counter
from functools import lru_cache

import config
from combinatorics import (
    Arc,
    ArcMultiset,
    NodeSet,
    QSetPartition,
    DEFAULT_PRIORITY,
    canonical_key,
    degree_exponent,
    is_set_partition,
    multiset_union,
    parse_multiset,
    select_conflict,
    _is_set_partition,
)
from errors import GuardExceededError, PreconditionError, VerificationError

logger = logging.getLogger(__name__)


class _LinearCombination:
    """Finite map from canonical arc tuples to positive integers."""

    key_type = ArcMultiset

    def __init__(self, terms, q, ambient, validate=True):
        self.q = q
        self.ambient = NodeSet(ambient)
        clean = {}
        for key, coeff in terms.items():
            if validate:
                key = key.arcs if isinstance(key, ArcMultiset) else canonical_key(key)
                self._check_key(key)
                if int(coeff) != coeff or coeff < 0:
                    raise PreconditionError(f"coefficients must be nonnegative integers, got {coeff!r}")
            if coeff:
                clean[key] = clean.get(key, 0) + int(coeff)
        self.terms = dict(sorted(clean.items()))

    def _check_key(self, key):
        nodes = {n for arc in key for n in (arc.left, arc.right)}
        if not nodes <= set(self.ambient):
            raise PreconditionError(f"term {key} leaves the ambient node set")

    def _wrap(self, key):
        return self.key_type.from_canonical(key, self.q, self.ambient)

    def items(self):
        for key, coeff in self.terms.items():
            yield self._wrap(key), coeff

    def keys(self):
        return [self._wrap(key) for key in self.terms]

    def coefficient(self, term):
        key = term.arcs if isinstance(term, ArcMultiset) else canonical_key(term)
        return self.terms.get(key, 0)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.keys())

    def __eq__(self, other):
        if not isinstance(other, _LinearCombination):
            return NotImplemented
        return (self.q, self.ambient, self.terms) == (other.q, other.ambient, other.terms)

    def __repr__(self):
        body = ", ".join(f"{{{self._wrap(k).to_text()}}}: {c}" for k, c in self.terms.items())
        return f"{type(self).__name__}({body})"

    def to_dict(self):
        """Canonical term text -> coefficient ('' is the trivial character)."""
        return {",".join(arc.to_text() for arc in key): coeff for key, coeff in self.terms.items()}

    @classmethod
    def from_dict(cls, data, q, ambient):
        """Inverse of to_dict; every key is read with the multiset grammar."""
        terms = {}
        for text, coeff in data.items():
            key = parse_multiset(text, q, support=ambient).arcs
            terms[key] = terms.get(key, 0) + coeff
        return cls(terms, q, ambient)

    def scale(self, factor):
        return type(self)({k: c * factor for k, c in self.terms.items()}, self.q, self.ambient, validate=False)

    def divide_exact(self, divisor):
        quotient = {}
        for key, coeff in self.terms.items():
            whole, rest = divmod(coeff, divisor)
            if rest:
                raise VerificationError(f"coefficient {coeff} of {key} is not divisible by {divisor}")
            quotient[key] = whole
        return type(self)(quotient, self.q, self.ambient, validate=False)

    def degree_sum(self):
        """Sum of c_nu * deg(chi^nu) over the ambient node set."""
        return sum(c * self.q ** degree_exponent(self._wrap(k), self.ambient) for k, c in self.terms.items())


class CharacterCombination(_LinearCombination):
    """A character of U_K(q) written in the supercharacter basis."""

    key_type = QSetPartition

    def _check_key(self, key):
        super()._check_key(key)
        if not _is_set_partition(key):
            raise PreconditionError(f"{key} is not a q-set partition")


class TermCombination(_LinearCombination):
    """Intermediate rewriting state: arc multisets with positive coefficients."""


def coefficient(comb, term):
    """Coefficient of ``term`` in ``comb`` (0 when absent)."""
    return comb.coefficient(term)


def transport(comb, index_map, ambient=None):
    """Relabel every node of ``comb`` through ``index_map``."""
    ambient = NodeSet(index_map[n] for n in comb.ambient) if ambient is None else NodeSet(ambient)
    moved = {}
    for key, coeff in comb.terms.items():
        new_key = tuple(sorted(Arc(index_map[a.left], index_map[a.right], a.label) for a in key))
        moved[new_key] = moved.get(new_key, 0) + coeff
    return type(comb)(moved, comb.q, ambient, validate=False)


# ---------------------------------------------------------------------------
# Local rules
# ---------------------------------------------------------------------------

def _restrict_arc_terms(arc, K, L, q):
    Kset = set(K)
    r = L.difference(K).count_between(arc.left, arc.right)
    scale = q ** r
    labels = range(1, q)
    inner = K.between(arc.left, arc.right)
    terms = Counter()
    if arc.left in Kset and arc.right in Kset:
        terms[(arc,)] = scale
    elif arc.right in Kset:
        terms[()] = scale
        for j in inner:
            for b in labels:
                terms[(Arc(j, arc.right, b),)] += scale
    elif arc.left in Kset:
        terms[()] = scale
        for k in inner:
            for b in labels:
                terms[(Arc(arc.left, k, b),)] += scale
    else:
        terms[()] = scale * (len(inner) * (q - 1) + 1)
        for n, j in enumerate(inner):
            for k in inner[n + 1:]:
                for b in labels:
                    terms[(Arc(j, k, b),)] += scale * (q - 1)
    return terms


def restrict_arc(arc, K, L, q):
    """Res^{U_L}_{U_K} chi^{arc} as a combination over K."""
    K, L = NodeSet(K), NodeSet(L)
    arc = Arc(*arc)
    if not K.issubset(L):
        raise PreconditionError(f"K = {{{K.to_text()}}} is not a subset of L = {{{L.to_text()}}}")
    if arc.left not in L or arc.right not in L:
        raise PreconditionError(f"arc {arc.to_text()} has an endpoint outside L")
    return CharacterCombination(_restrict_arc_terms(arc, K, L, q), q, K, validate=False)


def _pair(x, y):
    return (x, y) if x <= y else (y, x)


def _resolve_pair(x, y, K, q):
    labels = range(1, q)
    terms = Counter()
    if x.left == y.left and x.right == y.right:
        i, l = x.left, x.right
        inner = [n for n in K if i < n < l]
        total = (x.label + y.label) % q
        if total == 0:
            terms[()] += 1
            for k in inner:
                for c in labels:
                    terms[(Arc(i, k, c),)] += 1
                    terms[(Arc(k, l, c),)] += 1
            for j in inner:
                for k in inner:
                    for c in labels:
                        for d in labels:
                            terms[_pair(Arc(i, j, c), Arc(k, l, d))] += 1
        else:
            long = Arc(i, l, total)
            terms[(long,)] += len(inner) * (q - 1) + 1
            for n, j in enumerate(inner):
                for k in inner[n + 1:]:
                    for c in labels:
                        terms[_pair(long, Arc(j, k, c))] += q - 1
    elif x.left == y.left:
        long, short = (x, y) if x.right > y.right else (y, x)
        terms[(long,)] += 1
        for j in K:
            if long.left < j < short.right:
                for c in labels:
                    terms[_pair(long, Arc(j, short.right, c))] += 1
    elif x.right == y.right:
        long, short = (x, y) if x.left < y.left else (y, x)
        terms[(long,)] += 1
        for k in K:
            if short.left < k < long.right:
                for c in labels:
                    terms[_pair(long, Arc(short.left, k, c))] += 1
    else:
        terms[_pair(x, y)] += 1
    return terms


def resolve_conflict_pair(first, second, K, q):
    """chi^{first} (x) chi^{second} rewritten by the pair rule, as a TermCombination over K."""
    K = NodeSet(K)
    first, second = Arc(*first), Arc(*second)
    for arc in (first, second):
        if arc.left not in K or arc.right not in K:
            raise PreconditionError(f"arc {arc.to_text()} is not over K")
    return TermCombination(_resolve_pair(first, second, tuple(K), q), q, K, validate=False)


# ---------------------------------------------------------------------------
# Rewriting to a fixpoint
# ---------------------------------------------------------------------------

@lru_cache(maxsize=config.CACHE_SIZE)
def _expand_terms(arcs, K, q, priority):
    conflict = select_conflict(arcs, priority)
    if conflict is None:
        return ((arcs, 1),)
    p, s = conflict.occurrences
    rest = tuple(arc for n, arc in enumerate(arcs) if n != p and n != s)
    measure = arcs[p].length + arcs[s].length
    total = Counter()
    for replacement, weight in _resolve_pair(arcs[p], arcs[s], K, q).items():
        if config.CHECK_INVARIANTS and sum(arc.length for arc in replacement) >= measure:
            raise VerificationError(f"termination measure did not drop resolving {conflict.to_text()}")
        merged = tuple(sorted(rest + replacement))
        for term, coeff in _expand_terms(merged, K, q, priority):
            total[term] += weight * coeff
    return tuple(sorted(total.items()))


def _expanded(arcs, K, q, priority):
    try:
        return _expand_terms(arcs, K, q, priority)
    except RecursionError:
        raise GuardExceededError(f"rewriting {len(arcs)} arcs nests deeper than the interpreter allows")


def cache_info():
    return _expand_terms.cache_info()


def clear_cache():
    _expand_terms.cache_clear()


def _check_degree(comb, expected, what):
    if config.CHECK_INVARIANTS:
        found = comb.degree_sum()
        if found != expected:
            raise VerificationError(f"{what}: degree not conserved ({found} != {expected})")


def expand(multiset, K, priority=DEFAULT_PRIORITY):
    """chi^lambda for an arc multiset over K, written in supercharacters."""
    K = NodeSet(K)
    if not multiset.nodes().issubset(K):
        raise PreconditionError(f"{{{multiset.to_text()}}} is not supported on K = {{{K.to_text()}}}")
    terms = dict(_expanded(multiset.arcs, tuple(K), multiset.q, tuple(priority)))
    comb = CharacterCombination(terms, multiset.q, K, validate=False)
    _check_degree(comb, multiset.q ** degree_exponent(multiset, K), "expand")
    logger.debug("expand %s over %s -> %d terms", multiset.to_text(), K.to_text(), len(comb))
    return comb


def restrict(partition, K, L):
    """Res^{U_L}_{U_K} chi^lambda, one arc at a time."""
    K, L = NodeSet(K), NodeSet(L)
    if not K.issubset(L):
        raise PreconditionError(f"K = {{{K.to_text()}}} is not a subset of L = {{{L.to_text()}}}")
    if not partition.nodes().issubset(L):
        raise PreconditionError(f"{{{partition.to_text()}}} is not supported on L")
    if not is_set_partition(partition):
        raise PreconditionError(f"{{{partition.to_text()}}} is not a q-set partition")

    q = partition.q
    key_K = tuple(K)
    state = Counter({(): 1})
    for arc in partition.arcs:
        options = _restrict_arc_terms(arc, K, L, q)
        following = Counter()
        for term, coeff in state.items():
            for option, weight in options.items():
                merged = tuple(sorted(term + option))
                for result, count in _expanded(merged, key_K, q, DEFAULT_PRIORITY):
                    following[result] += coeff * weight * count
        state = following

    comb = CharacterCombination(state, q, K, validate=False)
    _check_degree(comb, q ** degree_exponent(partition, L), "restrict")
    logger.debug("restrict %s from %s to %s -> %d terms",
                 partition.to_text(), L.to_text(), K.to_text(), len(comb))
    return comb


def tensor(first, second, K):
    """chi^lambda (x) chi^mu over U_K(q)."""
    K = NodeSet(K)
    for factor in (first, second):
        if not factor.nodes().issubset(K):
            raise PreconditionError(f"{{{factor.to_text()}}} is not supported on K")
    return expand(multiset_union(first.with_support(K), second.with_support(K)), K)
