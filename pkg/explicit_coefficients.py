"""Closed-form trivial coefficients: powers of q counted by significant crossings."""
import logging
from enum import Enum
from dataclasses import dataclass

from combinatorics import NodeSet, crossings, is_set_partition, r_exponent
from matching import Endpoint, perturb_labels
from errors import PreconditionError, VerificationError

logger = logging.getLogger(__name__)

_INTO_K = (Endpoint.OPEN, Endpoint.SOLID)
_OUT_OF_K = (Endpoint.SOLID, Endpoint.OPEN)


class CrossingVariant(Enum):
    SET_PARTITION = "set-partition"
    MULTISET = "multiset"


@dataclass(frozen=True)
class SignificantCrossingSet:
    multiset: object
    pairs: tuple
    variant: CrossingVariant

    def __len__(self):
        return len(self.pairs)

    def to_list(self):
        return [f"{self.multiset.occurrence_text(p)}|{self.multiset.occurrence_text(s)}" for p, s in self.pairs]


def _set_partition_pairs(multiset, K):
    arcs = multiset.arcs
    return tuple(
        (p, s) for p, s in crossings(multiset)
        if arcs[p].left not in K and arcs[s].right not in K and arcs[s].left in K and arcs[p].right in K
    )


def _labeled_pairs(multiset, K):
    labels = [v.labels for v in perturb_labels(multiset, K)]
    return tuple((p, s) for p, s in crossings(multiset) if labels[p] == _INTO_K and labels[s] == _OUT_OF_K)


def significant_crossings(multiset, K, variant=None):
    """
    Crossings (i-a-k, j-b-l), i < j < k < l, that enter K at k and leave it at j.

    For a set partition this is read from K membership (i, l outside K;
    j, k inside).  For a general multiset the endpoint labels decide.
    """
    K = set(NodeSet(K))
    if variant is None:
        variant = CrossingVariant.SET_PARTITION if is_set_partition(multiset) else CrossingVariant.MULTISET
    if variant is CrossingVariant.SET_PARTITION:
        pairs = _set_partition_pairs(multiset, K)
    else:
        pairs = _labeled_pairs(multiset, K)
    return SignificantCrossingSet(multiset, pairs, variant)


def half_in_hypothesis(partition, K):
    """Every arc has exactly one endpoint in K."""
    K = set(NodeSet(K))
    return all((arc.left in K) != (arc.right in K) for arc in partition.arcs)


def mixed_label_hypothesis(multiset, K):
    """Every occurrence is labeled (open, solid) or (solid, open)."""
    return all(v.labels in (_INTO_K, _OUT_OF_K) for v in perturb_labels(multiset, K))


def explicit_trivial_coefficient(partition, K, L):
    """q^{r_K^L(lambda)} * q^{|C_K(lambda)|} for half-in/half-out set partitions."""
    K, L = NodeSet(K), NodeSet(L)
    if not K.issubset(L):
        raise PreconditionError(f"K = {{{K.to_text()}}} is not a subset of L = {{{L.to_text()}}}")
    if not is_set_partition(partition):
        raise PreconditionError(f"{{{partition.to_text()}}} is not a q-set partition; use the oracle")
    if not partition.nodes().issubset(L):
        raise PreconditionError("partition is not supported on L")
    if not half_in_hypothesis(partition, K):
        raise PreconditionError("some arc does not have exactly one endpoint in K; use the oracle")

    by_sets = significant_crossings(partition, K, CrossingVariant.SET_PARTITION)
    by_labels = significant_crossings(partition, K, CrossingVariant.MULTISET)
    if by_sets.pairs != by_labels.pairs:
        raise VerificationError("set-partition and labeled significant crossings disagree")

    q = partition.q
    return q ** r_exponent(partition, K, L) * q ** len(by_sets)


def corollary_trivial_coefficient(multiset, K):
    """q^{|C_K(lambda)|} for multisets over K whose labels are all mixed."""
    K = NodeSet(K)
    if not multiset.nodes().issubset(K):
        raise PreconditionError(f"{{{multiset.to_text()}}} is not supported on K")
    if not mixed_label_hypothesis(multiset, K):
        raise PreconditionError("some occurrence is not labeled (open, solid) or (solid, open); use the oracle")
    return multiset.q ** len(significant_crossings(multiset, K, CrossingVariant.MULTISET))
