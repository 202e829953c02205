"""
Exhaustive and sampled cross-checks between the oracle and the certificates.

Each sweep returns a SweepReport; a sweep never raises on a mismatch, it
records it.  Progress bars are shown only when asked for.
"""
import random
import logging
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement

from tqdm import tqdm

from combinatorics import (
    Arc,
    ArcMultiset,
    ALTERNATE_PRIORITY,
    DEFAULT_PRIORITY,
    conjugate,
    crossings,
    enumerate_set_partitions,
)
from decomposition import expand, restrict, tensor
from matching import trivial_coeff_nonzero, tensor_coeff_nonzero, restriction_coeff_nonzero
from straightening import straighten
from character_values import Restriction, TensorProduct, MultisetCharacter, verify_pointwise
from explicit_coefficients import (
    corollary_trivial_coefficient,
    explicit_trivial_coefficient,
    half_in_hypothesis,
    mixed_label_hypothesis,
)
from errors import SupercharError

logger = logging.getLogger(__name__)


@dataclass
class SweepReport:
    name: str
    instances: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.mismatches

    def record(self, agree, detail):
        self.instances += 1
        if not agree:
            self.mismatches.append(detail)
            logger.warning("%s mismatch: %s", self.name, detail)

    def to_dict(self):
        return {"sweep": self.name, "instances": self.instances,
                "mismatches": len(self.mismatches), "examples": self.mismatches[:5]}


def subsets(nodes):
    nodes = tuple(nodes)
    for size in range(len(nodes) + 1):
        yield from combinations(nodes, size)


def all_arcs(n, q):
    return [Arc(i, l, a) for i in range(1, n + 1) for l in range(i + 1, n + 1) for a in range(1, q)]


def multisets(n, q, max_arcs):
    """Every arc multiset over [1, n] with at most ``max_arcs`` occurrences."""
    pool = all_arcs(n, q)
    support = range(1, n + 1)
    for size in range(max_arcs + 1):
        for arcs in combinations_with_replacement(pool, size):
            yield ArcMultiset(arcs, q, support)


def random_multiset(rng, n, q, max_arcs):
    pool = all_arcs(n, q)
    size = rng.randint(0, max_arcs)
    return ArcMultiset([rng.choice(pool) for _ in range(size)], q, range(1, n + 1))


def _nodes(n):
    return tuple(range(1, n + 1))


def trivial_coefficient_sweep(n, q, progress=False):
    """Matching verdict vs oracle trivial coefficient for every (lambda, K) over [1, n]."""
    report = SweepReport(f"trivial-coefficient n={n} q={q}")
    L = _nodes(n)
    for partition in tqdm(list(enumerate_set_partitions(L, q)), disable=not progress, desc=report.name):
        for K in subsets(L):
            oracle = restrict(partition, K, L).coefficient(()) > 0
            report.record(oracle == trivial_coeff_nonzero(partition, K, L),
                          f"lambda={{{partition.to_text()}}} K={K} oracle={oracle}")
    return report


def tensor_sweep(n, q, samples=None, seed=0, progress=False):
    report = SweepReport(f"tensor n={n} q={q}")
    K = _nodes(n)
    partitions = list(enumerate_set_partitions(K, q))
    if samples is None:
        pairs = [(a, b) for a in partitions for b in partitions]
        targets = lambda rng: partitions  # noqa: E731
    else:
        rng = random.Random(seed)
        pairs = [(rng.choice(partitions), rng.choice(partitions)) for _ in range(samples)]
        targets = lambda rng: [rng.choice(partitions)]  # noqa: E731
    rng = random.Random(seed + 1)
    for first, second in tqdm(pairs, disable=not progress, desc=report.name):
        product = tensor(first, second, K)
        for target in targets(rng):
            oracle = product.coefficient(target) > 0
            report.record(oracle == tensor_coeff_nonzero(first, second, target, K),
                          f"{{{first.to_text()}}} x {{{second.to_text()}}} -> {{{target.to_text()}}}")
    return report


def restriction_sweep(n, q, progress=False):
    report = SweepReport(f"restriction n={n} q={q}")
    L = _nodes(n)
    for partition in tqdm(list(enumerate_set_partitions(L, q)), disable=not progress, desc=report.name):
        for K in subsets(L):
            restricted = restrict(partition, K, L)
            for sub in enumerate_set_partitions(K, q):
                oracle = restricted.coefficient(sub) > 0
                report.record(oracle == restriction_coeff_nonzero(partition, sub, K, L),
                              f"lambda={{{partition.to_text()}}} K={K} mu={{{sub.to_text()}}}")
    return report


def orthogonality_sweep(n, q, progress=False):
    """Trivial coefficient of chi^lambda (x) chi^mu is q^{crossings} exactly when mu is conjugate to lambda."""
    report = SweepReport(f"orthogonality n={n} q={q}")
    K = _nodes(n)
    partitions = list(enumerate_set_partitions(K, q))
    for first in tqdm(partitions, disable=not progress, desc=report.name):
        partner = conjugate(first)
        for second in partitions:
            expected = q ** len(crossings(first)) if second == partner else 0
            found = tensor(first, second, K).coefficient(())
            report.record(found == expected, f"{{{first.to_text()}}} x {{{second.to_text()}}}: {found} != {expected}")
    return report


def pointwise_sweep(n, q, samples=None, seed=0, progress=False):
    """Restriction and tensor outputs over [1, n] checked value by value, all of them or a random sample."""
    report = SweepReport(f"pointwise n={n} q={q}")
    L = _nodes(n)
    partitions = list(enumerate_set_partitions(L, q))
    if samples is None:
        restrictions = [(partition, K) for partition in partitions for K in subsets(L)]
        pairs = [(a, b) for a in partitions for b in partitions]
    else:
        rng = random.Random(seed)
        every_K = list(subsets(L))
        restrictions = [(rng.choice(partitions), rng.choice(every_K)) for _ in range(samples)]
        pairs = [(rng.choice(partitions), rng.choice(partitions)) for _ in range(samples)]
    for partition, K in tqdm(restrictions, disable=not progress, desc=f"{report.name} restrict"):
        comb = restrict(partition, K, L)
        report.record(verify_pointwise(Restriction(partition, L), comb),
                      f"restrict {{{partition.to_text()}}} to K={K}")
    for partition, other in tqdm(pairs, disable=not progress, desc=f"{report.name} tensor"):
        comb = tensor(partition, other, L)
        report.record(verify_pointwise(TensorProduct(partition, other), comb),
                      f"{{{partition.to_text()}}} x {{{other.to_text()}}}")
    return report


def straightening_sweep(samples, n, q, max_arcs=4, seed=0, progress=False):
    """Straighten random multisets and check the restriction identity and order independence."""
    report = SweepReport(f"straightening n={n} q={q}")
    rng = random.Random(seed)
    K = _nodes(n)
    for _ in tqdm(range(samples), disable=not progress, desc=report.name):
        multiset = random_multiset(rng, n, q, max_arcs)
        try:
            agree = straighten(multiset, K).check_identity()
        except SupercharError as e:
            agree = False
            logger.debug("straightening failed: %s", e)
        agree = agree and expand(multiset, K, DEFAULT_PRIORITY) == expand(multiset, K, ALTERNATE_PRIORITY)
        report.record(agree, f"{{{multiset.to_text()}}}")
    return report


def order_independence_sweep(n, q, max_arcs, progress=False):
    report = SweepReport(f"order-independence n={n} q={q}")
    K = _nodes(n)
    for multiset in tqdm(list(multisets(n, q, max_arcs)), disable=not progress, desc=report.name):
        report.record(expand(multiset, K, DEFAULT_PRIORITY) == expand(multiset, K, ALTERNATE_PRIORITY),
                      f"{{{multiset.to_text()}}}")
    return report


def multiset_pointwise_sweep(n, q, max_arcs, progress=False):
    report = SweepReport(f"multiset-pointwise n={n} q={q}")
    K = _nodes(n)
    for multiset in tqdm(list(multisets(n, q, max_arcs)), disable=not progress, desc=report.name):
        report.record(verify_pointwise(MultisetCharacter(multiset), expand(multiset, K)),
                      f"{{{multiset.to_text()}}}")
    return report


def explicit_sweep(n, q, progress=False):
    """Closed form vs oracle on every half-in/half-out (lambda, K) over [1, n]."""
    report = SweepReport(f"explicit n={n} q={q}")
    L = _nodes(n)
    for partition in tqdm(list(enumerate_set_partitions(L, q)), disable=not progress, desc=report.name):
        for K in subsets(L):
            if not half_in_hypothesis(partition, K):
                continue
            oracle = restrict(partition, K, L).coefficient(())
            closed = explicit_trivial_coefficient(partition, K, L)
            report.record(oracle == closed, f"lambda={{{partition.to_text()}}} K={K}: {closed} != {oracle}")
    return report


def corollary_sweep(n, q, max_arcs, progress=False):
    report = SweepReport(f"corollary n={n} q={q}")
    K = _nodes(n)
    for multiset in tqdm(list(multisets(n, q, max_arcs)), disable=not progress, desc=report.name):
        if not mixed_label_hypothesis(multiset, K):
            continue
        oracle = expand(multiset, K).coefficient(())
        closed = corollary_trivial_coefficient(multiset, K)
        report.record(oracle == closed, f"{{{multiset.to_text()}}}: {closed} != {oracle}")
    return report


SWEEPS = {
    "trivial": lambda n, q, progress: trivial_coefficient_sweep(n, q, progress),
    "tensor": lambda n, q, progress: tensor_sweep(n, q, progress=progress),
    "restriction": lambda n, q, progress: restriction_sweep(n, q, progress),
    "orthogonality": lambda n, q, progress: orthogonality_sweep(n, q, progress),
    "pointwise": lambda n, q, progress: pointwise_sweep(n, q, progress=progress),
    "straightening": lambda n, q, progress: straightening_sweep(200, n, q, progress=progress),
    "order": lambda n, q, progress: order_independence_sweep(n, q, 3, progress),
    "multiset-pointwise": lambda n, q, progress: multiset_pointwise_sweep(n, q, 3, progress),
    "explicit": lambda n, q, progress: explicit_sweep(n, q, progress),
    "corollary": lambda n, q, progress: corollary_sweep(n, q, 3, progress),
}
