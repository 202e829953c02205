"""
Straightening arc multisets into q-set partitions on a larger node set.

Each rule removes one shared-endpoint conflict by inserting one or two new
nodes (collected in L) and pushing the old nodes to the right.  The old
nodes stay in K under the index map.  At the fixpoint the multiset
character over K equals q^{-r} times the restriction of a genuine
supercharacter from K' + L' down to K'.
"""
import re
import logging
from dataclasses import dataclass

from combinatorics import (
    Arc,
    ArcMultiset,
    ConflictKind,
    NodeSet,
    QSetPartition,
    DEFAULT_PRIORITY,
    parse_arc,
    parse_nodes,
    r_exponent,
    select_conflict,
)
from decomposition import expand, restrict, transport
from matching import Endpoint
from errors import ParseError, PreconditionError, VerificationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StraighteningStep:
    rule: str
    resolved: tuple
    inserted: tuple
    r: int
    K_after: NodeSet
    L_after: NodeSet

    def to_text(self):
        arcs = ",".join(arc.to_text() for arc in self.resolved)
        new = ",".join(str(n) for n in self.inserted)
        return f"{self.rule} [{arcs}] +{{{new}}} r={self.r} K={{{self.K_after.to_text()}}} L={{{self.L_after.to_text()}}}"

    @classmethod
    def from_text(cls, text, q):
        match = _STEP_RE.match(text.strip())
        if not match:
            raise ParseError(f"bad straightening step {text.strip()!r}")
        rule, arcs, new, r, K_after, L_after = match.groups()
        resolved = tuple(parse_arc(chunk, q) for chunk in arcs.split(",") if chunk)
        inserted = tuple(parse_nodes(new))
        return cls(rule, resolved, inserted, int(r), parse_nodes(K_after), parse_nodes(L_after))


_STEP_RE = re.compile(r"^(SL|SR|SB) \[([^\]]*)\] \+\{([^}]*)\} r=(\d+) K=\{([^}]*)\} L=\{([^}]*)\}$")


def _shift(node, cuts):
    """Push ``node`` right by one for every cut at or below it."""
    return node + sum(1 for cut in cuts if node >= cut)


def straighten_step(multiset, conflict, K, L):
    """
    Apply SL, SR or SB to one conflict.

    Returns (new multiset, K', L', step) where the step records the rule,
    the inserted nodes and how many (inserted node, arc) pairs have the node
    strictly under the arc.
    """
    K, L = NodeSet(K), NodeSet(L)
    if conflict.kind is ConflictKind.CN:
        raise PreconditionError("straightening applies to CL, CR and CB conflicts only")
    if not multiset.nodes().issubset(K.union(L)):
        raise PreconditionError("multiset support is not inside K and L")
    first, second = conflict.arcs
    for occ, arc in zip(conflict.occurrences, conflict.arcs):
        if occ >= len(multiset) or multiset.arcs[occ] != arc:
            raise PreconditionError(f"conflict {conflict.to_text()} does not belong to this multiset")

    if conflict.kind is ConflictKind.CL:
        i, l, k = first.left, first.right, second.right
        cuts = (i + 1,)
        inserted = (i + 1,)
        replaced = [Arc(i, l + 1, first.label), Arc(i + 1, k + 1, 1)]
        rule = "SL"
    elif conflict.kind is ConflictKind.CR:
        i, j, k = first.left, second.left, first.right
        cuts = (k,)
        inserted = (k,)
        replaced = [Arc(i, k + 1, first.label), Arc(j, k, 1)]
        rule = "SR"
    else:
        i, k = first.left, first.right
        cuts = (i + 1, k)
        inserted = (i + 1, k + 1)
        total = (first.label + second.label) % multiset.q
        if total == 0:
            replaced = [Arc(i, k + 1, 1), Arc(i + 1, k + 2, 1)]
        else:
            replaced = [Arc(i, k + 2, total), Arc(i + 1, k + 1, 1)]
        rule = "SB"

    rest = [arc for occ, arc in enumerate(multiset.arcs) if occ not in conflict.occurrences]
    moved = [Arc(_shift(a.left, cuts), _shift(a.right, cuts), a.label) for a in rest]
    new_arcs = tuple(sorted(moved + replaced))

    new_K = NodeSet(_shift(n, cuts) for n in K)
    new_L = NodeSet([_shift(n, cuts) for n in L] + list(inserted))
    step_r = sum(1 for n in inserted for arc in new_arcs if arc.left < n < arc.right)
    result = ArcMultiset.from_canonical(new_arcs, multiset.q, new_K.union(new_L))
    step = StraighteningStep(rule, conflict.arcs, inserted, step_r, new_K, new_L)
    logger.debug("straighten %s", step.to_text())
    return result, new_K, new_L, step


@dataclass(frozen=True)
class StraighteningResult:
    source: ArcMultiset
    K: NodeSet
    tilde_lambda: QSetPartition
    K_prime: NodeSet
    L_prime: NodeSet
    r: int
    index_map: dict
    trace: tuple

    def restricted_combination(self):
        """q^{-r} Res^{U_{K'+L'}}_{U_K'} chi^{tilde lambda}, moved back onto K."""
        ambient = self.K_prime.union(self.L_prime)
        restricted = restrict(self.tilde_lambda, self.K_prime, ambient)
        scaled = restricted.divide_exact(self.tilde_lambda.q ** self.r)
        back = {image: node for node, image in self.index_map.items()}
        return transport(scaled, back, self.K)

    def check_identity(self):
        expected = expand(self.source, self.K)
        found = self.restricted_combination()
        if expected != found:
            raise VerificationError(
                f"straightening of {{{self.source.to_text()}}} does not reproduce its expansion"
            )
        return True

    def simplified_labels(self):
        """Endpoint labels of tilde lambda read off from membership in L'."""
        L = set(self.L_prime)
        return [
            (arc,
             Endpoint.OPEN if arc.left in L else Endpoint.SOLID,
             Endpoint.OPEN if arc.right in L else Endpoint.SOLID)
            for arc in self.tilde_lambda.arcs
        ]

    def trace_text(self):
        return "\n".join(step.to_text() for step in self.trace)

    def to_dict(self):
        return {
            "tilde_lambda": self.tilde_lambda.to_text(),
            "K_prime": self.K_prime.to_text(),
            "L_prime": self.L_prime.to_text(),
            "r": self.r,
            "index_map": {str(k): v for k, v in sorted(self.index_map.items())},
            "trace": [step.to_text() for step in self.trace],
        }


def straighten(multiset, K, priority=DEFAULT_PRIORITY):
    """Straighten every CL/CR/CB conflict, first conflict first."""
    K = NodeSet(K)
    if not multiset.nodes().issubset(K):
        raise PreconditionError(f"{{{multiset.to_text()}}} is not supported on K = {{{K.to_text()}}}")

    current = multiset.with_support(K)
    K_now, L_now = K, NodeSet()
    index_map = {node: node for node in K}
    trace = []
    r = 0
    while True:
        conflict = select_conflict(current.arcs, priority)
        if conflict is None:
            break
        before = tuple(K_now)
        current, K_now, L_now, step = straighten_step(current, conflict, K_now, L_now)
        moved = dict(zip(before, K_now))
        index_map = {node: moved[image] for node, image in index_map.items()}
        r += step.r
        trace.append(step)

    ambient = K_now.union(L_now)
    tilde = QSetPartition(current.arcs, current.q, ambient)
    expected_r = r_exponent(tilde, K_now, ambient)
    if r != expected_r:
        raise VerificationError(f"accumulated exponent {r} differs from r = {expected_r}")
    logger.debug("straightened %s in %d steps", multiset.to_text(), len(trace))
    return StraighteningResult(multiset.with_support(K), K, tilde, K_now, L_now, r, index_map, tuple(trace))
