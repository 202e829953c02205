"""
The conflict poset on arc multisets.

A multiset sits one step below another when a single conflict has been
resolved: a shared-endpoint pair replaced by one of the options of the pair
rule (PL, PR, PB), or the arcs meeting a node outside K deleted or shrunk
into K (PN).  Moving down only ever shrinks or deletes arcs.
"""
import logging
from itertools import product
from dataclasses import dataclass
from typing import Optional

import networkx as nx

import config
from combinatorics import (
    Arc,
    ArcMultiset,
    ConflictKind,
    NodeSet,
    find_conflicts,
)
from errors import GuardExceededError, SearchBoundExceeded, VerificationError

logger = logging.getLogger(__name__)

_RULES = {ConflictKind.CL: "PL", ConflictKind.CR: "PR", ConflictKind.CB: "PB", ConflictKind.CN: "PN"}


@dataclass(frozen=True)
class PosetStep:
    parent: ArcMultiset
    child: ArcMultiset
    conflict: object
    replacement: tuple
    rule: str
    injection: Optional[tuple] = None  # PN only: (replacement arc, parent occurrence) pairs

    def to_text(self):
        return f"{{{self.parent.to_text()}}} => {{{self.child.to_text()}}} [{self.rule}, {self.conflict.to_text()}]"


def _pair_options(conflict, K, q):
    labels = range(1, q)
    first, second = conflict.arcs
    if conflict.kind is ConflictKind.CL:
        long, short = first, second
        yield (long,)
        for j in K.between(long.left, short.right):
            for c in labels:
                yield (long, Arc(j, short.right, c))
    elif conflict.kind is ConflictKind.CR:
        long, short = first, second
        yield (long,)
        for k in K.between(short.left, long.right):
            for c in labels:
                yield (long, Arc(short.left, k, c))
    else:
        i, l = first.left, first.right
        inner = K.between(i, l)
        total = (first.label + second.label) % q
        if total == 0:
            yield ()
            for k in inner:
                for c in labels:
                    yield (Arc(i, k, c),)
            for j in inner:
                for c in labels:
                    yield (Arc(j, l, c),)
            for k in inner:
                for j in inner:
                    for c in labels:
                        for d in labels:
                            yield (Arc(i, k, c), Arc(j, l, d))
        else:
            long = Arc(i, l, total)
            yield (long,)
            for n, j in enumerate(inner):
                for k in inner[n + 1:]:
                    for c in labels:
                        yield (long, Arc(j, k, c))


def _shrink_options(arc, node, K, q):
    """Ways the arc can pass below the conflict at ``node``: gone, or pulled into K."""
    options = [None]
    if arc.left == node:
        options.extend(Arc(k, arc.right, c) for k in K.between(node, arc.right) for c in range(1, q))
    else:
        options.extend(Arc(arc.left, k, c) for k in K.between(arc.left, node) for c in range(1, q))
    return options


def _node_options(conflict, K, q):
    per_arc = [_shrink_options(arc, conflict.node, K, q) for arc in conflict.arcs]
    for choice in product(*per_arc):
        replacement = tuple(arc for arc in choice if arc is not None)
        injection = tuple(
            (arc, occ) for arc, occ in zip(choice, conflict.occurrences) if arc is not None
        )
        yield replacement, injection


def admits_shrinking_injection(lower, upper):
    """Is there an injection lower -> upper sending j-b-k to some i-a-l with i <= j < k <= l?"""
    if len(lower) > len(upper):
        return False
    if not lower.arcs:
        return True
    G = nx.Graph()
    lower_nodes = [("lower", n) for n in range(len(lower))]
    G.add_nodes_from(lower_nodes, bipartite=0)
    G.add_nodes_from((("upper", n) for n in range(len(upper))), bipartite=1)
    for n, small in enumerate(lower.arcs):
        for m, big in enumerate(upper.arcs):
            if big.left <= small.left and small.right <= big.right:
                G.add_edge(("lower", n), ("upper", m))
    matching = nx.bipartite.hopcroft_karp_matching(G, top_nodes=lower_nodes)
    return all(node in matching for node in lower_nodes)


def one_step_descents(multiset, K, guard=None):
    """Every child one conflict resolution below ``multiset``, with its witness."""
    K = NodeSet(K)
    guard = config.POSET_GUARD if guard is None else guard
    q = multiset.q
    steps = []
    for conflict in find_conflicts(multiset, K):
        rest = tuple(arc for occ, arc in enumerate(multiset.arcs) if occ not in conflict.occurrences)
        rule = _RULES[conflict.kind]
        if conflict.kind is ConflictKind.CN:
            options = _node_options(conflict, K, q)
        else:
            options = ((replacement, None) for replacement in _pair_options(conflict, K, q))
        for replacement, injection in options:
            child = ArcMultiset.from_canonical(tuple(sorted(rest + replacement)), q, multiset.support)
            if config.CHECK_INVARIANTS and not admits_shrinking_injection(child, multiset):
                raise VerificationError(f"{rule} step {child.to_text()} does not shrink {multiset.to_text()}")
            steps.append(PosetStep(multiset, child, conflict, replacement, rule, injection))
            if len(steps) > guard:
                raise GuardExceededError(f"more than {guard} one-step descents below {{{multiset.to_text()}}}")
    return steps


def comparable(lower, upper, K, depth):
    """
    Is ``lower`` at most ``depth`` resolutions below ``upper``?

    Returns False once every branch has been exhausted or pruned; raises
    SearchBoundExceeded when the depth runs out with branches still open.
    """
    if lower.q != upper.q:
        return False
    if lower.arcs == upper.arcs:
        return True
    if not admits_shrinking_injection(lower, upper):
        return False

    K = NodeSet(K)
    frontier = [upper]
    seen = {upper.arcs}
    for level in range(depth):
        following = []
        for node in frontier:
            for step in one_step_descents(node, K):
                key = step.child.arcs
                if key in seen:
                    continue
                seen.add(key)
                if key == lower.arcs:
                    logger.debug("comparable at depth %d", level + 1)
                    return True
                if admits_shrinking_injection(lower, step.child):
                    following.append(step.child)
        frontier = following
        if not frontier:
            return False

    if any(find_conflicts(node, K) for node in frontier):
        raise SearchBoundExceeded(f"depth {depth} exhausted with {len(frontier)} open branches")
    return False


@dataclass(frozen=True)
class DownSet:
    levels: tuple  # number of new multisets first reached at each depth
    members: tuple
    complete: bool

    def to_dict(self):
        return {"levels": list(self.levels), "complete": self.complete,
                "members": [m.to_text() for m in self.members]}


def down_set(multiset, K, depth):
    """All multisets within ``depth`` resolutions below ``multiset``."""
    K = NodeSet(K)
    frontier = [multiset]
    seen = {multiset.arcs: multiset}
    levels = [1]
    for _ in range(depth):
        following = []
        for node in frontier:
            for step in one_step_descents(node, K):
                if step.child.arcs not in seen:
                    seen[step.child.arcs] = step.child
                    following.append(step.child)
        if not following:
            break
        levels.append(len(following))
        frontier = following
    complete = not any(find_conflicts(node, K) for node in frontier) or len(levels) <= depth
    return DownSet(tuple(levels), tuple(seen.values()), complete)
