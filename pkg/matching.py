"""
Labeled arc diagrams and the bipartite graph Gamma_K.

An arc multiset is "perturbed" so that arcs sharing an endpoint are stacked
on top of one another; an endpoint is solid when it lies in K and is the top
of its stack, and open otherwise.  Fully solid occurrences must each be
matched to a distinct fully open occurrence nesting over them.  A covering
matching certifies a nonzero coefficient; a Hall violator certifies zero.
"""
import logging
from enum import Enum
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from combinatorics import (
    Arc,
    NodeSet,
    conjugate,
    multiset_union,
    is_set_partition,
)
from errors import ParseError, PreconditionError

logger = logging.getLogger(__name__)


class Endpoint(Enum):
    SOLID = "•"
    OPEN = "∘"


@dataclass(frozen=True)
class LabeledOccurrence:
    occurrence: int
    arc: Arc
    left_label: Endpoint
    right_label: Endpoint
    left_height: int
    right_height: int

    @property
    def labels(self):
        return self.left_label, self.right_label

    @property
    def is_solid(self):
        return self.labels == (Endpoint.SOLID, Endpoint.SOLID)

    @property
    def is_open(self):
        return self.labels == (Endpoint.OPEN, Endpoint.OPEN)

    @property
    def is_mixed(self):
        return self.left_label is not self.right_label

    def to_text(self):
        return f"{self.arc.to_text()}@{self.occurrence}({self.left_label.value},{self.right_label.value})"


def _parallel_orders(multiset):
    """
    Stacking order inside every group of parallel occurrences (bottom first).

    Groups of nonzero weight stack in label order at both ends.  In a group of
    weight 0 the top two cross: the second-highest label is on top at the left
    end and the highest label is on top at the right end.
    """
    groups = {}
    for occ, arc in enumerate(multiset.arcs):
        groups.setdefault((arc.left, arc.right), []).append(occ)

    left_rank, right_rank = {}, {}
    for occs in groups.values():
        weight = sum(multiset.arcs[occ].label for occ in occs) % multiset.q
        right_order = occs
        if weight == 0 and len(occs) >= 2:
            left_order = occs[:-2] + [occs[-1], occs[-2]]
        else:
            left_order = occs
        left_rank.update((occ, n) for n, occ in enumerate(left_order))
        right_rank.update((occ, n) for n, occ in enumerate(right_order))
    return left_rank, right_rank


def perturb_labels(multiset, K):
    """Solid/open endpoint labels of every occurrence, in occurrence order."""
    K = set(NodeSet(K))
    arcs = multiset.arcs
    left_rank, right_rank = _parallel_orders(multiset)

    left_stacks, right_stacks = {}, {}
    for occ, arc in enumerate(arcs):
        left_stacks.setdefault(arc.left, []).append(occ)
        right_stacks.setdefault(arc.right, []).append(occ)

    left_height, right_height, left_top, right_top = {}, {}, {}, {}
    for node, occs in left_stacks.items():
        # longer arcs sit higher
        ordered = sorted(occs, key=lambda o: (arcs[o].right, left_rank[o]))
        left_height.update((occ, h) for h, occ in enumerate(ordered))
        left_top[node] = ordered[-1]
    for node, occs in right_stacks.items():
        # arcs from further left sit higher
        ordered = sorted(occs, key=lambda o: (-arcs[o].left, right_rank[o]))
        right_height.update((occ, h) for h, occ in enumerate(ordered))
        right_top[node] = ordered[-1]

    labeled = []
    for occ, arc in enumerate(arcs):
        left = Endpoint.SOLID if arc.left in K and left_top[arc.left] == occ else Endpoint.OPEN
        right = Endpoint.SOLID if arc.right in K and right_top[arc.right] == occ else Endpoint.OPEN
        labeled.append(LabeledOccurrence(occ, arc, left, right, left_height[occ], right_height[occ]))
    return labeled


@dataclass(frozen=True)
class MatchingGraph:
    solid_vertices: tuple
    open_vertices: tuple
    edges: tuple  # (open occurrence, solid occurrence)

    def neighbors(self, solid_occurrence):
        return tuple(o for o, s in self.edges if s == solid_occurrence)

    @staticmethod
    def _vertex_text(vertex):
        occ, arc = vertex
        return f"{arc.to_text()}@{occ}"

    def to_dict(self):
        solid = dict(self.solid_vertices)
        opened = dict(self.open_vertices)
        return {
            "solid": [self._vertex_text(v) for v in self.solid_vertices],
            "open": [self._vertex_text(v) for v in self.open_vertices],
            "edges": [[self._vertex_text((o, opened[o])), self._vertex_text((s, solid[s]))]
                      for o, s in self.edges],
        }

    def to_text(self):
        data = self.to_dict()
        return "\n".join([
            "solid: " + ",".join(data["solid"]),
            "open: " + ",".join(data["open"]),
            "edges: " + ",".join(f"{o}--{s}" for o, s in data["edges"]),
        ])

    @classmethod
    def from_text(cls, text):
        sections = {}
        for line in text.strip().splitlines():
            name, _, body = line.partition(":")
            sections[name.strip()] = [chunk for chunk in body.strip().split(",") if chunk]
        try:
            solid = tuple(_parse_vertex(v) for v in sections["solid"])
            opened = tuple(_parse_vertex(v) for v in sections["open"])
            edges = []
            for pair in sections["edges"]:
                o, s = pair.split("--")
                edges.append((_parse_vertex(o)[0], _parse_vertex(s)[0]))
        except (KeyError, ValueError) as e:
            raise ParseError(f"bad graph text: {e}")
        return cls(solid, opened, tuple(edges))


def _parse_vertex(text):
    arc_text, occ = text.strip().split("@")
    left, label, right = (int(x) for x in arc_text.split("-"))
    return int(occ), Arc(left, right, label)


@dataclass(frozen=True)
class MatchingWitness:
    """A covering assignment solid -> open, or a Hall-violating set of solids."""
    assignment: Optional[dict] = None
    violator: Optional[tuple] = None
    partial: dict = field(default_factory=dict)

    @property
    def covers(self):
        return self.assignment is not None

    def verify(self, graph):
        edges = set(graph.edges)
        solids = [occ for occ, _ in graph.solid_vertices]
        if self.covers:
            targets = list(self.assignment.values())
            return (
                sorted(self.assignment) == sorted(solids)
                and len(set(targets)) == len(targets)
                and all((o, s) in edges for s, o in self.assignment.items())
            )
        if not self.violator or not set(self.violator) <= set(solids):
            return False
        reach = {o for o, s in edges if s in self.violator}
        return len(reach) < len(self.violator)

    def to_dict(self, graph):
        solid = dict(graph.solid_vertices)
        opened = dict(graph.open_vertices)
        if self.covers:
            return {"matching": {MatchingGraph._vertex_text((s, solid[s])): MatchingGraph._vertex_text((o, opened[o]))
                                 for s, o in sorted(self.assignment.items())}}
        return {"hall_violator": [MatchingGraph._vertex_text((s, solid[s])) for s in self.violator]}


def gamma_graph(multiset, K):
    labeled = perturb_labels(multiset, K)
    solid = tuple((v.occurrence, v.arc) for v in labeled if v.is_solid)
    opened = tuple((v.occurrence, v.arc) for v in labeled if v.is_open)
    edges = tuple(
        (o, s) for o, outer in opened for s, inner in solid if outer.nests(inner)
    )
    return MatchingGraph(solid, opened, edges)


def complete_matching(graph):
    """Hopcroft-Karp from the solid side; on failure a Hall violator from a Konig cover."""
    if not graph.solid_vertices:
        return MatchingWitness(assignment={})

    # integer node keys keep networkx iteration order reproducible
    solid_nodes = [2 * occ for occ, _ in graph.solid_vertices]
    open_nodes = [2 * occ + 1 for occ, _ in graph.open_vertices]
    G = nx.Graph()
    G.add_nodes_from(solid_nodes, bipartite=0)
    G.add_nodes_from(open_nodes, bipartite=1)
    G.add_edges_from((2 * s, 2 * o + 1) for o, s in graph.edges)

    matching = nx.bipartite.hopcroft_karp_matching(G, top_nodes=solid_nodes)
    assignment = {node // 2: matching[node] // 2 for node in solid_nodes if node in matching}
    if len(assignment) == len(solid_nodes):
        return MatchingWitness(assignment=assignment)

    cover = nx.bipartite.to_vertex_cover(G, matching, top_nodes=solid_nodes)
    violator = tuple(node // 2 for node in solid_nodes if node not in cover)
    logger.debug("no complete matching: %d of %d solids matched", len(assignment), len(solid_nodes))
    return MatchingWitness(violator=violator, partial=assignment)


@dataclass(frozen=True)
class Certificate:
    multiset: object
    graph: MatchingGraph
    witness: MatchingWitness

    @property
    def nonzero(self):
        return self.witness.covers

    def to_dict(self):
        data = {"nonzero": self.nonzero, "graph": self.graph.to_dict()}
        data.update(self.witness.to_dict(self.graph))
        return data


def certify(multiset, K):
    graph = gamma_graph(multiset, K)
    return Certificate(multiset, graph, complete_matching(graph))


def _check_nested(K, L):
    K, L = NodeSet(K), NodeSet(L)
    if not K.issubset(L):
        raise PreconditionError(f"K = {{{K.to_text()}}} is not a subset of L = {{{L.to_text()}}}")
    return K, L


def restriction_certificate(partition, sub, K, L):
    """Certificate for <Res chi^lambda, chi^mu> with lambda over L and mu over K."""
    K, L = _check_nested(K, L)
    if not is_set_partition(partition) or not is_set_partition(sub):
        raise PreconditionError("restriction certificates need q-set partitions")
    if not partition.nodes().issubset(L) or not sub.nodes().issubset(K):
        raise PreconditionError("partition supports do not fit inside L and K")
    combined = multiset_union(partition.with_support(L), conjugate(sub).with_support(L))
    return certify(combined, K)


def tensor_certificate(first, second, target, K):
    K = NodeSet(K)
    for factor in (first, second, target):
        if not factor.nodes().issubset(K):
            raise PreconditionError(f"{{{factor.to_text()}}} is not supported on K")
    combined = multiset_union(first.with_support(K), second.with_support(K), conjugate(target).with_support(K))
    return certify(combined, K)


def trivial_coeff_nonzero(partition, K, L):
    """Is the trivial character a constituent of Res^{U_L}_{U_K} chi^lambda?"""
    empty = type(partition)((), partition.q, ())
    return restriction_certificate(partition, empty, K, L).nonzero


def restriction_coeff_nonzero(partition, sub, K, L):
    return restriction_certificate(partition, sub, K, L).nonzero


def tensor_coeff_nonzero(first, second, target, K):
    return tensor_certificate(first, second, target, K).nonzero
