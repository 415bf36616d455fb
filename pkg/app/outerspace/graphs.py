"""
    Marked metric graphs: points of Outer space.

    Edge i has the darts i + 1 (tail to head) and -(i + 1) (head to tail), so
    edge paths are integer sequences and tightening is free reduction.
    The marking lists, for each rose petal, a closed dart path at the base vertex.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Iterator, Optional, Sequence

import networkx as nx

from app.datamanager.exception_classes import (
    DomainError, InvalidRankError, NonEmbeddedLoopError, RankMismatchError, VolumeError, TrivialClassError
)
from app.freegroup.whitehead import MIN_RANK, is_basis
from app.freegroup.words import (
    Automorphism, CyclicWord, Word, canonical_cycle, cyclic_core, invert_letters, reduce_letters
)
from app.schemas.pydantic_models import GraphDiagnostics, Violation

logger = logging.getLogger(__name__)

Dart = int
Number = Fraction | int | float | str


def as_fraction(value: Number) -> Fraction:
    """ Exact rational for ints, Fractions and decimal strings; floats go through their repr. """
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: Fraction


@dataclass(frozen=True)
class GraphLoop:
    """ Immersed loop as a cyclic dart path, stored in canonical rotation (orientation forgotten). """
    darts: tuple[Dart, ...]
    kind: str = field(default="loop", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "darts", canonical_cycle(self.darts))

    def __len__(self) -> int:
        return len(self.darts)

    def crossings(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for d in self.darts:
            counts[abs(d) - 1] = counts.get(abs(d) - 1, 0) + 1
        return counts


@dataclass(frozen=True)
class MarkedMetricGraph:
    rank: int
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    base: str
    marking: tuple[tuple[Dart, ...], ...]
    label: Optional[str] = field(default=None, compare=False)
    # Lazily supplies the marking inverse when it is known from a parent graph.
    inverse_hint: Optional[Callable[[], Automorphism]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "marking", tuple(reduce_letters(path) for path in self.marking))

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.rank, self.vertices, self.edges, self.base, self.marking))

    # -----   combinatorics   -----

    def origin(self, d: Dart) -> str:
        edge = self.edges[abs(d) - 1]
        return edge.tail if d > 0 else edge.head

    def terminus(self, d: Dart) -> str:
        edge = self.edges[abs(d) - 1]
        return edge.head if d > 0 else edge.tail

    def dart_length(self, d: Dart) -> Fraction:
        return self.edges[abs(d) - 1].length

    def path_length(self, darts: Sequence[Dart]) -> Fraction:
        return sum((self.dart_length(d) for d in darts), Fraction(0))

    @cached_property
    def volume(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    @cached_property
    def outgoing(self) -> dict[str, tuple[Dart, ...]]:
        """ Darts leaving each vertex, in dart order. """
        table: dict[str, list[Dart]] = {v: [] for v in self.vertices}
        for i, _ in enumerate(self.edges):
            for d in (i + 1, -(i + 1)):
                table[self.origin(d)].append(d)
        return {v: tuple(ds) for v, ds in table.items()}

    def degree(self, v: str) -> int:
        return len(self.outgoing[v])

    @cached_property
    def multigraph(self) -> nx.MultiGraph:
        mg = nx.MultiGraph()
        mg.add_nodes_from(self.vertices)
        for i, e in enumerate(self.edges):
            mg.add_edge(e.tail, e.head, key=i)
        return mg

    @cached_property
    def betti_number(self) -> int:
        components = nx.number_connected_components(self.multigraph) if self.vertices else 0
        return len(self.edges) - len(self.vertices) + components

    @cached_property
    def _tree(self) -> tuple[frozenset[int], dict[str, tuple[Dart, ...]]]:
        """ Spanning tree edge set and the tree path from the base to every vertex. """
        tree_edges = frozenset(
            key for _, _, key in nx.minimum_spanning_edges(self.multigraph, algorithm="kruskal", keys=True, data=False)
        )
        paths: dict[str, tuple[Dart, ...]] = {self.base: ()}
        frontier = [self.base]
        while frontier:
            v = frontier.pop()
            for d in self.outgoing[v]:
                w = self.terminus(d)
                if abs(d) - 1 in tree_edges and w not in paths:
                    paths[w] = paths[v] + (d,)
                    frontier.append(w)
        return tree_edges, paths

    @cached_property
    def cotree(self) -> dict[int, int]:
        """ Non-tree edge index -> basis letter index of the graph's fundamental group. """
        tree_edges, _ = self._tree
        return {i: j for j, i in enumerate(k for k in range(len(self.edges)) if k not in tree_edges)}

    def dart_word(self, darts: Sequence[Dart]) -> tuple[int, ...]:
        """ Closed dart path as a word in the cotree basis (tree edges are invisible). """
        cotree = self.cotree
        out = []
        for d in darts:
            j = cotree.get(abs(d) - 1)
            if j is not None:
                out.append(j + 1 if d > 0 else -(j + 1))
        return reduce_letters(out)

    @cached_property
    def marking_automorphism(self) -> Automorphism:
        """ Generator x_i -> its marking loop in the cotree basis. """
        return Automorphism(tuple(Word(self.dart_word(path)) for path in self.marking))

    @cached_property
    def marking_inverse(self) -> Automorphism:
        """ Cotree basis -> free group words; pulls graph loops back to conjugacy classes. """
        if self.inverse_hint is not None:
            return self.inverse_hint()
        return self.marking_automorphism.inverse()

    def loop_class(self, darts: Sequence[Dart]) -> CyclicWord:
        return CyclicWord(self.marking_inverse.apply_letters(self.dart_word(darts)))

    def lengths(self) -> tuple[Fraction, ...]:
        return tuple(e.length for e in self.edges)

    def with_lengths(self, lengths: Sequence[Fraction], label: Optional[str] = None) -> "MarkedMetricGraph":
        """ Same marked graph with new edge lengths (marking and its inverse are shared). """
        edges = tuple(Edge(e.id, e.tail, e.head, as_fraction(x)) for e, x in zip(self.edges, lengths))
        return MarkedMetricGraph(
            self.rank, self.vertices, edges, self.base, self.marking,
            label=label, inverse_hint=lambda: self.marking_inverse,
        )


# -----   LOOPS   -----

def _marking_darts(G: MarkedMetricGraph, letters: Sequence[int]) -> Iterator[Dart]:
    for x in letters:
        path = G.marking[abs(x) - 1]
        yield from (path if x > 0 else invert_letters(path))


def immerse(alpha: CyclicWord | Word, G: MarkedMetricGraph) -> GraphLoop:
    """
    Unique immersed loop of the class α in G.
    :param alpha: nontrivial class (a Word is cyclically reduced first)
    :param G: marked metric graph
    :return: GraphLoop
    """
    if isinstance(alpha, Word):
        if alpha.is_trivial():
            raise TrivialClassError(str(alpha))
        alpha = CyclicWord(alpha.letters)
    if alpha.support_rank() > G.rank:
        raise RankMismatchError(G.rank, alpha.support_rank(), f"class '{alpha}'")
    return GraphLoop(cyclic_core(reduce_letters(_marking_darts(G, alpha.letters))))


@lru_cache(maxsize=65536)
def loop_length(alpha: CyclicWord, G: MarkedMetricGraph) -> Fraction:
    """ ℓ(α|G): total length of the immersed loop, edges counted with multiplicity. """
    return G.path_length(immerse(alpha, G).darts)


def is_embedded(G: MarkedMetricGraph, loop: GraphLoop) -> bool:
    """ Embedded circle: no vertex visited twice. """
    visited = [G.origin(d) for d in loop.darts]
    return len(set(visited)) == len(visited)


def embedded_circles(G: MarkedMetricGraph) -> tuple[GraphLoop, ...]:
    """ All embedded circles of G, each once up to rotation and orientation. """
    found: dict[tuple[Dart, ...], GraphLoop] = {}

    def extend(start: str, path: list[Dart], visited: set[str]) -> None:
        v = G.terminus(path[-1])
        if v == start:
            found.setdefault(GraphLoop(tuple(path)).darts, GraphLoop(tuple(path), kind="embedded circle"))
            return
        if v in visited:
            return
        for d in G.outgoing[v]:
            if d != -path[-1]:
                visited.add(v)
                path.append(d)
                extend(start, path, visited)
                path.pop()
                visited.discard(v)

    for v in G.vertices:
        for d in G.outgoing[v]:
            extend(v, [d], {v})
    return tuple(sorted(found.values(), key=lambda loop: (len(loop), loop.darts)))


def embedded_loops(G: MarkedMetricGraph, max_length: Number) -> list[tuple[GraphLoop, CyclicWord, Fraction]]:
    """ Embedded circles of length <= max_length with their classes, shortest first. """
    bound = as_fraction(max_length)
    loops = []
    for loop in embedded_circles(G):
        length = G.path_length(loop.darts)
        if length <= bound:
            loops.append((loop, G.loop_class(loop.darts), length))
    return sorted(loops, key=lambda item: (item[2], item[1].sort_key()))


def closed_walks(G: MarkedMetricGraph, max_length: Optional[Fraction] = None,
                 max_crossings: Optional[int] = None, cap: Optional[int] = None) -> tuple[list[GraphLoop], int, bool]:
    """
    Non-backtracking cyclic dart paths, each once up to rotation and orientation.
    :param max_length: metric length budget
    :param max_crossings: crossings allowed per edge
    :param cap: maximum number of partial paths explored
    :return: (loops, explored, truncated)
    """
    if max_length is None and max_crossings is None:
        raise DomainError("max_length", max_length, "closed_walks needs a length budget or a crossing bound")
    found: dict[tuple[Dart, ...], GraphLoop] = {}
    counts = [0] * len(G.edges)
    explored = 0
    truncated = False

    def extend(start: str, path: list[Dart], length: Fraction) -> None:
        nonlocal explored, truncated
        explored += 1
        if cap is not None and explored > cap:
            truncated = True
            return
        last = path[-1]
        if G.terminus(last) == start and last != -path[0]:
            loop = GraphLoop(tuple(path))
            found.setdefault(loop.darts, loop)
        for d in G.outgoing[G.terminus(last)]:
            if truncated:
                return
            if d == -last:
                continue
            i = abs(d) - 1
            if max_crossings is not None and counts[i] >= max_crossings:
                continue
            new_length = length + G.edges[i].length
            if max_length is not None and new_length > max_length:
                continue
            counts[i] += 1
            path.append(d)
            extend(start, path, new_length)
            path.pop()
            counts[i] -= 1

    for v in G.vertices:
        for d in G.outgoing[v]:
            i = abs(d) - 1
            if max_length is not None and G.edges[i].length > max_length:
                continue
            counts[i] += 1
            extend(v, [d], G.edges[i].length)
            counts[i] -= 1
            if truncated:
                logger.warning("Closed-walk search truncated at cap %s", cap)
                return list(found.values()), explored, True
    return list(found.values()), explored, truncated


def systole(G: MarkedMetricGraph) -> Fraction:
    """ Shortest loop length; the shortest immersed loop is an embedded circle. """
    return min(G.path_length(loop.darts) for loop in embedded_circles(G))


def is_thick(G: MarkedMetricGraph, epsilon: Number) -> bool:
    return systole(G) >= as_fraction(epsilon)


# -----   VALIDATION   -----

def validate(G: MarkedMetricGraph) -> GraphDiagnostics:
    """
    Checks core, volume and marking invariants and reports every violation.
    :param G: graph to check
    :return: GraphDiagnostics, never raises for an invalid graph
    """
    violations: list[Violation] = []
    if G.rank < MIN_RANK:
        violations.append(Violation(code="rank", message=f"rank {G.rank} is below {MIN_RANK}"))
    for i, e in enumerate(G.edges):
        if e.length <= 0:
            violations.append(Violation(code="length", message=f"edge '{e.id}' (#{i}) has non-positive length {e.length}"))
    if G.volume != 1:
        violations.append(Violation(code="volume", message=f"volume is {G.volume}, expected 1"))
    for v in G.vertices:
        if G.degree(v) < 2:
            violations.append(Violation(code="core", message=f"vertex '{v}' has degree {G.degree(v)}"))
    connected = bool(G.vertices) and nx.is_connected(G.multigraph)
    if not connected:
        violations.append(Violation(code="connected", message="graph is not connected"))
    if G.betti_number != G.rank:
        violations.append(Violation(code="betti", message=f"first Betti number is {G.betti_number}, expected {G.rank}"))
    if len(G.marking) != G.rank:
        violations.append(Violation(code="marking", message=f"{len(G.marking)} marking loops for rank {G.rank}"))

    paths_ok = True
    for i, path in enumerate(G.marking):
        if not path:
            violations.append(Violation(code="marking", message=f"marking loop {i} is trivial"))
            paths_ok = False
            continue
        ends = [G.origin(path[0])] + [G.terminus(d) for d in path]
        joined = all(G.terminus(a) == G.origin(b) for a, b in zip(path, path[1:]))
        if not joined or ends[0] != G.base or ends[-1] != G.base:
            violations.append(Violation(code="marking", message=f"marking loop {i} is not a closed path at base '{G.base}'"))
            paths_ok = False

    if connected and paths_ok and G.betti_number == G.rank == len(G.marking) and G.rank >= MIN_RANK:
        if not is_basis(G.marking_automorphism.images):
            violations.append(Violation(code="marking", message="marking loops do not form a free basis"))
    return GraphDiagnostics(valid=not violations, violations=violations)


# -----   ACTION AND RESCALING   -----

def act(phi: Automorphism, G: MarkedMetricGraph) -> MarkedMetricGraph:
    """
    Right action: petal i of the new marking is the old marking's image of φ(x_i),
    so ℓ(α | act(φ, G)) = ℓ(φ(α) | G).
    """
    if phi.rank != G.rank:
        raise RankMismatchError(G.rank, phi.rank, "automorphism")
    marking = tuple(reduce_letters(_marking_darts(G, image.letters)) for image in phi.images)
    return MarkedMetricGraph(
        G.rank, G.vertices, G.edges, G.base, marking,
        label=G.label, inverse_hint=lambda: phi.inverse().compose(G.marking_inverse),
    )


def rescale_loop(G: MarkedMetricGraph, loop: GraphLoop, factor: Fraction) -> MarkedMetricGraph:
    """ Edges of an embedded loop scaled by `factor`, the rest share the remaining volume. """
    inside = {abs(d) - 1 for d in loop.darts}
    ell = G.path_length(loop.darts)
    if ell >= 1:
        raise VolumeError("the loop has length 1: it is the whole graph and cannot be rescaled")
    rest = (1 - factor * ell) / (1 - ell)
    if rest <= 0:
        raise VolumeError(f"scaling by {factor} exhausts the volume (loop length {ell})")
    lengths = [e.length * (factor if i in inside else rest) for i, e in enumerate(G.edges)]
    return G.with_lengths(lengths, label=G.label)


def embedded_loop_of(alpha: CyclicWord, G: MarkedMetricGraph) -> GraphLoop:
    loop = immerse(alpha, G)
    if not is_embedded(G, loop):
        raise NonEmbeddedLoopError(str(alpha))
    return loop


def pinch_loop(G: MarkedMetricGraph, alpha: CyclicWord, sigma: Number) -> MarkedMetricGraph:
    """
    H_σ: the embedded loop of α scaled by σ, other edges by (1 - σℓ)/(1 - ℓ).
    :param sigma: in (0, 1]
    :return: volume-1 graph with ℓ(α|H_σ) = σ·ℓ(α|G)
    """
    sigma = as_fraction(sigma)
    if not 0 < sigma <= 1:
        raise DomainError("sigma", sigma, "must lie in (0, 1]")
    return rescale_loop(G, embedded_loop_of(alpha, G), sigma)


def pinch_distance_bound(ell: Fraction, sigma: Fraction) -> Fraction:
    """ Upper bound exp(d(G, H_σ)) = (1 - σℓ)/(1 - ℓ). """
    return (1 - sigma * ell) / (1 - ell)


# -----   FAMILIES   -----

def _check_rank(rank: int) -> None:
    if rank < MIN_RANK:
        raise InvalidRankError(rank, MIN_RANK)


def _unit_volume(lengths: Sequence[Number]) -> tuple[Fraction, ...]:
    exact = tuple(as_fraction(x) for x in lengths)
    if any(x <= 0 for x in exact):
        raise VolumeError(f"edge lengths must be positive, got {[str(x) for x in exact]}")
    if sum(exact) != 1:
        raise VolumeError(f"edge lengths sum to {sum(exact)}, expected 1 (normalize first)")
    return exact


def _build(rank, vertices, ends, lengths, marking, label) -> MarkedMetricGraph:
    edges = tuple(Edge(f"e{i + 1}", tail, head, x) for i, ((tail, head), x) in enumerate(zip(ends, lengths)))
    return MarkedMetricGraph(rank, tuple(vertices), edges, vertices[0], tuple(marking), label=label)


def rose(lengths: Sequence[Number], label: Optional[str] = "rose") -> MarkedMetricGraph:
    """ One-vertex graph, petal i marked by generator i. """
    lengths = _unit_volume(lengths)
    _check_rank(len(lengths))
    r = len(lengths)
    return _build(r, ["o"], [("o", "o")] * r, lengths, [(i + 1,) for i in range(r)], label)


def uniform_rose(rank: int = 3) -> MarkedMetricGraph:
    return rose([Fraction(1, rank)] * rank, label="uniform rose")


def theta(lengths: Sequence[Number], label: Optional[str] = "theta") -> MarkedMetricGraph:
    """ r + 1 parallel edges u -> v; petal i is e_i followed by e_(i+1) reversed. """
    lengths = _unit_volume(lengths)
    r = len(lengths) - 1
    _check_rank(r)
    marking = [(i + 1, -(i + 2)) for i in range(r)]
    return _build(r, ["u", "v"], [("u", "v")] * (r + 1), lengths, marking, label)


def theta_plus_loop(lengths: Sequence[Number], label: Optional[str] = "theta plus loop") -> MarkedMetricGraph:
    """ r parallel edges u -> v and a loop at u (the last length). """
    lengths = _unit_volume(lengths)
    r = len(lengths) - 1
    _check_rank(r)
    marking = [(i + 1, -(i + 2)) for i in range(r - 1)] + [(r + 1,)]
    ends = [("u", "v")] * r + [("u", "u")]
    return _build(r, ["u", "v"], ends, lengths, marking, label)


def subdivided_rose(lengths: Sequence[Number], label: Optional[str] = "subdivided rose") -> MarkedMetricGraph:
    """ Rose whose first petal is split in two edges o -> w -> o (first two lengths). """
    lengths = _unit_volume(lengths)
    r = len(lengths) - 1
    _check_rank(r)
    ends = [("o", "w"), ("w", "o")] + [("o", "o")] * (r - 1)
    marking = [(1, 2)] + [(i + 3,) for i in range(r - 1)]
    return _build(r, ["o", "w"], ends, lengths, marking, label)


def barbell(lengths: Sequence[Number], label: Optional[str] = "barbell") -> MarkedMetricGraph:
    """
    Rank 3: a loop at u and two loops at v, joined by a separating bridge u -> v.
    Lengths are (loop u, first loop v, second loop v, bridge); b and c go across the bridge.
    """
    lengths = _unit_volume(lengths)
    if len(lengths) != 4:
        raise InvalidRankError(len(lengths) - 1, MIN_RANK)
    ends = [("u", "u"), ("v", "v"), ("v", "v"), ("u", "v")]
    marking = [(1,), (4, 2, -4), (4, 3, -4)]
    return _build(3, ["u", "v"], ends, lengths, marking, label)


def one_petal_family(rank: int, sigma: Number, index: int = 0) -> MarkedMetricGraph:
    """ Rose with petal `index` of length σ and the others sharing 1 - σ equally. """
    _check_rank(rank)
    sigma = as_fraction(sigma)
    if not 0 < sigma < 1:
        raise DomainError("sigma", sigma, "must lie in (0, 1)")
    lengths = [(1 - sigma) / (rank - 1)] * rank
    lengths[index] = sigma
    return rose(lengths, label=f"one-petal rose sigma={sigma}")


def two_petal_family(rank: int, sigma: Number, delta: Number, first: int = 0, second: int = 1) -> MarkedMetricGraph:
    """ Rose with petals σδ and (1 - σ)δ at `first` and `second`, the others (1 - δ)/(r - 2). """
    _check_rank(rank)
    sigma, delta = as_fraction(sigma), as_fraction(delta)
    for name, value in (("sigma", sigma), ("delta", delta)):
        if not 0 < value < 1:
            raise DomainError(name, value, "must lie in (0, 1)")
    lengths = [(1 - delta) / (rank - 2)] * rank
    lengths[first] = sigma * delta
    lengths[second] = (1 - sigma) * delta
    return rose(lengths, label=f"two-petal rose sigma={sigma} delta={delta}")
