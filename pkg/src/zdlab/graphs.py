"""Undirected graphs: generators, contact-trace ingestion, and metrics."""

from __future__ import annotations

import random
from collections import Counter, deque
from dataclasses import dataclass

from .errors import TraceParseError

TOPOLOGIES = ("star", "ring", "tree", "mesh")
DEFAULT_MESH_DENSITY = 0.49


class Graph:
    """Simple undirected graph on nodes 0..n-1, no self-loops or duplicates."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("graph needs at least one node")
        self.n = n
        self._adj = [set() for _ in range(n)]

    def add_edge(self, u: int, v: int):
        if u == v:
            raise ValueError("self-loops are not allowed")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError("node id out of range")
        self._adj[u].add(v)
        self._adj[v].add(u)

    def has_edge(self, u, v):
        return v in self._adj[u]

    def neighbors(self, u):
        return self._adj[u]

    def degree(self, u):
        return len(self._adj[u])

    @property
    def edge_count(self):
        return sum(len(a) for a in self._adj) // 2

    def edges(self):
        return sorted((u, v) for u in range(self.n) for v in self._adj[u] if u < v)

    @classmethod
    def from_edges(cls, n, edges):
        g = cls(n)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(f"V {self.n}\n")
            for u, v in self.edges():
                fh.write(f"{u} {v}\n")

    @classmethod
    def read(cls, path):
        g = None
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if g is None:
                    if len(parts) != 2 or parts[0] != "V":
                        raise ValueError(
                            f"{path}:{lineno}: expected header 'V <count>'"
                        )
                    g = cls(int(parts[1]))
                    continue
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'u v'")
                g.add_edge(int(parts[0]), int(parts[1]))
        if g is None:
            raise ValueError(f"{path}: empty graph file")
        return g


def generate(topology: str, n: int, seed: int = 0,
             mesh_density: float | None = None) -> Graph:
    """Deterministic topology generators used in the experiments."""
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}")
    if topology == "ring":
        if n < 3:
            raise ValueError("a ring needs at least three nodes")
    elif n < 2:
        raise ValueError(f"a {topology} needs at least two nodes")

    g = Graph(n)
    if topology == "star":
        for leaf in range(1, n):
            g.add_edge(0, leaf)
    elif topology == "ring":
        for u in range(n):
            g.add_edge(u, (u + 1) % n)
    elif topology == "tree":
        # complete binary tree filled level by level
        for child in range(1, n):
            g.add_edge(child, (child - 1) // 2)
    else:
        density = DEFAULT_MESH_DENSITY if mesh_density is None else mesh_density
        if not 0.0 < density <= 1.0:
            raise ValueError("mesh density must lie in (0, 1]")
        rng = random.Random(seed)
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < density:
                    g.add_edge(u, v)
        # min-degree-2 repair
        for u in range(n):
            while g.degree(u) < 2:
                candidates = [v for v in range(n)
                              if v != u and not g.has_edge(u, v)]
                g.add_edge(u, rng.choice(candidates))
    return g


@dataclass(frozen=True)
class TraceRecord:
    """One observed contact between two externally-labelled nodes."""

    node_a: str
    node_b: str
    start: float | None = None
    end: float | None = None

    def __post_init__(self):
        if self.node_a == self.node_b:
            raise ValueError("contact endpoints must differ")


def parse_trace(lines) -> list[TraceRecord]:
    """Parse delimited contact records: ``a b [start end]`` per line,
    comma or whitespace separated, '#' comments ignored."""
    records = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        if len(parts) not in (2, 3, 4):
            raise TraceParseError(
                f"line {lineno}: expected 2-4 fields, got {len(parts)}", lineno
            )
        start = end = None
        try:
            if len(parts) >= 3:
                start = float(parts[2])
            if len(parts) == 4:
                end = float(parts[3])
            record = TraceRecord(parts[0], parts[1], start, end)
        except ValueError as exc:
            raise TraceParseError(f"line {lineno}: {exc}", lineno) from exc
        records.append(record)
    return records


def parse_trace_file(path) -> list[TraceRecord]:
    with open(path) as fh:
        return parse_trace(fh)


def ingest_trace(records, min_contacts: int = 1) -> Graph:
    """Contact graph from trace records; an edge needs at least
    ``min_contacts`` observed contacts. Labels are relabelled densely in
    first-appearance order."""
    if min_contacts < 1:
        raise ValueError("min_contacts must be at least 1")
    ids: dict[str, int] = {}
    counts: Counter = Counter()
    for rec in records:
        for label in (rec.node_a, rec.node_b):
            if label not in ids:
                ids[label] = len(ids)
        a, b = ids[rec.node_a], ids[rec.node_b]
        counts[(min(a, b), max(a, b))] += 1
    if not ids:
        raise ValueError("trace contains no records")
    g = Graph(len(ids))
    for (a, b), c in counts.items():
        if c >= min_contacts:
            g.add_edge(a, b)
    return g


@dataclass(frozen=True)
class DegreeStats:
    degrees: tuple
    mean: float


def degree_stats(g: Graph) -> DegreeStats:
    degrees = tuple(g.degree(u) for u in range(g.n))
    return DegreeStats(degrees, sum(degrees) / g.n)


def betweenness(g: Graph) -> list[float]:
    """Shortest-path betweenness per node (Brandes), unnormalized, with
    fractional credit on ties; each unordered pair counted once."""
    scores = [0.0] * g.n
    for source in range(g.n):
        stack = []
        preds = [[] for _ in range(g.n)]
        sigma = [0] * g.n
        sigma[source] = 1
        dist = [-1] * g.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in g.neighbors(v):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * g.n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != source:
                scores[w] += delta[w]
    return [s / 2.0 for s in scores]
