"""Commuting-cluster partitioning via DSatur coloring.

Vertices are Hamiltonian terms; edges join anticommuting pairs; color
classes are therefore mutually commuting clusters.  Vertices are visited
in lexicographic order of their printed labels (I < X < Y < Z), which
fixes the partition deterministically.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .pauli import PauliSum, commutes


@dataclass
class AnticommutationGraph:
    nodes: int
    adjacency: list  # adjacency[v] = sorted list of neighbors


@dataclass
class ClusterPartition:
    clusters: list  # list of term-index lists
    count: int


def build_graph(psum: PauliSum) -> AnticommutationGraph:
    if len(psum) == 0:
        raise ValueError("empty Pauli sum")
    strings = [t.string for t in psum]
    m = len(strings)
    adj = [[] for _ in range(m)]
    for u in range(m):
        for v in range(u + 1, m):
            if not commutes(strings[u], strings[v]):
                adj[u].append(v)
                adj[v].append(u)
    return AnticommutationGraph(m, adj)


def dsatur_partition(g: AnticommutationGraph, psum: PauliSum = None) -> ClusterPartition:
    """Greedy DSatur: pick max saturation, break ties by degree then by
    smallest position in the vertex order.  When the Pauli sum is given,
    vertices are ordered by string label; otherwise by index."""
    m = g.nodes
    if psum is not None:
        order = sorted(range(m), key=lambda v: psum.terms[v].string.label())
    else:
        order = list(range(m))
    rank = {v: i for i, v in enumerate(order)}
    deg = [len(a) for a in g.adjacency]
    color = [-1] * m
    satsets = [set() for _ in range(m)]
    for _ in range(m):
        best, bkey = -1, None
        for v in range(m):
            if color[v] >= 0:
                continue
            key = (len(satsets[v]), deg[v], -rank[v])
            if bkey is None or key > bkey:
                best, bkey = v, key
        used = satsets[best]
        c = 0
        while c in used:
            c += 1
        color[best] = c
        for u in g.adjacency[best]:
            satsets[u].add(c)
    ncol = max(color) + 1
    clusters = [[] for _ in range(ncol)]
    for v in order:
        clusters[color[v]].append(v)
    part = ClusterPartition(clusters, ncol)
    _check_valid(part, psum)
    return part


def _check_valid(part: ClusterPartition, psum: PauliSum = None):
    seen = set()
    for cl in part.clusters:
        for v in cl:
            if v in seen:
                raise AssertionError("vertex assigned twice")
            seen.add(v)
        if psum is not None:
            for i, u in enumerate(cl):
                for v in cl[i + 1:]:
                    if not commutes(psum.terms[u].string, psum.terms[v].string):
                        raise AssertionError("non-commuting pair inside a cluster")


def reduction_factor(part: ClusterPartition, m: int) -> Fraction:
    return Fraction(m, part.count)


def format_partition(part: ClusterPartition, psum: PauliSum) -> str:
    """Cluster listing, one line per cluster, for eyeball comparison."""
    lines = []
    for i, cl in enumerate(part.clusters):
        labels = ", ".join(psum.terms[v].string.label() for v in cl)
        lines.append(f"cluster {i}: {{ {labels} }}")
    return "\n".join(lines) + "\n"
