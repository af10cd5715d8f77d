"""Curation of friendship pairs whose distance is stable for a whole day.

Two bounding graphs pin the distance down.  The floor graph keeps only
persons and knows edges alive through every instant of the day; the
ceiling graph keeps everything alive at any instant of it.  Whatever the
live graph looks like at a particular millisecond of that day, it sits
between the two, so:

  * a pair at distance k in the floor AND in the ceiling is at distance
    exactly k all day (extra ceiling edges could only shorten paths, and
    they do not);
  * two floor vertices in different ceiling components can never be
    connected during the day, no matter which edges are live.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from ..errors import InsufficientPairs
from ..model import TemporalGraph
from ..simtime import MS_PER_DAY


@dataclass
class DayBoundGraphs:
    """Floor and ceiling friendship graphs for one simulation day."""

    day_start: int
    day_end: int
    floor_vertices: set[int] = field(default_factory=set)
    ceiling_vertices: set[int] = field(default_factory=set)
    floor_adj: dict[int, list[int]] = field(default_factory=dict)
    ceiling_adj: dict[int, list[int]] = field(default_factory=dict)


def _alive_some_instant(lifecycle, start: int, end: int) -> bool:
    # Half-open [creation, deletion) against half-open [start, end).
    if lifecycle.creation >= end:
        return False
    return lifecycle.deletion is None or lifecycle.deletion > start


def build_bound_graphs(graph: TemporalGraph, day_start: int) -> DayBoundGraphs:
    day_end = day_start + MS_PER_DAY
    bound = DayBoundGraphs(day_start=day_start, day_end=day_end)

    for pid, person in graph.persons.items():
        if person.lifecycle.alive_throughout(day_start, day_end):
            bound.floor_vertices.add(pid)
            bound.floor_adj[pid] = []
        if _alive_some_instant(person.lifecycle, day_start, day_end):
            bound.ceiling_vertices.add(pid)
            bound.ceiling_adj[pid] = []

    for (p1, p2), edge in graph.knows.items():
        if (p1 in bound.floor_vertices and p2 in bound.floor_vertices
                and edge.lifecycle.alive_throughout(day_start, day_end)):
            bound.floor_adj[p1].append(p2)
            bound.floor_adj[p2].append(p1)
        if (p1 in bound.ceiling_vertices and p2 in bound.ceiling_vertices
                and _alive_some_instant(edge.lifecycle, day_start, day_end)):
            bound.ceiling_adj[p1].append(p2)
            bound.ceiling_adj[p2].append(p1)

    return bound


def bfs_distances(adj: dict[int, list[int]], source: int,
                  max_depth: int | None = None) -> dict[int, int]:
    """Hop counts from source; vertices beyond max_depth are omitted."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        d = dist[node]
        if max_depth is not None and d >= max_depth:
            continue
        for peer in adj.get(node, ()):
            if peer not in dist:
                dist[peer] = d + 1
                queue.append(peer)
    return dist


def connected_components(adj: dict[int, list[int]]) -> dict[int, int]:
    """Map each vertex to a component label (the smallest id it can reach)."""
    label: dict[int, int] = {}
    for start in sorted(adj):
        if start in label:
            continue
        members = bfs_distances(adj, start)
        for node in members:
            label[node] = start
    return label


def curate_reachable_pairs(bound: DayBoundGraphs, k: int, count: int,
                           seed: int, allow_fewer: bool = False) -> list[tuple[int, int]]:
    """Distinct person pairs at hop distance exactly k all day long.

    A pair qualifies when both bounding graphs agree on distance k.  The
    search order is seeded so the same inputs yield the same pairs.
    """
    rng = random.Random(seed)
    sources = sorted(bound.floor_vertices)
    rng.shuffle(sources)

    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for source in sources:
        if len(pairs) >= count:
            break
        floor_dist = bfs_distances(bound.floor_adj, source, max_depth=k)
        targets = [v for v, d in floor_dist.items() if d == k]
        if not targets:
            continue
        ceiling_dist = bfs_distances(bound.ceiling_adj, source, max_depth=k)
        rng.shuffle(targets)
        for target in targets:
            if ceiling_dist.get(target) != k:
                continue
            pair = (source, target) if source < target else (target, source)
            if pair in seen:
                continue
            seen.add(pair)
            pairs.append(pair)
            if len(pairs) >= count:
                break

    if len(pairs) < count and not allow_fewer:
        raise InsufficientPairs(count, len(pairs),
                                f"distance-{k} pairs on day {bound.day_start}")
    return pairs


def curate_unreachable_pairs(bound: DayBoundGraphs, count: int, seed: int,
                             allow_fewer: bool = False) -> list[tuple[int, int]]:
    """Distinct person pairs that no live edge set can connect that day."""
    rng = random.Random(seed)
    label = connected_components(bound.ceiling_adj)
    by_component: dict[int, list[int]] = {}
    for vertex in bound.floor_vertices:
        by_component.setdefault(label[vertex], []).append(vertex)
    components = [sorted(vs) for _, vs in sorted(by_component.items())]

    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    if len(components) >= 2:
        attempts = 0
        # Distinct cross-component pairs; bail out once the draw space is
        # clearly exhausted.
        limit = max(200, 20 * count)
        while len(pairs) < count and attempts < limit:
            attempts += 1
            ca, cb = rng.sample(range(len(components)), 2)
            a = rng.choice(components[ca])
            b = rng.choice(components[cb])
            pair = (a, b) if a < b else (b, a)
            if pair in seen:
                continue
            seen.add(pair)
            pairs.append(pair)

    if len(pairs) < count and not allow_fewer:
        raise InsufficientPairs(count, len(pairs),
                                f"unreachable pairs on day {bound.day_start}")
    return pairs
