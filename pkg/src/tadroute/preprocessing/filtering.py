"""Dominated-connection filtering for TD-Dijkstra.

A connection ``(d1, a1)`` dominates ``(d2, a2)`` when it departs no earlier
and arrives no later, with at least one of the two strict. Exact duplicates
collapse to the one with the smallest ``(trip, pos)``.
"""
from __future__ import annotations

from dataclasses import replace
from typing import Iterable

from ..model import UNREACHABLE, Connection, DepartureBoard, Network


def filter_dominated(connections: Iterable[Connection]) -> list[Connection]:
    """Keep the non-dominated connections, sorted by departure.

    The result has strictly increasing departures and strictly increasing
    arrivals.
    """
    kept: list[Connection] = []
    best = UNREACHABLE
    # latest departure first; within a departure, earliest arrival first
    for c in sorted(connections, key=lambda c: (-c.dep, c.arr, c.trip, c.pos)):
        if c.arr < best:
            kept.append(Connection(*c))
            best = c.arr
    kept.reverse()
    return kept


def filter_network(network: Network) -> Network:
    """Copy of ``network`` whose boards hold only non-dominated connections.

    Unsound when any stop has a buffer: a dominated connection may belong to a
    trip that a seated passenger rides past the buffer.
    """
    if network.filtered:
        return network
    buffer = network.vertex_buffer
    boards = {
        key: DepartureBoard.from_connections(key[0], key[1], filter_dominated(b.connections()), buffer[key[0]])
        for key, b in network.boards.items()
    }
    return replace(network, boards=boards, filtered=True)
