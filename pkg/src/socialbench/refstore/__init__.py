"""Transactional graph stores: the versioned reference store and a
deliberately naive full-scan twin used as a correctness oracle."""

from .store import ReferenceStore, Snapshot, edge_weight
from .naive import NaiveStore

__all__ = ["ReferenceStore", "Snapshot", "NaiveStore", "edge_weight"]
