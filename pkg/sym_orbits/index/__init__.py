"""Conley-Zehnder indices"""
from sym_orbits.index.conley_zehnder import IndexRecord, cz_elliptic, cz_hyperbolic, is_good
from sym_orbits.index.propagation import propagate_index
from sym_orbits.index.rotation import index_from_rotation, track_rotation

__all__ = [
    "IndexRecord",
    "cz_elliptic",
    "cz_hyperbolic",
    "is_good",
    "propagate_index",
    "index_from_rotation",
    "track_rotation",
]
