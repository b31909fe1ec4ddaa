"""Orbit catalog: persistence, tables, bifurcation graphs and run output"""
from sym_orbits.catalog.graph import BifurcationGraph, build_graph, export_dot, export_graphml, to_dot
from sym_orbits.catalog.store import (
    load_branch,
    load_events,
    load_orbits,
    load_records,
    orbit_from_record,
    save_branch,
    save_events,
    save_orbits,
    save_records,
)
from sym_orbits.catalog.tables import export_table, table_frame
from sym_orbits.catalog.writer import CatalogWriter, write_metrics, write_provenance

__all__ = [
    "BifurcationGraph",
    "build_graph",
    "export_dot",
    "export_graphml",
    "to_dot",
    "load_branch",
    "load_events",
    "load_orbits",
    "load_records",
    "orbit_from_record",
    "save_branch",
    "save_events",
    "save_orbits",
    "save_records",
    "export_table",
    "table_frame",
    "CatalogWriter",
    "write_metrics",
    "write_provenance",
]
