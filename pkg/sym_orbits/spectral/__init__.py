"""Monodromy, reduction, Wonenburger blocks, configurations and signs"""
from sym_orbits.spectral.classify import (
    EigenConfig,
    classify,
    multiplier_from_index,
    stability_index,
)
from sym_orbits.spectral.monodromy import monodromy
from sym_orbits.spectral.record import SpectralRecord, analyze
from sym_orbits.spectral.reduction import ReducedMonodromy, reduce
from sym_orbits.spectral.wonenburger import (
    SignEntry,
    SignRecord,
    WonenburgerBlocks,
    b_sign,
    c_sign,
    period_doubling_site,
    wonenburger_at,
)

__all__ = [
    "EigenConfig",
    "classify",
    "multiplier_from_index",
    "stability_index",
    "monodromy",
    "SpectralRecord",
    "analyze",
    "ReducedMonodromy",
    "reduce",
    "SignEntry",
    "SignRecord",
    "WonenburgerBlocks",
    "b_sign",
    "c_sign",
    "period_doubling_site",
    "wonenburger_at",
]
