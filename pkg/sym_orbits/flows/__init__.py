"""Trajectory and state-transition-matrix propagation"""
from sym_orbits.flows.events import EventSpec
from sym_orbits.flows.propagator import FlowResult, Propagator, flow, flow_with_stm, flow_to_event

__all__ = ["EventSpec", "FlowResult", "Propagator", "flow", "flow_with_stm", "flow_to_event"]
