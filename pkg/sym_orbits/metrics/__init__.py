"""Metrics collection and reporting"""
from sym_orbits.metrics.collector import MetricsCollector

try:
    from sym_orbits.metrics.otel import OTelMetricsCollector
    __all__ = ["MetricsCollector", "OTelMetricsCollector"]
except ImportError:
    __all__ = ["MetricsCollector"]
