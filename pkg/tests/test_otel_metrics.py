"""Unit tests for the OpenTelemetry metrics module"""
import pytest

from opentelemetry.sdk.metrics import MeterProvider
from opentelemetry.sdk.metrics.export import InMemoryMetricReader

from sym_orbits.metrics.otel import OTelMetricsCollector


def _make_collector() -> tuple[OTelMetricsCollector, InMemoryMetricReader]:
    """Create a collector backed by an in-memory reader for assertions."""
    reader = InMemoryMetricReader()
    provider = MeterProvider(metric_readers=[reader])
    collector = OTelMetricsCollector.__new__(OTelMetricsCollector)
    collector._provider = provider
    collector._create_instruments(provider.get_meter("sym_orbits"))
    return collector, reader


def _collect(reader: InMemoryMetricReader) -> dict:
    """Return a flat dict mapping metric-name -> {attribute-set -> value}."""
    data = reader.get_metrics_data()
    result: dict = {}
    for rm in data.resource_metrics:
        for sm in rm.scope_metrics:
            for metric in sm.metrics:
                result[metric.name] = {}
                for dp in metric.data.data_points:
                    key = frozenset(dp.attributes.items()) if dp.attributes else frozenset()
                    result[metric.name][key] = dp.value
    return result


def _key(name: str) -> frozenset:
    return frozenset({"key": name}.items())


class TestOTelMetricsCollector:
    def test_record_correction(self):
        collector, reader = _make_collector()
        collector.record_correction("dpo", 4)
        collector.record_correction("dpo", 2)

        data = _collect(reader)
        assert data["sym_orbits.corrections"][_key("dpo")] == 2
        assert data["sym_orbits.newton_iterations"][_key("dpo")] == 6

    def test_record_propagation(self):
        collector, reader = _make_collector()
        collector.record_propagation("lpo2")

        assert _collect(reader)["sym_orbits.propagations"][_key("lpo2")] == 1

    def test_record_event_and_failure(self):
        collector, reader = _make_collector()
        collector.record_event("dro")
        collector.record_failure("dro")
        collector.record_failure("dro")

        data = _collect(reader)
        assert data["sym_orbits.events"][_key("dro")] == 1
        assert data["sym_orbits.failures"][_key("dro")] == 2

    def test_keys_tracked_separately(self):
        collector, reader = _make_collector()
        collector.record_propagation("branch-a")
        collector.record_propagation("branch-b")
        collector.record_propagation("branch-b")

        data = _collect(reader)
        assert data["sym_orbits.propagations"][_key("branch-a")] == 1
        assert data["sym_orbits.propagations"][_key("branch-b")] == 2

    def test_shutdown_does_not_raise(self):
        collector, _ = _make_collector()
        collector.shutdown()

    def test_import_error_raises_informative_message(self):
        """OTelMetricsCollector raises ImportError when opentelemetry is absent."""
        import sym_orbits.metrics.otel as otel_module
        original = otel_module._OTEL_AVAILABLE
        try:
            otel_module._OTEL_AVAILABLE = False
            with pytest.raises(ImportError, match="pip install sym-orbits\\[opentelemetry\\]"):
                OTelMetricsCollector()
        finally:
            otel_module._OTEL_AVAILABLE = original

    def test_exporter_argument_accepted(self):
        from opentelemetry.sdk.metrics.export import ConsoleMetricExporter
        collector = OTelMetricsCollector(exporter=ConsoleMetricExporter(), export_interval_millis=60_000)
        collector.shutdown()
