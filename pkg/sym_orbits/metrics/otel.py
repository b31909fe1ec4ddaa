"""OpenTelemetry metrics integration for sym-orbits"""
from typing import Optional

try:
    from opentelemetry.sdk.metrics import MeterProvider
    from opentelemetry.sdk.metrics.export import (
        MetricExporter,
        PeriodicExportingMetricReader,
    )
    _OTEL_AVAILABLE = True
except ImportError:  # pragma: no cover
    _OTEL_AVAILABLE = False


class OTelMetricsCollector:
    """
    Publishes correction, propagation and event counters via OpenTelemetry.

    Shares the recording interface of
    :class:`~sym_orbits.metrics.collector.MetricsCollector`, so either can be
    handed to the propagator, corrector and continuation code.
    """

    def __init__(
        self,
        exporter: Optional["MetricExporter"] = None,
        export_interval_millis: int = 30_000,
        meter_name: str = "sym_orbits",
    ):
        if not _OTEL_AVAILABLE:
            raise ImportError(
                "OpenTelemetry packages are required for OTelMetricsCollector. "
                "Install them with: pip install sym-orbits[opentelemetry]"
            )

        if exporter is not None:
            reader = PeriodicExportingMetricReader(
                exporter, export_interval_millis=export_interval_millis
            )
            self._provider = MeterProvider(metric_readers=[reader])
        else:
            self._provider = MeterProvider()

        self._create_instruments(self._provider.get_meter(meter_name))

    def _create_instruments(self, meter) -> None:
        self._corrections = meter.create_counter(
            name="sym_orbits.corrections",
            description="Converged Newton corrections",
            unit="1",
        )
        self._newton_iterations = meter.create_counter(
            name="sym_orbits.newton_iterations",
            description="Newton iterations spent in converged corrections",
            unit="1",
        )
        self._propagations = meter.create_counter(
            name="sym_orbits.propagations",
            description="Trajectory propagations",
            unit="1",
        )
        self._events = meter.create_counter(
            name="sym_orbits.events",
            description="Located bifurcation events",
            unit="1",
        )
        self._failures = meter.create_counter(
            name="sym_orbits.failures",
            description="Failed corrections, propagations and tasks",
            unit="1",
        )

    def record_correction(self, key: str, iterations: int) -> None:
        """Record a converged Newton correction"""
        attrs = {"key": key}
        self._corrections.add(1, attrs)
        self._newton_iterations.add(iterations, attrs)

    def record_propagation(self, key: str) -> None:
        """Record one trajectory propagation"""
        self._propagations.add(1, {"key": key})

    def record_event(self, key: str) -> None:
        """Record a located bifurcation event"""
        self._events.add(1, {"key": key})

    def record_failure(self, key: str) -> None:
        """Record a failure"""
        self._failures.add(1, {"key": key})

    def shutdown(self) -> None:
        """Flush pending metrics and shut down the meter provider"""
        self._provider.shutdown()
