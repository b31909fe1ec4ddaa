"""Metrics collection for monitoring numerical work"""
from dataclasses import dataclass
from typing import Dict
from threading import Lock
import time


@dataclass
class WorkMetrics:
    """Counters for one branch or command"""
    corrections: int = 0
    newton_iterations: int = 0
    propagations: int = 0
    events: int = 0
    failure_count: int = 0
    last_update_time: float = 0.0

    def touch(self) -> None:
        self.last_update_time = time.time()


class MetricsCollector:
    """Thread-safe metrics collector keyed by branch or command name"""

    def __init__(self):
        self._metrics: Dict[str, WorkMetrics] = {}
        self._lock = Lock()
        self._start_time = time.time()

    def _entry(self, key: str) -> WorkMetrics:
        if key not in self._metrics:
            self._metrics[key] = WorkMetrics()
        return self._metrics[key]

    def record_correction(self, key: str, iterations: int) -> None:
        """Record a converged Newton correction"""
        with self._lock:
            entry = self._entry(key)
            entry.corrections += 1
            entry.newton_iterations += iterations
            entry.touch()

    def record_propagation(self, key: str) -> None:
        """Record one trajectory propagation"""
        with self._lock:
            entry = self._entry(key)
            entry.propagations += 1
            entry.touch()

    def record_event(self, key: str) -> None:
        """Record a located bifurcation event"""
        with self._lock:
            entry = self._entry(key)
            entry.events += 1
            entry.touch()

    def record_failure(self, key: str) -> None:
        """Record a failed correction, propagation or task"""
        with self._lock:
            entry = self._entry(key)
            entry.failure_count += 1
            entry.touch()

    def get_metrics(self) -> Dict:
        """Get all metrics"""
        with self._lock:
            uptime = time.time() - self._start_time
            return {
                'uptime_seconds': uptime,
                'work': {
                    key: {
                        'corrections': m.corrections,
                        'newton_iterations': m.newton_iterations,
                        'mean_newton_iterations': m.newton_iterations / m.corrections if m.corrections else 0,
                        'propagations': m.propagations,
                        'events': m.events,
                        'failure_count': m.failure_count,
                        'last_update_time': m.last_update_time,
                    }
                    for key, m in self._metrics.items()
                }
            }

    def reset(self) -> None:
        """Reset all metrics"""
        with self._lock:
            self._metrics.clear()
            self._start_time = time.time()
