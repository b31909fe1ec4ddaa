"""Single-writer output queue and run provenance"""
import hashlib
import json
import logging
import os
import platform
import threading
from concurrent.futures import ThreadPoolExecutor
from importlib import metadata
from queue import Empty, Queue
from typing import Any, Dict, Iterable, List, Optional, Tuple

import pandas as pd

import sym_orbits
from sym_orbits.catalog.store import dumps, save_branch, save_events, save_orbits
from sym_orbits.config.models import RunConfig

logger = logging.getLogger(__name__)

EXTENSIONS = {
    "branch": ".jsonl",
    "events": ".jsonl",
    "orbits": ".jsonl",
    "table": ".csv",
    "json": ".json",
    "text": "",
}
VERSIONED_PACKAGES = ("numpy", "scipy", "pandas", "networkx", "PyYAML")


class CatalogWriter:
    """Serializes every file write of a run through one worker thread.

    Parallel continuations submit (kind, name, payload) items; the worker
    drains the queue in submission order, so no two threads ever write into
    the output directory at once.
    """

    def __init__(self, output_dir: str, queue_size: int = 1000, metrics=None):
        self.output_dir = output_dir
        self.metrics = metrics
        self.queue: Queue[Tuple[str, str, Any]] = Queue(maxsize=queue_size)
        self.written: List[str] = []
        self.failed: List[Dict[str, str]] = []
        self._lock = threading.Lock()
        self._running = False
        self._executor: Optional[ThreadPoolExecutor] = None

    def start(self) -> 'CatalogWriter':
        os.makedirs(self.output_dir, exist_ok=True)
        self._running = True
        self._executor = ThreadPoolExecutor(max_workers=1, thread_name_prefix="catalog-")
        self._executor.submit(self._write_worker)
        logger.debug(f"Catalog writer started on {self.output_dir}")
        return self

    def path_for(self, kind: str, name: str) -> str:
        if kind not in EXTENSIONS:
            raise ValueError(f"Unknown catalog item kind: {kind}")
        extension = EXTENSIONS[kind]
        filename = name if not extension or name.endswith(extension) else f"{name}{extension}"
        return os.path.join(self.output_dir, filename)

    def submit(self, kind: str, name: str, payload: Any) -> str:
        """Queue one item; returns the path it will be written to"""
        path = self.path_for(kind, name)
        if not self._running:
            raise RuntimeError("catalog writer is not running")
        self.queue.put((kind, path, payload))
        return path

    def _write(self, kind: str, path: str, payload: Any) -> None:
        if kind == "branch":
            save_branch(path, payload)
        elif kind == "events":
            save_events(path, payload)
        elif kind == "orbits":
            save_orbits(path, payload)
        elif kind == "table":
            frame = payload if isinstance(payload, pd.DataFrame) else pd.DataFrame(payload)
            frame.to_csv(path, index=False)
        elif kind == "json":
            with open(path, 'w') as f:
                f.write(dumps(payload) + "\n")
        else:
            with open(path, 'w') as f:
                f.write(str(payload))

    def _write_worker(self) -> None:
        """Worker thread for file output"""
        while self._running or not self.queue.empty():
            try:
                kind, path, payload = self.queue.get(timeout=0.1)
            except Empty:
                continue

            try:
                os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
                self._write(kind, path, payload)
                with self._lock:
                    self.written.append(path)
                logger.info(f"Wrote {kind} {path}")
            except Exception as e:
                logger.error(f"Error writing {kind} {path}: {e}", exc_info=True)
                with self._lock:
                    self.failed.append({"kind": kind, "path": path, "error": str(e)})
                if self.metrics is not None:
                    self.metrics.record_failure("catalog")
            finally:
                self.queue.task_done()

    def close(self) -> None:
        """Drain the queue and stop the worker"""
        if self._executor is None:
            return
        self.queue.join()
        self._running = False
        self._executor.shutdown(wait=True)
        self._executor = None
        logger.debug(f"Catalog writer closed after {len(self.written)} file(s)")

    def __enter__(self) -> 'CatalogWriter':
        return self.start()

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()


def file_digest(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _input_files(inputs: Iterable[str]) -> List[str]:
    files = []
    for path in inputs:
        if os.path.isdir(path):
            for root, _, names in os.walk(path):
                files.extend(os.path.join(root, n) for n in names)
        elif os.path.isfile(path):
            files.append(path)
        else:
            logger.warning(f"Provenance input {path} does not exist, skipped")
    return sorted(files)


def package_versions() -> Dict[str, Optional[str]]:
    versions: Dict[str, Optional[str]] = {"sym-orbits": sym_orbits.__version__, "python": platform.python_version()}
    for name in VERSIONED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = None
    return versions


def write_provenance(output_dir: str, config: RunConfig, inputs: Iterable[str] = (),
                     command: Optional[List[str]] = None) -> Dict[str, Any]:
    """config.yaml plus provenance.json (versions, command line, input hashes)"""
    os.makedirs(output_dir, exist_ok=True)
    config.dump(os.path.join(output_dir, "config.yaml"))
    provenance = {
        "command": command or [],
        "versions": package_versions(),
        "inputs": {path: file_digest(path) for path in _input_files(inputs)},
    }
    with open(os.path.join(output_dir, "provenance.json"), 'w') as f:
        json.dump(provenance, f, indent=2)
    return provenance


def write_metrics(output_dir: str, metrics) -> str:
    path = os.path.join(output_dir, "metrics.json")
    os.makedirs(output_dir, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(metrics.get_metrics(), f, indent=2)
    return path
