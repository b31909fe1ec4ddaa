"""Behave environment configuration for command-line scenarios"""

import shutil
import sys
import tempfile
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))


def before_all(context):
    """Setup before all tests"""
    context.project_root = project_root
    context.temp_dir = tempfile.mkdtemp()


def after_all(context):
    """Cleanup after all tests"""
    try:
        shutil.rmtree(context.temp_dir)
    except Exception:
        pass


def before_scenario(context, scenario):
    """Fresh working directories per scenario"""
    context.scenario_dir = Path(tempfile.mkdtemp(dir=context.temp_dir))
    context.output_dir = context.scenario_dir / "output"
    context.events_dir = context.scenario_dir / "events"
    context.events_dir.mkdir()
    context.seed = None
    context.model = None
    context.result = None
    context.events = []
