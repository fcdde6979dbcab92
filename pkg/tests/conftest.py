import sys
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from oracles import pump_iid_oracle  # noqa: E402

from cudmcmc.models import PumpModel  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ORACLE_KEY = "cudmcmc/pump_oracle_v2"


@pytest.fixture(scope="session")
def pump_model():
    return PumpModel.from_csv()


@pytest.fixture(scope="session")
def pump_oracle(request, pump_model):
    """10^7-step IID Gibbs run of the pump posterior, cached across sessions."""
    cached = request.config.cache.get(ORACLE_KEY, None)
    if cached is None:
        t0 = time.perf_counter()
        cached = pump_iid_oracle(pump_model)
        cached["seconds"] = time.perf_counter() - t0
        request.config.cache.set(ORACLE_KEY, cached)
    return {k: np.asarray(v) if isinstance(v, list) else v for k, v in cached.items()}


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance verdicts, one line per criterion, after the run."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            lines += [v for k, v in getattr(rep, "user_properties", []) if k == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
