import json
import math
import random
import time
from pathlib import Path

import os

import pytest
from hypothesis import settings

from agi_growth.ingest import load_config_file, to_fred_csv
from agi_growth.production import ModelParams, synthesize_panel
from agi_growth.timeseries import make_series

# the default profile keeps the whole suite inside its time budget;
# HYPOTHESIS_PROFILE=thorough for a deeper property sweep
settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def write_panel(directory, panel, **config_extra):
    """Write an AlignedPanel as four annual FRED files plus config.json; return the config path."""
    directory.mkdir(parents=True, exist_ok=True)
    sources = []
    for var, col in (("gdp", "y"), ("capital", "k"), ("labor", "l"), ("tfp", "a")):
        s = make_series(var.upper(), "", "annual", zip(panel.years, getattr(panel, col)))
        (directory / f"{var}.csv").write_bytes(to_fred_csv(s))
        sources.append({"path": f"{var}.csv", "format": "fred_csv", "variable": var, "frequency": "annual"})
    path = directory / "config.json"
    path.write_text(json.dumps({"sources": sources, **config_extra}))
    return path


@pytest.fixture
def exponential_config(tmp_path):
    """Constant a, k, l with AGI growing exactly 12.5% a year; alpha = 0.5."""
    years = list(range(2000, 2012))
    n = len(years)
    agi = [1.125**i for i in range(n)]
    panel = synthesize_panel(years, [1.7] * n, [40.0] * n, [9.0] * n, agi, ModelParams(0.5))
    return load_config_file(write_panel(tmp_path / "exp", panel, alpha=0.5))


@pytest.fixture
def noisy_config(tmp_path):
    """All inputs drift with noise so the log-log fit is imperfect."""
    rng = random.Random(99)
    years = list(range(1980, 2010))
    a, k, l, g = [], [], [], []  # noqa: E741
    va, vk, vl, vg = 1.0, 100.0, 50.0, 1.0
    for _ in years:
        a.append(va)
        k.append(vk)
        l.append(vl)
        g.append(vg)
        va *= math.exp(rng.gauss(0.01, 0.02))
        vk *= math.exp(rng.gauss(0.03, 0.02))
        vl *= math.exp(rng.gauss(0.01, 0.01))
        vg *= math.exp(rng.gauss(0.04, 0.05))
    panel = synthesize_panel(years, a, k, l, g, ModelParams(0.35))
    return load_config_file(write_panel(tmp_path / "noisy", panel, alpha=0.35))


# ---------------------------------------------------------------------------
# acceptance reporting and the full-suite time budget

SUITE_BUDGET_S = 10.0
_ACCEPTANCE_LINES = []
_SUITE = {}


@pytest.fixture
def criterion():
    """Record one acceptance line and fail the test if the criterion is not met."""

    def check(name, ok, detail):
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, f"{name}: {detail}"

    return check


def pytest_sessionstart(session):
    _SUITE["start"] = time.perf_counter()


def pytest_collection_modifyitems(session, config, items):
    _SUITE["modules"] = {item.module.__name__ for item in items}


def _full_suite():
    # the budget applies to a full run under the default hypothesis profile
    if os.environ.get("HYPOTHESIS_PROFILE", "default") != "default":
        return False
    expected = {p.stem for p in Path(__file__).parent.glob("test_*.py")}
    return expected <= _SUITE.get("modules", set())


def pytest_sessionfinish(session, exitstatus):
    _SUITE["elapsed"] = time.perf_counter() - _SUITE["start"]
    if _full_suite() and _SUITE["elapsed"] >= SUITE_BUDGET_S and session.exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    if _full_suite():
        elapsed = _SUITE.get("elapsed", time.perf_counter() - _SUITE["start"])
        ok = elapsed < SUITE_BUDGET_S
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'} full suite runtime: {elapsed:.2f} s (budget {SUITE_BUDGET_S:.0f} s)"
        )
