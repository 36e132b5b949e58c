import sys
import time
from pathlib import Path

import pytest

from qpdc import pipeline
from qpdc.config import load_config
from qpdc.dispersion import SellmeierModel, WaveguideMode, default_material

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
_SESSION_START = time.perf_counter()
SUITE_BUDGET_S = 300.0


@pytest.fixture(scope="session")
def ln_mode():
    return WaveguideMode(default_material())


@pytest.fixture(scope="session")
def toy_mode():
    return WaveguideMode(SellmeierModel({"A": 4.84}, valid_range=(0.2, 10.0), label="toy"))


@pytest.fixture(scope="session")
def config_dir():
    return CONFIGS


@pytest.fixture(scope="session")
def paper_cfg():
    return load_config(CONFIGS / "paper.yaml")


@pytest.fixture(scope="session")
def paper_run(paper_cfg):
    """(setup, jsa) at paper parameters on the default 1024^2 grid."""
    return pipeline.run_jsa(paper_cfg)


@pytest.fixture(scope="session")
def co_run():
    return pipeline.run_jsa(load_config(CONFIGS / "paper_co.yaml"))


@pytest.fixture(scope="session")
def cw_run():
    return pipeline.run_jsa(load_config(CONFIGS / "paper_cw.yaml"))


def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = list(getattr(module, "RESULTS", []))
    if not lines:
        return
    elapsed = time.perf_counter() - _SESSION_START
    full_run = len(terminalreporter.stats.get("passed", [])) + len(terminalreporter.stats.get("failed", [])) > len(lines)
    if full_run:
        lines.append(f"{'PASS' if elapsed < SUITE_BUDGET_S else 'FAIL'}  C7f full suite < 5 min: {elapsed:.1f} s")
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
