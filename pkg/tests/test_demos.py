import runpy
from pathlib import Path

import pytest

from cudmcmc.experiments import ExperimentConfig

DEMOS = Path(__file__).resolve().parents[1] / "demos"


@pytest.mark.parametrize("script", sorted(DEMOS.glob("*.py")), ids=lambda p: p.stem)
def test_demo_runs(script, capsys):
    runpy.run_path(str(script), run_name="__main__")
    assert capsys.readouterr().out.strip()


@pytest.mark.parametrize("config", sorted((DEMOS / "configs").glob("*.json")),
                         ids=lambda p: p.stem)
def test_example_config_parses(config):
    ExperimentConfig.from_json(config)
