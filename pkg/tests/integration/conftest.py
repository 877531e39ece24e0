"""
Fixtures for driving the crnmix command line in-process
"""

import json

import pytest
from click.testing import CliRunner

from crnmix.cli import main
from crnmix.settings import get_settings


@pytest.fixture
def runner(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    get_settings.cache_clear()
    try:
        cli_runner = CliRunner(mix_stderr=False)
    except TypeError:
        # click >= 8.2 always keeps stderr apart
        cli_runner = CliRunner()
    yield cli_runner
    get_settings.cache_clear()


@pytest.fixture
def invoke(runner, tmp_path):
    """Run `crnmix --log-level ERROR <args>` with --out pointing into tmp_path."""

    def _invoke(*args, out=True):
        argv = ["--log-level", "ERROR", *args]
        if out:
            argv += ["--out", str(tmp_path / "out")]
        return runner.invoke(main, argv, catch_exceptions=False)

    return _invoke


def stdout_json(result):
    return json.loads(result.stdout)
