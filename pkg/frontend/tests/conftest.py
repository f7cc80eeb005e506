"""Fixtures that generate real experiment outputs via the simulation CLI.

The plotter only ever sees the external interfaces (ccdf.csv, fit.json),
so the fixtures shell out to the ``aloha`` command rather than importing
the simulation package.
"""
import shutil
import subprocess

import pytest


def _reproduce(figure: str, out_dir) -> None:
    if shutil.which("aloha") is None:
        pytest.skip("aloha CLI not installed")
    result = subprocess.run(
        ["aloha", "reproduce", figure, "--scale", "desk", "--out", str(out_dir)],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr


@pytest.fixture(scope="session")
def fig3_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig3")
    _reproduce("fig3", out)
    return out


@pytest.fixture(scope="session")
def fig4_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig4")
    _reproduce("fig4", out)
    return out


@pytest.fixture(scope="session")
def fig5_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig5")
    _reproduce("fig5", out)
    return out
