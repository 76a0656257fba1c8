from pathlib import Path

import pytest

from covertsem.config import load_config
from covertsem.env import CovertSemComEnv

ROOT = Path(__file__).resolve().parents[1]
PAPER_CFG = ROOT / "configs" / "paper.cfg"

_acceptance_lines = []


def record_criterion(line: str) -> None:
    _acceptance_lines.append(line)
    print(line)


@pytest.fixture(scope="session")
def paper_config():
    return load_config(PAPER_CFG)


@pytest.fixture(scope="session")
def lookup_cache(tmp_path_factory):
    return str(tmp_path_factory.mktemp("lookup") / "bleu_lookup.csv")


@pytest.fixture(scope="session")
def paper_env(paper_config, lookup_cache):
    from dataclasses import replace

    return CovertSemComEnv(replace(paper_config.env_obj(), lookup_cache=lookup_cache))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
