import pytest
from hypothesis import HealthCheck, settings

from cshape.specfile import parse
from importlib import resources

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def load_example(name: str):
    text = resources.files("cshape").joinpath("data", f"{name}.sub").read_text(encoding="utf-8")
    return parse(text, name)


@pytest.fixture(scope="session")
def example():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_example(name)
        return cache[name]
    return get


@pytest.fixture(scope="session")
def tm(example):
    return example("tm2d")


@pytest.fixture(scope="session")
def table(example):
    return example("table")


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
