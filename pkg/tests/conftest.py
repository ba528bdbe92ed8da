"""Shared fixtures and the PASS/FAIL summary for the acceptance criteria."""

from __future__ import annotations

import pytest

from sqhex.lattice import LatticeSpec, PeriodicWeights, build_lattice

_RESULTS: list[str] = []


@pytest.fixture
def record():
    """Append one ``PASS``/``FAIL`` line to the terminal summary."""

    def _record(label: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _RESULTS.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_RESULTS, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)


def sh_spec(x=(1.0, 1.0, 1.0), y2=1.0) -> LatticeSpec:
    """N=3, Omega=(1,3,6), one square row in a period of three."""
    return LatticeSpec(3, (1, 3, 6), (1, 0, 1), PeriodicWeights(tuple(x), {2: y2}))


@pytest.fixture
def sh():
    return sh_spec()


@pytest.fixture
def sh_graph(sh):
    return build_lattice(sh)


# small graphs with few enough matchings to enumerate
SMALL = [
    ((1, 3, 6), (1, 0, 1)),
    ((1, 2, 4, 7), (0, 1)),
    ((1, 3, 5, 6), (0,)),
    ((1, 2, 5, 7), (1,)),
    ((1, 3, 6), (0, 1, 1)),
    ((1, 2), (0,)),
    ((1, 4, 5), (1, 0)),
]


def small_spec(Omega, a) -> LatticeSpec:
    return LatticeSpec(len(Omega), Omega, a, PeriodicWeights.uniform(a))
