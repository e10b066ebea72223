from pathlib import Path

import numpy as np
import pytest

from layercasimir import Constant, Layer, Oscillator, OscillatorSum, Vacuum

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"

GOLD = OscillatorSum([Oscillator(wp2=1.37e16**2, w0=0.0, gamma=5.32e13)])

_acceptance_lines = []


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""

    def _report(number, name, ok, detail=""):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} {detail}".rstrip())

    return _report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def random_material(rng):
    kind = rng.integers(0, 4)
    if kind == 0:
        return Vacuum()
    if kind == 1:
        return Constant(float(rng.uniform(1.0, 12.0)))
    if kind == 2:
        return Constant(float(rng.uniform(1.0, 6.0)), float(rng.uniform(1.0, 3.0)))
    return OscillatorSum([Oscillator(wp2=float(rng.uniform(1e31, 1e33)),
                                     w0=float(rng.uniform(1e15, 3e16)),
                                     gamma=float(rng.uniform(0, 1e15)))])


def random_layers(rng, count, dmax=5e-7):
    return [Layer(random_material(rng), float(rng.uniform(0, dmax))) for _ in range(count)]


def rel(a, b):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(np.maximum(abs(a), abs(b)), 1e-300)))
