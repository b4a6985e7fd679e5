"""Shared oracles and the acceptance-criteria summary hook."""

import numpy as np

_CRITERION_LINES = {}


class criterion:
    """Record one PASS/FAIL summary line for an acceptance criterion."""

    def __init__(self, num, label):
        self.num = num
        self.label = label

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        _CRITERION_LINES[self.num] = (self.label, exc_type is None)
        return False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERION_LINES):
        label, passed = _CRITERION_LINES[num]
        terminalreporter.write_line(
            f"criterion {num:2d} {'PASS' if passed else 'FAIL'} - {label}"
        )


def dense_circulant(row):
    """Full matrix whose first row is ``row`` and whose rows are its rotations."""
    row = np.asarray(row, dtype=float)
    return np.array([np.roll(row, j) for j in range(row.size)])


def random_symmetric_row(rng, n, scale=1.0):
    """Random row with the circulant symmetry row[k] == row[n-k]."""
    row = scale * rng.normal(size=n)
    return 0.5 * (row + np.roll(row[::-1], 1))


def random_psd_row(rng, n, scale=1.0):
    """Random symmetric row whose circulant is positive semidefinite."""
    eigs = rng.uniform(0.0, scale, size=n)
    eigs = 0.5 * (eigs + np.roll(eigs[::-1], 1))
    return np.fft.ifft(eigs).real
