import math

import numpy as np
import pytest
from scipy.linalg import expm

from iondecay.ajc_hierarchy import HierarchyParams

FIG3 = dict(eta_l=0.202, omega_hz=475e3, gamma_over_g=6.0e-3, nbar=1.0)


@pytest.fixture
def fig3_params():
    return HierarchyParams.from_experiment(**FIG3, truncation=6, n0=0)


@pytest.fixture
def rng():
    return np.random.default_rng(20011003)


def fock_ops(n_max):
    """Independent ladder/spin operators for test oracles (flat index 2n+s)."""
    a = np.zeros((n_max + 1, n_max + 1))
    for n in range(1, n_max + 1):
        a[n - 1, n] = math.sqrt(n)
    sp = np.array([[0, 0], [1, 0]], dtype=float)
    return np.kron(a, np.eye(2)), np.kron(np.eye(n_max + 1), sp)


def propagator(h, tau):
    return expm(-1j * h * tau)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[number])
