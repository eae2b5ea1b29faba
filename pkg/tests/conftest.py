import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nvdnp import FieldVector, SystemParams  # noqa: E402
from nvdnp.fixtures import first_shell_tensor, weak_coupling_tensor  # noqa: E402

# the tilted-field, first-shell configuration used for the selective / Lambda spectra
TILTED_FIELD = FieldVector.from_degrees(4.04e-3, 42.0, 85.0)


@pytest.fixture
def first_shell():
    return first_shell_tensor(0)


@pytest.fixture
def weak():
    return weak_coupling_tensor()


@pytest.fixture
def tilted_params(first_shell):
    return SystemParams(field=TILTED_FIELD, hyperfine=first_shell)


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def random_density_matrix(rng, n=6):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng, n=6, scale=1.0):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (x + x.conj().T)


# -- acceptance report ------------------------------------------------------

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion.

    Usage: ``acceptance(n, title, ok, detail)``; the line is printed
    immediately and again in the terminal summary.
    """

    def record(number, title, ok, detail=""):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE_RESULTS[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[number])
