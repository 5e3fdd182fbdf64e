import numpy as np
import pytest

from nhqcbench.bench import benchmark_catalog
from nhqcbench.dynamics import oracle_propagate_unitary, propagate_unitary
from nhqcbench.schemes import build_schedule
from nhqcbench.system import ErrorModel


@pytest.fixture(scope="session")
def catalog():
    return benchmark_catalog()


@pytest.fixture(scope="session")
def schedules(catalog):
    return {tag: build_schedule(spec) for tag, spec in catalog.items()}


@pytest.fixture(scope="session")
def ideal_runs(schedules):
    """Ideal RK4 trajectories at the default step count, computed once."""
    return {tag: propagate_unitary(s) for tag, s in schedules.items()}


@pytest.fixture(scope="session")
def oracle_gates(schedules):
    """Ideal expm-product propagators at the full oracle resolution."""
    return {tag: oracle_propagate_unitary(s) for tag, s in schedules.items()}


def align_phase(actual, reference):
    """Remove the global phase of `actual` relative to `reference`."""
    ov = np.trace(reference.conj().T @ actual)
    if abs(ov) < 1e-12:
        return actual
    return actual * (abs(ov) / ov)


def phase_distance(actual, reference):
    """1 - |Tr(ref^+ actual)| / d, zero iff equal up to global phase."""
    d = reference.shape[0]
    return 1 - abs(np.trace(reference.conj().T @ actual)) / d


@pytest.fixture(scope="session")
def ideal_error():
    return ErrorModel()
