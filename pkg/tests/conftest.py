import time

import pytest

from sbmpot import KernelSet, PhiSpec, RunConfig, run_verify


@pytest.fixture(scope="session")
def stable_spec():
    return PhiSpec.stable(0.75)


@pytest.fixture(scope="session")
def mixture_spec():
    return PhiSpec.mixture(((1.0, 0.6), (1.0, 0.9)))


@pytest.fixture(scope="session")
def stable_ks(stable_spec):
    return KernelSet(stable_spec)


@pytest.fixture(scope="session")
def mixture_ks(mixture_spec):
    return KernelSet(mixture_spec)


@pytest.fixture(scope="session")
def full_verify():
    """One full certification run over both fixture specs, shared by the
    acceptance tests.  Returns (config, report, wall seconds)."""
    cfg = RunConfig()
    t0 = time.perf_counter()
    report = run_verify(cfg)
    return cfg, report, time.perf_counter() - t0
