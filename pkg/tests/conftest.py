import numpy as np
import pytest

from sdelab.runner import reproduce

ACCEPTANCE_SCALE = 0.25
ACCEPTANCE_WORKERS = 4


@pytest.fixture(scope="session")
def table1_run(tmp_path_factory):
    """reproduce(table1) at the acceptance scale, timed, shared across tests."""
    out = tmp_path_factory.mktemp("table1")
    import time
    t0 = time.time()
    manifest = reproduce("table1", scale=ACCEPTANCE_SCALE,
                         workers=ACCEPTANCE_WORKERS, out_dir=out)
    return manifest, time.time() - t0, out


@pytest.fixture(scope="session")
def fig3_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig3")
    return reproduce("fig3", scale=ACCEPTANCE_SCALE,
                     workers=ACCEPTANCE_WORKERS, out_dir=out), out


@pytest.fixture(scope="session")
def fig4_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig4")
    return reproduce("fig4", scale=ACCEPTANCE_SCALE,
                     workers=ACCEPTANCE_WORKERS, out_dir=out), out


@pytest.fixture(scope="session")
def fig5_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig5")
    return reproduce("fig5", scale=ACCEPTANCE_SCALE, out_dir=out), out


@pytest.fixture(scope="session")
def fig6_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig6")
    return reproduce("fig6", scale=ACCEPTANCE_SCALE, out_dir=out), out


def gof_quantile_grid(sample: np.ndarray, n_nodes: int = 300) -> np.ndarray:
    """Deduplicated empirical quantile nodes spanning a sample."""
    qs = np.linspace(0.0, 1.0, n_nodes)
    return np.unique(np.quantile(sample, qs))
