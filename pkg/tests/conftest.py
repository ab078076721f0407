import numpy as np
import pytest

from cpphase.graph_core import path_graph
from cpphase.graph_models import LrpSpec, lrp_generate


@pytest.fixture(scope="session")
def lrp25_window():
    """One long-range percolation draw (delta = 2.5) shared across tests."""
    return lrp_generate(LrpSpec(delta=2.5), (-5000, 5000), seed=101)


@pytest.fixture(scope="session")
def warm_kernels():
    """Touch the compiled kernels once so timing-sensitive tests stay honest."""
    from cpphase.contact_process import SimParams, simulate
    simulate(path_graph(-5, 5), SimParams(lam=1.0, horizon=0.5, initial=(0,),
                                          margin=1), seed=0)
    return True


def three_se_band(p: float, n: int) -> float:
    return 3.0 * np.sqrt(max(p * (1.0 - p), 1e-12) / n)
