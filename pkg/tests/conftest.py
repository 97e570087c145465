import hypothesis
import numpy as np
import pytest

from aoi_pricing.arrival import ArrivalChain
from aoi_pricing.cost_dist import CostDistribution
from aoi_pricing.experiments import fig4_problem, fig6_problem

np.seterr(all="warn")

hypothesis.settings.register_profile("repo", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("repo")

NORMAL = CostDistribution.truncated_normal(0.6, 0.7)
UNIFORM = CostDistribution.uniform()
LOGISTIC = CostDistribution.truncated_logistic(0.6, 1.0)
EXPONENTIAL = CostDistribution.truncated_exponential(2.0)
ALL_DISTS = [UNIFORM, NORMAL, LOGISTIC, EXPONENTIAL]


@pytest.fixture
def chain():
    return ArrivalChain(0.8, 0.6)


@pytest.fixture(params=ALL_DISTS, ids=lambda d: d.kind)
def dist(request):
    return request.param


@pytest.fixture
def fig4():
    return fig4_problem()


@pytest.fixture
def fig6():
    return fig6_problem()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
