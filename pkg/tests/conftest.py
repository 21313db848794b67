import numpy as np
import pytest

from pseudochain import kernels

BACKENDS = [kernels.PythonKernel]
if kernels.BACKEND == "cython":
    BACKENDS.insert(0, kernels.LindbladKernel)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture(params=BACKENDS, ids=lambda k: k.__module__.rsplit(".", 1)[-1])
def kernel_cls(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    import helpers

    if helpers.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(helpers.ACCEPTANCE_LINES):
            terminalreporter.write_line(helpers.ACCEPTANCE_LINES[k])
