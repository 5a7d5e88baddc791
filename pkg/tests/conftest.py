import sys

import pytest

from dyncon import available_kernels, get_kernel

KERNELS = available_kernels()


@pytest.fixture(params=KERNELS)
def kernel(request):
    return get_kernel(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
