import pytest

from mixedsolve import kernels


@pytest.fixture(params=kernels.available_backends())
def kernel_backend(request):
    """Run a test once per available kernel implementation."""
    previous = kernels.active_backend()
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    results = test_acceptance.RESULTS
    if not results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(results, key=str):
        status, title, detail, seconds = results[key]
        tr.write_line(f"[{status}] criterion {key}: {title} ({seconds:.1f}s)")
        for line in detail:
            tr.write_line(f"        {line}")
