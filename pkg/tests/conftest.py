import importlib

import pytest

from uwbnlos import _pykernels

ACCEPTANCE_RESULTS = []


def _backends():
    mods = [_pykernels]
    try:
        mods.append(importlib.import_module("uwbnlos._ckernels"))
    except ImportError:
        pass
    return mods


KERNEL_BACKENDS = _backends()


@pytest.fixture(params=KERNEL_BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def kernels(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {title} -- {detail}")
