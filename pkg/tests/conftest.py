import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, seconds): numbered acceptance criterion "
                                       "with its runtime limit")


@pytest.fixture
def measured(request):
    """Dict of measured quantities printed next to the criterion's verdict."""
    values = {}
    request.node._measured = values
    return values


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title, limit = mark.args
    if rep.when == "call" and rep.passed and rep.duration > limit:
        rep.outcome = "failed"
        rep.longrepr = f"runtime {rep.duration:.1f}s exceeds the {limit}s limit"
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _ACCEPTANCE.append((number, title, rep.passed, rep.duration, getattr(item, "_measured", {})))


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, duration, values in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        extra = "  ".join(f"{k}={_fmt(v)}" for k, v in values.items())
        terminalreporter.write_line(f"{number:>2} {'PASS' if ok else 'FAIL'}  {title} ({duration:.1f}s)  {extra}")
