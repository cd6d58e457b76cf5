import pytest

_RESULTS = {}


class Recorder:
    """Collects one verdict line per acceptance criterion."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.details = []

    def note(self, text):
        self.details.append(text)

    def check(self, ok, text):
        self.details.append(text)
        _RESULTS[self.number] = (self.title, bool(ok), "; ".join(self.details))
        print(f"[acceptance {self.number}] {'PASS' if ok else 'FAIL'} {self.title}: {'; '.join(self.details)}")
        assert ok, f"criterion {self.number} failed: {text}"


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    _RESULTS.setdefault(number, (title, False, "did not complete"))
    return Recorder(number, title)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, ok, details = _RESULTS[n]
        terminalreporter.write_line(f"{n:>2}. {'PASS' if ok else 'FAIL'}  {title}  ({details})")
