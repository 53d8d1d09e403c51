import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


class Recorder:
    def __init__(self, store, name):
        self.store = store
        self.name = name
        self.details = []
        store[name] = [False, self.details]

    def note(self, text):
        self.details.append(str(text))

    def check(self, cond, text):
        self.note(text)
        assert cond, text

    def passed(self):
        self.store[self.name][0] = True


@pytest.fixture
def criterion(request):
    rec = Recorder(request.config.stash[_RESULTS], request.node.name)
    yield rec
    rep = getattr(request.node, "rep_call", None)
    if rep is not None and rep.passed:
        rec.passed()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_RESULTS]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, details) in sorted(results.items()):
        line = f"{'PASS' if ok else 'FAIL'} {name}"
        if details:
            line += ": " + "; ".join(details)
        terminalreporter.write_line(line)
