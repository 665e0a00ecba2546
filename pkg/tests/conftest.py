import json
from importlib import resources

import pytest


def _schema_registry():
    from referencing import Registry, Resource

    root = resources.files("flatlatt") / "schemas"
    reg = Registry()
    for f in root.iterdir():
        if f.name.endswith(".json"):
            reg = reg.with_resource(f.name, Resource.from_contents(json.loads(f.read_text())))
    return reg


@pytest.fixture(scope="session")
def validate():
    """validate(instance, "catalog") checks against the packaged schema."""
    jsonschema = pytest.importorskip("jsonschema")
    reg = _schema_registry()

    def check(instance, name):
        schema = reg.contents(name + ".schema.json")
        jsonschema.Draft202012Validator(schema, registry=reg).validate(instance)

    return check


_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(n, text) wraps the checks in a with-block."""
    import contextlib

    @contextlib.contextmanager
    def record(n, text):
        try:
            yield
        except BaseException:
            _ACCEPTANCE[n] = ("FAIL", text)
            raise
        _ACCEPTANCE[n] = ("PASS", text)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, text = _ACCEPTANCE[n]
        terminalreporter.write_line("criterion %d: %s  %s" % (n, status, text))
