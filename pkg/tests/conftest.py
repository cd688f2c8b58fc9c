import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from toposcalc import corpus  # noqa: E402
from toposcalc.modelkit import Exists, Rel, Sequent  # noqa: E402

_criteria: dict[int, str] = {}
_nodes: dict[str, int] = {}
_outcomes: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion this test decides")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            n, title = mark.args
            _criteria[n] = title
            _nodes[item.nodeid] = n


def pytest_runtest_logreport(report):
    n = _nodes.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(n, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        seen = _outcomes.get(n, [])
        ok = bool(seen) and all(o == "passed" for o in seen)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} - {_criteria[n]}")


def _write(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(corpus.dump(obj), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def workspace(tmp_path_factory) -> Path:
    """Shipped corpus plus site, formula and sequent files for CLI runs."""
    root = tmp_path_factory.mktemp("ws")
    corpus.write_corpus(root / "corpus")
    for name, C in corpus.categories().items():
        _write(root / "sites" / f"{name}.json", {"category": C.to_json()})
        _write(root / "sites" / f"{name}-trivial.json", {"category": C.to_json(), "topology": "trivial"})
        for pname, P in corpus.standard_presheaves(C).items():
            _write(root / "psh" / name / f"{pname}.json", P.to_json())
    _write(root / "generators" / "V-f.json", {"covers": {"y": [["f"]]}})
    _write(root / "formulas" / "has-successor.json", Exists("y", Rel("R", "a", "y")).to_json())
    succ = Sequent(("x", "y"), Rel("R", "x", "y"), Exists("z", Rel("R", "y", "z")))
    _write(root / "sequents" / "successor.json", succ.to_json())
    (root / "broken.json").write_text("{not json", encoding="utf-8")
    return root


def load(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
