import shutil
from pathlib import Path

import pytest

from syguskit.smt import SmtSession

ROOT = Path(__file__).resolve().parent.parent
DESK = ROOT / "benchmarks" / "desk"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

MAX2 = """(set-logic LIA)
(synth-fun max2 ((x Int) (y Int)) Int
  ((Start Int (x y 0 1 (+ Start Start) (- Start Start) (ite StartBool Start Start)))
   (StartBool Bool ((and StartBool StartBool) (not StartBool) (<= Start Start) (>= Start Start)))))
(declare-var x Int)
(declare-var y Int)
(constraint (>= (max2 x y) x))
(constraint (>= (max2 x y) y))
(constraint (or (= x (max2 x y)) (= y (max2 x y))))
(check-synth)
"""

requires_smt = pytest.mark.skipif(shutil.which("z3") is None, reason="no z3 binary on PATH")


@pytest.fixture(scope="session")
def session():
    if shutil.which("z3") is None:
        pytest.skip("no z3 binary on PATH")
    return SmtSession.create(timeout=30)


@pytest.fixture
def max2():
    from syguskit.parser import parse_problem

    return parse_problem(MAX2)


# one summary line per acceptance criterion, shown after the test run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
