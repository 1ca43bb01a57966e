"""The desk benchmark suite and its solution mutations."""

from conftest import DESK

NAMES = sorted(p.stem for p in DESK.glob("*.sl"))
MUTATIONS = ("swap", "perturb", "oog")


def problem_text(name: str) -> str:
    return (DESK / f"{name}.sl").read_text()


def solution_text(name: str, mutation: str | None = None) -> str:
    suffix = f".{mutation}" if mutation else ""
    return (DESK / "solutions" / f"{name}{suffix}.sol").read_text()
