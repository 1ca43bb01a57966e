"""Sorts of the supported background theories."""

from __future__ import annotations

from dataclasses import dataclass


class SortError(Exception):
    """Raised when a term is ill-sorted; ``term`` is the offending subterm."""

    def __init__(self, message: str, term: "Term | None" = None):
        super().__init__(message)
        self.term = term


@dataclass(frozen=True, slots=True)
class Sort:
    kind: str  # "Bool" | "Int" | "BitVec" | "String"
    width: int | None = None

    def __post_init__(self):
        if self.kind == "BitVec":
            if self.width is None or self.width < 1:
                raise ValueError(f"bit-vector width must be positive, got {self.width}")
        elif self.kind in ("Bool", "Int", "String"):
            if self.width is not None:
                raise ValueError(f"sort {self.kind} takes no width")
        else:
            raise ValueError(f"unknown sort {self.kind}")

    @property
    def is_bv(self) -> bool:
        return self.kind == "BitVec"

    def __str__(self) -> str:
        if self.kind == "BitVec":
            return f"(BitVec {self.width})"
        return self.kind

    def smtlib(self) -> str:
        if self.kind == "BitVec":
            return f"(_ BitVec {self.width})"
        return self.kind


BOOL = Sort("Bool")
INT = Sort("Int")
STRING = Sort("String")


def bv(width: int) -> Sort:
    return Sort("BitVec", width)
