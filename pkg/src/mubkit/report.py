"""Named pass/fail checks collected by the verification suites."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class Check:
    name: str
    max_residual: float
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "max_residual": self.max_residual, "pass": self.passed}

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}  (max residual {self.max_residual:.3e})"


def residual_check(name: str, residual: float, tol: float) -> Check:
    residual = float(residual)
    return Check(name, residual, residual < tol)


def boolean_check(name: str, ok: bool) -> Check:
    return Check(name, 0.0 if ok else 1.0, bool(ok))
