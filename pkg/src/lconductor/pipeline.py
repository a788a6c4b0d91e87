"""End-to-end setup for one discriminant: forms, coefficients, grid, evaluator."""

from __future__ import annotations

from dataclasses import dataclass

from . import forms as bqf
from .engine import Coefficients, Evaluator, TaylorGrid, build_grid, theta_evaluator
from .gfun import Precision
from .theta import CoeffTable, coefficient_rows


@dataclass
class ThetaRun:
    group: bqf.ClassGroup
    grid: TaylorGrid
    table: CoeffTable
    coeffs: Coefficients
    evaluator: Evaluator

    @property
    def chars(self):
        return self.table.chars

    def z(self, t, i=0):
        return self.evaluator.z(t, i)


def theta_run(q: int, D: int, chars="usable", normalization="ideal", paranoid=False,
              group: bqf.ClassGroup | None = None, table: CoeffTable | None = None) -> ThetaRun:
    """Class group, coefficient rows and a ready evaluator for discriminant -q."""
    grid = build_grid(q, D, paranoid=paranoid)
    G = group or bqf.class_group(q)
    if table is None or table.N < grid.N:
        table = coefficient_rows(G, grid.N, normalization=normalization, chars=chars, digits=D)
    p = Precision.for_conductor(D, q)
    ev, coeffs = theta_evaluator(table, grid, p)
    return ThetaRun(G, grid, table, coeffs, ev)
