"""Expert pairwise-comparison matrices: geometric-mean aggregation and the
consistency gate.

The consistency index divides by the matrix order by default ("paper"
mode); the conventional Saaty denominator of order-1 is available as
"standard" mode.  Both are recorded in the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptyInput,
    InvalidMatrix,
    MissingRI,
    NoConvergence,
    OrderMismatch,
)

#: a_ij * a_ji must equal 1 within this tolerance
RECIPROCITY_TOL = 1e-9

#: published random indices for orders 1..10 (override via a JSON table file)
DEFAULT_RI: dict[int, float] = {
    1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12,
    6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49,
}

#: CR below this passes the gate
CR_THRESHOLD = 0.1

CI_DENOMINATOR_MODES = ("paper", "standard")


@dataclass(frozen=True, eq=False)
class PairwiseMatrix:
    """A positive reciprocal judgment matrix (a_ij = 1/a_ji, unit diagonal)."""

    values: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.values, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
        n = a.shape[0]
        if n < 2:
            raise InvalidMatrix(f"order must be at least 2, got {n}")
        if not np.all(np.isfinite(a)) or np.any(a <= 0.0):
            raise InvalidMatrix("all entries must be positive finite reals")
        for i in range(n):
            for j in range(i, n):
                if abs(a[i, j] * a[j, i] - 1.0) > RECIPROCITY_TOL:
                    raise InvalidMatrix(
                        f"reciprocity violated at ({i + 1},{j + 1})/({j + 1},{i + 1}): "
                        f"{a[i, j]!r} * {a[j, i]!r} != 1")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "values", a)

    @property
    def order(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairwiseMatrix):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.array_equal(self.values, other.values))


@dataclass(frozen=True)
class ConsistencyReport:
    """lambda_max and the derived CI/CR verdict for one matrix."""

    order: int
    lambda_max: float
    ci: float
    ri: float
    cr: float
    acceptable: bool
    denominator_mode: str

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "lambda_max": self.lambda_max,
            "ci": self.ci,
            "ri": self.ri,
            "cr": self.cr,
            "acceptable": self.acceptable,
            "denominator_mode": self.denominator_mode,
        }


def aggregate_geometric(matrices: Sequence[PairwiseMatrix]) -> PairwiseMatrix:
    """Entrywise geometric mean of expert matrices.

    The mean of reciprocal matrices is reciprocal; the lower triangle is
    rebuilt from the upper one so the result is reciprocal to the last bit.
    """
    if len(matrices) == 0:
        raise EmptyInput("need at least one matrix to aggregate")
    n = matrices[0].order
    for pos, m in enumerate(matrices):
        if m.order != n:
            raise OrderMismatch(f"matrix {pos} has order {m.order}, expected {n}")
    stack = np.stack([m.values for m in matrices])
    mean = np.exp(np.log(stack).mean(axis=0))
    for i in range(n):
        mean[i, i] = 1.0
        for j in range(i + 1, n):
            mean[j, i] = 1.0 / mean[i, j]
    return PairwiseMatrix(mean)


def principal_eigenvalue(m: PairwiseMatrix, tol: float = 1e-12,
                         max_iter: int = 10_000) -> float:
    """Dominant eigenvalue of a positive matrix by power iteration.

    Starts from the uniform vector and stops when successive eigenvalue
    estimates differ by at most ``tol``.  Positive matrices have a simple
    dominant eigenvalue, so the iteration converges; hitting the cap is
    reported as an error carrying the last estimate.
    """
    a = m.values
    n = m.order
    x = np.full(n, 1.0 / n)
    estimate = math.inf
    for _ in range(max_iter):
        y = a @ x
        total = float(y.sum())
        new_estimate = total  # x sums to 1 and stays positive
        x = y / total
        if abs(new_estimate - estimate) <= tol:
            return new_estimate
        estimate = new_estimate
    raise NoConvergence(
        f"power iteration did not converge in {max_iter} iterations "
        f"(last estimate {estimate!r})", last_estimate=estimate)


def consistency(m: PairwiseMatrix, ri_table: Mapping[int, float] | None = None,
                denominator_mode: str = "paper") -> ConsistencyReport:
    """Consistency report: CI = (lambda_max - n) / denominator, CR = CI / RI.

    ``denominator_mode`` picks the CI denominator: "paper" divides by n,
    "standard" by n - 1.  Orders 1 and 2 are always consistent (CR = 0).
    """
    if denominator_mode not in CI_DENOMINATOR_MODES:
        raise ValueError(f"denominator_mode must be one of {CI_DENOMINATOR_MODES}, "
                         f"got {denominator_mode!r}")
    table = DEFAULT_RI if ri_table is None else ri_table
    n = m.order
    if n not in table:
        raise MissingRI(f"no random index for order {n}")
    ri = float(table[n])
    lambda_max = principal_eigenvalue(m)
    denominator = n if denominator_mode == "paper" else n - 1
    ci = (lambda_max - n) / denominator
    if n <= 2 or ri == 0.0:
        cr = 0.0
    else:
        cr = ci / ri
    return ConsistencyReport(order=n, lambda_max=lambda_max, ci=ci, ri=ri,
                             cr=cr, acceptable=cr < CR_THRESHOLD,
                             denominator_mode=denominator_mode)
