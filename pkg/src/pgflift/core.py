"""Shared vocabulary for the whole package.

Exponent vectors are plain tuples of nonnegative ints, coefficients are either
exact `Fraction`s or Python floats (one mode per series, never mixed), and the
integer matrix that pushes a multi-index forward lives in `TransformMatrix`.
Everything downstream (series, transforms, conditioning, the brute-force
oracle) depends on this module and on nothing else inside the package.

Python ints are arbitrary precision, so exponent arithmetic cannot overflow;
there is deliberately no checked-arithmetic layer here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

EXACT = "exact"
FLOAT = "float"

# float-mode cleanup threshold: drops true zeros produced by cancellation,
# never used to round small genuine values
FLOAT_PURGE_EPS = 1e-300

Coefficient = Union[Fraction, float]


class DimensionMismatch(ValueError):
    """Vector length or matrix shape does not match what an operation needs."""


class TruncationError(ValueError):
    """A coefficient was requested, or required, outside the retained box."""


class ExactModeError(ValueError):
    """An operation has no exact-rational result for the given input."""


class FiberError(ValueError):
    """Base class for failures of conditioning on a target vector."""


class EmptyFiber(FiberError):
    """No nonnegative integer solution to matrix @ j == target exists."""


class ZeroProbability(FiberError):
    """Solutions exist, but the event conditioned on carries zero mass."""


class UnboundedFiber(FiberError):
    """The solution set is infinite and no support bound was supplied."""


def check_exponents(entries: Sequence[int]) -> tuple:
    """Return `entries` as a tuple after checking every entry is an int >= 0."""
    out = tuple(entries)
    for e in out:
        if not isinstance(e, int) or isinstance(e, bool) or e < 0:
            raise ValueError(f"exponents must be nonnegative integers, got {entries!r}")
    return out


def check_bounds(bounds: Sequence[int], num_vars: int) -> tuple:
    """Validate per-variable truncation bounds (one int >= 0 per variable)."""
    out = check_exponents(bounds)
    if len(out) != num_vars:
        raise DimensionMismatch(
            f"expected {num_vars} truncation bounds, got {len(out)}"
        )
    return out


def within_box(exponents: Sequence[int], bounds: Sequence[int]) -> bool:
    return all(e <= b for e, b in zip(exponents, bounds))


def as_exact(value) -> Fraction:
    """Coerce to Fraction. Floats are rejected: their binary expansion is
    almost never what an exact-mode caller meant. Use a string literal
    ("0.3", "1/3") or a Fraction instead."""
    if isinstance(value, float):
        raise ExactModeError(
            f"refusing to coerce float {value!r} to an exact rational; "
            "pass a string or Fraction"
        )
    return Fraction(value)


def coerce_coefficient(value, mode: str) -> Coefficient:
    if mode == EXACT:
        return as_exact(value)
    if mode == FLOAT:
        return float(value)
    raise ValueError(f"unknown coefficient mode {mode!r}")


def coefficient_is_zero(value: Coefficient, mode: str) -> bool:
    if mode == EXACT:
        return value == 0
    return abs(value) < FLOAT_PURGE_EPS


@dataclass(frozen=True)
class TransformMatrix:
    """Nonnegative integer matrix mapping source multi-indices to target ones.

    `rows[i][r]` is the weight of source coordinate r in target coordinate i.
    The matrix acts on exponent vectors via `image` and on nothing else; it is
    shape-validated at construction and immutable afterwards.
    """

    rows: tuple

    def __init__(self, rows: Iterable[Sequence[int]]):
        frozen = tuple(tuple(row) for row in rows)
        if not frozen or not frozen[0]:
            raise ValueError("matrix needs at least one row and one column")
        width = len(frozen[0])
        for row in frozen:
            if len(row) != width:
                raise DimensionMismatch("matrix rows have unequal lengths")
            for a in row:
                if not isinstance(a, int) or isinstance(a, bool) or a < 0:
                    raise ValueError(
                        f"matrix entries must be nonnegative integers, got {a!r}"
                    )
        object.__setattr__(self, "rows", frozen)

    @property
    def num_targets(self) -> int:
        return len(self.rows)

    @property
    def num_sources(self) -> int:
        return len(self.rows[0])

    def column(self, r: int) -> tuple:
        return tuple(row[r] for row in self.rows)

    def zero_columns(self) -> tuple:
        """Indices of source coordinates the matrix ignores entirely."""
        return tuple(
            r for r in range(self.num_sources) if all(row[r] == 0 for row in self.rows)
        )

    def image(self, exponents: Sequence[int]) -> tuple:
        return monomial_image(self, exponents)


def monomial_image(matrix: TransformMatrix, exponents: Sequence[int]) -> tuple:
    """Push a source exponent vector forward: component i is sum_r a[i][r]*j[r].

    This is the exponent bookkeeping behind substituting a monomial for each
    source variable: t_r -> prod_i z_i^(a[i][r]) sends z-degree j to image(j).
    """
    j = check_exponents(exponents)
    if len(j) != matrix.num_sources:
        raise DimensionMismatch(
            f"exponent vector has length {len(j)}, matrix has "
            f"{matrix.num_sources} source coordinates"
        )
    return tuple(sum(a * e for a, e in zip(row, j)) for row in matrix.rows)


def fiber_degree_bounds(matrix: TransformMatrix, target: Sequence[int]):
    """Largest value each source coordinate can take inside the fiber box.

    For a target box bounded by `target`, coordinate r of any solution of
    image(j) <= target satisfies j_r <= min over rows i with a[i][r] > 0 of
    target_i // a[i][r]. Columns of zeros constrain nothing: the bound for
    those coordinates is None (infinite).
    """
    k = check_exponents(target)
    if len(k) != matrix.num_targets:
        raise DimensionMismatch(
            f"target has length {len(k)}, matrix has {matrix.num_targets} rows"
        )
    bounds = []
    for r in range(matrix.num_sources):
        col = matrix.column(r)
        caps = [k[i] // a for i, a in enumerate(col) if a > 0]
        bounds.append(min(caps) if caps else None)
    return bounds
