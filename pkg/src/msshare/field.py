"""Exact arithmetic and linear algebra over a prime field F_q.

Elements are plain Python ints reduced into [0, q); a Field instance carries
the modulus and provides the arithmetic.  Matrices are immutable row-major
grids.  Everything is exact: inverses come from pow(x, -1, q), there is no
floating point anywhere, and rank/solve run plain Gaussian elimination.
Sizes here are tiny (tens of rows), so clarity wins over speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InconsistentSystem, ModulusTooSmall, NonPrimeModulus

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for every n below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Field:
    """The prime field F_q.

    q must be prime and at least 3: replacement coefficients need an element
    outside {0, 1}, which F_2 cannot supply.
    """

    q: int

    def __post_init__(self) -> None:
        if self.q < 3:
            raise ModulusTooSmall(f"modulus {self.q} < 3: no element outside {{0, 1}}")
        if not is_prime(self.q):
            raise NonPrimeModulus(f"modulus {self.q} is not prime")

    def element(self, value: int) -> int:
        return value % self.q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroDivisionError("inverse of 0 in F_q")
        return pow(a, -1, self.q)

    def vector(self, values: Iterable[int]) -> tuple[int, ...]:
        return tuple(v % self.q for v in values)


@dataclass(frozen=True)
class Matrix:
    """Immutable matrix over F_q with row-major tuple-of-tuples entries."""

    field: Field
    entries: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence[int]]) -> "Matrix":
        reduced = tuple(field.vector(row) for row in rows)
        widths = {len(r) for r in reduced}
        if len(widths) > 1:
            raise ValueError("ragged rows")
        return cls(field, reduced)

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def transpose(self) -> "Matrix":
        return Matrix(self.field, tuple(zip(*self.entries)) if self.entries else ())

    def stack(self, extra_rows: Sequence[Sequence[int]]) -> "Matrix":
        return Matrix.from_rows(self.field, list(self.entries) + list(extra_rows))

    def zero_column(self, j: int) -> "Matrix":
        """Copy with column j multiplied by 0."""
        rows = tuple(tuple(0 if c == j else v for c, v in enumerate(r)) for r in self.entries)
        return Matrix(self.field, rows)

    def matmul(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        q = self.field.q
        cols = other.transpose().entries
        rows = tuple(
            tuple(sum(a * b for a, b in zip(r, c)) % q for c in cols) for r in self.entries
        )
        return Matrix(self.field, rows)

    def apply(self, x: Sequence[int]) -> tuple[int, ...]:
        if self.entries and len(x) != self.ncols:
            raise ValueError("shape mismatch")
        q = self.field.q
        return tuple(sum(a * b for a, b in zip(r, x)) % q for r in self.entries)

    def rank(self) -> int:
        return self.rank_profile()[0]

    def rank_profile(self) -> tuple[int, tuple[tuple[int, int], ...]]:
        """Rank plus the pivot positions as (original row, column) pairs.

        The pivots certify the rank: the square submatrix they select is
        invertible, which any third party can confirm by a determinant.
        """
        q = self.field.q
        work = [list(r) for r in self.entries]
        origin = list(range(len(work)))
        pivots: list[tuple[int, int]] = []
        r = 0
        for col in range(self.ncols):
            pivot_row = next((i for i in range(r, len(work)) if work[i][col] != 0), None)
            if pivot_row is None:
                continue
            work[r], work[pivot_row] = work[pivot_row], work[r]
            origin[r], origin[pivot_row] = origin[pivot_row], origin[r]
            pivots.append((origin[r], col))
            inv = pow(work[r][col], -1, q)
            work[r] = [v * inv % q for v in work[r]]
            for i in range(len(work)):
                if i != r and work[i][col]:
                    f = work[i][col]
                    work[i] = [(a - f * b) % q for a, b in zip(work[i], work[r])]
            r += 1
            if r == len(work):
                break
        return r, tuple(pivots)

    def row_space_contains(self, vector: Sequence[int]) -> bool:
        return self.stack([vector]).rank() == self.rank()


@dataclass(frozen=True)
class SolutionSpace:
    """All solutions of A x = b: particular + span of the nullspace basis."""

    particular: tuple[int, ...]
    nullspace: tuple[tuple[int, ...], ...]

    def coordinate_determined(self, j: int) -> bool:
        """True when x_j takes the same value in every solution."""
        return all(v[j] == 0 for v in self.nullspace)


def solve(a: Matrix, b: Sequence[int]) -> SolutionSpace:
    """Solve a x = b over F_q or raise InconsistentSystem.

    Free variables get value 0 in the particular solution; the nullspace
    basis has one vector per free column.
    """
    if len(b) != a.nrows:
        raise ValueError("right-hand side length mismatch")
    q = a.field.q
    n = a.ncols
    work = [list(row) + [rhs % q] for row, rhs in zip(a.entries, b)]
    pivot_cols: list[int] = []
    r = 0
    for col in range(n):
        pivot_row = next((i for i in range(r, len(work)) if work[i][col] != 0), None)
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        inv = pow(work[r][col], -1, q)
        work[r] = [v * inv % q for v in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col]:
                f = work[i][col]
                work[i] = [(x - f * y) % q for x, y in zip(work[i], work[r])]
        pivot_cols.append(col)
        r += 1
        if r == len(work):
            break
    for i in range(r, len(work)):
        if work[i][n] != 0:
            raise InconsistentSystem("no solution: right-hand side outside column space")

    particular = [0] * n
    for i, col in enumerate(pivot_cols):
        particular[col] = work[i][n]

    free_cols = [c for c in range(n) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        vec = [0] * n
        vec[fc] = 1
        for i, col in enumerate(pivot_cols):
            vec[col] = (-work[i][fc]) % q
        basis.append(tuple(vec))
    return SolutionSpace(tuple(particular), tuple(basis))


def identity(field: Field, n: int) -> Matrix:
    return Matrix(field, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))


def unit_vector(length: int, index: int, value: int = 1) -> tuple[int, ...]:
    vec = [0] * length
    vec[index] = value
    return tuple(vec)
