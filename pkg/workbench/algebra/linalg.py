"""Exact matrices over QQ with Fraction entries.

Elimination picks, within each column, the pivot of lowest height
max(|numerator|, denominator) to keep coefficient growth down.
"""

from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

Vector = List[Fraction]


def height(x: Fraction) -> int:
    return max(abs(x.numerator), x.denominator)


class Matrix:
    def __init__(self, rows: int, cols: int, data: Optional[Sequence[Sequence]] = None):
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = [[Fraction(0)] * cols for _ in range(rows)]
        else:
            self.data = [[Fraction(x) for x in row] for row in data]
            if len(self.data) != rows or any(len(row) != cols for row in self.data):
                raise ValueError(f"expected a {rows}x{cols} matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        m = cls(n, n)
        for i in range(n):
            m.data[i][i] = Fraction(1)
        return m

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        m = cls(rows, len(columns))
        for j, col in enumerate(columns):
            for i, x in enumerate(col):
                m.data[i][j] = Fraction(x)
        return m

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def copy(self) -> "Matrix":
        return Matrix(self.rows, self.cols, self.data)

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def __setitem__(self, idx, value):
        i, j = idx
        self.data[i][j] = Fraction(value)

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.shape == other.shape and self.data == other.data

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, {[[str(x) for x in r] for r in self.data]})"

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        result = Matrix(self.rows, other.cols)
        for i, row in enumerate(self.data):
            out = result.data[i]
            for k, a in enumerate(row):
                if a:
                    for j, b in enumerate(other.data[k]):
                        if b:
                            out[j] += a * b
        return result

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix(
            self.rows,
            self.cols,
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
        )

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [[-a for a in r] for r in self.data])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = Fraction(c)
        return Matrix(self.rows, self.cols, [[c * a for a in r] for r in self.data])

    def apply(self, v: Sequence) -> Vector:
        return [sum((a * Fraction(x) for a, x in zip(row, v)), Fraction(0)) for row in self.data]

    def transpose(self) -> "Matrix":
        columns = [[row[j] for row in self.data] for j in range(self.cols)]
        return Matrix(self.cols, self.rows, columns)

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.data)

    def hstack(self, other: "Matrix") -> "Matrix":
        joined = [r + s for r, s in zip(self.data, other.data)]
        return Matrix(self.rows, self.cols + other.cols, joined)

    def column(self, j: int) -> Vector:
        return [row[j] for row in self.data]

    def rref(self) -> Tuple["Matrix", List[int]]:
        """Reduced row echelon form and pivot columns"""
        A = [list(row) for row in self.data]
        pivots: List[int] = []
        r = 0
        for c in range(self.cols):
            if r >= self.rows:
                break
            candidates = [i for i in range(r, self.rows) if A[i][c]]
            if not candidates:
                continue
            p = min(candidates, key=lambda i: (height(A[i][c]), i))
            A[r], A[p] = A[p], A[r]
            lead = A[r][c]
            A[r] = [x / lead for x in A[r]]
            for i in range(self.rows):
                if i != r and A[i][c]:
                    factor = A[i][c]
                    A[i] = [x - factor * y for x, y in zip(A[i], A[r])]
            pivots.append(c)
            r += 1
        return Matrix(self.rows, self.cols, A), pivots

    def rank(self) -> int:
        if not self.rows or not self.cols:
            return 0
        return len(self.rref()[1])

    def nullspace(self) -> List[Vector]:
        """A basis of the kernel, one vector per free column"""
        R, pivots = self.rref()
        free = [j for j in range(self.cols) if j not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for row, p in enumerate(pivots):
                v[p] = -R.data[row][f]
            basis.append(v)
        return basis

    def solve(self, b: Sequence) -> Optional[Vector]:
        """One solution of self * x = b, or None"""
        augmented = self.hstack(Matrix(self.rows, 1, [[x] for x in b]))
        R, pivots = augmented.rref()
        if self.cols in pivots:
            return None
        x = [Fraction(0)] * self.cols
        for row, p in enumerate(pivots):
            x[p] = R.data[row][self.cols]
        return x

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("only square matrices are invertible")
        R, pivots = self.hstack(Matrix.identity(self.rows)).rref()
        if pivots[: self.rows] != list(range(self.rows)):
            raise ValueError("matrix is singular")
        return Matrix(self.rows, self.rows, [row[self.cols :] for row in R.data])


def independent_extension(base: List[Vector], candidates: Iterable[Vector], length: int) -> List[Vector]:
    """Candidates, in order, that are independent of base and of each other"""
    chosen: List[Vector] = []
    current = list(base)
    rank = Matrix.from_columns(current, length).rank() if current else 0
    for v in candidates:
        trial = current + [v]
        new_rank = Matrix.from_columns(trial, length).rank()
        if new_rank > rank:
            chosen.append(v)
            current = trial
            rank = new_rank
    return chosen
