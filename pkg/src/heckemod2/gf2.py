"""Dense GF(2) linear algebra on bit-packed square matrices.

Rows are Python ints used as bit vectors (bit j of rows[i] is entry (i, j)),
so XOR of two rows is a single bignum operation.  Rank and multiplication use
the method of four Russians (table-driven elimination / combination), checked
against naive Gaussian elimination in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


def _table_width(n: int) -> int:
    """Lookup-table width: max(1, floor(log2 n) - 2), clamped to 8."""
    if n <= 1:
        return 1
    return min(8, max(1, n.bit_length() - 1 - 2))


@dataclass
class BitMatrix:
    """Square matrix over GF(2); bits beyond column n are kept at zero."""

    n: int
    rows: list[int]

    def __post_init__(self) -> None:
        if len(self.rows) != self.n:
            raise ValueError("row count does not match dimension")
        mask = (1 << self.n) - 1
        if any(r & ~mask for r in self.rows):
            raise ValueError("stray bits beyond column n")

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.n, list(self.rows))

    def get(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def xor_identity(self) -> "BitMatrix":
        """Return self + I."""
        return BitMatrix(self.n, [r ^ (1 << i) for i, r in enumerate(self.rows)])

    def to_text(self) -> str:
        """Debug dump: one line of '0'/'1' characters per row."""
        return "\n".join(
            "".join("1" if (r >> j) & 1 else "0" for j in range(self.n))
            for r in self.rows
        )

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, [1 << i for i in range(n)])


def reduce_mod2(entries: Sequence[Sequence[int]]) -> BitMatrix:
    """Reduce a square integer matrix mod 2 into a BitMatrix."""
    n = len(entries)
    rows = []
    for row in entries:
        if len(row) != n:
            raise ValueError("matrix is not square")
        acc = 0
        for j, v in enumerate(row):
            if v & 1:
                acc |= 1 << j
        rows.append(acc)
    return BitMatrix(n, rows)


def rank(m: BitMatrix) -> int:
    """Rank over GF(2) by four-Russians elimination in column strips."""
    n = m.n
    if n == 0:
        return 0
    rows = list(m.rows)
    k = _table_width(n)
    top = 0  # rows[:top] are settled pivot rows
    col = 0
    while col < n and top < n:
        kk = min(k, n - col)
        piv_cols: list[int] = []
        piv_rows: list[int] = []
        for j in range(col, col + kk):
            found = -1
            for ri in range(top + len(piv_cols), n):
                r = rows[ri]
                for jj, pr in zip(piv_cols, piv_rows):
                    if (r >> jj) & 1:
                        r ^= pr
                if (r >> j) & 1:
                    rows[ri] = r
                    found = ri
                    break
                rows[ri] = r
            if found < 0:
                continue
            dst = top + len(piv_cols)
            rows[found], rows[dst] = rows[dst], rows[found]
            new = rows[dst]
            # keep the strip pivots mutually reduced so one lookup clears all
            for idx, jj in enumerate(piv_cols):
                if (piv_rows[idx] >> j) & 1:
                    piv_rows[idx] ^= new
                    rows[top + idx] = piv_rows[idx]
            piv_cols.append(j)
            piv_rows.append(new)
        t = len(piv_cols)
        if t:
            table = [0] * (1 << t)
            for b in range(t):
                bit = 1 << b
                prow = piv_rows[b]
                for g in range(bit):
                    table[bit | g] = table[g] ^ prow
            for ri in range(top + t, n):
                r = rows[ri]
                key = 0
                for b, jj in enumerate(piv_cols):
                    key |= ((r >> jj) & 1) << b
                if key:
                    rows[ri] = r ^ table[key]
            top += t
        col += kk
    return top


def multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Four-Russians product a*b (entry (i,j) = sum_k a[i,k] b[k,j])."""
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    n = a.n
    if n == 0:
        return BitMatrix(0, [])
    k = _table_width(n)
    out = [0] * n
    brows = b.rows
    for g0 in range(0, n, k):
        t = min(k, n - g0)
        table = [0] * (1 << t)
        for bb in range(t):
            bit = 1 << bb
            prow = brows[g0 + bb]
            for g in range(bit):
                table[bit | g] = table[g] ^ prow
        mask = (1 << t) - 1
        for i in range(n):
            key = (a.rows[i] >> g0) & mask
            if key:
                out[i] ^= table[key]
    return BitMatrix(n, out)


def generalized_multiplicity(m: BitMatrix, alpha: int) -> int:
    """Multiplicity of alpha in {0,1} as a generalized eigenvalue of m.

    Computes n - rank((m - alpha*I)^k) for a stabilized power k, squaring at
    most ceil(log2 n) + 1 times and stopping early once the rank is unchanged
    by a squaring.
    """
    if alpha not in (0, 1):
        raise ValueError("alpha must be 0 or 1")
    n = m.n
    if n == 0:
        return 0
    p = m.xor_identity() if alpha else m.copy()
    r = rank(p)
    max_squarings = max(1, (n - 1).bit_length()) + 1
    for _ in range(max_squarings):
        if r == n:
            break
        p = multiply(p, p)
        r2 = rank(p)
        if r2 == r:
            break
        r = r2
    return n - r


@dataclass
class EigenReport:
    """Mod-2 eigenvalue data of one matrix: ranks, multiplicities, presence."""

    n: int
    rank0: int
    rank1: int
    mult0: int
    mult1: int
    has0: bool
    has1: bool


def analyze(m: BitMatrix) -> EigenReport:
    """Full eigenvalue report for eigenvalues 0 and 1 of m over GF(2)."""
    n = m.n
    r0 = rank(m)
    r1 = rank(m.xor_identity())
    m0 = generalized_multiplicity(m, 0)
    m1 = generalized_multiplicity(m, 1)
    rep = EigenReport(
        n=n, rank0=r0, rank1=r1, mult0=m0, mult1=m1, has0=r0 < n, has1=r1 < n
    )
    assert rep.mult0 >= n - r0 and rep.mult1 >= n - r1
    assert rep.mult0 + rep.mult1 <= n
    assert rep.has0 == (rep.mult0 > 0) and rep.has1 == (rep.mult1 > 0)
    return rep


__all__ = [
    "BitMatrix",
    "EigenReport",
    "reduce_mod2",
    "rank",
    "multiply",
    "generalized_multiplicity",
    "analyze",
]
