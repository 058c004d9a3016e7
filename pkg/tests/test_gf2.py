import random

import pytest

from heckemod2.gf2 import (
    BitMatrix,
    analyze,
    generalized_multiplicity,
    multiply,
    rank,
    reduce_mod2,
)


def naive_rank(m: BitMatrix) -> int:
    """Schoolbook Gaussian elimination, used as an independent oracle."""
    rows = list(m.rows)
    r = 0
    for col in range(m.n):
        piv = next((i for i in range(r, len(rows)) if (rows[i] >> col) & 1), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and (rows[i] >> col) & 1:
                rows[i] ^= rows[r]
        r += 1
    return r


def naive_multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    out = []
    for i in range(a.n):
        acc = 0
        for kk in range(a.n):
            if (a.rows[i] >> kk) & 1:
                acc ^= b.rows[kk]
        out.append(acc)
    return BitMatrix(a.n, out)


def charpoly_mod2(m: BitMatrix) -> list[int]:
    """Characteristic polynomial over GF(2) via exact integer Berkowitz.

    Returns coefficients of det(xI - M), lowest degree first, reduced mod 2.
    """
    n = m.n
    a = [[m.get(i, j) for j in range(n)] for i in range(n)]
    # Berkowitz: iteratively build the coefficient vector over Z.
    poly = [1]
    for k in range(1, n + 1):
        # principal k x k submatrix split into blocks
        row = [a[k - 1][j] for j in range(k - 1)]
        col = [a[i][k - 1] for i in range(k - 1)]
        diag = a[k - 1][k - 1]
        sub = [[a[i][j] for j in range(k - 1)] for i in range(k - 1)]
        # Toeplitz column: [1, -diag, -row*col, -row*sub*col, ...]
        t = [1, -diag]
        v = col
        for _ in range(k - 1):
            t.append(-sum(x * y for x, y in zip(row, v)))
            v = [sum(sub[i][j] * v[j] for j in range(k - 1)) for i in range(k - 1)]
        new = [0] * (k + 1)
        for i, c in enumerate(poly):
            for j, tc in enumerate(t):
                if i + j <= k:
                    new[i + j] += c * tc
        poly = new
    # poly holds charpoly coefficients highest-degree-first; normalize mod 2
    coeffs = [c % 2 for c in reversed(poly)]
    return coeffs


def root_multiplicity_mod2(coeffs: list[int], alpha: int) -> int:
    """Multiplicity of alpha as a root of a GF(2)[x] polynomial."""
    if alpha == 1:
        # substitute x -> x + 1 over GF(2); (x+1)^i expands by binomial parity
        from math import comb

        n = len(coeffs)
        shifted = [0] * n
        for i, c in enumerate(coeffs):
            if c:
                for j in range(i + 1):
                    if comb(i, j) % 2:
                        shifted[j] ^= 1
        coeffs = shifted
    k = 0
    while k < len(coeffs) - 1 and coeffs[k] == 0:
        k += 1
    return k


def random_bitmatrix(rng: random.Random, n: int) -> BitMatrix:
    return BitMatrix(n, [rng.getrandbits(n) for _ in range(n)])


def test_reduce_mod2_examples():
    assert reduce_mod2([[-2]]).rows == [0]
    assert reduce_mod2([[-1]]).rows == [1]
    empty = reduce_mod2([])
    assert empty.n == 0 and empty.rows == []


def test_rank_trivial():
    assert rank(BitMatrix.identity(3)) == 3
    assert rank(BitMatrix(2, [0b11, 0b11])) == 1
    assert rank(BitMatrix(0, [])) == 0


@pytest.mark.parametrize("n", [1, 2, 7, 63, 64, 65, 256])
def test_rank_matches_naive(n):
    rng = random.Random(1000 + n)
    for _ in range(60):
        m = random_bitmatrix(rng, n)
        assert rank(m) == naive_rank(m)


@pytest.mark.parametrize("n", [1, 3, 17, 100, 512])
def test_rank_transpose(n):
    rng = random.Random(2000 + n)
    for _ in range(10):
        m = random_bitmatrix(rng, n)
        t = BitMatrix(
            n, [sum(((m.rows[i] >> j) & 1) << i for i in range(n)) for j in range(n)]
        )
        assert rank(m) == rank(t)


@pytest.mark.parametrize("n", [1, 2, 5, 31, 64, 128])
def test_multiply_matches_schoolbook(n):
    rng = random.Random(3000 + n)
    for _ in range(8):
        a = random_bitmatrix(rng, n)
        b = random_bitmatrix(rng, n)
        assert multiply(a, b).rows == naive_multiply(a, b).rows


def test_generalized_multiplicity_trivial():
    # nilpotent of index 2
    m = BitMatrix(2, [0b10, 0b00])
    assert generalized_multiplicity(m, 0) == 2
    # companion of x^2 + x + 1: no GF(2) eigenvalues
    m = BitMatrix(2, [0b10, 0b11])
    assert generalized_multiplicity(m, 0) == 0
    assert generalized_multiplicity(m, 1) == 0


@pytest.mark.parametrize("n", [1, 2, 3, 8, 16, 33, 64])
def test_generalized_multiplicity_matches_charpoly(n):
    rng = random.Random(4000 + n)
    for _ in range(25):
        m = random_bitmatrix(rng, n)
        coeffs = charpoly_mod2(m)
        m0 = root_multiplicity_mod2(coeffs, 0)
        m1 = root_multiplicity_mod2(coeffs, 1)
        assert generalized_multiplicity(m, 0) == m0
        assert generalized_multiplicity(m, 1) == m1
        # multiplicities plus the root-free part fill the whole polynomial
        rep = analyze(m)
        assert rep.mult0 == m0 and rep.mult1 == m1
        assert rep.mult0 + rep.mult1 <= n


def test_analyze_empty():
    rep = analyze(BitMatrix(0, []))
    assert rep.n == 0
    assert rep.rank0 == rep.rank1 == rep.mult0 == rep.mult1 == 0
    assert not rep.has0 and not rep.has1


def test_analyze_consistency_random():
    rng = random.Random(99)
    for _ in range(40):
        n = rng.randrange(1, 40)
        rep = analyze(random_bitmatrix(rng, n))
        assert rep.has0 == (rep.rank0 < n)
        assert rep.has1 == (rep.rank1 < n)
        assert rep.mult0 >= n - rep.rank0
        assert rep.mult1 >= n - rep.rank1


def test_to_text():
    m = BitMatrix(2, [0b01, 0b10])
    assert m.to_text() == "10\n01"


def test_generalized_multiplicity_from_hecke_matrix():
    # the level-11 Hecke matrix (-2) reduces to (0): eigenvalue 0, mult 1
    from heckemod2.modsym import build_space, hecke_matrix

    m = reduce_mod2(hecke_matrix(build_space(11), 2).entries)
    assert generalized_multiplicity(m, 0) == 1
    assert generalized_multiplicity(m, 1) == 0
    rep = analyze(m)
    assert rep.has0 and not rep.has1
