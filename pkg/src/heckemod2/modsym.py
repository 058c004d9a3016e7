"""Modular symbols for Gamma0(N) at odd prime level N, weight 2.

Works on the plus quotient (star involution acting as +1), whose cuspidal
part has dimension g = dim S2(Gamma0(N)).  Manin symbols indexed by
P^1(Z/N) are merged through the two-term relations by a signed union-find;
the three-term relations are solved by exact sparse Gaussian elimination
over Z.  The Hecke action uses Merel's determinant-p matrix family.  The
integral structure is the image of the Manin-symbol lattice, so the
cuspidal lattice is saturated and every Hecke matrix on it is integral.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple

from .numth import is_prime, xgcd


class IntegralityViolation(Exception):
    """A Hecke matrix entry failed to be an integer after exact arithmetic."""


class P1Point(NamedTuple):
    c: int
    d: int


class P1:
    """The projective line P^1(Z/NZ) for N prime.

    Representatives are normalized so c is 0 or 1: index 0 is (0:1) and
    index 1+j is (1:j).
    """

    def __init__(self, n: int):
        self.n = n
        inv = [0] * n
        inv[1] = 1
        for i in range(2, n):
            inv[i] = (n - (n // i) * inv[n % i]) % n
        self._inv = inv
        self.points = [P1Point(0, 1)] + [P1Point(1, j) for j in range(n)]

    def __len__(self) -> int:
        return len(self.points)

    def index_of(self, c: int, d: int) -> int:
        """Index of the class of (c:d); ValueError on (0,0)."""
        n = self.n
        c %= n
        d %= n
        if c == 0:
            if d == 0:
                raise ValueError("(0,0) is not a projective point")
            return 0
        return 1 + d * self._inv[c] % n


def build_p1(n: int) -> P1:
    """P^1(Z/N) for an odd prime N."""
    _validate_level(n)
    return P1(n)


def _validate_level(n: int) -> None:
    if n < 3 or n % 2 == 0 or not is_prime(n):
        raise ValueError(f"level must be an odd prime >= 3, got {n}")


def genus(n: int) -> int:
    """Genus of X0(N) for N prime, i.e. dim S2(Gamma0(N))."""
    _validate_level(n)
    nu2 = 2 if n % 4 == 1 else 0
    if n == 3:
        nu3 = 1
    else:
        nu3 = 2 if n % 3 == 1 else 0
    val = Fraction(n + 1, 12) - Fraction(nu2, 4) - Fraction(nu3, 3)
    assert val.denominator == 1 and val >= 0
    return int(val)


def merel_family(n: int) -> list[tuple[int, int, int, int]]:
    """Merel's set of integer matrices of determinant n for the T_n action."""
    out = []
    for a in range(1, n + 1):
        for d in range((n + a - 1) // a, n + 2 - a):
            bc = a * d - n
            if bc == 0:
                for b in range(a):
                    out.append((a, b, 0, d))
                for c in range(1, d):
                    out.append((a, 0, c, d))
            else:
                for b in range((bc - 1) // (d - 1) + 1, a):
                    if bc % b == 0:
                        out.append((a, b, bc // b, d))
    return out


class _SignedUnionFind:
    """Union-find tracking x = +/- y identifications; conflicts kill a class."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.sign = [1] * size
        self.dead = [False] * size

    def find(self, x: int) -> tuple[int, int]:
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        s = 1
        for y in reversed(path):
            s *= self.sign[y]
            self.parent[y] = root
            self.sign[y] = s
        return root, s

    def union(self, x: int, y: int, s: int) -> None:
        """Impose value(x) = s * value(y)."""
        rx, sx = self.find(x)
        ry, sy = self.find(y)
        if rx == ry:
            if sx != s * sy:
                self.dead[rx] = True
            return
        self.parent[ry] = rx
        self.sign[ry] = sx * s * sy
        if self.dead[ry]:
            self.dead[rx] = True


@dataclass
class HeckeMatrix:
    """Exact integer matrix of T_p on the saturated cuspidal lattice."""

    p: int
    entries: list[list[int]]

    @property
    def n(self) -> int:
        return len(self.entries)

    def trace(self) -> int:
        return sum(self.entries[i][i] for i in range(self.n))


class ModularSymbolSpace:
    """Plus-quotient modular symbol space with its cuspidal integral basis.

    Attributes
    ----------
    level : the prime N
    genus : g = dim S2(Gamma0(N))
    dim_full : g + 1, dimension of the plus-quotient symbol space
    basis : symbol indices representing the free generating classes
    cuspidal_basis : vectors (in free-generator coordinates) spanning the
        saturated kernel of the boundary map
    lattice_note : description of the integral structure used
    """

    def __init__(self, n: int):
        _validate_level(n)
        self.level = n
        self.genus = genus(n)
        self.p1 = P1(n)
        self._build_relations()
        self._solve_relations()
        self._order_free()
        self._build_boundary()
        self._build_lattice()
        self._resolved: dict[int, dict[int, object]] = {}
        self._hecke_cache: dict[int, HeckeMatrix] = {}

    # -- construction -----------------------------------------------------

    def _build_relations(self) -> None:
        n = self.level
        p1 = self.p1
        m = len(p1)
        uf = _SignedUnionFind(m)
        idx = p1.index_of
        for i, (c, d) in enumerate(p1.points):
            uf.union(i, idx(c, -d), 1)  # star involution, plus quotient
            uf.union(i, idx(d, -c), -1)  # two-term relation x + xS = 0
        self._uf = uf
        # classes: surviving roots
        class_of: list[int | None] = [None] * m
        sign_of = [1] * m
        classes: list[int] = []
        cid_of_root: dict[int, int] = {}
        for i in range(m):
            r, s = uf.find(i)
            if uf.dead[r]:
                continue
            if r not in cid_of_root:
                cid_of_root[r] = len(classes)
                classes.append(r)
            class_of[i] = cid_of_root[r]
            sign_of[i] = s
        self._class_of = class_of
        self._sign_of = sign_of
        self._class_rep = classes  # cid -> root symbol index
        # three-term relations x + xT + xT^2 = 0 on the merged classes
        rows: list[dict[int, int]] = []
        seen_sig = set()
        seen_orbit = set()
        for i in range(m):
            if i in seen_orbit:
                continue
            c, d = p1.points[i]
            j = idx(d, -c - d)
            k = idx(-c - d, c)
            seen_orbit.update((i, j, k))
            row: dict[int, int] = {}
            for t in (i, j, k):
                cid = class_of[t]
                if cid is None:
                    continue
                row[cid] = row.get(cid, 0) + sign_of[t]
            row = {cid: v for cid, v in row.items() if v}
            if not row:
                continue
            content = 0
            for v in row.values():
                content = gcd(content, v)
            first = min(row)
            flip = -1 if row[first] < 0 else 1
            row = {cid: flip * v // content for cid, v in row.items()}
            sig = tuple(sorted(row.items()))
            if sig in seen_sig:
                continue
            seen_sig.add(sig)
            rows.append(row)
        self._rows = rows

    def _solve_relations(self) -> None:
        rows = self._rows
        ncls = len(self._class_rep)
        col_rows: dict[int, set[int]] = {}
        for rid, row in enumerate(rows):
            for c in row:
                col_rows.setdefault(c, set()).add(rid)
        alive = [True] * len(rows)
        heap = [(len(row), rid) for rid, row in enumerate(rows)]
        heapq.heapify(heap)
        pivots: list[tuple[int, int, list[tuple[int, int]]]] = []
        pivot_cols: set[int] = set()
        while heap:
            ln, rid = heapq.heappop(heap)
            if not alive[rid] or len(rows[rid]) != ln:
                continue
            row = rows[rid]
            if not row:
                alive[rid] = False
                continue
            # pivot choice: unit coefficient if possible, then low fill
            best = None
            for c, v in row.items():
                key = (0 if abs(v) == 1 else 1, abs(v), len(col_rows.get(c, ())), c)
                if best is None or key < best[0]:
                    best = (key, c)
            col = best[1]
            a = row[col]
            others = col_rows[col] - {rid}
            for rid2 in others:
                row2 = rows[rid2]
                b = row2.pop(col)
                col_rows[col].discard(rid2)
                if abs(a) == 1:
                    f = b if a == 1 else -b
                    for c2, v2 in row.items():
                        if c2 == col:
                            continue
                        nv = row2.get(c2, 0) - f * v2
                        if nv:
                            if c2 not in row2:
                                col_rows.setdefault(c2, set()).add(rid2)
                            row2[c2] = nv
                        elif c2 in row2:
                            del row2[c2]
                            col_rows[c2].discard(rid2)
                else:
                    for c2 in list(row2):
                        row2[c2] *= a
                    for c2, v2 in row.items():
                        if c2 == col:
                            continue
                        nv = row2.get(c2, 0) - b * v2
                        if nv:
                            if c2 not in row2:
                                col_rows.setdefault(c2, set()).add(rid2)
                            row2[c2] = nv
                        elif c2 in row2:
                            del row2[c2]
                            col_rows[c2].discard(rid2)
                    content = 0
                    for v2 in row2.values():
                        content = gcd(content, v2)
                    if content > 1:
                        for c2 in row2:
                            row2[c2] //= content
                heapq.heappush(heap, (len(row2), rid2))
            items = [(c, v) for c, v in row.items() if c != col]
            pivots.append((col, a, items))
            pivot_cols.add(col)
            for c in row:
                if c != col:
                    col_rows[c].discard(rid)
            del col_rows[col]
            alive[rid] = False
        self._pivots = pivots
        self._pivot_pos = {col: i for i, (col, _, _) in enumerate(pivots)}
        free = [cid for cid in range(ncls) if cid not in pivot_cols]
        self._free = free

    def _order_free(self) -> None:
        # the class of (0:1) carries the boundary; put it first
        cid0 = self._class_of[0]
        if cid0 is None or cid0 not in self._free:
            raise RuntimeError("the boundary-carrying class was eliminated")
        if cid0 in self._pivot_pos:
            raise RuntimeError("relation rows touched the boundary class")
        free = [cid0] + [c for c in self._free if c != cid0]
        self._free = free
        self._free_pos = {cid: i for i, cid in enumerate(free)}
        if len(free) != self.genus + 1:
            raise RuntimeError(
                f"quotient dimension {len(free)} != genus formula {self.genus + 1}"
            )
        self.dim_full = len(free)
        self.basis = [self._class_rep[cid] for cid in free]

    def _boundary_of_symbol(self, i: int) -> tuple[int, int]:
        """Coefficients of [infinity] and [0] in the boundary of symbol i."""
        c, d = self.p1.points[i]
        n = self.level
        # lift (c, d) to a coprime pair, complete to det-1 matrix [a b; c d]
        g, x, y = xgcd(d, c)
        assert g == 1
        a, b = x, -y
        assert a * d - b * c == 1
        binf = (1 if c % n == 0 else 0) - (1 if d % n == 0 else 0)
        bzero = (1 if c % n != 0 else 0) - (1 if d % n != 0 else 0)
        return binf, bzero

    def _build_boundary(self) -> None:
        binf = []
        bzero = []
        for cid in self._free:
            bi, bz = self._boundary_of_symbol(self._class_rep[cid])
            binf.append(bi)
            bzero.append(bz)
        if any(bi + bz != 0 for bi, bz in zip(binf, bzero)):
            raise RuntimeError("boundary is not degree zero")
        if abs(binf[0]) != 1 or any(v != 0 for v in binf[1:]):
            raise RuntimeError("boundary functional is not concentrated as expected")
        self._w = binf  # functional whose kernel is the cuspidal subspace

    # -- resolution of pivot classes into free coordinates -----------------

    def _resolve_pivots(self, needed: set[int]) -> None:
        """Back-substitute the needed pivot columns (dependencies included)."""
        pivots = self._pivots
        pos = self._pivot_pos
        need = [False] * len(pivots)
        stack = [pos[c] for c in needed if c in pos and c not in self._resolved]
        for i in stack:
            need[i] = True
        # mark dependencies: row of pivot i references only later pivots
        for i in range(len(pivots)):
            if not need[i]:
                continue
            if pivots[i][0] in self._resolved:
                need[i] = False
                continue
            for c, _ in pivots[i][2]:
                j = pos.get(c)
                if j is not None and pivots[j][0] not in self._resolved:
                    need[j] = True
        free_pos = self._free_pos
        resolved = self._resolved
        for i in range(len(pivots) - 1, -1, -1):
            if not need[i]:
                continue
            col, a, items = pivots[i]
            acc: dict[int, object] = {}
            for c, v in items:
                fp = free_pos.get(c)
                if fp is not None:
                    acc[fp] = acc.get(fp, 0) - v
                else:
                    for p2, v2 in resolved[c].items():
                        nv = acc.get(p2, 0) - v * v2
                        if nv:
                            acc[p2] = nv
                        elif p2 in acc:
                            del acc[p2]
            if a == 1:
                col_vec = {p2: v for p2, v in acc.items() if v}
            elif a == -1:
                col_vec = {p2: -v for p2, v in acc.items() if v}
            else:
                col_vec = {}
                for p2, v in acc.items():
                    fv = Fraction(v, a)
                    if fv.denominator == 1:
                        fv = int(fv)
                    if fv:
                        col_vec[p2] = fv
            resolved[col] = col_vec

    def rewrite(self, symbol_index: int) -> dict[int, object]:
        """Expression of a Manin symbol over the free basis, by position.

        Values are exact integers or Fractions; dead symbols give {}.
        """
        cid = self._class_of[symbol_index]
        if cid is None:
            return {}
        s = self._sign_of[symbol_index]
        fp = self._free_pos.get(cid)
        if fp is not None:
            return {fp: s}
        self._resolve_pivots({cid})
        return {p: s * v for p, v in self._resolved[cid].items()}

    # -- lattice ----------------------------------------------------------

    def _build_lattice(self) -> None:
        unit_pivots = all(abs(a) == 1 or not items for col, a, items in self._pivots)
        self._lattice_basis = None  # None means the standard lattice Z^(g+1)
        self.lattice_note = "plus-quotient Manin symbol image lattice, saturated"
        if unit_pivots:
            return
        # resolve everything and collect fractional parts of the columns
        self._resolve_pivots({col for col, _, _ in self._pivots})
        frac_cols = []
        for col, _, _ in self._pivots:
            vec = self._resolved[col]
            frac = {
                p: v - Fraction(v).numerator // Fraction(v).denominator
                for p, v in vec.items()
                if isinstance(v, Fraction)
            }
            frac = {p: v for p, v in frac.items() if v}
            if frac:
                frac_cols.append(frac)
        if not frac_cols:
            return
        self._lattice_basis = _hnf_lattice(self.dim_full, frac_cols)
        self.lattice_note += " (non-unit index over the free-generator lattice)"

    # -- cuspidal subspace and Hecke action --------------------------------

    @property
    def cuspidal_basis(self) -> list[list[object]]:
        """Integral basis vectors of the cuspidal lattice, free coordinates."""
        dim = self.dim_full
        if self._lattice_basis is None:
            out = []
            for j in range(1, dim):
                v = [0] * dim
                v[j] = 1
                out.append(v)
            return out
        basis, _ = _cuspidal_change_of_basis(self._lattice_basis, self._w)
        return [[basis[i][j] for i in range(dim)] for j in range(1, dim)]

    def hecke_matrix(self, p: int) -> HeckeMatrix:
        if p == self.level or not is_prime(p):
            raise ValueError(f"p must be a prime different from the level, got {p}")
        cached = self._hecke_cache.get(p)
        if cached is not None:
            return cached
        g = self.genus
        if g == 0:
            mat = HeckeMatrix(p, [])
            self._hecke_cache[p] = mat
            return mat
        n = self.level
        idx = self.p1.index_of
        fam = merel_family(p)
        class_of = self._class_of
        sign_of = self._sign_of
        images: list[list[tuple[int, int]]] = []
        needed: set[int] = set()
        for cid in self._free:
            c, d = self.p1.points[self._class_rep[cid]]
            img = []
            for a, b, cc, dd in fam:
                c2 = (c * a + d * cc) % n
                d2 = (c * b + d * dd) % n
                if c2 == 0 and d2 == 0:
                    continue
                t = idx(c2, d2)
                tc = class_of[t]
                if tc is None:
                    continue
                img.append((tc, sign_of[t]))
                if tc not in self._free_pos:
                    needed.add(tc)
            images.append(img)
        self._resolve_pivots(needed)
        free_pos = self._free_pos
        resolved = self._resolved
        cols: list[dict[int, object]] = []
        for img in images:
            acc: dict[int, object] = {}
            for tc, s in img:
                fp = free_pos.get(tc)
                if fp is not None:
                    acc[fp] = acc.get(fp, 0) + s
                else:
                    for p2, v2 in resolved[tc].items():
                        nv = acc.get(p2, 0) + s * v2
                        if nv:
                            acc[p2] = nv
                        elif p2 in acc:
                            del acc[p2]
            cols.append(acc)
        if self._lattice_basis is None:
            entries = self._restrict_standard(cols)
        else:
            entries = self._restrict_general(cols)
        mat = HeckeMatrix(p, entries)
        self._hecke_cache[p] = mat
        return mat

    def _restrict_standard(self, cols: list[dict[int, object]]) -> list[list[int]]:
        g = self.genus
        for j in range(1, g + 1):
            if cols[j].get(0, 0) != 0:
                raise RuntimeError("Hecke action does not preserve the cuspidal space")
        entries = [[0] * g for _ in range(g)]
        for j in range(1, g + 1):
            for p2, v in cols[j].items():
                if p2 == 0:
                    continue
                if isinstance(v, Fraction):
                    raise IntegralityViolation(f"matrix entry ({p2},{j}) is {v}")
                entries[p2 - 1][j - 1] = v
        return entries

    def _restrict_general(self, cols: list[dict[int, object]]) -> list[list[int]]:
        dim = self.dim_full
        basis, inverse_ops = _cuspidal_change_of_basis(self._lattice_basis, self._w)
        # T in the new basis: P^-1 * T * P with P given by basis columns
        tp = [[Fraction(0)] * dim for _ in range(dim)]
        for j in range(dim):
            for i2 in range(dim):
                pv = basis[i2][j]
                if not pv:
                    continue
                for p2, v in cols[i2].items():
                    tp[p2][j] += pv * Fraction(v)
        xfull = _apply_inverse(inverse_ops, tp)
        for j in range(1, dim):
            if xfull[0][j] != 0:
                raise RuntimeError("Hecke action does not preserve the cuspidal lattice")
        entries = []
        for i2 in range(1, dim):
            row = []
            for j in range(1, dim):
                v = xfull[i2][j]
                if v.denominator != 1:
                    raise IntegralityViolation(f"entry ({i2},{j}) is {v}")
                row.append(int(v))
            entries.append(row)
        return entries

    def dump_hecke(self, mat: HeckeMatrix) -> str:
        """Plain-text grid: first line 'N p g', then the rows."""
        lines = [f"{self.level} {mat.p} {self.genus}"]
        for row in mat.entries:
            lines.append(" ".join(str(v) for v in row))
        return "\n".join(lines)


def _hnf_lattice(dim: int, frac_cols: list[dict[int, Fraction]]):
    """Basis (as columns) of Z^dim + span(frac_cols), upper triangular."""
    den = 1
    for col in frac_cols:
        for v in col.values():
            den = den * v.denominator // gcd(den, v.denominator)
    vecs = []
    for j in range(dim):
        v = [0] * dim
        v[j] = den
        vecs.append(v)
    for col in frac_cols:
        v = [0] * dim
        for p, val in col.items():
            v[p] = int(val * den)
        vecs.append(v)
    # integer HNF by insertion; basis[p] has leading position p
    basis: list[list[int] | None] = [None] * dim
    for v in vecs:
        v = list(v)
        for p in range(dim):
            if v[p] == 0:
                continue
            cur = basis[p]
            if cur is None:
                basis[p] = v
                break
            g, s, t = xgcd(cur[p], v[p])
            q1, q2 = cur[p] // g, v[p] // g
            new = [s * a + t * b for a, b in zip(cur, v)]
            v = [q1 * b - q2 * a for a, b in zip(cur, v)]
            basis[p] = new
        # fully reduced vectors vanish
    out = []
    for p in range(dim):
        assert basis[p] is not None
        out.append([Fraction(x, den) for x in basis[p]])
    # columns: out[p] is the basis vector with leading position p
    return out


def _cuspidal_change_of_basis(lattice_cols, w):
    """Change of basis putting the boundary direction first.

    Returns (P, ops) where P's columns are a lattice basis whose columns
    1..dim-1 span the kernel of w, and ops is the sequence of elementary
    column operations (as applied to the w-reduced coordinates) needed to
    invert the kernel transform.
    """
    dim = len(lattice_cols)
    # w in lattice coordinates: w . column_j
    wl = []
    den = 1
    for j in range(dim):
        val = sum(Fraction(w[i]) * lattice_cols[j][i] for i in range(dim))
        wl.append(val)
        den = den * val.denominator // gcd(den, val.denominator)
    wi = [int(v * den) for v in wl]
    content = 0
    for v in wi:
        content = gcd(content, v)
    wi = [v // content for v in wi]
    # unimodular column reduction: bring wi to (1, 0, ..., 0)
    cols = [[Fraction(lattice_cols[j][i]) for i in range(dim)] for j in range(dim)]
    # cols[j] is the j-th basis column
    ops = []  # (kind, i, j, coeffs...) sufficient to invert
    for j in range(1, dim):
        if wi[j] == 0:
            continue
        g, s, t = xgcd(wi[0], wi[j])
        a0, aj = wi[0] // g, wi[j] // g
        c0 = [s * x + t * y for x, y in zip(cols[0], cols[j])]
        cj = [a0 * y - aj * x for x, y in zip(cols[0], cols[j])]
        cols[0], cols[j] = c0, cj
        ops.append((j, s, t, a0, aj))
        wi[0], wi[j] = g, 0
    if wi[0] < 0:
        cols[0] = [-x for x in cols[0]]
        ops.append((0, -1, 0, 0, 0))
        wi[0] = -wi[0]
    assert wi[0] == 1
    p_mat = [[cols[j][i] for j in range(dim)] for i in range(dim)]
    return p_mat, (ops, lattice_cols)


def _apply_inverse(inverse_data, mat):
    """Apply P^-1 to mat on the left, using the recorded structure of P."""
    ops, lattice_cols = inverse_data
    dim = len(mat)
    # first undo the lattice basis: solve B y = x column-wise (B triangular
    # with leading position p on column p)
    out = [[Fraction(0)] * dim for _ in range(dim)]
    for j in range(dim):
        x = [mat[i][j] for i in range(dim)]
        y = [Fraction(0)] * dim
        for p in range(dim):
            # column p has its first nonzero entry at position p
            y[p] = x[p] / lattice_cols[p][p]
            if y[p]:
                for i in range(p + 1, dim):
                    if lattice_cols[p][i]:
                        x[i] -= y[p] * lattice_cols[p][i]
        for i in range(dim):
            out[i][j] = y[i]
    # then undo the unimodular column ops: P = B * E_1 * ... * E_m, so
    # P^-1 = E_m^-1 * ... * E_1^-1 * B^-1, applied as row operations
    for op in reversed(ops):
        j, s, t, a0, aj = op
        if j == 0 and s == -1:
            out[0] = [-x for x in out[0]]
            continue
        # E has 2x2 block [[s, -aj], [t, a0]] at rows/cols (0, j);
        # E^-1 has block [[a0, aj], [-t, s]]
        r0, rj = out[0], out[j]
        out[0] = [a0 * x + aj * y for x, y in zip(r0, rj)]
        out[j] = [-t * x + s * y for x, y in zip(r0, rj)]
    return out


def build_space(n: int) -> ModularSymbolSpace:
    """Construct the plus-quotient modular symbol space for prime level n."""
    return ModularSymbolSpace(n)


def hecke_matrix(space: ModularSymbolSpace, p: int) -> HeckeMatrix:
    """Integer matrix of T_p on the saturated cuspidal lattice of space."""
    return space.hecke_matrix(p)


__all__ = [
    "IntegralityViolation",
    "P1Point",
    "P1",
    "HeckeMatrix",
    "ModularSymbolSpace",
    "build_p1",
    "build_space",
    "hecke_matrix",
    "genus",
    "merel_family",
]
