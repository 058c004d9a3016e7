"""Invariants of quadratic fields Q(sqrt(d)) via binary quadratic forms.

Class groups are computed by exhaustive enumeration of reduced forms
(definite case) or reduction cycles (indefinite case), with composition
realized through ideal products in the order of the fundamental
discriminant.  Fundamental units come from the continued fraction of the
generator of the ring of integers.  Everything is exact integer
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import gcd, isqrt

from .numth import is_squarefree, odd_part, xgcd

SPLITS = "splits"
INERT = "inert"
RAMIFIES = "ramifies"

# continued fraction expansions longer than this indicate a bug or an
# absurdly large input; hard error instead of silent spinning
_CF_STEP_CAP = 10**6


@dataclass(frozen=True)
class QuadField:
    """Quadratic field Q(sqrt(d)) for squarefree d, with fundamental disc."""

    d: int
    disc: int
    real: bool


def quad_field(d: int) -> QuadField:
    if d in (0, 1) or not is_squarefree(d):
        raise ValueError(f"d must be squarefree and not 0 or 1, got {d}")
    disc = d if d % 4 == 1 else 4 * d
    return QuadField(d=d, disc=disc, real=d > 0)


@dataclass(frozen=True)
class QForm:
    """Binary quadratic form a*x^2 + b*xy + c*y^2."""

    a: int
    b: int
    c: int

    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


def principal_form(disc: int) -> QForm:
    k = disc & 1
    return QForm(1, k, (k * k - disc) // 4)


def reduce_definite(f: QForm) -> QForm:
    """Standard reduction for positive definite forms (disc < 0, a > 0)."""
    a, b, c = f.a, f.b, f.c
    while True:
        if a > c:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # normalize b into (-a, a]
            r = (a - b) // (2 * a)
            b2 = b + 2 * r * a
            c = a * r * r + b * r + c
            b = b2
            continue
        break
    if a == c and b < 0:
        b = -b
    if b == -a:
        b = a
    return QForm(a, b, c)


def _compose_raw(f1: QForm, f2: QForm, disc: int) -> QForm:
    """Product of form classes through the corresponding ideal product.

    The form (a, b, c) corresponds to the module a*Z + ((-b + sqrt(D))/2)*Z;
    the product module is put in Hermite form and converted back to a form
    with positive leading coefficient.
    """
    sigma = disc & 1
    q = (disc - sigma) // 4  # w^2 = sigma*w + q for w = (sigma + sqrt(D))/2
    gens = []
    for x1, y1 in ((f1.a, 0), ((-f1.b - sigma) // 2, 1)):
        for x2, y2 in ((f2.a, 0), ((-f2.b - sigma) // 2, 1)):
            x = x1 * x2 + q * y1 * y2
            y = x1 * y2 + x2 * y1 + sigma * y1 * y2
            gens.append((x, y))
    # Hermite form of the rank-2 module spanned by gens:
    # s = gcd of the w-components, with a Bezout combination giving vx
    s = 0
    coeffs = [0, 0, 0, 0]
    for i, (_, y) in enumerate(gens):
        if y:
            g, p, r = xgcd(s, y)
            coeffs = [ci * p for ci in coeffs]
            coeffs[i] += r
            s = g
    assert s > 0
    vx = sum(ci * g[0] for ci, g in zip(coeffs, gens))
    # clear w-components, collect the remaining x-components
    a = 0
    for x, y in gens:
        a = gcd(a, x - (y // s) * vx)
    assert a > 0
    # module is a*Z + (vx + s*w)*Z; primitive part divides out s
    assert a % s == 0 and vx % s == 0
    big_a = a // s
    t = (vx // s) % big_a if big_a > 1 else 0
    b = -(2 * t + sigma)
    num = b * b - disc
    assert num % (4 * big_a) == 0
    return QForm(big_a, b, num // (4 * big_a))


def compose_definite(f1: QForm, f2: QForm) -> QForm:
    disc = f1.disc()
    return reduce_definite(_compose_raw(f1, f2, disc))


def enumerate_definite(disc: int) -> list[QForm]:
    """All primitive reduced forms of negative discriminant disc."""
    assert disc < 0 and disc % 4 in (0, 1)
    out = []
    amax = isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if (b < 0 and a == c) or gcd(gcd(a, b), c) != 1:
                continue
            out.append(QForm(a, b, c))
    return sorted(out, key=QForm.tuple)


# ---------------------------------------------------------------------------
# indefinite forms: reduction cycles for the narrow class group


def _is_reduced_indef(f: QForm, s0: int) -> bool:
    a2 = 2 * abs(f.a)
    return 0 < f.b <= s0 and s0 - f.b < a2 <= s0 + f.b


def _rho(f: QForm, disc: int, s0: int) -> QForm:
    """Reduction step for indefinite forms."""
    a, b, c = f.a, f.b, f.c
    cc = abs(c)
    if cc > s0:
        # bring r into (-|c|, |c|]
        r = (-b) % (2 * cc)
        if r > cc:
            r -= 2 * cc
    else:
        # bring r into (s0 - 2|c|, s0]
        r = (-b) % (2 * cc)
        r += ((s0 - r) // (2 * cc)) * (2 * cc)
    return QForm(c, r, (r * r - disc) // (4 * c))


def reduce_indefinite(f: QForm, disc: int, s0: int) -> QForm:
    steps = 0
    while not _is_reduced_indef(f, s0):
        f = _rho(f, disc, s0)
        steps += 1
        if steps > _CF_STEP_CAP:
            raise RuntimeError("indefinite reduction did not terminate")
    return f


def enumerate_indefinite(disc: int) -> list[QForm]:
    """All primitive reduced forms of positive non-square discriminant."""
    assert disc > 0 and disc % 4 in (0, 1)
    s0 = isqrt(disc)
    assert s0 * s0 != disc
    out = []
    for b in range(1, s0 + 1):
        if (b - disc) % 2:
            continue
        num = b * b - disc  # negative
        lo = (s0 - b) // 2 + 1
        hi = (s0 + b) // 2
        for aa in range(lo, hi + 1):
            if aa == 0 or num % (4 * aa):
                continue
            c = num // (4 * aa)
            for a, cc in ((aa, c), (-aa, -c)):
                if gcd(gcd(a, b), cc) == 1:
                    out.append(QForm(a, b, cc))
    return sorted(out, key=QForm.tuple)


def _flip(f: QForm) -> QForm:
    return QForm(-f.a, f.b, -f.c)


class _IndefClasses:
    """Reduction cycles of a positive discriminant and the wide classes.

    Cycles give the narrow form class group; flipping the outer signs gives
    the action of the class of (-1), whose orbits are the wide classes.
    """

    def __init__(self, disc: int):
        self.disc = disc
        self.s0 = isqrt(disc)
        forms = enumerate_indefinite(disc)
        self.cycle_of: dict[tuple[int, int, int], int] = {}
        cycles: list[list[QForm]] = []
        for f in forms:
            if f.tuple() in self.cycle_of:
                continue
            cyc = []
            g = f
            while g.tuple() not in self.cycle_of:
                self.cycle_of[g.tuple()] = len(cycles)
                cyc.append(g)
                g = _rho(g, disc, self.s0)
            assert g.tuple() == f.tuple(), "rho walk left its own cycle"
            cycles.append(cyc)
        self.cycles = cycles
        self.h_plus = len(cycles)
        # wide classes: orbits of cycle -> cycle-of-flipped-form
        orbit = [-1] * len(cycles)
        orbits = []
        for i, cyc in enumerate(cycles):
            if orbit[i] >= 0:
                continue
            j = self.cycle_of[_flip(cyc[0]).tuple()]
            orbit[i] = orbit[j] = len(orbits)
            orbits.append(i)
        self.orbit_of_cycle = orbit
        self.orbit_reps = orbits  # representative cycle index per wide class
        self.h = len(orbits)

    def class_id(self, f: QForm) -> int:
        red = reduce_indefinite(f, self.disc, self.s0)
        return self.orbit_of_cycle[self.cycle_of[red.tuple()]]


# ---------------------------------------------------------------------------
# continued fractions and fundamental units


@dataclass(frozen=True)
class Unit:
    """Unit x + y*w of a real quadratic field, w = sqrt(d) or (1+sqrt(d))/2."""

    d: int
    x: int
    y: int
    norm: int

    def __str__(self) -> str:
        w = f"(1+√{self.d})/2" if self.d % 4 == 1 else f"√{self.d}"
        return f"{self.x} + {self.y}*{w}"


def _cf_states(d: int) -> tuple[list[tuple[int, int, int]], int]:
    """Continued fraction of the integral generator of Q(sqrt(d)), d > 0.

    Returns the list of states (P, Q, a) for alpha_i = (P_i + sqrt(d))/Q_i
    and the index where the state sequence starts repeating.
    """
    if d % 4 == 1:
        p, q = 1, 2
    else:
        p, q = 0, 1
    s0 = isqrt(d)
    seen: dict[tuple[int, int], int] = {}
    states: list[tuple[int, int, int]] = []
    while (p, q) not in seen:
        seen[(p, q)] = len(states)
        assert q > 0 and (d - p * p) % q == 0
        a = (p + s0) // q
        states.append((p, q, a))
        p2 = a * q - p
        q2 = (d - p2 * p2) // q
        p, q = p2, q2
        if len(states) > _CF_STEP_CAP:
            raise RuntimeError("continued fraction period exceeds step cap")
    return states, seen[(p, q)]


def fundamental_unit(fld: QuadField) -> Unit:
    """Fundamental unit u > 1 of a real quadratic field, exactly.

    Accumulates the convergent matrix over one period of the continued
    fraction of sqrt(d) (resp. (1+sqrt(d))/2 when d = 1 mod 4).
    """
    if not fld.real:
        raise ValueError("fundamental unit requires a real field")
    d = fld.d
    states, k = _cf_states(d)
    period = states[k:]
    m00, m01, m10, m11 = 1, 0, 0, 1
    for _, _, a in period:
        # right-multiply by [[a, 1], [1, 0]]: the period is traversed in order
        m00, m01, m10, m11 = a * m00 + m01, m00, a * m10 + m11, m10
    pk, qk, _ = states[k]
    # u = m10*alpha_k + m11 with alpha_k = (pk + sqrt(d))/qk
    xnum = m10 * pk + m11 * qk
    ynum = m10
    if d % 4 == 1:
        # convert to basis {1, w}, w = (1+sqrt(d))/2, sqrt(d) = 2w - 1
        assert (xnum - ynum) % qk == 0 and (2 * ynum) % qk == 0
        x = (xnum - ynum) // qk
        y = 2 * ynum // qk
        nrm = x * x + x * y - (d - 1) // 4 * y * y
    else:
        assert xnum % qk == 0 and ynum % qk == 0
        x = xnum // qk
        y = ynum // qk
        nrm = x * x - d * y * y
    expected = -1 if len(period) % 2 else 1
    assert nrm == expected and abs(nrm) == 1, "continued fraction unit is wrong"
    return Unit(d=d, x=x, y=y, norm=nrm)


# ---------------------------------------------------------------------------
# class groups


@dataclass
class ClassGroup:
    """Form class group data for a fundamental discriminant."""

    disc: int
    h: int
    elements: list[QForm]
    h_odd: int
    h_even: int
    _structure: list[int] | None = dc_field(default=None, repr=False)
    _indef: "_IndefClasses | None" = dc_field(default=None, repr=False)
    _index: dict | None = dc_field(default=None, repr=False)

    @property
    def structure(self) -> list[int]:
        """Elementary divisors d1 | d2 | ... with product h (lazy)."""
        if self._structure is None:
            self._structure = _group_structure(self)
        return self._structure

    def class_id(self, f: QForm) -> int:
        """Index of the class of f in elements."""
        if self.disc < 0:
            if self._index is None:
                self._index = {g.tuple(): i for i, g in enumerate(self.elements)}
            return self._index[reduce_definite(f).tuple()]
        assert self._indef is not None
        return self._indef.class_id(f)

    def compose_ids(self, i: int, j: int) -> int:
        f = _compose_raw(self.elements[i], self.elements[j], self.disc)
        return self.class_id(f)

    def power_id(self, i: int, e: int) -> int:
        acc = self.class_id(principal_form(self.disc))
        base = i
        while e:
            if e & 1:
                acc = self.compose_ids(acc, base)
            base = self.compose_ids(base, base)
            e >>= 1
        return acc

    def order_of(self, f: QForm) -> int:
        ident = self.class_id(principal_form(self.disc))
        i = self.class_id(f)
        acc = i
        n = 1
        while acc != ident:
            acc = self.compose_ids(acc, i)
            n += 1
            assert n <= self.h
        return n


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _group_structure(cg: ClassGroup) -> list[int]:
    """Elementary divisors by counting q-power torsion element-by-element."""
    h = cg.h
    if h == 1:
        return []
    ident = cg.class_id(principal_form(cg.disc))
    partitions: dict[int, list[int]] = {}
    for q, e in _factorize(h).items():
        counts = [0]  # counts[k] = log_q #{x : x^(q^k) = 1} = sum_i min(k, lambda_i)
        for k in range(1, e + 1):
            cnt = sum(1 for i in range(h) if cg.power_id(i, q**k) == ident)
            lg = 0
            while q**lg < cnt:
                lg += 1
            assert q**lg == cnt
            counts.append(lg)
        # ge[k] = #cyclic q-factors with exponent >= k
        ge = [counts[k] - counts[k - 1] for k in range(1, len(counts))]
        while ge and ge[-1] == 0:
            ge.pop()
        exps: list[int] = []
        for idx in range(len(ge)):
            nxt = ge[idx + 1] if idx + 1 < len(ge) else 0
            exps.extend([idx + 1] * (ge[idx] - nxt))
        partitions[q] = sorted(exps, reverse=True)
    width = max(len(p) for p in partitions.values())
    divisors = []
    for pos in range(width):
        dval = 1
        for q, exps in partitions.items():
            if pos < len(exps):
                dval *= q ** exps[pos]
        divisors.append(dval)
    divisors.reverse()  # ascending, each dividing the next
    assert len(divisors) == 0 or all(
        divisors[i + 1] % divisors[i] == 0 for i in range(len(divisors) - 1)
    )
    prod = 1
    for dv in divisors:
        prod *= dv
    assert prod == h
    return divisors


@lru_cache(maxsize=8192)
def _class_group_cached(d: int) -> ClassGroup:
    fld = quad_field(d)
    disc = fld.disc
    if disc < 0:
        elements = enumerate_definite(disc)
        h = len(elements)
        return ClassGroup(disc=disc, h=h, elements=elements,
                          h_odd=odd_part(h), h_even=h // odd_part(h))
    indef = _IndefClasses(disc)
    u = fundamental_unit(fld)
    expected_h = indef.h_plus if u.norm == -1 else indef.h_plus // 2
    assert indef.h == expected_h, "wide class count disagrees with unit norm"
    elements = [indef.cycles[ci][0] for ci in indef.orbit_reps]
    cg = ClassGroup(disc=disc, h=indef.h, elements=elements,
                    h_odd=odd_part(indef.h), h_even=indef.h // odd_part(indef.h))
    cg._indef = indef
    return cg


def class_group(fld: QuadField) -> ClassGroup:
    return _class_group_cached(fld.d)


# ---------------------------------------------------------------------------
# splitting of 2, the prime above 2, and the modulus-(2) ray class number


def splitting_of_2(fld: QuadField) -> str:
    """How (2) decomposes, read off the discriminant mod 8."""
    if fld.d % 2 == 0:
        return RAMIFIES
    r = fld.disc % 8
    if r == 1:
        return SPLITS
    if r == 5:
        return INERT
    return RAMIFIES


def _form_above_2(disc: int) -> QForm:
    """A form (2, b, c) representing a prime ideal above 2."""
    if disc % 2:
        b = 1
    else:
        b = 0 if (disc // 4) % 2 == 0 else 2
    num = b * b - disc
    assert num % 8 == 0
    return QForm(2, b, num // 8)


def p2_order(fld: QuadField) -> int:
    """Order of the class of a prime above 2; 1 by convention when 2 is inert."""
    if splitting_of_2(fld) == INERT:
        return 1
    cg = class_group(fld)
    return cg.order_of(_form_above_2(fld.disc))


def unit_residue_mod2(fld: QuadField) -> bool:
    """Whether the fundamental unit is 1 in O_K/2O_K (real field, 2 inert)."""
    if not fld.real:
        raise ValueError("unit residue requires a real field")
    if splitting_of_2(fld) != INERT:
        raise ValueError("unit residue mod 2 requires 2 inert")
    u = fundamental_unit(fld)
    return u.x % 2 == 1 and u.y % 2 == 0


def ray_class_number_2(fld: QuadField) -> int:
    """Ray class number of modulus (2) when 2 is inert: h or 3h."""
    if splitting_of_2(fld) != INERT:
        raise ValueError("modulus-(2) ray class number computed only for inert 2")
    h = class_group(fld).h
    if not fld.real:
        return h if fld.d == -3 else 3 * h
    return 3 * h if unit_residue_mod2(fld) else h


# ---------------------------------------------------------------------------
# aggregation


@dataclass
class QuadInvariants:
    """Everything downstream consumers need to know about one field."""

    field: QuadField
    cg: ClassGroup
    split2: str
    ord_p2: int
    h_odd_2split: int
    unit_is_1_mod2: bool | None
    h_ray2: int | None

    @property
    def h(self) -> int:
        return self.cg.h

    def summary(self) -> dict:
        return {
            "d": self.field.d,
            "disc": self.field.disc,
            "h": self.cg.h,
            "h_odd": self.cg.h_odd,
            "h_even": self.cg.h_even,
            "split2": self.split2,
            "ord_p2": self.ord_p2,
            "h_odd_2split": self.h_odd_2split,
            "unit_is_1_mod2": self.unit_is_1_mod2,
            "h_ray2": self.h_ray2,
        }


def invariants(n: int, sign: int) -> QuadInvariants:
    """All class-field invariants of Q(sqrt(sign*N)) for an odd prime N."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    fld = quad_field(sign * n)
    cg = class_group(fld)
    split2 = splitting_of_2(fld)
    ord2 = p2_order(fld)
    assert cg.h % ord2 == 0
    h_odd_2split = cg.h_odd // odd_part(ord2)
    unit_flag = None
    h_ray2 = None
    if split2 == INERT:
        if fld.real:
            unit_flag = unit_residue_mod2(fld)
        h_ray2 = ray_class_number_2(fld)
    return QuadInvariants(
        field=fld,
        cg=cg,
        split2=split2,
        ord_p2=ord2,
        h_odd_2split=h_odd_2split,
        unit_is_1_mod2=unit_flag,
        h_ray2=h_ray2,
    )


__all__ = [
    "QuadField",
    "QForm",
    "ClassGroup",
    "QuadInvariants",
    "Unit",
    "quad_field",
    "principal_form",
    "reduce_definite",
    "enumerate_definite",
    "enumerate_indefinite",
    "compose_definite",
    "class_group",
    "splitting_of_2",
    "fundamental_unit",
    "unit_residue_mod2",
    "ray_class_number_2",
    "p2_order",
    "invariants",
    "SPLITS",
    "INERT",
    "RAMIFIES",
]
