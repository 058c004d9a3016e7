"""Predicted mod-2 eigenvalue structure from class-field invariants.

Turns the class group, unit, and ray class data of Q(sqrt(N)) and
Q(sqrt(-N)) into exact counts of ordinary-dihedral, supersingular-dihedral
and reducible mod-2 Hecke eigensystems at prime level N, the eigenvalue
presence implications they force, conjectural multiplicity lower bounds,
and the classical nonexistence criteria for elliptic curves of conductor
N and 2N.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .numth import primes_in_range
from .quad import INERT, SPLITS, QuadInvariants, class_group, quad_field

HADANO_REDUCIBLE = "conductor-2N curves all reducible"
HADANO_NONE = "no conductor-2N curves"
HADANO_NO_CONCLUSION = "no conclusion"


@dataclass
class Prediction:
    """Exact eigensystem counts and derived flags for one prime level."""

    N: int
    ord_dih_plus: int
    ord_dih_minus: int
    ord_dih_plus_a2_1: int
    ord_dih_minus_a2_1: int
    ss_count: int
    ss_field: str | None
    reducible: int
    implies_has0: bool
    implies_has1: bool
    mult0_lb: int
    mult1_lb: int
    kida_reducible_only: bool
    setzer_reducible_only: bool
    hadano_2N_verdict: str

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "ord_dih_plus": self.ord_dih_plus,
            "ord_dih_minus": self.ord_dih_minus,
            "ord_dih_plus_a2_1": self.ord_dih_plus_a2_1,
            "ord_dih_minus_a2_1": self.ord_dih_minus_a2_1,
            "ss_count": self.ss_count,
            "ss_field": self.ss_field,
            "reducible": self.reducible,
            "implies_has0": self.implies_has0,
            "implies_has1": self.implies_has1,
            "mult0_lb": self.mult0_lb,
            "mult1_lb": self.mult1_lb,
            "kida_reducible_only": self.kida_reducible_only,
            "setzer_reducible_only": self.setzer_reducible_only,
            "hadano_2N_verdict": self.hadano_2N_verdict,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Prediction":
        return cls(**d)


def _ss_data(n: int, inv_plus: QuadInvariants, inv_minus: QuadInvariants):
    """Supersingular eigensystem count and the field carrying it."""
    if n == 3:
        return 0, None
    r = n % 8
    if r == 3:
        return inv_minus.h, "minus"
    if r == 5:
        if inv_plus.unit_is_1_mod2:
            return inv_plus.h, "plus"
        return 0, None
    return 0, None


def predict(n: int, inv_plus: QuadInvariants, inv_minus: QuadInvariants) -> Prediction:
    """Exact counts of dihedral and reducible eigensystems at level n."""
    assert inv_plus.field.d == n and inv_minus.field.d == -n
    op = (inv_plus.cg.h_odd - 1) // 2
    om = (inv_minus.cg.h_odd - 1) // 2
    op1 = (inv_plus.h_odd_2split - 1) // 2
    om1 = (inv_minus.h_odd_2split - 1) // 2
    ss_count, ss_field = _ss_data(n, inv_plus, inv_minus)
    reducible = 1 if n % 8 == 1 else 0
    implies_has0 = ss_count > 0
    implies_has1 = bool(reducible) or op1 > 0 or om1 > 0
    pred = Prediction(
        N=n,
        ord_dih_plus=op,
        ord_dih_minus=om,
        ord_dih_plus_a2_1=op1,
        ord_dih_minus_a2_1=om1,
        ss_count=ss_count,
        ss_field=ss_field,
        reducible=reducible,
        implies_has0=implies_has0,
        implies_has1=implies_has1,
        mult0_lb=0,
        mult1_lb=0,
        kida_reducible_only=kida_criterion(n, inv_plus, inv_minus),
        setzer_reducible_only=setzer_criterion(n, inv_plus, inv_minus),
        hadano_2N_verdict=hadano_criterion(
            n,
            inv_plus.h,
            inv_minus.h,
            class_group(quad_field(2 * n)).h,
            class_group(quad_field(-2 * n)).h,
        ),
    )
    pred.mult0_lb, pred.mult1_lb = multiplicity_bounds(pred, inv_minus)
    return pred


def multiplicity_bounds(pred: Prediction, inv_minus: QuadInvariants) -> tuple[int, int]:
    """Conjectural lower bounds on the generalized multiplicities of 0 and 1.

    Each predicted eigensystem with a2 = 1 contributes its conjectured
    local dimension to the bound for eigenvalue 1, each supersingular one
    contributes 1 to the bound for eigenvalue 0, and eigensystems whose a2
    lies outside GF(2) contribute to neither.
    """
    n = pred.N
    r = n % 8
    h_even_minus = inv_minus.cg.h_even
    plus_weight = 4 if r in (1, 5) else 2
    minus_weight = h_even_minus if r == 1 else 2
    mult1 = plus_weight * pred.ord_dih_plus_a2_1 + minus_weight * pred.ord_dih_minus_a2_1
    if pred.reducible:
        mult1 += max(1, (h_even_minus - 2) // 2)
    mult0 = pred.ss_count
    return mult0, mult1


def theorem_floors(pred: Prediction) -> tuple[int, int]:
    """Unconditional lower bounds: one dimension per counted eigensystem."""
    floor0 = pred.ss_count
    floor1 = pred.ord_dih_plus_a2_1 + pred.ord_dih_minus_a2_1 + pred.reducible
    return floor0, floor1


def kida_criterion(n: int, inv_plus: QuadInvariants, inv_minus: QuadInvariants) -> bool:
    """3-indivisibility of h(+-N) and of the modulus-(2) ray class number.

    True guarantees every elliptic curve of conductor n is reducible.
    """
    if inv_plus.h % 3 == 0 or inv_minus.h % 3 == 0:
        return False
    designated = inv_plus if n % 4 == 1 else inv_minus
    if designated.split2 == INERT:
        h_ray = designated.h_ray2
        assert h_ray is not None
    else:
        # 2 splits in the designated field for n = 1, 7 mod 8; every
        # character of 2-power modulus then factors through the class group
        assert designated.split2 == SPLITS
        h_ray = designated.h
    return h_ray % 3 != 0


def setzer_criterion(n: int, inv_plus: QuadInvariants, inv_minus: QuadInvariants) -> bool:
    """True iff n = 1, 7 mod 8 and 3 divides neither class number."""
    return n % 8 in (1, 7) and inv_plus.h % 3 != 0 and inv_minus.h % 3 != 0


def hadano_criterion(n: int, h_plus: int, h_minus: int, h_2plus: int, h_2minus: int) -> str:
    """Verdict on elliptic curves of conductor 2n from four class numbers."""
    if any(h % 3 == 0 for h in (h_plus, h_minus, h_2plus, h_2minus)):
        return HADANO_NO_CONCLUSION
    if n % 8 in (1, 7):
        return HADANO_REDUCIBLE
    return HADANO_NONE


@dataclass
class HeuristicModel:
    """Probabilities the class-group statistics model assigns."""

    cl_constant: float
    p_ss_5mod8: float
    p_either_dih_7mod8: float


@lru_cache(maxsize=1)
def heuristic_model(prime_cap: int = 10**5, power_cap: int = 40) -> HeuristicModel:
    """Probability that a random odd abelian quotient is nontrivial.

    Truncates 1 - prod_{p>2} prod_{j>=1} (1 - p^-(j+1)) at p <= prime_cap,
    j <= power_cap; the discarded tail is below 1e-5.
    """
    prod = 1.0
    for p in primes_in_range(3, prime_cap):
        x = 1.0 / p
        xp = x * x
        for _ in range(power_cap):
            prod *= 1.0 - xp
            xp *= x
            if xp < 1e-18:
                break
    c = 1.0 - prod
    return HeuristicModel(
        cl_constant=c,
        p_ss_5mod8=1.0 / 3.0,
        p_either_dih_7mod8=1.0 - (1.0 - c) ** 2,
    )


__all__ = [
    "Prediction",
    "HeuristicModel",
    "predict",
    "multiplicity_bounds",
    "theorem_floors",
    "kida_criterion",
    "setzer_criterion",
    "hadano_criterion",
    "heuristic_model",
    "HADANO_REDUCIBLE",
    "HADANO_NONE",
    "HADANO_NO_CONCLUSION",
]
