"""Orders of finite simple groups of Lie type and the class-size bound check.

All arithmetic is in integers and ``Fraction``; nothing here touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd, prod

from .core import InputError
from .fields import prime_power

CLASSICAL = ("A", "2A", "B", "C", "D", "2D")
EXCEPTIONAL = ("E6", "2E6", "E7", "E8", "F4", "G2", "3D4", "2F4", "2G2", "2B2")
FAMILIES = CLASSICAL + EXCEPTIONAL

_ALIASES = {
    "2A": ("2A", "^2A", "²A"), "2D": ("2D", "^2D", "²D"), "2E6": ("2E6", "^2E6", "²E6", "²E₆"),
    "3D4": ("3D4", "^3D4", "³D4", "³D₄"), "2F4": ("2F4", "^2F4", "²F4", "²F₄"),
    "2G2": ("2G2", "^2G2", "²G2", "²G₂"), "2B2": ("2B2", "^2B2", "²B2", "²B₂"),
    "E6": ("E6", "E₆"), "E7": ("E7", "E₇"), "E8": ("E8", "E₈"), "F4": ("F4", "F₄"), "G2": ("G2", "G₂"),
}

# Lie rank of the exceptional families as used in their names
EXCEPTIONAL_RANK = {"E6": 6, "2E6": 6, "E7": 7, "E8": 8, "F4": 4, "G2": 2, "3D4": 4, "2F4": 4, "2G2": 2, "2B2": 2}
MIN_RANK = {"A": 1, "2A": 2, "B": 2, "C": 3, "D": 4, "2D": 4}

# small parameters where the group is not simple
NOT_SIMPLE = {("A", 1, 2), ("A", 1, 3), ("2A", 2, 2), ("B", 2, 2), ("G2", 2, 2), ("2B2", 2, 2), ("2G2", 2, 3), ("2F4", 4, 2)}


def canonical_family(name: str) -> str:
    s = str(name).strip()
    if s.upper() in ("A", "B", "C", "D"):
        return s.upper()
    for fam, names in _ALIASES.items():
        if s in names or s.upper() in (n.upper() for n in names):
            return fam
    raise InputError(f"unknown family {name!r}")


def _resolve_rank(family: str, l):
    if family in EXCEPTIONAL:
        fixed = EXCEPTIONAL_RANK[family]
        if l is not None and int(l) != fixed:
            raise InputError(f"{family} has rank {fixed}, not {l}")
        return fixed
    if l is None:
        raise InputError(f"{family} needs a rank l")
    return int(l)


def check_parameters(family: str, l, q: int) -> tuple[str, int, int]:
    """Validate ``(family, l, q)`` for a simple group; returns the normalized triple."""
    family = canonical_family(family)
    l = _resolve_rank(family, l)
    pe = prime_power(int(q))
    if pe is None:
        raise InputError(f"q={q} is not a prime power")
    p, e = pe
    if family in CLASSICAL and l < MIN_RANK[family]:
        raise InputError(f"{family}_{l} needs l >= {MIN_RANK[family]}")
    if family in ("2B2", "2F4") and not (p == 2 and e % 2 == 1):
        raise InputError(f"{family} needs q = 2^(2m+1)")
    if family == "2G2" and not (p == 3 and e % 2 == 1):
        raise InputError("2G2 needs q = 3^(2m+1)")
    if (family, l, q) in NOT_SIMPLE:
        raise InputError(f"{family}_{l}({q}) is not simple")
    return family, l, int(q)


def lie_order(family: str, l, q: int) -> int:
    """Order of the finite simple group of the given type."""
    family, l, q = check_parameters(family, l, q)
    if family == "A":
        return q ** (l * (l + 1) // 2) * prod(q ** (i + 1) - 1 for i in range(1, l + 1)) // gcd(l + 1, q - 1)
    if family == "2A":
        return (q ** (l * (l + 1) // 2) * prod(q ** (i + 1) - (-1) ** (i + 1) for i in range(1, l + 1))
                // gcd(l + 1, q + 1))
    if family in ("B", "C"):
        return q ** (l * l) * prod(q ** (2 * i) - 1 for i in range(1, l + 1)) // gcd(2, q - 1)
    if family == "D":
        return q ** (l * (l - 1)) * (q ** l - 1) * prod(q ** (2 * i) - 1 for i in range(1, l)) // gcd(4, q ** l - 1)
    if family == "2D":
        return q ** (l * (l - 1)) * (q ** l + 1) * prod(q ** (2 * i) - 1 for i in range(1, l)) // gcd(4, q ** l + 1)
    if family == "G2":
        return q ** 6 * (q ** 6 - 1) * (q ** 2 - 1)
    if family == "F4":
        return q ** 24 * (q ** 12 - 1) * (q ** 8 - 1) * (q ** 6 - 1) * (q ** 2 - 1)
    if family == "E6":
        return q ** 36 * prod(q ** i - 1 for i in (2, 5, 6, 8, 9, 12)) // gcd(3, q - 1)
    if family == "2E6":
        return (q ** 36 * (q ** 12 - 1) * (q ** 9 + 1) * (q ** 8 - 1) * (q ** 6 - 1) * (q ** 5 + 1) * (q ** 2 - 1)
                // gcd(3, q + 1))
    if family == "E7":
        return q ** 63 * prod(q ** i - 1 for i in (2, 6, 8, 10, 12, 14, 18)) // gcd(2, q - 1)
    if family == "E8":
        return q ** 120 * prod(q ** i - 1 for i in (2, 8, 12, 14, 18, 20, 24, 30))
    if family == "3D4":
        return q ** 12 * (q ** 8 + q ** 4 + 1) * (q ** 6 - 1) * (q ** 2 - 1)
    if family == "2B2":
        return q ** 2 * (q ** 2 + 1) * (q - 1)
    if family == "2G2":
        return q ** 3 * (q ** 3 + 1) * (q - 1)
    if family == "2F4":
        return q ** 12 * (q ** 6 + 1) * (q ** 4 - 1) * (q ** 3 + 1) * (q - 1)
    raise AssertionError(family)


def characteristic(q: int) -> int:
    return prime_power(q)[0]


def order_candidates(order: int, max_l: int = 8, max_q: int = 64) -> list[tuple[str, int, int]]:
    """All ``(family, l, q)`` in the search box whose simple group has the given order."""
    qs = [q for q in range(2, max_q + 1) if prime_power(q)]
    found = []
    for family in FAMILIES:
        ranks = [EXCEPTIONAL_RANK[family]] if family in EXCEPTIONAL else range(MIN_RANK[family], max_l + 1)
        for l in ranks:
            if l > max_l:
                continue
            for q in qs:
                try:
                    value = lie_order(family, l, q)
                except InputError:
                    continue
                if value == order:
                    found.append((family, l, q))
    return found


# -- bound data ----------------------------------------------------------------

def _fl(x: int, y: int) -> int:
    return x // y


@dataclass(frozen=True)
class LieFamilyData:
    """Row of the class-size tables for one parameter triple (values, not formulas)."""

    family: str
    l: int
    q: int
    m0: Fraction
    k_bound: int  # upper bound for |H| used as k
    w: int  # |W|
    m1: Fraction | None = None
    r_m: Fraction | None = None
    l0: int | None = None
    a: int | None = None
    row: str = ""


def _exceptional_row(family, q) -> LieFamilyData:
    F = Fraction
    rows = {
        "E8": (F(q ** 112), (q - 1) ** 8, 2 ** 14 * 3 ** 5 * 5 ** 2 * 7),
        "E7": (F(q ** 64, 2), (q - 1) ** 7, 2 ** 10 * 3 ** 4 * 5 * 7),
        "E6": (F(q ** 30, 3), (q - 1) ** 6, 2 ** 7 * 3 ** 4 * 5),
        "2E6": (F(q ** 30, 3), (q - 1) ** 4 * (q + 1) ** 2, 2 ** 7 * 3 ** 2),
        "F4": (F(q ** 16), (q - 1) ** 4, 2 ** 7 * 3 ** 2),
        "G2": (F(q ** 4 * (q ** 3 - 1)), (q - 1) ** 2, 2 ** 2 * 3),
        "3D4": (F(q ** 16), (q - 1) * (q ** 3 - 1), 2 ** 2 * 3),
        "2F4": (F(q ** 6 * (q - 1) * (q ** 3 + 1)), (q - 1) ** 2, 2 ** 4),
        "2G2": (F(q ** 2 * (q ** 2 + q + 1)), q - 1, 2),
        "2B2": (F(q ** 2 * (q - 1)), q - 1, 2),
    }
    m0, h, w = rows[family]
    return LieFamilyData(family, EXCEPTIONAL_RANK[family], q, m0, h, w, row=family)


def _classical_row(family, l, q) -> LieFamilyData:
    F = Fraction
    if family == "A":
        return LieFamilyData(
            family, l, q, F(q ** (2 * l), 2), (q - 1) ** l, factorial(l + 1),
            m1=F(q ** (4 * (l - 1)), 2), r_m=F(l * (l + 1) * (q - 1) ** 2, 2) - 1, l0=7, a=4, row="A",
        )
    if family == "2A":
        b = _fl(l + 1, 2)
        h = (q - 1) ** b * (q + 1) ** _fl(l, 2)
        w = 2 ** b * factorial(b)
        if l % 2:
            return LieFamilyData(family, l, q, F(q ** (4 * l - 3), 2 * (q + 1)), h, w, l0=6, a=4, row="2A, l odd")
        return LieFamilyData(
            family, l, q, F(q ** (2 * l + 1), 2 * (q + 1)), h, w,
            m1=F(q ** (4 * l - 3), 2 * (q + 1)), r_m=F((l + 1) * (q + 1) ** 2, 2) + q, l0=6, a=4, row="2A, l even",
        )
    if family == "B":
        h = F((q - 1) ** l, 2)
        w = 2 ** l * factorial(l)
        if (l * (q - 1) // 2) % 2:
            return LieFamilyData(family, l, q, F(q ** (4 * l - 1), 4 * (q + 1)), h, w, l0=4, a=4,
                                 row="B, l(q-1)/2 odd")
        return LieFamilyData(
            family, l, q, F(q ** (2 * l + 1), 4 * (q + 1)), h, w,
            m1=F(q ** (4 * l - 1), 4 * (q + 1)), r_m=F(l * (q - 3), 2) + 1, l0=4, a=4, row="B, l(q-1)/2 even",
        )
    if family == "C":
        return LieFamilyData(family, l, q, F(q ** (4 * l - 4), 2), (q - 1) ** l, 2 ** l * factorial(l), l0=3, a=4, row="C")
    if family == "D":
        return LieFamilyData(family, l, q, F(q ** (4 * l - 3), 4 * (q + 1)), (q - 1) ** l,
                             2 ** (l - 1) * factorial(l), l0=4, a=2, row="D")
    if family == "2D":
        return LieFamilyData(family, l, q, F(q ** (4 * l - 3), 4 * (q + 1)), (q - 1) ** (l - 1) * (q + 1),
                             2 ** (l - 1) * factorial(l), l0=4, a=2, row="2D")
    raise AssertionError(family)


def family_data(family: str, l, q: int) -> LieFamilyData:
    """Table values for the triple; odd q is assumed for B (even q is handled as C)."""
    family = canonical_family(family)
    l = _resolve_rank(family, l)
    if family in EXCEPTIONAL:
        return _exceptional_row(family, q)
    return _classical_row(family, l, q)


@dataclass
class LieBoundReport:
    family: str
    l: int
    q: int
    m: Fraction
    m_choice: str  # "m0" or "m1"
    m0: Fraction
    r_m: Fraction
    k: Fraction
    w: int
    lhs: Fraction
    rhs: Fraction
    holds: bool
    in_class_L: bool
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        def fr(x):
            x = Fraction(x)
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        return {
            "family": self.family, "l": self.l, "q": self.q,
            "m": fr(self.m), "m_choice": self.m_choice, "m0": fr(self.m0), "r_m": fr(self.r_m),
            "k": fr(self.k), "w": self.w, "lhs": fr(self.lhs), "rhs": fr(self.rhs),
            "holds": self.holds, "in_class_L": self.in_class_L, "notes": list(self.notes),
        }


def lie_bound_check(family: str, l, q: int) -> LieBoundReport:
    """Check ``k/m + r_m/m0 <= 1/(2 w k)`` with the tabulated bounds.

    For exceptional families ``m = m0`` and ``r_m = 0``, so this is
    ``m0 >= 2 w k^2``.  For A_l, 2A_l with l even and B_l with l(q-1)/2 even,
    ``m = m1`` and ``r_m`` is its tabulated bound; other classical rows use
    ``m = m0`` and ``r_m = 0``.
    """
    family = canonical_family(family)
    l = _resolve_rank(family, l)
    notes = []
    pe = prime_power(int(q))
    if pe is None:
        raise InputError(f"q={q} is not a prime power")
    q = int(q)
    if family == "B" and q % 2 == 0:
        notes.append("B_l with even q is isomorphic to C_l; checked as C_l")
        family = "C"
    try:
        check_parameters(family, l, q)
        valid = True
    except InputError as exc:
        valid = False
        notes.append(f"not a simple group of this type: {exc}")
    d = family_data(family, l, q)
    k = Fraction(d.k_bound)
    if d.m1 is not None:
        m, choice, r = d.m1, "m1", d.r_m
    else:
        m, choice, r = d.m0, "m0", Fraction(0)
    lhs = k / m + r / d.m0
    rhs = Fraction(1, 1) / (2 * d.w * k)
    if family in EXCEPTIONAL:
        in_L = valid
        # same inequality, cleared of denominators
        assert (lhs <= rhs) == (d.m0 >= 2 * d.w * k * k)
    else:
        in_L = valid and l >= d.l0 and q >= d.a * l
        if not (l >= d.l0 and q >= d.a * l):
            notes.append(f"outside class L (needs l >= {d.l0} and q >= {d.a} l)")
    notes.append("m0, m1 and |H| are tabulated bounds, not exact class sizes")
    return LieBoundReport(family, l, q, m, choice, d.m0, r, k, d.w, lhs, rhs, lhs <= rhs, in_L, notes)
