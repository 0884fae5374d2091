"""Small finite fields with precomputed operation tables.

An element of GF(p^e) is stored as the integer ``sum(c_i * p**i)`` where
``c_0 + c_1 x + ... + c_{e-1} x^{e-1}`` is its residue modulo the field's
defining polynomial.  Index 0 is zero and index 1 is one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np
from sympy import factorint

from .core import InputError

# Coefficients listed from the constant term upward; all monic.
BUNDLED_MODULI = {
    4: (2, (1, 1, 1)),  # x^2 + x + 1
    8: (2, (1, 1, 0, 1)),  # x^3 + x + 1
    9: (3, (2, 2, 1)),  # x^2 + 2x + 2
    16: (2, (1, 1, 0, 0, 1)),  # x^4 + x + 1
    25: (5, (2, 4, 1)),  # x^2 + 4x + 2
    27: (3, (1, 2, 0, 1)),  # x^3 + 2x + 1
}


def prime_power(q: int):
    """``(p, e)`` with ``q == p**e``, or ``None``."""
    if q < 2:
        return None
    f = factorint(q)
    if len(f) != 1:
        return None
    (p, e), = f.items()
    return p, e


# -- polynomials over F_p as coefficient tuples, constant term first ----------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a, m, p):
    a = _trim(a)
    m = _trim(m)
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        f = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - f * c) % p
        a = _trim(a)
    return a


def is_irreducible(modulus, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    m = _trim([c % p for c in modulus])
    deg = len(m) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _polymod(m, list(low) + [1], p):
                return False
    return True


@dataclass(frozen=True)
class FiniteField:
    p: int
    e: int
    modulus: tuple
    add: np.ndarray = field(repr=False, compare=False)
    mul: np.ndarray = field(repr=False, compare=False)
    neg: np.ndarray = field(repr=False, compare=False)
    inv: np.ndarray = field(repr=False, compare=False)  # inv[0] == 0 by convention

    @property
    def q(self) -> int:
        return self.p ** self.e

    def sub(self, a, b):
        return self.add[a, self.neg[b]]

    def elements(self) -> range:
        return range(self.q)

    def primitive_element(self) -> int:
        """Least element generating the multiplicative group."""
        q = self.q
        for g in range(2, q) if q > 2 else [1]:
            x, order = g, 1
            while x != 1:
                x = int(self.mul[x, g])
                order += 1
            if order == q - 1:
                return g
        return 1

    def __str__(self):
        return f"GF({self.q})"


def _coeffs(x: int, p: int, e: int) -> list:
    out = []
    for _ in range(e):
        x, r = divmod(x, p)
        out.append(r)
    return out


def _index(coeffs, p: int) -> int:
    return sum(int(c) * p ** i for i, c in enumerate(coeffs))


def finite_field(q: int, modulus=None) -> FiniteField:
    """GF(q); a bundled defining polynomial is used unless ``modulus`` is given."""
    pe = prime_power(q)
    if pe is None:
        raise InputError(f"{q} is not a prime power")
    p, e = pe
    if e == 1:
        modulus = (0, 1)
    elif modulus is None:
        if q not in BUNDLED_MODULI:
            raise InputError(f"no bundled modulus for q={q}; supply one")
        modulus = BUNDLED_MODULI[q][1]
    modulus = tuple(int(c) % p for c in modulus)
    if len(_trim(modulus)) != e + 1 or modulus[-1] != 1:
        raise InputError(f"modulus must be monic of degree {e}")
    if not is_irreducible(modulus, p):
        raise InputError("modulus is reducible")
    coeffs = [_coeffs(x, p, e) for x in range(q)]
    add = np.empty((q, q), dtype=np.int64)
    mul = np.empty((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            add[a, b] = _index([(x + y) % p for x, y in zip(coeffs[a], coeffs[b])], p)
            prod = [0] * (2 * e - 1)
            for i, x in enumerate(coeffs[a]):
                for j, y in enumerate(coeffs[b]):
                    prod[i + j] = (prod[i + j] + x * y) % p
            mul[a, b] = _index(_polymod(prod, modulus, p) if e > 1 else [prod[0]], p)
    neg = np.array([int(np.flatnonzero(add[a] == 0)[0]) for a in range(q)])
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
    for t in (add, mul, neg, inv):
        t.setflags(write=False)
    return FiniteField(p, e, modulus, add, mul, neg, inv)
