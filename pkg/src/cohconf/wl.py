"""Two-dimensional Weisfeiler-Leman refinement (coherent closure).

The color of a pair ``(i, j)`` is refined by the multiset over ``k`` of the
ordered pairs ``(color(i, k), color(k, j))``.  New colors are named by the rank
of their fingerprint ``(old color, multiset digest)``, so names do not depend on
point numbering and two graphs can be refined in lockstep with comparable names.

Multisets are compared through a seeded bilinear digest: with random weights
``x, y`` the sum ``sum_k x[color(i,k)] * y[color(k,j)]`` is a matrix product and
is exact in float64 for weights below 2**20 and fewer than 8192 points.  Digests
are a function of the multiset, so equal multisets never separate.  Once the
partition stops changing it is re-checked with exact sorted multisets; a digest
collision is then repaired by an exact refinement round.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BudgetExceeded,
    CoherentConfiguration,
    ColoredGraph,
    InputError,
    exact_unstable_pairs,
    is_fusion,
)

SEED = 20160131
_WEIGHT_BITS = 20
_MAX_POINTS = 8192


@dataclass
class RefinementTrace:
    rounds: int
    history: list
    canonical_names: dict = field(default_factory=dict)
    exact_fallbacks: int = 0

    def to_json(self) -> dict:
        return {
            "rounds": self.rounds,
            "history": list(self.history),
            "canonical_names": {str(k): v for k, v in sorted(self.canonical_names.items())},
            "exact_fallbacks": self.exact_fallbacks,
        }


@dataclass(frozen=True)
class Incompatible:
    """Lockstep refinement diverged: no algebraic isomorphism extends the given color map."""

    round: int
    reason: str

    def __bool__(self):
        return False


def _weights(size: int):
    rng = np.random.default_rng(SEED)
    w = rng.integers(1, 2 ** _WEIGHT_BITS, size=(4, size)).astype(np.float64)
    return w[0], w[1], w[2], w[3]


def _rank(keys_per_instance):
    """Joint lexicographic ranking of row keys across instances.

    Columns are ranked one at a time with 1-d sorts, which is much faster than
    a row-wise unique and gives the same order.
    """
    sizes = [len(k) for k in keys_per_instance]
    stacked = np.concatenate(keys_per_instance, axis=0)
    label = np.zeros(len(stacked), dtype=np.int64)
    for col in stacked.T:
        _, r = np.unique(col, return_inverse=True)
        label = label * (int(r.max()) + 1) + r.ravel()
        _, label = np.unique(label, return_inverse=True)
        label = label.ravel()
    out = []
    start = 0
    for s in sizes:
        out.append(label[start:start + s])
        start += s
    return out


def _compatible(labels) -> bool:
    if len(labels) == 1:
        return True
    ref = np.bincount(labels[0])
    for lab in labels[1:]:
        cnt = np.bincount(lab, minlength=len(ref))
        if len(cnt) != len(ref) or not np.array_equal(cnt, ref):
            return False
    return True


def _initial(colorings):
    keys = []
    for c in colorings:
        n = c.shape[0]
        flag = 1 - np.eye(n, dtype=np.int64)  # diagonal first
        keys.append(np.stack([flag.ravel(), c.ravel(), c.T.ravel()], axis=1))
    labels = _rank(keys)
    return [lab.reshape(c.shape) for lab, c in zip(labels, colorings)], _compatible(labels)


def _hashed_round(colorings, palette: int):
    x1, y1, x2, y2 = _weights(palette)
    keys = []
    for c in colorings:
        h1 = x1[c] @ y1[c]
        h2 = x2[c] @ y2[c]
        keys.append(
            np.stack([c.ravel(), h1.ravel().astype(np.int64), h2.ravel().astype(np.int64)], axis=1)
        )
    labels = _rank(keys)
    return [lab.reshape(c.shape) for lab, c in zip(labels, colorings)], _compatible(labels)


def _exact_fingerprints(c: np.ndarray, palette: int) -> list:
    n = c.shape[0]
    out = []
    step = max(1, min(n, 4_000_000 // max(1, n * n)))
    for i0 in range(0, n, step):
        block = c[i0:i0 + step]
        codes = block[:, :, None] * palette + c[None, :, :]
        codes = np.sort(codes.transpose(0, 2, 1), axis=2)
        full = np.concatenate([block[:, :, None], codes], axis=2).astype(">u8")
        for bi in range(full.shape[0]):
            for bj in range(n):
                out.append(full[bi, bj].tobytes())
    return out


def _exact_round(colorings, palette: int):
    """Refinement with full sorted-multiset fingerprints (no hashing)."""
    prints = [_exact_fingerprints(c, palette) for c in colorings]
    names = {key: r for r, key in enumerate(sorted(set().union(*prints)))}
    labels = [np.array([names[k] for k in p], dtype=np.int64) for p in prints]
    return [lab.reshape(c.shape) for lab, c in zip(labels, colorings)], _compatible(labels)


def _representative_rows(c: np.ndarray) -> np.ndarray:
    palette = int(c.max()) + 1
    _, first = np.unique(c.ravel(), return_index=True)
    ri, rj = np.divmod(first, c.shape[0])
    return np.sort(c[ri, :] * palette + c[:, rj].T, axis=1)


def _canonical_names(c: np.ndarray) -> dict:
    palette = int(c.max()) + 1
    rows = _representative_rows(c)
    names = {}
    for col in range(palette):
        data = np.concatenate([[col], rows[col]]).astype(">u8").tobytes()
        names[col] = hashlib.blake2b(data, digest_size=8).hexdigest()
    return names


def _refine(colorings, names: bool = True):
    """Lockstep refinement of one or more colorings to a common stable fixpoint.

    Returns ``(colorings, trace)`` or ``(Incompatible, None)``.  With
    ``names=False`` the trace carries no canonical names.
    """
    for c in colorings:
        if c.shape[0] >= _MAX_POINTS:
            raise BudgetExceeded(f"refinement limited to {_MAX_POINTS - 1} points", c.shape[0], _MAX_POINTS - 1)
    colorings, ok = _initial([np.asarray(c, dtype=np.int64) for c in colorings])
    if not ok:
        return Incompatible(0, "initial color classes differ in size"), None
    palette = int(colorings[0].max()) + 1
    history = [palette]
    rounds = 0
    fallbacks = 0
    while True:
        new, ok = _hashed_round(colorings, palette)
        rounds += 1
        if not ok:
            return Incompatible(rounds, "fingerprint multisets diverged"), None
        new_palette = int(new[0].max()) + 1
        if new_palette == palette:
            if all(not exact_unstable_pairs(c) for c in colorings):
                history.append(palette)
                ref = _representative_rows(colorings[0])
                if any(not np.array_equal(ref, _representative_rows(c)) for c in colorings[1:]):
                    return Incompatible(rounds, "exact fingerprints diverged at the fixpoint"), None
                break
            fallbacks += 1
            new, ok = _exact_round(colorings, palette)
            if not ok:
                return Incompatible(rounds, "exact fingerprints diverged"), None
            new_palette = int(new[0].max()) + 1
        colorings = new
        palette = new_palette
        history.append(palette)
    trace = RefinementTrace(rounds, history, _canonical_names(colorings[0]) if names else {}, fallbacks)
    return colorings, trace


def _as_colors(g) -> np.ndarray:
    if isinstance(g, (ColoredGraph, CoherentConfiguration)):
        return g.colors
    return np.asarray(g, dtype=np.int64)


def wl_closure(g, *, names: bool = True) -> tuple[CoherentConfiguration, RefinementTrace]:
    """Smallest coherent configuration whose relations contain every color class of ``g``."""
    (c,), trace = _refine([_as_colors(g)], names)
    return CoherentConfiguration(c, _normalized=True), trace


def _individualize(colors: np.ndarray, points) -> np.ndarray:
    c = np.array(colors, dtype=np.int64, copy=True)
    base = int(c.max()) + 1
    for idx, p in enumerate(points):
        c[p, p] = base + idx
    return c


def point_extension(x: CoherentConfiguration, points) -> CoherentConfiguration:
    """The extension of ``x`` with respect to ``points`` (each becomes a singleton fiber)."""
    points = [int(p) for p in points]
    if len(set(points)) != len(points):
        raise InputError("extension points must be distinct")
    if any(p < 0 or p >= x.n for p in points):
        raise InputError("extension point out of range")
    if not points:
        return x
    out, _ = wl_closure(_individualize(x.colors, points), names=False)
    assert is_fusion(x.colors, out.colors)
    return out


def m_extension(x: CoherentConfiguration, m: int = 2, budget: int = 1100) -> CoherentConfiguration:
    """The 2-extension: coherent closure on ordered pairs of points.

    The pair of points ``((a, b), (c, d))`` starts with color
    ``(color(a, c), color(b, d))`` plus flags marking ``a == b`` and ``c == d``.
    Point ``(a, b)`` has index ``a * n + b``.
    """
    if m != 2:
        raise InputError("only m = 2 is supported")
    n = x.n
    size = n ** m
    if size > budget:
        raise BudgetExceeded(f"2-extension needs {size} points, budget is {budget}", size, budget)
    c = x.colors
    R = x.rank
    ac = c[:, None, :, None]
    bd = c[None, :, None, :]
    square = (ac * R + bd).reshape(size, size)
    is_diag = np.eye(n, dtype=np.int64).ravel()
    code = (square * 2 + is_diag[:, None]) * 2 + is_diag[None, :]
    out, _ = wl_closure(code, names=False)
    assert is_fusion(square, out.colors)
    diag_points = np.flatnonzero(is_diag)
    fiber_of = out.fiber_of_point
    assert not np.intersect1d(fiber_of[diag_points], np.delete(fiber_of, diag_points)).size
    return out


@dataclass(frozen=True)
class CompatibleClosure:
    """Coherent closures of two graphs named in lockstep, so ``phi`` is the identity on names.

    ``palette_of`` maps each closure color to the input color of ``g`` containing it.
    """

    x: CoherentConfiguration
    x2: CoherentConfiguration
    phi: dict
    palette_of: dict


def _check_bijection(psi, size1: int, size2: int) -> np.ndarray:
    if isinstance(psi, dict):
        arr = np.full(size1, -1, dtype=np.int64)
        for a, b in psi.items():
            if not 0 <= int(a) < size1:
                raise InputError(f"color {a} not in the first palette")
            arr[int(a)] = int(b)
    else:
        arr = np.asarray(list(psi), dtype=np.int64)
    if size1 != size2 or len(arr) != size1 or (arr < 0).any() or (arr >= size2).any() \
            or len(np.unique(arr)) != size1:
        raise InputError("psi must be a bijection between the two palettes")
    return arr


def compatible_closure(g: ColoredGraph, g2: ColoredGraph, psi=None):
    """Refine ``g`` and ``g2`` in lockstep after identifying colors via ``psi``.

    Returns a :class:`CompatibleClosure`, or :class:`Incompatible` when the
    refinements diverge (then no algebraic isomorphism of the closures restricts
    to ``psi`` on the input colors).
    """
    if psi is None:
        if g.palette_size != g2.palette_size:
            return Incompatible(0, f"palette sizes differ ({g.palette_size} vs {g2.palette_size})")
        psi = range(g.palette_size)
    arr = _check_bijection(psi, g.palette_size, g2.palette_size)
    if g.n != g2.n:
        return Incompatible(0, f"point counts differ ({g.n} vs {g2.n})")
    inv = np.empty_like(arr)
    inv[arr] = np.arange(len(arr))
    result, _ = _refine([g.colors, inv[g2.colors]], names=False)
    if isinstance(result, Incompatible):
        return result
    c1, c2 = result
    x = CoherentConfiguration(c1, _normalized=True)
    x2 = CoherentConfiguration(c2, _normalized=True)
    palette_of = {}
    for col in range(x.rank):
        i, j = x.representative(col)
        palette_of[col] = int(g.colors[i, j])
    return CompatibleClosure(x, x2, {s: s for s in range(x.rank)}, palette_of)


def paired_refine(c1: np.ndarray, c2: np.ndarray):
    """Lockstep closure of two colorings sharing a palette; ``None`` when incompatible."""
    result, _ = _refine([c1, c2], names=False)
    if isinstance(result, Incompatible):
        return None
    return result
