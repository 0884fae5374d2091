"""Coherent configurations as complete colored digraphs.

A configuration on ``n`` points is stored as an ``n x n`` integer matrix whose
entry ``(i, j)`` is the basis relation (color) containing the pair ``(i, j)``.
Colors are dense integers ``0 .. rank-1`` with the diagonal colors first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class InputError(ValueError):
    """Malformed input (bad matrix, bad color bijection, ...)."""


class BudgetExceeded(RuntimeError):
    """A size budget was exceeded; ``required`` is the size that was asked for."""

    def __init__(self, message, required=None, budget=None):
        super().__init__(message)
        self.required = required
        self.budget = budget


@dataclass(frozen=True, eq=False)
class ColoredGraph:
    """Complete colored digraph: every ordered pair of points carries a color."""

    colors: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.colors)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
            raise InputError("color matrix must be square and non-empty")
        if not np.issubdtype(c.dtype, np.integer):
            if c.size and not np.all(np.equal(np.mod(c, 1), 0)):
                raise InputError("colors must be integers")
        c = np.ascontiguousarray(c, dtype=np.int64)
        if c.min() < 0:
            raise InputError("colors must be nonnegative")
        present = np.unique(c)
        if present[-1] != len(present) - 1:
            missing = sorted(set(range(int(present[-1]) + 1)) - set(present.tolist()))
            raise InputError(f"empty color classes: {missing[:10]}")
        c.setflags(write=False)
        object.__setattr__(self, "colors", c)

    @property
    def n(self) -> int:
        return self.colors.shape[0]

    @property
    def palette_size(self) -> int:
        return int(self.colors.max()) + 1

    def relabel(self, perm) -> "ColoredGraph":
        """Image under the point map ``i -> perm[i]``."""
        perm = np.asarray(perm)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        return ColoredGraph(self.colors[np.ix_(inv, inv)])

    def same_partition(self, other: "ColoredGraph") -> bool:
        return same_partition(self.colors, other.colors)

    def to_json(self) -> dict:
        return {"n": self.n, "colors": self.colors.tolist()}

    @classmethod
    def from_json(cls, obj) -> "ColoredGraph":
        try:
            n = int(obj["n"])
            colors = np.array(obj["colors"], dtype=np.int64)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad colored graph JSON: {exc}") from exc
        if colors.shape != (n, n):
            raise InputError(f"colors must be {n}x{n}, got {colors.shape}")
        return cls(colors)


def same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    """True when two colorings induce the same partition of the pairs."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        return False
    pairs = np.unique(np.stack([a, b]), axis=1)
    return len(np.unique(pairs[0])) == pairs.shape[1] == len(np.unique(pairs[1]))


def is_fusion(coarse: np.ndarray, fine: np.ndarray) -> bool:
    """True when every class of ``coarse`` is a union of classes of ``fine``."""
    coarse = np.asarray(coarse).ravel()
    fine = np.asarray(fine).ravel()
    pairs = np.unique(np.stack([fine, coarse]), axis=1)
    return len(np.unique(pairs[0])) == pairs.shape[1]


def normalize_colors(colors: np.ndarray) -> np.ndarray:
    """Renumber densely: diagonal colors first, each group in increasing old id."""
    colors = np.asarray(colors)
    diag = np.unique(np.diagonal(colors))
    rest = np.setdiff1d(np.unique(colors), diag)
    lut = np.empty(int(colors.max()) + 1, dtype=np.int64)
    lut[diag] = np.arange(len(diag))
    lut[rest] = np.arange(len(diag), len(diag) + len(rest))
    return lut[colors]


@dataclass(frozen=True)
class ViolationReport:
    """Why a colored graph is not a coherent configuration."""

    axiom: str
    message: str
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return False

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "message": self.message, "witness": self.witness}


class CoherentConfiguration:
    """A verified coherent configuration.

    Do not call the constructor on unverified data; use :func:`verify_coherence`
    (or one of the builders, which produce coherent partitions by construction).
    """

    def __init__(self, colors: np.ndarray, *, _normalized: bool = False):
        c = np.asarray(colors, dtype=np.int64)
        if not _normalized:
            c = normalize_colors(c)
        c = np.ascontiguousarray(c)
        c.setflags(write=False)
        self.graph = ColoredGraph(c)
        self.colors = c
        self.n = c.shape[0]
        self.rank = int(c.max()) + 1
        diag = np.diagonal(c)
        self.diagonal_colors = tuple(int(x) for x in np.unique(diag))
        # first occurrence of every color (row-major) is its representative pair
        _, flat_first = np.unique(c.ravel(), return_index=True)
        self._rep = np.stack(np.divmod(flat_first, self.n), axis=1)
        reps = self._rep
        self.transpose_map = tuple(int(c[j, i]) for i, j in reps)
        fiber_ids = {col: k for k, col in enumerate(self.diagonal_colors)}
        self.fiber_of_point = np.array([fiber_ids[int(x)] for x in diag], dtype=np.int64)
        self.fiber_pair_of_color = tuple(
            (int(self.fiber_of_point[i]), int(self.fiber_of_point[j])) for i, j in reps
        )
        row = c[reps[:, 0]]
        self.valency = tuple(int(np.count_nonzero(row[s] == s)) for s in range(self.rank))

    # -- basic queries ------------------------------------------------------

    def representative(self, color: int) -> tuple[int, int]:
        i, j = self._rep[color]
        return int(i), int(j)

    def relation(self, color: int) -> np.ndarray:
        """All pairs of a basis relation as a ``(m, 2)`` array."""
        return np.argwhere(self.colors == color)

    def neighbours(self, point: int, color: int) -> np.ndarray:
        """The set ``point * color``."""
        return np.flatnonzero(self.colors[point] == color)

    @cached_property
    def fibers(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(int(x) for x in np.flatnonzero(self.fiber_of_point == f))
            for f in range(len(self.diagonal_colors))
        )

    @property
    def is_homogeneous(self) -> bool:
        return len(self.diagonal_colors) == 1

    @property
    def is_complete(self) -> bool:
        return self.rank == self.n * self.n

    @property
    def max_valency(self) -> int:
        return max(self.valency)

    def __eq__(self, other):
        if not isinstance(other, CoherentConfiguration):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.colors, other.colors)

    def __hash__(self):
        return hash((self.n, self.colors.tobytes()))

    def __repr__(self):
        return f"CoherentConfiguration(n={self.n}, rank={self.rank}, fibers={len(self.diagonal_colors)})"

    def relabel(self, perm) -> "CoherentConfiguration":
        """Point relabeling; color ids are kept."""
        g = self.graph.relabel(perm)
        return CoherentConfiguration(g.colors, _normalized=True)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "colors": self.colors.tolist(),
            "rank": self.rank,
            "transpose": list(self.transpose_map),
            "diagonal_colors": list(self.diagonal_colors),
        }

    @classmethod
    def from_json(cls, obj) -> "CoherentConfiguration":
        result = verify_coherence(ColoredGraph.from_json(obj))
        if isinstance(result, ViolationReport):
            raise InputError(f"not a coherent configuration: {result.message}")
        return result


# -- exact stability check -------------------------------------------------

def _row_chunk(n: int) -> int:
    return max(1, min(n, 4_000_000 // max(1, n * n)))


def exact_unstable_pairs(colors: np.ndarray, limit: int = 1):
    """Pairs whose multiset of (color(i,k), color(k,j)) differs from their class representative.

    Returns a list of ``((i, j), (a, b))`` with ``(a, b)`` the class representative;
    an empty list means the coloring is stable under 2-dimensional refinement.
    """
    c = np.asarray(colors, dtype=np.int64)
    n = c.shape[0]
    R = int(c.max()) + 1
    flat = c.ravel()
    _, first = np.unique(flat, return_index=True)
    ri, rj = np.divmod(first, n)
    rep_rows = np.sort(c[ri, :] * R + c[:, rj].T, axis=1)  # (R, n)
    found = []
    step = _row_chunk(n)
    for i0 in range(0, n, step):
        block = c[i0:i0 + step]  # (b, n)
        codes = block[:, :, None] * R + c[None, :, :]  # (b, k, j)
        codes = np.sort(codes.transpose(0, 2, 1), axis=2)  # (b, j, k)
        ref = rep_rows[block]  # (b, j, k)
        bad = np.any(codes != ref, axis=2)
        if bad.any():
            for bi, bj in np.argwhere(bad):
                i, j = i0 + int(bi), int(bj)
                t = int(c[i, j])
                found.append(((i, j), (int(ri[t]), int(rj[t]))))
                if len(found) >= limit:
                    return found
    return found


def verify_coherence(g: ColoredGraph):
    """Check the coherent-configuration axioms exhaustively.

    Returns a :class:`CoherentConfiguration` (colors renumbered, diagonal first)
    or a :class:`ViolationReport` naming the first violated axiom with a witness.
    """
    c = g.colors
    n = g.n
    diag_colors = np.unique(np.diagonal(c))
    off = c[~np.eye(n, dtype=bool)]
    mixed = np.intersect1d(diag_colors, off)
    if mixed.size:
        col = int(mixed[0])
        i, j = (int(x) for x in np.argwhere((c == col) & ~np.eye(n, dtype=bool))[0])
        return ViolationReport(
            "diagonal",
            f"color {col} occurs both on and off the diagonal",
            {"color": col, "pair": [i, j]},
        )
    # transpose axiom: color(i,j) determines color(j,i)
    pairs = np.unique(np.stack([c.ravel(), c.T.ravel()]), axis=1)
    if len(np.unique(pairs[0])) != pairs.shape[1]:
        vals, counts = np.unique(pairs[0], return_counts=True)
        col = int(vals[counts > 1][0])
        images = pairs[1][pairs[0] == col]
        wit = []
        for img in images[:2]:
            i, j = (int(x) for x in np.argwhere((c == col) & (c.T == img))[0])
            wit.append([i, j])
        return ViolationReport(
            "transpose",
            f"transposes of color {col} fall into {len(images)} different colors",
            {"color": col, "pairs": wit, "transpose_colors": [int(x) for x in images[:2]]},
        )
    bad = exact_unstable_pairs(c, limit=1)
    if bad:
        (i, j), (a, b) = bad[0]
        t = int(c[i, j])
        R = int(c.max()) + 1
        cnt1 = np.zeros((R, R), dtype=np.int64)
        cnt2 = np.zeros((R, R), dtype=np.int64)
        np.add.at(cnt1, (c[a, :], c[:, b]), 1)
        np.add.at(cnt2, (c[i, :], c[:, j]), 1)
        r, s = (int(x) for x in np.argwhere(cnt1 != cnt2)[0])
        return ViolationReport(
            "regularity",
            f"intersection number c[{r},{s}]^{t} differs between pairs ({a},{b}) and ({i},{j})",
            {
                "r": r,
                "s": s,
                "t": t,
                "pairs": [[a, b], [i, j]],
                "counts": [int(cnt1[r, s]), int(cnt2[r, s])],
            },
        )
    return CoherentConfiguration(c)


# -- intersection numbers ---------------------------------------------------

@dataclass(frozen=True)
class IntersectionTensor:
    """Sparse table of intersection numbers ``c_{rs}^t`` (zeros omitted)."""

    rank: int
    entries: dict

    def __getitem__(self, key) -> int:
        return self.entries.get(key, 0)

    def dense(self) -> np.ndarray:
        t = np.zeros((self.rank,) * 3, dtype=np.int64)
        for (r, s, u), v in self.entries.items():
            t[r, s, u] = v
        return t


def _triples_at(c: np.ndarray, a: int, b: int) -> dict:
    """``{(r, s): count}`` of gamma with (a, gamma) in r and (gamma, b) in s."""
    r_col = c[a, :]
    s_col = c[:, b]
    R = int(c.max()) + 1
    codes, counts = np.unique(r_col * R + s_col, return_counts=True)
    return {(int(k // R), int(k % R)): int(v) for k, v in zip(codes, counts)}


def intersection_tensor(x: CoherentConfiguration, *, check_second: bool = True) -> IntersectionTensor:
    """All intersection numbers, from one representative pair per relation.

    When a relation has at least two pairs the counts are recomputed at a second
    pair and compared, as a guard against an unverified input.
    """
    c = x.colors
    entries = {}
    for t in range(x.rank):
        a, b = x.representative(t)
        local = _triples_at(c, a, b)
        if check_second:
            pairs = np.argwhere(c == t)
            if len(pairs) > 1:
                a2, b2 = (int(v) for v in pairs[-1])
                if _triples_at(c, a2, b2) != local:
                    raise AssertionError(f"intersection numbers of color {t} depend on the pair")
        for (r, s), v in local.items():
            entries[(r, s, t)] = v
    return IntersectionTensor(x.rank, entries)


def is_homogeneous(x: CoherentConfiguration) -> bool:
    return x.is_homogeneous


def valencies(x: CoherentConfiguration) -> dict:
    return {s: v for s, v in enumerate(x.valency)}


def fibers(x: CoherentConfiguration):
    return x.fibers


def regular_points(x: CoherentConfiguration) -> list[int]:
    """Points alpha with |alpha r| <= 1 for every basis relation r."""
    rows = np.sort(x.colors, axis=1)
    repeated = np.any(rows[:, 1:] == rows[:, :-1], axis=1)
    return [int(i) for i in np.flatnonzero(~repeated)]


def is_one_regular(x: CoherentConfiguration) -> bool:
    return bool(regular_points(x))


# -- small standard configurations -------------------------------------------

def trivial_configuration(n: int) -> CoherentConfiguration:
    c = np.ones((n, n), dtype=np.int64)
    np.fill_diagonal(c, 0)
    if n == 1:
        c[:] = 0
    return CoherentConfiguration(c)


def complete_configuration(n: int) -> CoherentConfiguration:
    c = np.arange(n * n, dtype=np.int64).reshape(n, n)
    return CoherentConfiguration(c)


def graph_coloring(adjacency) -> ColoredGraph:
    """Diagonal / edge / non-edge coloring of a simple graph given by an adjacency matrix."""
    a = np.asarray(adjacency, dtype=bool)
    c = np.where(a, 1, 2).astype(np.int64)
    np.fill_diagonal(c, 0)
    c = normalize_colors(c)
    return ColoredGraph(c)


def cycle_graph(n: int) -> ColoredGraph:
    a = np.zeros((n, n), dtype=bool)
    for i in range(n):
        a[i, (i + 1) % n] = a[(i + 1) % n, i] = True
    return graph_coloring(a)
