"""Partitions of matrix index sets, weighted indicators, and equitability tests.

A partition is an ordered sequence of disjoint cells covering {0..N-1}.
Cell order is significant (it fixes the block layout of every downstream
transform); indices inside a cell are kept sorted. A weighted indicator
attaches a complex weight to every index; the induced N-by-k matrix W has
w[v] in column i exactly when v belongs to cell i.

Equitability of a matrix A with respect to W means A W = W E (front, i.e.
constant weighted block row aggregates) or W' A = E W' (rear). Deviation
from it is measured blockwise by the normalized residual vectors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AdmissibilityError, InputError


def _coerce_square(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"square matrix required, got shape {A.shape}")
    if A.dtype.kind in "iub":
        A = A.astype(np.float64)
    return A


@dataclass(frozen=True)
class Partition:
    """Ordered disjoint cells covering {0..N-1}; indices sorted within cells."""

    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        cells = tuple(tuple(sorted(int(v) for v in c)) for c in self.cells)
        if not cells or any(len(c) == 0 for c in cells):
            raise InputError("cells must be non-empty")
        flat = [v for c in cells for v in c]
        n = len(flat)
        if sorted(flat) != list(range(n)):
            raise InputError("cells must disjointly cover 0..N-1")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_cells(cls, cells: Iterable[Iterable[int]]) -> "Partition":
        return cls(tuple(tuple(c) for c in cells))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """Cells grouped by label value, ordered by smallest member."""
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(v)
        return cls(tuple(tuple(c) for c in sorted(groups.values())))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple((i,) for i in range(n)))

    @classmethod
    def single_cell(cls, n: int) -> "Partition":
        return cls((tuple(range(n)),))

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.cells)

    @property
    def k(self) -> int:
        return len(self.cells)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cells)

    def canonical(self) -> "Partition":
        """Same cells, reordered so cells appear by their smallest element."""
        return Partition(tuple(sorted(self.cells)))

    def labels(self) -> np.ndarray:
        """Array mapping each index to its cell number."""
        lab = np.empty(self.n, dtype=int)
        for i, c in enumerate(self.cells):
            lab[list(c)] = i
        return lab

    def refines(self, other: "Partition") -> bool:
        """True if every cell of self lies inside a cell of other."""
        if self.n != other.n:
            return False
        lab = other.labels()
        return all(len({lab[v] for v in c}) == 1 for c in self.cells)

    def to_dict(self) -> dict:
        """JSON form with 1-based indices."""
        return {"n": self.n, "cells": [[v + 1 for v in c] for c in self.cells]}

    @classmethod
    def from_dict(cls, d: dict) -> "Partition":
        try:
            cells = tuple(tuple(int(v) - 1 for v in c) for c in d["cells"])
            n = int(d["n"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad partition object: {exc}") from exc
        p = cls(cells)
        if p.n != n:
            raise InputError(f"partition covers {p.n} indices but n = {n}")
        return p


@dataclass(frozen=True, eq=False)
class WeightedIndicator:
    """Partition plus a complex weight per index."""

    partition: Partition
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights)
        if w.ndim != 1 or w.size != self.partition.n:
            raise InputError(
                f"weights must be a vector of length {self.partition.n}, got {w.shape}"
            )
        if w.dtype.kind in "iub":
            w = w.astype(np.float64)
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def unit(cls, partition: Partition) -> "WeightedIndicator":
        return cls(partition, np.ones(partition.n))

    def cell_norms2(self) -> np.ndarray:
        """Exact squared norms per cell (integer-valued for unit weights)."""
        return np.array(
            [np.vdot(self.weights[list(c)], self.weights[list(c)]).real
             for c in self.partition.cells]
        )

    def cell_norms(self) -> np.ndarray:
        return np.sqrt(self.cell_norms2())

    def cell_weights(self, i: int) -> np.ndarray:
        return self.weights[list(self.partition.cells[i])]

    def matrix(self) -> np.ndarray:
        """Dense N-by-k weighted indicator."""
        W = np.zeros((self.partition.n, self.partition.k), dtype=self.weights.dtype)
        for i, c in enumerate(self.partition.cells):
            W[list(c), i] = self.weights[list(c)]
        return W


def is_admissible(wi: WeightedIndicator) -> bool:
    """Every cell's weight block must have strictly positive norm."""
    return bool(np.all(wi.cell_norms() > 0))


def require_admissible(wi: WeightedIndicator) -> None:
    if not is_admissible(wi):
        bad = [i for i, nrm in enumerate(wi.cell_norms()) if nrm == 0]
        raise AdmissibilityError(f"cells {bad} have zero-norm weight blocks")


def indicator_matrix(p: Partition) -> np.ndarray:
    """Dense N-by-k 0/1 matrix; column i marks the members of cell i."""
    B = np.zeros((p.n, p.k))
    for i, c in enumerate(p.cells):
        B[list(c), i] = 1.0
    return B


def suitable_indexing_permutation(p: Partition) -> np.ndarray:
    """Forward relabeling map making cells occupy contiguous ranges in order.

    Returns sigma with new_index = sigma[old_index]. Indices already inside
    their cell's target range keep their position; the remaining members
    fill the free slots in ascending order. Relabeling A as A[inv, inv]
    with inv = argsort(sigma) yields the block-contiguous layout.
    """
    perm = np.empty(p.n, dtype=int)
    off = 0
    for c in p.cells:
        slots = set(range(off, off + len(c)))
        keep = [v for v in c if v in slots]
        free = sorted(slots - set(keep))
        for v in keep:
            perm[v] = v
        movers = [v for v in c if v not in slots]
        for v, s in zip(movers, free):
            perm[v] = s
        off += len(c)
    perm.setflags(write=False)
    return perm


@dataclass(frozen=True, eq=False)
class EquitabilityVerdict:
    side: str
    is_equitable: bool
    max_residual: float
    per_block_residuals: np.ndarray
    tol: float


def check_equitable(A, wi: WeightedIndicator, side: str = "front", tol: float = 1e-10
                    ) -> EquitabilityVerdict:
    """Blockwise equitability residuals of A with respect to wi.

    The (i, j) residual is the norm of the deviation vector of block (i, j):
    front uses (A_ij w_j - e_ij w_i)/||w_j|| with e_ij the weighted row
    aggregate; rear is the column analogue. Normalization by the weight
    norms makes the tolerance scale-free in the weights.
    """
    if side not in ("front", "rear"):
        raise InputError(f"side must be 'front' or 'rear', got {side!r}")
    A = _coerce_square(A)
    p = wi.partition
    if A.shape[0] != p.n:
        raise InputError(f"matrix size {A.shape[0]} != partition size {p.n}")
    require_admissible(wi)
    norms2 = wi.cell_norms2()
    norms = np.sqrt(norms2)
    res = np.zeros((p.k, p.k))
    for i, ci in enumerate(p.cells):
        w_i = wi.weights[list(ci)]
        for j, cj in enumerate(p.cells):
            w_j = wi.weights[list(cj)]
            block = A[np.ix_(list(ci), list(cj))]
            if side == "front":
                r = block @ w_j
                e = np.vdot(w_i, r) / norms2[i]
                res[i, j] = np.linalg.norm(r - e * w_i) / norms[j]
            else:
                s = block.conj().T @ w_i
                e = np.vdot(w_j, s) / norms2[j]
                res[i, j] = np.linalg.norm(s - e * w_j) / norms[i]
    mx = float(res.max())
    res.setflags(write=False)
    return EquitabilityVerdict(side, mx <= tol, mx, res, tol)


def epsilon_equitability(A, p: Partition) -> float:
    """Smallest eps such that all block row sums spread at most eps.

    The spread of a block is the largest modulus of a difference of two of
    its row sums; the result is the maximum over all blocks.
    """
    A = _coerce_square(A)
    if A.shape[0] != p.n:
        raise InputError(f"matrix size {A.shape[0]} != partition size {p.n}")
    worst = 0.0
    for ci in p.cells:
        for cj in p.cells:
            r = A[np.ix_(list(ci), list(cj))].sum(axis=1)
            if len(r) > 1:
                d = np.abs(r[:, None] - r[None, :]).max()
                worst = max(worst, float(d))
    return worst


def check_regular_equivalence(A, p: Partition, zero_tol: float = 0.0) -> bool:
    """True if every block's row-sum vector is entrywise nonzero or all zero."""
    A = _coerce_square(A)
    if A.shape[0] != p.n:
        raise InputError(f"matrix size {A.shape[0]} != partition size {p.n}")
    for ci in p.cells:
        for cj in p.cells:
            r = np.abs(A[np.ix_(list(ci), list(cj))].sum(axis=1))
            if np.any(r <= zero_tol) and np.any(r > zero_tol):
                return False
    return True


def _split_cell(cell: tuple[int, ...], sigs: np.ndarray, tol: float) -> list[list[int]]:
    """Split one cell by its members' color signatures.

    Members are sorted lexicographically on the interleaved (real, imag)
    components of their signatures; a new group starts when any component
    differs from the group representative by more than tol. Deterministic
    for ties.
    """
    sigs = np.asarray(sigs, dtype=complex)
    keys = np.stack([sigs.real, sigs.imag], axis=2).reshape(len(cell), -1)
    order = np.lexsort(keys.T[::-1])
    groups: list[list[int]] = []
    rep = -1
    for idx in order:
        if groups and np.abs(sigs[idx] - sigs[rep]).max() <= tol:
            groups[-1].append(cell[idx])
        else:
            groups.append([cell[idx]])
            rep = idx
    return groups


def coarsest_front_equitable_refinement(A, initial: Partition | None = None,
                                        color_tol: float = 0.0) -> Partition:
    """Coarsest refinement of `initial` against which A is front equitable.

    Classic color refinement: the signature of index u is the vector of its
    row sums into the current cells; cells split by signature until no cell
    splits. The fixpoint is unique, so processing order only affects
    intermediate states. Output is in canonical form.
    """
    A = _coerce_square(A)
    if initial is None:
        initial = Partition.single_cell(A.shape[0])
    if A.shape[0] != initial.n:
        raise InputError(f"matrix size {A.shape[0]} != partition size {initial.n}")
    part = initial.canonical()
    while True:
        # column u of sums holds the per-cell row sums of index u
        sums = np.stack([A[:, list(c)].sum(axis=1) for c in part.cells], axis=1)
        new_cells: list[tuple[int, ...]] = []
        changed = False
        for c in part.cells:
            pieces = _split_cell(c, sums[list(c), :], color_tol)
            if len(pieces) > 1:
                changed = True
            new_cells.extend(tuple(sorted(g)) for g in pieces)
        if not changed:
            return part
        part = Partition(tuple(new_cells)).canonical()


def weighted_refinement(A, w, initial: Partition | None = None,
                        color_tol: float = 0.0) -> Partition:
    """Color refinement in the weighted sense for an entrywise nonzero w.

    Equivalent to refining diag(w)^-1 A diag(w): pairing the result with w
    gives a front equitable weighted indicator.
    """
    A = _coerce_square(A)
    w = np.asarray(w)
    if w.ndim != 1 or w.size != A.shape[0]:
        raise InputError(f"weight vector of length {A.shape[0]} required, got {w.shape}")
    if np.any(w == 0):
        raise InputError("weighted refinement requires entrywise nonzero weights")
    M = (A * w[None, :]) / w[:, None]
    return coarsest_front_equitable_refinement(M, initial, color_tol)
