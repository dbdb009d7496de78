"""Block-diagonal unitary transforms that (approximately) block triangularize.

Given a square matrix A and an admissible weighted indicator W, a block
diagonal unitary H (one elementary unitary per cell) plus a gathering
permutation turn A into

    A_hat = Omega' H' A H Omega = [[E, Dp'], [Dm, F]]

where E is k-by-k and unitarily similar to the Rayleigh quotient, and the
off-diagonal blocks carry exactly the singular values of the front/rear
deviation matrices. Everything is exact: assembling the four blocks
reproduces the transformed matrix, which is unitarily similar to A.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, NumericalError
from .partition import (
    Partition,
    WeightedIndicator,
    require_admissible,
    suitable_indexing_permutation,
)
from .reflector import ElementaryUnitary, beta0, build_reflector, _check_phase


def _coerce_square(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"square matrix required, got shape {A.shape}")
    if A.dtype.kind in "iub":
        A = A.astype(np.float64)
    return A


@dataclass(frozen=True, eq=False)
class QuotientMatrix:
    """k-by-k quotient E^alpha; all alphas are similar to each other."""

    alpha: float
    entries: np.ndarray


def generalized_quotient(A, wi: WeightedIndicator, alpha: float) -> QuotientMatrix:
    """E^alpha = (W'W)^{-(1-alpha)/2} W'AW (W'W)^{-(1+alpha)/2}.

    alpha = -1 gives the front quotient (weighted row aggregates), +1 the
    rear quotient, 0 the Rayleigh quotient. The Gram matrix W'W is diagonal
    with the squared cell weight norms, so only scalar powers are taken.
    """
    A = _coerce_square(A)
    p = wi.partition
    if A.shape[0] != p.n:
        raise InputError(f"matrix size {A.shape[0]} != partition size {p.n}")
    require_admissible(wi)
    W = wi.matrix()
    norms2 = wi.cell_norms2()
    M = W.conj().T @ A @ W
    alpha = float(alpha)
    # divide by the exact squared norms for the two standard quotients so
    # integer-exact inputs produce integer-exact entries
    if alpha == -1.0:
        entries = M / norms2[:, None]
    elif alpha == 1.0:
        entries = M / norms2[None, :]
    else:
        norms = np.sqrt(norms2)
        entries = (norms ** (alpha - 1.0))[:, None] * M * (norms ** (-alpha - 1.0))[None, :]
    entries.setflags(write=False)
    return QuotientMatrix(alpha=alpha, entries=entries)


@dataclass(frozen=True, eq=False)
class DeviationMatrix:
    """Blockwise equitability residuals, assembled as an N-by-k matrix.

    Front block (i, j) has length n_i and lives in rows of cell i, column j;
    rear block (i, j) has length n_j and lives in rows of cell j, column i.
    The matrix is zero exactly when the respective equitability holds, and
    every block norm is invariant under rescaling weight blocks.
    """

    side: str
    blocks: tuple[tuple[np.ndarray, ...], ...]
    assembled: np.ndarray


def deviation_matrices(A, wi: WeightedIndicator) -> tuple[DeviationMatrix, DeviationMatrix]:
    """Front and rear deviation matrices of A with respect to wi.

    T_front = (A W - W E_front) (W'W)^{-1/2}
    T_rear  = (A' W - W E_rear') (W'W)^{-1/2}
    """
    A = _coerce_square(A)
    p = wi.partition
    if A.shape[0] != p.n:
        raise InputError(f"matrix size {A.shape[0]} != partition size {p.n}")
    require_admissible(wi)
    W = wi.matrix()
    norms = wi.cell_norms()
    Em = generalized_quotient(A, wi, -1.0).entries
    Ep = generalized_quotient(A, wi, +1.0).entries
    Tm = (A @ W - W @ Em) / norms[None, :]
    Tp = (A.conj().T @ W - W @ Ep.conj().T) / norms[None, :]
    cells = [list(c) for c in p.cells]
    fr = tuple(
        tuple(Tm[cells[i], j] for j in range(p.k)) for i in range(p.k)
    )
    re = tuple(
        tuple(Tp[cells[j], i] for j in range(p.k)) for i in range(p.k)
    )
    Tm.setflags(write=False)
    Tp.setflags(write=False)
    return (
        DeviationMatrix("front", fr, Tm),
        DeviationMatrix("rear", re, Tp),
    )


@dataclass(frozen=True, eq=False)
class BlockReflector:
    """Block diagonal unitary: one elementary unitary per cell.

    Applies to matrices and vectors in the block-contiguous layout given by
    the partition's cell sizes. Storage is O(N); application to an N-by-N
    matrix costs O(N^2).
    """

    reflectors: tuple[ElementaryUnitary, ...]
    phases: tuple[complex, ...]
    partition: Partition

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.partition.sizes

    @property
    def n(self) -> int:
        return self.partition.n

    def _offsets(self):
        offs = np.concatenate([[0], np.cumsum(self.sizes)])
        return offs

    def apply_left(self, M) -> np.ndarray:
        """H' M, blockwise over the rows."""
        M = np.asarray(M)
        if M.ndim != 2 or M.shape[0] != self.n:
            raise InputError(f"matrix with {self.n} rows required, got {M.shape}")
        out = np.array(M, dtype=np.result_type(M.dtype, *(h.coeff for h in self.reflectors)))
        offs = self._offsets()
        for h, a, b in zip(self.reflectors, offs, offs[1:]):
            out[a:b, :] = h.apply_left(out[a:b, :])
        return out

    def apply_right(self, M) -> np.ndarray:
        """M H, blockwise over the columns."""
        M = np.asarray(M)
        if M.ndim != 2 or M.shape[1] != self.n:
            raise InputError(f"matrix with {self.n} columns required, got {M.shape}")
        out = np.array(M, dtype=np.result_type(M.dtype, *(h.coeff for h in self.reflectors)))
        offs = self._offsets()
        for h, a, b in zip(self.reflectors, offs, offs[1:]):
            out[:, a:b] = h.apply_right(out[:, a:b])
        return out

    def conjugate(self, A) -> np.ndarray:
        """H' A H."""
        return self.apply_right(self.apply_left(A))

    def matvec(self, v) -> np.ndarray:
        """H v."""
        v = np.asarray(v)
        if v.shape != (self.n,):
            raise InputError(f"vector of length {self.n} required, got {v.shape}")
        out = np.array(v, dtype=np.result_type(v.dtype, *(h.coeff for h in self.reflectors)))
        offs = self._offsets()
        for h, a, b in zip(self.reflectors, offs, offs[1:]):
            out[a:b] = h.matvec(out[a:b])
        return out

    def dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=complex)
        offs = self._offsets()
        for h, a, b in zip(self.reflectors, offs, offs[1:]):
            out[a:b, a:b] = h.dense()
        return out


def _reflector_from_blocks(blocks: Sequence[np.ndarray], phases,
                           partition: Partition) -> BlockReflector:
    k = len(blocks)
    if phases is None or isinstance(phases, str):
        if phases not in (None, "auto"):
            raise InputError(f"phases must be 'auto' or a sequence, got {phases!r}")
        betas = tuple(beta0(b) for b in blocks)
    else:
        betas = tuple(_check_phase(b) for b in phases)
        if len(betas) != k:
            raise InputError(f"expected {k} phases, got {len(betas)}")
    refl = tuple(build_reflector(b, beta) for b, beta in zip(blocks, betas))
    return BlockReflector(reflectors=refl, phases=betas, partition=partition)


def build_block_reflector(wi: WeightedIndicator, phases="auto") -> BlockReflector:
    """One elementary unitary per cell, built from the cell weight blocks.

    "auto" picks the default phase of each weight block. The result acts on
    suitably indexed (block-contiguous) matrices.
    """
    require_admissible(wi)
    blocks = [wi.cell_weights(i) for i in range(wi.partition.k)]
    return _reflector_from_blocks(blocks, phases, wi.partition)


def omega_permutation(n_sizes: Sequence[int]) -> np.ndarray:
    """Forward map gathering the first index of each block into the front.

    For block sizes (n_1, .., n_k), position offset_i maps to i, and the
    remaining indices keep their relative order in the trailing positions.
    """
    sizes = [int(s) for s in n_sizes]
    if len(sizes) == 0:
        raise InputError("at least one block size required")
    if any(s < 1 for s in sizes):
        raise InputError(f"block sizes must be positive, got {sizes}")
    k = len(sizes)
    out = np.empty(sum(sizes), dtype=int)
    off = 0
    tail = k
    for i, ni in enumerate(sizes):
        out[off] = i
        for m in range(1, ni):
            out[off + m] = tail
            tail += 1
        off += ni
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class TriangularizationResult:
    """The four blocks of Omega' H' P' A P H Omega plus all transforms.

    pre_permutation is the suitable-indexing relabeling applied first,
    omega the block-gathering map; both are forward maps. The reflector
    lives in the suitably indexed frame.
    """

    E: np.ndarray
    D_minus: np.ndarray
    D_plus_conj: np.ndarray
    F: np.ndarray
    reflector: BlockReflector
    omega: np.ndarray
    pre_permutation: np.ndarray
    indicator: WeightedIndicator

    @property
    def n(self) -> int:
        return self.E.shape[0] + self.F.shape[0]

    @property
    def k(self) -> int:
        return self.E.shape[0]

    def assembled(self) -> np.ndarray:
        k, n = self.k, self.n
        out = np.zeros((n, n), dtype=np.result_type(self.E, self.F))
        out[:k, :k] = self.E
        out[:k, k:] = self.D_plus_conj
        out[k:, :k] = self.D_minus
        out[k:, k:] = self.F
        return out


def block_triangularize(A, wi: WeightedIndicator, phases="auto") -> TriangularizationResult:
    """Run the full pipeline: relabel, conjugate by H, gather with Omega.

    The suitable-indexing permutation is applied first so non-contiguous
    partitions are accepted; the reflector is then built from the permuted
    weight blocks and applied blockwise in O(N^2).
    """
    A = _coerce_square(A)
    p = wi.partition
    if A.shape[0] != p.n:
        raise InputError(f"matrix size {A.shape[0]} != partition size {p.n}")
    require_admissible(wi)
    n, k = p.n, p.k
    sizes = p.sizes

    perm = suitable_indexing_permutation(p)
    inv = np.argsort(perm)
    A_s = A[np.ix_(inv, inv)]
    w_s = wi.weights[inv]

    offs = np.concatenate([[0], np.cumsum(sizes)])
    blocks = [w_s[a:b] for a, b in zip(offs, offs[1:])]
    contiguous = Partition(tuple(tuple(range(a, b)) for a, b in zip(offs, offs[1:])))
    refl = _reflector_from_blocks(blocks, phases, contiguous)

    At = refl.conjugate(A_s)
    om = omega_permutation(sizes)
    oinv = np.argsort(om)
    Ah = At[np.ix_(oinv, oinv)]

    E = Ah[:k, :k].copy()
    D_minus = Ah[k:, :k].copy()
    D_plus_conj = Ah[:k, k:].copy()
    F = Ah[k:, k:].copy()
    for B in (E, D_minus, D_plus_conj, F):
        B.setflags(write=False)
    return TriangularizationResult(
        E=E,
        D_minus=D_minus,
        D_plus_conj=D_plus_conj,
        F=F,
        reflector=refl,
        omega=om,
        pre_permutation=perm,
        indicator=wi,
    )


def recover_eigenvector(r: TriangularizationResult, z_hat) -> np.ndarray:
    """Map an eigenvector of the transformed matrix back to one of A.

    Applies Omega, then H, then undoes the suitable-indexing relabeling.
    """
    z = np.asarray(z_hat)
    if z.shape != (r.n,):
        raise InputError(f"vector of length {r.n} required, got {z.shape}")
    v = z[r.omega]
    v = r.reflector.matvec(v)
    return v[r.pre_permutation]


def _eigvals(M: np.ndarray) -> np.ndarray:
    if M.size == 0:
        return np.zeros(0, dtype=complex)
    herm = np.abs(M - M.conj().T).max() <= 1e-12 * max(1.0, np.abs(M).max())
    try:
        if herm:
            return np.linalg.eigvalsh((M + M.conj().T) / 2.0).astype(complex)
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver failed: {exc}") from exc


@dataclass(frozen=True, eq=False)
class SpectrumSplit:
    eigs_E: np.ndarray
    eigs_F: np.ndarray
    exact: bool


def spectrum_split(r: TriangularizationResult, tol: float = 1e-10) -> SpectrumSplit:
    """Eigenvalues of E and F; exact when both off-diagonal blocks vanish.

    When exact, the multiset union of the two spectra is the spectrum of A.
    """
    eigs_E = np.sort_complex(_eigvals(np.asarray(r.E)))
    eigs_F = np.sort_complex(_eigvals(np.asarray(r.F)))
    dm = np.linalg.norm(r.D_minus) if r.D_minus.size else 0.0
    dp = np.linalg.norm(r.D_plus_conj) if r.D_plus_conj.size else 0.0
    return SpectrumSplit(eigs_E=eigs_E, eigs_F=eigs_F, exact=bool(max(dm, dp) <= tol))


def spectrum_gap(a, b) -> float:
    """Largest gap of a greedy nearest-neighbor matching of two multisets.

    Both multisets must have equal cardinality. This is the comparison
    semantics used for duplicate-eigenvalue multiset equality up to a
    tolerance.
    """
    a = np.sort_complex(np.asarray(a, dtype=complex).ravel())
    b = list(np.asarray(b, dtype=complex).ravel())
    if len(a) != len(b):
        raise InputError(f"multisets differ in size: {len(a)} vs {len(b)}")
    worst = 0.0
    for z in a:
        diffs = np.abs(np.array(b) - z)
        i = int(np.argmin(diffs))
        worst = max(worst, float(diffs[i]))
        b.pop(i)
    return worst
