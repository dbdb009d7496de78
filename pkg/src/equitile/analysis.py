"""Norms of deviation matrices, minimality of the quotient, and Weyl bounds.

The off-diagonal blocks of the transformed matrix share their singular
values with the deviation matrices, so any unitarily invariant norm of the
deviation quantifies how far the partition is from equitable, and for
Hermitian input the spectral norm bounds the eigenvalue perturbation of
the joint E/F spectrum against the spectrum of A.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .partition import WeightedIndicator, require_admissible
from .triangularize import DeviationMatrix, TriangularizationResult

#: a column counts as nonzero when its norm exceeds this times the
#: Frobenius norm of the whole matrix
NONZERO_COLUMN_RTOL = 1e-13

_NORM_ALIASES = {
    "fro": "frobenius",
    "frobenius": "frobenius",
    "2": "spectral",
    "spectral": "spectral",
    "nuc": "nuclear",
    "nuclear": "nuclear",
}


def _singular_values(M: np.ndarray) -> np.ndarray:
    if M.size == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc


def _schatten(M: np.ndarray, kind: str) -> float:
    s = _singular_values(np.asarray(M))
    if kind == "frobenius":
        return float(np.sqrt((s**2).sum()))
    if kind == "spectral":
        return float(s[0]) if s.size else 0.0
    if kind == "nuclear":
        return float(s.sum())
    raise InputError(f"unknown norm kind {kind!r}")


@dataclass(frozen=True, eq=False)
class DeviationReport:
    """Schatten norms and sparsity summary of a deviation matrix."""

    frobenius: float
    spectral: float
    nuclear: float
    nonzero_columns: int
    per_block_norms: np.ndarray

    def to_dict(self) -> dict:
        return {
            "frobenius": self.frobenius,
            "spectral": self.spectral,
            "nuclear": self.nuclear,
            "nonzero_columns": self.nonzero_columns,
            "per_block": [[float(x) for x in row] for row in self.per_block_norms],
        }


def deviation_report(T: DeviationMatrix) -> DeviationReport:
    """Summarize a deviation matrix: all norms come from one SVD.

    The nonzero column count upper-bounds the rank; the squared Frobenius
    norm equals the sum of squared deviation-vector norms.
    """
    M = np.asarray(T.assembled)
    s = _singular_values(M)
    fro = float(np.sqrt((s**2).sum()))
    spec = float(s[0]) if s.size else 0.0
    nuc = float(s.sum())
    col_norms = np.linalg.norm(M, axis=0) if M.size else np.zeros(M.shape[1])
    nonzero = int((col_norms > NONZERO_COLUMN_RTOL * fro).sum())
    k = len(T.blocks)
    per_block = np.array(
        [[float(np.linalg.norm(T.blocks[i][j])) for j in range(k)] for i in range(k)]
    )
    per_block.setflags(write=False)
    return DeviationReport(fro, spec, nuc, nonzero, per_block)


def theta_residual(A, wi: WeightedIndicator, Theta, side: str = "front",
                   norm_kind: str = "frobenius") -> float:
    """Norm of the equitability residual for an arbitrary candidate quotient.

    front: ||(A W - W Theta) (W'W)^{-1/2}||, rear: ||(W'W)^{-1/2} (W'A - Theta W')||.
    Over all Theta this is minimized exactly at the respective quotient.
    """
    if side not in ("front", "rear"):
        raise InputError(f"side must be 'front' or 'rear', got {side!r}")
    kind = _NORM_ALIASES.get(norm_kind)
    if kind is None:
        raise InputError(f"unknown norm kind {norm_kind!r}")
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"square matrix required, got shape {A.shape}")
    p = wi.partition
    if A.shape[0] != p.n:
        raise InputError(f"matrix size {A.shape[0]} != partition size {p.n}")
    Theta = np.asarray(Theta)
    if Theta.shape != (p.k, p.k):
        raise InputError(f"Theta must be {p.k}x{p.k}, got {Theta.shape}")
    require_admissible(wi)
    W = wi.matrix()
    norms = wi.cell_norms()
    if side == "front":
        R = (A @ W - W @ Theta) / norms[None, :]
    else:
        R = (W.conj().T @ A - Theta @ W.conj().T) / norms[:, None]
    return _schatten(R, kind)


@dataclass(frozen=True, eq=False)
class PerturbationCheck:
    """Joint E/F spectrum against the spectrum of A with the Weyl bound."""

    joint_spectrum: np.ndarray
    reference: np.ndarray
    tau_spec: float
    max_gap: float
    holds: bool


def weyl_check(A, r: TriangularizationResult, slack_rtol: float = 1e-10
               ) -> PerturbationCheck:
    """Verify |mu_i - lambda_i| <= tau for Hermitian A.

    mu is the sorted joint spectrum of E and F, lambda the sorted spectrum
    of A, and tau the largest singular value of the off-diagonal block.
    Pairing is strictly by sorted order. Non-Hermitian input is refused
    since the bound requires Hermiticity.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"square matrix required, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.conj().T).max() > 1e-10 * scale:
        raise InputError("Weyl bound requires a Hermitian matrix")
    if A.shape[0] != r.n:
        raise InputError(f"matrix size {A.shape[0]} != transform size {r.n}")
    lam = np.sort(np.linalg.eigvalsh((A + A.conj().T) / 2.0))
    mus = []
    for M in (r.E, r.F):
        if M.size:
            mus.append(np.linalg.eigvalsh((M + M.conj().T) / 2.0))
    mu = np.sort(np.concatenate(mus)) if mus else np.zeros(0)
    tau = float(_singular_values(np.asarray(r.D_minus)).max()) if r.D_minus.size else 0.0
    gap = float(np.abs(mu - lam).max()) if lam.size else 0.0
    slack = slack_rtol * np.linalg.norm(A)
    mu.setflags(write=False)
    lam.setflags(write=False)
    return PerturbationCheck(
        joint_spectrum=mu,
        reference=lam,
        tau_spec=tau,
        max_gap=gap,
        holds=bool(gap <= tau + slack),
    )
