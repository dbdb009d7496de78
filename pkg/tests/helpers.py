"""Shared test data and oracles.

A0 is a 6x6 integer matrix that is front equitable with respect to the
partition (1 | 2,6 | 3,4,5) in 1-based labels. The expected transform
blocks below are exact closed forms, cross-checked in the tests against
spectrum and norm preservation, which any unitary similarity must obey.
"""
from __future__ import annotations

import numpy as np

import equitile as eq

A0 = np.array(
    [
        [1, 2, 3, 3, 3, 2],
        [2, 4, 3, 1, 2, 1],
        [3, 3, 1, 4, 1, 1],
        [3, 1, 4, 0, 2, 3],
        [3, 2, 1, 2, 3, 2],
        [2, 1, 1, 3, 2, 4],
    ],
    dtype=float,
)

PI0_CELLS = ((0,), (1, 5), (2, 3, 4))

# forward relabeling map that makes the cells contiguous: 3<->6 in 1-based terms
P0_FORWARD = np.array([0, 1, 5, 3, 4, 2])

A_SUIT = np.array(
    [
        [1, 2, 2, 3, 3, 3],
        [2, 4, 1, 1, 2, 3],
        [2, 1, 4, 3, 2, 1],
        [3, 1, 3, 0, 2, 4],
        [3, 2, 2, 2, 3, 1],
        [3, 3, 1, 4, 1, 1],
    ],
    dtype=float,
)

EMINUS = np.array([[1, 4, 9], [2, 5, 6], [3, 4, 6]], dtype=float)

_s2, _s3, _s6 = np.sqrt(2.0), np.sqrt(3.0), np.sqrt(6.0)

E_HAT = np.array(
    [
        [1, 4 / _s2, 9 / _s3],
        [4 / _s2, 5, 6 * _s2 / _s3],
        [9 / _s3, 6 * _s2 / _s3, 6],
    ]
)

F_HAT = np.array(
    [
        [3, (_s2 - _s6) / 2, -(_s2 + _s6) / 2],
        [(_s2 - _s6) / 2, _s3 - 1, -2],
        [-(_s2 + _s6) / 2, -2, -_s3 - 1],
    ]
)

H2_DENSE = -(1 / _s2) * np.array([[1.0, 1.0], [1.0, -1.0]])

H3_DENSE = -(1 / _s3) * np.array(
    [
        [1, 1, 1],
        [1, (1 + _s3) / -2, (1 - _s3) / -2],
        [1, (1 - _s3) / -2, (1 + _s3) / -2],
    ]
)


def a_hat_expected() -> np.ndarray:
    out = np.zeros((6, 6))
    out[:3, :3] = E_HAT
    out[3:, 3:] = F_HAT
    return out


def eum_dense(g: float, y) -> np.ndarray:
    """Rank-one unitary U(g, y) = I - 2/(1+ig) * pinv(y'y) * y y'."""
    y = np.asarray(y, dtype=complex)
    yy = np.vdot(y, y).real
    if yy == 0:
        return np.eye(len(y), dtype=complex)
    c = 2.0 / ((1.0 + 1j * g) * yy)
    return np.eye(len(y), dtype=complex) - c * np.outer(y, y.conj())


def random_partition(rng, n: int, k: int | None = None) -> eq.Partition:
    """Random partition of {0..n-1} into exactly k non-empty cells."""
    if k is None:
        k = int(rng.integers(1, n + 1))
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(labels)
    return eq.Partition.from_labels(labels)


def random_weights(rng, p: eq.Partition, complex_weights: bool = True) -> np.ndarray:
    """Admissible weights: every entry bounded away from zero."""
    mag = rng.uniform(0.5, 2.0, size=p.n)
    if complex_weights:
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi, size=p.n))
        return mag * phase
    return mag * rng.choice([-1.0, 1.0], size=p.n)


def random_complex_matrix(rng, m: int, n: int | None = None) -> np.ndarray:
    n = m if n is None else n
    return rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))


def random_hermitian(rng, n: int, complex_entries: bool = True) -> np.ndarray:
    M = random_complex_matrix(rng, n) if complex_entries else rng.normal(size=(n, n))
    return (M + M.conj().T) / 2.0


def planted_equitable(rng, k: int, sizes, complex_entries: bool = True,
                      noise: float = 1.0):
    """Block matrix with constant block row sums plus row-sum-free noise.

    Returns (A, partition, quotient): A is front equitable with front
    quotient exactly the drawn Theta.
    """
    sizes = list(sizes)
    n = sum(sizes)
    Theta = random_complex_matrix(rng, k) if complex_entries else rng.normal(size=(k, k))
    A = np.zeros((n, n), dtype=complex if complex_entries else float)
    offs = np.concatenate([[0], np.cumsum(sizes)])
    for i in range(k):
        for j in range(k):
            block = np.full((sizes[i], sizes[j]), Theta[i, j] / sizes[j])
            if noise and sizes[j] > 1:
                R = random_complex_matrix(rng, sizes[i], sizes[j]) if complex_entries \
                    else rng.normal(size=(sizes[i], sizes[j]))
                R = R - R.mean(axis=1, keepdims=True)
                block = block + noise * R
            A[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = block
    cells = [tuple(range(offs[i], offs[i + 1])) for i in range(k)]
    return A, eq.Partition.from_cells(cells), Theta


def all_partitions(n: int):
    """All set partitions of {0..n-1} in canonical cell order."""
    def rec(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for sub in rec(rest):
            yield [[first]] + [list(c) for c in sub]
            for i in range(len(sub)):
                out = [list(c) for c in sub]
                out[i] = [first] + out[i]
                yield out
    for cells in rec(list(range(n))):
        yield eq.Partition.from_cells(cells).canonical()


def random_blocks(rng, k, max_rows=5, complex_entries=True):
    """Full-column-rank random blocks; columns never exceed rows."""
    blocks = []
    for _ in range(k):
        m = int(rng.integers(1, max_rows + 1))
        q = int(rng.integers(1, m + 1))
        W = random_complex_matrix(rng, m, q) if complex_entries \
            else rng.normal(size=(m, q))
        blocks.append(W)
    return blocks


def twist_block_svd(rng, bs: eq.BlockSVD) -> eq.BlockSVD:
    """Another valid factorization: matched diagonal phases on U and V."""
    us, vs = [], []
    for u, s, v in zip(bs.u_blocks, bs.sigma_blocks, bs.v_blocks):
        m, q = u.shape[0], v.shape[0]
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=m))
        us.append(u * phases[None, :])
        vs.append(v * phases[:q][None, :])
    return eq.BlockSVD(
        u_blocks=tuple(us),
        sigma_blocks=bs.sigma_blocks,
        v_blocks=tuple(vs),
        omega=bs.omega,
        source_blocks=bs.source_blocks,
    )


def charpoly_eigenvalues(A) -> np.ndarray:
    """Eigenvalues via characteristic polynomial coefficients.

    Coefficients come from the Faddeev-LeVerrier recurrence, roots from the
    companion matrix of the polynomial; independent of a direct
    eigendecomposition of A.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    M = np.zeros_like(A)
    coeffs = [1.0 + 0j]
    I = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        M = A @ M + coeffs[-1] * I
        coeffs.append(-(A @ M).trace() / k)
    return np.roots(np.array(coeffs))


def sorted_complex(values) -> np.ndarray:
    return np.sort_complex(np.asarray(values, dtype=complex).ravel())
