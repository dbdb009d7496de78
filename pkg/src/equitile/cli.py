"""File-based front end: refine, check, transform, split, rect.

Matrices travel as Matrix Market files, partitions and weights as JSON,
reports as JSON on stdout. Exit codes: 0 success, 2 input/parse error,
3 semantic negative (not equitable, rank deficient), 4 numerical failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .analysis import deviation_report, weyl_check
from .errors import (
    AdmissibilityError,
    EquitileError,
    InputError,
    NumericalError,
    RankDeficiencyError,
)

from .mmio import load_matrix_market, save_matrix_market
from .partition import (
    Partition,
    WeightedIndicator,
    check_equitable,
    check_regular_equivalence,
    coarsest_front_equitable_refinement,
    epsilon_equitability,
    weighted_refinement,
)
from .rectangular import block_svd, deviation_rect, rect_transform, split_block_diagonal
from .triangularize import (
    block_triangularize,
    deviation_matrices,
    generalized_quotient,
    recover_eigenvector,
    spectrum_split,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NEGATIVE = 3
EXIT_NUMERICAL = 4

DEFAULT_TOL = 1e-10


def _default_tol() -> float:
    raw = os.environ.get("EQUITILE_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError as exc:
        raise InputError(f"EQUITILE_TOL is not a number: {raw!r}") from exc


def _digest(path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _read_partition(path, n: int) -> Partition:
    p = Partition.from_dict(_load_json(path))
    if p.n != n:
        raise InputError(f"partition size {p.n} does not match matrix size {n}")
    return p


def _parse_complex_list(data, what: str) -> np.ndarray:
    vals = []
    for item in data:
        if isinstance(item, (int, float)):
            vals.append(complex(item))
        elif isinstance(item, list) and len(item) == 2:
            vals.append(complex(float(item[0]), float(item[1])))
        else:
            raise InputError(f"{what}: entries must be numbers or [re, im] pairs")
    arr = np.array(vals)
    if np.all(arr.imag == 0):
        return arr.real
    return arr


def _read_weights(path, n: int) -> np.ndarray:
    data = _load_json(path)
    if not isinstance(data, list) or len(data) != n:
        raise InputError(f"{path}: weights must be a JSON array of length {n}")
    return _parse_complex_list(data, str(path))


def _read_phases(path, k: int):
    data = _load_json(path)
    if not isinstance(data, list) or len(data) != k:
        raise InputError(f"{path}: phases must be a JSON array of length {k}")
    return _parse_complex_list(data, str(path))


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _cplx_vector(v) -> list:
    return [_cplx(z) for z in np.asarray(v).ravel()]


def _cplx_matrix(M) -> list:
    return [[_cplx(z) for z in row] for row in np.asarray(M)]


def _emit(out_dir, name: str, M) -> str:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / f"{name}.mtx"
    field = "complex" if np.iscomplexobj(M) else "real"
    save_matrix_market(target, M, fmt="array", field=field)
    return str(target)


def _print_report(report: dict) -> None:
    print(json.dumps(report, indent=2))


def cmd_refine(args) -> int:
    A = load_matrix_market(args.matrix).matrix
    initial = _read_partition(args.initial, A.shape[0]) if args.initial else None
    if args.weights:
        w = _read_weights(args.weights, A.shape[0])
        part = weighted_refinement(A, w, initial, color_tol=args.color_tol)
    else:
        part = coarsest_front_equitable_refinement(A, initial, color_tol=args.color_tol)
    print(json.dumps(part.to_dict()))
    return EXIT_OK


def cmd_check(args) -> int:
    A = load_matrix_market(args.matrix).matrix
    part = _read_partition(args.partition, A.shape[0])
    if args.weights:
        wi = WeightedIndicator(part, _read_weights(args.weights, A.shape[0]))
    else:
        wi = WeightedIndicator.unit(part)
    verdict = check_equitable(A, wi, side=args.side, tol=args.tol)
    report = {
        "side": verdict.side,
        "is_equitable": verdict.is_equitable,
        "max_residual": verdict.max_residual,
        "tol": verdict.tol,
        "epsilon": epsilon_equitability(A, part) if args.epsilon else None,
        "regular": check_regular_equivalence(A, part) if args.regular else None,
    }
    _print_report(report)
    return EXIT_OK if verdict.is_equitable else EXIT_NEGATIVE


def _transform_inputs(args):
    A = load_matrix_market(args.matrix).matrix
    part = _read_partition(args.partition, A.shape[0])
    if args.weights:
        wi = WeightedIndicator(part, _read_weights(args.weights, A.shape[0]))
    else:
        wi = WeightedIndicator.unit(part)
    phases = "auto"
    if args.phases and args.phases != "auto":
        phases = _read_phases(args.phases, part.k)
    return A, part, wi, phases


def cmd_transform(args) -> int:
    t0 = time.perf_counter()
    A, part, wi, phases = _transform_inputs(args)
    result = block_triangularize(A, wi, phases=phases)
    wanted = {piece.strip() for piece in args.emit.split(",") if piece.strip()}
    unknown = wanted - {"E", "F", "D", "full", "eigvecs"}
    if unknown:
        raise InputError(f"unknown --emit values: {sorted(unknown)}")

    files = {}
    if "E" in wanted:
        files["E"] = _emit(args.out_dir, "E", result.E)
    if "F" in wanted:
        files["F"] = _emit(args.out_dir, "F", result.F)
    if "D" in wanted:
        files["D_minus"] = _emit(args.out_dir, "D_minus", result.D_minus)
        files["D_plus_conj"] = _emit(args.out_dir, "D_plus_conj", result.D_plus_conj)
    if "full" in wanted:
        files["A_hat"] = _emit(args.out_dir, "A_hat", result.assembled())
    if "eigvecs" in wanted:
        vecs_E = np.linalg.eig(np.asarray(result.E))[1] if result.E.size else np.zeros((0, 0))
        vecs_F = np.linalg.eig(np.asarray(result.F))[1] if result.F.size else np.zeros((0, 0))
        k = result.k
        V = np.zeros((result.n, result.n), dtype=complex)
        Z = np.zeros((result.n, result.n), dtype=complex)
        Z[:k, :k] = vecs_E
        Z[k:, k:] = vecs_F
        for col in range(result.n):
            V[:, col] = recover_eigenvector(result, Z[:, col])
        files["eigvecs"] = _emit(args.out_dir, "eigvecs", V)

    front, rear = deviation_matrices(A, wi)
    split = spectrum_split(result, tol=args.tol)
    report = {
        "command": "transform",
        "argv": _echo_args(args),
        "inputs": _input_digests(args),
        "partition": part.to_dict(),
        "quotients": {
            "front": _cplx_matrix(generalized_quotient(A, wi, -1.0).entries),
            "rayleigh": _cplx_matrix(generalized_quotient(A, wi, 0.0).entries),
            "rear": _cplx_matrix(generalized_quotient(A, wi, 1.0).entries),
        },
        "deviation": {
            "front": deviation_report(front).to_dict(),
            "rear": deviation_report(rear).to_dict(),
        },
        "spectrum": {
            "eigs_E": _cplx_vector(split.eigs_E),
            "eigs_F": _cplx_vector(split.eigs_F),
            "exact": split.exact,
        },
        "files": files,
        "timing_s": time.perf_counter() - t0,
    }
    _print_report(report)
    return EXIT_OK


def cmd_split(args) -> int:
    A = load_matrix_market(args.matrix).matrix
    part = _read_partition(args.partition, A.shape[0])
    if args.weights:
        wi = WeightedIndicator(part, _read_weights(args.weights, A.shape[0]))
    else:
        wi = WeightedIndicator.unit(part)
    result = block_triangularize(A, wi)
    split = spectrum_split(result, tol=args.tol)

    def _smax(M):
        M = np.asarray(M)
        return float(np.linalg.svd(M, compute_uv=False).max()) if M.size else 0.0

    tau = max(_smax(result.D_minus), _smax(result.D_plus_conj))
    scale = max(1.0, float(np.abs(A).max()))
    hermitian = np.abs(A - A.conj().T).max() <= 1e-10 * scale
    weyl_holds = weyl_check(A, result).holds if hermitian else None
    report = {
        "eigs_E": _cplx_vector(split.eigs_E),
        "eigs_F": _cplx_vector(split.eigs_F),
        "tau_spec": tau,
        "weyl_holds": weyl_holds,
        "exact": split.exact,
    }
    _print_report(report)
    return EXIT_OK


def cmd_rect(args) -> int:
    t0 = time.perf_counter()
    A = load_matrix_market(args.matrix).matrix
    structure = _load_json(args.structure)
    try:
        m_sizes = [int(x) for x in structure["left"]["m_sizes"]]
        q_sizes = [int(x) for x in structure["left"]["q_sizes"]]
        n_sizes = [int(x) for x in structure["right"]["n_sizes"]]
        r_sizes = [int(x) for x in structure["right"]["r_sizes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.structure}: bad structure object: {exc}") from exc
    Wm = load_matrix_market(args.wminus).matrix
    Wp = load_matrix_market(args.wplus).matrix
    wm_blocks = split_block_diagonal(Wm, m_sizes, q_sizes)
    wp_blocks = split_block_diagonal(Wp, n_sizes, r_sizes)
    if A.shape != (sum(m_sizes), sum(n_sizes)):
        raise InputError(
            f"matrix shape {A.shape} does not match structure "
            f"({sum(m_sizes)}, {sum(n_sizes)})"
        )

    left = block_svd(wm_blocks)
    right = block_svd(wp_blocks)
    result = rect_transform(A, left, right)
    T_minus, T_plus = deviation_rect(A, wm_blocks, wp_blocks)

    files = {
        "E": _emit(args.out_dir, "E", result.E),
        "D_minus": _emit(args.out_dir, "D_minus", result.D_minus),
        "D_plus_conj": _emit(args.out_dir, "D_plus_conj", result.D_plus_conj),
        "F": _emit(args.out_dir, "F", result.F),
    }

    def _svals(M):
        M = np.asarray(M)
        return list(np.linalg.svd(M, compute_uv=False)) if M.size else []

    sv_A = _svals(A)
    sv_Ah = _svals(result.assembled())
    report = {
        "command": "rect",
        "argv": _echo_args(args),
        "inputs": _input_digests(args),
        "singular_values": {
            "A": sv_A,
            "A_hat": sv_Ah,
            "max_gap": float(np.abs(np.array(sv_A) - np.array(sv_Ah)).max())
            if sv_A
            else 0.0,
            "D_minus": _svals(result.D_minus),
            "T_minus": _svals(T_minus)[: min(result.D_minus.shape)]
            if result.D_minus.size
            else [],
            "D_plus": _svals(result.D_plus_conj),
            "T_plus": _svals(T_plus)[: min(result.D_plus_conj.shape)]
            if result.D_plus_conj.size
            else [],
        },
        "files": files,
        "timing_s": time.perf_counter() - t0,
    }
    _print_report(report)
    return EXIT_OK


def _echo_args(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _input_digests(args) -> dict:
    out = {}
    for name in ("matrix", "partition", "initial", "weights", "phases",
                 "structure", "wminus", "wplus"):
        value = getattr(args, name, None)
        if value and value != "auto":
            out[name] = _digest(value)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equitile",
        description="Detect and exploit (approximately) equitable partitions "
        "of complex matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    tol = _default_tol()

    p = sub.add_parser("refine", help="coarsest front equitable refinement")
    p.add_argument("matrix")
    p.add_argument("--initial", help="starting partition JSON")
    p.add_argument("--weights", help="weight vector JSON (entrywise nonzero)")
    p.add_argument("--color-tol", type=float, default=0.0,
                   help="absolute tolerance for comparing refinement colors")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("check", help="equitability verdict for a partition")
    p.add_argument("matrix")
    p.add_argument("partition")
    p.add_argument("--weights")
    p.add_argument("--side", choices=["front", "rear"], default="front")
    p.add_argument("--tol", type=float, default=tol)
    p.add_argument("--epsilon", action="store_true",
                   help="also report the smallest eps-equitability bound")
    p.add_argument("--regular", action="store_true",
                   help="also report the regular-equivalence flag")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("transform", help="block triangularize and emit blocks")
    p.add_argument("matrix")
    p.add_argument("partition")
    p.add_argument("--weights")
    p.add_argument("--phases", default="auto", help="'auto' or a JSON phases file")
    p.add_argument("--emit", default="full",
                   help="comma list from E,F,D,full,eigvecs")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--tol", type=float, default=tol)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("split", help="spectrum split with deviation bound")
    p.add_argument("matrix")
    p.add_argument("partition")
    p.add_argument("--weights")
    p.add_argument("--tol", type=float, default=tol)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("rect", help="rectangular two-sided transform")
    p.add_argument("matrix")
    p.add_argument("structure", help="block structure JSON")
    p.add_argument("wminus", help="left block diagonal side matrix")
    p.add_argument("wplus", help="right block diagonal side matrix")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_rect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RankDeficiencyError, AdmissibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except EquitileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
