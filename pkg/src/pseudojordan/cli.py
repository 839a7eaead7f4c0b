"""Command line front end.

Every subcommand prints one JSON report on standard output.  Exit codes:
0 success (pseudo-Hermitian), 1 not pseudo-Hermitian, 2 numerical or
internal error, 64 usage error, 66 unreadable or malformed input file.

Matrices are exchanged as ``{"dim": n, "entries": [[[re, im], ...], ...]}``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .errors import ParseError, PseudoJordanError
from .frw import FrwParams, analyze_frw, critical_scale_factors
from .jordan import JordanDecomposition, reconstruct
from .matcore import DEFAULT_TOLERANCES, Tolerances, adjoint, as_cmatrix
from .pseudoherm import (
    JordanMismatch,
    MetricOperator,
    UnpairedEigenvalue,
    Verdict,
    canonical_metric,
    canonical_metric_inverse,
    check_metric_hermiticity,
    check_pseudo_hermiticity,
    general_metric,
    metric_inverse_residual,
)
from .two_by_two import Class, CrossingFamily, Traceless2, classify, factorize, sweep_family

__all__ = ["main", "parse_matrix_file", "parse_matrix_text", "write_matrix_file", "format_matrix", "build_parser"]

SCHEMA = 1
EXIT_OK, EXIT_NO, EXIT_ERROR, EXIT_USAGE, EXIT_NOINPUT = 0, 1, 2, 64, 66
CSV_HEADER = ["lambda", "re_e1", "im_e1", "re_e2", "im_e2", "class", "diagonalizable"]


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- matrix files


def _reject_constant(name):
    raise ValueError(f"non-finite constant {name}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {json.dumps(value)}", where)
    x = float(value)
    if not math.isfinite(x):
        raise ParseError("value is not finite", where)
    return x


def parse_matrix_text(text: str) -> np.ndarray:
    """Parse a matrix document held in a string.

    Raises
    ------
    ParseError
        For malformed JSON (location ``line L col C``), a missing or wrong
        ``dim``, rows of the wrong length (location names the row), or
        entries that are not finite ``[re, im]`` pairs.
    """
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} col {exc.colno}") from exc
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object with 'dim' and 'entries'")
    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ParseError(f"'dim' must be a positive integer, got {json.dumps(dim)}", "dim")
    rows = doc.get("entries")
    if not isinstance(rows, list):
        raise ParseError("'entries' must be an array of rows", "entries")
    if len(rows) != dim:
        raise ParseError(f"expected {dim} rows, got {len(rows)}", "entries")
    out = np.empty((dim, dim), dtype=np.complex128)
    for r, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise ParseError(f"row has {got} entries, expected {dim}", f"entries[{r}]")
        for c, z in enumerate(row):
            where = f"entries[{r}][{c}]"
            if not isinstance(z, list) or len(z) != 2:
                raise ParseError("entry must be a [re, im] pair", where)
            out[r, c] = complex(_number(z[0], where), _number(z[1], where))
    return out


def parse_matrix_file(path) -> np.ndarray:
    """Read a matrix document from `path`.  `OSError` propagates unchanged."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return parse_matrix_text(text)
    except ParseError as exc:
        raise ParseError(str(exc), str(path)) from exc


def format_matrix(m) -> str:
    m = np.asarray(m, dtype=np.complex128)
    doc = {"dim": int(m.shape[0]), "entries": _cmatrix(m)}
    return json.dumps(doc) + "\n"


def write_matrix_file(path, m) -> None:
    Path(path).write_text(format_matrix(m), encoding="utf-8")


# ---------------------------------------------------------------- report helpers


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _cmatrix(m) -> list:
    return [[_c(z) for z in row] for row in np.asarray(m)]


def _spectral_data(dec: JordanDecomposition) -> list:
    return [
        {
            "eigenvalue": _c(d.eigenvalue),
            "weyr": list(d.weyr),
            "jordan_dims": list(d.jordan_dims),
            "geometric_multiplicity": d.geometric_mult,
            "algebraic_multiplicity": d.algebraic_mult,
        }
        for d in dec.data
    ]


def _decomposition_residuals(dec: JordanDecomposition) -> dict:
    H = dec.matrix
    scale = max(1.0, float(np.linalg.norm(H)))
    biorth = adjoint(dec.dual_basis) @ dec.chain_basis - np.eye(dec.dim)
    return {
        "reconstruction": float(np.linalg.norm(reconstruct(dec) - H)) / scale,
        "biorthonormality": float(np.linalg.norm(biorth)),
        "chain_condition": dec.condition,
    }


def _failure(reason) -> dict:
    if isinstance(reason, UnpairedEigenvalue):
        return {"kind": "UnpairedEigenvalue", "eigenvalue": _c(reason.eigenvalue),
                "cluster": reason.cluster, "message": reason.describe()}
    if isinstance(reason, JordanMismatch):
        return {"kind": "JordanMismatch", "clusters": [reason.upper, reason.lower],
                "jordan_dims": [list(reason.upper_dims), list(reason.lower_dims)],
                "message": reason.describe()}
    return {"kind": type(reason).__name__, "message": str(reason)}


def _pairing(verdict: Verdict):
    if verdict.pairing is None:
        return None
    return {"real": list(verdict.pairing.real_labels), "pairs": [list(p) for p in verdict.pairing.pair_map]}


def _metric_fields(metric: MetricOperator, emit_eta: bool) -> dict:
    out = {"positive_definite": metric.is_positive_definite, "min_eigenvalue": metric.min_eigenvalue}
    if emit_eta:
        out["eta"] = _cmatrix(metric.eta)
    return out


def _metric_residuals(metric: MetricOperator) -> dict:
    return {"hermiticity": metric.hermiticity_residual, "intertwining": metric.intertwining_residual}


def _pair_arg(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected RE,IM, got {text!r}")
    try:
        re, im = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"expected RE,IM, got {text!r}") from None
    if not (math.isfinite(re) and math.isfinite(im)):
        raise UsageError(f"value must be finite, got {text!r}")
    return complex(re, im)


def _signs_arg(text: str) -> list:
    table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
    out = []
    for tok in text.split(","):
        if tok.strip() not in table:
            raise UsageError(f"signs must be a comma separated list of + and -, got {text!r}")
        out.append(table[tok.strip()])
    return out


def _tolerances(args) -> Tolerances:
    try:
        return Tolerances(
            rank_rel=args.tol_rank if args.tol_rank is not None else DEFAULT_TOLERANCES.rank_rel,
            cluster_rel=args.tol_cluster if args.tol_cluster is not None else DEFAULT_TOLERANCES.cluster_rel,
            verify_rel=args.tol_verify if args.tol_verify is not None else DEFAULT_TOLERANCES.verify_rel,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------- subcommands


def _analyze(args, tol: Tolerances):
    H = as_cmatrix(parse_matrix_file(args.file))
    verdict = check_pseudo_hermiticity(H, tol)
    dec = verdict.decomposition
    results = {
        "dim": dec.dim,
        "spectral_data": _spectral_data(dec),
        "diagonalizable": dec.is_diagonalizable,
        "verdict": "yes" if verdict.is_pseudo_hermitian else "no",
        "pairing": _pairing(verdict),
    }
    residuals = _decomposition_residuals(dec)
    if verdict.is_pseudo_hermitian:
        results["metric"] = _metric_fields(verdict.witness, args.emit_eta)
        residuals.update(_metric_residuals(verdict.witness))
        residuals["metric_hermiticity"] = check_metric_hermiticity(H, verdict.witness.eta, args.samples, args.seed)
    else:
        results["failure"] = _failure(verdict.failure_reason)
    return results, residuals, (EXIT_OK if verdict.is_pseudo_hermitian else EXIT_NO)


def _read_coefficients(path) -> tuple:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"), parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path} line {exc.lineno} col {exc.colno}") from exc
    except ValueError as exc:
        raise ParseError(str(exc), str(path)) from exc
    if not isinstance(doc, dict):
        raise ParseError("expected an object with 'x' and 'xi'", str(path))
    x, xi = doc.get("x", []), doc.get("xi", [])
    if not isinstance(x, list) or not isinstance(xi, list):
        raise ParseError("'x' and 'xi' must be arrays", str(path))
    xs = [[_number(v, f"{path} x[{r}][{k}]") for k, v in enumerate(seq)] for r, seq in enumerate(x)]
    xis = []
    for r, seq in enumerate(xi):
        row = []
        for k, z in enumerate(seq):
            where = f"{path} xi[{r}][{k}]"
            if not isinstance(z, list) or len(z) != 2:
                raise ParseError("entry must be a [re, im] pair", where)
            row.append(complex(_number(z[0], where), _number(z[1], where)))
        xis.append(row)
    return xs, xis


def _metric(args, tol: Tolerances):
    H = as_cmatrix(parse_matrix_file(args.file))
    coefficients = _read_coefficients(args.general) if args.general else None
    verdict = check_pseudo_hermiticity(H, tol)
    dec = verdict.decomposition
    results = {"dim": dec.dim, "spectral_data": _spectral_data(dec),
               "verdict": "yes" if verdict.is_pseudo_hermitian else "no", "pairing": _pairing(verdict)}
    residuals = _decomposition_residuals(dec)
    if not verdict.is_pseudo_hermitian:
        results["failure"] = _failure(verdict.failure_reason)
        return results, residuals, EXIT_NO
    pairing = verdict.pairing
    if coefficients is not None:
        metric = general_metric(dec, pairing, *coefficients)
        results["construction"] = "general"
    else:
        sigma = _signs_arg(args.signs) if args.signs else None
        metric = canonical_metric(dec, pairing, sigma)
        results["construction"] = "canonical"
        results["signs"] = list(metric.provenance["signs"])
        eta_inv = canonical_metric_inverse(dec, pairing, sigma)
        residuals["inverse"] = metric_inverse_residual(metric.eta, eta_inv)
    results["metric"] = _metric_fields(metric, True)
    residuals.update(_metric_residuals(metric))
    return results, residuals, EXIT_OK


def _classify2(args, tol: Tolerances):
    m = Traceless2(_pair_arg(args.a), _pair_arg(args.b), _pair_arg(args.c))
    cls = classify(m, tol)
    results = {"class": cls.kind.value, "det": _c(cls.det), "eigenvalues": [_c(e) for e in cls.eigenvalues]}
    residuals = {}
    if cls.kind in (Class.MPLUS, Class.MMINUS):
        f = factorize(m, tol)
        results["factorization"] = {"sign": f.sign, "E": f.E, "prefactor": _c(f.prefactor), "g": _cmatrix(f.g)}
        scale = max(1.0, m.norm)
        residuals["factorization"] = float(np.linalg.norm(f.reconstruct() - m.matrix)) / scale
        residuals["det_g"] = abs(complex(np.linalg.det(f.g)) - 1.0)
    code = EXIT_OK if cls.kind.is_pseudo_hermitian else EXIT_NO
    return results, residuals, code


def _sweep(args, tol: Tolerances):
    family = CrossingFamily(args.ar, args.ai, _pair_arg(args.b0), _pair_arg(args.b1), args.eps)
    records = sweep_family(family, args.steps, tol)
    rows = [
        [r.lam, r.eigenvalues[0].real, r.eigenvalues[0].imag, r.eigenvalues[1].real,
         r.eigenvalues[1].imag, r.kind.value, "true" if r.diagonalizable else "false"]
        for r in records
    ]
    if args.out:
        try:
            with open(args.out, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_HEADER)
                writer.writerows([[repr(v) if isinstance(v, float) else v for v in row] for row in rows])
        except OSError as exc:
            raise _FileError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    counts: dict = {}
    for r in records:
        counts[r.kind.value] = counts.get(r.kind.value, 0) + 1
    all_ph = all(r.pseudo_hermitian for r in records)
    results = {
        "steps": len(records),
        "class_counts": dict(sorted(counts.items())),
        "all_pseudo_hermitian": all_ph,
        "records": [
            {"lambda": r.lam, "eigenvalues": [_c(e) for e in r.eigenvalues], "class": r.kind.value,
             "diagonalizable": r.diagonalizable, "pseudo_hermitian": r.pseudo_hermitian}
            for r in records
        ],
    }
    if args.out:
        results["csv"] = str(args.out)
    return results, {}, (EXIT_OK if all_ph else EXIT_NO)


def _frw(args, tol: Tolerances):
    try:
        p = FrwParams(args.mass, args.scale, args.levels)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = analyze_frw(p, tol)
    if args.matrix_out:
        try:
            write_matrix_file(args.matrix_out, report.hamiltonian)
        except OSError as exc:
            raise _FileError(f"cannot write {args.matrix_out}: {exc.strerror or exc}") from exc
    verdict = report.verdict
    results = {
        "params": {"m": p.m, "scale_a": p.scale_a, "alpha": p.alpha, "levels": p.levels},
        "levels": [
            {"n": lv.n, "d_n": lv.d_n, "e_plus": _c(lv.e_plus), "e_minus": _c(lv.e_minus),
             "critical": lv.critical, "class": kind.value}
            for lv, kind in zip(report.levels, report.level_classes)
        ],
        "critical_scale_factors": critical_scale_factors(p),
        "critical_levels": report.critical_levels,
        "spectral_data": _spectral_data(report.decomposition),
        "zero_clusters": [
            {"eigenvalue": _c(d.eigenvalue), "geometric_multiplicity": d.geometric_mult,
             "algebraic_multiplicity": d.algebraic_mult, "jordan_dims": list(d.jordan_dims)}
            for d in report.zero_clusters
        ],
        "verdict": "yes" if verdict.is_pseudo_hermitian else "no",
    }
    residuals = {"sigma3_intertwining": report.sigma3_residual}
    residuals.update(_decomposition_residuals(report.decomposition))
    if verdict.is_pseudo_hermitian:
        residuals.update(_metric_residuals(verdict.witness))
    else:
        results["failure"] = _failure(verdict.failure_reason)
    return results, residuals, (EXIT_OK if verdict.is_pseudo_hermitian else EXIT_NO)


class _FileError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pseudojordan", description="Jordan structure and pseudo-Hermiticity analysis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tolerance_flags(p):
        p.add_argument("--tol-rank", type=float, default=None, help="relative SVD rank threshold")
        p.add_argument("--tol-cluster", type=float, default=None, help="relative eigenvalue clustering radius")
        p.add_argument("--tol-verify", type=float, default=None, help="relative residual bound")

    p = sub.add_parser("analyze", help="Jordan structure and pseudo-Hermiticity verdict")
    p.add_argument("file")
    tolerance_flags(p)
    p.add_argument("--emit-eta", action="store_true", help="include the metric entries")
    p.add_argument("--seed", type=int, default=0, help="seed for the random metric-hermiticity check")
    p.add_argument("--samples", type=int, default=100, help="vector pairs for the metric-hermiticity check")
    p.set_defaults(run=_analyze)

    p = sub.add_parser("metric", help="construct a metric operator")
    p.add_argument("file")
    tolerance_flags(p)
    p.add_argument("--signs", default=None, help="one sign per real chain, e.g. --signs=+,-")
    p.add_argument("--general", default=None, help="JSON file with coefficients {'x': [...], 'xi': [...]}")
    p.set_defaults(run=_metric)

    p = sub.add_parser("classify2", help="classify a traceless 2x2 matrix [[a, b], [c, -a]]")
    for name in ("a", "b", "c"):
        p.add_argument(f"--{name}", required=True, metavar="RE,IM")
    tolerance_flags(p)
    p.set_defaults(run=_classify2)

    p = sub.add_parser("sweep", help="classify the level-crossing family on a grid")
    p.add_argument("--ar", type=float, required=True)
    p.add_argument("--ai", type=float, required=True)
    p.add_argument("--b0", required=True, metavar="RE,IM")
    p.add_argument("--b1", required=True, metavar="RE,IM")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", default=None, help="CSV output file")
    tolerance_flags(p)
    p.set_defaults(run=_sweep)

    p = sub.add_parser("frw", help="truncated FRW Hamiltonian report")
    p.add_argument("--mass", type=float, required=True)
    p.add_argument("--scale", type=float, required=True)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--matrix-out", default=None)
    tolerance_flags(p)
    p.set_defaults(run=_frw)
    return parser


def _emit(doc: dict, stream) -> None:
    stream.write(json.dumps(doc, indent=2, allow_nan=False) + "\n")


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        tol = _tolerances(args)
    except UsageError as exc:
        stderr.write(f"{parser.prog}: usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    doc = {"schema": SCHEMA, "command": {"name": args.command, "argv": argv}, "tolerances": tol.as_dict()}
    if args.command == "analyze":
        doc["seed"] = args.seed
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            results, residuals, code = args.run(args, tol)
        except UsageError as exc:
            stderr.write(f"{parser.prog}: usage error: {exc}\n")
            return EXIT_USAGE
        except (OSError, _FileError) as exc:
            stderr.write(f"{parser.prog}: file error: {exc}\n")
            return EXIT_NOINPUT
        except ParseError as exc:
            stderr.write(f"{parser.prog}: parse error: {exc}\n")
            return EXIT_NOINPUT
        except (PseudoJordanError, ValueError, np.linalg.LinAlgError) as exc:
            doc["error"] = {"kind": type(exc).__name__, "message": str(exc)}
            doc["warnings"] = [str(w.message) for w in caught]
            _emit(doc, stdout)
            stderr.write(f"{parser.prog}: error: {type(exc).__name__}: {exc}\n")
            return EXIT_ERROR
    doc["results"] = results
    doc["residuals"] = residuals
    doc["warnings"] = [str(w.message) for w in caught]
    _emit(doc, stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
