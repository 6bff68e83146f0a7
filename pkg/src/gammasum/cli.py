"""Command-line front end.

Subcommands: cumulants, edgeworth, head, zdist, mc, validate, repro-sec6.
Model specs travel as JSON ({"r": ..., "weights": {...}}), tables as CSV
with a header row and full round-trip precision, samples as raw
little-endian 64-bit floats.  Every output file gets a sibling
<name>.manifest.json recording the command, resolved configuration,
library version, and warnings; re-running with the same configuration
reproduces the artifact bit for bit.

Exit codes: 0 on success, 2 for usage errors and bad inputs, 3 when a
computation fails its internal accuracy checks.

GAMMASUM_MAX_THREADS caps the BLAS/OpenMP thread pools.  It must act
before the numeric libraries initialize, which is why this module sets
the standard thread-count variables at import time, ahead of any heavy
import.
"""

import argparse
import json
import os
import sys
from datetime import datetime, timezone

_cap = os.environ.get("GAMMASUM_MAX_THREADS", "").strip()
if _cap.isdigit() and int(_cap) > 0:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _cap)

import numpy as np

from .cumulants import be_condition_ratio, berry_esseen_bound, cumulants, sigma_M
from .edgeworth import build_expansion, edgeworth_cdf, edgeworth_pdf
from .errors import DomainError, NumericalError
from .finite_sum import DistributionTable, invert_to_table, make_head_cf
from .mc_oracle import SampleBatch, ks_distance, sample_z
from .pipeline import PipelineConfig, m_robustness, z_cdf
from .weights import (
    ExplicitWeights,
    GammaSumSpec,
    PowerLawWeights,
    make_power_law_normalized,
)

_REFERENCE_C = 0.4375
_REFERENCE_C_TOL = 5e-5


def _version():
    try:
        from importlib.metadata import version

        return version("gammasum")
    except Exception:
        return "0.0.0"


def _require_number(doc, key):
    v = doc.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise DomainError(f"spec field {key!r} must be a number, got {v!r}")
    return float(v)


def _load_spec(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed spec JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise DomainError("spec JSON must be an object")
    extra = set(doc) - {"r", "weights", "normalized"}
    if extra:
        raise DomainError(f"unrecognized spec fields: {sorted(extra)}")
    if "r" not in doc or "weights" not in doc:
        raise DomainError('spec JSON needs "r" and "weights"')
    wdoc = doc["weights"]
    if not isinstance(wdoc, dict) or "kind" not in wdoc:
        raise DomainError('spec "weights" must be an object with a "kind"')
    kind = wdoc["kind"]
    if kind == "power_law":
        if set(wdoc) != {"kind", "gamma", "scale"}:
            raise DomainError('power_law weights need exactly "gamma" and "scale"')
        weights = PowerLawWeights(
            gamma=_require_number(wdoc, "gamma"), scale=_require_number(wdoc, "scale")
        )
    elif kind == "explicit":
        if set(wdoc) != {"kind", "values"} or not isinstance(wdoc["values"], list):
            raise DomainError('explicit weights need exactly a "values" list')
        if not all(
            isinstance(v, (int, float)) and not isinstance(v, bool)
            for v in wdoc["values"]
        ):
            raise DomainError("explicit weight values must be numbers")
        weights = ExplicitWeights(tuple(float(v) for v in wdoc["values"]))
    else:
        raise DomainError(f"unknown weight kind {kind!r}")
    r = _require_number(doc, "r")
    if "normalized" in doc:
        if not isinstance(doc["normalized"], bool):
            raise DomainError('spec field "normalized" must be a boolean')
        normalized = doc["normalized"]
    else:
        normalized = abs(weights.tail_power_sum(1, 2) / r - 1.0) <= 1e-12
    return GammaSumSpec(r=r, weights=weights, normalized=normalized)


def _spec_to_json(spec):
    if isinstance(spec.weights, PowerLawWeights):
        wdoc = {
            "kind": "power_law",
            "gamma": spec.weights.gamma,
            "scale": spec.weights.scale,
        }
    else:
        wdoc = {"kind": "explicit", "values": list(spec.weights.values)}
    return {"r": spec.r, "weights": wdoc, "normalized": spec.normalized}


def _parse_grid(text):
    parts = str(text).split(":")
    if len(parts) != 3:
        raise DomainError(f"grid must be lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise DomainError(f"grid must be lo:hi:n with numeric parts: {exc}") from exc
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise DomainError(f"grid needs finite lo < hi, got {text!r}")
    if n < 2:
        raise DomainError(f"grid needs at least 2 points, got {n}")
    return np.linspace(lo, hi, n)


def _write_csv(path, cols):
    header = ",".join(name for name, _ in cols)
    data = np.column_stack([np.asarray(c, dtype=float) for _, c in cols])
    np.savetxt(path, data, delimiter=",", fmt="%.17g", header=header, comments="")


def _write_manifest(out_path, command, argv, config, warnings=()):
    doc = {
        "command": command,
        "argv": list(argv),
        "config": config,
        "version": _version(),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "warnings": list(warnings),
    }
    with open(f"{out_path}.manifest.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _emit_json(doc, out, command, argv, config, warnings=()):
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        _write_manifest(out, command, argv, config, warnings)
    else:
        sys.stdout.write(text)


def _table_columns(tab):
    cols = [("x", tab.grid), ("cdf", tab.cdf)]
    if tab.pdf is not None:
        cols.append(("pdf", tab.pdf))
    return cols


def _read_table_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if header[:2] != ["x", "cdf"]:
        raise DomainError(f"table {path} must start with columns x,cdf")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(header):
        raise DomainError(f"table {path} has ragged columns")
    pdf = data[:, header.index("pdf")] if "pdf" in header else None
    return DistributionTable(grid=data[:, 0], cdf=data[:, 1], pdf=pdf)


def _load_samples(path):
    values = np.fromfile(path, dtype="<f8")
    return SampleBatch(
        values=values,
        seed=0,
        n_terms=0,
        n_samples=values.size,
        mode="external",
        neglected_sd=0.0,
    )


def _cmd_cumulants(args, argv):
    spec = _load_spec(args.spec)
    tc = cumulants(spec, args.M, args.K)
    doc = {
        "sigma_M": sigma_M(spec, args.M),
        "kappa": [tc.kappa_k(k) for k in range(2, args.K + 1)],
        "be_bound": berry_esseen_bound(spec, args.M),
        "be_ratio": be_condition_ratio(spec, args.M),
    }
    config = {"spec": _spec_to_json(spec), "M": args.M, "K": args.K}
    _emit_json(doc, args.out, "cumulants", argv, config)


def _cmd_edgeworth(args, argv):
    spec = _load_spec(args.spec)
    grid = _parse_grid(args.grid)
    ex = build_expansion(cumulants(spec, args.M, max(args.N, 3)), args.N)
    cols = [("x", grid), ("cdf", edgeworth_cdf(ex, grid)), ("pdf", edgeworth_pdf(ex, grid))]
    config = {"spec": _spec_to_json(spec), "M": args.M, "N": args.N, "grid": args.grid}
    if args.out:
        _write_csv(args.out, cols)
        _write_manifest(args.out, "edgeworth", argv, config)
    else:
        _write_csv(sys.stdout, cols)


def _cmd_head(args, argv):
    spec = _load_spec(args.spec)
    grid = _parse_grid(args.grid)
    tab = invert_to_table(make_head_cf(spec, args.M), grid)
    _write_csv(args.out, _table_columns(tab))
    config = {"spec": _spec_to_json(spec), "M": args.M, "grid": args.grid}
    _write_manifest(args.out, "head", argv, config, tab.warnings)


def _cmd_zdist(args, argv):
    spec = _load_spec(args.spec)
    cfg = PipelineConfig(
        spec=spec,
        M=args.M,
        N=args.N,
        grid=_parse_grid(args.grid),
        quad_points=args.quad_points,
    )
    tab = z_cdf(cfg)
    _write_csv(args.out, _table_columns(tab))

    robustness = None
    if args.robustness:
        try:
            ms = [int(tok) for tok in args.robustness.split(",")]
        except ValueError as exc:
            raise DomainError(f"--robustness must be comma-separated integers: {exc}")
        robustness = m_robustness(cfg, ms)

    ks = None
    if args.mc:
        batch = _load_samples(args.mc)
        ks = ks_distance(batch, lambda v: np.interp(v, tab.grid, tab.cdf))

    summary = {
        "ks_vs_mc": ks,
        "robustness": robustness,
        "warnings": list(tab.warnings),
    }
    base = args.out[:-4] if args.out.endswith(".csv") else args.out
    with open(f"{base}.summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    config = {
        "spec": _spec_to_json(spec),
        "M": args.M,
        "N": args.N,
        "grid": args.grid,
        "quad_points": args.quad_points,
        "robustness": args.robustness,
        "mc": args.mc,
    }
    _write_manifest(args.out, "zdist", argv, config, tab.warnings)


def _cmd_mc(args, argv):
    spec = _load_spec(args.spec)
    batch = sample_z(spec, args.mode, args.n, args.seed)
    batch.values.astype("<f8").tofile(args.out)
    config = {
        "spec": _spec_to_json(spec),
        "mode": args.mode,
        "n": args.n,
        "seed": args.seed,
        "n_terms": batch.n_terms,
        "neglected_sd": batch.neglected_sd,
        "rng_algorithm": batch.rng_algorithm,
    }
    _write_manifest(args.out, "mc", argv, config)


def _cmd_validate(args, argv):
    tab = _read_table_csv(args.table)
    batch = _load_samples(args.samples)
    ks = ks_distance(batch, lambda v: np.interp(v, tab.grid, tab.cdf))
    doc = {"ks": ks, "n_samples": batch.n_samples}
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _cmd_repro(args, argv):
    """Reference workflow: r=1/2, gamma=3/4, N=5, tables for M in {2,5,10,20}."""
    os.makedirs(args.outdir, exist_ok=True)
    spec = make_power_law_normalized(0.75, 0.5)
    c_value = spec.weights.scale
    c_err = abs(c_value - _REFERENCE_C)
    if c_err > _REFERENCE_C_TOL:
        raise NumericalError(
            f"normalization constant {c_value!r} misses the reference "
            f"{_REFERENCE_C} by {c_err:.2e}"
        )

    grid_text = "-8:8:2001"
    grid = _parse_grid(grid_text)
    ms = (2, 5, 10, 20)
    config = {
        "spec": _spec_to_json(spec),
        "N": 5,
        "M_values": list(ms),
        "grid": grid_text,
    }

    spec_path = os.path.join(args.outdir, "spec.json")
    with open(spec_path, "w") as fh:
        json.dump(_spec_to_json(spec), fh, indent=2)
        fh.write("\n")
    _write_manifest(spec_path, "repro-sec6", argv, config)

    tables = {}
    warnings = {}
    for m in ms:
        tab = z_cdf(PipelineConfig(spec=spec, M=m, N=5, grid=grid))
        tables[m] = tab
        warnings[str(m)] = list(tab.warnings)
        path = os.path.join(args.outdir, f"z_M{m}.csv")
        _write_csv(path, _table_columns(tab))
        _write_manifest(path, "repro-sec6", argv, {**config, "M": m}, tab.warnings)

    robustness = 0.0
    for i, a in enumerate(ms):
        for b in ms[i + 1 :]:
            robustness = max(
                robustness, float(np.max(np.abs(tables[a].cdf - tables[b].cdf)))
            )

    summary = {
        "C": c_value,
        "C_reference": _REFERENCE_C,
        "C_abs_error": c_err,
        "robustness": robustness,
        "M_values": list(ms),
        "N": 5,
        "grid": grid_text,
        "warnings": warnings,
    }
    summary_path = os.path.join(args.outdir, "summary.json")
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    _write_manifest(summary_path, "repro-sec6", argv, config)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gammasum",
        description="Distributional tables and bounds for centered weighted gamma sums.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cumulants", help="tail cumulants, sigma_M, and the BE bound")
    p.add_argument("--spec", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_cumulants)

    p = sub.add_parser("edgeworth", help="expansion CDF/PDF of the normalized tail")
    p.add_argument("--spec", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_edgeworth)

    p = sub.add_parser("head", help="exact head distribution by CF inversion")
    p.add_argument("--spec", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_head)

    p = sub.add_parser("zdist", help="full distribution table for Z")
    p.add_argument("--spec", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--quad-points", dest="quad_points", type=int, default=4001)
    p.add_argument("--robustness", help="comma-separated truncation levels")
    p.add_argument("--mc", help="sample file for a KS comparison")
    p.set_defaults(func=_cmd_zdist)

    p = sub.add_parser("mc", help="draw Monte-Carlo samples of Z")
    p.add_argument("--spec", required=True)
    p.add_argument("--mode", choices=("truncate", "normal_tail"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("validate", help="KS distance of a table against samples")
    p.add_argument("--table", required=True)
    p.add_argument("--samples", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser(
        "repro-sec6",
        help="reference workflow: r=1/2 power-law spec, N=5, M in {2,5,10,20}",
    )
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=_cmd_repro)

    return parser


def dispatch(argv):
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, list(argv))
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
