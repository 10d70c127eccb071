"""Command-line pipeline.

Subcommands: synth (write synthetic traces), analyze (gaussianity ->
reconstruction -> diagnostics report), diagnose (diagnostics of a literal
matrix), pnm (photon-number distribution of a literal matrix).

Exit codes for analyze: 0 ok, 2 unphysical CM (discharged), 3 gaussianity
fail, 4 parse/config error.

All randomness derives from one 64-bit seed; trace k of a run uses the
integer stream seed 8*seed + k, k being the mode index in
(a, b, c, d, e, f, vac), so per-mode traces are independent yet reproducible.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .covariance import CovarianceMatrix
from .diagnostics import diagnose
from .errors import CvcharError
from .gaussianity import PhaseBinning, gaussianity_report
from .photon import joint_pnm, reduced_block, single_pnm
from .reconstruction import (
    assemble_cm,
    estimate_mode_quadratures,
    physicality_gate,
)
from .synthesis import (
    DEFAULT_ELECTRONIC_NOISE,
    DEFAULT_ETA,
    DEFAULT_PHASE_JITTER,
    MODES,
    OPOModelParams,
    MeasurementConfig,
    cm_from_model,
    sample_trace,
    shot_noise_trace,
)
from .tracefile import read_trace, write_trace

EXIT_OK = 0
EXIT_UNPHYSICAL = 2
EXIT_GAUSSIANITY = 3
EXIT_PARSE = 4

REPORT_VERSION = 1


def _outdir(args) -> Path:
    out = args.outdir or os.environ.get("CVCHAR_OUTDIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _stream_seed(seed: int, mode: str) -> int:
    # documented counter scheme: stream k = index of the mode
    return 8 * seed + (MODES + ("vac",)).index(mode)


def cmd_synth(args) -> int:
    try:
        params = OPOModelParams(
            zeta=args.zeta,
            xi1=args.xi1,
            xi2=args.xi2,
            beta=args.beta,
            nbar1=args.nbar1,
            nbar2=args.nbar2,
        )
        cm = cm_from_model(params)
        outdir = _outdir(args)
    except (ValueError, OSError) as exc:
        print(f"synth: {exc}", file=sys.stderr)
        return EXIT_PARSE
    for mode in MODES:
        cfg = MeasurementConfig(
            mode=mode,
            eta=args.eta,
            electronic_noise_var=args.electronic_noise,
            n_samples=args.n_samples,
            seed=_stream_seed(args.seed, mode),
            phase_jitter=args.phase_jitter,
        )
        write_trace(outdir / f"trace_{mode}.txt", sample_trace(cm, cfg))
    vac_cfg = MeasurementConfig(
        mode="vac",
        eta=1.0,
        electronic_noise_var=args.electronic_noise,
        n_samples=args.n_samples,
        seed=_stream_seed(args.seed, "vac"),
    )
    write_trace(outdir / "trace_vac.txt", shot_noise_trace(vac_cfg))
    print(f"wrote 7 traces to {outdir}")
    return EXIT_OK


def _load_traces(args):
    outdir = Path(args.traces)
    traces = {}
    for mode in MODES + ("vac",):
        path = outdir / f"trace_{mode}.txt"
        if path.exists():
            traces[mode] = read_trace(path)
    missing = [m for m in ("a", "b", "c", "d", "e", "vac") if m not in traces]
    if missing:
        raise FileNotFoundError(f"missing required traces: {', '.join(missing)}")
    return traces


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj)}")


def _write_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, default=_json_default) + "\n")


def _gaussianity_section(traces, binning, alpha, seed, gate_fwer):
    """Per-trace reports plus the pipeline gate verdict.

    The gate rejects when any bin's p-value survives a Bonferroni correction
    across every bin of the run at family-wise error rate gate_fwer, so an
    honest all-Gaussian run is discharged with probability <= gate_fwer.
    """
    section = {}
    n_total_bins = 0
    min_p = float("inf")
    for mode, trace in sorted(traces.items()):
        rep = gaussianity_report(trace, binning, alpha, subsample_seed=seed)
        section[mode] = {
            "alpha": alpha,
            "n_bins": len(rep.bins),
            "passed_strict": rep.passed,
            "passed_bonferroni": rep.passed_bonferroni,
            "min_p": rep.min_p,
            "bins": [
                {
                    "index": b.index,
                    "n": b.n,
                    "gamma": b.gamma,
                    "w": b.w_sw,
                    "p": b.p_value,
                }
                for b in rep.bins
            ],
        }
        n_total_bins += len(rep.bins)
        min_p = min(min_p, rep.min_p)
    gate_threshold = gate_fwer / max(n_total_bins, 1)
    return section, min_p >= gate_threshold, gate_threshold


def _diagnostics_section(diag) -> dict:
    out = {
        "purity": diag.purity,
        "entropy_nats": diag.entropy,
        "cond_entropy_1_given_2_nats": diag.cond_1_given_2,
        "cond_entropy_2_given_1_nats": diag.cond_2_given_1,
        "mutual_information_nats": diag.mutual_info,
        "duan_beta": diag.duan_beta,
        "duan_threshold": diag.duan_threshold,
        "phs_dt_minus": diag.phs_dt_minus,
        "log_negativity_bits": diag.log_negativity,
        "epr_beta": diag.epr_beta,
        "n_total": diag.n_total,
        "is_physical": diag.is_physical,
        "is_entangled_duan": diag.is_entangled_duan,
        "is_entangled_phs": diag.is_entangled_phs,
        "is_epr": diag.is_epr,
        "conditional_variances": diag.conditional_variances,
    }
    if math.isnan(diag.duan_beta):
        out["duan_beta"] = None
        out["duan_threshold"] = None
    return out


def _provenance(args, extra=None) -> dict:
    prov = {
        "tool": "cvchar",
        "version": __version__,
        "timestamp": _dt.datetime.now().isoformat(),
        "argv": sys.argv[1:],
    }
    if extra:
        prov.update(extra)
    return prov


def cmd_analyze(args) -> int:
    report = {"report_version": REPORT_VERSION, "provenance": _provenance(args)}
    out_path = args.out or "report.json"

    def finish(code: int, failed_stage: str | None = None) -> int:
        if failed_stage:
            report["failed_stage"] = failed_stage
        _write_report(report, out_path)
        print(f"report written to {out_path}")
        return code

    try:
        traces = _load_traces(args)
    except (OSError, ValueError) as exc:
        print(f"analyze: {exc}", file=sys.stderr)
        report["error"] = str(exc)
        return finish(EXIT_PARSE, "parse")

    binning = PhaseBinning(n_bins=args.bins)
    try:
        gauss, gauss_ok, gate_threshold = _gaussianity_section(
            traces, binning, args.alpha, args.seed, args.gate_fwer
        )
    except CvcharError as exc:
        report["error"] = str(exc)
        return finish(EXIT_PARSE, "gaussianity")
    report["gaussianity"] = gauss
    report["gaussianity_gate"] = {
        "fwer": args.gate_fwer,
        "per_bin_threshold": gate_threshold,
        "passed": bool(gauss_ok),
    }
    if not gauss_ok:
        return finish(EXIT_GAUSSIANITY, "gaussianity")

    # shot-noise calibration: vacuum variance must equal 1/2 within errors
    vac = traces["vac"]
    v0 = float(vac.xs.var(ddof=1)) - vac.config.electronic_noise_var
    se = v0 * math.sqrt(2.0 / max(len(vac) - 1, 1))
    vacuum_ok = abs(v0 - 0.5) <= 4.0 * se
    report["vacuum_check"] = {
        "variance": v0,
        "tolerance": 4.0 * se,
        "passed": bool(vacuum_ok),
    }
    scale = math.sqrt(v0 / 0.5) if vacuum_ok and v0 > 0 else 1.0

    estimates = {}
    tomo_section = {}
    for mode in MODES:
        if mode not in traces:
            continue
        trace = traces[mode]
        eta = args.eta if args.eta is not None else trace.config.eta
        # electronic noise folds into an effective loss for the variance model
        eta_eff = eta - 2.0 * trace.config.electronic_noise_var
        if eta_eff <= 0.5:
            report["error"] = f"mode {mode}: effective efficiency {eta_eff:.3f} not > 0.5"
            return finish(EXIT_PARSE, "config")
        if scale != 1.0:
            trace = replace(trace, xs=trace.xs / scale)
        est = estimate_mode_quadratures(trace, eta_eff)
        estimates[mode] = est
        tomo_section[mode] = {
            "eta_effective": eta_eff,
            "mean_x": est.mean_x.value,
            "mean_y": est.mean_y.value,
            "var_x": est.var_x.value,
            "var_x_err": est.var_x.sigma,
            "var_y": est.var_y.value,
            "var_y_err": est.var_y.sigma,
        }
    report["tomography"] = {"modes": tomo_section}

    rcm = assemble_cm(estimates, delta_theta=args.delta_theta)
    report["covariance"] = {
        "matrix": rcm.matrix,
        "errors": rcm.errors,
        "used_f_substitution": rcm.used_f_substitution,
    }
    gate = physicality_gate(rcm)
    report["covariance"]["gate"] = {
        "accepted": gate.accepted,
        "d_minus": None if math.isnan(gate.d_minus) else gate.d_minus,
    }
    if not gate.accepted:
        return finish(EXIT_UNPHYSICAL, "physicality_gate")

    diag = diagnose(rcm.cm)
    report["diagnostics"] = _diagnostics_section(diag)

    if args.pnm_cutoff:
        pmf = joint_pnm(rcm.matrix, args.pnm_cutoff, args.pnm_cutoff)
        report["photon_statistics"] = {
            "n_max": pmf.n_max,
            "m_max": pmf.m_max,
            "deficit": pmf.deficit,
            "probs": pmf.probs,
        }
    return finish(EXIT_OK)


def _parse_matrix(args) -> np.ndarray:
    if args.matrix:
        vals = [float(v) for v in args.matrix.replace(",", " ").split()]
    else:
        text = Path(args.matrix_file).read_text()
        vals = [float(v) for v in text.replace(",", " ").split()]
    if len(vals) != 16:
        raise ValueError(f"expected 16 matrix entries, got {len(vals)}")
    m = np.array(vals).reshape(4, 4)
    if np.abs(m - m.T).max() > 1e-9:
        raise ValueError("matrix asymmetric beyond 1e-9")
    return (m + m.T) / 2.0


def cmd_diagnose(args) -> int:
    try:
        m = _parse_matrix(args)
        cm = CovarianceMatrix(m)
    except (ValueError, OSError) as exc:
        print(f"diagnose: {exc}", file=sys.stderr)
        return EXIT_PARSE
    diag = diagnose(cm)
    report = {
        "report_version": REPORT_VERSION,
        "provenance": _provenance(args),
        "covariance": {"matrix": m},
        "diagnostics": _diagnostics_section(diag),
    }
    if args.out:
        _write_report(report, args.out)
    print(json.dumps(report["diagnostics"], indent=2, default=_json_default))
    if not diag.is_physical:
        return EXIT_UNPHYSICAL
    return EXIT_OK


def cmd_pnm(args) -> int:
    try:
        m = _parse_matrix(args)
    except (ValueError, OSError) as exc:
        print(f"pnm: {exc}", file=sys.stderr)
        return EXIT_PARSE
    outdir = _outdir(args)
    if args.mode:
        pmf = single_pnm(reduced_block(m, args.mode), args.cutoff)
        rows = [f"{n},{p:.12e}" for n, p in enumerate(pmf.probs)]
        path = outdir / f"pn_mode_{args.mode}.csv"
        path.write_text("n,p\n" + "\n".join(rows) + "\n")
    else:
        pmf = joint_pnm(m, args.cutoff, args.cutoff)
        rows = [
            f"{n},{mm},{pmf.probs[n, mm]:.12e}"
            for n in range(pmf.probs.shape[0])
            for mm in range(pmf.probs.shape[1])
        ]
        path = outdir / "pnm_joint.csv"
        path.write_text("n,m,p\n" + "\n".join(rows) + "\n")
    print(f"deficit={pmf.deficit:.6e} -> {path}")
    return EXIT_OK


def _apply_config_file(args, parser) -> None:
    """Merge a JSON config file under the explicit flags (flags win)."""
    if not getattr(args, "config", None):
        return
    try:
        loaded = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"config file: {exc}")
    for key, value in loaded.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and parser.get_default(attr) == getattr(args, attr):
            setattr(args, attr, value)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cvchar",
        description="Two-mode Gaussian state synthesis, measurement, and characterization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="write synthetic homodyne traces")
    p_synth.add_argument("--zeta", type=float, default=0.0)
    p_synth.add_argument("--xi1", type=float, default=0.0)
    p_synth.add_argument("--xi2", type=float, default=0.0)
    p_synth.add_argument("--beta", type=float, default=0.0)
    p_synth.add_argument("--nbar1", type=float, default=0.0)
    p_synth.add_argument("--nbar2", type=float, default=0.0)
    p_synth.add_argument("--eta", type=float, default=DEFAULT_ETA)
    p_synth.add_argument(
        "--electronic-noise", type=float, default=DEFAULT_ELECTRONIC_NOISE
    )
    p_synth.add_argument("--phase-jitter", type=float, default=0.0)
    p_synth.add_argument("--n-samples", type=int, default=100_000)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--outdir", default=None)
    p_synth.add_argument("--config", default=None, help="JSON config file; flags win")

    p_an = sub.add_parser("analyze", help="full pipeline on a directory of traces")
    p_an.add_argument("--traces", required=True, help="directory with trace_<mode>.txt")
    p_an.add_argument("--alpha", type=float, default=0.05)
    p_an.add_argument(
        "--gate-fwer",
        type=float,
        default=1e-3,
        help="run-level false-alarm rate of the gaussianity gate",
    )
    p_an.add_argument("--bins", type=int, default=104)
    p_an.add_argument("--delta-theta", type=float, default=DEFAULT_PHASE_JITTER)
    p_an.add_argument("--eta", type=float, default=None, help="override trace header eta")
    p_an.add_argument("--seed", type=int, default=0, help="subsampling seed")
    p_an.add_argument("--pnm-cutoff", type=int, default=0)
    p_an.add_argument("--out", default=None)
    p_an.add_argument("--config", default=None, help="JSON config file; flags win")

    p_diag = sub.add_parser("diagnose", help="diagnostics of a literal 4x4 matrix")
    p_diag.add_argument("--matrix", help="16 entries, row-major, comma/space separated")
    p_diag.add_argument("--matrix-file", help="file with the 16 entries")
    p_diag.add_argument("--out", default=None)

    p_pnm = sub.add_parser("pnm", help="photon statistics of a literal 4x4 matrix")
    p_pnm.add_argument("--matrix")
    p_pnm.add_argument("--matrix-file")
    p_pnm.add_argument("--cutoff", type=int, default=20)
    p_pnm.add_argument("--mode", choices=MODES, default=None,
                       help="single-mode distribution of this measured mode")
    p_pnm.add_argument("--outdir", default=None)

    args = parser.parse_args(argv)
    if args.command in ("synth", "analyze"):
        _apply_config_file(args, parser)
    handlers = {
        "synth": cmd_synth,
        "analyze": cmd_analyze,
        "diagnose": cmd_diagnose,
        "pnm": cmd_pnm,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
