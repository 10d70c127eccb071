"""On-disk trace format: '#'-prefixed key=value header, then one
'theta<TAB>x' sample per line with 17 significant digits."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .synthesis import TRACE_MODES, HomodyneTrace, MeasurementConfig


def write_trace(path, trace: HomodyneTrace) -> None:
    cfg = trace.config
    lines = [
        f"# mode={cfg.mode}",
        f"# eta={cfg.eta!r}",
        f"# n={len(trace)}",
        f"# seed={cfg.seed}",
        f"# sweep_start={cfg.phase_sweep[0]!r}",
        f"# sweep_end={cfg.phase_sweep[1]!r}",
        "# shotnoise_var=0.5",
        f"# electronic_noise_var={cfg.electronic_noise_var!r}",
    ]
    lines.extend(
        f"{t:.17g}\t{x:.17g}" for t, x in zip(trace.thetas, trace.xs)
    )
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace(path) -> HomodyneTrace:
    header: dict[str, str] = {}
    thetas: list[float] = []
    xs: list[float] = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line.lstrip("# ").partition("=")
            header[key.strip()] = value.strip()
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: malformed sample line {line!r}")
        thetas.append(float(parts[0]))
        xs.append(float(parts[1]))
    mode = header.get("mode")
    if mode not in TRACE_MODES:
        raise ValueError(f"{path}: missing or unknown mode in header ({mode!r})")
    n = len(xs)
    declared = header.get("n")
    if declared is not None and int(declared) != n:
        raise ValueError(f"{path}: header declares n={declared} but found {n} samples")
    cfg = MeasurementConfig(
        mode=mode,
        eta=float(header.get("eta", 1.0)),
        electronic_noise_var=float(header.get("electronic_noise_var", 0.0)),
        n_samples=n,
        phase_sweep=(
            float(header.get("sweep_start", 0.0)),
            float(header.get("sweep_end", 2.0 * np.pi)),
        ),
        seed=int(header.get("seed", 0)),
    )
    return HomodyneTrace(
        thetas=np.asarray(thetas), xs=np.asarray(xs), config=cfg
    )
