"""Experiment drivers and command-line interface.

``floquet-ising <experiment> [--config cfg.json] [flag overrides]`` runs one
of the reproducible studies and writes a CSV table (with a ``#``-prefixed
metadata block), a JSON mirror of the same schema, and optionally a gnuplot
script:

- ``convergence``: stroboscopic entanglement entropy S_l(n tau) from the
  generic real-space pipeline against the asymptotic reference S_l_inf(0);
- ``volume_law``: S_l_inf(0) vs l against the closed-form slope l * s_inf;
- ``frequency_scan``: s_inf vs drive frequency with multi-photon resonance
  annotations;
- ``floquet_dump`` / ``gge_dump``: per-mode Floquet and generalized-Gibbs
  tables;
- ``quench_check``: closed-form vs pipeline entropy density for sudden
  quenches.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bdg import evolve_real_space, ground_state_bogoliubov
from .corr import QUAD_EPSABS, QUAD_EPSREL, asymptotic_toeplitz, correlation_generic
from .entropy import (
    asymptotic_entropy_density,
    gge_entropy_density,
    quench_limit_check,
    subchain_entropy,
)
from .errors import FloquetIsingError, LowFrequencyWarning, RevivalWarning
from .floquet import analyze_grid, gge_lambda
from .model import Boundary, ChainSpec, DriveParams, build_k_grid

EXPERIMENTS = (
    "convergence",
    "volume_law",
    "frequency_scan",
    "floquet_dump",
    "gge_dump",
    "quench_check",
)
EXPERIMENT_ALIASES = {"floquet": "floquet_dump", "gge": "gge_dump"}

#: No revival warning while n tau <= L / 4 (quasiparticle speed of order 1).
REVIVAL_HORIZON_FRACTION = 0.25
#: Frequencies below this are flagged as under-resolved for L <= 2000.
LOW_FREQUENCY_THRESHOLD = 0.3
#: Resonance orders annotated in frequency scans.
RESONANCE_ORDER_CUTOFF = 8

_EXPERIMENT_DEFAULT_L = {
    "convergence": 400,
    "volume_law": 1000,
    "frequency_scan": 1000,
    "floquet_dump": 400,
    "gge_dump": 400,
    "quench_check": 1000,
}


class ConfigError(ValueError):
    """Invalid configuration file or command-line arguments."""


@dataclass
class ExperimentConfig:
    experiment: str
    drive: DriveParams
    chain: ChainSpec
    subchain_lengths: list
    n_max: int
    scan: list | None
    output_path: str
    output_format: str
    emit_plots: bool
    quench_pairs: list
    k_steps_per_period: int = 4096
    real_steps_per_period: int = 256
    n_samples: int = 64

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"output_format must be csv or json, got {self.output_format!r}")
        if any(l <= 0 for l in self.subchain_lengths):
            raise ConfigError("subchain lengths must be positive")
        if self.n_max < 0:
            raise ConfigError("n_max must be >= 0")

    @property
    def dt_modes(self) -> float:
        return self.drive.tau / self.k_steps_per_period

    @property
    def dt_real(self) -> float:
        return self.drive.tau / self.real_steps_per_period


DEFAULT_QUENCH_PAIRS = [(2.3, 1.5), (0.5, 1.5), (2.3, 0.5)]


def default_config(experiment: str) -> ExperimentConfig:
    return ExperimentConfig(
        experiment=experiment,
        drive=DriveParams(h0=2.3, A=1.0, omega0=4.0),
        chain=ChainSpec(L=_EXPERIMENT_DEFAULT_L[experiment], boundary=Boundary.SPIN_PBC),
        subchain_lengths=[20, 40],
        n_max=40,
        scan=None,
        output_path=".",
        output_format="csv",
        emit_plots=False,
        quench_pairs=list(DEFAULT_QUENCH_PAIRS),
    )


def load_config(experiment: str, path) -> ExperimentConfig:
    """Build a config for `experiment` from a JSON document.

    The JSON mirrors the ExperimentConfig fields; ``drive`` and ``chain``
    are nested objects with DriveParams / ChainSpec field names.
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = default_config(experiment)
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        if "drive" in doc:
            cfg.drive = DriveParams(**doc["drive"])
        if "chain" in doc:
            chain = dict(doc["chain"])
            if "boundary" in chain:
                chain["boundary"] = Boundary(chain["boundary"])
            cfg.chain = ChainSpec(**chain)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid drive/chain block: {exc}") from exc
    for key in known - {"drive", "chain", "experiment"}:
        if key in doc:
            setattr(cfg, key, doc[key])
    if "experiment" in doc and doc["experiment"] != experiment:
        raise ConfigError(
            f"config is for experiment {doc['experiment']!r}, requested {experiment!r}"
        )
    cfg.quench_pairs = [tuple(pair) for pair in cfg.quench_pairs]
    cfg.__post_init__()
    return cfg


@dataclass
class ResultTable:
    """One experiment's output: metadata block, column names, data rows."""

    name: str
    metadata: dict
    columns: list
    rows: list


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _base_metadata(cfg: ExperimentConfig) -> dict:
    return {
        "tool": f"floquet-ising {__version__}",
        "experiment": cfg.experiment,
        "h0": cfg.drive.h0,
        "A": cfg.drive.A,
        "omega0": cfg.drive.omega0,
        "tau": cfg.drive.tau,
        "L": cfg.chain.L,
        "boundary": cfg.chain.boundary.value,
        "subchain_lengths": ",".join(str(l) for l in cfg.subchain_lengths),
        "n_max": cfg.n_max,
        "dt_modes": cfg.dt_modes,
        "dt_real_space": cfg.dt_real,
        "N_s": cfg.n_samples,
        "quad_epsabs": QUAD_EPSABS,
        "quad_epsrel": QUAD_EPSREL,
    }


def resonance_frequencies(h0: float, cutoff: int = RESONANCE_ORDER_CUTOFF):
    """Multi-photon resonance ladders of the k=0 and k=pi modes.

    The k=0 gap 2|h0 - 1| is resonant at omega0 = 2|h0 - 1|/p, the k=pi gap
    2|h0 + 1| at omega0 = 2|h0 + 1|/q, for integer orders p, q.
    """
    orders = np.arange(1, cutoff + 1)
    return 2.0 * abs(h0 - 1.0) / orders, 2.0 * abs(h0 + 1.0) / orders


def _nearest(value: float, ladder: np.ndarray) -> float:
    return float(ladder[np.argmin(np.abs(ladder - value))])


# ---------------------------------------------------------------------------
# experiment runners


def run_convergence(cfg: ExperimentConfig) -> ResultTable:
    """Stroboscopic S_l(n tau) traces with their asymptotic reference values.

    Finite-time entropies come from the generic real-space pipeline (the
    finite-time Toeplitz integrand oscillates too fast in k to quadrature);
    the references come from the asymptotic Toeplitz pipeline at t_bar = 0.
    Rows past the finite-size revival horizon n tau > L/4 are flagged.
    """
    drive, chain = cfg.drive, cfg.chain
    lengths = list(cfg.subchain_lengths)
    if max(lengths) > chain.L:
        raise ConfigError(f"subchain length {max(lengths)} exceeds L = {chain.L}")

    kgrid = build_k_grid(ChainSpec(L=chain.L, boundary=Boundary.SPIN_PBC))
    analysis = analyze_grid(drive, kgrid, dt=cfg.dt_modes)
    s_ref = {
        l: subchain_entropy(asymptotic_toeplitz(analysis, l)) for l in lengths
    }

    horizon = REVIVAL_HORIZON_FRACTION * chain.L / drive.tau
    if cfg.n_max > horizon:
        warnings.warn(
            f"n_max = {cfg.n_max} exceeds the revival horizon "
            f"(~{int(horizon)} periods for L = {chain.L}); flagged rows follow",
            RevivalWarning,
            stacklevel=2,
        )

    frame = ground_state_bogoliubov(chain, drive)
    rows = []
    for n in range(cfg.n_max + 1):
        t = n * drive.tau
        if n > 0:
            frame = evolve_real_space(chain, drive, frame, t, dt=cfg.dt_real)
        row = [n, t, int(n > horizon)]
        for l in lengths:
            row.append(subchain_entropy(correlation_generic(frame, l)))
        for l in lengths:
            row.append(s_ref[l])
        rows.append(row)

    columns = (
        ["n", "time", "revival_flag"]
        + [f"S_l{l}" for l in lengths]
        + [f"S_inf_l{l}" for l in lengths]
    )
    return ResultTable("convergence", _base_metadata(cfg), columns, rows)


def run_volume_law(cfg: ExperimentConfig) -> ResultTable:
    """Asymptotic entropy vs subchain length against the volume-law slope."""
    kgrid = build_k_grid(ChainSpec(L=cfg.chain.L, boundary=Boundary.SPIN_PBC))
    analysis = analyze_grid(cfg.drive, kgrid, dt=cfg.dt_modes)
    s_inf, s_ok = asymptotic_entropy_density(analysis, full_output=True)
    rows = []
    for l in sorted(cfg.subchain_lengths):
        corr = asymptotic_toeplitz(analysis, l)
        s_l = subchain_entropy(corr)
        rows.append(
            [l, s_l, l * s_inf, s_l / l - s_inf, int(corr.converged and s_ok)]
        )
    meta = _base_metadata(cfg)
    meta["s_inf"] = s_inf
    return ResultTable(
        "volume_law",
        meta,
        ["l", "S_inf_l0", "l_times_s_inf", "rescaled_diff", "quad_ok"],
        rows,
    )


def run_frequency_scan(cfg: ExperimentConfig) -> ResultTable:
    """Asymptotic entropy density vs drive frequency with resonance columns."""
    if not cfg.scan:
        raise ConfigError("frequency_scan needs a scan grid (--scan start:stop:step)")
    scan = [float(w) for w in cfg.scan]
    if min(scan) < LOW_FREQUENCY_THRESHOLD:
        warnings.warn(
            f"scan reaches omega0 = {min(scan):g} < {LOW_FREQUENCY_THRESHOLD}; "
            f"the k-grid of L = {cfg.chain.L} may under-resolve the integrand",
            LowFrequencyWarning,
            stacklevel=2,
        )
    kgrid = build_k_grid(ChainSpec(L=cfg.chain.L, boundary=Boundary.SPIN_PBC))
    res_k0, res_kpi = resonance_frequencies(cfg.drive.h0)
    rows = []
    for omega in scan:
        drive = dataclasses.replace(cfg.drive, omega0=omega)
        analysis = analyze_grid(drive, kgrid, dt=drive.tau / cfg.k_steps_per_period)
        s_inf, s_ok = asymptotic_entropy_density(analysis, full_output=True)
        s_gge, g_ok = gge_entropy_density(analysis.gge(), full_output=True)
        rows.append(
            [
                omega,
                s_inf,
                s_gge,
                int(s_ok and g_ok),
                _nearest(omega, res_k0),
                _nearest(omega, res_kpi),
            ]
        )
    meta = _base_metadata(cfg)
    meta["resonances_k0"] = ",".join(f"{w:.10g}" for w in res_k0)
    meta["resonances_kpi"] = ",".join(f"{w:.10g}" for w in res_kpi)
    return ResultTable(
        "frequency_scan",
        meta,
        ["omega0", "s_inf", "s_inf_gge", "quad_ok", "nearest_k0_resonance", "nearest_kpi_resonance"],
        rows,
    )


def run_floquet_dump(cfg: ExperimentConfig) -> ResultTable:
    """Per-mode Floquet table (k, mu, |r+|^2, |r-|^2, lambda)."""
    kgrid = build_k_grid(ChainSpec(L=cfg.chain.L, boundary=Boundary.SPIN_PBC))
    analysis = analyze_grid(cfg.drive, kgrid, dt=cfg.dt_modes)
    lam = gge_lambda(analysis.r_plus, analysis.r_minus)
    rows = [
        [
            float(analysis.k[i]),
            float(analysis.mu[i]),
            float(np.abs(analysis.r_plus[i]) ** 2),
            float(np.abs(analysis.r_minus[i]) ** 2),
            float(lam[i]),
        ]
        for i in range(len(analysis))
    ]
    return ResultTable(
        "floquet_dump",
        _base_metadata(cfg),
        ["k", "mu", "r_plus_sq", "r_minus_sq", "lambda"],
        rows,
    )


def run_gge_dump(cfg: ExperimentConfig) -> ResultTable:
    """Per-mode generalized-Gibbs table (k, lambda, occupation)."""
    kgrid = build_k_grid(ChainSpec(L=cfg.chain.L, boundary=Boundary.SPIN_PBC))
    analysis = analyze_grid(cfg.drive, kgrid, dt=cfg.dt_modes)
    gge = analysis.gge()
    rows = [
        [float(gge.k[i]), float(gge.lam[i]), float(gge.n_expectation[i])]
        for i in range(len(gge.k))
    ]
    return ResultTable(
        "gge_dump", _base_metadata(cfg), ["k", "lambda", "n_expectation"], rows
    )


def run_quench_check(cfg: ExperimentConfig) -> ResultTable:
    """Closed-form vs pipeline asymptotic entropy density for sudden quenches."""
    kgrid = build_k_grid(ChainSpec(L=cfg.chain.L, boundary=Boundary.SPIN_PBC))
    rows = []
    for h_init, h_fin in cfg.quench_pairs:
        chk = quench_limit_check(h_init, h_fin, kgrid)
        rows.append([h_init, h_fin, chk.closed_form, chk.pipeline, chk.deviation])
    return ResultTable(
        "quench_check",
        _base_metadata(cfg),
        ["h_initial", "h_final", "s_inf_closed_form", "s_inf_pipeline", "deviation"],
        rows,
    )


RUNNERS = {
    "convergence": run_convergence,
    "volume_law": run_volume_law,
    "frequency_scan": run_frequency_scan,
    "floquet_dump": run_floquet_dump,
    "gge_dump": run_gge_dump,
    "quench_check": run_quench_check,
}


# ---------------------------------------------------------------------------
# output writers


def _gnuplot_script(table: ResultTable, cfg: ExperimentConfig, csv_name: str) -> str:
    lines = [
        "# gnuplot script generated by floquet-ising",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key left top",
    ]
    if table.name == "convergence":
        lengths = cfg.subchain_lengths
        lines += [
            "set xlabel 'n (periods)'",
            "set ylabel 'S_l(n tau)'",
        ]
        plots = []
        for idx, l in enumerate(lengths):
            col = 4 + idx
            ref = 4 + len(lengths) + idx
            plots.append(f"'{csv_name}' using 1:{col} with lines title 'l={l}'")
            plots.append(
                f"'{csv_name}' using 1:{ref} with lines dashtype 2 title 'l={l} asymptotic'"
            )
        lines.append("plot " + ", \\\n     ".join(plots))
    elif table.name == "volume_law":
        lines += [
            "set xlabel 'l'",
            "set ylabel 'S'",
            f"plot '{csv_name}' using 1:2 with linespoints title 'S_l^inf(0)', \\",
            f"     '{csv_name}' using 1:3 with lines dashtype 2 title 'l s^inf'",
        ]
    elif table.name == "frequency_scan":
        lines += ["set xlabel 'omega_0'", "set ylabel 's^inf'"]
        for w in table.metadata.get("resonances_k0", "").split(","):
            if w:
                lines.append(
                    f"set arrow from {w}, graph 0 to {w}, graph 1 nohead dashtype 3 lc 'green'"
                )
        for w in table.metadata.get("resonances_kpi", "").split(","):
            if w:
                lines.append(
                    f"set arrow from {w}, graph 0 to {w}, graph 1 nohead dashtype 3 lc 'black'"
                )
        lines.append(f"plot '{csv_name}' using 1:2 with lines title 's^inf'")
    else:
        lines.append(f"plot '{csv_name}' using 1:2 with linespoints")
    lines.append("pause -1")
    return "\n".join(lines) + "\n"


def write_output(table: ResultTable, cfg: ExperimentConfig) -> list:
    """Write the CSV table, its JSON mirror, and optionally a gnuplot script.

    File names follow the experiment (<name>.csv, <name>.json, <name>.gp)
    under cfg.output_path.  Floats are printed with 17 significant digits so
    parsing the CSV recovers them bit-exactly.
    """
    out_dir = Path(cfg.output_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out_dir / f"{table.name}.csv"
    lines = [f"# {key} = {_fmt(val)}" for key, val in table.metadata.items()]
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_fmt(v) for v in row))
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(csv_path)

    json_path = out_dir / f"{table.name}.json"
    doc = {
        "metadata": {k: (v if not isinstance(v, (np.integer, np.floating)) else float(v)) for k, v in table.metadata.items()},
        "columns": table.columns,
        "rows": [[None if isinstance(v, float) and math.isnan(v) else v for v in row] for row in table.rows],
    }
    json_path.write_text(json.dumps(doc, indent=1), encoding="utf-8")
    written.append(json_path)

    if cfg.emit_plots:
        gp_path = out_dir / f"{table.name}.gp"
        gp_path.write_text(_gnuplot_script(table, cfg, csv_path.name), encoding="utf-8")
        written.append(gp_path)
    return written


def read_csv(path) -> ResultTable:
    """Parse a CSV written by :func:`write_output` back into a ResultTable."""
    metadata = {}
    columns = None
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            metadata[key.strip()] = val.strip()
            continue
        cells = line.split(",")
        if columns is None:
            columns = cells
            continue
        row = []
        for c in cells:
            try:
                row.append(int(c))
            except ValueError:
                try:
                    row.append(float(c))
                except ValueError:
                    row.append(c)
        rows.append(row)
    return ResultTable(Path(path).stem, metadata, columns or [], rows)


# ---------------------------------------------------------------------------
# argument parsing


def _parse_scan(text: str) -> list:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad scan spec {text!r}, expected start:stop:step") from exc
    if step <= 0 or stop < start:
        raise ConfigError(f"bad scan spec {text!r}")
    n = int(round((stop - start) / step))
    return [start + i * step for i in range(n + 1) if start + i * step <= stop + step * 1e-9]


def _parse_lengths(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise ConfigError(f"bad subchain list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floquet-ising",
        description="Entanglement entropy of the periodically driven Ising chain.",
    )
    parser.add_argument(
        "experiment",
        choices=list(EXPERIMENTS) + sorted(EXPERIMENT_ALIASES),
        help="which study to run",
    )
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--h0", type=float, help="mean transverse field")
    parser.add_argument("--A", type=float, help="drive amplitude")
    parser.add_argument("--omega0", type=float, help="drive angular frequency")
    parser.add_argument("--L", type=int, help="chain length (even)")
    parser.add_argument("--boundary", choices=["pbc", "obc"], help="boundary condition")
    parser.add_argument("--l", help="comma-separated subchain lengths")
    parser.add_argument("--nmax", type=int, help="stroboscopic horizon (periods)")
    parser.add_argument("--scan", help="frequency grid start:stop:step")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--format", choices=["csv", "json"], help="primary output format")
    parser.add_argument("--plots", action="store_true", help="emit a gnuplot script")
    return parser


def config_from_args(args) -> ExperimentConfig:
    experiment = EXPERIMENT_ALIASES.get(args.experiment, args.experiment)
    if args.config:
        cfg = load_config(experiment, args.config)
    else:
        cfg = default_config(experiment)
    drive = {"h0": cfg.drive.h0, "A": cfg.drive.A, "omega0": cfg.drive.omega0}
    for key in drive:
        val = getattr(args, key)
        if val is not None:
            drive[key] = val
    try:
        cfg.drive = DriveParams(**drive)
        if args.L is not None or args.boundary is not None:
            cfg.chain = ChainSpec(
                L=args.L if args.L is not None else cfg.chain.L,
                boundary=Boundary(args.boundary) if args.boundary else cfg.chain.boundary,
            )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.l:
        cfg.subchain_lengths = _parse_lengths(args.l)
    if args.nmax is not None:
        cfg.n_max = args.nmax
    if args.scan:
        cfg.scan = _parse_scan(args.scan)
    if args.out:
        cfg.output_path = args.out
    if args.format:
        cfg.output_format = args.format
    if args.plots:
        cfg.emit_plots = True
    cfg.__post_init__()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    try:
        table = RUNNERS[cfg.experiment](cfg)
        written = write_output(table, cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except FloquetIsingError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o failure ({getattr(exc, 'filename', '?')}): {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
