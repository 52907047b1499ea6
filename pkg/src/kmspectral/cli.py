"""Command line entry point: ``kmspectral {solve,oracle,verify,contraction,lipschitz,sweep}``.

Every run writes its outputs plus a ``run.json`` record into the output
directory (``--out``, else ``$KMSPECTRAL_OUT``, else ``./out``).  Files are
written atomically and contain no timestamps, so identical configurations
reproduce identical bytes; the wall-clock duration goes to stderr only.

Exit status: 0 when every pass flag is true, 1 when some check failed,
2 for configuration errors, 3 for solver or gate errors.
"""

import argparse
import itertools
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import estimates as est
from .config import SUBCOMMANDS, load_config
from .dynamics import duhamel_apply, mass_balance_residual, total_mass
from .exceptions import ConfigError, KmError
from .oracles import rk4_sir, splitting_solve
from .picard import (
    contraction_probe,
    lipschitz_data_pairs,
    lipschitz_probe,
    picard_solve,
    smallness_check,
)
from .spaces import lp_norm_rows, sobolev_norm_rows, weighted_l4_profile

OUT_ENV = "KMSPECTRAL_OUT"
TRAJECTORY_COLUMNS = ("time", "l2_u", "l2_v", "hs_u", "hs_v", "wl4_u", "wl4_v",
                      "mass", "mass_residual")
EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_ERROR = 0, 1, 2, 3

RK4_DT = 1e-4
RK4_BUDGET = 1e-6
CONSTANCY_BUDGET = 1e-10


class GateRejected(KmError):
    pass


# --- byte-stable serialization ---------------------------------------------------

def fmt(x):
    """17 significant digits; integers and non-finite values spelled plainly."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json(obj, indent=0):
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json(str(k))}: {_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    return _json(obj) + "\n"


def write_atomic(path, text):
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows):
    lines = [",".join(header)]
    lines.extend(",".join("" if v is None else fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


# --- run record ---------------------------------------------------------------

@dataclass
class RunRecord:
    subcommand: str
    config: dict
    content_hash: str
    outputs: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    exit_code: int = EXIT_OK
    message: str = ""
    duration: float = 0.0

    def to_file_dict(self):
        # Duration is left out so the record itself is byte-stable.
        return {"subcommand": self.subcommand, "content_hash": self.content_hash,
                "config": self.config, "outputs": sorted(self.outputs),
                "exit_code": self.exit_code, "message": self.message}


class Outputs:
    def __init__(self, root):
        self.root = root
        self.files = []

    def write(self, name, text):
        write_atomic(os.path.join(self.root, name), text)
        self.files.append(name)


# --- subcommands --------------------------------------------------------------

def _gate(cfg):
    return est.empirical_gate(cfg.idx, cfg.T, cfg.n_t, cfg.params.mu, seed=cfg.seed,
                              n_samples=cfg.n_samples, grid=cfg.grid)


def _admit(cfg, gate, phi, psi):
    decision = smallness_check(phi, psi, cfg.idx, gate, cfg.T)
    if not decision.admitted:
        raise GateRejected(
            f"rejected by empirical gate: {decision.reason()} "
            f"(data threshold 1/(18 C_l C_b) = {fmt(decision.data_threshold)}, "
            f"horizon bound 1/(6 mu) = {fmt(decision.horizon_bound)})")
    return decision


def trajectory_rows(traj):
    grid = traj.grid
    idx = traj.idx
    mass, _ = total_mass(traj)
    residual = [None] * (traj.n_t + 1)
    if traj.n_t >= 2:
        residual[1:-1] = mass_balance_residual(traj).tolist()
    columns = [
        traj.times,
        lp_norm_rows(traj.u_samples, grid, 2), lp_norm_rows(traj.v_samples, grid, 2),
        sobolev_norm_rows(traj.u_samples, grid, idx.s),
        sobolev_norm_rows(traj.v_samples, grid, idx.s),
        weighted_l4_profile(traj.u, idx), weighted_l4_profile(traj.v, idx),
        mass,
    ]
    return [[col[i] for col in columns] + [residual[i]] for i in range(traj.n_t + 1)]


def _write_trajectory(out, traj, fmt_name, dump_fields):
    rows = trajectory_rows(traj)
    if fmt_name == "csv":
        out.write("trajectory.csv", csv_text(TRAJECTORY_COLUMNS, rows))
    else:
        out.write("trajectory.json", dumps([dict(zip(TRAJECTORY_COLUMNS, r)) for r in rows]))
    if dump_fields:
        x = traj.grid.x
        width = len(str(traj.n_t))
        for i in range(traj.n_t + 1):
            body = zip(x, traj.u_samples[i], traj.v_samples[i])
            out.write(os.path.join("fields", f"slice_{i:0{width}d}.csv"),
                      csv_text(("x", "u", "v"), body))


def _report(name, parameters, max_ratio, bound, passed, n_samples=1, seed=None):
    return est.EstimateReport(name, parameters, n_samples, max_ratio, bound, passed, seed)


def cmd_solve(cfg, out, dump_fields=False):
    phi, psi = cfg.phi(), cfg.psi()
    gate = None
    reports = []
    if cfg.gated:
        gate = _gate(cfg)
        _admit(cfg, gate, phi, psi)
    traj, diag = picard_solve(phi, psi, cfg.params, cfg.idx, cfg.T, cfg.n_t,
                              tol=cfg.tol, max_iter=cfg.max_iter, gate=gate)
    _write_trajectory(out, traj, cfg.output_format, dump_fields)
    out.write("diagnostics.json", dumps(diag.as_dict()))
    defect = (duhamel_apply(traj, phi, psi) - traj).norm()
    reports.append(_report("picard_convergence", {"iterations": diag.iterations,
                                                  "rate_estimate": diag.rate_estimate},
                           diag.successive_diffs[-1], diag.tolerance, diag.converged))
    reports.append(_report("fixed_point_self_consistency", {"tolerance": diag.tolerance},
                           defect, 2 * diag.tolerance, defect < 2 * diag.tolerance))
    return reports


def cmd_oracle(cfg, out, dump_fields=False):
    phi, psi = cfg.phi(), cfg.psi()
    if cfg.oracle_steps % cfg.n_t:
        raise ConfigError("solver.oracle_steps must be a multiple of solver.n_t")
    traj, diag = picard_solve(phi, psi, cfg.params, cfg.idx, cfg.T, cfg.n_t,
                              tol=cfg.tol, max_iter=cfg.max_iter)
    oracle = splitting_solve(phi, psi, cfg.params, cfg.T, cfg.T / cfg.oracle_steps, cfg.idx)
    stride = cfg.oracle_steps // cfg.n_t
    ou, ov = oracle.u_samples[::stride], oracle.v_samples[::stride]
    grid = cfg.grid
    gap_u = lp_norm_rows(traj.u_samples - ou, grid, 2)
    gap_v = lp_norm_rows(traj.v_samples - ov, grid, 2)
    rows = [[t, gu, gv] for t, gu, gv in zip(traj.times, gap_u, gap_v)]
    reports = [_report("cross_solver_agreement",
                       {"n_t": cfg.n_t, "oracle_steps": cfg.oracle_steps},
                       max(gap_u.max(), gap_v.max()), cfg.agreement_budget,
                       max(gap_u.max(), gap_v.max()) <= cfg.agreement_budget)]
    if np.ptp(phi.samples) == 0 and np.ptp(psi.samples) == 0:
        n = max(10, int(math.ceil(cfg.T / RK4_DT - 1e-9)))
        ode = rk4_sir(phi.samples[0], psi.samples[0], cfg.params.mu, cfg.params.mu_sign,
                      cfg.T, cfg.T / n)
        # Picard slices sit on the RK4 grid when n_t divides the step count.
        node = np.rint(traj.times / (cfg.T / n)).astype(int)
        err = max(np.max(np.abs(traj.u_samples - ode.u[node][:, None])),
                  np.max(np.abs(traj.v_samples - ode.v[node][:, None])))
        spread = max(np.max(np.ptp(traj.u_samples, axis=1)), np.max(np.ptp(traj.v_samples, axis=1)))
        reports.append(_report("sir_reduction_rk4", {"dt": cfg.T / n}, err, RK4_BUDGET,
                               err <= RK4_BUDGET))
        reports.append(_report("spatial_constancy", {}, spread, CONSTANCY_BUDGET,
                               spread <= CONSTANCY_BUDGET))
    out.write("comparison.csv", csv_text(("time", "l2_gap_u", "l2_gap_v"), rows))
    out.write("diagnostics.json", dumps(diag.as_dict()))
    return reports


def run_verify_checks(cfg):
    seed, n, grid = cfg.seed, cfg.n_samples, cfg.grid
    reports = []
    for check in cfg.checks:
        if check == "heat_lp_lq":
            for q, p in ((2, 2), (2, 4), (1, np.inf)):
                reports.append(est.verify_heat_lp_lq(seed, n, q, p, grid=grid))
        elif check == "riesz_smoothing":
            reports.extend(est.verify_riesz_smoothing(seed, n, grid=grid))
        elif check == "hls":
            reports.append(est.verify_hls(seed, n, grid=grid))
        elif check == "linear":
            for s in cfg.s_values:
                reports.append(est.verify_linear_estimate(seed, n, s, cfg.T, cfg.n_t, grid))
        elif check == "bilinear":
            for s in cfg.s_values:
                reports.append(est.verify_bilinear(seed, n, s, cfg.T, cfg.n_t, grid))
        elif check == "lem1_components":
            for s in cfg.s_values:
                reports.extend(est.verify_lem1_components(seed, n, s, cfg.T, cfg.n_t, grid))
        elif check == "beta_lemma":
            reports.append(est.verify_beta_lemma(est.beta_grid()))
        elif check == "alpha_cases":
            coverage = est.alpha_case_coverage(cfg.s_values)
            cases = {row["case"] for row in coverage}
            reports.append(_report("alpha_case_coverage", {"cases": coverage},
                                   float(len(cases)), 2.0, cases == {"first", "second"}))
    return reports


def cmd_verify(cfg, out, dump_fields=False):
    return run_verify_checks(cfg)


def cmd_contraction(cfg, out, dump_fields=False):
    phi, psi = cfg.phi(), cfg.psi()
    gate = _gate(cfg)
    _admit(cfg, gate, phi, psi)
    probe = contraction_probe(phi, psi, cfg.params, cfg.idx, cfg.T, cfg.n_t, gate,
                              cfg.seed, cfg.n_pairs)
    _, diag = picard_solve(phi, psi, cfg.params, cfg.idx, cfg.T, cfg.n_t, tol=cfg.tol,
                           max_iter=cfg.max_iter, gate=gate)
    ratio = diag.rate_estimate / probe.max_ratio
    out.write("contraction_ratios.csv",
              csv_text(("pair", "ratio"), enumerate(probe.ratios.tolist())))
    out.write("diagnostics.json", dumps(diag.as_dict()))
    return [
        _report("contraction_probe",
                {"s": cfg.idx.s, "T": cfg.T, "mu": cfg.params.mu, "rho": gate.rho,
                 "c_ell_hat": gate.c_ell_hat, "c_b_hat": gate.c_b_hat,
                 "label": "empirical gate"},
                probe.max_ratio, probe.theoretical_factor, bool(np.all(probe.ratios < 1)),
                n_samples=len(probe.ratios), seed=cfg.seed),
        _report("picard_rate_vs_probe",
                {"rate_estimate": diag.rate_estimate, "probe_max_ratio": probe.max_ratio,
                 "iterations": diag.iterations},
                ratio, 2.0, 0.5 <= ratio <= 2.0),
    ]


def cmd_lipschitz(cfg, out, dump_fields=False):
    phi, psi = cfg.phi(), cfg.psi()
    gate = _gate(cfg)
    _admit(cfg, gate, phi, psi)
    probe = contraction_probe(phi, psi, cfg.params, cfg.idx, cfg.T, cfg.n_t, gate,
                              cfg.seed, cfg.n_pairs)
    pairs = lipschitz_data_pairs(cfg.seed, cfg.n_pairs, cfg.grid, cfg.idx, gate)
    result = lipschitz_probe(pairs, cfg.params, cfg.idx, cfg.T, cfg.n_t, gate,
                             probe.max_ratio, tol=cfg.tol)
    out.write("lipschitz_ratios.csv",
              csv_text(("pair", "ratio"), enumerate(result.ratios.tolist())))
    return [_report("lipschitz",
                    {"s": cfg.idx.s, "T": cfg.T, "mu": cfg.params.mu,
                     "c_ell_hat": gate.c_ell_hat, "contraction": probe.max_ratio,
                     "skipped": result.skipped, "label": "empirical gate"},
                    result.max_ratio, result.bound, result.passed,
                    n_samples=len(result.ratios), seed=cfg.seed)]


COMMANDS = {"solve": cmd_solve, "oracle": cmd_oracle, "verify": cmd_verify,
            "contraction": cmd_contraction, "lipschitz": cmd_lipschitz}


def execute(subcommand, cfg, out_dir, dump_fields=False):
    """Run one non-sweep subcommand and write its files; returns a :class:`RunRecord`."""
    start = time.perf_counter()
    out = Outputs(out_dir)
    record = RunRecord(subcommand, cfg.raw, cfg.content_hash())
    try:
        reports = COMMANDS[subcommand](cfg, out, dump_fields)
        record.reports = [r.to_dict() for r in reports]
        out.write("reports.json", dumps(record.reports))
        record.exit_code = EXIT_OK if all(r["pass"] for r in record.reports) else EXIT_FAILED
    except ConfigError as exc:
        record.exit_code, record.message = EXIT_CONFIG, f"config error: {exc}"
    except KmError as exc:
        record.exit_code, record.message = EXIT_ERROR, f"{type(exc).__name__}: {exc}"
        diagnostics = getattr(exc, "diagnostics", None)
        if diagnostics is not None:
            out.write("diagnostics.json", dumps(diagnostics.as_dict()))
    record.outputs = list(out.files) + ["run.json"]
    write_atomic(os.path.join(out_dir, "run.json"), dumps(record.to_file_dict()))
    record.duration = time.perf_counter() - start
    return record


def _sweep_entry(args):
    subcommand, raw_overrides, config_path, base_overrides, out_dir = args
    cfg = load_config(config_path, list(base_overrides) + list(raw_overrides))
    record = execute(subcommand, cfg, out_dir)
    return record.exit_code, record.reports, record.message


def run_sweep(cfg, config_path, overrides, out_dir):
    axes = [
        ("space.s", cfg.sweep["s"] or [cfg.idx.s]),
        ("solver.T", cfg.sweep["T"] or [cfg.T]),
        ("experiment.seed", cfg.sweep["seeds"] or [cfg.seed]),
    ]
    texts = {
        "space.s": [t.strip() for t in cfg.raw["sweep"]["s"].split(",") if t.strip()]
        or [cfg.raw["space"]["s"]],
        "solver.T": [t.strip() for t in cfg.raw["sweep"]["T"].split(",") if t.strip()]
        or [cfg.raw["solver"]["T"]],
        "experiment.seed": [t.strip() for t in cfg.raw["sweep"]["seeds"].split(",") if t.strip()]
        or [cfg.raw["experiment"]["seed"]],
    }
    jobs = []
    for combo in itertools.product(*(texts[k] for k, _ in axes)):
        key = "s={}_T={}_seed={}".format(*combo)
        entry_overrides = [f"{k}={v}" for (k, _), v in zip(axes, combo)]
        jobs.append((key, (cfg.kind, entry_overrides, config_path, overrides,
                           os.path.join(out_dir, key))))
    jobs.sort(key=lambda job: job[0])
    workers = max(1, min(cfg.sweep["workers"], len(jobs)))
    if workers == 1:
        results = [_sweep_entry(job) for _, job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_entry, [job for _, job in jobs]))
    summary = [{"entry": key, "exit_code": code, "message": msg, "reports": reports}
               for (key, _), (code, reports, msg) in zip(jobs, results)]
    return summary


def build_parser():
    parser = argparse.ArgumentParser(prog="kmspectral", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", metavar="PATH", help="sectioned key-value config file")
    parser.add_argument("--out", metavar="DIR", help=f"output directory (default ${OUT_ENV} or ./out)")
    parser.add_argument("--seed", type=int, help="override experiment.seed")
    parser.add_argument("--format", choices=("csv", "json"), help="trajectory file format")
    parser.add_argument("--fields", action="store_true", help="dump one CSV per time slice")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", help="override a config value")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"experiment.seed={args.seed}")
    if args.format is not None:
        overrides.append(f"experiment.output_format={args.format}")
    out_dir = args.out or os.environ.get(OUT_ENV) or "out"
    start = time.perf_counter()
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.subcommand == "sweep":
        summary = run_sweep(cfg, args.config, overrides, out_dir)
        write_atomic(os.path.join(out_dir, "sweep_summary.json"), dumps(summary))
        codes = [entry["exit_code"] for entry in summary]
        code = max(codes) if codes else EXIT_OK
        for entry in summary:
            print(f"{entry['entry']}: exit {entry['exit_code']} {entry['message']}".rstrip())
    else:
        record = execute(args.subcommand, cfg, out_dir, args.fields)
        code = record.exit_code
        for rep in record.reports:
            status = "PASS" if rep["pass"] else "FAIL"
            print(f"{status} {rep['name']} max_ratio={fmt(rep['max_ratio'])} "
                  f"bound={'-' if rep['bound_constant'] is None else fmt(rep['bound_constant'])}")
        if record.message:
            print(record.message, file=sys.stderr)
    print(f"wall-clock {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
