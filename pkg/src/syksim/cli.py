"""Command-line experiment runner.

Subcommands cover the full pipeline: `table1` (resource scaling),
`compile` (QASM export with optional routing and ECR rebase),
`return-prob` (exact, noiseless-Trotter, noisy and self-mitigated
curves), `otoc` (exact and randomized-measurement correlators), and
`twirl-verify`.  Every run echoes its configuration and writes a
manifest with content hashes so that reruns are byte-auditable.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import __version__  # noqa: E402
from .circuit import (CouplingMap, export_qasm2, lower_swaps,  # noqa: E402
                      rebase_to_ecr, route, two_qubit_count)
from .clustering import build_graph, dsatur_partition, format_partition  # noqa: E402
from .mitigation import generate_twirl_table, verify_twirl_table  # noqa: E402
from .observables import (OtocConfig, TimeSeries, disorder_average,  # noqa: E402
                          otoc_exact, otoc_randomized,
                          return_probability_exact, return_probability_pipeline,
                          timeseries_csv, timeseries_json)
from .sim import NoiseModel, StateVector, apply_circuit  # noqa: E402
from .syk import (SykParams, build_hamiltonian, instance_to_json,  # noqa: E402
                  sample_couplings)
from .synth import format_resource_table, resource_table, trotter_circuit  # noqa: E402

_FIG_DPI = 120
_META = {"Software": "syksim"}


@dataclass
class ExperimentConfig:
    n: int = 6
    j: float = 1.0
    seeds: tuple = (0, 1, 2, 3, 4)
    dt: float = 1.5
    steps: int = 8
    route: str = None
    basis: str = "cx"
    p2: float = 0.0
    readout: tuple = None   # (p01, p10), same for each qubit
    noise_seed: int = 1
    twirls: int = 75
    shots: int = 2048
    self_mit: bool = True
    w: str = "Z:1"
    v: str = "Z:0"
    n_u: int = 600
    n_u_late: int = 900
    n_m: int = 4000
    times: tuple = (0.0, 1.5, 3.0, 4.5, 6.0)
    outdir: str = "out"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _config_from_args(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
        fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
        bad = set(data) - fields
        if bad:
            raise SystemExit(f"unknown config keys: {sorted(bad)}")
        cfg = dataclasses.replace(cfg, **data)
    overrides = {}
    for f in dataclasses.fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            overrides[f.name] = v
    cfg = dataclasses.replace(cfg, **overrides)
    if isinstance(cfg.seeds, str):
        cfg = dataclasses.replace(cfg, seeds=tuple(int(s) for s in cfg.seeds.split(",")))
    if isinstance(cfg.times, str):
        cfg = dataclasses.replace(cfg, times=tuple(float(s) for s in cfg.times.split(",")))
    if isinstance(cfg.readout, str):
        p01, p10 = (float(s) for s in cfg.readout.split(","))
        cfg = dataclasses.replace(cfg, readout=(p01, p10))
    cfg = dataclasses.replace(cfg, seeds=tuple(cfg.seeds), times=tuple(cfg.times))
    return cfg


# ----------------------------------------------------------------- output

class Emitter:
    """Collects written files and finishes with a hashed manifest."""

    def __init__(self, outdir: str, command: str, config: dict):
        self.dir = Path(outdir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.config = config
        self.files = {}

    def write_text(self, name: str, text: str):
        path = self.dir / name
        path.write_text(text)
        self.files[name] = hashlib.sha256(text.encode()).hexdigest()

    def write_figure(self, name: str, fig):
        path = self.dir / name
        fig.savefig(path, dpi=_FIG_DPI, metadata=_META)
        plt.close(fig)
        self.files[name] = hashlib.sha256(path.read_bytes()).hexdigest()

    def finish(self):
        self.write_text("config.json", json.dumps(self.config, indent=2,
                                                  sort_keys=True) + "\n")
        manifest = {
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "files": [{"path": p, "sha256": h}
                      for p, h in sorted(self.files.items())],
        }
        (self.dir / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _noise_from(cfg: ExperimentConfig, n: int) -> NoiseModel:
    readout = tuple((cfg.readout[0], cfg.readout[1]) for _ in range(n)) \
        if cfg.readout else None
    return NoiseModel(p2=cfg.p2, readout=readout, seed=cfg.noise_seed)


def _placement(text: str) -> tuple:
    kind, _, q = text.partition(":")
    return (kind.upper(), int(q))


def _coupling_map(route_arg: str, n: int) -> CouplingMap:
    if route_arg == "path":
        return CouplingMap.path(n)
    return CouplingMap.from_edge_list(Path(route_arg).read_text())


# ------------------------------------------------------------ subcommands

def cmd_table1(args) -> int:
    n_min, n_max = args.n_min, args.n_max
    if n_max < n_min or n_min < 4 or n_min % 2 or n_max % 2:
        raise SystemExit("usage error: need an even range with 4 <= n-min <= n-max")
    n_values = list(range(n_min, n_max + 2, 2))
    rows = resource_table(n_values)
    em = Emitter(args.outdir, "table1",
                 {"n_min": n_min, "n_max": n_max, "outdir": args.outdir})
    csv = "N,pauli_strings,clusters,two_qubit_gates\n" + \
        "".join(f"{a},{b},{c},{d}\n" for a, b, c, d in rows)
    em.write_text("resource_table.csv", csv)
    em.write_text("resource_table.txt", format_resource_table(rows))
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ns = [r[0] for r in rows]
    ax.semilogy(ns, [r[1] for r in rows], "o-", label="Pauli strings")
    ax.semilogy(ns, [r[2] for r in rows], "s-", label="clusters")
    ax.semilogy(ns, [r[3] for r in rows], "^-", label="two-qubit gates / step")
    ax.set_xlabel("Majorana count N")
    ax.set_ylabel("count")
    ax.legend(fontsize=8)
    fig.tight_layout()
    em.write_figure("resource_table.png", fig)
    em.finish()
    for row in rows:
        print("%4d %8d %6d %8d" % row)
    return 0


def cmd_compile(args) -> int:
    cfg = _config_from_args(args)
    seed = cfg.seeds[0]
    inst = sample_couplings(SykParams(N=cfg.n, J=cfg.j, seed=seed))
    h = build_hamiltonian(inst)
    part = dsatur_partition(build_graph(h.sum), h.sum)
    step = trotter_circuit(h, cfg.dt, 1, part)
    evo = trotter_circuit(h, cfg.dt * cfg.steps, cfg.steps, part)
    summary = {
        "n_majorana": cfg.n,
        "qubits": h.n,
        "pauli_strings": len(h.sum),
        "clusters": part.count,
        "two_qubit_per_step": two_qubit_count(step),
        "two_qubit_total": two_qubit_count(evo),
        "steps": cfg.steps,
        "dt": cfg.dt,
    }
    if cfg.route:
        cmap = _coupling_map(cfg.route, h.n)
        step, evo = route(step, cmap), route(evo, cmap)
        summary["routed_two_qubit_per_step"] = two_qubit_count(step)
        summary["routed_two_qubit_total"] = two_qubit_count(evo)
    if cfg.basis == "ecr":
        step_ecr = rebase_to_ecr(lower_swaps(step))
        evo_ecr = rebase_to_ecr(lower_swaps(evo))
        summary["ecr_per_step"] = two_qubit_count(step_ecr)
        summary["ecr_total"] = two_qubit_count(evo_ecr)
    em = Emitter(cfg.outdir, "compile", cfg.to_dict())
    em.write_text("instance.json", instance_to_json(inst) + "\n")
    em.write_text("clusters.txt", format_partition(part, h.sum))
    em.write_text("step.qasm", export_qasm2(lower_swaps(step)))
    em.write_text("evolution.qasm", export_qasm2(lower_swaps(evo)))
    em.write_text("summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    em.finish()
    print(f"N={cfg.n}: {summary['pauli_strings']} strings, "
          f"{summary['clusters']} clusters, "
          f"{summary['two_qubit_per_step']} two-qubit gates per step")
    return 0


def cmd_return_prob(args) -> int:
    cfg = _config_from_args(args)
    if not cfg.seeds:
        raise SystemExit("usage error: need at least one instance seed")
    r_values = list(range(2, cfg.steps + 1, 2))
    if not r_values:
        raise SystemExit("usage error: need steps >= 2 for the even-step grid")
    grid = [r * cfg.dt for r in r_values]
    em = Emitter(cfg.outdir, "return-prob", cfg.to_dict())
    exact_curves = []
    for seed in cfg.seeds:
        h = build_hamiltonian(sample_couplings(SykParams(N=cfg.n, J=cfg.j, seed=seed)))
        noise = _noise_from(cfg, h.n)
        times = [0.0] + grid
        exact = TimeSeries(times, [return_probability_exact(h, t) for t in times],
                           [0.0] * len(times))
        exact_curves.append(exact)
        em.write_text(f"inst{seed}_exact.csv", timeseries_csv(exact))
        if args.exact_only:
            continue
        trot, raw_v, raw_e, mit_v, mit_e = [], [], [], [], []
        for r, t in zip(r_values, grid):
            circ = trotter_circuit(h, t, r)
            psi = apply_circuit(StateVector.zero(h.n), circ)
            trot.append(float(abs(psi.amps[0]) ** 2))
            est = return_probability_pipeline(h, t, r, noise, shots=cfg.shots,
                                              n_twirls=cfg.twirls,
                                              self_mit=cfg.self_mit)
            raw_v.append(est.raw)
            raw_e.append(est.stderr if not cfg.self_mit else 0.0)
            mit_v.append(est.mitigated)
            mit_e.append(est.stderr)
        em.write_text(f"inst{seed}_trotter.csv",
                      timeseries_csv(TimeSeries(grid, trot, [0.0] * len(grid))))
        em.write_text(f"inst{seed}_noisy.csv",
                      timeseries_csv(TimeSeries(grid, raw_v, raw_e)))
        em.write_text(f"inst{seed}_mitigated.csv",
                      timeseries_csv(TimeSeries(grid, mit_v, mit_e)))
        em.write_text(f"inst{seed}_mitigated.json",
                      timeseries_json(TimeSeries(grid, mit_v, mit_e)))
    avg = disorder_average(exact_curves)
    em.write_text("average_exact.csv", timeseries_csv(avg))
    em.write_text("average_exact.json", timeseries_json(avg))

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for c in exact_curves:
        ax.plot(c.times, c.values, color="0.8", lw=0.7)
    ax.errorbar(avg.times, avg.values, yerr=avg.errors, fmt="k-o", ms=3,
                label="exact, disorder average")
    if not args.exact_only and cfg.seeds:
        ax.plot(grid, mit_v, "C1s", ms=4,
                label=f"mitigated (seed {cfg.seeds[-1]})")
        ax.plot(grid, raw_v, "C2^", ms=4, label="raw noisy")
    ax.set_xlabel("time t (1/J)")
    ax.set_ylabel("return probability")
    ax.set_ylim(0.0, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    em.write_figure("return_prob.png", fig)
    em.finish()
    print(f"wrote {len(em.files)} files to {em.dir}")
    return 0


def cmd_otoc(args) -> int:
    cfg = _config_from_args(args)
    seed = cfg.seeds[0]
    h = build_hamiltonian(sample_couplings(SykParams(N=cfg.n, J=cfg.j, seed=seed)))
    times = sorted(cfg.times)
    em = Emitter(cfg.outdir, "otoc", cfg.to_dict())
    f_vals, c_vals, o_vals, o_errs = [], [], [], []
    for i, t in enumerate(times):
        n_u = cfg.n_u if t <= cfg.dt else cfg.n_u_late
        ocfg = OtocConfig(W=_placement(cfg.w), V=_placement(cfg.v),
                          n_u=n_u, n_m=cfg.n_m, seed=cfg.noise_seed)
        f, cval = otoc_exact(h, ocfg, t)
        f_vals.append(f)
        c_vals.append(cval)
        if args.exact_only:
            continue
        est = otoc_randomized(h, ocfg, t, shot_noise=True, dt=cfg.dt, stream=i)
        o_vals.append(est.value)
        o_errs.append(est.stderr)
    em.write_text("otoc_exact.csv",
                  timeseries_csv(TimeSeries(times, f_vals, [0.0] * len(times))))
    em.write_text("otoc_growth.csv",
                  timeseries_csv(TimeSeries(times, c_vals, [0.0] * len(times))))
    if not args.exact_only:
        rnd = TimeSeries(times, o_vals, o_errs)
        em.write_text("otoc_randomized.csv", timeseries_csv(rnd))
        em.write_text("otoc_randomized.json", timeseries_json(rnd))

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(times, f_vals, "k-o", ms=3, label="exact F(t)")
    if not args.exact_only:
        ax.errorbar(times, o_vals, yerr=o_errs, fmt="C0s", ms=4, capsize=3,
                    label="randomized protocol")
    ax.set_xlabel("time t (1/J)")
    ax.set_ylabel("normalized OTOC")
    ax.legend(fontsize=8)
    fig.tight_layout()
    em.write_figure("otoc.png", fig)
    em.finish()
    print(f"wrote {len(em.files)} files to {em.dir}")
    return 0


def cmd_twirl_verify(args) -> int:
    tables = {}
    ok = True
    for kind in ("cx", "ecr"):
        t = generate_twirl_table(kind)
        good = verify_twirl_table(t) and len(t.entries) == 16
        ok = ok and good
        tables[kind] = [list(e) for e in t.entries]
        print(f"{kind}: {len(t.entries)} conjugations, "
              f"{'verified' if good else 'FAILED'}")
    em = Emitter(args.outdir, "twirl-verify", {"outdir": args.outdir})
    em.write_text("twirl_tables.json", json.dumps(tables, indent=2) + "\n")
    em.finish()
    return 0 if ok else 1


# ----------------------------------------------------------------- parser

def _add_common(p):
    p.add_argument("--outdir", help="output directory (default: out)")
    p.add_argument("--config", help="JSON config file; flags override")
    p.add_argument("--n", type=int, help="Majorana count N")
    p.add_argument("--j", type=float, help="coupling scale J")
    p.add_argument("--seeds", help="comma-separated instance seeds")
    p.add_argument("--dt", type=float, help="Trotter step size")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="syksim",
                                 description="commuting-cluster compiler and "
                                             "noisy simulator for SYK dynamics")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table1", help="resource-scaling table")
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--outdir", default="out")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("compile", help="emit QASM circuits for one instance")
    _add_common(p)
    p.add_argument("--steps", type=int, help="Trotter step count")
    p.add_argument("--route", help="'path' or an edge-list file")
    p.add_argument("--basis", choices=("cx", "ecr"), help="two-qubit basis")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("return-prob", help="return-probability pipeline")
    _add_common(p)
    p.add_argument("--steps", type=int, help="max (even) Trotter step count")
    p.add_argument("--p2", type=float, help="two-qubit depolarizing probability")
    p.add_argument("--readout", help="per-qubit flip pair 'p01,p10'")
    p.add_argument("--noise-seed", type=int, dest="noise_seed")
    p.add_argument("--twirls", type=int, help="twirled variants per circuit")
    p.add_argument("--shots", type=int, help="shots per variant")
    p.add_argument("--no-self-mit", dest="self_mit", action="store_false",
                   default=None)
    p.add_argument("--exact-only", action="store_true")
    p.set_defaults(func=cmd_return_prob)

    p = sub.add_parser("otoc", help="out-of-time-order correlators")
    _add_common(p)
    p.add_argument("--times", help="comma-separated time points")
    p.add_argument("--w", help="W placement, e.g. Z:1")
    p.add_argument("--v", help="V placement, e.g. Z:0")
    p.add_argument("--n-u", type=int, dest="n_u", help="unitaries (t <= dt)")
    p.add_argument("--n-u-late", type=int, dest="n_u_late",
                   help="unitaries (t > dt)")
    p.add_argument("--n-m", type=int, dest="n_m", help="shots per circuit")
    p.add_argument("--noise-seed", type=int, dest="noise_seed")
    p.add_argument("--exact-only", action="store_true")
    p.set_defaults(func=cmd_otoc)

    p = sub.add_parser("twirl-verify", help="regenerate and check twirl tables")
    p.add_argument("--outdir", default="out")
    p.set_defaults(func=cmd_twirl_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
