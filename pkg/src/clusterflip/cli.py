"""Command-line front end.

Subcommands: build-lattice, run, oracle-check, matching-report.  Every command
is driven by a config file (see README for the grammar) and is deterministic
given that file.  Exit codes: 0 success, 1 verification failure, 2 bad
configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import chain as chain_mod
from . import config as config_mod
from . import oracle, svg
from .config import ConfigError, ExperimentConfig
from .flip import GeometricInvolution, InvolutionError, build_matching, random_interior_involution
from .lattices import BoundarySpec, build_square_lattice, exact_involution_for
from .model import save_graph
from .rng import RngStream

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CONFIG = 2


def _resolve_involution(cfg: ExperimentConfig, g):
    """Involution array for the configured flip kind (None when flips are off)."""
    ch = cfg.chain
    if ch is None or ch.flip_kind == "none":
        return None
    if ch.flip_kind == "exact":
        if ch.involution is None:
            raise ConfigError("flip_kind = exact needs chain.involution (diagonal/x-axis/y-axis)")
        return exact_involution_for(g, ch.involution)
    mu_name = cfg.matching.mu or config_mod.default_mu_for(cfg.lattice.bc)
    mu = GeometricInvolution.named(mu_name)
    report = build_matching(g, mu, cfg.matching.norm)
    return report.pairs


def _with_replica_suffix(path: str, replica: int) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}.r{replica}{p.suffix}"))


def cmd_build_lattice(cfg: ExperimentConfig, quiet: bool) -> int:
    g = config_mod.build_graph(cfg)
    out = cfg.output
    if out.graph_path is None:
        raise ConfigError("build-lattice needs output.graph_path")
    save_graph(g, out.graph_path)
    if out.svg_path:
        Path(out.svg_path).write_text(svg.render_graph_svg(g), encoding="ascii")
    if not quiet:
        print(f"wrote {out.graph_path}: {g!r}")
    return EXIT_OK


def cmd_run(cfg: ExperimentConfig, replicas: int, quiet: bool) -> int:
    g = config_mod.build_graph(cfg)
    ccfg = config_mod.chain_config(cfg)
    involution = _resolve_involution(cfg, g)
    out = cfg.output

    traces = chain_mod.run_replicas(
        g, ccfg, involution, replicas=replicas,
        snapshot_interval=out.snapshot_interval,
    )

    if out.trace_path:
        if replicas == 1:
            chain_mod.write_trace_csv(traces[0], out.trace_path)
        else:
            for r, tr in enumerate(traces):
                chain_mod.write_trace_csv(tr, _with_replica_suffix(out.trace_path, r))
    if out.snapshot_path and out.snapshot_interval > 0:
        _write_snapshots(traces[0], out.snapshot_path)
    if out.svg_path:
        Path(out.svg_path).write_text(
            svg.render_trace_svg(traces[0].avg_spin), encoding="ascii"
        )

    summaries = [chain_mod.summary_dict(tr) for tr in traces]
    if replicas == 1:
        merged = summaries[0]
    else:
        merged = {
            "replicas": summaries,
            "transitions": sum(s["transitions"] for s in summaries),
            "flip_attempts": sum(s["flip_attempts"] for s in summaries),
            "flip_accepts": sum(s["flip_accepts"] for s in summaries),
        }
    if out.summary_path:
        chain_mod.write_summary_json(merged, out.summary_path)
    if not quiet:
        print(json.dumps(merged, indent=2, sort_keys=True))
    return EXIT_OK


def _write_snapshots(trace, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for it, spins in trace.snapshots:
            encoded = "".join("+" if v > 0 else "-" for v in spins)
            fh.write(f"{it} {encoded}\n")


def _oracle_instances(cfg: ExperimentConfig | None):
    """(label, graph, betas, eta) tuples to check."""
    if cfg is not None and cfg.lattice is not None:
        g = config_mod.build_graph(cfg)
        beta = cfg.chain.beta if cfg.chain else 0.5
        eta = cfg.chain.eta if cfg.chain and cfg.chain.eta > 0 else 0.3
        label = f"{cfg.lattice.type}:{cfg.lattice.bc}"
        return [(label, g, [beta], eta)]
    sides = BoundarySpec("sides-pm")
    return [
        ("2x2 sides-pm", build_square_lattice(2, 2, sides), [0.2, 0.5, 1.0], 0.3),
        ("1x3 sides-pm", build_square_lattice(1, 3, sides), [0.2, 0.5, 1.0], 0.3),
    ]


def cmd_oracle_check(cfg: ExperimentConfig | None, quiet: bool, tamper: bool = False) -> int:
    checks: list[tuple[str, str, float, oracle.BalanceReport | None, bool]] = []

    def record(name, instance, beta, violation, passed):
        checks.append((name, instance, beta, violation, passed))

    for label, g, betas, eta in _oracle_instances(cfg):
        oracle._require_total_cap(g)  # raises EnumerationCapError -> exit 2
        for beta in betas:
            p_ve, p_e, p_v = oracle.enumerate_joint_and_marginals(g, beta)
            sum_s = p_ve.weights.sum(axis=0)
            sum_w = p_ve.weights.sum(axis=1)
            v1 = float(np.abs(sum_s - p_e.weights).max())
            v2 = float(np.abs(sum_w - p_v.weights).max())
            record("marginal edge", label, beta, v1, v1 <= 1e-12)
            record("marginal spin", label, beta, v2, v2 <= 1e-12)

            p_sw = oracle.exact_sw_kernel(g, beta)
            if tamper:
                p_sw.matrix[0, -1] += 1e-6
            rep = oracle.check_detailed_balance(p_sw, p_v, 1e-10)
            record("balance sw", label, beta, rep.max_violation, rep.passed)
            if not rep.passed and not quiet:
                print(f"witness pair for sw kernel at beta={beta}: states {rep.worst_pair}")

            flips = []
            try:
                m_exact = exact_involution_for(g, "diagonal")
                flips.append(("df-exact", oracle.exact_flip_kernel(g, beta, m_exact, "exact")))
                flips.append(
                    ("df-metro", oracle.exact_flip_kernel(g, beta, m_exact, "metropolized"))
                )
            except InvolutionError:
                pass  # no exact symmetry on this instance
            m_rand = random_interior_involution(g.n_interior, RngStream(2024, 0))
            flips.append(
                ("df-metro-rand", oracle.exact_flip_kernel(g, beta, m_rand, "metropolized"))
            )
            for name, kernel in flips:
                rep = oracle.check_detailed_balance(kernel, p_v, 1e-10)
                record(f"balance {name}", label, beta, rep.max_violation, rep.passed)
                mix = oracle.mixture_kernel(eta, kernel, p_sw)
                rep = oracle.check_detailed_balance(mix, p_v, 1e-10)
                record(f"balance mix({name})", label, beta, rep.max_violation, rep.passed)

    failed = [c for c in checks if not c[4]]
    if not quiet:
        width = max(len(c[0]) for c in checks)
        for name, instance, beta, violation, passed in checks:
            status = "pass" if passed else "FAIL"
            print(f"{status}  {name:<{width}}  {instance}  beta={beta:<4g}  max|viol|={violation:.3e}")
        print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_VERIFICATION if failed else EXIT_OK


def cmd_matching_report(cfg: ExperimentConfig, quiet: bool) -> int:
    g = config_mod.build_graph(cfg)
    mu_name = cfg.matching.mu or config_mod.default_mu_for(cfg.lattice.bc)
    mu = GeometricInvolution.named(mu_name)
    report = build_matching(g, mu, cfg.matching.norm)
    out = cfg.output
    if out.report_path is None:
        raise ConfigError("matching-report needs output.report_path")

    x = g.embedding[: g.n_interior]
    mu_x = mu.apply(x)
    with open(out.report_path, "w", encoding="ascii") as fh:
        fh.write("i,j,xi,yi,x_mu_i,y_mu_i,xj,yj,displacement\n")
        for i in range(g.n_interior):
            j = int(report.pairs[i])
            row = [x[i, 0], x[i, 1], mu_x[i, 0], mu_x[i, 1], x[j, 0], x[j, 1],
                   report.displacement[i]]
            fh.write(f"{i},{j}," + ",".join(repr(float(v)) for v in row) + "\n")
    if out.svg_path:
        Path(out.svg_path).write_text(
            svg.render_matching_svg(x, mu_x, report.pairs), encoding="ascii"
        )
    if not quiet:
        print(
            f"matched {g.n_interior} vertices with mu={mu_name}, norm={report.norm}: "
            f"max displacement {report.max_displacement:.4g}, "
            f"mean {report.mean_displacement:.4g}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterflip",
        description="Ising sampler with cluster updates and double flip moves",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, config_required=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=config_required, help="experiment config file")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
        return p

    add("build-lattice", "build a lattice and write the graph file")
    p_run = add("run", "run a chain and write trace/summary files")
    p_run.add_argument("--replicas", type=int, default=1, help="independent chains to run")
    p_oracle = add("oracle-check", "verify exact identities on tiny instances", config_required=False)
    p_oracle.add_argument(
        "--tamper", action="store_true",
        help="perturb the SW kernel first (exercises failure reporting)",
    )
    add("matching-report", "build the geometric matching and write the report CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_mod.load_config(args.config) if args.config else None
        if args.command == "build-lattice":
            return cmd_build_lattice(cfg, args.quiet)
        if args.command == "run":
            if args.replicas < 1:
                raise ConfigError("--replicas must be >= 1")
            return cmd_run(cfg, args.replicas, args.quiet)
        if args.command == "oracle-check":
            return cmd_oracle_check(cfg, args.quiet, tamper=args.tamper)
        if args.command == "matching-report":
            return cmd_matching_report(cfg, args.quiet)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, InvolutionError, oracle.EnumerationCapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
