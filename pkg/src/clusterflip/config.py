"""Experiment configuration files.

Flat INI-style text: sections [lattice], [chain], [matching], [output] with
key = value lines ('#' starts a comment line).  Unknown sections or keys are
rejected outright, as are out-of-range values, before any computation runs.
The full grammar is documented in the README.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .chain import ChainConfig
from .lattices import BoundarySpec, MeshParams, build_square_lattice, build_disk_triangulation
from .model import IsingGraph


class ConfigError(ValueError):
    """Invalid experiment configuration."""


_KNOWN = {
    "lattice": {"type", "n1", "n2", "h", "bc", "arcs", "seed"},
    "chain": {"beta", "eta", "iterations", "seed", "initial", "flip_kind", "involution"},
    "matching": {"norm", "mu"},
    "output": {
        "trace_path", "summary_path", "svg_path", "graph_path", "report_path",
        "snapshot_interval", "snapshot_path",
    },
}


@dataclass(frozen=True)
class LatticeSection:
    type: str
    bc: str
    n1: int | None = None
    n2: int | None = None
    h: float | None = None
    arcs: tuple[tuple[float, float], ...] = ()
    seed: int = 0


@dataclass(frozen=True)
class ChainSection:
    beta: float
    eta: float
    iterations: int
    seed: int
    initial: str = "all-minus"
    flip_kind: str = "none"
    involution: str | None = None


@dataclass(frozen=True)
class MatchingSection:
    norm: str = "linf"
    mu: str | None = None


@dataclass(frozen=True)
class OutputSection:
    trace_path: str | None = None
    summary_path: str | None = None
    svg_path: str | None = None
    graph_path: str | None = None
    report_path: str | None = None
    snapshot_path: str | None = None
    snapshot_interval: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    lattice: LatticeSection | None = None
    chain: ChainSection | None = None
    matching: MatchingSection = field(default_factory=MatchingSection)
    output: OutputSection = field(default_factory=OutputSection)


def _get(section, key, cast, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    raw = section[key]
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from exc


def _parse_arcs(raw: str) -> tuple[tuple[float, float], ...]:
    arcs = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        lo, _, hi = chunk.partition(":")
        arcs.append((float(lo), float(hi)))
    return tuple(arcs)


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc

    for section in parser.sections():
        if section not in _KNOWN:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _KNOWN[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    lattice = None
    if parser.has_section("lattice"):
        sec = parser["lattice"]
        lattice = LatticeSection(
            type=_get(sec, "type", str, required=True),
            bc=_get(sec, "bc", str, required=True),
            n1=_get(sec, "n1", int),
            n2=_get(sec, "n2", int),
            h=_get(sec, "h", float),
            arcs=_get(sec, "arcs", _parse_arcs, default=()),
            seed=_get(sec, "seed", int, default=0),
        )
        if lattice.type not in ("square", "disk"):
            raise ConfigError(f"lattice type must be square or disk, got {lattice.type!r}")
        if lattice.type == "square" and (lattice.n1 is None or lattice.n2 is None):
            raise ConfigError("square lattice needs n1 and n2")
        if lattice.type == "disk" and lattice.h is None:
            raise ConfigError("disk lattice needs h")

    chain = None
    if parser.has_section("chain"):
        sec = parser["chain"]
        chain = ChainSection(
            beta=_get(sec, "beta", float, required=True),
            eta=_get(sec, "eta", float, default=0.0),
            iterations=_get(sec, "iterations", int, required=True),
            seed=_get(sec, "seed", int, default=0),
            initial=_get(sec, "initial", str, default="all-minus"),
            flip_kind=_get(sec, "flip_kind", str, default="none"),
            involution=_get(sec, "involution", str),
        )
        if not math.isfinite(chain.beta) or chain.beta < 0:
            raise ConfigError("beta must be finite and nonnegative")

    matching = MatchingSection()
    if parser.has_section("matching"):
        sec = parser["matching"]
        matching = MatchingSection(
            norm=_get(sec, "norm", str, default="linf"),
            mu=_get(sec, "mu", str),
        )
        if matching.norm not in ("linf", "l2"):
            raise ConfigError(f"norm must be linf or l2, got {matching.norm!r}")

    output = OutputSection()
    if parser.has_section("output"):
        sec = parser["output"]
        output = OutputSection(
            trace_path=_get(sec, "trace_path", str),
            summary_path=_get(sec, "summary_path", str),
            svg_path=_get(sec, "svg_path", str),
            graph_path=_get(sec, "graph_path", str),
            report_path=_get(sec, "report_path", str),
            snapshot_path=_get(sec, "snapshot_path", str),
            snapshot_interval=_get(sec, "snapshot_interval", int, default=0),
        )
        if output.snapshot_interval < 0:
            raise ConfigError("snapshot_interval must be >= 0")

    return ExperimentConfig(lattice=lattice, chain=chain, matching=matching, output=output)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def build_graph(cfg: ExperimentConfig) -> IsingGraph:
    """Construct the lattice described by the [lattice] section."""
    lat = cfg.lattice
    if lat is None:
        raise ConfigError("config has no [lattice] section")
    try:
        bc = BoundarySpec(kind=lat.bc, arcs=lat.arcs)
        if lat.type == "square":
            return build_square_lattice(lat.n1, lat.n2, bc)
        return build_disk_triangulation(MeshParams(h=lat.h, seed=lat.seed), bc)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def chain_config(cfg: ExperimentConfig) -> ChainConfig:
    ch = cfg.chain
    if ch is None:
        raise ConfigError("config has no [chain] section")
    try:
        return ChainConfig(
            beta=ch.beta, eta=ch.eta, iterations=ch.iterations, seed=ch.seed,
            initial=ch.initial, flip_kind=ch.flip_kind,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def default_mu_for(bc_kind: str) -> str:
    """Geometric involution used when [matching] does not name one."""
    return "diagonal" if bc_kind == "sides-pm" else "x-axis"
