"""Configuration ingestion and artifact emission.

Every artifact embeds the :class:`RunManifest` of the command that produced
it — as a ``#``-prefixed header line in CSV files and under the
``"manifest"`` key in JSON summaries — so a run can be reproduced from any
of its outputs.  All numeric output uses full-precision scientific
notation (``repr`` round-trippable), and nothing volatile (timestamps,
hostnames) enters the artifacts, so identical manifests produce
byte-identical payloads.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .pbe import SimulationReport
from .scaling import EnumerationResult, Monomial, ScalingProblem, ScalingSolution

SUMMARY_SCHEMA_VERSION = 1


def _version() -> str:
    try:
        return metadata.version("nondim")
    except metadata.PackageNotFoundError:
        return "unknown"


@dataclass(frozen=True)
class RunManifest:
    """What produced an artifact: command, resolved options, seed, version."""

    command: str
    config: dict
    out_dir: str
    seed: int
    version: str = ""

    def __post_init__(self):
        if not self.version:
            object.__setattr__(self, "version", _version())

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "out_dir": self.out_dir,
            "seed": self.seed,
            "version": self.version,
        }

    def header_line(self) -> str:
        return "# manifest: " + json.dumps(self.as_dict(), sort_keys=True)


def _fmt(x) -> str:
    return repr(float(x))


def _slug(name: str) -> str:
    return name.split("[")[0].strip().replace(" ", "_")


# ---------------------------------------------------------------------------
# configuration loading


def load_problem(path) -> ScalingProblem:
    """Read a scaling problem from YAML.

    Expected shape::

        factors: [name, ...]
        monomials:
          - {label: str, kappa: float, exponents: [float, ...], target: 0.0}
    """
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read problem file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    try:
        factors = tuple(str(name) for name in data["factors"])
        monomials = tuple(
            Monomial(
                label=str(entry["label"]),
                kappa=float(entry["kappa"]),
                exponents=tuple(float(a) for a in entry["exponents"]),
                target=float(entry.get("target", 0.0)),
            )
            for entry in data["monomials"]
        )
        return ScalingProblem(factor_names=factors, monomials=monomials)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{path}: malformed problem: {exc}") from exc


def load_lambda_config(path) -> dict:
    """Read an explicit coefficient scenario from YAML.

    Expected shape::

        lambdas: {a_m: float, ..., p_mat: float}   # the 19 by label
        constants: {Phi_s: float, Psi_bar: float, Psi_r: float}
        sigma_c: float        # optional, defaults to lambdas[c] / 50
        grid: {N: int, v_max: float}
        t_max: float
        steps: int            # optional, stability heuristic otherwise
        sample_every: int     # optional, defaults to steps // 100
    """
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    for key in ("lambdas", "constants", "grid", "t_max"):
        if key not in data:
            raise ConfigError(f"{path}: missing required key {key!r}")
    return data


# ---------------------------------------------------------------------------
# artifact writers


def write_solution_csv(
    path, problem: ScalingProblem, solutions: list[ScalingSolution], manifest: RunManifest
) -> None:
    """One row per solution: method, cost, ratio, factors, coefficients."""
    with open(path, "w", newline="") as fh:
        fh.write(manifest.header_line() + "\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["method", "cost", "ratio"]
            + [f"theta_{_slug(name)}" for name in problem.factor_names]
            + [f"lambda_{label}" for label in problem.labels]
        )
        for sol in solutions:
            writer.writerow(
                [sol.method_tag, _fmt(sol.cost), _fmt(sol.ratio)]
                + [_fmt(v) for v in sol.theta]
                + [_fmt(v) for v in sol.lambdas]
            )


def write_enumeration_csv(
    path, problem: ScalingProblem, result: EnumerationResult, manifest: RunManifest
) -> None:
    """All solvable subsets sorted by ratio, then factor values per row."""
    with open(path, "w", newline="") as fh:
        fh.write(manifest.header_line() + "\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["subset", "ratio", "cost"]
            + [f"theta_{_slug(name)}" for name in problem.factor_names]
        )
        for subset, sol in result.entries:
            writer.writerow(
                [";".join(problem.labels[c] for c in subset),
                 _fmt(sol.ratio), _fmt(sol.cost)]
                + [_fmt(v) for v in sol.theta]
            )


def write_trajectory_csv(path, times, states, columns, manifest: RunManifest) -> None:
    """Time series of an ODE solve, one state component per column."""
    states = np.asarray(states)
    with open(path, "w", newline="") as fh:
        fh.write(manifest.header_line() + "\n")
        writer = csv.writer(fh)
        writer.writerow(["t"] + list(columns))
        for t, row in zip(times, states):
            writer.writerow([_fmt(t)] + [_fmt(v) for v in np.atleast_1d(row)])


def write_flow_csv(path, flow, manifest: RunManifest) -> None:
    """Lattice samples of the phase-plane tangent field (NaN at poles)."""
    with open(path, "w", newline="") as fh:
        fh.write(manifest.header_line() + "\n")
        writer = csv.writer(fh)
        writer.writerow(["w1", "w2", "dw1", "dw2"])
        for i, b in enumerate(flow.w2):
            for j, a in enumerate(flow.w1):
                writer.writerow(
                    [_fmt(a), _fmt(b), _fmt(flow.dw1[i, j]), _fmt(flow.dw2[i, j])]
                )


def write_distributions_csv(path, grid, report: SimulationReport, manifest: RunManifest) -> None:
    """Final distributions m and w over the volume grid."""
    with open(path, "w", newline="") as fh:
        fh.write(manifest.header_line() + "\n")
        writer = csv.writer(fh)
        writer.writerow(["v", "m", "w"])
        for v, m, w in zip(grid.nodes(), report.final_m, report.final_w):
            writer.writerow([_fmt(v), _fmt(m), _fmt(w)])


def write_diagnostics_csv(path, report: SimulationReport, manifest: RunManifest) -> None:
    """Sampled auxiliary scalars, first moments, and error series."""
    with open(path, "w", newline="") as fh:
        fh.write(manifest.header_line() + "\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["t", "V_mat", "V_cm", "V_cw", "Psi", "V_pol2",
             "F_m", "F_w", "eps_m", "eps_w"]
        )
        n = len(report.times)
        eps_m = report.eps_m if report.eps_m is not None else [float("nan")] * n
        eps_w = report.eps_w if report.eps_w is not None else [float("nan")] * n
        for k in range(n):
            writer.writerow(
                [_fmt(series[k]) for series in
                 (report.times, report.V_mat, report.V_cm, report.V_cw,
                  report.Psi, report.V_pol2, report.F_m, report.F_w,
                  eps_m, eps_w)]
            )


def write_summary_json(path, payload: dict, manifest: RunManifest) -> None:
    """Run summary with the manifest embedded; keys sorted for stability."""
    document = {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "manifest": manifest.as_dict(),
        **payload,
    }
    with open(path, "w") as fh:
        json.dump(document, fh, indent=2, sort_keys=True)
        fh.write("\n")
