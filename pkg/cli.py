"""
qsym command line
Figure data, solvers, verification suites and the discrepancy ledger
"""
import functools
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import click
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

import config
from qalgebra.errors import QSymError, SingularModeError
from qalgebra.ncplane import Grid, compare_operators, general_q_operator, limit_operator, pde_residual, variant_scan
from qalgebra.perturb import field_samples, phase_demo
from qalgebra.qcore import Deformation
from qalgebra.symmetry1d import (
    PartitionPotentialSpec,
    PotentialSpec,
    deform_coulomb_curve,
    partition_recursion,
    partition_scan,
    predicted_pole,
    q_independence_sweep,
    real_pole,
)
from utils.exporters import (
    POLE_COLUMNS,
    curve_frame,
    difference_frame,
    field_frame,
    frame,
    phase_frame,
    residual_frame,
    write_csv,
    write_json,
)
from utils.pdf_generator import generate_ledger_pdf
from verifiers import KNOWN_VERDICTS, STAGES, VerificationOrchestrator, load_baseline
from verifiers.figure_verifier import figure_deformation

logger = logging.getLogger("qsym")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_SINGULAR = 4
EXIT_REGRESSION = 5

INVARIANT_S_VALUES = [0.3, 1.1, 2.0]
DEFAULT_FIELD_POINTS = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 1.0]]


# =====================================================================
# Run configuration
# =====================================================================

class XGridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x_min: float = config.COULOMB_X_GRID["x_min"]
    x_max: float = config.COULOMB_X_GRID["x_max"]
    n: int = Field(default=config.COULOMB_X_GRID["n"], ge=2)

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)


class PlaneGridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x_min: float = config.NCPLANE_GRID["x_min"]
    x_max: float = config.NCPLANE_GRID["x_max"]
    y_min: float = Field(default=config.NCPLANE_GRID["y_min"], gt=0)
    y_max: float = Field(default=config.NCPLANE_GRID["y_max"], gt=0)
    nx: int = Field(default=config.NCPLANE_GRID["nx"], ge=3)
    ny: int = Field(default=config.NCPLANE_GRID["ny"], ge=3)

    def to_grid(self) -> Grid:
        return Grid(**self.model_dump())


class PartitionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    N: int = Field(ge=2)
    A: List[float] = Field(default_factory=list)
    B: List[float] = Field(default_factory=list)
    C: List[float] = Field(default_factory=list)
    n: Optional[int] = None

    def to_spec(self) -> PartitionPotentialSpec:
        return PartitionPotentialSpec(self.N, tuple(self.A), tuple(self.B), tuple(self.C))


class RunConfig(BaseModel):
    """Per-run settings; unknown keys are rejected"""
    model_config = ConfigDict(extra="forbid")

    # deformation
    mode: Literal["real", "complex"] = "complex"
    s_values: Optional[List[float]] = None
    x_grid: XGridConfig = Field(default_factory=XGridConfig)
    terms: Optional[int] = Field(default=None, ge=2)

    # truncation and tolerance
    order: int = Field(default=config.DEFAULT_ORDER, ge=2)
    tolerance: float = Field(default=config.DEFAULT_TOLERANCE, gt=0)

    # invariant solver
    potential: Dict[int, float] = Field(default_factory=dict)
    f0: float = 1.0
    f1: float = 0.0
    partition: Optional[PartitionConfig] = None

    # non-commutative plane
    alpha: float = Field(default=config.NCPLANE_ALPHA, gt=0)
    grid: PlaneGridConfig = Field(default_factory=PlaneGridConfig)
    variant: Literal["best", "printed"] = "best"

    # perturbative sector
    k: Tuple[float, float, float] = config.DEFAULT_WAVE_VECTOR
    epsilon: float = Field(default=config.DEFAULT_EPSILON, ge=0)
    sign: Literal[1, -1] = 1
    paths: Optional[Dict[str, List[Tuple[float, float, float]]]] = None
    field_points: List[Tuple[float, float, float]] = Field(default_factory=lambda: list(DEFAULT_FIELD_POINTS))

    # verification
    stages: Optional[List[str]] = None
    fuzz_trials: Optional[int] = Field(default=None, ge=1)

    @field_validator("s_values")
    @classmethod
    def finite_s(cls, v):
        if v is not None:
            if not v:
                raise ValueError("s_values must not be empty")
            if not all(math.isfinite(s) for s in v):
                raise ValueError("s_values must be finite")
        return v

    @field_validator("potential")
    @classmethod
    def non_negative_exponents(cls, v):
        if any(k < 0 for k in v):
            raise ValueError("potential exponents must be non-negative")
        return v

    @field_validator("paths")
    @classmethod
    def paths_have_two_points(cls, v):
        if v is not None:
            short = [name for name, pts in v.items() if len(pts) < 2]
            if short:
                raise ValueError(f"paths need at least two points: {short}")
        return v

    @field_validator("stages")
    @classmethod
    def known_stages(cls, v):
        if v is not None:
            unknown = sorted(set(v) - set(STAGES))
            if unknown:
                raise ValueError(f"unknown stages {unknown}; choose from {list(STAGES)}")
        return v

    def default_s_values(self, fallback: List[float]) -> List[float]:
        return list(self.s_values) if self.s_values is not None else list(fallback)


class ConfigError(Exception):
    """Bad config file or invalid settings"""


def load_run_config(path: Optional[str], **overrides) -> RunConfig:
    """Parse and validate before any computation; command-line overrides win"""
    data: Dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


# =====================================================================
# Helpers
# =====================================================================

def _setup_logging(verbose: bool):
    level = logging.DEBUG if verbose else getattr(logging, str(config.LOG_LEVEL).upper(), logging.WARNING)
    logging.basicConfig(level=level, format=config.LOG_FORMAT, stream=sys.stderr, force=True)


def _emit(text: str, out: Optional[str]):
    """Text to stdout unless it was already written to out"""
    if out is None:
        click.echo(text, nl=False)


def common_options(fn):
    """--config, --out, --order, --tolerance, --verbose"""
    @click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                  help="JSON run configuration")
    @click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (stdout if omitted)")
    @click.option("--order", type=int, default=None, help="Truncation order")
    @click.option("--tolerance", type=float, default=None, help="Numerical tolerance")
    @click.option("--verbose", is_flag=True, help="Log at DEBUG level")
    @functools.wraps(fn)
    def wrapper(config_path, out, order, tolerance, verbose, **kwargs):
        _setup_logging(verbose)
        try:
            cfg = load_run_config(config_path, order=order, tolerance=tolerance)
        except ConfigError as e:
            click.echo(f"Config error: {e}", err=True)
            sys.exit(EXIT_CONFIG)
        try:
            code = fn(cfg, out, **kwargs)
        except ConfigError as e:
            click.echo(f"Config error: {e}", err=True)
            sys.exit(EXIT_CONFIG)
        except SingularModeError as e:
            click.echo(f"Singular modes: {e.modes}", err=True)
            sys.exit(EXIT_SINGULAR)
        except (QSymError, ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
            logger.debug("numerical failure", exc_info=True)
            click.echo(f"Numerical failure: {e}", err=True)
            sys.exit(EXIT_NUMERIC)
        sys.exit(code or EXIT_OK)

    return wrapper


# =====================================================================
# Commands
# =====================================================================

@click.group(name="qsym")
def main():
    """q-deformed symmetry toolkit: figure data, solvers and claim verification."""


@main.command("deform-potential")
@common_options
@click.option("--mode", type=click.Choice(["real", "complex"]), default=None,
              help="real: q = e^s, complex: q = e^{is}")
@click.option("--poles", type=click.Path(dir_okay=False), default=None, help="Write detected pole positions (CSV)")
def deform_potential(cfg: RunConfig, out: Optional[str], mode: Optional[str], poles: Optional[str]):
    """Samples of the deformed 1/(x - 1) (columns x, s, re_V, im_V, converged)."""
    mode = mode or cfg.mode
    fallback = config.FIG1_S_VALUES if mode == "real" else config.FIG2_S_VALUES
    xs = cfg.x_grid.points()
    terms = cfg.terms or config.COULOMB_TERMS
    points = []
    pole_rows = []
    for s in cfg.default_s_values(fallback):
        d = figure_deformation(s, mode)
        points.extend(deform_coulomb_curve(d, xs, terms))
        found = real_pole(d, terms)
        expected = predicted_pole(d)
        pole_rows.append({
            "s": s,
            "pole": math.nan if found is None else found,
            "predicted": expected.real if abs(expected.imag) < config.TRIG_SNAP_TOL else math.nan,
        })
        logger.info("s=%g: pole %s", s, found)
    _emit(write_csv(curve_frame(points), out), out)
    if poles is not None:
        write_csv(frame(pole_rows, POLE_COLUMNS), poles)
    return EXIT_OK


@main.command("invariant-solve")
@common_options
def invariant_solve(cfg: RunConfig, out: Optional[str]):
    """q-independent invariant eigenfunction for the configured potential (JSON)."""
    V0 = PotentialSpec.from_terms(cfg.potential)
    deformations = [figure_deformation(s, cfg.mode) for s in cfg.default_s_values(INVARIANT_S_VALUES)]
    sweep = q_independence_sweep(V0, cfg.f0, cfg.f1, deformations, cfg.order)
    document = {
        "potential": {str(k): v for k, v in sorted(cfg.potential.items())},
        "order": cfg.order,
        "solutions": [
            {
                "deformation": sol.meta["deformation"],
                "f": sol.f,
                "W": sol.W,
                "E": sol.E,
                "commutant_residual": sol.meta["commutant_residual"],
                "unresolved": sorted(sol.meta["unresolved"]),
            }
            for sol in sweep["solutions"]
        ],
        "f_spread": sweep["f_spread"],
        "W_spread": sweep["W_spread"],
        "max_commutant_residual": sweep["max_commutant_residual"],
        "q_independent": sweep["f_spread"] < cfg.tolerance,
    }
    _emit(write_json(document, out), out)
    return EXIT_OK


@main.command("partition-solve")
@common_options
def partition_solve(cfg: RunConfig, out: Optional[str]):
    """Partition-potential recursion at s = n pi / N, or every admissible n (JSON)."""
    if cfg.partition is None:
        raise ConfigError("partition-solve needs a 'partition' block")
    spec = cfg.partition.to_spec()
    if cfg.partition.n is not None:
        runs = {cfg.partition.n: partition_recursion(spec, cfg.partition.n, cfg.f0, cfg.f1, cfg.order)}
        spread = 0.0
    else:
        scan = partition_scan(spec, cfg.f0, cfg.f1, cfg.order)
        runs, spread = scan["runs"], scan["n_spread"]
    document = {
        "N": spec.N,
        "order": cfg.order,
        "runs": {
            str(n): {
                "s": sol.meta["s"],
                "f": sol.f,
                "W": sol.W,
                "E": sol.E,
                "commutant_residual": sol.meta["commutant_residual"],
                "direct_deviation": sol.meta["direct_deviation"],
                "mode_factors": sol.meta["mode_factors"],
            }
            for n, sol in runs.items()
        },
        "n_spread": spread,
    }
    _emit(write_json(document, out), out)
    return EXIT_OK


@main.command("verify")
@common_options
@click.option("--baseline", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Stored ledger to compare against (default: the documented verdicts)")
@click.option("--pdf", "pdf_path", type=click.Path(dir_okay=False), default=None, help="Also render a PDF report")
@click.option("--stages", default=None, help="Comma-separated subset of stages")
def verify(cfg: RunConfig, out: Optional[str], baseline: Optional[str], pdf_path: Optional[str],
           stages: Optional[str]):
    """Run the verification stages and write the discrepancy ledger (JSON)."""
    selected = cfg.stages
    if stages:
        selected = [s.strip() for s in stages.split(",") if s.strip()]
        unknown = sorted(set(selected) - set(STAGES))
        if unknown:
            click.echo(f"Config error: unknown stages {unknown}", err=True)
            return EXIT_CONFIG

    orchestrator = VerificationOrchestrator(cfg.tolerance, cfg.order, cfg.fuzz_trials)
    result = orchestrator.run_pipeline(
        progress_callback=lambda stage, pct, status: logger.info("%3.0f%% %s", pct * 100, status),
        stages=selected,
    )
    ledger = result["ledger"]
    if out is not None:
        ledger.save(out)
    else:
        click.echo(ledger.to_json())
    if not result["success"]:
        click.echo(f"Verification failed: {result['error']}", err=True)
        return EXIT_NUMERIC

    reference = load_baseline(baseline) if baseline else KNOWN_VERDICTS
    regressions = ledger.regressions(reference)
    if pdf_path is not None:
        generate_ledger_pdf(ledger, orchestrator.get_summaries(), pdf_path, regressions)

    counts = ledger.counts()
    click.echo(", ".join(f"{k}: {v}" for k, v in counts.items()), err=True)
    if regressions:
        for r in regressions:
            click.echo(f"regression {r['claim_id']}: {r['baseline']} -> {r['verdict']}", err=True)
        return EXIT_REGRESSION
    return EXIT_OK


@main.command("ncplane-check")
@common_options
@click.option("--scan", "scan_path", type=click.Path(dir_okay=False), default=None,
              help="Write the variant ranking and operator comparison (JSON)")
def ncplane_check(cfg: RunConfig, out: Optional[str], scan_path: Optional[str]):
    """Residual field (x, y, residual) of the chosen plane candidate (CSV)."""
    grid = cfg.grid.to_grid()
    op = limit_operator()
    scan = variant_scan(op, cfg.alpha, grid)
    row = scan[0] if cfg.variant == "best" else next(r for r in scan if r["printed"])
    field = pde_residual(op, row["candidate"], grid)
    logger.info("variant %s: relative residual %.3e", row["label"], field.relative)
    _emit(write_csv(residual_frame(field), out), out)
    if scan_path is not None:
        write_json({
            "alpha": cfg.alpha,
            "variants": [
                {**{k: v for k, v in r.items() if k != "candidate"}, "solves": r["relative"] < cfg.tolerance}
                for r in scan
            ],
            "operator_comparison": compare_operators(general_q_operator(Deformation.general(-1.0)), op),
        }, scan_path)
    return EXIT_OK


@main.command("phase-demo")
@common_options
@click.option("--differences", type=click.Path(dir_okay=False), default=None,
              help="Write pairwise phase differences (CSV)")
@click.option("--field", "field_path", type=click.Path(dir_okay=False), default=None,
              help="Write vector-potential samples (CSV)")
def phase_demo_cmd(cfg: RunConfig, out: Optional[str], differences: Optional[str], field_path: Optional[str]):
    """Phases of the configured paths with a Stokes column for planar loops (CSV)."""
    demo = phase_demo(cfg.k, cfg.epsilon, cfg.sign, cfg.paths)
    for row in demo["paths"]:
        if not math.isnan(row["stokes_error"]) and row["stokes_error"] > cfg.tolerance:
            logger.warning("path %s: Stokes error %.3e above tolerance", row["path"], row["stokes_error"])
    _emit(write_csv(phase_frame(demo), out), out)
    if differences is not None:
        write_csv(difference_frame(demo), differences)
    if field_path is not None:
        write_csv(field_frame(field_samples(cfg.k, cfg.epsilon, cfg.sign, cfg.field_points)), field_path)
    return EXIT_OK


if __name__ == "__main__":
    main()
