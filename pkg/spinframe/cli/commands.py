"""
Command Implementations

The four commands of the spinframe CLI. Each takes parsed inputs, runs the
library operations and returns a Report. Input errors propagate as
exceptions; numerical failures become failing report entries.
"""

import csv
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from spinframe.ambient.curvature import curvature_table
from spinframe.ambient.model_space import ModelFactory
from spinframe.cli.report import CheckResult, Report
from spinframe.cli.scene import (AbstractDocument, SpinorSpec, is_abstract, load_abstract,
                                 load_scene, read_document)
from spinframe.compat import AbstractData, residual_fields, worst_residual
from spinframe.exceptions import (ChartExit, CompatGateFailed, EvaluationDomainError,
                                  FrameDrift, HalfSpinorVanishes, ImmersionDegenerate,
                                  SpinorVanishes, StencilError, StepUnstable)
from spinframe.integrate import (compare_up_to_base_alignment, reconstruct_immersion,
                                 transport_spinor)
from spinframe.spinfield import (SpinGeometryFactory, dirac_residual, half_dirac_residual,
                                 killing_residual, norm_law_residual, recover_residual,
                                 ricci_residual, spinor_df_residual, splitting_suite,
                                 trace_identity_residual)
from spinframe.surface import extract
from spinframe.utils.check_observer import CheckObserverManager, StatisticsCheckObserver
from spinframe.utils.config_utils import resolve_tolerances

logger = logging.getLogger(__name__)

NUMERICAL_ERRORS = (ImmersionDegenerate, EvaluationDomainError, StencilError)


@dataclass
class CommandContext:
    """
    Options shared by all commands.

    Attributes:
        config: Spinframe configuration
        tolerance_overrides: --tol values
        parameters: --param values
        grid: --grid override
        emit_grids: Attach per-point residual grids to field checks
        observers: Check event manager
        statistics: Statistics observer registered with the manager
    """

    config: Dict[str, Any]
    tolerance_overrides: Dict[str, float] = field(default_factory=dict)
    parameters: Dict[str, float] = field(default_factory=dict)
    grid: Optional[Tuple[int, int]] = None
    emit_grids: bool = False
    observers: CheckObserverManager = field(default_factory=CheckObserverManager)
    statistics: StatisticsCheckObserver = field(default_factory=StatisticsCheckObserver)

    def __post_init__(self):
        self.observers.add_observer(self.statistics)

    @property
    def numerics(self) -> Dict[str, Any]:
        return self.config.get("numerics", {})

    def tolerances(self, document_tolerances: Optional[Dict[str, float]] = None) -> Dict[str, float]:
        return resolve_tolerances(self.config, document_tolerances, self.tolerance_overrides)


def _record(report: Report, ctx: CommandContext, check: CheckResult) -> CheckResult:
    report.add(check)
    ctx.observers.check_result(check.name, check.max_residual, check.tolerance, check.passed)
    return check


def _field(report: Report, ctx: CommandContext, name: str, values, tolerance: float,
           fd_order: Optional[int]) -> CheckResult:
    return _record(report, ctx, CheckResult.from_field(name, values, tolerance, fd_order,
                                                       ctx.emit_grids))


def _failure(report: Report, ctx: CommandContext, name: str, error, tolerance: float) -> None:
    logger.error(f"{name}: {error.message}")
    ctx.observers.error(error.message, error.to_dict())
    _record(report, ctx, CheckResult.from_error(name, error, tolerance))


def _provenance(sha256: str, grid: Tuple[int, int], path: str) -> Dict[str, Any]:
    return {"input": path, "input_sha256": sha256, "grid": list(grid)}


def _finish(report: Report, ctx: CommandContext) -> Report:
    report.data["statistics"] = ctx.statistics.get_statistics()
    ctx.observers.run_completed(report.command, report.passed)
    return report


# Shared suites


def _compat_checks(report: Report, ctx: CommandContext, data: AbstractData,
                   tolerances: Dict[str, float]) -> None:
    ctx.observers.stage_started("compat")
    for name, values in residual_fields(data).items():
        _field(report, ctx, name, values, tolerances["compat"], data.fd_order)
    report.data["compat"] = worst_residual(data)
    ctx.observers.stage_completed("compat")


def _spinor_checks(report: Report, ctx: CommandContext, data: AbstractData, spec: SpinorSpec,
                   tolerances: Dict[str, float]) -> None:
    geometry = SpinGeometryFactory.create_geometry(spec.geometry, data.model, spec.eta)
    epsilon = float(ctx.numerics.get("epsilon_zero", 1e-10))
    order = data.fd_order

    ctx.observers.stage_started("transport")
    try:
        transport = transport_spinor(data, spec.seed, geometry, ctx.config)
    except (CompatGateFailed, StepUnstable, SpinorVanishes) as e:
        _failure(report, ctx, "transport", e, tolerances["killing"])
        ctx.observers.stage_completed("transport")
        return
    ctx.observers.stage_completed("transport")
    report.data["transport"] = transport.to_dict()
    spinors = transport.field

    _record(report, ctx, CheckResult.from_value("holonomy", transport.holonomy_defect,
                                                tolerances["holonomy"]))
    if geometry.is_product and np.imag(geometry.eta) != 0.0:
        threshold = epsilon * float(spinors.norm2().max()) ** 0.5
        _record(report, ctx, CheckResult(
            "nonvanishing", transport.min_norm, transport.min_norm, threshold,
            transport.min_norm > threshold, {"comparison": "min |phi| above tolerance"}))
    else:
        _record(report, ctx, CheckResult.from_value("norm_drift", transport.norm_drift,
                                                    tolerances["norm"]))

    ctx.observers.stage_started("spinor residuals")
    _field(report, ctx, "killing", killing_residual(spinors, data), tolerances["killing"], order)
    _field(report, ctx, "dirac", dirac_residual(spinors, data), tolerances["dirac"], order)
    _field(report, ctx, "norm_law", norm_law_residual(spinors, data), tolerances["norm"], order)
    _field(report, ctx, "trace_identity", trace_identity_residual(spinors, data),
           tolerances["dirac"], order)
    if geometry.is_product:
        _field(report, ctx, "half_dirac", half_dirac_residual(spinors, data),
               tolerances["dirac"], order)
    _field(report, ctx, "ricci", ricci_residual(spinors, data), tolerances["ricci"], order)
    try:
        _field(report, ctx, "recover_A", recover_residual(spinors, data, epsilon),
               tolerances["recover"], order)
        _field(report, ctx, "spinor_df", spinor_df_residual(spinors, data, epsilon),
               tolerances["recover"], order)
    except SpinorVanishes as e:
        _failure(report, ctx, "recover_A", e, tolerances["recover"])
    try:
        suite = splitting_suite(spinors, data, epsilon,
                                float(ctx.numerics.get("split_min_fraction", 0.05)))
    except HalfSpinorVanishes as e:
        ctx.observers.warning(e.message, e.to_dict())
        report.data["splitting"] = {"skipped": e.to_dict()}
    else:
        _field(report, ctx, "splitting_W", np.max(np.abs(suite.W), axis=(-2, -1)),
               tolerances["split"], order)
        report.data["splitting"] = suite.diagnostics()
    ctx.observers.stage_completed("spinor residuals")


# Commands


def cmd_inspect(path: str, ctx: CommandContext) -> Report:
    """
    Extract a scene and report the ranges of H, f, |T| and K.

    Raises:
        SpinframeError: Input errors (syntax, format, chart domain)
    """
    lambda_min = float(ctx.numerics.get("lambda_min", 1e-3))
    document = load_scene(path, ctx.grid, ctx.parameters, lambda_min)
    tolerances = ctx.tolerances(document.tolerances)
    scene = document.scene
    report = Report("inspect", path, provenance=_provenance(document.sha256, scene.grid, path))
    ctx.observers.run_started("inspect", path)
    report.data["model"] = scene.model.to_dict()
    report.data["surface"] = scene.expressions()

    ctx.observers.stage_started("extraction")
    try:
        extrinsic = extract(scene, document.frame_rotation, ctx.config)
    except NUMERICAL_ERRORS as e:
        _failure(report, ctx, "extraction", e, tolerances["compat"])
        return _finish(report, ctx)
    finally:
        ctx.observers.stage_completed("extraction")
    report.data["extraction"] = extrinsic.summary()
    _field(report, ctx, "unit", extrinsic.unit_defect(), tolerances["compat"], None)
    return _finish(report, ctx)


def _check_abstract(document: AbstractDocument, ctx: CommandContext) -> Report:
    tolerances = ctx.tolerances(document.tolerances)
    data = document.data
    report = Report("check", document.path,
                    provenance=_provenance(document.sha256, data.shape, document.path))
    ctx.observers.run_started("check", document.path)
    report.data["model"] = data.model.to_dict()
    _compat_checks(report, ctx, data, tolerances)
    if document.spinor is not None:
        _spinor_checks(report, ctx, data, document.spinor, tolerances)
    return _finish(report, ctx)


def cmd_check(path: str, ctx: CommandContext) -> Report:
    """
    Extraction, compatibility residuals and, with a spinor block, the spinor suite.

    Abstract-data files skip extraction.
    """
    document, _ = read_document(path)
    if is_abstract(document):
        return _check_abstract(load_abstract(path, ctx.grid, ctx.parameters, ctx.config), ctx)

    lambda_min = float(ctx.numerics.get("lambda_min", 1e-3))
    scene_doc = load_scene(path, ctx.grid, ctx.parameters, lambda_min)
    tolerances = ctx.tolerances(scene_doc.tolerances)
    scene = scene_doc.scene
    report = Report("check", path, provenance=_provenance(scene_doc.sha256, scene.grid, path))
    ctx.observers.run_started("check", path)
    report.data["model"] = scene.model.to_dict()
    report.data["surface"] = scene.expressions()

    ctx.observers.stage_started("extraction")
    try:
        extrinsic = extract(scene, scene_doc.frame_rotation, ctx.config)
    except NUMERICAL_ERRORS as e:
        _failure(report, ctx, "extraction", e, tolerances["compat"])
        return _finish(report, ctx)
    finally:
        ctx.observers.stage_completed("extraction")
    report.data["extraction"] = extrinsic.summary()
    _record(report, ctx, CheckResult.from_value(
        "shape_symmetry", float(np.max(extrinsic.asymmetry)), tolerances["compat"]))

    data = extrinsic.to_abstract()
    _compat_checks(report, ctx, data, tolerances)
    if scene_doc.spinor is not None:
        _spinor_checks(report, ctx, data, scene_doc.spinor, tolerances)
    return _finish(report, ctx)


def write_mesh_csv(path: str, u: np.ndarray, v: np.ndarray, points: np.ndarray) -> None:
    """Write the immersed grid as rows u, v, x, y, z."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["u", "v", "x", "y", "z"])
        for i, ui in enumerate(u):
            for j, vj in enumerate(v):
                writer.writerow([repr(float(ui)), repr(float(vj))]
                                + [repr(float(c)) for c in points[i, j]])
    logger.info(f"Mesh written to {path}")


def write_frames_csv(path: str, u: np.ndarray, v: np.ndarray, frames_chart: np.ndarray) -> None:
    """Write the frame grid as rows u, v and the chart components of E1, E2, nu."""
    header = ["u", "v"] + [f"{name}_{axis}" for name in ("e1", "e2", "nu") for axis in "xyz"]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for i, ui in enumerate(u):
            for j, vj in enumerate(v):
                writer.writerow([repr(float(ui)), repr(float(vj))]
                                + [repr(float(c)) for c in frames_chart[i, j].reshape(-1)])
    logger.info(f"Frames written to {path}")


def cmd_reconstruct(path: str, ctx: CommandContext, mesh_out: Optional[str] = None,
                    frames_out: Optional[str] = None) -> Report:
    """
    Rebuild the immersion of abstract data (or of an extracted scene).

    Raises:
        SpinframeError: Input errors, including a base frame that is not adapted
    """
    raw, _ = read_document(path)
    if is_abstract(raw):
        document = load_abstract(path, ctx.grid, ctx.parameters, ctx.config)
        data = document.data
        tolerances = ctx.tolerances(document.tolerances)
        sha256 = document.sha256
        reference = document.reference
        base = document.base
        if base is None:
            base = reference[0, 0] if reference is not None else np.zeros(3)
        base_frame = document.base_frame
        report = Report("reconstruct", path, provenance=_provenance(sha256, data.shape, path))
        ctx.observers.run_started("reconstruct", path)
    else:
        scene_doc = load_scene(path, ctx.grid, ctx.parameters,
                               float(ctx.numerics.get("lambda_min", 1e-3)))
        tolerances = ctx.tolerances(scene_doc.tolerances)
        report = Report("reconstruct", path,
                        provenance=_provenance(scene_doc.sha256, scene_doc.scene.grid, path))
        ctx.observers.run_started("reconstruct", path)
        ctx.observers.stage_started("extraction")
        try:
            extrinsic = extract(scene_doc.scene, scene_doc.frame_rotation, ctx.config)
        except NUMERICAL_ERRORS as e:
            _failure(report, ctx, "extraction", e, tolerances["compat"])
            return _finish(report, ctx)
        finally:
            ctx.observers.stage_completed("extraction")
        data = extrinsic.to_abstract()
        reference = extrinsic.points
        base = extrinsic.points[0, 0]
        base_frame = extrinsic.frame_chart[0, 0]
    report.data["model"] = data.model.to_dict()
    report.data["base"] = {"point": np.asarray(base).tolist(),
                           "frame": None if base_frame is None else np.asarray(base_frame).tolist()}

    ctx.observers.stage_started("reconstruction")
    try:
        result = reconstruct_immersion(data, base, base_frame, ctx.config)
    except CompatGateFailed as e:
        _failure(report, ctx, "compat_gate", e, float(ctx.numerics.get("compat_gate", 1e-3)))
        return _finish(report, ctx)
    except (ChartExit, FrameDrift) as e:
        _failure(report, ctx, "reconstruction", e, tolerances["roundtrip"])
        return _finish(report, ctx)
    finally:
        ctx.observers.stage_completed("reconstruction")
    report.data["reconstruction"] = result.to_dict()

    _record(report, ctx, CheckResult.from_value("path_defect", result.path_defect,
                                                tolerances["roundtrip"]))
    _record(report, ctx, CheckResult.from_value("vertical_defect", result.vertical_defect,
                                                tolerances["roundtrip"]))
    _record(report, ctx, CheckResult.from_value("frame_drift", result.frame_drift,
                                                tolerances["frame"]))
    if reference is not None:
        defect = compare_up_to_base_alignment(reference, result.points)
        _record(report, ctx, CheckResult.from_value("roundtrip", defect, tolerances["roundtrip"]))

    if mesh_out:
        write_mesh_csv(mesh_out, data.u, data.v, result.points)
    if frames_out:
        write_frames_csv(frames_out, data.u, data.v, result.frames_chart)
    return _finish(report, ctx)


def cmd_curvature_table(kappa: float, tau: float, ctx: CommandContext, samples: int = 20,
                        seed: int = 0) -> Report:
    """
    Closed-form against numeric ambient curvature on random samples.

    Raises:
        ModelSpaceError: For (kappa, tau) = (0, 0)
    """
    numerics = ctx.numerics
    model = ModelFactory.create_model(kappa, tau, float(numerics.get("lambda_min", 1e-3)))
    tolerances = ctx.tolerances()
    target = f"kappa={kappa:g} tau={tau:g}"
    report = Report("curvature-table", target,
                    provenance={"samples": samples, "seed": seed, "fd_step": numerics.get("fd_step", 1e-4)})
    ctx.observers.run_started("curvature-table", target)
    ctx.observers.stage_started("curvature table")
    table = curvature_table(model, samples, seed, float(numerics.get("fd_step", 1e-4)))
    ctx.observers.stage_completed("curvature table")
    report.data["table"] = table
    _record(report, ctx, CheckResult.from_value("diagonal", table["max_diagonal_deviation"],
                                                tolerances["curvature"]))
    _record(report, ctx, CheckResult.from_value("quadruple", table["max_quadruple_deviation"],
                                                tolerances["curvature"]))
    _record(report, ctx, CheckResult.from_value("christoffel", table["max_christoffel_deviation"],
                                                tolerances["christoffel"]))
    return _finish(report, ctx)
