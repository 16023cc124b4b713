"""Job execution: analysis, meshing and report assembly.

Nothing here writes files; :mod:`afl.cli` owns all output so that a failing
job leaves no partial artifacts behind.
"""
from __future__ import annotations

import math
from contextlib import nullcontext
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import affine_front as af
from . import flat_front as ff
from .errors import ConstantMap, NotWellDefined, NumericFailure
from .jobs import Job
from .mesh import SurfaceMesh
from .ode import tolerance
from .rational import point_to_json
from .valdist import ramification_report


@dataclass
class Result:
    report: dict
    mesh: SurfaceMesh | None = None
    curves: list = field(default_factory=list)


def _cx(w) -> list:
    return [float(np.real(w)), float(np.imag(w))]


def _analyze_affine(job: Job) -> Result:
    data = job.payload
    nu = af.lagrangian_gauss(data)
    cert = af.period_check(data)
    try:
        ram = ramification_report(nu, data.dom)
    except ConstantMap:
        ram = None  # constant Gauss map: classified instead
    ends = af.end_orders(data)
    curves = af.singular_curves(data, job.window, job.singular_grid)
    dev = 0.0
    if curves:
        pts = np.concatenate([c.points for c in curves])
        dev = float(np.max(np.abs(np.abs(nu(pts)) - 1)))
    report = {
        "lagrangian_gauss": nu.to_json(),
        "classification": af.classify(data),
        "period_certificate": cert.to_json(),
        "immersion": "ok" if cert.well_defined else "refused: universal_cover_only",
        "ramification": {"status": "constant_map"} if ram is None else ram.to_json(),
        "omitted_values": None if ram is None else [point_to_json(v) for v in ram.exceptional],
        "ends": [e.to_json() for e in ends],
        "completeness_necessary": all(e.completeness_necessary for e in ends),
        "singular_set": {
            "window": list(job.window),
            "grid": job.singular_grid,
            "max_abs_nu_deviation": dev,
            "curves": [c.to_json() for c in curves],
        },
    }
    return Result(report, curves=curves)


def _analyze_h3(job: Job) -> Result:
    forms = job.payload
    cls = ff.classify_rho(forms)
    Q = ff.hopf(forms)
    rho = None if forms.w_hat.is_zero else ff.rho(forms).to_json()
    mono = []
    for p in forms.dom.punctures:
        M = ff.monodromy(forms, p)
        mono.append({
            "puncture": point_to_json(p),
            "matrix": M.to_json(),
            "trace": _cx(np.trace(M.m)),
            "det_error": float(abs(M.det - 1)),
        })
    schwarz = ff.schwarzian_check(forms, job.domain, job.schwarzian_grid)
    report = {
        "hopf": Q.to_json(),
        "rho": rho,
        "classification": cls,
        "ends": [e.to_json() for e in ff.wcf_end_orders(forms)],
        "monodromy": mono,
        "schwarzian": schwarz.to_json(),
    }
    return Result(report)


def _mesh_affine(job: Job, res: Result) -> None:
    try:
        m = af.mesh(job.payload, job.domain, job.grid, base=job.base)
    except NotWellDefined as exc:
        res.report["mesh"] = {"status": "refused", "reason": str(exc)}
        return
    res.mesh = m
    res.report["mesh"] = {"status": "ok", **m.summary()}


def _mesh_h3(job: Job, res: Result) -> None:
    m = ff.mesh_h3(job.payload, job.domain, job.grid, t=job.t, base=job.base)
    f0, n0 = m.extras["minkowski0"], m.extras["normal0"]
    f = m.extras["minkowski"]
    det = np.linalg.det(m.extras["frames"])
    res.mesh = m
    res.report["mesh"] = {
        "status": "ok",
        **m.summary(),
        "t": job.t,
        "det_error": float(np.max(np.abs(det - 1))),
        "hyperboloid_error": float(np.max(np.abs(ff.minkowski_inner(f, f) + 1))),
        "normal_error": float(np.max(np.abs(ff.minkowski_inner(n0, n0) - 1))),
        "orthogonality_error": float(np.max(np.abs(ff.minkowski_inner(f0, n0)))),
    }
    if job.t == 0 and ff.classify_rho(job.payload) == "horosphere":
        # x0 + x3 is constant on a horosphere through the identity frame
        res.report["mesh"]["horosphere_height_error"] = float(np.max(np.abs(f[:, 0] + f[:, 3] - 1)))


def check_finite(obj, path="report"):
    """Raise :class:`NumericFailure` if a report holds a non-finite float."""
    if isinstance(obj, float) and not math.isfinite(obj):
        raise NumericFailure(f"non-finite value at {path}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            check_finite(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            check_finite(v, f"{path}[{i}]")


def run(job: Job, with_mesh: bool, rtol: float | None = None) -> Result:
    """Run the analysis (and optionally the mesh) for a job.

    ``rtol`` overrides both the job's own tolerance and the ODE default.
    """
    rtol = rtol if rtol is not None else job.rtol
    with tolerance(rtol) if rtol is not None else nullcontext():
        res = (_analyze_affine if job.kind == "affine" else _analyze_h3)(job)
        if with_mesh:
            (_mesh_affine if job.kind == "affine" else _mesh_h3)(job, res)
    res.report = {"tool": {"name": "afl", "version": __version__}, "job": job.to_json(), "kind": job.kind,
                  **res.report}
    if rtol is not None:
        res.report["ode_rtol"] = rtol
    check_finite(res.report)
    return res
