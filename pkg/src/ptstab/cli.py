"""Command-line front end: presets, sweeps, boundary meshes, threshold reports.

Three subcommands cover everything the library computes at desk scale:

* ``eigensweep``  one parameter axis, eigenvalues plus classification per row
* ``boundary``    two grid axes, critical values of the third coordinate
* ``thresholds``  named closed-form scalars with oracle-agreement residuals

Every figure-of-record parameter set is a named preset (data, not code),
so a reproduction run is a single flag.  Output is deterministic: floats
are printed with 17 significant digits, rows keep grid order, and JSON
keys follow construction order, so identical configurations yield
byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from . import __version__, gyro, nls, potential
from .core import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_EPS,
    Mat2,
    PreconditionError,
    RootFindingError,
    Stability,
    SystemSpec,
    char_poly,
    char_poly_matrix,
    order_by_continuity,
    roots,
)
from .routh_hurwitz import DegenerateConfigurationError, delta_cr_squared, delta_pt, hurwitz

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    """Bad command line or preset combination; maps to exit code 2."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridAxis:
    name: str
    lo: float
    hi: float
    count: int

    def values(self) -> list[float]:
        if self.count == 1:
            return [self.lo]
        step = (self.hi - self.lo) / (self.count - 1)
        return [self.lo + step * i for i in range(self.count)]


@dataclass
class RunConfig:
    command: str
    family: str
    params: dict[str, float] = field(default_factory=dict)
    grids: list[GridAxis] = field(default_factory=list)
    out: str = ""
    fmt: str = "csv"
    tols: dict[str, float] = field(default_factory=dict)
    preset: str | None = None

    @property
    def eps(self) -> float:
        return self.tols.get("eps", DEFAULT_EPS)

    @property
    def cluster(self) -> float:
        return self.tols.get("cluster", DEFAULT_CLUSTER_TOL)

    @property
    def bisect(self) -> float:
        return self.tols.get("bisect", 1e-8)


# parameter names accepted per (command, family); grids must use a subset
_FAMILIES: dict[tuple[str, str], dict[str, Any]] = {
    ("eigensweep", "potential"): {"params": {"k1", "k2", "kappa", "X", "Y"}, "axes": {"k1", "k2", "kappa", "X", "Y"}},
    ("eigensweep", "gyro"): {
        "params": {"k1", "kappa", "delta1", "delta2", "Omega", "balanced"},
        "axes": {"k1", "kappa", "delta1", "delta2", "Omega"},
    },
    ("eigensweep", "nls"): {
        "params": {"alpha", "gamma", "a", "c", "k", "sigma", "u0"},
        "axes": {"alpha", "gamma", "a", "c", "k", "sigma", "u0"},
    },
    ("boundary", "potential-k1"): {"params": {"k2", "kappa", "include_pt_segment"}, "axes": {"X", "Y"}},
    ("boundary", "gyro-Y"): {"params": {"k1", "Omega"}, "axes": {"kappa", "X", "Y"}},
    ("boundary", "nls-amplitude"): {"params": {"alpha", "gamma", "sigma", "k"}, "axes": {"a", "c"}},
    ("thresholds", "paper-defaults"): {"params": {"k2", "kappa", "slope", "alpha", "gamma", "sigma"}, "axes": set()},
    ("thresholds", "delta-pt"): {"params": {"d11", "d12", "d22", "k11", "k12", "k22"}, "axes": set()},
    ("thresholds", "delta-cr"): {"params": {"d11", "d12", "d22", "k11", "k12", "k22"}, "axes": set()},
    ("thresholds", "fig5-slopes"): {"params": {"alpha", "gamma", "sigma", "k", "level_offset"}, "axes": set()},
}

# figure-of-record parameter sets; presets are data so reproduction runs are auditable
PRESETS: dict[str, dict[str, Any]] = {
    "fig1a": {
        "command": "eigensweep",
        "family": "potential",
        "params": {"k1": 1.0, "k2": 1.0, "kappa": 0.4, "X": 0.0},
        "grids": [GridAxis("Y", -4.0, 4.0, 801)],
    },
    "fig1b": {
        "command": "eigensweep",
        "family": "potential",
        "params": {"k1": 1.2, "k2": 1.0, "kappa": 0.4, "X": 0.2},
        "grids": [GridAxis("Y", -4.0, 4.0, 801)],
    },
    "fig3a": {
        "command": "eigensweep",
        "family": "gyro",
        "params": {"k1": 1.0, "kappa": 0.0, "Omega": 0.3, "delta2": 0.0, "balanced": 1.0},
        "grids": [GridAxis("delta1", 0.0, 1.0, 401)],
    },
    "fig3c": {
        "command": "eigensweep",
        "family": "gyro",
        "params": {"k1": 1.0, "kappa": 0.1, "Omega": 0.3, "delta2": -0.3, "balanced": 0.0},
        "grids": [GridAxis("delta1", 0.0, 1.0, 401)],
    },
    "fig2": {
        "command": "boundary",
        "family": "potential-k1",
        "params": {"k2": 1.0, "kappa": 0.4, "include_pt_segment": 1.0},
        "grids": [GridAxis("X", 0.02, 1.0, 50), GridAxis("Y", -4.0, 4.0, 161)],
    },
    "fig4": {
        "command": "boundary",
        "family": "gyro-Y",
        "params": {"k1": 1.0, "Omega": 0.3},
        "grids": [GridAxis("kappa", -0.2, 0.2, 17), GridAxis("X", 0.0, 0.6, 13), GridAxis("Y", -4.5, 4.5, 64)],
    },
    "fig5a": {
        "command": "boundary",
        "family": "nls-amplitude",
        "params": {"alpha": 1.0, "gamma": 1.0, "sigma": 1.0, "k": 1.0},
        "grids": [GridAxis("a", 0.0, 0.3, 31), GridAxis("c", 0.0, 3.0, 31)],
    },
    "fig5b": {
        "command": "boundary",
        "family": "nls-amplitude",
        "params": {"alpha": 1.0, "gamma": 1.0, "sigma": 1.0, "k": 1.0},
        "grids": [GridAxis("a", 0.0, 0.1, 2), GridAxis("c", 0.0, 3.0, 61)],
    },
    "paper-defaults": {
        "command": "thresholds",
        "family": "paper-defaults",
        "params": {"k2": 1.0, "kappa": 0.4, "slope": 1.0, "alpha": 1.0, "gamma": 1.0, "sigma": 1.0},
        "grids": [],
    },
    "delta-pt": {
        "command": "thresholds",
        "family": "delta-pt",
        "params": {"d11": 1.0, "d12": 0.0, "d22": -1.0, "k11": 1.0, "k12": 0.4, "k22": 1.0},
        "grids": [],
    },
    "delta-cr": {
        "command": "thresholds",
        "family": "delta-cr",
        "params": {"d11": 2.0, "d12": 0.0, "d22": -1.0, "k11": 1.0, "k12": 0.4, "k22": 1.0},
        "grids": [],
    },
    "fig5-slopes": {
        "command": "thresholds",
        "family": "fig5-slopes",
        "params": {"alpha": 1.0, "gamma": 1.0, "sigma": 1.0, "k": 1.0, "level_offset": 0.05},
        "grids": [],
    },
}

# alias presets: same data as their sibling sweep, kept so every figure panel
# has a named configuration
PRESETS["fig3b"] = PRESETS["fig3a"]
PRESETS["fig3d"] = PRESETS["fig3c"]


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"refusing to serialise non-finite value {x!r}")
    return format(x, ".17g")


def _json_dumps(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  "{key}": {_json_dumps(value, indent + 1).lstrip()}' for key, value in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_json_dumps(value, indent + 1).lstrip()}" for value in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, int):
        return str(obj)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    raise TypeError(f"cannot serialise {type(obj)!r}")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return _fmt(value)
    return str(value)


def _write_rows(cfg: RunConfig, columns: Sequence[str], rows: Sequence[dict[str, Any]]) -> None:
    if cfg.fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_cell(row.get(col)) for col in columns) for row in rows)
        text = "\n".join(lines) + "\n"
    else:
        doc = {"meta": _meta(cfg), "data": list(rows)}
        text = _json_dumps(doc) + "\n"
    with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _meta(cfg: RunConfig) -> dict[str, Any]:
    return {
        "tool": "ptstab",
        "version": __version__,
        "command": cfg.command,
        "family": cfg.family,
        "preset": cfg.preset,
        "params": {key: cfg.params[key] for key in sorted(cfg.params)},
        "grids": [{"axis": g.name, "lo": g.lo, "hi": g.hi, "count": g.count} for g in cfg.grids],
        "tolerances": {key: cfg.tols[key] for key in sorted(cfg.tols)},
        "format": cfg.fmt,
    }


# ---------------------------------------------------------------------------
# eigensweep
# ---------------------------------------------------------------------------


def _potential_quartic(params: dict[str, float]):
    p = potential.PotentialParams(params["k1"], params["k2"], params["kappa"], params["X"], params["Y"])
    return char_poly(potential.to_system(p))


def _gyro_quartic(params: dict[str, float]):
    delta2 = -params["delta1"] if params.get("balanced", 0.0) else params["delta2"]
    g = gyro.GyroParams(params["k1"], params["kappa"], params["delta1"], delta2, params["Omega"])
    return char_poly(gyro.to_system(g))


def _nls_quartic(params: dict[str, float]):
    p = nls.NLSParams(
        params["alpha"], params["gamma"], params["a"], params["c"], params["k"], params["sigma"],
        (params["u0"], 0.0),
    )
    return char_poly_matrix(nls.assemble_linearization(p))


_SWEEP_BUILDERS: dict[str, Callable[[dict[str, float]], Any]] = {
    "potential": _potential_quartic,
    "gyro": _gyro_quartic,
    "nls": _nls_quartic,
}

_SWEEP_DEFAULTS: dict[str, dict[str, float]] = {
    "potential": {"k1": 1.0, "k2": 1.0, "kappa": 0.4, "X": 0.0, "Y": 0.0},
    "gyro": {"k1": 1.0, "kappa": 0.0, "delta1": 0.0, "delta2": 0.0, "Omega": 0.3, "balanced": 0.0},
    "nls": {"alpha": 1.0, "gamma": 1.0, "a": 0.0, "c": 0.0, "k": 1.0, "sigma": 1.0, "u0": 0.5},
}


def run_eigensweep(cfg: RunConfig) -> int:
    """Write the sweep table for cfg; returns the number of failed rows."""
    if len(cfg.grids) != 1:
        raise ConfigError("eigensweep needs exactly one swept axis (--grid axis:lo:hi:count)")
    axis = cfg.grids[0]
    build = _SWEEP_BUILDERS[cfg.family]
    params = dict(_SWEEP_DEFAULTS[cfg.family])
    params.update(cfg.params)
    columns = [
        axis.name,
        *(f"{part}_lambda{i}" for i in range(1, 5) for part in ("re", "im")),
        "classification",
        "status",
    ]
    rows: list[dict[str, Any]] = []
    failed = 0
    reference: tuple[complex, ...] | None = None
    for value in axis.values():
        params[axis.name] = value
        row: dict[str, Any] = {axis.name: value}
        try:
            sp = roots(build(params), eps=cfg.eps, cluster_tol=cfg.cluster)
        except (RootFindingError, PreconditionError) as exc:
            failed += 1
            for i in range(1, 5):
                row[f"re_lambda{i}"] = None
                row[f"im_lambda{i}"] = None
            row["classification"] = None
            row["status"] = f"failed: {exc}"
            rows.append(row)
            continue
        vals = sp.roots if reference is None else order_by_continuity(reference, sp.roots)
        reference = vals
        for i, z in enumerate(vals, start=1):
            row[f"re_lambda{i}"] = z.real
            row[f"im_lambda{i}"] = z.imag
        row["classification"] = sp.classification.value
        row["status"] = "ok"
        rows.append(row)
    _write_rows(cfg, columns, rows)
    return failed


# ---------------------------------------------------------------------------
# boundary meshes
# ---------------------------------------------------------------------------


def _grid_by_name(cfg: RunConfig, name: str) -> GridAxis:
    for g in cfg.grids:
        if g.name == name:
            return g
    raise ConfigError(f"boundary family {cfg.family!r} needs a --grid for axis {name!r}")


def _boundary_potential(cfg: RunConfig) -> tuple[list[str], list[dict[str, Any]], int]:
    k2 = cfg.params.get("k2", 1.0)
    kappa = cfg.params.get("kappa", 0.4)
    xs = _grid_by_name(cfg, "X").values()
    ys = _grid_by_name(cfg, "Y").values()
    columns = ["X", "Y", "k1_critical", "branch", "stable_side", "status"]
    rows: list[dict[str, Any]] = []
    failed = 0
    for x in xs:
        for y in ys:
            try:
                samples = potential.boundary_k1(x, y, k2, kappa)
            except PreconditionError as exc:
                failed += 1
                rows.append({"X": x, "Y": y, "k1_critical": None, "branch": None,
                             "stable_side": None, "status": f"failed: {exc}"})
                continue
            if not samples:
                rows.append({"X": x, "Y": y, "k1_critical": None, "branch": None,
                             "stable_side": None, "status": "empty"})
                continue
            for s in samples:
                rows.append({"X": x, "Y": y, "k1_critical": s.value, "branch": s.branch,
                             "stable_side": s.stable_side, "status": "ok"})
    if cfg.params.get("include_pt_segment", 0.0):
        # self-intersection trace: balanced marginal interval at X = 0, k1 = k2
        ep = potential.ep_interval(k2, kappa)
        for j in range(33):
            y = -ep.Y_minus + 2.0 * ep.Y_minus * j / 32.0
            rows.append({"X": 0.0, "Y": y, "k1_critical": k2, "branch": 2,
                         "stable_side": "marginal", "status": "ok"})
    return columns, rows, failed


def _boundary_gyro(cfg: RunConfig) -> tuple[list[str], list[dict[str, Any]], int]:
    k1 = cfg.params.get("k1", 1.0)
    omega = cfg.params.get("Omega", 0.3)
    kappas = _grid_by_name(cfg, "kappa").values()
    xs = _grid_by_name(cfg, "X").values()
    yaxis = _grid_by_name(cfg, "Y")
    columns = ["kappa", "X", "Y_critical", "branch", "stable_side", "status"]
    samples = gyro.boundary_surface(
        k1, omega, kappas, xs, (yaxis.lo, yaxis.hi),
        scan_points=yaxis.count, bisect_tol=cfg.bisect, eps=cfg.eps,
    )
    by_column: dict[tuple[float, float], list] = {}
    for s in samples:
        by_column.setdefault((s.coord("kappa"), s.coord("X")), []).append(s)
    rows: list[dict[str, Any]] = []
    for kappa in kappas:
        for x in xs:
            found = by_column.get((kappa, x), [])
            if not found:
                rows.append({"kappa": kappa, "X": x, "Y_critical": None, "branch": None,
                             "stable_side": None, "status": "empty"})
                continue
            for s in found:
                rows.append({"kappa": kappa, "X": x, "Y_critical": s.value, "branch": s.branch,
                             "stable_side": s.stable_side, "status": "ok"})
    return columns, rows, 0


def _boundary_nls(cfg: RunConfig) -> tuple[list[str], list[dict[str, Any]], int]:
    template = nls.NLSParams(
        cfg.params.get("alpha", 1.0), cfg.params.get("gamma", 1.0), 0.0, 0.0,
        cfg.params.get("k", 1.0), cfg.params.get("sigma", 1.0), (0.5, 0.0),
    )
    a_values = _grid_by_name(cfg, "a").values()
    c_values = _grid_by_name(cfg, "c").values()
    columns = ["a", "c", "u0_critical", "branch", "stable_side", "status"]
    rows: list[dict[str, Any]] = []
    failed = 0
    curve_samples: dict[int, list[tuple[float, float, float]]] = {}
    for a in a_values:
        for c in c_values:
            if a == 0.0 and c == 0.0:
                rows.append({"a": a, "c": c, "u0_critical": None, "branch": None,
                             "stable_side": None, "status": "empty"})
                continue
            try:
                found = nls.dissipative_threshold(template, a, c)
            except nls.ThresholdMismatchError as exc:
                failed += 1
                rows.append({"a": a, "c": c, "u0_critical": None, "branch": None,
                             "stable_side": None, "status": f"failed: {exc}"})
                continue
            if not found:
                rows.append({"a": a, "c": c, "u0_critical": None, "branch": None,
                             "stable_side": None, "status": "empty"})
                continue
            for r in found:
                rows.append({"a": a, "c": c, "u0_critical": r.u0_norm, "branch": r.branch,
                             "stable_side": r.stable_side, "status": "ok"})
                curve_samples.setdefault(r.branch, []).append((a, c, r.u0_norm))
    # revalidate every emitted sample against the threshold polynomial
    for branch, samples in sorted(curve_samples.items()):
        nls.ThresholdCurve(template.alpha, template.gamma, template.sigma, template.k,
                           tuple(samples), branch)
    return columns, rows, failed


def run_boundary(cfg: RunConfig) -> int:
    """Write the boundary mesh for cfg; returns the number of failed cells."""
    if cfg.family == "potential-k1":
        columns, rows, failed = _boundary_potential(cfg)
    elif cfg.family == "gyro-Y":
        columns, rows, failed = _boundary_gyro(cfg)
    else:
        columns, rows, failed = _boundary_nls(cfg)
    _write_rows(cfg, columns, rows)
    return failed


# ---------------------------------------------------------------------------
# threshold reports
# ---------------------------------------------------------------------------


def _bisect_predicate(predicate: Callable[[float], bool], lo: float, hi: float, tol: float = 1e-10) -> float:
    """Smallest flip of predicate on [lo, hi]; predicate(lo) must hold."""
    if not predicate(lo):
        raise PreconditionError("bisection bracket does not start on the true side")
    n = 256
    prev = lo
    flip_hi = None
    for i in range(1, n + 1):
        x = lo + (hi - lo) * i / n
        if not predicate(x):
            flip_hi = x
            break
        prev = x
    if flip_hi is None:
        raise PreconditionError(f"predicate never flips on [{lo:g}, {hi:g}]")
    lo2, hi2 = prev, flip_hi
    while hi2 - lo2 > tol:
        mid = 0.5 * (lo2 + hi2)
        if predicate(mid):
            lo2 = mid
        else:
            hi2 = mid
    return 0.5 * (lo2 + hi2)


def _threshold_rows(cfg: RunConfig) -> list[dict[str, Any]]:
    p = cfg.params
    rows: list[dict[str, Any]] = []

    def add(name: str, value: float, tol: float, residual: float, oracle: str) -> None:
        rows.append({"name": name, "value": value, "tolerance": tol, "residual": residual, "oracle": oracle})

    if cfg.family == "paper-defaults":
        k2, kappa, slope = p["k2"], p["kappa"], p["slope"]
        ep = potential.ep_interval(k2, kappa)

        def marginal(y: float) -> bool:
            sys = potential.to_system(potential.PotentialParams(k2, k2, kappa, 0.0, y))
            return roots(char_poly(sys), eps=cfg.eps).classification is Stability.MARGINALLY_STABLE

        y_onset = _bisect_predicate(marginal, 0.0, ep.Y_plus)
        add("Y_PT_minus", ep.Y_minus, 1e-3, abs(ep.Y_minus - y_onset), "marginal-onset bisection")
        plus = potential.ray_limit(slope, +1, k2, kappa)
        add("Y_plus_ray", plus.value, 5e-3, plus.error_estimate, "extrapolation error estimate")
        minus = potential.ray_limit(slope, -1, k2, kappa)
        add("Y_minus_ray", minus.value, 5e-3, minus.error_estimate, "extrapolation error estimate")
        tmpl = nls.NLSParams(p["alpha"], p["gamma"], 0.0, 0.0, 1.0, p["sigma"], (0.0, 0.0))
        ui = nls.ideal_threshold(tmpl)

        def no_growth(u: float) -> bool:
            vals = nls.ideal_spectrum(tmpl.with_amplitude(u))
            return max(z.real for z in vals) <= 0.0

        u_onset = _bisect_predicate(no_growth, 0.0, 2.0 * ui, tol=1e-13)
        add("u0_ideal", ui, 1e-12, abs(ui - u_onset), "growth-onset bisection")
        return rows

    if cfg.family in ("delta-pt", "delta-cr"):
        dtilde = Mat2.symmetric(p["d11"], p["d12"], p["d22"])
        kmat = Mat2.symmetric(p["k11"], p["k12"], p["k22"])
        if cfg.family == "delta-pt":
            value = delta_pt(dtilde, kmat)
            balanced = abs((kmat @ dtilde).trace()) <= 1e-10 * (1.0 + kmat.frobenius())
            if balanced:
                # on the balanced locus the value bounds the marginal interval

                def marginal_d(delta: float) -> bool:
                    q = char_poly(SystemSpec(dtilde.scaled(delta), kmat))
                    return roots(q, eps=cfg.eps).classification is Stability.MARGINALLY_STABLE

                onset = _bisect_predicate(marginal_d, 0.0, max(2.0 * value, 1.0))
                add("delta_pt", value, 1e-6, abs(value - onset), "marginal-onset bisection")
            else:
                # tr(K Dtilde) != 0: no marginal interval exists, the value is the bare formula
                add("delta_pt", value, 1e-6, 0.0, "arithmetic identity (unbalanced input)")
            return rows
        value2 = delta_cr_squared(dtilde, kmat)

        def stable_d(delta: float) -> bool:
            return hurwitz(char_poly(SystemSpec(dtilde.scaled(delta), kmat))).stable

        if value2 > 0.0:
            onset = _bisect_predicate(stable_d, 1e-9, max(3.0 * math.sqrt(value2), 1.0))
            add("delta_cr_squared", value2, 1e-6, abs(value2 - onset * onset), "hurwitz-onset bisection")
            add("delta_cr", math.sqrt(value2), 1e-6, abs(math.sqrt(value2) - onset), "hurwitz-onset bisection")
        else:
            residual = 0.0 if all(stable_d(d) for d in (0.1, 1.0, 10.0, 100.0)) else math.inf
            add("delta_cr_squared", value2, 1e-6, residual, "hurwitz sample check (negative threshold)")
        return rows

    # fig5-slopes: tangent data for constant-amplitude cross-sections in the loss plane
    tmpl = nls.NLSParams(p["alpha"], p["gamma"], 0.0, 0.0, p["k"], p["sigma"], (0.0, 0.0))
    ui = nls.ideal_threshold(tmpl)
    level = ui - p["level_offset"]
    slopes = nls.boundary_linear_slope(tmpl.with_amplitude(level))
    a_probe = 1e-4
    cs = nls.nonlinear_loss_threshold(tmpl, a_probe, level)
    res_plus = min((abs(c / a_probe - slopes[0]) for c in cs), default=math.inf)
    add("u0_ideal", ui, 1e-12, 0.0, "closed form")
    add("level_below", level, 1e-12, 0.0, "closed form")
    add("level_above", ui + p["level_offset"], 1e-12, 0.0, "closed form")
    add("slope_plus", slopes[0], 1e-2, res_plus, "finite-loss threshold ratio at a = 1e-5")
    add("slope_minus", slopes[1], 1e-2, 0.0, "closed form")
    return rows


def run_thresholds(cfg: RunConfig) -> int:
    """Write the scalar report for cfg; returns the number of out-of-tolerance scalars."""
    rows = _threshold_rows(cfg)
    doc = {"meta": _meta(cfg), "data": rows}
    with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_json_dumps(doc) + "\n")
    return sum(1 for row in rows if not row["residual"] <= row["tolerance"])


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _parse_kv(text: str, flag: str) -> tuple[str, float]:
    if "=" not in text:
        raise ConfigError(f"{flag} expects name=value, got {text!r}")
    name, _, raw = text.partition("=")
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{flag} {name!r}: {raw!r} is not a number") from exc
    if not math.isfinite(value):
        raise ConfigError(f"{flag} {name!r} must be finite")
    return name.strip(), value


def _parse_grid(text: str) -> GridAxis:
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"--grid expects axis:lo:hi:count, got {text!r}")
    name = parts[0].strip()
    try:
        lo, hi = float(parts[1]), float(parts[2])
        count = int(parts[3])
    except ValueError as exc:
        raise ConfigError(f"--grid {text!r}: bad number") from exc
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError(f"--grid {name!r} bounds must be finite")
    if count < 1:
        raise ConfigError(f"--grid {name!r} count must be >= 1")
    if count > 1 and not lo < hi:
        raise ConfigError(f"--grid {name!r} needs lo < hi")
    return GridAxis(name, lo, hi, count)


_TOL_KEYS = {"eps", "cluster", "bisect"}


def build_config(ns: argparse.Namespace) -> RunConfig:
    preset_name = ns.preset
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError(f"unknown preset {preset_name!r}; available: {', '.join(sorted(PRESETS))}")
        preset = PRESETS[preset_name]
        if preset["command"] != ns.command:
            raise ConfigError(f"preset {preset_name!r} belongs to the {preset['command']!r} subcommand")
        family = preset["family"]
        params = dict(preset["params"])
        grids = {g.name: g for g in preset["grids"]}
    else:
        if ns.family is None:
            raise ConfigError("either --preset or --family is required")
        family = ns.family
        params = {}
        grids = {}
    key = (ns.command, family)
    if key not in _FAMILIES:
        known = sorted(fam for cmd, fam in _FAMILIES if cmd == ns.command)
        raise ConfigError(f"unknown family {family!r} for {ns.command}; expected one of: {', '.join(known)}")
    space = _FAMILIES[key]
    for item in ns.set or []:
        name, value = _parse_kv(item, "--set")
        if name not in space["params"]:
            raise ConfigError(f"unknown parameter {name!r} for {ns.command}/{family}")
        params[name] = value
    for item in ns.grid or []:
        axis = _parse_grid(item)
        if axis.name not in space["axes"]:
            raise ConfigError(f"axis {axis.name!r} cannot be swept for {ns.command}/{family}")
        grids[axis.name] = axis
    tols = {}
    for item in ns.tol or []:
        name, value = _parse_kv(item, "--tol")
        if name not in _TOL_KEYS:
            raise ConfigError(f"unknown tolerance {name!r}; expected one of: {', '.join(sorted(_TOL_KEYS))}")
        if value <= 0.0:
            raise ConfigError(f"tolerance {name!r} must be positive")
        tols[name] = value
    fmt = ns.format or ("json" if ns.command == "thresholds" else "csv")
    if ns.command == "thresholds" and fmt != "json":
        raise ConfigError("thresholds reports are JSON only")
    out = ns.out or f"{preset_name or ns.command}.{fmt}"
    cfg = RunConfig(ns.command, family, params, list(grids.values()), out, fmt, tols, preset_name)
    if ns.command == "eigensweep" and len(cfg.grids) != 1:
        raise ConfigError("eigensweep needs exactly one --grid axis")
    return cfg


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptstab",
        description="Stability sweeps, boundary meshes and threshold reports "
        "for two-degree-of-freedom systems with indefinite damping.",
    )
    parser.add_argument("--version", action="version", version=f"ptstab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("eigensweep", "eigenvalues and classification along one parameter axis"),
        ("boundary", "critical-value mesh of a stability boundary over a 2-axis grid"),
        ("thresholds", "closed-form threshold scalars with oracle residuals (JSON)"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--preset", help="named parameter set (see README for the table)")
        cmd.add_argument("--family", help="system family when no preset is given")
        cmd.add_argument("--set", action="append", metavar="NAME=VALUE", help="bind or override a parameter")
        cmd.add_argument("--grid", action="append", metavar="AXIS:LO:HI:COUNT", help="grid/sweep axis")
        cmd.add_argument("--format", choices=("csv", "json"), help="output format (default csv; thresholds: json)")
        cmd.add_argument("--out", help="output path (default <preset-or-command>.<format>)")
        cmd.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override eps/cluster/bisect")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = build_config(ns)
    except ConfigError as exc:
        print(f"ptstab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if cfg.command == "eigensweep":
            failed = run_eigensweep(cfg)
        elif cfg.command == "boundary":
            failed = run_boundary(cfg)
        else:
            failed = run_thresholds(cfg)
    except ConfigError as exc:
        print(f"ptstab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PreconditionError, RootFindingError, DegenerateConfigurationError,
            potential.ExtrapolationError, nls.ThresholdMismatchError) as exc:
        print(f"ptstab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if failed:
        print(f"ptstab: {failed} row(s) failed or out of tolerance in {cfg.out}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(cfg.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
