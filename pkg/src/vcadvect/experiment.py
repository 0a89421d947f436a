"""Run orchestration, CSV output, figure presets and convergence studies."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cases import inflow
from .config import ConfigError, RunConfig, format_value
from .diagnostics import RunMonitor, oversampled_error, discrete_error
from .semidisc import BlowUpError, Discretisation, Mesh1D
from .timestep import TimeIntegration, default_dt, integrate, max_stable_dt

COLUMNS = (
    "time", "total_error", "eps1_error", "oversampled_error", "energy", "BTs", "Int_d",
    "Theta2", "eta", "eta_running_mean", "sufficiency_flag",
)
PAPER_STEPS = 200_000
DESK_STEPS = 40_000
DEFAULT_DISSIPATION = 1.0


@dataclass
class RunResult:
    config: RunConfig
    rows: list = field(default_factory=list)
    aborted_at: float | None = None
    notes: tuple = ()
    path: Path | None = None

    @property
    def aborted(self) -> bool:
        return self.aborted_at is not None

    def column(self, name: str) -> np.ndarray:
        return np.array([np.nan if r.get(name) is None else r[name] for r in self.rows], dtype=float)


def build_discretisation(cfg: RunConfig):
    case = cfg.test_case()
    mesh = Mesh1D.uniform(case.x_L, case.x_R, cfg.K)
    disc = Discretisation.build(mesh, cfg.scheme(), case.a, case.a_prime, lambda t: inflow(case, t))
    return case, disc


def a_prime_bounds(case, disc) -> tuple[float, float]:
    """``(min a', max |a'|)`` over the domain, from a fine grid plus the nodes."""
    x = np.concatenate((np.linspace(case.x_L, case.x_R, 4001), disc.physical_nodes.ravel()))
    d = np.broadcast_to(np.asarray(case.a_prime(x), dtype=float), x.shape)
    return float(d.min()), float(np.abs(d).max())


def max_speed(case, disc) -> float:
    x = np.concatenate((np.linspace(case.x_L, case.x_R, 4001), disc.physical_nodes.ravel()))
    return float(np.max(np.abs(np.broadcast_to(case.a(x), x.shape))))


def cfl_steps(cfg: RunConfig, case, disc) -> int:
    if cfg.basis == "fd":
        h, degree = float(np.min(disc.mesh.dx)) / (cfg.fd_nodes - 1), 0
    else:
        h, degree = float(np.min(disc.mesh.dx)), cfg.N
    dt = default_dt(h, max_speed(case, disc), degree, cfg.cfl)
    return max(1, math.ceil(cfg.t_final / dt - 1e-9))


def stable_steps(cfg: RunConfig) -> int:
    """Fewest uniform steps to ``t_final`` inside the Runge-Kutta stability region."""
    _, disc = build_discretisation(cfg)
    A, _ = disc.linear_operator()
    dt = max_stable_dt(np.linalg.eigvals(A))
    return max(1, math.ceil(cfg.t_final / dt))


def schedule_for(cfg: RunConfig, case, disc) -> TimeIntegration:
    steps = cfg.steps if cfg.steps is not None else cfl_steps(cfg, case, disc)
    return TimeIntegration.with_samples(cfg.t_final, steps, cfg.samples)


def execute(cfg: RunConfig, notes=(), write: bool = True) -> RunResult:
    """Run one configuration; a blow-up truncates the record instead of raising."""
    case, disc = build_discretisation(cfg)
    schedule = schedule_for(cfg, case, disc)
    monitor = RunMonitor(disc, case.exact, a_prime_bounds(case, disc), cfg.diagnostics)
    u0 = np.asarray(case.u0(disc.physical_nodes), dtype=float).ravel()
    result = RunResult(cfg, notes=tuple(notes))
    try:
        integrate(disc.fast_rhs(), u0, schedule, monitor)
    except BlowUpError as exc:
        result.aborted_at = exc.t
    result.rows = list(monitor.rows())
    if write and cfg.output is not None:
        result.path = write_csv(result, cfg.output)
    return result


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return f"{float(value):.17g}"


def format_csv(result: RunResult) -> str:
    lines = [f"# vcadvect {__version__}"]
    lines += [f"# config: {k}={v}" for k, v in result.config.items()]
    lines += [f"# note: {n}" for n in result.notes]
    lines.append(",".join(COLUMNS))
    for row in result.rows:
        lines.append(",".join(_cell(row.get(c)) for c in COLUMNS))
    if result.aborted:
        lines.append(f"# ABORTED t={result.aborted_at:.17g}")
    return "\n".join(lines) + "\n"


def write_csv(result: RunResult, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(result))
    return path


def read_csv(path) -> dict:
    """Parse an output file into ``{"columns", "rows", "aborted_at", "meta"}``."""
    meta, rows, aborted, columns = [], [], None, None
    for line in Path(path).read_text().splitlines():
        if line.startswith("# ABORTED t="):
            aborted = float(line.split("=", 1)[1])
        elif line.startswith("#"):
            meta.append(line)
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([_parse_cell(c) for c in line.split(",")])
    return dict(columns=columns, rows=rows, aborted_at=aborted, meta=meta)


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    return float(text)


# ---------------------------------------------------------------------------
# presets

_FIG1_COMBOS = (
    ("split", "split_central"),
    ("split", "split_upwind"),
    ("unsplit", "unsplit_central"),
    ("unsplit", "unsplit_upwind"),
)
_SPLIT_COMBOS = (("split", "split_central"), ("split", "split_upwind"))
# in the Gauss-node flux comparison, "true" marks split numerical fluxes
_FIG2_FLUXES = (
    ("split_central", "central_true"),
    ("split_upwind", "upwind_true"),
    ("unsplit_central", "central_false"),
    ("unsplit_upwind", "upwind_false"),
)


@dataclass(frozen=True)
class Curve:
    name: str
    config: RunConfig


def _grid(case, variant, t_final, K, Ns, combos, bases=("gl", "gll")):
    out = []
    for N in Ns:
        for basis in bases:
            for form, flux in combos:
                name = f"N{N}_{basis}_{form}_{flux}"
                cfg = RunConfig(case=case, variant=variant, basis=basis, N=N, K=K, flux=flux,
                                form=form, t_final=t_final)
                out.append(Curve(name, cfg))
    return out


def _fig2():
    out = []
    for N in (3, 4):
        for flux, label in _FIG2_FLUXES:
            cfg = RunConfig(case="a_x", basis="gl", N=N, K=40, flux=flux, form="split", t_final=20.0)
            out.append(Curve(f"N{N}_gl_{label}", cfg))
    return out


def _fd_cos():
    base = RunConfig(case="a_cos", basis="fd", N=3, K=1, flux="split_central", form="split",
                     t_final=100.0, fd_order=4, fd_nodes=100)
    return [
        Curve("fd4_split_plain", base),
        Curve("fd4_split_dissipation", base.replace(dissipation=DEFAULT_DISSIPATION)),
    ]


PRESETS = {
    "fig1": lambda: _grid("a_x", "default", 20.0, 40, (3, 4), _FIG1_COMBOS),
    "fig2": _fig2,
    "fig3": lambda: _grid("a_x2", "default", 200.0, 40, (3,), _FIG1_COMBOS),
    "fig4": lambda: _grid("a_x2", "default", 800.0, 40, (3,), _FIG1_COMBOS),
    "fig5": lambda: _grid("a_x2", "negative", 9.9, 40, (3,), _SPLIT_COMBOS),
    "fig6": lambda: _grid("a_x2", "negative_exp", 9.9, 40, (3,), _SPLIT_COMBOS),
    "fig7": lambda: _grid("a_1mx2", "default", 20.0, 40, (3,), _SPLIT_COMBOS),
    "fig8": lambda: _grid("a_cos", "default", 100.0, 30, (3,), _SPLIT_COMBOS),
    "fd_cos": _fd_cos,
}


def preset_curves(name: str, paper_scale: bool = False) -> list[tuple[Curve, tuple]]:
    """Curves of a preset with their step counts fixed, plus metadata notes."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}", "preset")
    target = PAPER_STEPS if paper_scale else DESK_STEPS
    out = []
    for curve in PRESETS[name]():
        needed = stable_steps(curve.config)
        steps = max(target, needed)
        notes = (
            f"preset={name} curve={curve.name}",
            f"steps paper={PAPER_STEPS} target={target} stability_minimum={needed} used={steps}",
        )
        if curve.config.dissipation is not None:
            notes += (f"dissipation strength={curve.config.dissipation:.17g} (times h^(2p-1))",)
        out.append((Curve(curve.name, curve.config.replace(steps=steps)), notes))
    return out


def _run_curve(args):
    cfg, notes = args
    res = execute(cfg, notes)
    return res.aborted_at, res.rows


def run_preset(name: str, outdir, paper_scale: bool = False, jobs: int = 1, svg: bool = True):
    """Run every curve of a preset; returns ``(manifest_path, results)``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    curves = preset_curves(name, paper_scale)
    tasks = []
    for curve, notes in curves:
        cfg = curve.config.replace(output=str(outdir / f"{name}_{curve.name}.csv"))
        tasks.append((cfg, notes))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_curve, tasks))
    else:
        outcomes = [_run_curve(t) for t in tasks]
    results = []
    lines = ["curve,file,status"]
    for (curve, _), (cfg, notes), (aborted, rows) in zip(curves, tasks, outcomes):
        res = RunResult(cfg, rows, aborted, notes, Path(cfg.output))
        results.append((curve.name, res))
        status = "ok" if aborted is None else f"aborted t={aborted:.17g}"
        lines.append(f"{curve.name},{Path(cfg.output).name},{status}")
    manifest = outdir / f"{name}_manifest.csv"
    manifest.write_text("\n".join(lines) + "\n")
    if svg:
        from .plot import svg_line_plot

        series = [(n, r.column("time"), r.column("total_error")) for n, r in results]
        svg_line_plot(series, outdir / f"{name}.svg", title=name)
    return manifest, results


# ---------------------------------------------------------------------------
# convergence


@dataclass(frozen=True)
class ConvergenceRow:
    K: int
    error: float
    order: float | None  # against the previous (coarser) row


def convergence_study(base: RunConfig, K_list, t_eval: float) -> list[ConvergenceRow]:
    """Error at ``t_eval`` for every ``K`` with observed orders between successive pairs.

    Spectral bases report the oversampled L2 error, the FD basis the discrete norm.
    """
    K_list = [int(k) for k in K_list]
    if len(K_list) < 2:
        raise ConfigError("a convergence study needs at least two K values", "K")
    if any(b <= a for a, b in zip(K_list, K_list[1:])):
        raise ConfigError("K values must be strictly increasing", "K")
    rows: list[ConvergenceRow] = []
    for K in K_list:
        cfg = base.replace(K=K, t_final=float(t_eval), samples=2, diagnostics=False, output=None)
        case, disc = build_discretisation(cfg)
        schedule = schedule_for(cfg, case, disc)
        u0 = np.asarray(case.u0(disc.physical_nodes), dtype=float).ravel()
        u = integrate(disc.fast_rhs(), u0, schedule).reshape(disc.shape)
        if cfg.basis == "fd":
            err = discrete_error(u, case.exact, disc.mesh, disc.ops, cfg.t_final)[0]
        else:
            err = oversampled_error(u, case.exact, disc.mesh, disc.ops, cfg.t_final)
        order = None
        if rows:
            prev = rows[-1]
            order = math.log(prev.error / err) / math.log(K / prev.K)
        rows.append(ConvergenceRow(K, float(err), order))
    return rows


def format_convergence(rows) -> str:
    lines = ["K,error,observed_order"]
    for r in rows:
        lines.append(f"{r.K},{r.error:.17g},{'' if r.order is None else format_value(r.order)}")
    return "\n".join(lines) + "\n"
