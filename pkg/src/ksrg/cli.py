"""Command line entry point: ``ksrg phase|sample|experiment|plot --config FILE [--key value ...]``."""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (CapacityError, ConfigParseError, InconsistentParametersError, InsufficientEventsError,
                     KSRGError, ParameterDomainError)
from .experiments import KINDS, fit_line, run_scaling_experiment
from .experiments.runs import DEFAULT_ELL_MAX, sample_graph
from .graphgen import write_edge_list
from .params import ModelParams, compute_exponents, parse_extended, validate
from .seeding import default_threads

EXIT_OK, EXIT_INVALID, EXIT_CAPACITY, EXIT_EVENTS = 0, 1, 2, 3
SUBCOMMANDS = ("phase", "sample", "experiment", "plot")

MODEL_KEYS = {"d", "tau", "alpha", "sigma", "kernel", "beta", "p", "profile", "vertices"}
RUN_KEYS = {"experiment", "n_grid", "replicates", "rho", "ell_max", "enlargement", "seed", "threads", "out",
            "k_grid", "palm"}
CSV_COLUMNS = ("n", "statistic", "value", "ci_low", "ci_high", "replicates")


@dataclass
class RunConfig:
    model: ModelParams
    experiment: str | None = None
    n_grid: list = field(default_factory=list)
    replicates: int = 1
    rho: float | None = None
    ell_max: int = DEFAULT_ELL_MAX
    enlargement: float = 3.0
    master_seed: int = 0
    threads: int = 1
    output_dir: str = "results"
    k_grid: list | None = None
    palm: str = "origin"
    raw: dict = field(default_factory=dict)

    def extras(self) -> dict:
        out = {"ell_max": self.ell_max, "enlargement": self.enlargement, "palm": self.palm}
        if self.rho is not None:
            out["rho"] = self.rho
        if self.k_grid is not None:
            out["k_grid"] = self.k_grid
        if self.experiment == "cluster_decay" and "enlargement" not in self.raw:
            out["enlargement"] = 1.0
        return out

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "experiment": self.experiment,
            "n_grid": self.n_grid,
            "replicates": self.replicates,
            "rho": self.rho,
            "ell_max": self.ell_max,
            "enlargement": self.enlargement,
            "seed": self.master_seed,
            "threads": self.threads,
            "out": self.output_dir,
            "k_grid": self.k_grid,
            "palm": self.palm,
        }


def _number(text, kind, line):
    try:
        if kind is int:
            v = float(text)
            if not v.is_integer():
                raise ValueError
            return int(v)
        return parse_extended(text)
    except ValueError:
        raise ConfigParseError(f"cannot read {text!r} as {'an integer' if kind is int else 'a number'}", line)


def _list(text, kind, line):
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ConfigParseError("empty list", line)
    return [_number(t, kind, line) for t in items]


def _with_line(exc, line):
    new = type(exc)(f"line {line}: {exc}")
    new.line = line
    return new


def parse_config(text: str, env=None) -> RunConfig:
    """Parse ``key = value`` lines ('#' starts a comment) into a validated RunConfig."""
    env = os.environ if env is None else env
    values, lines = {}, {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected 'key = value', got {raw.strip()!r}", ln)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in MODEL_KEYS | RUN_KEYS:
            raise ConfigParseError(f"unknown key {key!r}", ln)
        if not val:
            raise ConfigParseError(f"missing value for {key!r}", ln)
        values[key] = val
        lines[key] = ln

    kw = {}
    for key in ("tau", "alpha", "sigma", "beta", "p"):
        if key in values:
            kw[key] = _number(values[key], float, lines[key])
    if "d" in values:
        kw["d"] = _number(values["d"], int, lines["d"])
    for key, attr in (("kernel", "kernel"), ("profile", "profile"), ("vertices", "vertex_process")):
        if key in values:
            kw[attr] = values[key].lower()
    if "profile" not in kw:
        # the profile follows alpha unless stated
        kw["profile"] = "threshold" if math.isinf(kw.get("alpha", math.inf)) else "polynomial"

    # domain checks one key at a time, so the offending line can be named
    base = ModelParams()
    for key in ("d", "tau", "alpha", "sigma", "beta", "p", "kernel", "vertex_process"):
        if key not in kw:
            continue
        probe = {key: kw[key]}
        if key == "alpha":
            probe["profile"] = "threshold" if math.isinf(kw[key]) else "polynomial"
        try:
            validate(base.replace(**probe))
        except ParameterDomainError as exc:
            raise _with_line(exc, lines["vertices" if key == "vertex_process" else key])
    model = ModelParams(**kw)
    try:
        validate(model)
    except ParameterDomainError as exc:
        raise _with_line(exc, lines.get("profile"))
    except InconsistentParametersError as exc:
        raise _with_line(exc, lines.get("profile", lines.get("alpha")))

    cfg = RunConfig(model=model, raw=dict(values))
    if "experiment" in values:
        if values["experiment"] not in KINDS:
            raise ConfigParseError(f"unknown experiment {values['experiment']!r}; expected one of {KINDS}",
                                   lines["experiment"])
        cfg.experiment = values["experiment"]
    if "n_grid" in values:
        cfg.n_grid = _list(values["n_grid"], float, lines["n_grid"])
        if any(not (x > 0 and math.isfinite(x)) for x in cfg.n_grid):
            raise ConfigParseError("n_grid values must be positive and finite", lines["n_grid"])
        if any(b <= a for a, b in zip(cfg.n_grid, cfg.n_grid[1:])):
            raise ConfigParseError("n_grid must be strictly increasing", lines["n_grid"])
    if "replicates" in values:
        cfg.replicates = _number(values["replicates"], int, lines["replicates"])
        if cfg.replicates < 1:
            raise ConfigParseError("replicates must be >= 1", lines["replicates"])
    if "rho" in values:
        cfg.rho = _number(values["rho"], float, lines["rho"])
        if not 0 < cfg.rho < 1:
            raise ConfigParseError("rho must lie in (0, 1)", lines["rho"])
    if "ell_max" in values:
        cfg.ell_max = _number(values["ell_max"], int, lines["ell_max"])
        if cfg.ell_max < 1:
            raise ConfigParseError("ell_max must be >= 1", lines["ell_max"])
    if "enlargement" in values:
        cfg.enlargement = _number(values["enlargement"], float, lines["enlargement"])
        if not (cfg.enlargement >= 1 and math.isfinite(cfg.enlargement)):
            raise ConfigParseError("enlargement must be a finite number >= 1", lines["enlargement"])
    if "seed" in values:
        try:
            cfg.master_seed = int(values["seed"], 0)
        except ValueError:
            raise ConfigParseError(f"cannot read seed {values['seed']!r}", lines["seed"])
        if not 0 <= cfg.master_seed < 2**64:
            raise ConfigParseError("seed must be a 64-bit unsigned integer", lines["seed"])
    cfg.threads = default_threads()
    if "threads" in values and not env.get("KSRG_THREADS"):
        cfg.threads = _number(values["threads"], int, lines["threads"])
        if cfg.threads < 1:
            raise ConfigParseError("threads must be >= 1", lines["threads"])
    elif env.get("KSRG_THREADS"):
        cfg.threads = max(1, int(env["KSRG_THREADS"]))
    if "out" in values:
        cfg.output_dir = values["out"]
    if "k_grid" in values:
        cfg.k_grid = _list(values["k_grid"], int, lines["k_grid"])
    if "palm" in values:
        if values["palm"] not in ("origin", "typical"):
            raise ConfigParseError("palm must be 'origin' or 'typical'", lines["palm"])
        cfg.palm = values["palm"]
    return cfg


# ---------------------------------------------------------------- output


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def write_results_csv(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in rows:
            fh.write(",".join([_fmt(r.n), r.statistic, _fmt(r.value), _fmt(r.ci_low), _fmt(r.ci_high),
                               str(int(r.replicates))]) + "\n")


def read_results_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return [{k: (v if k == "statistic" else float(v)) for k, v in row.items()} for row in csv.DictReader(fh)]


def _versions():
    import numba
    import scipy
    return {"ksrg": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "numba": numba.__version__}


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"not JSON serialisable: {type(x)}")


def _dump(obj, path):
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
        if isinstance(v, dict):
            return {k: clean(w) for k, w in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(w) for w in v]
        return v
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(clean(obj), fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


# y / x transforms used by both the fit and the plot
PLOT_SPEC = {
    "lln": ("giant_density_std", "log", "log"),
    "lower_tail": ("lower_tail_freq", "log", "logneglog"),
    "upper_tail": ("upper_tail_freq", "log", "log"),
    "second_largest": ("second_size_median", "loglog", "log"),
    "boundary": ("downward_boundary_mean", "log", "log"),
    "edge_boundary": ("edge_boundary_mean", "log", "log"),
    "cluster_decay": ("cluster_tail", "pow", "log"),
}


def _transform(v, how, z=None):
    try:
        if how == "log":
            return math.log(v)
        if how == "loglog":
            return math.log(math.log(v))
        if how == "logneglog":
            return math.log(-math.log(v))
        if how == "pow":
            return v**z if z and z > 0 else math.log(v)
    except ValueError:
        return None
    return None


# ---------------------------------------------------------------- subcommands


def cmd_phase(cfg: RunConfig):
    print(json.dumps(compute_exponents(cfg.model).to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_sample(cfg: RunConfig):
    n = cfg.n_grid[0] if cfg.n_grid else 1000.0
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    g = sample_graph(cfg.model, n, cfg.master_seed, cfg.enlargement if "enlargement" in cfg.raw else 1.0)
    write_edge_list(g, out / "edges.txt")
    vs = g.vertices
    with open(out / "vertices.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(["id"] + [f"x{k + 1}" for k in range(vs.d)] + ["mark"]) + "\n")
        for i in range(len(vs)):
            fh.write(",".join([str(int(vs.ids[i]))] + [repr(float(c)) for c in vs.positions[i]]
                              + [repr(float(vs.marks[i]))]) + "\n")
    print(f"wrote {len(vs)} vertices and {g.n_edges} edges to {out}")
    return EXIT_OK


def _write_experiment(cfg, res, out, error=None):
    write_results_csv(res.rows, out / "results.csv")
    statistic, xt, yt = PLOT_SPEC[res.kind]
    report = compute_exponents(cfg.model)
    fit = res.fit.to_dict() if res.fit is not None else None
    _dump({"fit": fit, "predicted_slope": res.predicted_slope, "x_label": res.x_label, "y_label": res.y_label},
          out / "fit.json")
    _dump({
        "config": cfg.to_dict(),
        "versions": _versions(),
        "exponents": report.to_dict(),
        "experiment": res.kind,
        "predicted_slope": res.predicted_slope,
        "x_column": res.x_column,
        "x_label": res.x_label,
        "y_label": res.y_label,
        "plot": {"statistic": statistic, "x": xt, "y": yt, "power": report.zeta_star},
        "warnings": list(res.warnings),
        "extra": res.extra,
        "error": error,
    }, out / "meta.json")


def cmd_experiment(cfg: RunConfig):
    if cfg.experiment is None:
        raise ConfigParseError("the experiment subcommand needs an 'experiment' key")
    if not cfg.n_grid:
        raise ConfigParseError("the experiment subcommand needs an 'n_grid' key")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        res = run_scaling_experiment(cfg.experiment, cfg.model, cfg.n_grid, cfg.replicates, cfg.extras(),
                                     cfg.master_seed, cfg.threads)
    except InsufficientEventsError as exc:
        if exc.result is not None:
            exc.result.fit = None
            _write_experiment(cfg, exc.result, out, error=str(exc))
        raise
    _write_experiment(cfg, res, out)
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if res.fit is not None:
        print(f"slope {res.fit.slope:.4f} +- {res.fit.stderr_slope:.4f} (r2 {res.fit.r2:.4f}); "
              f"predicted {res.predicted_slope}")
    return EXIT_OK


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def render_svg(points, fit_pts, slope, intercept, predicted, x_label, y_label, title):
    """Scatter of ``points`` with the fitted line; plain SVG with inline styles."""
    W, H, L, R, T, B = 640, 440, 80, 20, 50, 60
    allp = list(points) + list(fit_pts)
    xs = [p[0] for p in allp] or [0.0, 1.0]
    ys = [p[1] for p in allp] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if slope is not None:
        y0 = min(y0, slope * x0 + intercept, slope * x1 + intercept)
        y1 = max(y1, slope * x0 + intercept, slope * x1 + intercept)
    padx = (x1 - x0) * 0.05 or 0.5
    pady = (y1 - y0) * 0.05 or 0.5
    x0, x1, y0, y1 = x0 - padx, x1 + padx, y0 - pady, y1 + pady

    def sx(x):
        return L + (x - x0) / (x1 - x0) * (W - L - R)

    def sy(y):
        return H - B - (y - y0) / (y1 - y0) * (H - T - B)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           f'<rect x="0" y="0" width="{W}" height="{H}" style="fill:#ffffff"/>',
           f'<text x="{W / 2:.1f}" y="24" style="font:14px sans-serif;text-anchor:middle">{_esc(title)}</text>',
           f'<line x1="{L}" y1="{H - B}" x2="{W - R}" y2="{H - B}" style="stroke:#000"/>',
           f'<line x1="{L}" y1="{T}" x2="{L}" y2="{H - B}" style="stroke:#000"/>']
    for t in _nice_ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.1f}" y1="{H - B}" x2="{sx(t):.1f}" y2="{H - B + 5}" style="stroke:#000"/>')
        out.append(f'<text x="{sx(t):.1f}" y="{H - B + 18}" style="font:11px sans-serif;text-anchor:middle">'
                   f'{t:.3g}</text>')
    for t in _nice_ticks(y0, y1):
        out.append(f'<line x1="{L - 5}" y1="{sy(t):.1f}" x2="{L}" y2="{sy(t):.1f}" style="stroke:#000"/>')
        out.append(f'<text x="{L - 8}" y="{sy(t) + 4:.1f}" style="font:11px sans-serif;text-anchor:end">'
                   f'{t:.3g}</text>')
    out.append(f'<text x="{(L + W - R) / 2:.1f}" y="{H - 15}" style="font:12px sans-serif;text-anchor:middle">'
               f'{_esc(x_label)}</text>')
    out.append(f'<text x="18" y="{(T + H - B) / 2:.1f}" style="font:12px sans-serif;text-anchor:middle" '
               f'transform="rotate(-90 18 {(T + H - B) / 2:.1f})">{_esc(y_label)}</text>')
    for x, y in points:
        out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" style="fill:#1f77b4"/>')
    if slope is not None:
        out.append(f'<line class="fit" x1="{sx(x0):.2f}" y1="{sy(slope * x0 + intercept):.2f}" '
                   f'x2="{sx(x1):.2f}" y2="{sy(slope * x1 + intercept):.2f}" '
                   f'style="stroke:#d62728;stroke-width:2" data-slope="{slope!r}"/>')
        label = f"fitted slope {slope:.4f}"
        if predicted is not None:
            label += f"; predicted {predicted:.4f}"
        out.append(f'<text x="{L + 10}" y="{T + 14}" style="font:12px sans-serif;fill:#d62728">{_esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def cmd_plot(cfg: RunConfig | None, input_dir=None):
    src = Path(input_dir or (cfg.output_dir if cfg else "results"))
    rows = read_results_csv(src / "results.csv")
    meta = {}
    if (src / "meta.json").exists():
        meta = json.loads((src / "meta.json").read_text(encoding="utf-8"))
    spec = meta.get("plot", {})
    statistic = spec.get("statistic") or rows[0]["statistic"]
    xt, yt = spec.get("x", "log"), spec.get("y", "log")
    power = spec.get("power")
    power = float(power) if isinstance(power, (int, float)) else None
    pts = []
    for r in rows:
        if r["statistic"] != statistic:
            continue
        x, y = _transform(r["n"], xt, power), _transform(r["value"], yt)
        if x is not None and y is not None:
            pts.append((x, y))
    fit = None
    if (src / "fit.json").exists():
        fit = json.loads((src / "fit.json").read_text(encoding="utf-8")).get("fit")
    if fit:
        slope, intercept, fit_pts = fit["slope"], fit["intercept"], [tuple(p) for p in fit["points"]]
    elif len(pts) >= 3:
        f = fit_line(*zip(*pts))
        slope, intercept, fit_pts = f.slope, f.intercept, f.points
    else:
        slope, intercept, fit_pts = None, None, []
    predicted = meta.get("predicted_slope")
    x_label = meta.get("x_label", "log n")
    y_label = meta.get("y_label", f"log {statistic}")
    exps = meta.get("exponents", {})
    title = f"{meta.get('experiment', statistic)}"
    if "zeta_star" in exps:
        title += f" (zeta_star = {exps['zeta_star']})"
    svg = render_svg(pts, fit_pts, slope, intercept, predicted if isinstance(predicted, (int, float)) else None,
                     x_label, y_label, title)
    (src / "plot.svg").write_text(svg, encoding="utf-8")
    print(f"wrote {src / 'plot.svg'}")
    return EXIT_OK


def _split_overrides(extra):
    lines = []
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigParseError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
        else:
            val = next(it, None)
            if val is None:
                raise ConfigParseError(f"missing value for override --{key}")
        lines.append(f"{key.replace('-', '_')} = {val}")
    return lines


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ksrg", description="Kernel-based spatial random graph simulator")
    parser.add_argument("command", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--input", help="result directory to plot (default: the configured 'out')")
    args, extra = parser.parse_known_args(argv)
    try:
        text = ""
        if args.config:
            text = Path(args.config).read_text(encoding="utf-8")
        overrides = _split_overrides(extra)
        if overrides:
            text = text + ("\n" if text and not text.endswith("\n") else "") + "\n".join(overrides) + "\n"
        if args.command == "plot" and not args.config and not overrides:
            return cmd_plot(None, args.input)
        cfg = parse_config(text)
        if args.command == "phase":
            return cmd_phase(cfg)
        if args.command == "sample":
            return cmd_sample(cfg)
        if args.command == "experiment":
            return cmd_experiment(cfg)
        return cmd_plot(cfg, args.input)
    except CapacityError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InsufficientEventsError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_EVENTS
    except (KSRGError, ValueError, OSError) as exc:
        code = getattr(exc, "code", "INVALID")
        print(f"error [{code}]: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
