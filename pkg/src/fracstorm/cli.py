"""Command-line surface: configuration, artifact emission, validation runner.

Commands
--------
specfun   evaluate the special functions at given points (CSV on stdout)
kernel    Dirichlet kernel slice or L2-decay table (CSV artifact)
moments   renewal benchmark or second-moment energy trace (CSV artifact)
simulate  Monte Carlo mild-solution run (CSV + JSON artifacts)
excite    lambda sweep with growth-index fit (CSV + JSON + SVG artifacts)
validate  run the self-check suite and print the report

Configuration files are flat ``key = value`` text with dotted section
prefixes (``model.alpha = 2.0``); '#' starts a comment and blank lines are
ignored.  ``KNOWN_KEYS`` lists the vocabulary; model invariants are enforced
at parse time with messages quoting the violated condition.  Values given
with repeated ``--set key=value`` flags override the file.

Artifacts are written atomically (temporary file in the target directory,
then rename), and every CSV starts with a '#' comment line recording the
package version, the seed, and the parameter set, followed by a header row;
fields use '.' as the decimal separator and 17 significant digits.

Exit codes: 0 success, 1 numerical failure, 2 invalid input or domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .errors import DomainError, NumericsError
from .fracfun import (
    SampledFunction,
    caputo_derivative,
    fractional_integral,
    inverse_subordinator_density,
    mittag_leffler,
    stable_subordinator_density,
)
from .params import ModelParams, NoiseModel, SpaceGrid

__all__ = [
    "RunConfig",
    "parse_config_text",
    "serialize_config",
    "csv_text",
    "write_atomic",
    "main",
]


# --------------------------------------------------------------------------
# configuration


def _choice(*options):
    def cast(raw, key):
        if raw not in options:
            raise DomainError(
                f"config key {key} must be one of {', '.join(options)}; got {raw!r}")
        return raw
    return cast


def _int(raw, key):
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"config key {key} expects an integer, got {raw!r}") from None


def _float(raw, key):
    try:
        return float(raw)
    except ValueError:
        raise DomainError(f"config key {key} expects a number, got {raw!r}") from None


def _str(raw, key):
    return raw


#: key -> caster; the whole config vocabulary.
KNOWN_KEYS = {
    "model.alpha": _float,
    "model.beta": _float,
    "model.nu": _float,
    "model.radius": _float,
    "model.lam": _float,
    "model.d": _int,
    "noise.kind": _choice("white", "riesz"),
    "noise.gamma": _float,
    "grid.nx": _int,
    "grid.nt": _int,
    "grid.t": _float,
    "run.seed": _int,
    "run.outdir": _str,
    "run.threads": _int,
    "sigma.kind": _choice("linear"),
    "sigma.slope": _float,
    "initial.kind": _choice("bump", "constant", "zero"),
    "initial.value": _float,
    "simulate.replicates": _int,
    "simulate.ensemble": _str,
    "excite.lam_min": _float,
    "excite.lam_max": _float,
    "excite.count": _int,
    "excite.t": _float,
    "excite.nt": _int,
    "excite.method": _choice("volterra", "montecarlo"),
    "excite.functional": _choice("energy", "sup"),
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration: a sorted tuple of (key, value) pairs.

    Model invariants are checked when the config is parsed; the typed
    accessors below materialize the domain objects on demand.
    """

    entries: tuple

    def get(self, key, default=None):
        for k, v in self.entries:
            if k == key:
                return v
        return default

    def params(self):
        kind = self.get("noise.kind", "white")
        gamma = self.get("noise.gamma")
        noise = NoiseModel(kind=kind, gamma=gamma)
        return ModelParams(
            alpha=self.get("model.alpha", 2.0),
            beta=self.get("model.beta", 0.5),
            nu=self.get("model.nu", 1.0),
            R=self.get("model.radius", 1.0),
            lam=self.get("model.lam", 1.0),
            d=self.get("model.d", 1),
            noise=noise,
        )

    def grid(self):
        return SpaceGrid(R=self.params().R, n=self.get("grid.nx", 64))

    def sigma(self):
        from .simulate import SigmaSpec

        return SigmaSpec(kind=self.get("sigma.kind", "linear"),
                         slope=self.get("sigma.slope", 1.0))

    def initial_profile(self, grid):
        kind = self.get("initial.kind", "bump")
        amp = self.get("initial.value", 1.0)
        if kind == "bump":
            return amp * np.cos(0.5 * np.pi * grid.nodes / grid.R)
        if kind == "constant":
            return amp * np.ones(grid.n)
        return np.zeros(grid.n)

    @property
    def seed(self):
        return self.get("run.seed", 0)

    @property
    def outdir(self):
        return self.get("run.outdir", ".")


def _parse_line(line, lineno):
    if "=" not in line:
        raise DomainError(
            f"config line {lineno} is not 'key = value': {line!r}")
    key, raw = line.split("=", 1)
    key, raw = key.strip(), raw.strip()
    if key not in KNOWN_KEYS:
        raise DomainError(
            f"unknown config key {key!r} on line {lineno}; known keys: "
            + ", ".join(sorted(KNOWN_KEYS)))
    return key, KNOWN_KEYS[key](raw, key)


def parse_config_text(text):
    """Parse flat ``key = value`` configuration text into a RunConfig.

    Duplicate keys are an error; every model invariant is enforced here so
    a bad parameter set fails at parse time with an actionable message.
    """
    pairs = {}
    for lineno, line in enumerate(str(text).splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, value = _parse_line(line, lineno)
        if key in pairs:
            raise DomainError(f"duplicate config key {key!r} on line {lineno}")
        pairs[key] = value
    cfg = RunConfig(entries=tuple(sorted(pairs.items())))
    cfg.params()  # enforce model invariants now
    return cfg


def _render_value(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(cfg):
    """Canonical text form: sorted ``key = value`` lines; reparses equal."""
    lines = [f"{k} = {_render_value(v)}" for k, v in cfg.entries]
    return "\n".join(lines) + "\n"


def _apply_overrides(cfg, sets):
    pairs = dict(cfg.entries)
    for item in sets or ():
        key, value = _parse_line(item, lineno=0)
        pairs[key] = value
    cfg = RunConfig(entries=tuple(sorted(pairs.items())))
    cfg.params()
    return cfg


def _load_config(args):
    cfg = RunConfig(entries=())
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        except FileNotFoundError:
            raise DomainError(f"config file not found: {args.config}") from None
        cfg = parse_config_text(text)
    return _apply_overrides(cfg, getattr(args, "set", None))


def _resolve_threads(args, cfg=None):
    """--threads flag, else FRACSTORM_THREADS, else run.threads, else 1."""
    if getattr(args, "threads", None) is not None:
        n = args.threads
    else:
        env = os.environ.get("FRACSTORM_THREADS", "").strip()
        if env:
            try:
                n = int(env)
            except ValueError:
                raise DomainError(
                    f"FRACSTORM_THREADS must be an integer, got {env!r}") from None
        else:
            n = cfg.get("run.threads", 1) if cfg is not None else 1
    if n < 1:
        raise DomainError(f"threads must be >= 1, got {n}")
    return n


# --------------------------------------------------------------------------
# artifact emission


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    s = str(v)
    if any(c in s for c in ",\"\r\n"):
        s = '"' + s.replace('"', '""') + '"'
    return s


def csv_text(columns, rows, seed, params=""):
    """RFC-4180-style CSV: comment line, header row, CRLF line endings.

    The comment line records the package version, the seed, and the
    parameter set so every table is reproducible from its own bytes.
    """
    head = f"# fracstorm {__version__} seed={seed}"
    if params:
        head += f" params={params}"
    lines = [head, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\r\n".join(lines) + "\r\n"


def write_atomic(path, text):
    """Write text to ``path`` via a temporary file and an atomic rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    tmp = os.path.join(directory, f".{os.path.basename(path)}.tmp{os.getpid()}")
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _params_label(p):
    bits = [f"alpha={p.alpha:g}", f"beta={p.beta:g}", f"nu={p.nu:g}",
            f"radius={p.R:g}", f"lam={p.lam:g}", f"d={p.d}",
            f"noise={p.noise.kind}"]
    if p.noise.gamma is not None:
        bits.append(f"gamma={p.noise.gamma:g}")
    return " ".join(bits)


def _json_text(payload):
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# specfun


def _float_list(raw):
    try:
        return [float(tok) for tok in str(raw).split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {raw!r}")


_TEST_FUNCTIONS = {
    "one": lambda t: np.ones_like(t),
    "t": lambda t: t,
    "t2": lambda t: t ** 2,
    "sin": np.sin,
}


def _require(args, names, command):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise DomainError(f"{command} requires {', '.join(missing)}")


def _sampled_test_function(name, horizon, n):
    times = np.linspace(0.0, horizon, int(n) + 1)
    return SampledFunction(times=times, values=_TEST_FUNCTIONS[name](times))


def cmd_specfun(args):
    what = args.what
    if what == "ml":
        _require(args, ["beta", "x"], "specfun ml")
        rows = [[args.beta, x, mittag_leffler(args.beta, x)] for x in args.x]
        cols = ["beta", "x", "value"]
    elif what == "gsub":
        _require(args, ["beta", "u"], "specfun gsub")
        rows = [[args.beta, u, stable_subordinator_density(args.beta, u)]
                for u in args.u]
        cols = ["beta", "u", "value"]
    elif what == "fet":
        _require(args, ["beta", "t", "x"], "specfun fet")
        t = args.t[0]
        rows = [[args.beta, t, x, inverse_subordinator_density(args.beta, t, x)]
                for x in args.x]
        cols = ["beta", "t", "x", "value"]
    elif what == "caputo":
        _require(args, ["beta", "t"], "specfun caputo")
        g = _sampled_test_function(args.g, max(args.t), args.grid_n)
        rows = [[args.beta, args.g, t, caputo_derivative(g, args.beta, t)]
                for t in args.t]
        cols = ["beta", "g", "t", "value"]
    else:  # fracint
        _require(args, ["order", "t"], "specfun fracint")
        g = _sampled_test_function(args.g, max(args.t), args.grid_n)
        rows = [[args.order, args.g, t, fractional_integral(g, args.order, t)]
                for t in args.t]
        cols = ["order", "g", "t", "value"]
    sys.stdout.write(csv_text(cols, rows, seed=0, params=f"what={what}"))
    return 0


# --------------------------------------------------------------------------
# kernel


def _eigen_from(cfg):
    from .kernels import build_discrete_generator, eigen_system

    p = cfg.params()
    if p.d != 1:
        raise DomainError(
            f"grid-based commands support d = 1 only (interval domain); got d={p.d}")
    grid = cfg.grid()
    return p, grid, eigen_system(build_discrete_generator(p, grid), grid)


def cmd_kernel(args):
    from .kernels import dirichlet_fractional_kernel, free_kernel_l2, green_l2_constant

    cfg = _load_config(args)
    p, grid, es = _eigen_from(cfg)
    times = args.t if args.t else [cfg.get("grid.t", 0.1)]
    out = args.out or os.path.join(cfg.outdir, "kernel.csv")
    if args.mode == "slice":
        t = times[0]
        G = dirichlet_fractional_kernel(es, p.beta, t)
        j = int(np.argmin(np.abs(grid.nodes - args.y)))
        rows = [[x, G[i, j]] for i, x in enumerate(grid.nodes)]
        write_atomic(out, csv_text(["x", "kernel"], rows, seed=cfg.seed,
                                   params=_params_label(p)))
        print(f"kernel slice at t={t:g}, y={grid.nodes[j]:g}: "
              f"peak {float(G[:, j].max()):.6g} -> {out}")
    else:
        const = green_l2_constant(p)
        expo = -p.beta * p.d / p.alpha
        rows, worst = [], 0.0
        for t in times:
            integral = free_kernel_l2(p, t)
            law = const * t ** expo
            worst = max(worst, abs(integral / law - 1.0))
            rows.append([t, integral, law])
        write_atomic(out, csv_text(["t", "integral", "law"], rows, seed=cfg.seed,
                                   params=_params_label(p)))
        print(f"kernel L2 decay over {len(times)} times: "
              f"max deviation from the power law {worst:.3e} -> {out}")
    return 0


# --------------------------------------------------------------------------
# moments


def cmd_moments(args):
    cfg = _load_config(args)
    if args.what == "renewal":
        from .moments import renewal_growth_exponent, renewal_volterra_solve

        _require(args, ["rho", "kappa", "c1", "T"], "moments renewal")
        nt = args.nt if args.nt is not None else 16384
        f = renewal_volterra_solve(args.c1, args.kappa, args.rho, args.T, nt)
        out = args.out or os.path.join(cfg.outdir, "renewal.csv")
        rows = list(zip(f.times.tolist(), f.values.tolist()))
        write_atomic(out, csv_text(["t", "f"], rows, seed=cfg.seed,
                                   params=f"rho={args.rho:g} kappa={args.kappa:g} "
                                          f"c1={args.c1:g} nt={nt}"))
        rate = renewal_growth_exponent(args.kappa, args.rho)
        print(f"renewal f({args.T:g}) = {float(f.values[-1]):.10g} "
              f"(growth-rate scale {rate:.6g}) -> {out}")
        return 0

    from .moments import second_moment_colored, second_moment_white

    p, grid, es = _eigen_from(cfg)
    u0 = cfg.initial_profile(grid)
    T = args.T if args.T is not None else cfg.get("grid.t", 0.1)
    nt = args.nt if args.nt is not None else cfg.get("grid.nt", 128)
    if p.noise.kind == "white":
        field = second_moment_white(p, es, u0, args.l_sigma, T, nt)
    else:
        field = second_moment_colored(p, es, u0, args.l_sigma, p.noise.gamma,
                                      T, nt).diagonal_field()
    logs = [field.energy_log(j) for j in range(len(field.times))]
    out = args.out or os.path.join(cfg.outdir, "moments.csv")
    rows = list(zip(field.times.tolist(), logs))
    write_atomic(out, csv_text(["t", "log_energy"], rows, seed=cfg.seed,
                               params=_params_label(p) + f" l_sigma={args.l_sigma:g}"))
    print(f"second-moment energy trace on [0, {T:g}], nt={nt}: "
          f"log E_t(T) = {logs[-1]:.6g} -> {out}")
    return 0


# --------------------------------------------------------------------------
# simulate


def cmd_simulate(args):
    from .simulate import SimConfig, simulate_mild

    cfg = _load_config(args)
    p, grid, es = _eigen_from(cfg)
    u0 = cfg.initial_profile(grid)
    threads = _resolve_threads(args, cfg)
    sim = SimConfig(
        nx=grid.n,
        nt=args.nt if args.nt is not None else cfg.get("grid.nt", 128),
        T=args.T if args.T is not None else cfg.get("grid.t", 0.1),
        replicates=(args.replicates if args.replicates is not None
                    else cfg.get("simulate.replicates", 200)),
        seed=args.seed if args.seed is not None else cfg.seed,
        sigma=cfg.sigma(),
        ensemble_path=args.ensemble or cfg.get("simulate.ensemble"),
    )
    est = simulate_mild(p, es, u0, sim, threads=threads)
    energy = float(est.mean[-1].sum() * grid.h)
    out = args.out or os.path.join(cfg.outdir, "simulate.csv")
    rows = [[x, m, s] for x, m, s in zip(grid.nodes, est.mean[-1], est.stderr[-1])]
    label = _params_label(p) + f" T={sim.T:g} nt={sim.nt} replicates={sim.replicates}"
    write_atomic(out, csv_text(["x", "second_moment", "stderr"], rows,
                               seed=sim.seed, params=label))
    summary = {
        "command": "simulate",
        "version": __version__,
        "seed": sim.seed,
        "threads": threads,
        "grid": {"nx": sim.nx, "nt": sim.nt, "T": sim.T},
        "replicates_requested": sim.replicates,
        "replicates_used": est.replicates_used,
        "blowups": est.blowups,
        "final_time_energy": energy,
        "params": _params_label(p),
        "artifacts": {"csv": out},
    }
    jout = os.path.splitext(out)[0] + ".json"
    write_atomic(jout, _json_text(summary))
    print(f"simulate: {est.replicates_used} replicates ({est.blowups} blowups), "
          f"final-time energy {energy:.6g} -> {out}, {jout}")
    return 0


# --------------------------------------------------------------------------
# excite


def cmd_excite(args):
    from .charts import render_excitation_svg
    from .excitation import excitation_sweep
    from .simulate import SimConfig

    cfg = _load_config(args)
    p, grid, es = _eigen_from(cfg)
    u0 = cfg.initial_profile(grid)
    threads = _resolve_threads(args, cfg)
    method = args.method or cfg.get("excite.method", "volterra")
    functional = cfg.get("excite.functional", "energy")
    t = args.t if args.t is not None else cfg.get("excite.t", 0.1)
    nt = args.nt if args.nt is not None else cfg.get("excite.nt")
    if method == "montecarlo":
        lam_min, lam_max = cfg.get("excite.lam_min", 2.0), cfg.get("excite.lam_max", 20.0)
        count = cfg.get("excite.count", 6)
    else:
        lam_min, lam_max = cfg.get("excite.lam_min", 1e2), cfg.get("excite.lam_max", 1e6)
        count = cfg.get("excite.count", 13)
    lambdas = np.geomspace(lam_min, lam_max, count)
    mc_config = None
    if method == "montecarlo":
        mc_config = SimConfig(
            nx=grid.n,
            nt=nt if nt is not None else 128,
            T=t,
            replicates=cfg.get("simulate.replicates", 400),
            seed=cfg.seed,
            sigma=cfg.sigma(),
        )
    fit = excitation_sweep(p, es, u0, t, lambdas, method=method,
                           functional=functional, nt=nt, mc_config=mc_config,
                           threads=threads)
    dev = fit.slope / fit.theory - 1.0
    verdict = ("PASS" if abs(dev) <= 0.10 else "FAIL") + " ±10%"
    prefix = args.out_prefix or os.path.join(cfg.outdir, "excite")
    csv_path, json_path, svg_path = (prefix + ext for ext in (".csv", ".json", ".svg"))
    rows = [[lam, lv, int(m)]
            for lam, lv, m in zip(fit.lambdas, fit.log_values, fit.fit_mask)]
    write_atomic(csv_path, csv_text(["lam", "log_value", "fitted"], rows,
                                    seed=cfg.seed, params=_params_label(p)))
    summary = {
        "command": "excite",
        "version": __version__,
        "seed": cfg.seed,
        "method": fit.method,
        "functional": fit.functional,
        "t": fit.t,
        "slope": fit.slope,
        "theory": fit.theory,
        "relative_deviation": dev,
        "verdict": verdict,
        "lambda": [float(v) for v in fit.lambdas],
        "log_value": [float(v) for v in fit.log_values],
        "fit_mask": [bool(v) for v in fit.fit_mask],
        "residuals": [float(v) for v in fit.residuals],
        "params": _params_label(p),
        "artifacts": {"csv": csv_path, "svg": svg_path},
    }
    write_atomic(json_path, _json_text(summary))
    write_atomic(svg_path, render_excitation_svg(fit))
    print(f"excite: slope {fit.slope:.7g} vs theory {fit.theory:.7g} "
          f"({dev:+.2%}) {verdict} -> {csv_path}, {json_path}, {svg_path}")
    return 0


# --------------------------------------------------------------------------
# validate


def cmd_validate(args):
    from .validate import format_report, run_validation

    threads = _resolve_threads(args)
    results = run_validation(only=args.only, seed=args.seed, threads=threads)
    report = format_report(results, seed=args.seed, only=args.only)
    print(report)
    if args.out:
        write_atomic(args.out, report + "\n")
    return 0 if all(r.passed for r in results) else 1


# --------------------------------------------------------------------------
# parser


def _add_config_flags(sp):
    sp.add_argument("--config", help="path to a key = value configuration file")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                    help="override one config entry (repeatable)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fracstorm",
        description="Fractional stochastic heat equation toolkit: special "
                    "functions, Dirichlet kernels, moment solvers, Monte "
                    "Carlo simulation, and noise-excitation sweeps.")
    parser.add_argument("--version", action="version",
                        version=f"fracstorm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("specfun", help="evaluate special functions (CSV on stdout)")
    sp.add_argument("what", choices=["ml", "gsub", "fet", "caputo", "fracint"])
    sp.add_argument("--beta", type=float, help="fractional order in (0, 1)")
    sp.add_argument("--order", type=float, help="integral order in (0, 1]")
    sp.add_argument("--x", type=_float_list, help="evaluation point(s), comma-separated")
    sp.add_argument("--u", type=_float_list, help="density argument(s), comma-separated")
    sp.add_argument("--t", type=_float_list, help="time point(s), comma-separated")
    sp.add_argument("--g", choices=sorted(_TEST_FUNCTIONS), default="t",
                    help="named test function for caputo/fracint")
    sp.add_argument("--grid-n", type=int, default=512,
                    help="sample count for the test function")
    sp.set_defaults(func=cmd_specfun)

    kp = sub.add_parser("kernel", help="Dirichlet kernel artifacts")
    _add_config_flags(kp)
    kp.add_argument("--mode", choices=["slice", "l2"], default="slice")
    kp.add_argument("--t", type=_float_list, help="time(s), comma-separated")
    kp.add_argument("--y", type=float, default=0.0, help="source point for slice mode")
    kp.add_argument("--out", help="output CSV path")
    kp.set_defaults(func=cmd_kernel)

    mp = sub.add_parser("moments", help="moment solvers")
    _add_config_flags(mp)
    mp.add_argument("what", choices=["renewal", "field"])
    mp.add_argument("--rho", type=float, help="renewal kernel exponent")
    mp.add_argument("--kappa", type=float, help="renewal kernel weight")
    mp.add_argument("--c1", type=float, help="renewal forcing constant")
    mp.add_argument("--T", type=float, help="time horizon")
    mp.add_argument("--nt", type=int, help="time steps (renewal default 16384)")
    mp.add_argument("--l-sigma", type=float, default=1.0,
                    help="Lipschitz bound used by the field solver")
    mp.add_argument("--out", help="output CSV path")
    mp.set_defaults(func=cmd_moments)

    xp = sub.add_parser("simulate", help="Monte Carlo mild-solution run")
    _add_config_flags(xp)
    xp.add_argument("--replicates", type=int)
    xp.add_argument("--nt", type=int)
    xp.add_argument("--T", type=float)
    xp.add_argument("--seed", type=int)
    xp.add_argument("--threads", type=int)
    xp.add_argument("--ensemble", help="stream the raw ensemble to this path")
    xp.add_argument("--out", help="output CSV path")
    xp.set_defaults(func=cmd_simulate)

    ep = sub.add_parser("excite", help="lambda sweep and growth-index fit")
    _add_config_flags(ep)
    ep.add_argument("--method", choices=["volterra", "montecarlo"])
    ep.add_argument("--t", type=float)
    ep.add_argument("--nt", type=int)
    ep.add_argument("--threads", type=int)
    ep.add_argument("--out-prefix", help="artifact path prefix (.csv/.json/.svg)")
    ep.set_defaults(func=cmd_excite)

    vp = sub.add_parser("validate", help="run the self-check suite")
    vp.add_argument("--only", help="restrict to one check group")
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--threads", type=int)
    vp.add_argument("--out", help="also write the report to this path")
    vp.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"fracstorm: error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"fracstorm: numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
