"""
Command-line harness: ``sykbarvinok <command> [--config FILE] [--key value ...]``.

Every option can also be set in a flat config file of ``key = value`` lines
(``#`` starts a comment, keys use underscores, booleans are ``true``/``false``).
Command-line flags override file keys.  Outputs go to ``--out``, else to
``$SYKBARVINOK_OUT``, else the working directory.  Data files are
deterministic for a fixed config; wall-clock details go to a
``<command>.meta.json`` sidecar.  Multi-seed sweeps use seeds
``seed, seed + 1, ...``.

Exit codes: 0 success, 2 invalid configuration or precondition,
3 budget or size cap exceeded, 4 numerical contamination,
5 ``--verify`` cross-check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .disorder import (
    DEFAULT_BUDGET,
    annealed_trace_moment,
    concentration_ratio,
    local_fluctuations,
    monte_carlo_trace_moment,
    monte_carlo_two_replica,
    two_replica_moment,
)
from .errors import BudgetExceeded, NumericalContamination, ResultTooLarge, SykError
from .estimator import DEFAULT_K_MAX, estimate_expectation
from .model import Observable, SykInstance, build_hamiltonian, parse_observable, sample_instance
from .moments import power_trace_sequence, write_moments_csv
from .oracle import gibbs_expectation, log_partition_function, spectral_norm, spectrum, to_dense
from .zeros import GridSpec, radius_sheet, scan_annealed_zeros, scan_instance_zeros

OUT_ENV = "SYKBARVINOK_OUT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_NUMERIC = 4
EXIT_VERIFY = 5


class ConfigError(ValueError):
    pass


class VerificationFailed(RuntimeError):
    pass


# Value parsers.  Each takes the raw text and returns a typed value.

def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _complex(text: str) -> complex:
    """``0.15+0.1j``, ``0.15,0.1`` or a plain real."""
    t = str(text).replace(" ", "")
    if "," in t:
        re_, im_ = t.split(",")
        return complex(float(re_), float(im_))
    return complex(t)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in str(text).replace(" ", "").split(",") if t)


def _radius(text: str):
    t = str(text).strip().lower()
    if t in ("auto", "whp", "concentration", "annealed", "main", "estimator"):
        return t
    return float(t)


def _obs(text: str) -> Observable:
    return parse_observable(str(text))


def _canon(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, complex):
        return f"{value.real!r},{value.imag!r}"
    if isinstance(value, tuple):
        return ",".join(map(str, value))
    if isinstance(value, Observable):
        return ";".join(f"{c!r}:" + ",".join(map(str, s)) for c, s in value.terms)
    return str(value)


@dataclass(frozen=True)
class Option:
    name: str
    parse: Callable
    default: object
    help: str
    flag: bool = False


def _o(name, parse, default, help, flag=False):
    return Option(name, parse, default, help, flag)


N = _o("n", int, 12, "number of Majorana modes (even)")
Q = _o("q", int, 4, "interaction locality (even)")
SEED = _o("seed", int, 0, "base seed (64-bit unsigned)")
OBS = _o("obs", _obs, "", "observable as 'c:i,j;c:i,j,k,l'")
LAM = _o("lam", float, 0.0, "perturbation strength lambda")
BUDGET = _o("budget", int, DEFAULT_BUDGET, "configuration budget for Wick enumeration")
SAMPLES = _o("samples", int, 0, "Monte Carlo instances (0 disables)")
VERIFY = _o("verify", _bool, False, "cross-check against the dense oracle", flag=True)

COMMANDS: dict[str, list[Option]] = {
    "estimate": [
        N, Q, SEED,
        _o("beta", float, 0.1, "inverse temperature"),
        _o("epsilon", float, 0.02, "additive error target"),
        _o("obs", _obs, "1:0,1,2,3", "observable as 'c:i,j;c:i,j,k,l'"),
        _o("k_max", int, DEFAULT_K_MAX, "largest admissible truncation order"),
        VERIFY,
    ],
    "exact": [N, Q, SEED, _o("beta", float, 0.1, "inverse temperature"), OBS, LAM],
    "moments": [N, Q, SEED, _o("k", int, 12, "highest moment order"), OBS, LAM, VERIFY],
    "anneal": [
        _o("n", int, 8, "number of Majorana modes (even)"), Q,
        _o("k", int, 6, "highest moment order"), OBS, LAM, SAMPLES, SEED, BUDGET,
    ],
    "two-replica": [
        _o("n", int, 8, "number of Majorana modes (even)"), Q,
        _o("l1", int, 2, "power in replica 1"), _o("l2", int, 2, "power in replica 2"),
        OBS, LAM, SAMPLES, SEED, BUDGET,
        _o("separated", _bool, False, "keep only within-replica pairings", flag=True),
    ],
    "concentration": [
        _o("ns", _int_list, (8, 12, 16), "comma-separated mode counts"), Q,
        _o("beta", _complex, 0.15 + 0.1j, "complex inverse temperature 're,im'"),
        _o("samples", int, 300, "instances per n"), SEED,
    ],
    "scan-zeros": [
        N, Q, SEED, _o("seeds", int, 1, "number of consecutive seeds"), OBS, LAM,
        _o("radius", _radius, "auto", "disk radius: number or auto|whp|concentration|annealed|main|estimator"),
        _o("center", _complex, 0j, "disk center 're,im'"),
        _o("resolution", int, 41, "grid points per axis"),
        _o("annealed", _bool, False, "scan the annealed series instead of instances", flag=True),
        _o("k", int, 6, "series order for annealed scans"), BUDGET,
    ],
    "fluctuations": [
        _o("ns", _int_list, (8, 12, 16), "comma-separated mode counts"), Q,
        _o("beta", float, 0.2, "inverse temperature"),
        _o("pairs", int, 20, "instance pairs per n"), SEED,
    ],
    "constants": [Q, _o("l", int, 4, "observable locality L")],
    "bench": [N, Q, SEED, _o("k", int, 12, "highest moment order"),
              _o("repeat", int, 3, "timing repetitions")],
}

GLOBAL_KEYS = ("out", "hex_floats", "threads")


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    """Parse ``key = value`` lines; duplicates and malformed lines are errors."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def resolve_config(command: str, file_values: dict[str, str], flag_values: dict) -> dict:
    """Merge defaults, file keys and flags (in increasing priority) and type them."""
    options = {o.name: o for o in COMMANDS[command]}
    unknown = set(file_values) - set(options) - set(GLOBAL_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {', '.join(sorted(unknown))}")
    cfg = {}
    for name, opt in options.items():
        raw = flag_values.get(name)
        if raw is None:
            raw = file_values.get(name)
        if raw is None and not isinstance(opt.default, str):
            cfg[name] = opt.default
            continue
        try:
            cfg[name] = opt.parse(opt.default if raw is None else raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value for {name}: {raw!r} ({exc})") from exc
    cfg["hex_floats"] = bool(flag_values.get("hex_floats")) or _bool(file_values.get("hex_floats", "false"))
    threads = flag_values.get("threads") or file_values.get("threads") or 1
    try:
        cfg["threads"] = int(threads)
    except ValueError as exc:
        raise ConfigError(f"invalid value for threads: {threads!r}") from exc
    if cfg["threads"] < 1:
        raise ConfigError("threads must be at least 1")
    cfg["out"] = flag_values.get("out") or file_values.get("out") or os.environ.get(OUT_ENV) or "."
    _validate(command, cfg)
    return cfg


def canonical_config(command: str, cfg: dict) -> str:
    lines = [f"command = {command}"]
    for key in sorted(k for k in cfg if k not in ("out", "threads")):
        lines.append(f"{key} = {_canon(cfg[key])}")
    return "\n".join(lines) + "\n"


def _validate(command: str, cfg: dict) -> None:
    def need(cond, msg):
        if not cond:
            raise ConfigError(msg)

    ns = cfg.get("ns") or ((cfg["n"],) if "n" in cfg else ())
    for n in ns:
        need(n >= 2 and n % 2 == 0, f"n must be even and at least 2, got {n}")
    if "q" in cfg:
        need(cfg["q"] >= 2 and cfg["q"] % 2 == 0, f"q must be even and at least 2, got {cfg['q']}")
        for n in ns:
            need(cfg["q"] <= n, f"q={cfg['q']} exceeds n={n}")
    if "seed" in cfg:
        need(0 <= cfg["seed"] < 1 << 64, "seed must be a 64-bit unsigned integer")
    for key in ("k", "k_max", "l1", "l2", "samples", "budget"):
        if key in cfg:
            need(cfg[key] >= 0, f"{key} must be nonnegative")
    for key in ("seeds", "pairs", "repeat", "resolution"):
        if key in cfg:
            need(cfg[key] >= 1, f"{key} must be positive")
    if "l" in cfg:
        need(cfg["l"] >= 2 and cfg["l"] % 2 == 0, f"L must be even and at least 2, got {cfg['l']}")
    if "obs" in cfg and len(cfg["obs"]):
        for n in ns:
            need(cfg["obs"].max_site() < n, f"observable site {cfg['obs'].max_site()} outside [0, {n})")
    if command == "estimate":
        need(len(cfg["obs"]) > 0, "estimate needs a nonempty observable")
    if command == "concentration":
        need(cfg["samples"] >= 100, "concentration needs at least 100 samples")
    if command == "fluctuations":
        need(cfg["pairs"] >= 10, "fluctuations needs at least 10 pairs")


# Output helpers.

def _fmt(x, hex_floats: bool) -> str:
    return float(x).hex() if hex_floats else f"{float(x):.17g}"


def _jsonable(obj, hex_floats: bool):
    if isinstance(obj, dict):
        return {k: _jsonable(v, hex_floats) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v, hex_floats) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj).hex() if hex_floats else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump_json(obj, hex_floats: bool) -> str:
    return json.dumps(_jsonable(obj, hex_floats), indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _observable_matrix(inst: SykInstance, obs: Observable) -> np.ndarray:
    zero = SykInstance(inst.n, inst.q, inst.seed, np.zeros_like(inst.values))
    return to_dense(build_hamiltonian(zero, obs, 1.0))


# Commands.  Each returns ``{filename: text}``; writing happens after success.

def cmd_estimate(cfg):
    inst = sample_instance(cfg["n"], cfg["q"], cfg["seed"])
    rep = estimate_expectation(inst, cfg["obs"], cfg["beta"], cfg["epsilon"], K_max=cfg["k_max"])
    out = rep.to_dict()
    failed = False
    if cfg["verify"]:
        h = to_dense(build_hamiltonian(inst))
        o = _observable_matrix(inst, cfg["obs"])
        exact = gibbs_expectation(h, o, cfg["beta"])
        err = abs(rep.estimate - exact)
        failed = err > cfg["epsilon"]
        out.update(exact=exact, abs_error=err, verified=not failed)
    files = {"estimate.json": _dump_json(out, cfg["hex_floats"])}
    if failed:
        raise VerificationFailed(files, f"|estimate - exact| = {out['abs_error']:.3e} exceeds epsilon")
    return files


def cmd_exact(cfg):
    inst = sample_instance(cfg["n"], cfg["q"], cfg["seed"])
    h = to_dense(build_hamiltonian(inst, cfg["obs"], cfg["lam"]))
    e = spectrum(h)
    out = {
        "n": cfg["n"], "q": cfg["q"], "seed": cfg["seed"], "beta": cfg["beta"], "lambda": cfg["lam"],
        "log_Z": float(log_partition_function(e, cfg["beta"]).real),
        "spectral_norm": spectral_norm(e),
    }
    if len(cfg["obs"]):
        o = _observable_matrix(inst, cfg["obs"])
        out["expectation"] = gibbs_expectation(h, o, cfg["beta"])
    return {"exact.json": _dump_json(out, cfg["hex_floats"])}


def cmd_moments(cfg):
    inst = sample_instance(cfg["n"], cfg["q"], cfg["seed"])
    hop = build_hamiltonian(inst, cfg["obs"], cfg["lam"])
    mu = power_trace_sequence(hop, cfg["k"])
    ref = None
    if cfg["verify"]:
        e = spectrum(to_dense(hop))
        ref = np.array([np.mean(e**r) for r in range(cfg["k"] + 1)])
    return {"moments.csv": write_moments_csv(mu, hex_floats=cfg["hex_floats"], reference=ref)}


_DISORDER_HEADER = ["n", "q", "m_or_l1_l2", "lambda", "value", "stderr_or_exact_flag"]


def cmd_anneal(cfg):
    n, q, hx = cfg["n"], cfg["q"], cfg["hex_floats"]
    obs = cfg["obs"] if len(cfg["obs"]) else None
    rows = []
    for m in range(cfg["k"] + 1):
        v = annealed_trace_moment(n, q, m, obs, cfg["lam"], budget=cfg["budget"])
        rows.append([n, q, m, _fmt(cfg["lam"], hx), _fmt(v, hx), "exact"])
        if cfg["samples"] and m > 0:
            mean, se = monte_carlo_trace_moment(n, q, m, cfg["samples"], cfg["seed"], obs, cfg["lam"])
            rows.append([n, q, m, _fmt(cfg["lam"], hx), _fmt(mean, hx), _fmt(se, hx)])
    return {"anneal.csv": _csv_text(_DISORDER_HEADER, rows)}


def cmd_two_replica(cfg):
    n, q, hx = cfg["n"], cfg["q"], cfg["hex_floats"]
    l1, l2 = cfg["l1"], cfg["l2"]
    obs = cfg["obs"] if len(cfg["obs"]) else None
    label = f"{l1}:{l2}"
    v = two_replica_moment(n, q, l1, l2, obs, cfg["lam"], budget=cfg["budget"], separated=cfg["separated"])
    rows = [[n, q, label, _fmt(cfg["lam"], hx), _fmt(v, hx), "exact"]]
    if cfg["samples"]:
        mean, se = monte_carlo_two_replica(n, q, l1, l2, cfg["samples"], cfg["seed"], obs, cfg["lam"])
        rows.append([n, q, label, _fmt(cfg["lam"], hx), _fmt(mean, hx), _fmt(se, hx)])
    return {"two_replica.csv": _csv_text(_DISORDER_HEADER, rows)}


def cmd_concentration(cfg):
    hx, beta = cfg["hex_floats"], cfg["beta"]
    rows = []
    for n in cfg["ns"]:
        ratio, se = concentration_ratio(n, cfg["q"], beta, cfg["samples"], cfg["seed"])
        rows.append([n, cfg["q"], _fmt(beta.real, hx), _fmt(beta.imag, hx), cfg["samples"],
                     _fmt(ratio, hx), _fmt(se, hx)])
    header = ["n", "q", "re_beta", "im_beta", "samples", "ratio", "stderr"]
    return {"concentration.csv": _csv_text(header, rows)}


def _scan_radius(cfg) -> float:
    r = cfg["radius"]
    if isinstance(r, float):
        return r
    locality = cfg["obs"].locality if len(cfg["obs"]) else cfg["q"]
    sheet = radius_sheet(cfg["q"], max(locality, 2))
    if r == "auto":
        r = "annealed" if cfg["annealed"] else "whp"
    return {
        "whp": sheet.whp_radius,
        "concentration": sheet.concentration_radius,
        "annealed": sheet.annealed_radius,
        "main": sheet.main_radius,
        "estimator": sheet.estimator_ceiling,
    }[r]


def cmd_scan_zeros(cfg):
    grid = GridSpec(cfg["center"], _scan_radius(cfg), cfg["resolution"])
    obs = cfg["obs"] if len(cfg["obs"]) else None
    hx = cfg["hex_floats"]
    files, summaries = {}, []
    if cfg["annealed"]:
        rep = scan_annealed_zeros(cfg["n"], cfg["q"], obs, cfg["lam"], grid, cfg["k"], budget=cfg["budget"])
        files["scan_annealed.csv"] = rep.to_csv(hex_floats=hx)
        summaries.append(rep.summary())
    else:
        for k in range(cfg["seeds"]):
            inst = sample_instance(cfg["n"], cfg["q"], cfg["seed"] + k)
            rep = scan_instance_zeros(inst, obs, cfg["lam"], grid)
            files[f"scan_seed{inst.seed}.csv"] = rep.to_csv(hex_floats=hx)
            summaries.append(rep.summary())
    files["scan_summary.json"] = _dump_json(summaries, hx)
    return files


def fluctuation_trend(ns, medians, q: int) -> tuple[float, np.ndarray]:
    """Least-squares prefactor ``c`` of ``c n^{-(q-1)/2}`` in log space, and the trend values."""
    ns = np.asarray(ns, dtype=float)
    ref = ns ** (-(q - 1) / 2.0)
    c = float(np.exp(np.mean(np.log(np.asarray(medians)) - np.log(ref))))
    return c, c * ref


def cmd_fluctuations(cfg):
    hx, q = cfg["hex_floats"], cfg["q"]
    rows, medians = [], []
    for n in cfg["ns"]:
        devs = local_fluctuations(n, q, cfg["beta"], cfg["pairs"], cfg["seed"])
        for k, d in enumerate(devs):
            rows.append([n, k, cfg["seed"] + 2 * k, cfg["seed"] + 2 * k + 1, _fmt(d, hx)])
        medians.append(float(np.median(devs)))
    c, trend = fluctuation_trend(cfg["ns"], medians, q)
    summary = [
        [n, _fmt(m, hx), _fmt(t, hx), int(t / 3.0 <= m <= 3.0 * t)]
        for n, m, t in zip(cfg["ns"], medians, trend)
    ]
    return {
        "fluctuations.csv": _csv_text(["n", "pair", "seed_a", "seed_b", "max_deviation"], rows),
        "fluctuations_summary.csv": _csv_text(["n", "median", "reference_trend", "within_factor_3"], summary),
    }


def cmd_constants(cfg):
    return {"constants.json": _dump_json(radius_sheet(cfg["q"], cfg["l"]).to_dict(), cfg["hex_floats"])}


def cmd_bench(cfg):
    inst = sample_instance(cfg["n"], cfg["q"], cfg["seed"])
    hop = build_hamiltonian(inst)
    times = []
    for _ in range(cfg["repeat"]):
        t0 = time.perf_counter()
        power_trace_sequence(hop, cfg["k"])
        times.append(time.perf_counter() - t0)
    t0 = time.perf_counter()
    spectrum(to_dense(hop))
    dense = time.perf_counter() - t0
    # Timings are inherently nondeterministic and therefore go to the sidecar.
    return {"bench.json": _dump_json({"n": cfg["n"], "q": cfg["q"], "k": cfg["k"], "repeat": cfg["repeat"]}, False)}, {
        "moment_seconds": times, "dense_seconds": dense,
    }


HANDLERS = {
    "estimate": cmd_estimate,
    "exact": cmd_exact,
    "moments": cmd_moments,
    "anneal": cmd_anneal,
    "two-replica": cmd_two_replica,
    "concentration": cmd_concentration,
    "scan-zeros": cmd_scan_zeros,
    "fluctuations": cmd_fluctuations,
    "constants": cmd_constants,
    "bench": cmd_bench,
}


HELP = {
    "estimate": "estimate a thermal expectation for one instance",
    "exact": "exact log partition function and expectation by diagonalization",
    "moments": "exact moments tr(H^r) of one instance",
    "anneal": "disorder-averaged moments by Wick enumeration",
    "two-replica": "disorder-averaged product of two moments",
    "concentration": "Monte Carlo concentration ratio of the partition function",
    "scan-zeros": "scan |Z(beta)| on a complex disk",
    "fluctuations": "instance-to-instance spread of local expectations",
    "constants": "explicit radii and ceilings",
    "bench": "time moment computation against dense diagonalization",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sykbarvinok",
        description="Thermal expectations, disorder averages and zero scans for the SYK model.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, options in COMMANDS.items():
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
        p.add_argument("--hex-floats", action="store_true", default=None, help="write floats as hex literals")
        p.add_argument("--threads", type=int, help="cap on internal parallelism")
        for opt in options:
            flag = "--" + opt.name.replace("_", "-")
            if opt.flag:
                p.add_argument(flag, dest=opt.name, action="store_true", default=None, help=opt.help)
            else:
                p.add_argument(flag, dest=opt.name, default=None, help=f"{opt.help} (default {_canon(opt.default) or 'none'})")
    return parser


def _write(out_dir: Path, files: dict[str, str]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / name).write_text(text)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    command = args.command
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = resolve_config(command, file_values, vars(args))
    except ConfigError as exc:
        print(f"sykbarvinok {command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(cfg["threads"])

    started = time.time()
    extra_meta: dict = {}
    code = EXIT_OK
    try:
        result = HANDLERS[command](cfg)
        files, extra_meta = result if isinstance(result, tuple) else (result, {})
    except VerificationFailed as exc:
        files, message = exc.args
        print(f"sykbarvinok {command}: verification failed: {message}", file=sys.stderr)
        code = EXIT_VERIFY
    except (BudgetExceeded, ResultTooLarge) as exc:
        print(f"sykbarvinok {command}: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NumericalContamination as exc:
        print(f"sykbarvinok {command}: numerical contamination: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SykError, ValueError) as exc:
        print(f"sykbarvinok {command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = Path(cfg["out"])
    stem = command.replace("-", "_")
    meta = {
        "command": command,
        "argv": argv,
        "version": __version__,
        "numpy": np.__version__,
        "threads": cfg["threads"],
        "started_unix": started,
        "elapsed_seconds": time.time() - started,
        "outputs": sorted(files),
        "exit_code": code,
        **extra_meta,
    }
    files = dict(files)
    files[f"{stem}.config"] = canonical_config(command, cfg)
    _write(out_dir, files)
    _write(out_dir, {f"{stem}.meta.json": json.dumps(meta, indent=2, sort_keys=True) + "\n"})
    return code


def _entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    _entry()
