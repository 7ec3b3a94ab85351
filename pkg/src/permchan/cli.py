"""Command-line front end.

Subcommands
-----------
pack      packing counts and lower bounds for a radius or grid resolution
bound     evaluate an achievability bound at fixed M, or search maximal M
approx    closed-form approximations of achievable log2 M
curve     rate/blocklength tradeoff tables (CSV), optionally rendered to a
          figure file alongside the delimited output
simulate  Monte Carlo run with ML decoding, JSON report
verify    run the numerical self-check suite and print a pass/fail table

Exit codes: 0 ok, 2 usage/config errors, 3 numeric infeasibility,
4 verification failure.

All configuration comes from flags or an optional ``--config`` key=value
file (UTF-8, ``key = value`` lines, keys mirror the long flag names); no
environment variables are read.  Reruns with identical arguments and seed
produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, TextIO

import numpy as np

from . import approx as approx_mod
from .bounds import (
    BoundPoint,
    achievability_general,
    bsc_achievability,
    rate_of,
    search_max_m_bec,
    search_max_m_bsc,
    search_max_m_general,
)
from .errors import InfeasibleError, InputError, PermchanError, ResourceLimitError
from .packing import (
    BinaryParams,
    ChannelMatrix,
    MessageSet,
    SetKind,
    build_binary_message_set_by_size,
    build_dmc_message_set_by_grid,
    packing_count_bounds,
    packing_lower_bound_subspace,
    subspace_lower_bound_by_grid,
    volume_ratio,
)
from .probability import LOG2E, Distribution
from .sim import SimConfig, run_trials
from .verify import run_all_checks

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

CURVE_COLUMNS = ("n", "method", "m", "log2_m", "rate", "eps_bound", "capacity")

_METHODS_BY_KIND = {
    "bsc": ("THM3_BSC", "APPROX_BSC", "APPROX_BSC_CEIL"),
    "bec": ("THM4_BEC", "APPROX_BEC", "APPROX_BEC_CEIL"),
    "matrix": ("THM2_EXACT", "APPROX_GENERAL"),
}


def _fmt(value) -> str:
    """Locale-independent cell formatting: 17 significant digits."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_row(stream: TextIO, cells) -> None:
    stream.write(",".join(_fmt(c) for c in cells) + "\n")
    stream.flush()


# ---------------------------------------------------------------------------
# Channel handling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Channel:
    kind: str                       # bsc | bec | matrix
    delta: Optional[float] = None
    eta: Optional[float] = None
    matrix: Optional[ChannelMatrix] = None
    path: Optional[str] = None

    @property
    def capacity(self) -> float:
        """(rank - 1) / 2, the plot reference level."""
        if self.kind == "matrix":
            assert self.matrix is not None
            return (self.matrix.ny - 1) / 2.0
        return 0.5

    def describe(self) -> dict:
        if self.kind == "bsc":
            return {"kind": "bsc", "delta": self.delta}
        if self.kind == "bec":
            return {"kind": "bec", "eta": self.eta}
        return {"kind": "matrix", "file": self.path}


def read_matrix_file(path: str) -> ChannelMatrix:
    """Plain-text channel matrix: first line "<|X|> <|Y|>", then row-major
    whitespace-separated probabilities; rows must sum to 1 within 1e-9."""
    try:
        tokens = Path(path).read_text(encoding="utf-8").split()
    except OSError as exc:
        raise InputError(f"cannot read matrix file {path}: {exc}") from exc
    if len(tokens) < 2:
        raise InputError(f"matrix file {path} is too short")
    try:
        nx, ny = int(tokens[0]), int(tokens[1])
        values = [float(t) for t in tokens[2:]]
    except ValueError as exc:
        raise InputError(f"matrix file {path}: {exc}") from exc
    if len(values) != nx * ny:
        raise InputError(
            f"matrix file {path}: expected {nx * ny} entries, got {len(values)}")
    rows = [values[i * ny:(i + 1) * ny] for i in range(nx)]
    return ChannelMatrix(rows)


def _channel_from_args(args: argparse.Namespace) -> Channel:
    kind = args.channel
    if kind == "bsc":
        if args.delta is None:
            raise InputError("bsc channels require --delta")
        return Channel(kind="bsc", delta=args.delta)
    if kind == "bec":
        if args.eta is None:
            raise InputError("bec channels require --eta")
        if not 0.0 < args.eta < 1.0:
            raise InputError(f"--eta must lie in (0, 1), got {args.eta}")
        return Channel(kind="bec", eta=args.eta)
    if kind == "matrix":
        if args.file is None:
            raise InputError("matrix channels require --file")
        return Channel(kind="matrix", matrix=read_matrix_file(args.file),
                       path=args.file)
    raise InputError(f"unknown channel kind {kind!r}")


# ---------------------------------------------------------------------------
# Point computation shared by bound/approx/curve
# ---------------------------------------------------------------------------


def _search_point(ch: Channel, n: int, eps: float) -> BoundPoint:
    if ch.kind == "bsc":
        return search_max_m_bsc(ch.delta, n, eps)
    if ch.kind == "bec":
        return search_max_m_bec(ch.eta, n, eps)
    assert ch.matrix is not None
    return search_max_m_general(ch.matrix, n, eps)


def _approx_point(ch: Channel, n: int, eps: float, method: str) -> BoundPoint:
    if method == "APPROX_BSC":
        val = approx_mod.approx_bsc(ch.delta, n, eps)
    elif method == "APPROX_BSC_CEIL":
        val = approx_mod.approx_bsc(ch.delta, n, eps, ceil_variant=True)
    elif method == "APPROX_BEC":
        val = approx_mod.approx_bec(ch.eta, n, eps)
    elif method == "APPROX_BEC_CEIL":
        val = approx_mod.approx_bec(ch.eta, n, eps, ceil_variant=True)
    elif method == "APPROX_GENERAL":
        assert ch.matrix is not None
        val = approx_mod.approx_general(ch.matrix, n, eps)
    else:
        raise InputError(f"{method} is not an approximation method")
    m_implied = int(math.floor(2.0 ** val)) if val >= 0.0 else 0
    return BoundPoint(n=n, eps_target=eps, m_achieved=m_implied, log2_m=val,
                      rate=rate_of(val, n), eps_bound=eps, method=method)


def _curve_point(ch: Channel, n: int, eps: float, method: str) -> BoundPoint:
    if method in ("THM3_BSC", "THM4_BEC", "THM2_EXACT"):
        point = _search_point(ch, n, eps)
        # The general search downgrades its tag if it had to approximate.
        return point
    return _approx_point(ch, n, eps, method)


def _bound_at_m(ch: Channel, n: int, m: int) -> BoundPoint:
    if ch.kind == "bsc":
        ms = build_binary_message_set_by_size(ch.delta, ch.delta, m)
        val = bsc_achievability(ch.delta, ms, n)
        method = "THM3_BSC"
    elif ch.kind == "bec":
        delta = ch.eta / 2.0
        ms = build_binary_message_set_by_size(delta, delta, m)
        val = bsc_achievability(delta, ms, n)
        method = "THM4_BEC"
    else:
        raise InputError("--m is only supported for bsc/bec channels; "
                         "use --grid-n with matrix channels")
    log2_m = math.log2(m)
    return BoundPoint(n=n, eps_target=math.nan, m_achieved=m, log2_m=log2_m,
                      rate=rate_of(log2_m, n), eps_bound=val, method=method)


def _bound_at_grid(ch: Channel, n: int, grid_n: int) -> BoundPoint:
    assert ch.matrix is not None
    ms = build_dmc_message_set_by_grid(ch.matrix, grid_n)
    val = achievability_general(ms, n)
    log2_m = math.log2(len(ms))
    return BoundPoint(n=n, eps_target=math.nan, m_achieved=len(ms),
                      log2_m=log2_m, rate=rate_of(log2_m, n),
                      eps_bound=val, method="THM2_EXACT")


def _point_row(point: BoundPoint, capacity: float) -> tuple:
    return (point.n, point.method, point.m_achieved, point.log2_m,
            point.rate, point.eps_bound, capacity)


# ---------------------------------------------------------------------------
# n-grid parsing
# ---------------------------------------------------------------------------


def parse_n_grid(spec: str) -> list[int]:
    """Either a comma list of integers or "logspace:min:max:points" with
    deduplicated integer rounding; must come out strictly increasing."""
    spec = spec.strip()
    if spec.startswith("logspace:"):
        parts = spec.split(":")
        if len(parts) != 4:
            raise InputError(f"bad logspace spec {spec!r}: want logspace:min:max:points")
        try:
            lo, hi, points = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise InputError(f"bad logspace spec {spec!r}: {exc}") from exc
        if not (1 <= lo < hi) or points < 2:
            raise InputError(f"bad logspace spec {spec!r}")
        grid = np.unique(np.rint(np.geomspace(lo, hi, points)).astype(int))
        return [int(v) for v in grid]
    try:
        values = [int(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError as exc:
        raise InputError(f"bad n grid {spec!r}: {exc}") from exc
    if not values:
        raise InputError("empty n grid")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InputError(f"n grid must be strictly increasing, got {values}")
    if values[0] < 1:
        raise InputError("n grid entries must be >= 1")
    return values


# ---------------------------------------------------------------------------
# Config file support
# ---------------------------------------------------------------------------

_CONFIG_COERCE: dict[str, Callable[[str], object]] = {
    "delta": float, "eta": float, "eps": float, "lam": float, "r0": float,
    "n": int, "m": int, "k": int, "grid_n": int, "trials": int, "seed": int,
    "n_grid": str, "methods": str, "output": str, "plot": str, "file": str,
    "ceil": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
    "permute": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}

_CONFIG_ALIASES = {"lambda": "lam"}


def load_config_file(path: str) -> dict[str, object]:
    """key = value lines (or key: value); '#' starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    out: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else (":" if ":" in line else None)
        if sep is None:
            raise InputError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split(sep, 1))
        key = key.lower().replace("-", "_")
        key = _CONFIG_ALIASES.get(key, key)
        if key not in _CONFIG_COERCE:
            raise InputError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            out[key] = _CONFIG_COERCE[key](value)
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return out


def _prescan_config(argv: Sequence[str]) -> Optional[str]:
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise InputError("--config needs a path")
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


# ---------------------------------------------------------------------------
# Parser construction
# ---------------------------------------------------------------------------


def _add_channel_arguments(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("channel", choices=("bsc", "bec", "matrix"),
                     help="channel kind")
    sub.add_argument("--delta", type=float, help="bsc crossover probability")
    sub.add_argument("--eta", type=float, help="bec erasure probability")
    sub.add_argument("--file", type=str, help="matrix file path")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="permchan",
        description="Achievability bounds, approximations, and simulations "
                    "for noisy permutation channels.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_pack = subs.add_parser("pack", help="packing counts and lower bounds")
    p_pack.add_argument("--k", type=int, help="output alphabet size")
    p_pack.add_argument("--grid-n", type=int, dest="grid_n",
                        help="grid resolution (points per axis)")
    p_pack.add_argument("--r0", type=float, help="KL packing radius in bits")
    p_pack.add_argument("--lambda", type=float, dest="lam",
                        help="achievable-set volume fraction")
    p_pack.add_argument("--file", type=str, help="matrix file (lambda = |det|)")
    p_pack.add_argument("--config", type=str, help="key=value defaults file")
    p_pack.add_argument("--output", type=str, help="write CSV here instead of stdout")

    p_bound = subs.add_parser("bound", help="achievability bound / max-M search")
    _add_channel_arguments(p_bound)
    p_bound.add_argument("--n", type=int, help="blocklength")
    p_bound.add_argument("--eps", type=float, help="target error (runs the search)")
    p_bound.add_argument("--m", type=int, help="message count (direct evaluation)")
    p_bound.add_argument("--grid-n", type=int, dest="grid_n",
                         help="grid resolution for matrix channels")
    p_bound.add_argument("--config", type=str, help="key=value defaults file")
    p_bound.add_argument("--output", type=str, help="write CSV here instead of stdout")

    p_approx = subs.add_parser("approx", help="closed-form log2 M approximations")
    _add_channel_arguments(p_approx)
    p_approx.add_argument("--n", type=int, help="blocklength")
    p_approx.add_argument("--eps", type=float, help="target error")
    p_approx.add_argument("--ceil", action="store_true",
                          help="round the implied size up to an integer first")
    p_approx.add_argument("--config", type=str, help="key=value defaults file")
    p_approx.add_argument("--output", type=str, help="write CSV here instead of stdout")

    p_curve = subs.add_parser("curve", help="tradeoff curve over an n grid")
    _add_channel_arguments(p_curve)
    p_curve.add_argument("--eps", type=float, help="target error")
    p_curve.add_argument("--n-grid", type=str, dest="n_grid",
                         help='"logspace:min:max:points" or comma list')
    p_curve.add_argument("--methods", type=str,
                         help="comma list of method tags (default: all for the kind)")
    p_curve.add_argument("--output", type=str, help="CSV output path (default stdout)")
    p_curve.add_argument("--plot", type=str,
                         help="also render the curve figure to this file")
    p_curve.add_argument("--config", type=str, help="key=value defaults file")

    p_sim = subs.add_parser("simulate", help="Monte Carlo validation run")
    _add_channel_arguments(p_sim)
    p_sim.add_argument("--n", type=int, help="blocklength")
    p_sim.add_argument("--m", type=int, help="message count (bsc/bec)")
    p_sim.add_argument("--grid-n", type=int, dest="grid_n",
                       help="grid resolution (matrix channels)")
    p_sim.add_argument("--trials", type=int, help="number of trials")
    p_sim.add_argument("--seed", type=int, help="RNG seed (required)")
    p_sim.add_argument("--permute", dest="permute", action="store_true",
                       default=True, help="apply the permutation stage (default)")
    p_sim.add_argument("--no-permute", dest="permute", action="store_false",
                       help="skip the permutation stage (iid equivalence)")
    p_sim.add_argument("--output", type=str, help="write JSON here instead of stdout")
    p_sim.add_argument("--config", type=str, help="key=value defaults file")

    p_verify = subs.add_parser("verify", help="run the numerical self checks")
    p_verify.add_argument("--seed", type=int, default=1234,
                          help="seed for the randomized checks")

    sub_map = {"pack": p_pack, "bound": p_bound, "approx": p_approx,
               "curve": p_curve, "simulate": p_sim, "verify": p_verify}
    return parser, sub_map


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise InputError(f"--{name.replace('_', '-')} is required")


def _open_output(path: Optional[str]):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def _cmd_pack(args: argparse.Namespace) -> int:
    _require(args, "k")
    if args.k < 2:
        raise InputError("--k must be >= 2")
    if (args.grid_n is None) == (args.r0 is None):
        raise InputError("give exactly one of --grid-n or --r0")
    if args.grid_n is not None:
        if args.grid_n < 1:
            raise InputError("--grid-n must be >= 1")
        r0 = 2.0 * LOG2E / (args.grid_n * args.grid_n)
        grid_n = args.grid_n
        by_grid = True
    else:
        r0 = args.r0
        by_grid = False
    lam = args.lam
    if args.file is not None:
        if lam is not None:
            raise InputError("give --lambda or --file, not both")
        lam = volume_ratio(read_matrix_file(args.file))

    lower, upper, exact = packing_count_bounds(r0, args.k)
    if not by_grid:
        grid_n = int(math.floor(math.sqrt(2.0 * LOG2E / r0) + 1e-9))
    if lam is not None:
        if by_grid:
            sub = subspace_lower_bound_by_grid(grid_n, args.k, lam)
        else:
            sub = packing_lower_bound_subspace(r0, args.k, lam)
    else:
        sub = None

    stream, owned = _open_output(args.output)
    try:
        _write_row(stream, ("k", "grid_n", "r0", "exact_grid", "count_lower",
                            "count_upper", "lambda", "subspace_lower"))
        _write_row(stream, (args.k, grid_n, r0, exact, lower, upper,
                            "" if lam is None else lam,
                            "" if sub is None else sub))
    finally:
        if owned:
            stream.close()
    return EXIT_OK


def _emit_points(points: list[BoundPoint], capacity: float,
                 output: Optional[str]) -> None:
    stream, owned = _open_output(output)
    try:
        _write_row(stream, CURVE_COLUMNS)
        for p in points:
            _write_row(stream, _point_row(p, capacity))
    finally:
        if owned:
            stream.close()


def _cmd_bound(args: argparse.Namespace) -> int:
    ch = _channel_from_args(args)
    _require(args, "n")
    if args.n < 1:
        raise InputError("--n must be >= 1")
    selectors = [s for s in ("eps", "m", "grid_n") if getattr(args, s) is not None]
    if len(selectors) != 1:
        raise InputError("give exactly one of --eps, --m, or --grid-n")
    if args.eps is not None:
        point = _search_point(ch, args.n, args.eps)
    elif args.m is not None:
        if args.m < 2:
            raise InputError("--m must be >= 2")
        point = _bound_at_m(ch, args.n, args.m)
    else:
        if ch.kind != "matrix":
            raise InputError("--grid-n applies to matrix channels only")
        point = _bound_at_grid(ch, args.n, args.grid_n)
    _emit_points([point], ch.capacity, args.output)
    return EXIT_OK


def _cmd_approx(args: argparse.Namespace) -> int:
    ch = _channel_from_args(args)
    _require(args, "n", "eps")
    if ch.kind == "bsc":
        method = "APPROX_BSC_CEIL" if args.ceil else "APPROX_BSC"
    elif ch.kind == "bec":
        method = "APPROX_BEC_CEIL" if args.ceil else "APPROX_BEC"
    else:
        if args.ceil:
            raise InputError("--ceil applies to bsc/bec channels only")
        method = "APPROX_GENERAL"
    point = _approx_point(ch, args.n, args.eps, method)
    _emit_points([point], ch.capacity, args.output)
    return EXIT_OK


def _cmd_curve(args: argparse.Namespace) -> int:
    ch = _channel_from_args(args)
    _require(args, "eps", "n_grid")
    grid = parse_n_grid(args.n_grid)
    allowed = _METHODS_BY_KIND[ch.kind]
    if args.methods is None:
        methods = list(allowed)
    else:
        methods = [tok.strip() for tok in args.methods.split(",") if tok.strip()]
        for m in methods:
            if m not in allowed:
                raise InputError(
                    f"method {m!r} is not available for {ch.kind} channels "
                    f"(choose from {', '.join(allowed)})")

    stream, owned = _open_output(args.output)
    failures: list[str] = []
    rows_for_plot: list[dict] = []
    try:
        _write_row(stream, CURVE_COLUMNS)
        for n in grid:
            for method in methods:
                try:
                    point = _curve_point(ch, n, args.eps, method)
                except PermchanError as exc:
                    failures.append(f"n={n} method={method}: {exc}")
                    continue
                _write_row(stream, _point_row(point, ch.capacity))
                rows_for_plot.append({"n": point.n, "method": point.method,
                                      "rate": point.rate})
    finally:
        if owned:
            stream.close()

    if args.plot is not None and rows_for_plot:
        from .plotting import save_rate_curve_figure
        save_rate_curve_figure(rows_for_plot, args.plot, capacity=ch.capacity,
                               title=_curve_title(ch, args.eps))
    for msg in failures:
        print(f"curve point failed: {msg}", file=sys.stderr)
    return EXIT_NUMERIC if failures else EXIT_OK


def _curve_title(ch: Channel, eps: float) -> str:
    if ch.kind == "bsc":
        return f"bsc delta={ch.delta:g}, eps={eps:g}"
    if ch.kind == "bec":
        return f"bec eta={ch.eta:g}, eps={eps:g}"
    return f"matrix {ch.path}, eps={eps:g}"


def _cmd_simulate(args: argparse.Namespace) -> int:
    ch = _channel_from_args(args)
    _require(args, "n", "trials", "seed")
    if args.trials < 1:
        raise InputError("--trials must be >= 1")

    if ch.kind == "matrix":
        _require(args, "grid_n")
        w = ch.matrix
        ms = build_dmc_message_set_by_grid(w, args.grid_n)
        try:
            analytic = achievability_general(ms, args.n)
        except ResourceLimitError:
            analytic = None
        config_echo = {**ch.describe(), "grid_n": args.grid_n}
    else:
        _require(args, "m")
        if args.m < 1:
            raise InputError("--m must be >= 1")
        # The erasure channel is simulated through its error-equivalent
        # symmetric channel at half the erasure probability.
        delta = ch.delta if ch.kind == "bsc" else ch.eta / 2.0
        w = ChannelMatrix.bsc(delta)
        if args.m == 1:
            ms = MessageSet(centers=(Distribution((delta, 1 - delta)),),
                            radius_r0=0.0, grid_n=1, kind=SetKind.BINARY,
                            binary_params=BinaryParams(delta, delta, 1 - 2 * delta))
            analytic = 0.0
        else:
            ms = build_binary_message_set_by_size(delta, delta, args.m)
            analytic = bsc_achievability(delta, ms, args.n)
        config_echo = ch.describe()
        if ch.kind == "bec":
            config_echo["simulated_as_bsc_delta"] = delta

    report = run_trials(SimConfig(channel=w, message_set=ms, n=args.n,
                                  trials=args.trials, seed=args.seed,
                                  permute=args.permute))
    payload = {
        "config": {
            "channel": config_echo,
            "n": args.n,
            "m": len(ms),
            "trials": args.trials,
            "seed": args.seed,
            "permute": args.permute,
        },
        "report": {
            "errors": report.errors,
            "trials": report.trials,
            "p_hat": report.p_hat,
            "stderr": report.stderr,
            "ci95": [report.ci95[0], report.ci95[1]],
            "ties": report.ties,
        },
        "analytic_bound": analytic,
    }
    text = json.dumps(payload, indent=2)
    if args.output is None:
        print(text)
    else:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    results = run_all_checks(seed=args.seed)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.detail}")
        failed += 0 if r.passed else 1
    print(f"{failed} of {len(results)} checks failed"
          if failed else f"all {len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


_COMMANDS = {
    "pack": _cmd_pack,
    "bound": _cmd_bound,
    "approx": _cmd_approx,
    "curve": _cmd_curve,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, sub_map = build_parser()
    try:
        config_path = _prescan_config(argv)
        if config_path is not None:
            defaults = load_config_file(config_path)
            # Defaults apply to every subparser that knows the key; explicit
            # flags still win since parsing overrides defaults.
            for sub in sub_map.values():
                known = {a.dest for a in sub._actions}
                sub.set_defaults(**{k: v for k, v in defaults.items() if k in known})
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (InfeasibleError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PermchanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
