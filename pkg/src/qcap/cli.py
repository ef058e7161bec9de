"""Command-line front end.

Subcommands:
  capacity   capacity report for one channel
  sweep      CSV of capacities over a grid of x (figure data)
  verify     run an invariant suite, exit 1 on any failure
  optimize   maximize the quantum mutual information of a Kraus file
  export     write a named channel as a Kraus JSON file

Exit codes: 0 success, 1 verification failure, 2 bad arguments,
3 domain error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import capacities as cap
from . import channels as chn
from . import protocols as proto
from . import shannon

EXIT_OK, EXIT_VERIFY, EXIT_ARGS, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4

FAMILIES = ("depolarizing", "erasure", "dephasing", "bell-diagonal", "kraus-file")
MEASURES = ("c1", "ce", "ce-opt", "fccc-mr", "fccc-tp", "c-sd", "q-hash", "qe", "c", "q")


class UsageError(Exception):
    pass


class IOFailure(Exception):
    pass


def parse_number(text: str) -> float:
    """Decimal or fraction such as ``2/3``."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def parse_probability(text: str) -> float:
    v = parse_number(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {text!r}")
    return v


def parse_probs(text: str) -> list[float]:
    return [parse_probability(t) for t in text.split(",") if t.strip()]


def default_seed() -> int:
    env = os.environ.get("QCAP_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"QCAP_SEED must be an integer, got {env!r}")


# -- channel construction -------------------------------------------------


def build_channel(args) -> chn.QuantumChannel:
    family = args.channel
    if family == "depolarizing":
        return chn.depolarizing(args.d, _need_x(args))
    if family == "erasure":
        return chn.erasure(args.d, _need_x(args))
    if family == "dephasing":
        return chn.dephasing(_need_x(args))
    if family == "bell-diagonal":
        if not args.probs:
            raise UsageError("--probs is required for bell-diagonal channels")
        if len(args.probs) != args.d**2:
            raise UsageError(f"--probs needs {args.d ** 2} entries for d={args.d}")
        if abs(sum(args.probs) - 1) > 1e-10:
            raise UsageError("--probs must sum to 1")
        return chn.bell_diagonal(args.d, args.probs)
    if family == "kraus-file":
        if not args.file:
            raise UsageError("--file is required for kraus-file channels")
        return load_channel_file(args.file)
    raise UsageError(f"unknown channel family {family!r}")


def _need_x(args) -> float:
    if args.x is None:
        raise UsageError(f"--x is required for {args.channel} channels")
    return args.x


def load_channel_file(path) -> chn.QuantumChannel:
    try:
        return chn.load_kraus(path)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")
    except chn.KrausFormatError as exc:
        raise UsageError(f"{path}: {exc}")
    except OSError as exc:
        raise IOFailure(f"{path}: {exc.strerror or exc}")


def _family_default_measures(args, ch) -> list[str]:
    family = args.channel
    if family == "depolarizing":
        out = ["c1", "ce"]
        if args.x >= cap.mr_threshold(args.d):
            out.append("fccc-mr")
        return out + ["c-sd", "q-hash", "qe"]
    if family == "erasure":
        return ["c", "q", "ce", "c-sd"]
    if family == "dephasing":
        return ["ce", "c-sd", "q-hash", "qe"]
    if family == "bell-diagonal":
        return ["c-sd", "fccc-tp", "q-hash", "qe"]
    return ["ce-opt"] + (["q-hash"] if ch.square else [])


def _closed_form_ce(args) -> float | None:
    if args.channel == "depolarizing":
        return cap.ce_depolarizing(args.d, args.x)
    if args.channel == "erasure":
        return cap.erasure_capacities(args.d, args.x)[2]
    if args.channel == "dephasing":
        return cap.ce_dephasing(args.x)
    return None


def _classical_arm(args, ch) -> shannon.DiscreteChannel | None:
    """Classical arm whose teleportation simulates the channel, if known."""
    if args.channel == "depolarizing":
        return shannon.dary_symmetric(args.d**2, args.x)
    if args.channel == "erasure":
        return shannon.classical_erasure(args.d**2, args.x)
    if args.channel in ("dephasing", "bell-diagonal"):
        return proto.superdense_induced(ch)
    return None


def build_report(args, ch, measures: list[str]) -> cap.CapacityReport:
    report = cap.CapacityReport(ch.name or args.channel)
    family = args.channel
    ce_value, ce_method = None, "closed_form"

    def need(ok: bool, m: str):
        if not ok:
            raise UsageError(f"measure {m!r} is not available for {family} channels")

    for m in measures:
        if m == "c1":
            need(family == "depolarizing", m)
            report.add("C1", cap.c1_depolarizing(args.d, args.x), "closed_form")
        elif m == "ce":
            value = _closed_form_ce(args)
            need(value is not None, m)
            name = "CE_erasure" if family == "erasure" else "C_E"
            report.add(name, value, "closed_form")
            ce_value = value
        elif m == "ce-opt":
            res = cap.ce_optimize(ch, restarts=args.restarts, seed=args.seed)
            report.add("C_E", res.value, "optimized", res.dispersion)
            if ce_value is None:
                ce_value, ce_method = res.value, "optimized"
        elif m == "fccc-mr":
            need(family == "depolarizing", m)
            report.add("FCCC_MR", cap.fccc_mr_depolarizing(args.d, args.x), "closed_form")
        elif m == "fccc-tp":
            arm = _classical_arm(args, ch)
            need(arm is not None, m)
            res = shannon.blahut_arimoto(arm)
            report.add("FCCC_Tp", res.capacity, "simulated", res.bracket)
        elif m == "c-sd":
            try:
                res = shannon.blahut_arimoto(proto.superdense_induced(ch))
            except ValueError as exc:
                raise UsageError(str(exc))
            report.add("C_Sd", res.capacity, "simulated", res.bracket)
        elif m == "q-hash":
            need(ch.square, m)
            report.add("Q_hash", cap.hashing_bound(ch, clamp=args.clamp_hashing), "closed_form")
        elif m == "qe":
            if ce_value is None:
                ce_value = _closed_form_ce(args)
            if ce_value is None:
                res = cap.ce_optimize(ch, restarts=args.restarts, seed=args.seed)
                ce_value, ce_method = res.value, "optimized"
            report.add("Q_E", cap.qe_from_ce(max(ce_value, 0.0)), ce_method)
        elif m in ("c", "q"):
            need(family == "erasure", m)
            c, q, _ = cap.erasure_capacities(args.d, args.x)
            if m == "c":
                report.add("C_erasure", c, "closed_form")
            else:
                report.add("Q_erasure", q, "closed_form")
        else:
            raise UsageError(f"unknown measure {m!r}; choose from {', '.join(MEASURES)}")
    return report


def render_report(report: cap.CapacityReport, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "value", "method", "bracket"])
        for e in report.entries:
            w.writerow([e.name, f"{e.value:.6f}", e.method, f"{e.bracket:.3e}"])
        return buf.getvalue()
    lines = [f"channel: {report.channel}", f"{'name':<11}{'value':>10}  {'method':<12} bracket"]
    for e in report.entries:
        lines.append(f"{e.name:<11}{e.value:>10.4f}  {e.method:<12} {e.bracket:.1e}")
    return "\n".join(lines) + "\n"


def cmd_capacity(args) -> int:
    ch = build_channel(args)
    measures = args.measures or _family_default_measures(args, ch)
    report = build_report(args, ch, measures)
    sys.stdout.write(render_report(report, args.format))
    return EXIT_OK


# -- sweeps ----------------------------------------------------------------

SWEEP_COLUMNS = {
    "erasure": ["x", "C", "Q", "C_E"],
    "depolarizing": ["x", "c1", "ce", "erasure_upper", "fccc_mr", "q_hash"],
}


def sweep_grid(start: float, end: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise UsageError("--steps must be at least 1")
    if steps == 1:
        return np.array([start])
    if not end > start:
        raise UsageError("--x-end must exceed --x-start when --steps > 1")
    xs = np.linspace(start, end, steps)
    xs[-1] = end
    return xs


def sweep_rows(family: str, d: int, xs) -> list[dict]:
    """Rows of the figure data; ``None`` marks an out-of-domain cell."""
    rows = []
    log_d = float(np.log2(d))
    for x in xs:
        x = float(x)
        if family == "erasure":
            c, q, ce = cap.erasure_capacities(d, x)
            rows.append({"x": x, "C": c, "Q": q, "C_E": ce})
        elif family == "depolarizing":
            fccc = cap.fccc_mr_depolarizing(d, x) if x >= cap.mr_threshold(d) else None
            rows.append({
                "x": x,
                "c1": cap.c1_depolarizing(d, x),
                "ce": cap.ce_depolarizing(d, x),
                "erasure_upper": (1 - x) * log_d,
                "fccc_mr": fccc,
                "q_hash": cap.hashing_bound(chn.depolarizing(d, x)),
            })
        else:
            raise UsageError(f"sweeps support {', '.join(SWEEP_COLUMNS)}; got {family!r}")
    return rows


def format_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(["" if row[c] is None else f"{row[c]:.6f}" for c in columns])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    if args.channel not in SWEEP_COLUMNS:
        raise UsageError(f"sweeps support {', '.join(SWEEP_COLUMNS)}; got {args.channel!r}")
    xs = sweep_grid(args.x_start, args.x_end, args.steps)
    text = format_csv(SWEEP_COLUMNS[args.channel], sweep_rows(args.channel, args.d, xs))
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"{args.out}: {exc.strerror or exc}")
    return EXIT_OK


# -- verification suites ---------------------------------------------------


def _check(name: str, deviation: float, tol: float, **extra) -> dict:
    out = {"name": name, "deviation": float(deviation), "tol": tol, "passed": bool(deviation <= tol)}
    out.update(extra)
    return out


def suite_bell_diagonal(args) -> list[dict]:
    ch = build_channel(args)
    rep = proto.verify_bell_diagonal(ch, args.tol)
    checks = [
        _check("tp_sd_identity", rep.choi_deviation, args.tol),
        _check("bound_coincidence", rep.capacity_gap, args.tol, c_sd=rep.c_sd, fccc_tp=rep.fccc_tp),
    ]
    closed = _closed_form_ce(args)
    if closed is not None:
        checks.append(_check("closed_form_ce", abs(rep.c_sd - closed), max(args.tol, 1e-9),
                             closed_form=closed))
    return checks


def suite_optimizer(args) -> list[dict]:
    ch = build_channel(args)
    closed = _closed_form_ce(args)
    if closed is None:
        raise UsageError("optimizer suite needs a family with a closed-form C_E")
    res = cap.ce_optimize(ch, restarts=args.restarts, seed=args.seed)
    return [_check("optimized_vs_closed_form", abs(res.value - closed), args.tol,
                   optimized=res.value, closed_form=closed, dispersion=res.dispersion)]


def suite_protocols(args) -> list[dict]:
    d, x = args.d, (args.x if args.x is not None else 0.5)
    tol = args.tol
    dep = chn.depolarizing(d, x)
    sd = proto.superdense_induced(dep).matrix
    checks = [
        _check("superdense_vs_dary_symmetric",
               float(np.max(np.abs(sd - shannon.dary_symmetric(d * d, x).matrix))), tol),
        _check("teleport_vs_depolarizing",
               chn.choi_deviation(proto.teleport_induced(shannon.dary_symmetric(d * d, x), d), dep), tol),
    ]
    ce = cap.erasure_capacities(d, x)[2]
    lo = proto.c_sd(chn.erasure(d, x))
    hi = proto.fccc_tp(shannon.classical_erasure(d * d, x))
    checks.append(_check("erasure_coincidence", max(abs(lo - ce), abs(hi - ce)), 1e-6,
                         c_sd=lo, fccc_tp=hi, closed_form=ce))
    mr = proto.measure_reprepare(d, 0.0)
    checks.append(_check("measure_reprepare_threshold",
                         chn.choi_deviation(mr, chn.depolarizing(d, cap.mr_threshold(d))), 1e-12))
    mc = proto.measure_reprepare_mc(d, 0.0, args.samples, seed=args.seed)
    checks.append(_check("measure_reprepare_monte_carlo",
                         float(np.max(np.abs(mc - chn.choi(mr)))), 0.01, samples=args.samples))
    return checks


def suite_asymptotics(args) -> list[dict]:
    checks = []
    claims = ("enhancement", "bounds-gap", "quantum-gap") if args.claim == "all" else (args.claim,)
    for claim in claims:
        if claim == "enhancement":
            d = args.d
            x = 1 - 1e-6
            ratio = cap.ce_depolarizing(d, x) / cap.c1_depolarizing(d, x)
            checks.append(_check("enhancement_ratio", abs(ratio / (d + 1) - 1), 0.01,
                                 d=d, x=x, ratio=ratio, limit=d + 1))
        elif claim == "bounds-gap":
            d = args.d if args.d >= 64 else 2**10
            for x in (0.3, 0.5, 0.7):
                gap = (1 - x) * np.log2(d) - cap.c1_depolarizing(d, x)
                h = shannon.binary_entropy(x)
                checks.append(_check(f"classical_gap_x{x}", abs(gap - h), 0.01, d=d, gap=gap, h2=h))
        elif claim == "quantum-gap":
            d = args.d if args.d >= 64 else 2**10
            for x in (0.1, 0.3):
                upper = max(0.0, 1 - 2 * x) * np.log2(d)
                # hashing bound of the depolarizing channel, ce - log2 d
                lower = cap.ce_depolarizing(d, x) - np.log2(d)
                h = shannon.binary_entropy(x)
                checks.append(_check(f"quantum_gap_x{x}", abs(upper - lower - h), 0.01,
                                     d=d, gap=upper - lower, h2=h))
    return checks


SUITES = {
    "bell-diagonal": suite_bell_diagonal,
    "optimizer": suite_optimizer,
    "protocols": suite_protocols,
    "asymptotics": suite_asymptotics,
}


def cmd_verify(args) -> int:
    if args.tol is None:
        args.tol = 1e-5 if args.suite == "optimizer" else 1e-9
    if args.suite in ("bell-diagonal", "optimizer") and args.channel == "depolarizing" and args.x is None:
        args.x = 0.5
    checks = SUITES[args.suite](args)
    passed = all(c["passed"] for c in checks)
    out = {"suite": args.suite, "passed": passed, "checks": checks}
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK if passed else EXIT_VERIFY


# -- optimize / export -------------------------------------------------------


def _matrix_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def cmd_optimize(args) -> int:
    ch = load_channel_file(args.kraus)
    res = cap.ce_optimize(ch, tol=args.tol, restarts=args.restarts, seed=args.seed)
    out = {
        "ce": res.value,
        "qe": cap.qe_from_ce(max(res.value, 0.0)),
        "dispersion": res.dispersion,
        "restart_values": res.restart_values,
        "converged": res.converged,
        "argmax": _matrix_json(res.argmax),
    }
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def cmd_export(args) -> int:
    ch = build_channel(args)
    text = json.dumps(chn.to_json_dict(ch), indent=1) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"{args.out}: {exc.strerror or exc}")
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def _channel_args(p: argparse.ArgumentParser, default: str | None = None) -> None:
    p.add_argument("--channel", choices=FAMILIES, default=default, required=default is None)
    p.add_argument("--d", type=int, default=2, help="input dimension (default 2)")
    p.add_argument("--x", type=parse_probability, help="noise parameter; decimals or fractions like 2/3")
    p.add_argument("--probs", type=parse_probs, help="comma list of d^2 Pauli weights (bell-diagonal)")
    p.add_argument("--file", help="Kraus JSON file (kraus-file)")


def _seed_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (default $QCAP_SEED or 0)")
    p.add_argument("--restarts", type=int, default=8)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcap", description=__doc__.splitlines()[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="capacity report for one channel")
    _channel_args(p)
    _seed_args(p)
    p.add_argument("--measures", type=lambda s: [t.strip() for t in s.split(",") if t.strip()],
                   help=f"comma list from {', '.join(MEASURES)}")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--clamp-hashing", action="store_true", help="report max(0, hashing bound)")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("sweep", help="CSV sweep over x")
    p.add_argument("--channel", choices=tuple(SWEEP_COLUMNS), required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--x-start", type=parse_probability, default=0.0)
    p.add_argument("--x-end", type=parse_probability, default=1.0)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("--suite", choices=tuple(SUITES), required=True)
    _channel_args(p, default="depolarizing")
    _seed_args(p)
    p.add_argument("--tol", type=parse_number, default=None)
    p.add_argument("--claim", choices=("enhancement", "bounds-gap", "quantum-gap", "all"), default="all")
    p.add_argument("--samples", type=int, default=10**5, help="Monte Carlo samples (protocols suite)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("optimize", help="maximize the quantum mutual information of a Kraus file")
    p.add_argument("--kraus", required=True, help="Kraus JSON file")
    p.add_argument("--tol", type=parse_number, default=1e-8)
    _seed_args(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("export", help="write a named channel as Kraus JSON")
    _channel_args(p)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "d", 2) < 2:
            raise UsageError("--d must be at least 2")
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        if getattr(args, "restarts", 1) < 1:
            raise UsageError("--restarts must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"qcap: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except IOFailure as exc:
        print(f"qcap: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (cap.DomainError, chn.TracePreservationError) as exc:
        print(f"qcap: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except chn.ChannelError as exc:
        print(f"qcap: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except shannon.ConvergenceError as exc:
        print(f"qcap: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
