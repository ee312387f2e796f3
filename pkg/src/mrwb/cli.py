"""Command line front end.

Subcommands mirror the library: `keygen` / `sign` / `open` move keys and
signatures through files, `profile` measures the software stage breakdown,
`dse pr` / `dse pt` / `dse pareto` search a measured cut library, and
`predict` estimates cut runtimes from a profile.

Exit status: 0 for success or an accepted signature, 1 for infeasible
search problems and rejected (or unparseable) signatures, 2 for usage
errors and malformed input files.
"""

import argparse
import secrets
import sys
from importlib import resources
from pathlib import Path

from . import accel, dse, profiler, serialization
from . import mpcith
from .mpcith import PRESETS

_BUNDLED_LIBRARY = "table3_zynq7000"
_BUNDLED_COMPOSITIONS = "cut_compositions"
_BUNDLED_PROFILE = "table1_sw_profile"


class _InputError(Exception):
    """A named input that could not be located or read."""


def _read_named_input(value: str, kind: str) -> str:
    """Resolve a path, falling back to the bundled data directory."""
    p = Path(value)
    if p.is_file():
        return p.read_text()
    if not any(ch in value for ch in "/\\"):
        for suffix in (".ini", ".csv"):
            res = resources.files("mrwb.data").joinpath(value + suffix)
            if res.is_file():
                return res.read_text()
    raise _InputError(f"no such {kind}: {value}")


def _seed_bytes(hexval, nbytes: int, flag: str) -> bytes:
    if hexval is None:
        return secrets.token_bytes(nbytes)
    try:
        raw = bytes.fromhex(hexval)
    except ValueError:
        raise _InputError(f"{flag} must be hex") from None
    if len(raw) != nbytes:
        raise _InputError(f"{flag} must be {nbytes} bytes ({2 * nbytes} hex digits)")
    return raw


def _load_profile(value: str) -> profiler.SoftwareProfile:
    return profiler.load_profile_csv(_read_named_input(value, "profile"))


def _load_library(value: str) -> serialization.LibraryConfig:
    return serialization.parse_library_config(_read_named_input(value, "library"))


def _pki_profile(args) -> dse.PkiProfile:
    return dse.PkiProfile(
        sign_weight=args.sign_weight,
        open_count=args.open_count,
        keygen_weight=args.keygen_weight,
    )


# ---------------------------------------------------------------- commands

def _cmd_keygen(args) -> int:
    randomness = _seed_bytes(args.seed, 2 * mpcith.SEED_LEN, "--seed")
    pk, sk = mpcith.keygen(PRESETS[args.params], randomness)
    Path(args.pk).write_bytes(serialization.serialize_public_key(pk))
    Path(args.sk).write_bytes(serialization.serialize_secret_key(sk))
    print(f"wrote {args.pk} and {args.sk}")
    return 0


def _cmd_sign(args) -> int:
    sk = serialization.parse_secret_key(Path(args.sk).read_bytes())
    message = Path(args.message).read_bytes()
    randomness = _seed_bytes(args.seed, mpcith.SALT_LEN, "--seed")
    sig = mpcith.sign(sk, message, randomness)
    Path(args.out).write_bytes(serialization.serialize_signature(sig))
    print(f"wrote {args.out}")
    return 0


def _cmd_open(args) -> int:
    pk = serialization.parse_public_key(Path(args.pk).read_bytes())
    message = Path(args.message).read_bytes()
    try:
        sig = serialization.parse_signature(Path(args.sig).read_bytes())
    except serialization.FormatError:
        print("reject: malformed")
        return 1
    if mpcith.open(pk, message, sig):
        print("accept")
        return 0
    print("reject")
    return 1


def _cmd_profile(args) -> int:
    prof = profiler.profile(PRESETS[args.params], runs=args.runs)
    if args.csv:
        sys.stdout.write(profiler.emit_profile_csv(prof))
    else:
        sys.stdout.write(profiler.emit_breakdown(prof))
    return 0


def _budget(args) -> dse.ResourceBudget:
    return dse.ResourceBudget(
        max_kluts=args.max_kluts,
        max_kffs=args.max_kffs,
        max_brams=args.max_brams,
        max_dsps=args.max_dsps,
    )


def _report_infeasible(report: dse.SolveReport) -> None:
    print("infeasible")
    for ee in report.evaluated:
        if not ee.feasible:
            print(f"  {ee.entry.name}: {ee.violated} exceeds the limit")


def _cmd_dse_pr(args) -> int:
    lib = _load_library(args.lib).block_library()
    report = dse.solve_pr(lib, _pki_profile(args), _budget(args))
    if args.csv:
        sys.stdout.write(dse.export_plot_data(report))
        return 0 if report.feasible else 1
    if not report.feasible:
        _report_infeasible(report)
        return 1
    best = report.ranking[0]
    print(f"winner: {best.entry.name}")
    print(f"T = {best.total_ms:.2f} ms")
    return 0


def _cmd_dse_pt(args) -> int:
    lib = _load_library(args.lib).block_library()
    report = dse.solve_pt(lib, _pki_profile(args), args.tc, objective=args.objective)
    if args.csv:
        sys.stdout.write(dse.export_plot_data(report))
        return 0 if report.feasible else 1
    if not report.feasible:
        _report_infeasible(report)
        return 1
    best = report.ranking[0]
    print(f"winner: {best.entry.name}")
    print(f"{args.objective} = {best.objective:g}")
    print(f"T = {best.total_ms:.2f} ms")
    return 0


def _cmd_dse_pareto(args) -> int:
    lib = _load_library(args.lib).block_library()
    front = dse.pareto_front(lib, _pki_profile(args), resource=args.resource)
    if args.csv:
        sys.stdout.write(dse.export_plot_data(front))
        return 0
    for point in front:
        print(f"{point.entry.name}: T = {point.total_ms:.2f} ms, "
              f"{args.resource} = {point.resource_value:g}")
    return 0


def _cmd_predict(args) -> int:
    config = _load_library(args.lib)
    if args.cut not in config.compositions:
        known = ", ".join(sorted(config.compositions)) or "none"
        raise _InputError(f"no composition named {args.cut!r} (have: {known})")
    cut = config.compositions[args.cut]
    prof = _load_profile(args.profile)
    cfg = accel.AccelConfig(
        parallelism=args.parallelism,
        clock_mhz=args.clock_mhz,
        pipeline_latency=args.pipeline_latency,
    )
    pred = accel.predict_cut_runtime(cut, PRESETS[args.params], prof, cfg,
                                     message_len=args.message_len)
    for op in profiler.OPERATIONS:
        print(f"t_{op} = {pred.time_ms(op):.2f} ms")
    return 0


# ------------------------------------------------------------------ parser

def _add_weights(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sign-weight", type=float, default=1.0,
                   help="fraction of signing traffic (default 1)")
    p.add_argument("--open-count", type=int, default=1,
                   help="verifications per signature (default 1)")
    p.add_argument("--keygen-weight", type=float, default=0.0,
                   help="key generations per signature (default 0)")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="mrwb", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key pair")
    p.add_argument("--params", choices=sorted(PRESETS), default="desk")
    p.add_argument("--seed", help="32-byte hex randomness (default: fresh)")
    p.add_argument("--pk", required=True, help="public key output path")
    p.add_argument("--sk", required=True, help="secret key output path")
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("sign", help="sign a message file")
    p.add_argument("--sk", required=True, help="secret key path")
    p.add_argument("--message", required=True, help="message file")
    p.add_argument("--out", required=True, help="signature output path")
    p.add_argument("--seed", help="32-byte hex randomness (default: fresh)")
    p.set_defaults(func=_cmd_sign)

    p = sub.add_parser("open", help="verify a signature file")
    p.add_argument("--pk", required=True, help="public key path")
    p.add_argument("--message", required=True, help="message file")
    p.add_argument("--sig", required=True, help="signature path")
    p.set_defaults(func=_cmd_open)

    p = sub.add_parser("profile", help="measure the software stage breakdown")
    p.add_argument("--params", choices=sorted(PRESETS), default="desk")
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--csv", action="store_true", help="emit CSV instead of a table")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("dse", help="search a measured cut library")
    dse_sub = p.add_subparsers(dest="problem", required=True)

    q = dse_sub.add_parser("pr", help="fastest cut within a resource budget")
    q.add_argument("--lib", default=_BUNDLED_LIBRARY)
    _add_weights(q)
    q.add_argument("--max-kluts", type=float)
    q.add_argument("--max-kffs", type=float)
    q.add_argument("--max-brams", type=float)
    q.add_argument("--max-dsps", type=float)
    q.add_argument("--csv", action="store_true")
    q.set_defaults(func=_cmd_dse_pr)

    q = dse_sub.add_parser("pt", help="cheapest cut under a runtime cap")
    q.add_argument("--lib", default=_BUNDLED_LIBRARY)
    _add_weights(q)
    q.add_argument("--tc", type=float, required=True, help="runtime cap in ms")
    q.add_argument("--objective", choices=dse.RESOURCE_DIMS, default="kluts")
    q.add_argument("--csv", action="store_true")
    q.set_defaults(func=_cmd_dse_pt)

    q = dse_sub.add_parser("pareto", help="runtime/resource pareto front")
    q.add_argument("--lib", default=_BUNDLED_LIBRARY)
    _add_weights(q)
    q.add_argument("--resource", choices=dse.RESOURCE_DIMS, default="kluts")
    q.add_argument("--csv", action="store_true")
    q.set_defaults(func=_cmd_dse_pareto)

    p = sub.add_parser("predict", help="estimate cut runtimes from a profile")
    p.add_argument("--cut", required=True, help="composition name")
    p.add_argument("--params", choices=sorted(PRESETS), default="ia-like")
    p.add_argument("--profile", default=_BUNDLED_PROFILE,
                   help="profile CSV (path or bundled name)")
    p.add_argument("--lib", default=_BUNDLED_COMPOSITIONS,
                   help="composition config (path or bundled name)")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--clock-mhz", type=float, default=accel.DEFAULT_CLOCK_MHZ)
    p.add_argument("--pipeline-latency", type=int, default=4)
    p.add_argument("--message-len", type=int, default=0)
    p.set_defaults(func=_cmd_predict)

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse owns --help and usage failures
        return 0 if e.code in (0, None) else 2
    try:
        return args.func(args)
    except _InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except serialization.FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (accel.ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
