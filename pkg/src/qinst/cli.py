"""Command-line interface.

Subcommands construct a realization from a JSON description, verify it, and
emit the construction plus a machine-readable run report.  Exit codes:
0 all checks pass, 1 a verification check failed, 2 malformed input,
3 a documented precondition was violated.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import serialize as sz
from .cpmap import stinespring_minimal, verify_stinespring
from .errors import PreconditionError
from .frameorbit import cross_check_schemes, tele_minimal, tele_nonminimal, verify_teleportation
from .instruments import minimal_dilation, sample_counts, verify_dilation
from .protocols import (
    ideal_teleportation_schemes,
    orthogonal_fidelity,
    single_clone_fidelity,
    telecloning_schemes,
    unot_channel,
    unot_channel_grid,
    unot_spec,
)
from .reports import VerificationReport

DEFAULT_SEED = 20240901


class RunReport:
    def __init__(self, command: str, payload: bytes, seed: int | None = None):
        self.command = command
        self.digest = hashlib.sha256(payload).hexdigest()
        self.seed = seed
        self.checks: list[dict] = []
        self.values: dict = {}
        self.start = time.perf_counter()

    def absorb(self, report: VerificationReport, prefix: str = "") -> None:
        for c in report.checks:
            self.checks.append(
                {
                    "name": prefix + c.name,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "pass": c.passed,
                }
            )

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "input_digest": self.digest,
            "pass": self.passed,
            "checks": self.checks,
            "timings": {"total_s": time.perf_counter() - self.start},
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.values:
            out["values"] = self.values
        return out


def _read_payload(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _emit(document: dict, fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        text = json.dumps(document, indent=2, sort_keys=True)
    else:
        report = document.get("report", {})
        lines = [f"command: {report.get('command', '?')}"]
        if "seed" in report:
            lines.append(f"seed: {report['seed']}")
        for c in report.get("checks", []):
            tag = "ok  " if c["pass"] else "FAIL"
            lines.append(
                f"  [{tag}] {c['name']}: residual {c['residual']:.3e} (tol {c['tolerance']:.1e})"
            )
        for key, val in report.get("values", {}).items():
            lines.append(f"  {key}: {val}")
        lines.append("PASS" if report.get("pass") else "FAIL")
        text = "\n".join(lines)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_dilate_map(args) -> int:
    payload = _read_payload(args.input)
    run = RunReport("dilate-map", payload)
    cp_map = sz.cpmap_from_json(json.loads(payload))
    dilation = stinespring_minimal(cp_map)
    run.absorb(verify_stinespring(cp_map, dilation, args.tol))
    run.values["ancilla_dim"] = dilation.ancilla_dim
    _emit({"dilation": sz.stinespring_to_json(dilation), "report": run.to_dict()},
          args.format, args.output)
    return 0 if run.passed else 1


def cmd_dilate_instrument(args) -> int:
    payload = _read_payload(args.input)
    run = RunReport("dilate-instrument", payload)
    instr = sz.instrument_from_json(json.loads(payload))
    instr.require_normalized(args.tol)
    dilation = minimal_dilation(instr)
    run.absorb(verify_dilation(instr, dilation, args.tol))
    run.values["ancilla_dim"] = dilation.ancilla_dim
    _emit({"dilation": sz.instrument_dilation_to_json(dilation), "report": run.to_dict()},
          args.format, args.output)
    return 0 if run.passed else 1


def cmd_teleport(args) -> int:
    payload = _read_payload(args.input)
    run = RunReport("teleport", payload)
    spec = sz.frame_orbit_spec_from_json(json.loads(payload))
    build = {"minimal": tele_minimal, "nonminimal": tele_nonminimal}
    scheme = build[args.kind](spec)
    run.absorb(verify_teleportation(spec, scheme, args.tol))
    document = {"scheme": sz.scheme_to_json(scheme), "report": run.to_dict()}
    if args.cross:
        other = build["nonminimal" if args.kind == "minimal" else "minimal"](spec)
        run.absorb(cross_check_schemes(spec, scheme, other, args.tol))
        document["cross_scheme"] = sz.scheme_to_json(other)
    document["report"] = run.to_dict()
    _emit(document, args.format, args.output)
    return 0 if run.passed else 1


def cmd_example(args) -> int:
    run = RunReport(f"example:{args.name}", args.name.encode(), seed=args.seed)
    document: dict = {}
    if args.name == "teleport":
        schemes = ideal_teleportation_schemes(args.d)
        run.absorb(verify_teleportation(schemes.spec, schemes.minimal, args.tol), "minimal/")
        run.absorb(verify_teleportation(schemes.spec, schemes.nonminimal, args.tol), "nonminimal/")
        document["spec"] = sz.frame_orbit_spec_to_json(schemes.spec)
        document["minimal"] = sz.scheme_to_json(schemes.minimal)
        document["nonminimal"] = sz.scheme_to_json(schemes.nonminimal)
    elif args.name == "clone":
        if args.n_copies != 1:
            raise PreconditionError("cloning schemes are built for one input copy (N=1)")
        schemes = telecloning_schemes(args.d, args.m_copies)
        run.absorb(verify_teleportation(schemes.spec, schemes.minimal, args.tol), "minimal/")
        run.absorb(verify_teleportation(schemes.spec, schemes.nonminimal, args.tol), "nonminimal/")
        psi = np.zeros(args.d)
        psi[0] = 1.0
        fid = single_clone_fidelity(schemes.spec.seed_map, psi, args.d, args.m_copies)
        run.values["single_clone_fidelity"] = fid
        if args.d == 2 and args.m_copies == 2:
            run.checks.append(
                {
                    "name": "single-clone-fidelity-5/6",
                    "residual": abs(fid - 5.0 / 6.0),
                    "tolerance": args.tol,
                    "pass": abs(fid - 5.0 / 6.0) <= args.tol,
                }
            )
        document["spec"] = sz.frame_orbit_spec_to_json(schemes.spec)
        document["minimal"] = sz.scheme_to_json(schemes.minimal)
        document["nonminimal"] = sz.scheme_to_json(schemes.nonminimal)
    elif args.name == "unot":
        spec = unot_spec()
        scheme = tele_minimal(spec)
        run.absorb(verify_teleportation(spec, scheme, args.tol), "minimal/")
        channel = unot_channel()
        fid = orthogonal_fidelity(channel, np.array([1.0, 0.0]))
        run.values["orthogonal_fidelity"] = fid
        run.checks.append(
            {
                "name": "orthogonal-fidelity-2/3",
                "residual": abs(fid - 2.0 / 3.0),
                "tolerance": args.tol,
                "pass": abs(fid - 2.0 / 3.0) <= args.tol,
            }
        )
        oracle = unot_channel_grid(10_000, args.seed)
        grid_gap = float(np.abs(channel.choi - oracle.choi).max())
        run.checks.append(
            {
                "name": "design-vs-grid-oracle",
                "residual": grid_gap,
                "tolerance": 1e-3,
                "pass": grid_gap <= 1e-3,
            }
        )
        document["spec"] = sz.frame_orbit_spec_to_json(spec)
        document["minimal"] = sz.scheme_to_json(scheme)
    else:
        raise PreconditionError(f"unknown example {args.name!r}")
    document["report"] = run.to_dict()
    _emit(document, args.format, args.output)
    return 0 if run.passed else 1


def cmd_sample(args) -> int:
    payload = _read_payload(args.input)
    run = RunReport("sample", payload, seed=args.seed)
    instr = sz.instrument_from_json(json.loads(payload))
    state = sz.matrix_from_json(json.loads(_read_payload(args.state)))
    counts = sample_counts(instr, state, args.n, args.seed)
    posteriors = {}
    for o in instr.outcomes:
        post = o.density.apply(state)
        tr = float(np.trace(post).real)
        if tr > 1e-12:
            posteriors[o.label] = sz.matrix_to_json(post / tr)
    run.values["counts"] = counts
    run.values["n"] = args.n
    document = {
        "histogram": counts,
        "frequencies": {k: v / args.n for k, v in counts.items()},
        "posteriors": posteriors,
        "report": run.to_dict(),
    }
    _emit(document, args.format, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qinst",
        description="Construct and verify realization schemes for quantum instruments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("input", help="input JSON file, or - for stdin")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--format", choices=["json", "text"], default="json")
        p.add_argument("-o", "--output", default=None, help="write the document to a file")

    p = sub.add_parser("dilate-map", help="minimal isometric dilation of a CP map")
    common(p)
    p.set_defaults(func=cmd_dilate_map)

    p = sub.add_parser("dilate-instrument", help="minimal ancilla-POVM dilation of an instrument")
    common(p)
    p.set_defaults(func=cmd_dilate_instrument)

    p = sub.add_parser("teleport", help="teleportation scheme for a frame-orbit specification")
    common(p)
    p.add_argument("--kind", choices=["minimal", "nonminimal"], default="nonminimal")
    p.add_argument("--cross", action="store_true", help="also build the other kind and cross-check")
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("example", help="bundled constructions: teleport | clone | unot")
    p.add_argument("name", choices=["teleport", "clone", "unot"])
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--N", dest="n_copies", type=int, default=1)
    p.add_argument("--M", dest="m_copies", type=int, default=2)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common(p, needs_input=False)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("sample", help="sample outcomes of an instrument on a state")
    common(p)
    p.add_argument("--state", required=True, help="density-matrix JSON file")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 3
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"could not parse input: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
