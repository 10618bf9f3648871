"""Command-line harness: parameter sweeps and protocol demos with CSV output.

Every command writes a CSV table (UTF-8, comma-separated, ``\\n`` line
endings) preceded by ``#`` metadata comment lines recording the tool version,
the full command line, and the RNG algorithm and seed where applicable.
Numbers are printed with 17 significant digits so they round-trip exactly.

Exit codes: 0 success, 2 argument error, 3 numerical non-convergence.

An optional ``--config FILE`` may supply any long flag as ``key = value``
lines (keys named like the flags without the leading dashes); explicit flags
override the file.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import netsim as ns
from . import parity as pa
from . import protocols as pr
from . import pulse as pu
from .dephase import DephasingParams, cj_fidelity_dephased
from .qstate import BellLabel, bell
from .scatter import EmitterParams, transmission

__all__ = ["main", "run"]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_csv(path: str | None, header: list[str], rows: list[list],
               meta: list[str]) -> None:
    lines = [f"# {m}" for m in meta]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _meta(argv: list[str], extra: list[str] | None = None) -> list[str]:
    meta = [f"chiralnet {__version__}",
            "command: chiralnet " + " ".join(argv)]
    if extra:
        meta.extend(extra)
    return meta


def _infidelities(t0: complex, t1: complex) -> tuple[float, float]:
    f1 = pa.cj_fidelity_closed_form(pa.Protocol.ONE_CLICK, t0, t1)
    f2 = pa.cj_fidelity_closed_form(pa.Protocol.TWO_CLICK, t0, t1)
    return 1.0 - f1, 1.0 - f2


def _cmd_sweep_beta(args, argv):
    betas = np.linspace(args.start, args.stop, args.points)
    rows = []
    for b in betas:
        t = transmission(EmitterParams(beta=b))
        i1, i2 = _infidelities(t, t)
        rows.append([b,
                     pa.success_prob_closed_form(pa.Protocol.ONE_CLICK, b),
                     pa.success_prob_closed_form(pa.Protocol.TWO_CLICK, b),
                     i1, i2])
    _write_csv(args.out, ["beta", "P1", "P2", "infid1", "infid2"], rows, _meta(argv))


def _cmd_sweep_detuning(args, argv):
    deltas = np.linspace(args.start, args.stop, args.points)
    rows = []
    for d in deltas:
        t0 = transmission(EmitterParams(beta=args.beta, delta=-d))
        t1 = transmission(EmitterParams(beta=args.beta, delta=d))
        i1, i2 = _infidelities(t0, t1)
        rows.append([d, i1, i2])
    _write_csv(args.out, ["delta_over_gamma", "infid1", "infid2"], rows,
               _meta(argv, [f"mutual detuning, beta={_fmt(args.beta)}"]))


def _cmd_detuning_grid(args, argv):
    deltas = np.linspace(args.start, args.stop, args.points)
    rows = []
    for d0 in deltas:
        t0 = transmission(EmitterParams(beta=args.beta, delta=d0))
        for d1 in deltas:
            t1 = transmission(EmitterParams(beta=args.beta, delta=d1))
            rows.append([d0, d1,
                         1.0 - pa.cj_fidelity_closed_form(pa.Protocol.TWO_CLICK, t0, t1)])
    _write_csv(args.out, ["delta0_over_gamma", "delta1_over_gamma", "infid2"],
               rows, _meta(argv, [f"beta={_fmt(args.beta)}"]))


def _protocol_arg(name: str) -> pa.Protocol:
    return pa.Protocol.ONE_CLICK if name == "one-click" else pa.Protocol.TWO_CLICK


def _cmd_pulse(args, argv):
    protocol = _protocol_arg(args.protocol)
    if args.sigma is not None:
        sigmas = [args.sigma]
    else:
        sigmas = np.geomspace(args.start, args.stop, args.points)
    p0 = EmitterParams(beta=1.0, gamma_r=args.gamma_r0)
    p1 = EmitterParams(beta=1.0, gamma_r=args.gamma_r1)
    rows = []
    for s in sigmas:
        f = pu.cj_fidelity_pulse(protocol, p0, p1, pu.PulseSpec(sigma=s))
        rows.append([s, 1.0 - f,
                     pu.cj_infidelity_asymptote(protocol, s, args.gamma_r0, args.gamma_r1)])
    _write_csv(args.out, ["sigma_over_gamma", "infid_quadrature", "infid_asymptote"],
               rows, _meta(argv, [f"protocol={args.protocol}"]))


def _cmd_dephasing(args, argv):
    fracs = np.linspace(args.start, args.stop, args.points)
    rows = []
    for u in fracs:
        d = DephasingParams(u)
        rows.append([u,
                     1.0 - cj_fidelity_dephased(pa.Protocol.ONE_CLICK, d),
                     1.0 - cj_fidelity_dephased(pa.Protocol.TWO_CLICK, d)])
    _write_csv(args.out, ["inc_fraction", "infid1", "infid2"], rows, _meta(argv))


def _parity_impl(args) -> pr.ParityMeasurement:
    if args.protocol == "ideal":
        return pr.IdealParity()
    p0 = EmitterParams(beta=args.beta, delta=args.delta0)
    p1 = EmitterParams(beta=args.beta, delta=args.delta1)
    cls = pr.OneClickParity if args.protocol == "one-click" else pr.TwoClickParity
    return cls(p0, p1)


def _pair_layout(a, b):
    big = np.kron(a.matrix, b.matrix).reshape([2] * 8)
    perm = [0, 2, 1, 3]
    return np.ascontiguousarray(big.transpose(perm + [p + 4 for p in perm])).reshape(16, 16)


def _cmd_purify(args, argv):
    from .qstate import DensityMatrix
    pair = pr.werner_pair(args.fidelity)
    joint = DensityMatrix(4, _pair_layout(pair.rho, pair.rho))
    success, out = pr.purify(joint, _parity_impl(args))
    rows = [[args.fidelity, success, out.fidelity_to()]]
    _write_csv(args.out, ["input_fidelity", "success_prob", "output_fidelity"],
               rows, _meta(argv))


def _cmd_cz(args, argv):
    from .qstate import PureState
    phip = bell(BellLabel.PHI_PLUS).amplitudes.reshape(2, 2)
    ten = np.einsum("ac,be,df->abcdef", phip, phip, phip)
    state = PureState(6, ten.reshape(64))
    rep = pr.teleported_cz(state, _parity_impl(args))
    keys = [(pa.ParityKind.EVEN, pa.ParityKind.EVEN),
            (pa.ParityKind.EVEN, pa.ParityKind.ODD),
            (pa.ParityKind.ODD, pa.ParityKind.EVEN),
            (pa.ParityKind.ODD, pa.ParityKind.ODD)]
    header, row = [], []
    for k1, k2 in keys:
        tag = f"{k1.value}_{k2.value}"
        header += [f"p_{tag}", f"f_{tag}"]
        row += [rep.branch_probs[(k1, k2)], rep.branch_fidelities[(k1, k2)]]
    header += ["overall_fidelity", "success_prob"]
    row += [rep.overall_fidelity, rep.success_prob]
    _write_csv(args.out, header, row and [row], _meta(argv))


def _cmd_chain(args, argv):
    link = ns.LinkModel(args.p_gen, pr.werner_pair(args.raw_fidelity).rho,
                        args.attempt_time)
    cfg = ns.ChainConfig(args.links, link, _parity_impl(args),
                         args.purify_rounds, args.seed)
    runs = ns.run_many(cfg, args.shots) if args.shots > 1 else [ns.run_chain(cfg)]
    rows = [[i, r.end_to_end_fidelity, r.total_attempts, r.elapsed_time]
            for i, r in enumerate(runs)]
    _write_csv(args.out, ["shot", "fidelity", "total_attempts", "elapsed_time"],
               rows, _meta(argv, [f"rng: {ns.RNG_ALGORITHM} seed={args.seed}"]))


def _add_range(p, default_from, default_to, default_points):
    p.add_argument("--from", dest="start", type=float, default=default_from)
    p.add_argument("--to", dest="stop", type=float, default=default_to)
    p.add_argument("--points", type=int, default=default_points)


def _add_common(p):
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--config", type=str, default=None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chiralnet",
        description="Parameter sweeps and protocol demos for the chiral-waveguide "
                    "parity-measurement network simulator.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-beta", help="success probability and infidelity vs beta")
    _add_range(p, 0.5, 1.0, 51)
    _add_common(p)
    p.set_defaults(fn=_cmd_sweep_beta)

    p = sub.add_parser("sweep-detuning", help="infidelity vs mutual detuning")
    _add_range(p, 0.0, 0.5, 51)
    p.add_argument("--beta", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(fn=_cmd_sweep_detuning)

    p = sub.add_parser("detuning-grid", help="two-click infidelity over a detuning grid")
    _add_range(p, -0.1, 0.1, 21)
    p.add_argument("--beta", type=float, default=0.9)
    _add_common(p)
    p.set_defaults(fn=_cmd_detuning_grid)

    p = sub.add_parser("pulse", help="finite-bandwidth infidelity vs pulse width")
    p.add_argument("--sigma", type=float, default=None)
    _add_range(p, 1e-3, 1e-2, 7)
    p.add_argument("--protocol", choices=["one-click", "two-click"], default="two-click")
    p.add_argument("--gamma-r0", dest="gamma_r0", type=float, default=1.0)
    p.add_argument("--gamma-r1", dest="gamma_r1", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(fn=_cmd_pulse)

    p = sub.add_parser("dephasing", help="infidelity vs incoherent-scattering fraction")
    _add_range(p, 0.0, 0.1, 21)
    _add_common(p)
    p.set_defaults(fn=_cmd_dephasing)

    for name, fn in (("purify", _cmd_purify), ("cz", _cmd_cz), ("chain", _cmd_chain)):
        p = sub.add_parser(name)
        p.add_argument("--protocol", choices=["ideal", "one-click", "two-click"],
                       default="two-click")
        p.add_argument("--beta", type=float, default=0.9)
        p.add_argument("--delta0", type=float, default=0.0)
        p.add_argument("--delta1", type=float, default=0.0)
        if name == "purify":
            p.add_argument("--fidelity", type=float, default=0.7)
        if name == "chain":
            p.add_argument("--links", type=int, default=2)
            p.add_argument("--p-gen", dest="p_gen", type=float, default=0.5)
            p.add_argument("--raw-fidelity", dest="raw_fidelity", type=float, default=0.95)
            p.add_argument("--attempt-time", dest="attempt_time", type=float, default=1.0)
            p.add_argument("--purify-rounds", dest="purify_rounds", type=int, default=0)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--shots", type=int, default=1)
        _add_common(p)
        p.set_defaults(fn=fn)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Fold ``key = value`` config-file entries into argv as defaults.

    Config entries are inserted right after the subcommand so that any flag
    given explicitly on the command line (later in argv) overrides them.
    """
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        parser.error("--config requires a file path")
    inserted = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                parser.error(f"malformed config line: {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            inserted += [f"--{key}", value]
    if not argv:
        return argv
    return [argv[0]] + inserted + argv[1:]


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(_apply_config(parser, argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.fn(args, argv)
    except pu.QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))
