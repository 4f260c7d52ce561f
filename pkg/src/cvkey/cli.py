"""Command line front end.

Every numeric flag has a config-file counterpart (``--config run.toml``)::

    [resource]
    kind = "subtracted"   # tmsv | subtracted | zpc | zpc-loss
    cosh2r = 50           # or r = ...
    t_bs = 0.9
    k = 1
    p_loss = 0.002

    [mismatch]
    delta = 0.01          # or n_unmatched, m_matched, epsilon, alpha, n_bar

    [channel]
    length_km = 15
    loss_coeff = 0.02
    eta = 1.0
    beta = 0.95

    [sweep]
    start = 0
    stop = 200
    step = 1

    [solver]
    tol = 0.01

    [output]
    path = "out.csv"

Flags override file values.  Exit codes: 0 success, 2 configuration error,
3 numerical-consistency error, 4 a solver found no key.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from typing import Any

from . import analysis, fock, resources
from .analysis import SweepAxis, SweepSpec
from .channel import DEFAULT_BETA, DEFAULT_LOSS_COEFF, ChannelParams
from .errors import CVKeyError, ConfigError, NoKeyError, NumericalConsistencyError
from .gaussian import log_negativity, pt_min_symplectic
from .keyrate import secret_key_rate
from .resources import MismatchParams, ResourceKind, ResourceSpec

log = logging.getLogger("cvkey")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_NO_KEY = 0, 2, 3, 4

SWEEP_COLUMNS = ("key_rate_bits", "i_ab_bits", "chi_be_bits", "entangled")

DEFAULT_COSH2R = 50.0
DEFAULT_DELTA = 0.01
DEFAULT_P_LOSS = 0.002
DEFAULT_RATE_LENGTH_KM = 15.0

ORACLE_GRID = [(r, t, k) for r in (0.3, 0.5, 0.8) for t in (0.7, 0.9) for k in (0, 1, 2)]
ORACLE_PROB_TOL = 1e-8
ORACLE_CM_TOL = 1e-6

# flag dest -> (config section, key)
FIELDS = {
    "resource": ("resource", "kind"),
    "r": ("resource", "r"),
    "cosh2r": ("resource", "cosh2r"),
    "tbs": ("resource", "t_bs"),
    "k": ("resource", "k"),
    "p_loss": ("resource", "p_loss"),
    "delta": ("mismatch", "delta"),
    "n_unmatched": ("mismatch", "n_unmatched"),
    "m_matched": ("mismatch", "m_matched"),
    "epsilon": ("mismatch", "epsilon"),
    "alpha": ("mismatch", "alpha"),
    "n_bar": ("mismatch", "n_bar"),
    "length_km": ("channel", "length_km"),
    "loss_coeff": ("channel", "loss_coeff"),
    "eta": ("channel", "eta"),
    "beta": ("channel", "beta"),
    "start": ("sweep", "start"),
    "stop": ("sweep", "stop"),
    "step": ("sweep", "step"),
    "tol": ("solver", "tol"),
    "key_floor": ("solver", "key_floor"),
    "output": ("output", "path"),
}


def fmt(v: float) -> str:
    return f"{v:.8e}"


def _load_toml(path: str) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc


def merge_config(args: argparse.Namespace) -> dict[str, Any]:
    """Flat settings dict: config file values overridden by explicit flags."""
    settings: dict[str, Any] = {}
    if args.config:
        data = _load_toml(args.config)
        known = {}
        for dest, (section, key) in FIELDS.items():
            known.setdefault(section, {})[key] = dest
        for section, table in data.items():
            if section not in known or not isinstance(table, dict):
                raise ConfigError(f"unknown config section [{section}]")
            for key, value in table.items():
                if key not in known[section]:
                    raise ConfigError(f"unknown config field {section}.{key}")
                settings[known[section][key]] = value
    flags = {dest: getattr(args, dest, None) for dest in FIELDS}
    if flags["r"] is not None:
        settings.pop("cosh2r", None)
    if flags["cosh2r"] is not None:
        settings.pop("r", None)
    settings.update({k: v for k, v in flags.items() if v is not None})
    return settings


def _num(settings, name, default=None, cast=float):
    value = settings.get(name, default)
    if value is None:
        return None
    try:
        return cast(value)
    except (TypeError, ValueError) as exc:
        section, key = FIELDS[name]
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}") from exc


def _field_error(section_key: str, exc: Exception) -> ConfigError:
    return ConfigError(f"{section_key}: {exc}")


def build_resource(settings) -> ResourceSpec:
    kind_name = settings.get("resource", "tmsv")
    try:
        kind = ResourceKind(kind_name)
    except ValueError:
        choices = ", ".join(k.value for k in ResourceKind)
        raise ConfigError(f"resource.kind: unknown resource {kind_name!r} (choose {choices})") from None
    r, cosh2r = _num(settings, "r"), _num(settings, "cosh2r")
    if r is not None and cosh2r is not None:
        raise ConfigError("resource: give either r or cosh2r, not both")
    try:
        if r is None:
            r = resources.squeezing_from_cosh2r(DEFAULT_COSH2R if cosh2r is None else cosh2r)
    except ValueError as exc:
        raise _field_error("resource.cosh2r", exc) from exc
    t_bs = _num(settings, "tbs", 0.9)
    k = _num(settings, "k", 1, cast=int)
    p_default = DEFAULT_P_LOSS if kind is ResourceKind.ZPC_LOSS else 0.0
    p_loss = _num(settings, "p_loss", p_default)
    try:
        return ResourceSpec(kind, r, t_bs, k=k, p_loss=p_loss)
    except ValueError as exc:
        raise _field_error("resource", exc) from exc


def build_mismatch(settings) -> MismatchParams:
    multimode = [n for n in ("n_unmatched", "m_matched", "epsilon", "alpha", "n_bar") if n in settings]
    delta = _num(settings, "delta")
    if delta is not None and multimode:
        raise ConfigError("mismatch: give either delta or the multimode parameters, not both")
    if multimode:
        mm = MismatchParams(
            n_unmatched=_num(settings, "n_unmatched", 0, cast=int),
            m_matched=_num(settings, "m_matched", 1, cast=int),
            epsilon=_num(settings, "epsilon", 0.0),
            alpha=_num(settings, "alpha", 1.0),
            n_bar=_num(settings, "n_bar", 0.0),
        )
    else:
        mm = MismatchParams(delta_override=DEFAULT_DELTA if delta is None else delta)
    try:
        mm.delta
    except ValueError as exc:
        raise _field_error("mismatch", exc) from exc
    return mm


def build_channel(settings, default_length=0.0) -> ChannelParams:
    try:
        return ChannelParams(
            length_km=_num(settings, "length_km", default_length),
            loss_coeff=_num(settings, "loss_coeff", DEFAULT_LOSS_COEFF),
            eta=_num(settings, "eta", 1.0),
            beta=_num(settings, "beta", DEFAULT_BETA),
        )
    except ValueError as exc:
        raise _field_error("channel", exc) from exc


def _write(settings, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path = settings.get("output")
    if path in (None, "-"):
        sys.stdout.write(buf.getvalue())
        sys.stdout.flush()
    else:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            raise ConfigError(f"output.path: cannot write {path}: {exc}") from exc


def cmd_rate(settings) -> int:
    spec, mm = build_resource(settings), build_mismatch(settings)
    ch = build_channel(settings, DEFAULT_RATE_LENGTH_KM)
    b = secret_key_rate(spec, mm, ch)
    header = ("resource", "L_km", "eta", "delta", "beta", "key_rate_bits", "raw_rate",
              "i_ab_bits", "chi_be_bits", "lambda1", "lambda2", "lambda3", "entangled")
    row = (spec.kind.value, fmt(ch.length_km), fmt(ch.eta), fmt(mm.delta), fmt(ch.beta),
           fmt(b.key_rate), fmt(b.raw_rate), fmt(b.i_ab), fmt(b.chi_be), fmt(b.lambda1),
           fmt(b.lambda2), fmt(b.lambda3), int(log_negativity(b.v_shared) > 0))
    _write(settings, header, [row])
    return EXIT_OK


def _sweep(settings, axis: SweepAxis) -> int:
    spec, mm = build_resource(settings), build_mismatch(settings)
    if axis is SweepAxis.DISTANCE:
        ch = build_channel(settings)
        defaults, label = (0.0, 200.0, 1.0), "L_km"
    else:
        ch = build_channel(settings, analysis.FIGURE_LENGTH_KM)
        defaults, label = (0.95, 1.0005, 0.001), "eta"
    start, stop, step = (_num(settings, n, d) for n, d in zip(("start", "stop", "step"), defaults))
    sweep_spec = SweepSpec(axis, start, stop, step, spec, mm, ch)
    rows = [
        (fmt(r.axis_value), fmt(r.key_rate), fmt(r.i_ab), fmt(r.chi_be), int(r.entangled))
        for r in analysis.sweep(sweep_spec)
    ]
    _write(settings, (label,) + SWEEP_COLUMNS, rows)
    return EXIT_OK


def _key_floor(settings) -> float:
    return _num(settings, "key_floor", analysis.KEY_ZERO)


def cmd_max_distance(settings) -> int:
    spec, mm, ch = build_resource(settings), build_mismatch(settings), build_channel(settings)
    tol = _num(settings, "tol", 0.01)
    L = analysis.max_distance(spec, mm, ch, tol_km=tol, threshold=_key_floor(settings))
    log.info("maximum distance for %s at delta=%g: %.3f km", spec.kind.value, mm.delta, L)
    _write(settings, ("resource", "delta", "max_distance_km"), [(spec.kind.value, fmt(mm.delta), fmt(L))])
    return EXIT_OK


def cmd_min_eta(settings) -> int:
    spec, mm = build_resource(settings), build_mismatch(settings)
    ch = build_channel(settings, analysis.FIGURE_LENGTH_KM)
    tol = _num(settings, "tol", 1e-6)
    eta = analysis.min_efficiency(spec, mm, ch, tol=tol, threshold=_key_floor(settings))
    log.info("minimum detector efficiency for %s at %g km: %.5f", spec.kind.value, ch.length_km, eta)
    _write(settings, ("resource", "L_km", "delta", "min_eta"),
           [(spec.kind.value, fmt(ch.length_km), fmt(mm.delta), fmt(eta))])
    return EXIT_OK


def cmd_entanglement(settings) -> int:
    spec, mm, ch = build_resource(settings), build_mismatch(settings), build_channel(settings)
    b = secret_key_rate(spec, mm, ch)
    header = ("resource", "delta", "l_min_source", "log_negativity_source", "L_km",
              "l_min_shared", "log_negativity_shared", "delta_threshold")
    row = (spec.kind.value, fmt(mm.delta), fmt(pt_min_symplectic(b.v_source)),
           fmt(log_negativity(b.v_source)), fmt(ch.length_km), fmt(pt_min_symplectic(b.v_shared)),
           fmt(log_negativity(b.v_shared)), fmt(analysis.resource_separability_threshold(spec)))
    _write(settings, header, [row])
    return EXIT_OK


def oracle_rows(grid) -> list[tuple]:
    rows = []
    for r, t_bs, k in grid:
        state = fock.tmsv_fock(r)
        prob, cm = fock.project_ancilla(state, t_bs, k)
        closed_p = resources.subtraction_probability(r, t_bs, k)
        closed_cm = resources.subtracted_tmsv(r, t_bs, k).matrix
        p_err = abs(prob - closed_p)
        cm_err = float(abs(cm.matrix - closed_cm).max())
        ok = p_err <= ORACLE_PROB_TOL and cm_err <= ORACLE_CM_TOL
        rows.append((r, t_bs, k, prob, closed_p, p_err, cm_err, state.cutoff, ok))
    return rows


def cmd_oracle_check(settings) -> int:
    if any(n in settings for n in ("r", "cosh2r", "tbs", "k")):
        spec = build_resource(settings)
        grid = [(spec.r, spec.t_bs, _num(settings, "k", 1, cast=int))]
    else:
        grid = ORACLE_GRID
    rows = oracle_rows(grid)
    header = ("r", "t_bs", "k", "prob_oracle", "prob_closed", "prob_abs_err",
              "cm_max_abs_err", "cutoff", "ok")
    _write(settings, header, [
        (fmt(r), fmt(t), k, fmt(p), fmt(cp), fmt(pe), fmt(ce), d, int(ok))
        for r, t, k, p, cp, pe, ce, d, ok in rows
    ])
    if not all(row[-1] for row in rows):
        raise NumericalConsistencyError("Fock oracle disagrees with the closed forms")
    return EXIT_OK


COMMANDS = {
    "rate": (cmd_rate, "key rate at one operating point"),
    "sweep-distance": (lambda s: _sweep(s, SweepAxis.DISTANCE), "key rate vs distance"),
    "sweep-eta": (lambda s: _sweep(s, SweepAxis.ETA), "key rate vs detector efficiency"),
    "max-distance": (cmd_max_distance, "distance at which the key vanishes"),
    "min-eta": (cmd_min_eta, "lowest detector efficiency with positive key"),
    "entanglement": (cmd_entanglement, "log-negativity of source and shared states"),
    "oracle-check": (cmd_oracle_check, "compare closed forms with the Fock-space oracle"),
}


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="TOML file with [resource]/[mismatch]/[channel]/... tables")
    p.add_argument("-o", "--output", help="CSV destination (default: standard output)")
    p.add_argument("-v", "--verbose", action="store_true")
    g = p.add_argument_group("resource")
    g.add_argument("--resource", choices=[k.value for k in ResourceKind])
    sq = g.add_mutually_exclusive_group()
    sq.add_argument("--r", type=float, help="squeezing parameter")
    sq.add_argument("--cosh2r", type=float, help=f"cosh 2r (default {DEFAULT_COSH2R:g})")
    g.add_argument("--tbs", type=float, help="ancilla beamsplitter transmittance (default 0.9)")
    g.add_argument("--k", type=int, help="photons detected in the ancilla (default 1)")
    g.add_argument("--p-loss", type=float, help="ancilla photon loss probability (zpc-loss)")
    g = p.add_argument_group("mode mismatch")
    g.add_argument("--delta", type=float, help=f"mismatch noise (default {DEFAULT_DELTA:g})")
    g.add_argument("--n-unmatched", type=int)
    g.add_argument("--m-matched", type=int)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--alpha", type=float)
    g.add_argument("--n-bar", type=float)
    g = p.add_argument_group("channel")
    g.add_argument("--length-km", type=float)
    g.add_argument("--loss-coeff", type=float, help=f"default {DEFAULT_LOSS_COEFF:g}")
    g.add_argument("--eta", type=float, help="detector efficiency (default 1)")
    g.add_argument("--beta", type=float, help=f"reconciliation efficiency (default {DEFAULT_BETA:g})")
    g = p.add_argument_group("sweep / solver")
    g.add_argument("--start", type=float)
    g.add_argument("--stop", type=float, help="exclusive upper end of the grid")
    g.add_argument("--step", type=float)
    g.add_argument("--tol", type=float)
    g.add_argument("--key-floor", type=float,
                   help=f"key rate counted as zero by the solvers (default {analysis.KEY_ZERO:g})")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvkey", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    func = COMMANDS[args.command][0]
    try:
        return func(merge_config(args))
    except ConfigError as exc:
        print(f"cvkey: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoKeyError as exc:
        print(f"cvkey: {exc}", file=sys.stderr)
        return EXIT_NO_KEY
    except NumericalConsistencyError as exc:
        print(f"cvkey: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CVKeyError as exc:
        print(f"cvkey: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
