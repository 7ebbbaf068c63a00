"""Command-line front end.

Every subcommand reads its parameters from built-in defaults, then an
optional ``--config`` key=value file, then explicit flags (later sources
win). Results go to CSV (stdout unless ``--out`` is given) with the resolved
configuration echoed in ``#`` comment lines.

Exit status: 0 success, 1 oracle-check found a failing check, 2 invalid
configuration, 3 numeric guard tripped (dimension, tail or aliasing).
"""

import argparse
import re
import sys
from math import pi, sqrt

import numpy as np

from . import __version__
from .correlators import thermo_gap, tpcf_gcs, tpcf_mmgs, tpcf_thermo
from .errors import GuardError
from .fock_oracle import AssembledProvider, sector_autocorr
from .gcs_loschmidt import autocorr_genfun, free_energy, free_energy_curve
from .glauber_dynamics import (
    DeepLatticeProvider,
    F_integrand_profile,
    XGrid,
    fourier_autocorr_exact,
    fourier_autocorr_stirling,
    profile_cancellation,
    survival_mmgs,
)
from .io import ConfigError, read_config_file, write_csv, write_pgm, write_svg_lines
from .phasespace import PhaseGridSpec, distribution_grid
from .states import (
    BoseHubbardModel,
    GcsState,
    MmgsState,
    TimeGrid,
    gcs_from_mmgs,
    homogeneous_gcs,
    homogeneous_mmgs,
)

# ---------------------------------------------------------------------------
# value parsing

_PI_RE = re.compile(r"^([+-]?[0-9.eE+-]*?)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+]+))?$")


def parse_float(text):
    """Float, also accepting ``pi``, ``2pi``, ``4*pi``, ``pi/2``, ``3*pi/4``."""
    s = str(text).strip().lower()
    try:
        return float(s)
    except ValueError:
        pass
    m = _PI_RE.match(s)
    if not m:
        raise ConfigError(f"cannot parse {text!r} as a number")
    coef = m.group(1)
    if coef in ("", "+"):
        c = 1.0
    elif coef == "-":
        c = -1.0
    else:
        c = float(coef)
    d = float(m.group(2)) if m.group(2) else 1.0
    return c * pi / d


def parse_complex(text):
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        return complex(parse_float(text))


def parse_bool(text):
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse {text!r} as a boolean")


def parse_int(text):
    try:
        f = float(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {text!r} as an integer") from exc
    if f != int(f):
        raise ConfigError(f"{text!r} is not an integer")
    return int(f)


def _list(parser):
    def parse(text):
        items = [t for t in str(text).replace(";", ",").split(",") if t.strip()]
        return [parser(t) for t in items]

    return parse


PARSERS = {
    "int": parse_int,
    "float": parse_float,
    "str": str,
    "bool": parse_bool,
    "complex": parse_complex,
    "floats": _list(parse_float),
    "ints": _list(parse_int),
    "complexes": _list(parse_complex),
}

# ---------------------------------------------------------------------------
# per-subcommand schemas: key -> (type, default, help)

_OUT = {
    "out": ("str", "-", "CSV output path ('-' for stdout)"),
    "svg": ("str", "", "optional SVG plot path"),
}


def _theta(start, stop, count):
    return {
        "theta_start": ("float", start, "first theta = U t"),
        "theta_stop": ("float", stop, "last theta = U t"),
        "theta_count": ("int", count, "number of theta points"),
    }


SCHEMAS = {
    "tpcf": {
        "family": ("str", "gcs", "gcs, mmgs or thermo"),
        "S": ("int", 100, "particle number (gcs)"),
        "lam": ("float", None, "filling factor S/M (default 1 when nothing else fixes M)"),
        "M": ("int", None, "number of sites"),
        "xi": ("complexes", None, "explicit GCS amplitudes (normalized automatically)"),
        "alpha": ("complexes", None, "explicit MMGS amplitudes"),
        "i": ("int", 0, "first site index (0-based)"),
        "j": ("int", 1, "second site index (0-based)"),
        "thermo_gap": ("bool", False, "tabulate |gcs - thermo| over --S-list instead"),
        "S_list": ("ints", [50, 100, 200, 400], "particle numbers for --thermo-gap"),
        "theta": ("float", pi, "single theta for --thermo-gap"),
        **_theta(0.0, 2 * pi, 201),
        **_OUT,
    },
    "loschmidt-gcs": {
        "S": ("int", 100, "particle number"),
        "lam": ("floats", None, "filling factors, one curve each (default 1)"),
        "M": ("int", None, "number of sites (single curve)"),
        "xi": ("complexes", None, "explicit GCS amplitudes (single curve)"),
        "phase": ("str", "n2", "phase convention: n2 or kerr"),
        "refine": ("bool", True, "recompute unresolved points in high precision"),
        "jobs": ("int", 1, "worker threads (output does not depend on it)"),
        "peaks_out": ("str", "", "optional CSV of local maxima"),
        **_theta(0.0, 4 * pi, 2000),
        **_OUT,
    },
    "loschmidt-glauber": {
        "lam": ("float", 2.0, "filling factor |alpha|^2"),
        "M": ("int", 100, "number of sites"),
        "alpha": ("complexes", None, "explicit MMGS amplitudes"),
        **_theta(0.0, 4 * pi, 2000),
        **_OUT,
    },
    "fourier": {
        "S": ("int", 20, "particle number"),
        "M": ("int", 2, "number of sites"),
        "exact": ("bool", False, "exact projection relation instead of the Stirling form"),
        "U": ("float", 1.0, "on-site interaction (Bose-Hubbard check)"),
        "J": ("float", 0.0, "hopping; J > 0 needs --exact"),
        "boundary": ("str", "periodic", "periodic or open"),
        "time_unit": ("str", "U", "U or J: energy that makes theta dimensionless"),
        "n_x": ("int", 0, "number of x nodes (0: smallest power of two allowed)"),
        **_theta(0.0, 4 * pi, 64),
        **_OUT,
    },
    "fx-profile": {
        "S": ("int", 100, "particle number"),
        "M": ("int", 3, "number of sites"),
        "theta": ("float", pi / 2, "theta = U t"),
        "n_x": ("int", 4096, "number of x nodes"),
        **_OUT,
    },
    "phasespace": {
        "alpha": ("complex", sqrt(100 / 3), "single-site Glauber amplitude"),
        "M": ("int", 3, "exponent (number of sites)"),
        "theta": ("float", pi, "theta = U t"),
        "resolution": ("int", 201, "points per axis"),
        "extent": ("float", 0.0, "half-width of the window (0: |alpha| + 4)"),
        "pgm": ("str", "", "optional PGM heatmap path"),
        "out": ("str", "-", "CSV output path ('-' for stdout)"),
    },
    "oracle-check": {
        "S_max": ("int", 6, "largest particle number"),
        "M_max": ("int", 4, "largest number of sites"),
        "theta_count": ("int", 32, "theta samples in [0, 4 pi]"),
        "seed": ("int", 20240611, "seed for the random states"),
        "out": ("str", "-", "CSV output path ('-' for stdout)"),
    },
}


def build_parser():
    parser = argparse.ArgumentParser(prog="kerrquench", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, schema in SCHEMAS.items():
        p = sub.add_parser(name, help=f"{name} (see --help)")
        p.add_argument("--config", default=None, help="key=value config file")
        for key, (kind, default, helptext) in schema.items():
            flag = "--" + key.replace("_", "-")
            if kind == "bool":
                p.add_argument(flag, dest=key, action="store_const", const="true",
                               default=argparse.SUPPRESS, help=helptext)
                p.add_argument("--no-" + key.replace("_", "-"), dest=key, action="store_const",
                               const="false", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
            else:
                p.add_argument(flag, dest=key, default=argparse.SUPPRESS,
                               help=f"{helptext} [default: {_render(default)}]")
    return parser


def _render(value):
    if value is None:
        return "unset"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ",".join(_render(v) for v in value)
    if isinstance(value, complex):
        return repr(value).strip("()")
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def resolve_config(command, args):
    """Merge defaults < config file < flags and parse every value."""
    schema = SCHEMAS[command]
    raw = {}
    if getattr(args, "config", None):
        raw.update(read_config_file(args.config))
    for key in schema:
        if hasattr(args, key):
            raw[key] = getattr(args, key)
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key(s) for {command}: {', '.join(unknown)}")
    cfg = {}
    for key, (kind, default, _) in schema.items():
        if key in raw and str(raw[key]).strip() != "":
            cfg[key] = PARSERS[kind](raw[key])
        else:
            cfg[key] = default
    return cfg


def _header(cfg):
    return {k: _render(v) for k, v in cfg.items()}


def _grid(cfg):
    if cfg["theta_count"] < 1:
        raise ConfigError("theta_count must be at least 1")
    if cfg["theta_count"] == 1:
        return TimeGrid(np.array([cfg["theta_start"]]))
    return TimeGrid.uniform(cfg["theta_start"], cfg["theta_stop"], cfg["theta_count"])


def _sites_from_lam(S, lam):
    m = S / lam
    M = int(round(m))
    if lam <= 0 or abs(m - M) > 1e-9 * max(1.0, m) or M < 1:
        raise ConfigError(f"S/lambda = {S}/{lam} is not a positive integer site count")
    return M


def _gcs_state(cfg, lam):
    S = cfg["S"]
    if cfg.get("xi"):
        if lam is not None or cfg["M"] is not None:
            raise ConfigError("give either xi or lam/M, not both")
        return GcsState.normalized(S, cfg["xi"])
    if cfg["M"] is not None:
        if lam is not None and _sites_from_lam(S, lam) != cfg["M"]:
            raise ConfigError(f"lam={lam} contradicts S={S}, M={cfg['M']}")
        return homogeneous_gcs(S, cfg["M"])
    return homogeneous_gcs(S, _sites_from_lam(S, 1.0 if lam is None else lam))


def _mmgs_state(cfg):
    if cfg.get("alpha"):
        return MmgsState(cfg["alpha"])
    lam = 1.0 if cfg.get("lam") is None else cfg["lam"]
    M = cfg["M"] if cfg["M"] is not None else 100
    return homogeneous_mmgs(lam, M)


# ---------------------------------------------------------------------------
# subcommands


def cmd_tpcf(cfg):
    if cfg["thermo_gap"]:
        lam = 1.0 if cfg["lam"] is None else cfg["lam"]
        rows, prev = [], None
        for S in cfg["S_list"]:
            gap = float(thermo_gap(S, lam, cfg["theta"]))
            rows.append([S, _sites_from_lam(S, lam), cfg["theta"], gap, "" if prev is None else gap / prev])
            prev = gap
        write_csv(cfg["out"], "kerrquench tpcf --thermo-gap", _header(cfg),
                  ["S", "M", "theta", "gap", "ratio_to_previous"], rows)
        return 0
    th = _grid(cfg).values
    family = cfg["family"]
    if family == "gcs":
        if cfg["alpha"]:
            raise ConfigError("alpha applies to family=mmgs")
        vals = tpcf_gcs(_gcs_state(cfg, cfg["lam"]), th, cfg["i"], cfg["j"])
    elif family == "mmgs":
        if cfg["xi"]:
            raise ConfigError("xi applies to family=gcs")
        if cfg["alpha"] and (cfg["lam"] is not None or cfg["M"] is not None):
            raise ConfigError("give either alpha or lam/M, not both")
        vals = tpcf_mmgs(_mmgs_state(cfg), th, cfg["i"], cfg["j"])
    elif family == "thermo":
        lam = 1.0 if cfg["lam"] is None else cfg["lam"]
        vals = np.asarray(tpcf_thermo(lam, th), dtype=np.complex128)
    else:
        raise ConfigError(f"family must be gcs, mmgs or thermo, got {family!r}")
    rows = [[t, v.real, v.imag] for t, v in zip(th, np.atleast_1d(vals))]
    write_csv(cfg["out"], "kerrquench tpcf", _header(cfg), ["theta", "value_re", "value_im"], rows)
    if cfg["svg"]:
        write_svg_lines(cfg["svg"], th, {"Re": np.real(vals), "Im": np.imag(vals)}, ylabel="<a_i^+ a_j>")
    return 0


def cmd_loschmidt_gcs(cfg):
    if cfg["phase"] not in ("n2", "kerr"):
        raise ConfigError(f"phase must be n2 or kerr, got {cfg['phase']!r}")
    if cfg["jobs"] < 1:
        raise ConfigError("jobs must be at least 1")
    lams = cfg["lam"]
    if cfg["xi"] or cfg["M"] is not None:
        if lams is not None and len(lams) > 1:
            raise ConfigError("several lam values need M and xi unset")
        states = [_gcs_state(cfg, None if lams is None else lams[0])]
    else:
        states = [_gcs_state(cfg, lam) for lam in (lams or [1.0])]
    grid = _grid(cfg)
    rows, peak_rows, svg = [], [], {}
    for st in states:
        curve = free_energy_curve(st, grid, phase=cfg["phase"], refine=cfg["refine"], jobs=cfg["jobs"])
        lam = st.S / st.M
        for k, t in enumerate(curve.theta):
            a = curve.amplitude[k]
            rows.append([st.M, lam, t, a.real, a.imag, curve.L[k], curve.saturated[k], curve.refined[k]])
        for t, L in curve.peaks:
            peak_rows.append([st.M, lam, t, L])
        svg[f"lambda={lam:.4g}"] = curve.L
    cols = ["M", "lambda", "theta", "A_re", "A_im", "L", "saturated", "refined"]
    write_csv(cfg["out"], "kerrquench loschmidt-gcs", _header(cfg), cols, rows)
    if cfg["peaks_out"]:
        write_csv(cfg["peaks_out"], "kerrquench loschmidt-gcs peaks", _header(cfg),
                  ["M", "lambda", "theta", "L"], peak_rows)
    if cfg["svg"]:
        write_svg_lines(cfg["svg"], grid.values, svg, ylabel="L")
    return 0


def cmd_loschmidt_glauber(cfg):
    if cfg["alpha"]:
        state = MmgsState(cfg["alpha"])
    else:
        state = homogeneous_mmgs(cfg["lam"], cfg["M"])
    th = _grid(cfg).values
    amp = np.atleast_1d(survival_mmgs(state, th))
    L, sat = free_energy(amp, state.M)
    rows = [[t, a.real, a.imag, l, s] for t, a, l, s in zip(th, amp, np.atleast_1d(L), np.atleast_1d(sat))]
    write_csv(cfg["out"], "kerrquench loschmidt-glauber", _header(cfg),
              ["theta", "A_re", "A_im", "L", "saturated"], rows)
    if cfg["svg"]:
        write_svg_lines(cfg["svg"], th, {"L": L}, ylabel="L")
    return 0


def cmd_fourier(cfg):
    S, M = cfg["S"], cfg["M"]
    if S < 1 or M < 1:
        raise ConfigError("S and M must be positive")
    lam = S / M
    th = _grid(cfg).values
    grid = XGrid(cfg["n_x"]) if cfg["n_x"] else XGrid.minimal(S, M, lam)
    if cfg["time_unit"] not in ("U", "J"):
        raise ConfigError(f"time_unit must be U or J, got {cfg['time_unit']!r}")
    if cfg["J"] > 0 or cfg["time_unit"] == "J":
        if not cfg["exact"]:
            raise ConfigError("the Stirling form is only defined for the deep lattice; use --exact")
        model = BoseHubbardModel(cfg["U"], cfg["J"], M, cfg["boundary"])
        unit = None if cfg["time_unit"] == "U" else cfg["J"]
        if cfg["time_unit"] == "U" and cfg["U"] == 0:
            raise ConfigError("U = 0 needs --time-unit J")
        state = homogeneous_mmgs(lam, M)
        val = fourier_autocorr_exact(S, state, AssembledProvider(state, model, energy_unit=unit), grid, th)
        ref = sector_autocorr(gcs_from_mmgs(state, S)[0], model, th, energy_unit=unit).values
        label = "exact-bose-hubbard"
    elif cfg["exact"]:
        state = homogeneous_mmgs(lam, M)
        val = fourier_autocorr_exact(S, state, DeepLatticeProvider(state), grid, th)
        ref = autocorr_genfun(homogeneous_gcs(S, M), th, phase="kerr")
        label = "exact-deep-lattice"
    else:
        val = fourier_autocorr_stirling(S, M, th, grid)
        ref = autocorr_genfun(homogeneous_gcs(S, M), th, phase="kerr")
        label = "stirling"
    val, ref = np.atleast_1d(val), np.atleast_1d(ref)
    diff = np.abs(val - ref)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(val) / np.abs(ref)
    rows = [[t, v.real, v.imag, r.real, r.imag, d, q] for t, v, r, d, q in zip(th, val, ref, diff, ratio)]
    hdr = _header(cfg)
    hdr["relation"] = label
    hdr["N_x_used"] = str(grid.N_x)
    write_csv(cfg["out"], "kerrquench fourier", hdr,
              ["theta", "A_re", "A_im", "ref_re", "ref_im", "abs_diff", "abs_ratio"], rows)
    print(f"{label}: max |diff| = {diff.max():.3e} over {th.size} theta values", file=sys.stderr)
    if cfg["svg"]:
        write_svg_lines(cfg["svg"], th, {"|A|": np.abs(val), "|ref|": np.abs(ref)}, ylabel="|A|")
    return 0


def cmd_fx_profile(cfg):
    S, M = cfg["S"], cfg["M"]
    if S < 1 or M < 1:
        raise ConfigError("S and M must be positive")
    grid = XGrid(cfg["n_x"])
    series = F_integrand_profile(S, S / M, M, cfg["theta"], grid)
    rows = [[x, f.real, f.imag] for x, f in zip(series.grid, series.values)]
    write_csv(cfg["out"], "kerrquench fx-profile", _header(cfg), ["x", "F_re", "F_im"], rows)
    net, total = profile_cancellation(series)
    print(f"|mean F| = {net:.6e}, mean |F| = {total:.6e}", file=sys.stderr)
    if cfg["svg"]:
        write_svg_lines(cfg["svg"], series.grid, {"Re F": series.values.real, "Im F": series.values.imag},
                        xlabel="x", ylabel="F")
    return 0


def cmd_phasespace(cfg):
    alpha = cfg["alpha"]
    if cfg["resolution"] < 2:
        raise ConfigError("resolution must be at least 2")
    if cfg["extent"] > 0:
        spec = PhaseGridSpec(cfg["extent"], cfg["resolution"], cfg["resolution"])
    else:
        spec = PhaseGridSpec.for_alpha(alpha, cfg["resolution"])
    grid = distribution_grid(alpha, cfg["theta"], cfg["M"], spec)
    re_, im_ = grid.re, grid.im
    rows = [[re_[c], im_[r], grid.values[r, c]] for r in range(im_.size) for c in range(re_.size)]
    write_csv(cfg["out"], "kerrquench phasespace", _header(cfg), ["beta_re", "beta_im", "value"], rows)
    if cfg["pgm"]:
        write_pgm(cfg["pgm"], grid.values[::-1], vmax=1.0)
    return 0


def cmd_oracle_check(cfg):
    from .checks import run_property_suite

    results = run_property_suite(cfg["S_max"], cfg["M_max"], cfg["theta_count"], cfg["seed"])
    rows = [[r.name, r.error, r.tol, "PASS" if r.passed else "FAIL"] for r in results]
    write_csv(cfg["out"], "kerrquench oracle-check", _header(cfg), ["check", "max_error", "tol", "status"], rows)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.error:.3e} (tol {r.tol:.0e})", file=sys.stderr)
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "tpcf": cmd_tpcf,
    "loschmidt-gcs": cmd_loschmidt_gcs,
    "loschmidt-glauber": cmd_loschmidt_glauber,
    "fourier": cmd_fourier,
    "fx-profile": cmd_fx_profile,
    "phasespace": cmd_phasespace,
    "oracle-check": cmd_oracle_check,
}


def run(command, cfg):
    """Run a subcommand on a resolved configuration; returns the exit status."""
    return COMMANDS[command](cfg)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
        return run(args.command, cfg)
    except GuardError as exc:
        print(f"kerrquench: {exc.guard} guard tripped: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError, IndexError) as exc:
        print(f"kerrquench: configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
