"""Run configuration: a sectioned key-value file parsed with :mod:`configparser`.

Example::

    [grid]
    n_points = 512
    half_length = 32*pi

    [model]
    mu = 0.5
    mu_sign = epidemiological

    [space]
    s = 1

    [solver]
    T = 0.2
    n_t = 200

    [data]
    phi = constant(value=0.02)
    psi = constant(value=0.01)

    [experiment]
    seed = 0

Numbers are parsed through :class:`decimal.Decimal`; the raw strings are
kept for the run record.
"""

import configparser
import hashlib
import math
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

from .dynamics import KmParams, MuSign
from .exceptions import ConfigError
from .spaces import SobolevIndex
from .spectral import (
    GridSpec,
    constant_field,
    gaussian_bump,
    random_band_limited_field,
)

SUBCOMMANDS = ("solve", "oracle", "verify", "contraction", "lipschitz", "sweep")
VERIFY_CHECKS = ("heat_lp_lq", "riesz_smoothing", "hls", "linear", "bilinear",
                 "lem1_components", "beta_lemma", "alpha_cases")

# section -> key -> default (as text, exactly as it would appear in a file)
DEFAULTS = {
    "grid": {"n_points": "1024", "half_length": "32*pi"},
    "model": {"mu": "0", "mu_sign": "paper", "beta": "", "d_s": "", "d_i": ""},
    "space": {"s": "0", "s_values": "0, 1, 1.9"},
    "solver": {"T": "0.1", "n_t": "100", "tol": "1e-10", "max_iter": "50",
               "oracle_steps": "2000", "agreement_budget": "1e-5", "gated": "false"},
    "data": {"phi": "band_limited(seed=1, cutoff=16, amplitude=0.01)",
             "psi": "band_limited(seed=2, cutoff=16, amplitude=0.01)"},
    "experiment": {"kind": "solve", "seed": "0", "n_samples": "100",
                   "output_format": "csv", "checks": "all", "n_pairs": "50"},
    "sweep": {"s": "", "T": "", "seeds": "", "workers": "1"},
}

_DATA_RE = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")
_DATA_ARGS = {
    "gaussian_bump": ("center", "width", "height"),
    "band_limited": ("seed", "cutoff", "amplitude"),
    "constant": ("value",),
}


def parse_number(text, key):
    """Decimal literal, optionally times ``pi`` (``32*pi``, ``pi``)."""
    raw = text.strip()
    factor = 1.0
    m = re.fullmatch(r"(.*?)\s*\*?\s*pi", raw)
    if m:
        factor = math.pi
        raw = m.group(1).strip() or "1"
    try:
        value = Decimal(raw)
    except InvalidOperation:
        raise ConfigError(f"{key}: not a number: {text!r}") from None
    if not value.is_finite():
        raise ConfigError(f"{key}: not a finite number: {text!r}")
    return float(value) * factor


def parse_int(text, key):
    value = parse_number(text, key)
    if value != int(value):
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return int(value)


def parse_bool(text, key):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def parse_list(text, key, conv=parse_number):
    return [conv(item, key) for item in text.split(",") if item.strip()]


def parse_data(text, key):
    """Parse ``name(arg=value, ...)`` from the initial-data library."""
    m = _DATA_RE.match(text)
    if not m or m.group(1) not in _DATA_ARGS:
        raise ConfigError(
            f"{key}: expected one of {', '.join(_DATA_ARGS)}(...), got {text!r}")
    name = m.group(1)
    args = {}
    for part in filter(None, (p.strip() for p in m.group(2).split(","))):
        if "=" not in part:
            raise ConfigError(f"{key}: argument {part!r} must be name=value")
        k, v = (s.strip() for s in part.split("=", 1))
        if k not in _DATA_ARGS[name]:
            raise ConfigError(f"{key}: unknown argument {k!r} for {name}")
        args[k] = parse_number(v, f"{key}.{k}")
    missing = set(_DATA_ARGS[name]) - set(args)
    if name == "gaussian_bump":
        args.setdefault("center", 0.0)
        args.setdefault("height", 1.0)
        missing = {"width"} - set(args)
    if missing:
        raise ConfigError(f"{key}: missing argument(s) {sorted(missing)} for {name}")
    return name, args


def build_field(spec, grid):
    name, args = spec
    if name == "constant":
        return constant_field(grid, args["value"])
    if name == "gaussian_bump":
        return gaussian_bump(grid, args["center"], args["width"], args["height"])
    return random_band_limited_field(int(args["seed"]), int(args["cutoff"]),
                                     args["amplitude"], grid)


@dataclass
class RunConfig:
    grid: GridSpec
    params: KmParams
    idx: SobolevIndex
    s_values: list
    T: float
    n_t: int
    tol: float
    max_iter: int
    oracle_steps: int
    agreement_budget: float
    gated: bool
    phi_spec: tuple
    psi_spec: tuple
    kind: str
    seed: int
    n_samples: int
    n_pairs: int
    output_format: str
    checks: list
    sweep: dict
    raw: dict = field(repr=False)

    def phi(self):
        return build_field(self.phi_spec, self.grid)

    def psi(self):
        return build_field(self.psi_spec, self.grid)

    def canonical_text(self):
        lines = []
        for section in sorted(self.raw):
            lines.append(f"[{section}]")
            for key in sorted(self.raw[section]):
                lines.append(f"{key} = {self.raw[section][key]}")
        return "\n".join(lines) + "\n"

    def content_hash(self):
        """Git blob hash of the canonical configuration text."""
        body = self.canonical_text().encode()
        return hashlib.sha1(b"blob %d\0" % len(body) + body).hexdigest()

    def with_overrides(self, overrides):
        raw = {sec: dict(vals) for sec, vals in self.raw.items()}
        return from_raw(apply_overrides(raw, overrides))


def apply_overrides(raw, overrides):
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        dotted, value = item.split("=", 1)
        if "." not in dotted:
            raise ConfigError(f"override key {dotted!r} must look like section.key")
        section, key = (s.strip() for s in dotted.split(".", 1))
        if section not in DEFAULTS or key not in DEFAULTS[section]:
            raise ConfigError(f"unknown key {section}.{key}")
        raw[section][key] = value.strip()
    return raw


def read_raw(path=None, text=None):
    """Merge a config file (or text) over the defaults, rejecting unknown keys."""
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    parser.optionxform = str
    try:
        if path is not None:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        elif text is not None:
            parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc}") from None
    raw = {sec: dict(vals) for sec, vals in DEFAULTS.items()}
    for section in parser.sections():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown section [{section}]")
        for key, value in parser.items(section):
            if key not in DEFAULTS[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            raw[section][key] = value.strip()
    return raw


def from_raw(raw):
    g, m, sp, so, d, e, sw = (raw[k] for k in
                              ("grid", "model", "space", "solver", "data", "experiment", "sweep"))
    try:
        grid = GridSpec(parse_int(g["n_points"], "grid.n_points"),
                        parse_number(g["half_length"], "grid.half_length"))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None

    def optional(key):
        text = m[key]
        return parse_number(text, f"model.{key}") if text else None

    if m["mu_sign"] not in {ms.value for ms in MuSign}:
        raise ConfigError(f"model.mu_sign: expected paper or epidemiological, got {m['mu_sign']!r}")
    try:
        params = KmParams(parse_number(m["mu"], "model.mu"), m["mu_sign"],
                          optional("beta"), optional("d_s"), optional("d_i"))
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from None
    try:
        idx = SobolevIndex(parse_number(sp["s"], "space.s"))
        s_values = [SobolevIndex(s).s for s in parse_list(sp["s_values"], "space.s_values")]
    except ValueError as exc:
        raise ConfigError(f"space.s: {exc}") from None
    T = parse_number(so["T"], "solver.T")
    n_t = parse_int(so["n_t"], "solver.n_t")
    if T <= 0:
        raise ConfigError("solver.T must be positive")
    if n_t < 2:
        raise ConfigError("solver.n_t must be at least 2")
    tol = parse_number(so["tol"], "solver.tol")
    if tol <= 0:
        raise ConfigError("solver.tol must be positive")
    kind = e["kind"]
    if kind not in SUBCOMMANDS or kind == "sweep":
        raise ConfigError(f"experiment.kind: expected one of solve, oracle, verify, "
                          f"contraction, lipschitz; got {kind!r}")
    fmt = e["output_format"]
    if fmt not in ("csv", "json"):
        raise ConfigError(f"experiment.output_format: expected csv or json, got {fmt!r}")
    checks = [c.strip() for c in e["checks"].split(",") if c.strip()]
    if checks == ["all"]:
        checks = list(VERIFY_CHECKS)
    for c in checks:
        if c not in VERIFY_CHECKS:
            raise ConfigError(f"experiment.checks: unknown check {c!r}")
    sweep = {
        "s": parse_list(sw["s"], "sweep.s"),
        "T": parse_list(sw["T"], "sweep.T"),
        "seeds": parse_list(sw["seeds"], "sweep.seeds", parse_int),
        "workers": parse_int(sw["workers"], "sweep.workers"),
    }
    return RunConfig(
        grid=grid, params=params, idx=idx, s_values=s_values, T=T, n_t=n_t, tol=tol,
        max_iter=parse_int(so["max_iter"], "solver.max_iter"),
        oracle_steps=parse_int(so["oracle_steps"], "solver.oracle_steps"),
        agreement_budget=parse_number(so["agreement_budget"], "solver.agreement_budget"),
        gated=parse_bool(so["gated"], "solver.gated"),
        phi_spec=parse_data(d["phi"], "data.phi"), psi_spec=parse_data(d["psi"], "data.psi"),
        kind=kind, seed=parse_int(e["seed"], "experiment.seed"),
        n_samples=parse_int(e["n_samples"], "experiment.n_samples"),
        n_pairs=parse_int(e["n_pairs"], "experiment.n_pairs"),
        output_format=fmt, checks=checks, sweep=sweep, raw=raw)


def load_config(path=None, overrides=(), text=None):
    return from_raw(apply_overrides(read_raw(path, text), overrides))
