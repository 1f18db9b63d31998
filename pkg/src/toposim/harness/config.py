"""Scenario files: INI-style sections flattened to dotted keys.

``[latency]\\nlo_ms = 10`` and ``latency.lo_ms = 10`` under ``[scenario]``
are the same setting.  Custom profiles live in ``[profile.<name>]``
sections with the mempool keys plus ``nodes`` (the nodes using it).
"""

from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from ..engine import MeasureConfig
from ..mempool import GETH, PolicyProfile, builtin_profile, profile_from_mapping

SEED_ENV = "TOPOSIM_SEED"
MODES = ("serial", "parallel")
MODELS = ("er", "cm", "ba")
SWEEPS = ("futures", "group")

_SECTION = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line, self.path = line, path
        where = f"{path or '<config>'}:{line}: " if line else f"{path or '<config>'}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class Scenario:
    seed: int = 0
    topology_file: Optional[str] = None
    model: Optional[str] = None
    nodes: Optional[int] = None
    edges: Optional[int] = None
    avg_degree: Optional[int] = None
    degree_seq: tuple = ()
    default_profile: PolicyProfile = GETH
    overrides: tuple = ()  # ((node, profile), ...)
    latency_lo_ms: float = 10.0
    latency_hi_ms: float = 200.0
    announce_fraction: float = 0.0
    mode: str = "serial"
    group_size: int = 1
    measure: MeasureConfig = MeasureConfig()
    preprocess: bool = False
    bg_rate: float = 0.0
    bg_duration: float = 0.0
    bg_price_lo: Optional[Fraction] = None
    bg_price_hi: Optional[Fraction] = None
    analysis_runs: int = 0
    baselines: tuple = ()
    sweep: Optional[str] = None
    sweep_values: tuple = ()
    output: str = "out"
    trace: bool = True

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    @property
    def override_map(self) -> dict[str, PolicyProfile]:
        return dict(self.overrides)

    def echo(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, PolicyProfile):
                v = v.as_dict()
            elif isinstance(v, MeasureConfig):
                v = v.echo()
            elif f.name == "overrides":
                v = {n: p.as_dict() for n, p in v}
            elif isinstance(v, Fraction):
                v = str(v)
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out


def _line_index(text: str) -> dict[str, int]:
    """Dotted key -> line number, for diagnostics."""
    index, section = {}, ""
    for no, line in enumerate(text.splitlines(), 1):
        m = _SECTION.match(line)
        if m:
            section = m.group(1).strip()
            index.setdefault(section, no)
            continue
        m = _KEY.match(line)
        if m:
            key = m.group(1).strip().lower()
            index[key if section == "scenario" else f"{section}.{key}"] = no
    return index


def _flatten(cp: configparser.ConfigParser) -> tuple[dict[str, str], dict[str, dict[str, str]]]:
    flat, profiles = {}, {}
    for section in cp.sections():
        if section.startswith("profile."):
            profiles[section[len("profile."):]] = dict(cp[section])
            continue
        for k, v in cp[section].items():
            flat[k if section == "scenario" else f"{section}.{k}"] = v
    return flat, profiles


def parse_scenario(text: str, *, path: Optional[str] = None, base_dir: Optional[Path] = None,
                   env: Optional[dict] = None) -> Scenario:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=path or "<config>")
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"cannot parse line {exc.errors[0][1]!r}" if exc.errors else str(exc), line, path) from None
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], getattr(exc, "lineno", None), path) from None
    lines = _line_index(text)
    flat, profiles = _flatten(cp)
    used: set[str] = set()

    def err(key: str, msg: str) -> ConfigError:
        return ConfigError(f"{key}: {msg}", lines.get(key), path)

    def get(key: str, conv, default=None):
        if key not in flat:
            return default
        used.add(key)
        raw = flat[key].strip()
        try:
            return conv(raw)
        except (ValueError, KeyError, ZeroDivisionError) as exc:
            raise err(key, f"invalid value {raw!r} ({exc})") from None

    def choice(options):
        def conv(raw):
            if raw.lower() not in options:
                raise ValueError(f"expected one of {', '.join(options)}")
            return raw.lower()
        return conv

    def int_list(raw):
        return tuple(int(x) for x in raw.replace(" ", "").split(",") if x)

    def boolean(raw):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError("expected a boolean")

    base_dir = base_dir or Path(".")
    default_profile = get("default_profile", builtin_profile, GETH)

    overrides = []
    for name, data in sorted(profiles.items()):
        section = f"profile.{name}"
        try:
            mapping = {(k.upper() if k in ("r", "u", "p", "l") else k): v for k, v in data.items() if k != "nodes"}
            mapping.setdefault("client", name)
            prof = profile_from_mapping(mapping)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"[{section}]: {exc}", lines.get(section), path) from None
        prof = prof.with_(client_name=name)
        for node in (x.strip() for x in data.get("nodes", "").split(",")):
            if node:
                overrides.append((node, prof))

    mc_keys = {"x": ("X", float), "y": ("Y", Fraction), "z": ("Z", int), "r": ("R", Fraction),
               "u": ("U", int), "timeout": ("timeout", float), "step_gap": ("step_gap", float),
               "retries": ("retries", int), "slot_budget": ("slot_budget", int),
               "confirm_eviction": ("confirm_eviction", boolean)}
    mc = {}
    for k, (name, conv) in mc_keys.items():
        v = get(f"measure.{k}", conv)
        if v is not None:
            mc[name] = v
    try:
        measure = MeasureConfig(**mc)
    except ValueError as exc:
        raise ConfigError(f"[measure]: {exc}", lines.get("measure"), path) from None

    topo_file = get("topology.file", str)
    sc = Scenario(
        seed=get("seed", int, 0),
        topology_file=str((base_dir / topo_file)) if topo_file else None,
        model=get("topology.model", choice(MODELS)),
        nodes=get("topology.nodes", int),
        edges=get("topology.edges", int),
        avg_degree=get("topology.avg_degree", int),
        degree_seq=get("topology.degree_seq", int_list, ()),
        default_profile=default_profile,
        overrides=tuple(overrides),
        latency_lo_ms=get("latency.lo_ms", float, 10.0),
        latency_hi_ms=get("latency.hi_ms", float, 200.0),
        announce_fraction=get("announce_fraction", float, 0.0),
        mode=get("mode", choice(MODES), "serial"),
        group_size=get("group_size", int, 1),
        measure=measure,
        preprocess=get("preprocess", boolean, False),
        bg_rate=get("background.rate", float, 0.0),
        bg_duration=get("background.duration", float, 0.0),
        bg_price_lo=get("background.price_lo", Fraction),
        bg_price_hi=get("background.price_hi", Fraction),
        analysis_runs=get("analysis.runs", int, 0),
        baselines=get("analysis.baselines", lambda r: tuple(choice(MODELS)(x.strip()) for x in r.split(",") if x.strip()), ()),
        sweep=get("sweep.kind", choice(SWEEPS)),
        sweep_values=get("sweep.values", int_list, ()),
        output=str(base_dir / get("output", str, "out")),
        trace=get("trace", boolean, True),
    )
    unknown = sorted(set(flat) - used)
    if unknown:
        raise err(unknown[0], "unknown key")

    env = os.environ if env is None else env
    if env.get(SEED_ENV):
        try:
            sc = sc.with_(seed=int(env[SEED_ENV]))
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env[SEED_ENV]!r} is not an integer") from None
    return validate_scenario(sc, lines, path)


def validate_scenario(sc: Scenario, lines: Optional[dict] = None, path: Optional[str] = None) -> Scenario:
    lines = lines or {}

    def fail(key: str, msg: str):
        raise ConfigError(f"{key}: {msg}", lines.get(key), path)

    if (sc.topology_file is None) == (sc.model is None):
        fail("topology", "give exactly one of topology.file or topology.model")
    if sc.model in ("er", "ba") and not sc.nodes:
        fail("topology.nodes", f"model {sc.model} needs topology.nodes")
    if sc.model == "er" and sc.edges is None:
        fail("topology.edges", "model er needs topology.edges")
    if sc.model == "ba" and not sc.avg_degree:
        fail("topology.avg_degree", "model ba needs topology.avg_degree")
    if sc.model == "cm" and not sc.degree_seq:
        fail("topology.degree_seq", "model cm needs topology.degree_seq")
    if not 0 < sc.latency_lo_ms <= sc.latency_hi_ms:
        fail("latency.lo_ms", "need 0 < lo_ms <= hi_ms")
    if not 0 <= sc.announce_fraction <= 1:
        fail("announce_fraction", "must lie in [0, 1]")
    if sc.group_size < 1:
        fail("group_size", "must be >= 1")
    if sc.bg_rate < 0 or sc.bg_duration < 0:
        fail("background.rate", "rate and duration must be >= 0")
    if (sc.bg_price_lo is None) != (sc.bg_price_hi is None):
        fail("background.price_lo", "give both price_lo and price_hi")
    if sc.sweep and not sc.sweep_values:
        fail("sweep.values", "a sweep needs values")
    if sc.analysis_runs < 0:
        fail("analysis.runs", "must be >= 0")
    return sc


def load_scenario(path: Union[str, Path], env: Optional[dict] = None) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(p)) from None
    return parse_scenario(text, path=str(p), base_dir=p.parent, env=env)
