"""
JSON run configuration.

Top-level keys and defaults::

    N                 3        spatial dimension
    delta             0        force sign, one of -1, 0, 1
    K                 0.0      pressure constant
    gamma             1.4      adiabatic exponent
    R                 1.0      support radius
    n_list            [1]      weight exponents, each > 0
    profile           {}       InitialProfile fields (uniform density 1, sine velocity 1)
    profiles          null     optional profile grid for ``sweep``
    cells             1024     grid cells
    scheme            {}       SchemeConfig fields
    t_max             1.0      final time
    snapshot_cadence  0.005    time between snapshots
    output_dir        "out"    where results are written

Unknown keys are rejected at every level.
"""

from __future__ import annotations

import dataclasses
import json
import numbers
from dataclasses import dataclass, field

from radial_blowup.errors import ConfigurationError
from radial_blowup.model import InitialProfile, ModelParams, RadialGrid
from radial_blowup.solver import SchemeConfig

_PROFILE_KEYS = {f.name for f in dataclasses.fields(InitialProfile)}
_SCHEME_KEYS = {f.name for f in dataclasses.fields(SchemeConfig)}
_TOP_KEYS = {
    "N", "delta", "K", "gamma", "R", "n_list", "profile", "profiles", "cells",
    "scheme", "t_max", "snapshot_cadence", "output_dir",
}


@dataclass(frozen=True)
class RunConfig:
    N: int = 3
    delta: int = 0
    K: float = 0.0
    gamma: float = 1.4
    R: float = 1.0
    n_list: tuple = (1,)
    profile: InitialProfile = field(default_factory=InitialProfile)
    profiles: tuple | None = None
    cells: int = 1024
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    t_max: float = 1.0
    snapshot_cadence: float = 0.005
    output_dir: str = "out"

    def params(self, n=None) -> ModelParams:
        return ModelParams(N=self.N, delta=self.delta, K=self.K, gamma=self.gamma,
                           n=float(self.n_list[0] if n is None else n), R=self.R)

    def grid(self) -> RadialGrid:
        return RadialGrid(cells=self.cells, R=self.R)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "profile":
                value = _profile_dict(value)
            elif f.name == "profiles":
                value = None if value is None else [_profile_dict(p) for p in value]
            elif f.name == "scheme":
                value = dataclasses.asdict(value)
            elif f.name == "n_list":
                value = list(value)
            out[f.name] = value
        return out


def n_label(n) -> str:
    """Column suffix for weight exponent ``n``, formatted as given."""
    return repr(n)


def _profile_dict(profile):
    d = dataclasses.asdict(profile)
    for key in ("table_r", "table_rho", "table_v"):
        d[key] = list(d[key])
    return d


def _is_number(x):
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


def _number(doc, key, default, *, integer=False):
    value = doc.get(key, default)
    if not _is_number(value):
        raise ConfigurationError(f"expected a number, got {value!r}", field=key)
    if integer:
        if int(value) != value:
            raise ConfigurationError(f"expected an integer, got {value!r}", field=key)
        return int(value)
    return float(value)


def _reject_unknown(doc, allowed, where):
    unknown = sorted(set(doc) - allowed)
    if unknown:
        name = unknown[0] if not where else f"{where}.{unknown[0]}"
        raise ConfigurationError("unknown key", field=name)


def _parse_profile(doc, where):
    if not isinstance(doc, dict):
        raise ConfigurationError("expected an object", field=where)
    _reject_unknown(doc, _PROFILE_KEYS, where)
    kw = dict(doc)
    for key in ("table_r", "table_rho", "table_v"):
        if key in kw:
            if not isinstance(kw[key], list) or not all(_is_number(x) for x in kw[key]):
                raise ConfigurationError("expected a list of numbers", field=f"{where}.{key}")
            kw[key] = tuple(float(x) for x in kw[key])
    for key in ("density_amplitude", "velocity_amplitude"):
        if key in kw and not _is_number(kw[key]):
            raise ConfigurationError("expected a number", field=f"{where}.{key}")
    for key in ("density_support", "velocity_support"):
        if kw.get(key) is not None and not _is_number(kw[key]):
            raise ConfigurationError("expected a number or null", field=f"{where}.{key}")
    try:
        return InitialProfile(**kw)
    except ConfigurationError as exc:
        if where == "profile" or not (exc.field or "").startswith("profile."):
            raise
        raise ConfigurationError(exc.detail, field=where + exc.field[len("profile"):]) from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise ConfigurationError("top level must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "")

    defaults = RunConfig()
    n_list = doc.get("n_list", list(defaults.n_list))
    if not isinstance(n_list, list) or not n_list:
        raise ConfigurationError("must be a nonempty list", field="n_list")
    for n in n_list:
        if not _is_number(n) or not n > 0:
            raise ConfigurationError(f"every exponent must be > 0, got {n!r}", field="n_list")
    if len({float(n) for n in n_list}) != len(n_list):
        raise ConfigurationError("exponents must be distinct", field="n_list")

    delta = doc.get("delta", defaults.delta)
    if not _is_number(delta) or delta not in (-1, 0, 1):
        raise ConfigurationError(f"must be one of -1, 0, 1, got {delta!r}", field="delta")

    scheme_doc = doc.get("scheme", {})
    if not isinstance(scheme_doc, dict):
        raise ConfigurationError("expected an object", field="scheme")
    _reject_unknown(scheme_doc, _SCHEME_KEYS, "scheme")
    for key, value in scheme_doc.items():
        if not _is_number(value):
            raise ConfigurationError("expected a number", field=f"scheme.{key}")
    scheme = SchemeConfig(**{k: float(v) for k, v in scheme_doc.items()})

    profile = _parse_profile(doc.get("profile", {}), "profile")
    profiles = doc.get("profiles")
    if profiles is not None:
        if not isinstance(profiles, list) or not profiles:
            raise ConfigurationError("profile grid must be a nonempty list", field="profiles")
        profiles = tuple(_parse_profile(p, f"profiles[{i}]") for i, p in enumerate(profiles))

    output_dir = doc.get("output_dir", defaults.output_dir)
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigurationError("expected a nonempty string", field="output_dir")

    config = RunConfig(
        N=_number(doc, "N", defaults.N, integer=True),
        delta=int(delta),
        K=_number(doc, "K", defaults.K),
        gamma=_number(doc, "gamma", defaults.gamma),
        R=_number(doc, "R", defaults.R),
        n_list=tuple(n_list),
        profile=profile,
        profiles=profiles,
        cells=_number(doc, "cells", defaults.cells, integer=True),
        scheme=scheme,
        t_max=_number(doc, "t_max", defaults.t_max),
        snapshot_cadence=_number(doc, "snapshot_cadence", defaults.snapshot_cadence),
        output_dir=output_dir,
    )
    validate_config(config)
    return config


def validate_config(config: RunConfig) -> None:
    """Raise ``ConfigurationError`` naming the first invalid field."""
    for n in config.n_list:
        if not n > 0:
            raise ConfigurationError(f"every exponent must be > 0, got {n!r}", field="n_list")
    config.params()
    config.grid()
    if not config.t_max >= 0:
        raise ConfigurationError("must be >= 0", field="t_max")
    if not config.snapshot_cadence > 0:
        raise ConfigurationError("must be > 0", field="snapshot_cadence")
    if config.profiles is not None and not config.profiles:
        raise ConfigurationError("profile grid must be a nonempty list", field="profiles")


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}") from None
    return parse_config(text)

