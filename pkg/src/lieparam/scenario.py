"""Scenario files: a sectioned ``key = value`` format describing a run.

Example::

    [scenario]
    name = example-2.1
    params = 0, 0.5, -0.5, 1
    grid = 1024

    [action]
    name = quadratic-shear
    param = eps
    x_tilde = x + eps*u^2
    u_tilde = u
    identity = 0

    [function]
    domain = (-3, 3)
    u = x

    [check]
    kind = alpha
    params = 0.5, -0.5, 1
    verdict = NotInvertible
    witness = -1/(2*eps)
    tolerance = 0.01

Numeric fields accept constant expressions and the name ``pi``.  Lines
starting with ``#`` are comments.  Unknown sections or keys are errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import expr as ex
from .actions import GroupAction, SmoothEndomorphism
from .errors import ConfigError, ExprSyntaxError, LieParamError
from .functions import ParametricFunction, ScalarFunction
from .geometry import OpenBox

CONSTANTS = {"pi": math.pi}

SECTION_KEYS = {
    "scenario": {"name", "reference", "params", "grid"},
    "action": {"name", "param", "x_tilde", "u_tilde", "identity"},
    "function": {"domain", "u", "lambda", "v1", "v2"},
}

COMMON_CHECK_KEYS = {"kind", "tolerance", "params"}

CHECK_KEYS = {
    "alpha": {"verdict", "witness"},
    "classical": {"verdict"},
    "classical-identity": set(),
    "deparametrize": {"verdict", "witness"},
    "act-total": set(),
    "image": {"x_ref", "u_ref"},
    "consistency": {"diagram_tolerance"},
    "noncommutation": {"domain", "transformed"},
    "projectable": {"expect"},
    "group-axioms": {"draws", "points"},
    "semigroup": {"x_other", "u_other", "x_ref", "u_ref"},
    "reparametrization": {"phi", "source"},
    "universal": {"psi", "psi_inverse", "source"},
}


@dataclass
class CheckSpec:
    kind: str
    options: dict[str, str] = field(default_factory=dict)
    tolerance: float | None = None
    params: tuple[float, ...] | None = None
    index: int = 0

    @property
    def path(self) -> str:
        return f"check[{self.index}]"


@dataclass
class Scenario:
    name: str
    reference: str = ""
    params: tuple[float, ...] = ()
    grid: int = 1024
    action_spec: dict[str, str] | None = None
    function_spec: dict[str, str] | None = None
    checks: list[CheckSpec] = field(default_factory=list)
    origin: str = "<string>"

    @property
    def action_parameter(self) -> str | None:
        return None if self.action_spec is None else self.action_spec.get("param")

    def build_action(self, bindings=None) -> GroupAction | SmoothEndomorphism | None:
        spec = self.action_spec
        if spec is None:
            return None
        name = spec.get("name", "action")
        try:
            if "param" in spec:
                return GroupAction.from_source(name, spec["param"], spec["x_tilde"], spec["u_tilde"],
                                               number(spec.get("identity", "0"), "action.identity"),
                                               params=bindings)
            return SmoothEndomorphism.from_source(spec["x_tilde"], spec["u_tilde"], name, params=bindings)
        except ExprSyntaxError as e:
            raise ConfigError(str(e), "action") from e

    def build_function(self, bindings=None) -> ScalarFunction | ParametricFunction | None:
        spec = self.function_spec
        if spec is None:
            return None
        try:
            if "u" in spec:
                return ScalarFunction.from_source(spec["u"], box(spec["domain"], "function.domain"), bindings)
            return ParametricFunction.from_source(spec["v1"], spec["v2"], box(spec["lambda"], "function.lambda"),
                                                  bindings)
        except ExprSyntaxError as e:
            raise ConfigError(str(e), "function") from e


def number(text: str, path: str) -> float:
    try:
        value = ex.evaluate(ex.parse(text), CONSTANTS)
    except LieParamError as e:
        raise ConfigError(f"not a number: {text!r} ({e})", path) from e
    return float(value)


def numbers(text: str, path: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    return tuple(number(p, f"{path}[{i}]") for i, p in enumerate(parts))


def box(text: str, path: str) -> OpenBox:
    t = text.strip()
    if not (t.startswith("(") and t.endswith(")")):
        raise ConfigError(f"domains are written (lo, hi), got {text!r}", path)
    vals = numbers(t[1:-1], path)
    if len(vals) != 2:
        raise ConfigError(f"expected two bounds, got {len(vals)}", path)
    try:
        return OpenBox.interval(*vals)
    except ValueError as e:
        raise ConfigError(str(e), path) from e


def boolean(text: str, path: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ConfigError(f"expected true or false, got {text!r}", path)


def _sections(text: str, origin: str):
    sections: list[tuple[str, dict[str, str], int]] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = (line[1:-1].strip(), {}, lineno)
            sections.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'", origin)
        if current is None:
            raise ConfigError(f"line {lineno}: key outside of any [section]", origin)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in current[1]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", f"{current[0]}.{key}")
        current[1][key] = value
    return sections


def _require(keys: dict, needed, path):
    for k in needed:
        if k not in keys:
            raise ConfigError(f"missing key {k!r}", path)


def parse_scenario(text: str, origin: str = "<string>") -> Scenario:
    sc = Scenario(name="", origin=origin)
    seen = set()
    for name, keys, lineno in _sections(text, origin):
        if name == "check":
            idx = len(sc.checks)
            path = f"check[{idx}]"
            _require(keys, ["kind"], path)
            kind = keys["kind"]
            if kind not in CHECK_KEYS:
                raise ConfigError(f"unknown check kind {kind!r}", f"{path}.kind")
            for k in keys:
                if k not in COMMON_CHECK_KEYS | CHECK_KEYS[kind]:
                    raise ConfigError(f"unknown key {k!r} for a {kind} check", f"{path}.{k}")
            spec = CheckSpec(kind, {k: v for k, v in keys.items() if k not in COMMON_CHECK_KEYS}, index=idx)
            if "tolerance" in keys:
                spec.tolerance = number(keys["tolerance"], f"{path}.tolerance")
            if "params" in keys:
                spec.params = numbers(keys["params"], f"{path}.params")
            sc.checks.append(spec)
            continue
        if name not in SECTION_KEYS:
            raise ConfigError(f"line {lineno}: unknown section [{name}]", origin)
        if name in seen:
            raise ConfigError(f"line {lineno}: section [{name}] given twice", origin)
        seen.add(name)
        for k in keys:
            if k not in SECTION_KEYS[name]:
                raise ConfigError(f"unknown key {k!r}", f"{name}.{k}")
        if name == "scenario":
            _require(keys, ["name"], "scenario")
            sc.name = keys["name"]
            sc.reference = keys.get("reference", "")
            if "params" in keys:
                sc.params = numbers(keys["params"], "scenario.params")
            if "grid" in keys:
                try:
                    sc.grid = int(keys["grid"])
                except ValueError:
                    raise ConfigError(f"not an integer: {keys['grid']!r}", "scenario.grid") from None
                if sc.grid < 2:
                    raise ConfigError("grid resolution must be at least 2", "scenario.grid")
        elif name == "action":
            _require(keys, ["x_tilde", "u_tilde"], "action")
            if "identity" in keys and "param" not in keys:
                raise ConfigError("'identity' only applies to a parametrized group action", "action.identity")
            sc.action_spec = dict(keys)
        else:
            if "u" in keys:
                _require(keys, ["domain"], "function")
                extra = {"lambda", "v1", "v2"} & set(keys)
                if extra:
                    raise ConfigError(f"give either u or v1/v2, not both ({sorted(extra)[0]})", "function")
            else:
                _require(keys, ["lambda", "v1", "v2"], "function")
                if "domain" in keys:
                    raise ConfigError("'domain' belongs to a scalar function; use 'lambda'", "function.domain")
            key = "domain" if "u" in keys else "lambda"
            box(keys[key], f"function.{key}")
            sc.function_spec = dict(keys)
    if not sc.name:
        sc.name = Path(origin).stem if origin != "<string>" else "scenario"
    return sc


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read scenario: {e.strerror}", str(p)) from e
    return parse_scenario(text, str(p))


def builtin_scenarios() -> dict[str, Scenario]:
    out = {}
    for entry in sorted(resources.files("lieparam").joinpath("scenarios").iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".scn"):
            sc = parse_scenario(entry.read_text(encoding="utf-8"), entry.name)
            out[sc.name] = sc
    return out
