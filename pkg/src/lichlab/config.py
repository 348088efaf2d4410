"""JSON run configurations: parsing, validation and object construction."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .fields import ExpressionError, RadialField
from .model import GeometryError, ModelManifold, WarpingFunction, riccati_warping
from .nonlinearity import CoefficientError, CoefficientSet

MODEL_KINDS = ("euclidean", "hyperbolic", "tabulated", "riccati")
BUNDLED = ("pinched", "theorem_a", "theorem_b")


class ConfigError(ValueError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def config_hash(raw: dict) -> str:
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass
class RunConfig:
    raw: dict
    model: dict
    coefficients: dict
    grid_n: int = 2000
    seed: int = 0
    sections: dict = field(default_factory=dict)
    source: str = "<dict>"

    @property
    def hash(self) -> str:
        return config_hash(self.raw)

    def section(self, name: str) -> dict:
        return dict(self.sections.get(name) or {})

    @classmethod
    def from_dict(cls, raw: dict, source: str = "<dict>") -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        model = raw.get("model")
        coeffs = raw.get("coefficients")
        if not isinstance(model, dict):
            raise ConfigError("missing 'model' object")
        if not isinstance(coeffs, dict):
            raise ConfigError("missing 'coefficients' object")
        sections = {k: v for k, v in raw.items()
                    if k not in ("model", "coefficients", "grid_n", "seed", "name", "description")}
        cfg = cls(raw, model, coeffs, int(raw.get("grid_n", 2000)), int(raw.get("seed", 0)),
                  sections, source)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(raw, str(path))

    @classmethod
    def bundled(cls, name: str) -> "RunConfig":
        if name not in BUNDLED:
            raise ConfigError(f"no bundled config {name!r}; choose from {BUNDLED}")
        text = resources.files("lichlab").joinpath("configs", f"{name}.json").read_text()
        return cls.from_dict(json.loads(text), f"bundled:{name}")

    def validate(self) -> None:
        kind = self.model.get("kind", "euclidean")
        if kind not in MODEL_KINDS:
            raise ConfigError(f"model.kind must be one of {MODEL_KINDS}, got {kind!r}")
        m = self.model.get("m", 3)
        if not (isinstance(m, int) and m >= 2):
            raise ConfigError(f"model.m must be an integer >= 2, got {m!r}")
        R_max = self.model.get("R_max", 16.0)
        if not (isinstance(R_max, (int, float)) and math.isfinite(R_max) and R_max > 0):
            raise ConfigError(f"model.R_max must be a positive number, got {R_max!r}")
        for key in ("sigma", "tau"):
            if not isinstance(self.coefficients.get(key), (int, float)):
                raise ConfigError(f"coefficients.{key} must be a number")
        sig, tau = self.coefficients["sigma"], self.coefficients["tau"]
        if not sig > 1:
            raise ConfigError(f"invariant violated: sigma > 1 is required (got sigma={sig})")
        if not tau < 1:
            raise ConfigError(f"invariant violated: tau < 1 is required (got tau={tau})")
        if self.grid_n < 8:
            raise ConfigError("grid_n must be at least 8")
        for key in ("a", "b", "c"):
            if key not in self.coefficients:
                raise ConfigError(f"coefficients.{key} is missing")
        # building surfaces expression and sign errors early
        self.build_model()
        self.build_coefficients()

    def build_model(self) -> ModelManifold:
        kind = self.model.get("kind", "euclidean")
        m = int(self.model.get("m", 3))
        R_max = float(self.model.get("R_max", 16.0))
        try:
            if kind == "euclidean":
                return ModelManifold.euclidean(m, R_max)
            if kind == "hyperbolic":
                return ModelManifold.hyperbolic(m, float(self.model.get("k", 1.0)), R_max)
            if kind == "tabulated":
                if "csv" not in self.model:
                    raise ConfigError("tabulated model needs model.csv with an 'r,g' table")
                return ModelManifold(m, WarpingFunction.from_csv(self.model["csv"]), R_max)
            if "F" not in self.model:
                raise ConfigError("riccati model needs model.F (g'' = F g)")
            return ModelManifold(m, riccati_warping(self.model["F"], R_max), R_max)
        except (GeometryError, ExpressionError) as exc:
            raise ConfigError(f"model: {exc}") from exc

    def build_coefficients(self) -> CoefficientSet:
        co = self.coefficients
        try:
            fields_ = [RadialField.coerce(co[k]) for k in ("a", "b", "c")]
            return CoefficientSet(*fields_, float(co["sigma"]), float(co["tau"]))
        except (CoefficientError, ExpressionError, ValueError) as exc:
            raise ConfigError(f"coefficients: {exc}") from exc
