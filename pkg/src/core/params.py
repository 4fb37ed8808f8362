"""
Scenario data model, scenario-file parsing and the derived physical constants
shared by every engine.
"""

import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional

import yaml

SPEED_OF_LIGHT = 3e8  # m/s
HALF_POWER_FACTOR = 0.886
GAUSSIAN_BEAM_FACTOR = 1.06

WALL_LENGTH_MODES = ("fixed", "exponential")


class ScenarioError(ValueError):
    """Scenario document failed to parse or violates a physical invariant."""


@dataclass(frozen=True)
class MftrParams:
    K: float = 5.0
    m: float = 2.0
    delta: float = 0.3
    mu: int = 2


@dataclass(frozen=True)
class Scenario:
    """Every physical and system parameter, in the units of the field names."""

    f: float = 0.3e12  # Hz
    eps_f: float = 0.00143  # 1/m
    h_A: float = 3.0
    h_U: float = 1.0
    h_B: float = 1.7
    R_B: float = 0.25
    lambda_A: float = 0.1  # 1/m^2
    lambda_B: float = 0.1
    lambda_W: float = 0.04
    mean_L_W: float = 3.0
    P_t_dBm: float = 5.0
    N0_dBm: float = -77.0
    N_A: int = 16
    N_U: int = 4
    R_A: float = 15.0
    sigma_theta_deg: float = 0.0
    mftr: MftrParams = field(default_factory=MftrParams)
    seed: Optional[int] = None
    sim_radius: Optional[float] = None
    n_trials: int = 100_000
    wall_length_mode: str = "fixed"

    @property
    def sigma_theta(self) -> float:
        return math.radians(self.sigma_theta_deg)

    @property
    def has_pointing_error(self) -> bool:
        return self.sigma_theta_deg > 0


@dataclass(frozen=True)
class DerivedConstants:
    alpha: float  # human blockage rate, 1/m
    eta: float  # wall blockage rate, 1/m
    xi: float  # free-space factor c^2/(4 pi f)^2
    sigma2: float  # 2 sigma^2, diffuse power per cluster
    G_A_max: float
    G_U_max: float
    phi_A_V: float
    phi_A_H: float
    phi_U_V: float
    phi_U_H: float
    phi_AP: float
    beta: float  # math.inf when there is no pointing error
    P_t_lin: float  # mW
    N0_lin: float  # mW
    height_gap: float  # h_A - h_U
    sim_radius: float

    @property
    def blockage_rate(self) -> float:
        return self.alpha + self.eta

    @property
    def G_max(self) -> float:
        return self.G_A_max * self.G_U_max


_FLOAT_FIELDS = {
    f.name
    for f in fields(Scenario)
    if f.name not in ("mftr", "seed", "N_A", "N_U", "n_trials", "wall_length_mode")
}
_INT_FIELDS = {"N_A", "N_U", "n_trials", "seed"}
_MFTR_FIELDS = {f.name for f in fields(MftrParams)}


def dbm_to_mw(p_dbm: float) -> float:
    return 10.0 ** (p_dbm / 10.0)


def _as_float(key: str, value: Any) -> float:
    if isinstance(value, bool):
        raise ScenarioError(f"{key}: expected a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"{key}: expected a number, got {value!r}")


def _as_int(key: str, value: Any) -> int:
    number = _as_float(key, value)
    if not number.is_integer():
        raise ScenarioError(f"{key}: expected an integer, got {value!r}")
    return int(number)


def _coerce(key: str, value: Any) -> Any:
    if value is None and key in ("seed", "sim_radius"):
        return None
    if key in _INT_FIELDS:
        return _as_int(key, value)
    if key in _FLOAT_FIELDS:
        return _as_float(key, value)
    if key == "wall_length_mode":
        return str(value)
    raise ScenarioError(f"Unknown scenario key: {key}")


def _mftr_from(raw: Mapping[str, Any]) -> MftrParams:
    values: Dict[str, Any] = {}
    for key, value in raw.items():
        if key not in _MFTR_FIELDS:
            raise ScenarioError(f"Unknown scenario key: mftr.{key}")
        if key == "mu":
            values[key] = _as_int("mftr.mu", value)
        else:
            values[key] = _as_float(f"mftr.{key}", value)
    return MftrParams(**values)


def scenario_from_dict(document: Mapping[str, Any]) -> Scenario:
    """Build and validate a Scenario from a flat mapping (mftr may be nested)."""
    values: Dict[str, Any] = {}
    mftr_raw: Dict[str, Any] = {}
    for key, value in document.items():
        key = str(key)
        if key == "mftr":
            if not isinstance(value, Mapping):
                raise ScenarioError("mftr: expected a mapping of K, m, delta, mu")
            mftr_raw.update(value)
        elif key.startswith("mftr."):
            mftr_raw[key.split(".", 1)[1]] = value
        else:
            values[key] = _coerce(key, value)

    defaults = asdict(MftrParams())
    defaults.update(mftr_raw)
    values["mftr"] = _mftr_from(defaults)

    scenario = Scenario(**values)
    validate_scenario(scenario)
    return scenario


def validate_scenario(s: Scenario) -> None:
    if not s.h_U < s.h_B < s.h_A:
        raise ScenarioError(
            f"h_U < h_B < h_A violated (h_U={s.h_U}, h_B={s.h_B}, h_A={s.h_A})"
        )
    for key in ("f", "R_B", "mean_L_W", "R_A", "lambda_A", "lambda_B", "lambda_W"):
        if getattr(s, key) <= 0:
            raise ScenarioError(f"{key} must be > 0, got {getattr(s, key)}")
    if s.eps_f < 0:
        raise ScenarioError(f"eps_f must be >= 0, got {s.eps_f}")
    for key in ("N_A", "N_U"):
        if getattr(s, key) < 2:
            raise ScenarioError(f"{key} must be >= 2, got {getattr(s, key)}")
    if s.sigma_theta_deg < 0:
        raise ScenarioError(f"sigma_theta_deg must be >= 0, got {s.sigma_theta_deg}")
    if s.sim_radius is not None and s.sim_radius <= 0:
        raise ScenarioError(f"sim_radius must be > 0, got {s.sim_radius}")
    if s.n_trials < 1:
        raise ScenarioError(f"n_trials must be >= 1, got {s.n_trials}")
    if s.wall_length_mode not in WALL_LENGTH_MODES:
        raise ScenarioError(
            f"wall_length_mode must be one of {WALL_LENGTH_MODES}, "
            f"got {s.wall_length_mode!r}"
        )

    mftr = s.mftr
    if mftr.K < 0:
        raise ScenarioError(f"mftr.K must be >= 0, got {mftr.K}")
    if mftr.m <= 0:
        raise ScenarioError(f"mftr.m must be > 0, got {mftr.m}")
    if not 0 <= mftr.delta <= 1:
        raise ScenarioError(f"mftr.delta must lie in [0, 1], got {mftr.delta}")
    if mftr.mu < 1:
        raise ScenarioError(f"mftr.mu must be a positive integer, got {mftr.mu}")


def load_scenario(config_text: str) -> Scenario:
    """Parse a scenario document; omitted keys take the reference defaults."""
    try:
        document = yaml.safe_load(config_text) if config_text else None
    except yaml.YAMLError as e:
        raise ScenarioError(f"Invalid scenario document: {e}")
    if document is None:
        document = {}
    if not isinstance(document, Mapping):
        raise ScenarioError("Scenario document must be a key-value mapping")
    return scenario_from_dict(document)


def load_scenario_file(path: str) -> Scenario:
    """Load a scenario file, or the scenario embedded in a run manifest."""
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Scenario file not found: {path}")
    text = file_path.read_text(encoding="utf-8")
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ScenarioError(f"Invalid scenario document: {e}")
    if isinstance(document, Mapping) and isinstance(document.get("manifest"), Mapping):
        document = document["manifest"]
    if isinstance(document, Mapping) and "tool_version" in document:
        document = document.get("scenario") or {}
    if document is None:
        document = {}
    if not isinstance(document, Mapping):
        raise ScenarioError("Scenario document must be a key-value mapping")
    return scenario_from_dict(document)


def scenario_to_dict(s: Scenario) -> Dict[str, Any]:
    data = asdict(s)
    data["mftr"] = asdict(s.mftr)
    return data


def serialize_scenario(s: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(s), sort_keys=False)


def apply_overrides(s: Scenario, assignments: Iterable[str]) -> Scenario:
    """Apply ``key=value`` overrides; ``mftr.K=3`` addresses fading params."""
    document = scenario_to_dict(s)
    for assignment in assignments:
        if "=" not in assignment:
            raise ScenarioError(f"Override must look like key=value: {assignment!r}")
        key, raw = assignment.split("=", 1)
        key = key.strip()
        value = yaml.safe_load(raw)
        if key.startswith("mftr."):
            document["mftr"][key.split(".", 1)[1]] = value
        else:
            document[key] = value
    return scenario_from_dict(document)


def with_updates(s: Scenario, **changes: Any) -> Scenario:
    """Validated copy of ``s`` with ``changes`` applied."""
    updated = replace(s, **changes)
    validate_scenario(updated)
    return updated


def pointing_beta(sigma_theta: float, n_a: int, n_u: int) -> float:
    if sigma_theta == 0:
        return math.inf
    return GAUSSIAN_BEAM_FACTOR**2 / (2 * sigma_theta**2 * (n_a**2 + n_u**2))


def half_power_beamwidth(n: int) -> float:
    return 2 * HALF_POWER_FACTOR / n


def derive_constants(s: Scenario) -> DerivedConstants:
    height_gap = s.h_A - s.h_U
    alpha = 2 * s.lambda_B * s.R_B * (s.h_B - s.h_U) / height_gap
    eta = 2 * s.lambda_W * s.mean_L_W / math.pi
    rate = alpha + eta

    if s.sim_radius is not None:
        sim_radius = s.sim_radius
    else:
        sim_radius = max(30.0, 10.0 / rate) if rate > 0 else 30.0

    phi_a = half_power_beamwidth(s.N_A)
    phi_u = half_power_beamwidth(s.N_U)

    return DerivedConstants(
        alpha=alpha,
        eta=eta,
        xi=SPEED_OF_LIGHT**2 / (4 * math.pi * s.f) ** 2,
        sigma2=1.0 / (s.mftr.mu * (s.mftr.K + 1)),
        G_A_max=math.pi * s.N_A**2,
        G_U_max=math.pi * s.N_U**2,
        phi_A_V=phi_a,
        phi_A_H=phi_a,
        phi_U_V=phi_u,
        phi_U_H=phi_u,
        phi_AP=math.atan(height_gap / s.R_A),
        beta=pointing_beta(s.sigma_theta, s.N_A, s.N_U),
        P_t_lin=dbm_to_mw(s.P_t_dBm),
        N0_lin=dbm_to_mw(s.N0_dBm),
        height_gap=height_gap,
        sim_radius=sim_radius,
    )
