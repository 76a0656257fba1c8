"""Run configuration: TOML file, schema-validated, defaults expanded.

Unknown keys are rejected. Powers on the configuration surface are in dBW
except the warden threshold ``tau``, the noise floor and the energy budgets,
which are in watts.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Optional

import tomli
import tomli_w
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .channel import Carrier, FadingModel, NodePositions, NoiseFloor, PathLossExponents, Scenario
from .detection import WardenConfig
from .env import EnvConfig
from .sac.core import SacHyperparams
from .semcom import BleuConfig


class ConfigError(ValueError):
    pass


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


Point = tuple[float, float]


class FadingBlock(_Block):
    alpha_shape: float = Field(2.0, gt=0)
    mu: float = Field(4.0, gt=0)


class ScenarioBlock(_Block):
    transmitter: Point = (0.0, 0.0)
    warden: Point = (0.0, 100.0)
    receiver: Point = (100.0, 0.0)
    jammer: Point = (100.0, 100.0)
    regulator: Point = (50.0, 50.0)
    frequency_hz: float = Field(2.4e9, gt=0)
    wavelength_m: Optional[float] = Field(None, gt=0)
    alpha_tw: float = Field(1.2, gt=0)
    alpha_tr: float = Field(1.0, gt=0)
    alpha_jw: float = Field(1.4, gt=0)
    alpha_jr: float = Field(1.4, gt=0)
    fading: FadingBlock = FadingBlock()
    k_squared: float = Field(1e-9, ge=0)

    @model_validator(mode="after")
    def _links_nonzero(self):
        try:
            self.positions()
        except ValueError as exc:
            raise ValueError(str(exc)) from None
        return self

    def positions(self) -> NodePositions:
        return NodePositions(self.transmitter, self.warden, self.receiver, self.jammer, self.regulator)


class WardenBlock(_Block):
    tau: float = Field(50.0, gt=0)
    zeta_th: float = Field(0.95, gt=0, le=1)
    mc_samples: int = Field(4096, ge=1)
    crn: bool = True


class BleuBlock(_Block):
    max_order: int = Field(4, ge=1)
    smoothing: bool = True


class EnvBlock(_Block):
    energy_factor_t: float = Field(1.0, gt=0)
    energy_factor_j: float = Field(1.0, gt=0)
    budget_t: Optional[float] = Field(None, ge=0)
    budget_j: Optional[float] = Field(None, ge=0)
    penalty_psi: float = Field(-1.0, lt=0)
    p_t_bounds_dbw: tuple[float, float] = (0.0, 60.0)
    p_j_bounds_dbw: tuple[float, float] = (0.0, 60.0)
    episode_len: int = Field(50, ge=1)
    corpus_path: Optional[str] = None
    reward_trials: int = Field(20, ge=1)
    use_lookup: bool = True
    lookup_trials: int = Field(4000, ge=1)
    lookup_cache: Optional[str] = None
    fading_state_max: float = Field(4.0, gt=0)
    bleu: BleuBlock = BleuBlock()

    @model_validator(mode="after")
    def _bounds_ordered(self):
        for name in ("p_t_bounds_dbw", "p_j_bounds_dbw"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} must satisfy min < max")
        return self


class SacBlock(_Block):
    gamma: float = Field(0.95, ge=0, lt=1)
    batch_size: int = Field(512, ge=1)
    lr_actor: float = Field(1e-4, gt=0)
    lr_critic: float = Field(1e-4, gt=0)
    entropy_coef: float = Field(0.2, ge=0)
    soft_update: float = Field(0.995, gt=0, lt=1)
    buffer_capacity: int = Field(100_000, ge=1)
    warmup_steps: int = Field(1000, ge=0)
    updates_per_step: int = Field(1, ge=1)
    hidden: tuple[int, ...] = (256, 256)
    optimizer: str = Field("adam", pattern="^(adam|sgd)$")


class RunBlock(_Block):
    seed: int = Field(0, ge=0, lt=2**64)
    output_dir: str = "runs"
    episodes: int = Field(200, ge=0)
    eval_every: int = Field(10, ge=0)
    eval_episodes: int = Field(3, ge=1)


class SweepBlock(_Block):
    p_t_min_dbw: float = 30.0
    p_t_max_dbw: float = 60.0
    p_t_step_db: float = Field(1.0, gt=0)
    p_j_dbw: float = 45.0
    draws: int = Field(4096, ge=1)
    chart: bool = True


class OracleBlock(_Block):
    step_db: float = Field(1.0, gt=0)
    draws: int = Field(4096, ge=1)


class BleuCurveBlock(_Block):
    beps: tuple[float, ...] = (0.0, 0.001, 0.01, 0.05, 0.11, 0.24, 0.4, 0.5)
    trials: int = Field(1000, ge=1)


class RunConfig(_Block):
    scenario: ScenarioBlock = ScenarioBlock()
    warden: WardenBlock = WardenBlock()
    env: EnvBlock = EnvBlock()
    sac: SacBlock = SacBlock()
    run: RunBlock = RunBlock()
    sweep: SweepBlock = SweepBlock()
    oracle: OracleBlock = OracleBlock()
    bleu_curve: BleuCurveBlock = BleuCurveBlock()

    def scenario_obj(self) -> Scenario:
        sc = self.scenario
        return Scenario(
            positions=sc.positions(),
            carrier=Carrier(frequency_hz=sc.frequency_hz, wavelength=sc.wavelength_m),
            exponents=PathLossExponents(sc.alpha_tw, sc.alpha_tr, sc.alpha_jw, sc.alpha_jr),
            fading=FadingModel(sc.fading.alpha_shape, sc.fading.mu),
            noise=NoiseFloor(sc.k_squared),
        )

    def warden_obj(self) -> WardenConfig:
        w = self.warden
        return WardenConfig(tau=w.tau, mc_samples=w.mc_samples, zeta_th=w.zeta_th, crn=w.crn)

    def env_obj(self) -> EnvConfig:
        e = self.env
        return EnvConfig(
            scenario=self.scenario_obj(),
            warden=self.warden_obj(),
            energy_factor_t=e.energy_factor_t,
            energy_factor_j=e.energy_factor_j,
            budget_t=e.budget_t,
            budget_j=e.budget_j,
            penalty_psi=e.penalty_psi,
            p_t_bounds_dbw=e.p_t_bounds_dbw,
            p_j_bounds_dbw=e.p_j_bounds_dbw,
            episode_len=e.episode_len,
            reward_trials=e.reward_trials,
            use_lookup=e.use_lookup,
            lookup_trials=e.lookup_trials,
            lookup_cache=e.lookup_cache,
            corpus_path=e.corpus_path,
            bleu=BleuConfig(max_order=e.bleu.max_order, smoothing=e.bleu.smoothing),
            fading_state_max=e.fading_state_max,
        )

    def sac_obj(self) -> SacHyperparams:
        return SacHyperparams(**self.sac.model_dump())

    def to_dict(self) -> dict:
        return self.model_dump(mode="json", exclude_none=True)

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def digest(self) -> str:
        return hashlib.sha256(self.to_toml().encode()).hexdigest()[:16]


def _format_errors(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{path}: {err['msg']}")
    return "; ".join(parts)


def parse_config(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from None


def load_config(path: str | Path | None) -> RunConfig:
    """Parse a TOML run configuration; ``None`` returns all defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = tomli.loads(path.read_text(encoding="utf-8"))
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data)


def echo_config(cfg: RunConfig, out_dir: str | Path) -> Path:
    out = Path(out_dir) / "effective_config.toml"
    out.write_text(cfg.to_toml(), encoding="utf-8")
    return out


def reference_config() -> str:
    """Every key with its default value."""
    return RunConfig().to_toml()
