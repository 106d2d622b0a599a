import json

from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing import Any, Literal

DEFAULT_THETA_GRID = (1/10, 1/12, 1/15, 1/20, 1/25, 1/30, 1/40, 1/50)

class EGConfig(BaseModel):
  model_config = ConfigDict(extra='forbid')

  tolerance: float = Field(1e-7, gt=0)
  window: int = Field(50, ge=1)
  max_iters: int = Field(10_000, ge=1)
  step_scale: float = Field(1.0, gt=0) # multiplier on sqrt(2 log n) / L_f

class ReferenceConfig(BaseModel):
  model_config = ConfigDict(extra='forbid')

  tolerance: float = Field(1e-9, gt=0) # projected-gradient stationarity
  max_iters: int = Field(200_000, ge=1)

class BoostConfig(BaseModel):
  """
  Settings of one boosting run.

  :param theta: Asymmetry/regularization parameter of the QP, in (0, 1]
  :param epsilon: Column-generation termination threshold
  :param n_max: Maximum number of weak classifiers
  :param delta: Regularization added to Q wherever it is inverted
  :param q_exact: Use the exact block Q instead of its (1/m)-diagonal approximation
  :param feature_fraction: Fraction of features sampled for the stump search
  :param seed: Seed of all random sub-streams
  """
  model_config = ConfigDict(extra='forbid')

  theta: float = Field(0.1, gt=0, le=1)
  epsilon: float = Field(1e-5, gt=0)
  n_max: int = Field(200, ge=1)
  delta: float = Field(1e-6, ge=0)
  q_exact: bool = False
  feature_fraction: float = Field(1.0, gt=0, le=1)
  seed: int = Field(0, ge=0)
  warm_start_mass: float = Field(1e-2, gt=0, lt=1)
  solver: Literal["eg", "reference"] = "eg"
  threads: int = Field(1, ge=1)
  k_asym: float = Field(2.0, gt=0)
  min_weak_for_lac: int = Field(30, ge=0)
  eg: EGConfig = EGConfig()
  reference: ReferenceConfig = ReferenceConfig()

class CascadeConfig(BaseModel):
  model_config = ConfigDict(extra='forbid')

  exit_schedule: list[int] = Field(default_factory=lambda: [5, 10, 20, 40, 80])
  d_target: float = Field(0.997, ge=0, le=1)
  f_target: float = Field(0.5, gt=0, le=1)
  neg_quota: int = Field(1000, ge=1)
  shrinkage: float = Field(1e-3, ge=0, le=1)
  boost: BoostConfig = BoostConfig()

  @field_validator('exit_schedule')
  @classmethod
  def _check_schedule(cls, value: list[int]) -> list[int]:
    if not value:
      raise ValueError("exit schedule must not be empty")
    if value[0] < 1 or any(b <= a for a, b in zip(value, value[1:])):
      raise ValueError(f"exit schedule must be strictly increasing positive counts, got {value}")
    return value

def merge_config(*layers: dict[str, Any]) -> dict[str, Any]:
  """
  Deep-merge configuration layers; later layers win. `None` values never override.

  Used as `merge_config(defaults, file_values, flag_values)`.
  """
  merged: dict[str, Any] = {}
  for layer in layers:
    for key, value in (layer or {}).items():
      if value is None:
        continue
      if isinstance(value, dict) and isinstance(merged.get(key), dict):
        merged[key] = merge_config(merged[key], value)
      else:
        merged[key] = value
  return merged

def load_config_file(path: str | None) -> dict[str, Any]:
  """
  Read a JSON config file. A missing path means an empty layer.
  """
  if not path:
    return {}
  with open(path, encoding='utf8') as f:
    values = json.load(f)
  if not isinstance(values, dict):
    raise ValueError(f"{path}: config file must hold a JSON object")
  return values
