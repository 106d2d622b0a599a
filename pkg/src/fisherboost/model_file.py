import json
import logging

import numpy as np

from dataclasses import dataclass, field
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from typing import Any, Literal

from fisherboost.boosting.classifier import StrongClassifier
from fisherboost.boosting.stumps import Stump
from fisherboost.cascade.multi_exit import Exit, MultiExitCascade
from fisherboost.haar.space import FeatureSpace
from fisherboost.utils.errors import ModelFormatError, ModelVersionError
from fisherboost.utils.file import write_json

logger = logging.getLogger('fisherboost.model_file')

FORMAT_VERSION = 1

class StumpRecord(BaseModel):
  model_config = ConfigDict(extra='forbid')

  feature_index: int = Field(ge=0)
  threshold: str # 17 significant digits
  polarity: Literal[1, -1]

class ExitRecord(BaseModel):
  model_config = ConfigDict(extra='forbid')

  prefix_length: int = Field(ge=1)
  weights: list[float]
  offset: float
  postprocess: Literal["lac", "lda"] | None = None

class FeatureSpaceRecord(BaseModel):
  """
  `features` maps every Haar index a stump references to [type, x, y, w, h].
  """
  model_config = ConfigDict(extra='forbid')

  kind: Literal["vector", "haar"]
  dim: int = Field(ge=1)
  window: tuple[int, int] | None = None
  features: dict[str, list[Any]] | None = None

class ModelRecord(BaseModel):
  model_config = ConfigDict(extra='forbid')

  format_version: int
  kind: Literal["strong", "cascade"]
  method: str
  provenance: dict[str, Any] = {}
  feature_space: FeatureSpaceRecord
  stumps: list[StumpRecord]
  exits: list[ExitRecord]
  node_goals: tuple[float, float] | None = None
  config: dict[str, Any] = {}

@dataclass
class LoadedModel:
  model: StrongClassifier | MultiExitCascade
  space: FeatureSpace
  config: dict = field(default_factory=dict)

  @property
  def cascade(self) -> MultiExitCascade:
    """The model as a cascade; a strong classifier becomes a single-exit cascade."""
    if isinstance(self.model, MultiExitCascade):
      return self.model
    return MultiExitCascade.from_strong(self.model)

def _json_safe(obj: Any) -> Any:
  if isinstance(obj, dict):
    return {str(k): _json_safe(v) for k, v in obj.items()}
  if isinstance(obj, (list, tuple)):
    return [_json_safe(v) for v in obj]
  if isinstance(obj, np.generic):
    return obj.item()
  if isinstance(obj, np.ndarray):
    return obj.tolist()
  return obj

def to_record(
    model: StrongClassifier | MultiExitCascade,
    space: FeatureSpace,
    config: dict | None = None
) -> ModelRecord:
  if isinstance(model, MultiExitCascade):
    kind = "cascade"
    exits = model.exits
    node_goals = model.node_goals
  else:
    kind = "strong"
    exits = [Exit(model.n, model.weights, model.offset, model.provenance.get('postprocess'))]
    node_goals = None
  return ModelRecord(
    format_version=FORMAT_VERSION,
    kind=kind,
    method=model.method,
    provenance=_json_safe(model.provenance),
    feature_space=FeatureSpaceRecord(**space.describe([s.feature_index for s in model.stumps])),
    stumps=[StumpRecord(**s.to_dict()) for s in model.stumps],
    exits=[
      ExitRecord(
        prefix_length=e.prefix_length,
        weights=e.weights.tolist(),
        offset=float(e.offset),
        postprocess=e.postprocess
      )
      for e in exits
    ],
    node_goals=node_goals,
    config=_json_safe(config or {})
  )

def save_model(
    model: StrongClassifier | MultiExitCascade,
    path: str,
    space: FeatureSpace,
    config: dict | None = None
) -> None:
  """
  Write a model file.

  :param model: Strong classifier or cascade
  :param path: Destination
  :param space: Feature space the stump indices refer to
  :param config: Effective configuration, echoed into the file
  """
  write_json(path, to_record(model, space, config).model_dump(mode='json'))
  logger.info(f"Model ({model.method}, {len(model.stumps)} weak classifiers) written to {path}")

def from_record(record: ModelRecord) -> LoadedModel:
  fs = record.feature_space
  space = FeatureSpace(fs.kind, fs.dim, tuple(fs.window) if fs.window else None)
  try:
    stumps = [Stump.from_dict(s.model_dump()) for s in record.stumps]
    exits = [Exit(e.prefix_length, np.array(e.weights), e.offset, e.postprocess) for e in record.exits]
    if record.kind == "strong":
      if len(exits) != 1:
        raise ModelFormatError(f"a strong model has exactly one exit, found {len(exits)}")
      provenance = dict(record.provenance)
      if exits[0].postprocess is not None:
        provenance['postprocess'] = exits[0].postprocess
      model = StrongClassifier(stumps, exits[0].weights, exits[0].offset, record.method, provenance)
    else:
      model = MultiExitCascade(
        stumps, exits,
        tuple(record.node_goals) if record.node_goals else (0.997, 0.5),
        record.method, dict(record.provenance)
      )
  except ModelFormatError:
    raise
  except ValueError as e:
    raise ModelFormatError(f"inconsistent model: {e}") from e
  return LoadedModel(model, space, dict(record.config))

def load_model(path: str) -> LoadedModel:
  """
  Read a model file written by `save_model`.

  :raises ModelVersionError: If the file's format version differs from FORMAT_VERSION
  :raises ModelFormatError: If the file is not a valid model file
  """
  with open(path, encoding='utf8') as f:
    try:
      raw = json.load(f)
    except json.JSONDecodeError as e:
      raise ModelFormatError(f"{path}: not a JSON model file ({e})") from e
  if not isinstance(raw, dict) or 'format_version' not in raw:
    raise ModelFormatError(f"{path}: missing format_version")
  if raw['format_version'] != FORMAT_VERSION:
    raise ModelVersionError(raw['format_version'], FORMAT_VERSION)
  try:
    record = ModelRecord.model_validate(raw)
  except ValidationError as e:
    raise ModelFormatError(f"{path}: {e}") from e
  return from_record(record)
