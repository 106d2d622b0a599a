import json
import os

from collections.abc import Iterable, Sequence
from typing import Any

def format_value(value: Any) -> str:
  """
  Render one CSV cell. Floats use `repr` so they read back bit-exact.
  """
  if value is None:
    return ""
  if isinstance(value, bool):
    return "1" if value else "0"
  if isinstance(value, float):
    return repr(value)
  if hasattr(value, 'item'): # numpy scalars
    return format_value(value.item())
  return str(value)

def write_csv(
    path: str,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]]
) -> int:
  """
  Write a CSV artifact with LF line endings and '.' decimal separators.

  :param path: Destination file
  :param header: Column names
  :param rows: Row values, rendered with `format_value`
  :return: Number of data rows written
  """
  directory = os.path.dirname(path)
  if directory:
    os.makedirs(directory, exist_ok=True)

  count = 0
  with open(path, 'w', encoding='utf8', newline='\n') as f:
    f.write(','.join(header) + '\n')
    for row in rows:
      f.write(','.join(format_value(v) for v in row) + '\n')
      count += 1
  return count

def to_str(obj: Any) -> str:
  try:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True)
  except TypeError:
    return str(obj)

def write_json(path: str, obj: Any) -> None:
  directory = os.path.dirname(path)
  if directory:
    os.makedirs(directory, exist_ok=True)
  with open(path, 'w', encoding='utf8', newline='\n') as f:
    f.write(to_str(obj) + '\n')

def sidecar_path(path: str) -> str:
  """Path of the metadata file accompanying an artifact."""
  return f"{path}.meta.json"

def write_sidecar(path: str, metadata: dict) -> str:
  """
  Echo generator parameters or the effective config next to an artifact.

  :param path: Artifact path
  :param metadata: JSON-serializable dictionary
  :return: Path of the written sidecar file
  """
  target = sidecar_path(path)
  write_json(target, metadata)
  return target
