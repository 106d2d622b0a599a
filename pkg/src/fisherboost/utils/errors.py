class FisherBoostError(Exception):
  """Base class of all errors raised by fisherboost."""

class DatasetFormatError(FisherBoostError, ValueError):
  """
  A dataset file could not be parsed.

  :param message: What went wrong
  :param path: Path of the offending file
  :param line: 1-based line number, if the error is tied to a line
  """
  def __init__(
      self,
      message: str,
      path: str | None = None,
      line: int | None = None
  ) -> None:
    self.message = message
    self.path = path
    self.line = line
    location = path or "<input>"
    if line is not None:
      location = f"{location}:{line}"
    super().__init__(f"{location}: {message}")

class SolverError(FisherBoostError):
  """A simplex QP solve failed (non-finite gradient or no convergence)."""

class PostprocessError(FisherBoostError):
  """Class statistics cannot produce an LAC/LDA direction."""

class ModelFormatError(FisherBoostError):
  """A model file is malformed."""

class ModelVersionError(ModelFormatError):
  """
  A model file was written with an unsupported format version.

  :param found: Version stored in the file
  :param expected: Version this build reads and writes
  """
  def __init__(self, found: object, expected: int) -> None:
    self.found = found
    self.expected = expected
    super().__init__(
      f"model format version {found} is not supported (this build reads version {expected})"
    )
