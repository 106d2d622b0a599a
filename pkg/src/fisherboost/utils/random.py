import zlib

import numpy as np

def substream(seed: int, name: str) -> np.random.Generator:
  """
  Derive a named, reproducible random stream from a single seed.

  The bit generator is PCG64 seeded with `SeedSequence([seed, crc32(name)])`, so each
  module draws from its own stream and adding draws in one module never shifts another.

  :param seed: Global seed (the CLI's `--seed`)
  :param name: Sub-stream name, e.g. 'features' or 'bootstrap'
  :return: Independent `numpy.random.Generator`
  """
  if seed < 0:
    raise ValueError("seed must be non-negative")
  key = zlib.crc32(name.encode('utf8'))
  return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, key])))
