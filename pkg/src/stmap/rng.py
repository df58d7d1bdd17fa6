"""Counter-based random streams.

Every random draw in the package comes from a Philox stream keyed by
``(seed, *tags)``. Streams for distinct purposes (initial cloud, banks,
per-step Brownian noise, sweep repetitions) never overlap, results do not
depend on evaluation order or thread count, and the same ``(seed, config)``
pair reproduces byte-identical output on any machine.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream(seed: int, *tags) -> np.random.Generator:
    """Return a Generator for the Philox stream keyed by ``(seed, *tags)``.

    Tags may be ints or strings; they are hashed into the 128-bit Philox key,
    so e.g. ``substream(s, "noise", k)`` is a fresh independent stream per
    step ``k``.
    """
    material = repr((int(seed),) + tuple(tags)).encode()
    digest = hashlib.sha256(material).digest()
    key = np.frombuffer(digest[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
