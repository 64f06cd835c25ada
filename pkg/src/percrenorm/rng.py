"""Counter-based random numbers with stable per-element indexing.

Every random quantity in this package is a function of
``(master_seed, stream_id, element_index)``.  A stream is the sequence of
doubles produced by a Philox generator keyed with
``key = [master_seed, stream_id]``; element ``i`` of the stream is the
``i``-th double.  Streams with different keys are independent, and any
contiguous range of elements can be generated without producing the
prefix, so trials can be distributed over workers in any order while
reproducing the exact single-process results.

Philox advances its counter in blocks of four 64-bit words, and numpy's
``Generator.random`` consumes exactly one word per double, so
``BitGenerator.advance(n)`` skips ``4 * n`` elements.  ``uniforms`` hides
that granularity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSpec:
    """Key of one random stream: a master seed plus a stream index.

    Estimators derive per-trial streams by offsetting ``stream_id``; the
    convention used throughout is trial ``t`` of an estimate seeded with
    stream ``s`` reads stream ``s + t``.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.master_seed, (int, np.integer)):
            raise TypeError("master_seed must be an integer")
        if not isinstance(self.stream_id, (int, np.integer)):
            raise TypeError("stream_id must be an integer")

    def with_stream(self, stream_id: int) -> "RngSpec":
        return replace(self, stream_id=int(stream_id))

    def block(self, index: int, size: int) -> "RngSpec":
        """Stream for slot ``index`` of a partition into blocks of ``size`` streams."""
        if size <= 0:
            raise ValueError("block size must be positive")
        return self.with_stream(self.stream_id + index * size)

    def bit_generator(self) -> np.random.Philox:
        key = np.array(
            [self.master_seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )
        return np.random.Philox(key=key)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(self.bit_generator())


def uniforms(spec: RngSpec, start: int, count: int) -> np.ndarray:
    """Elements ``[start, start + count)`` of the stream, as float64 in [0, 1).

    Equal to ``spec.generator().random(start + count)[start:]`` without the
    cost of the prefix.
    """
    if start < 0 or count < 0:
        raise ValueError("start and count must be nonnegative")
    bg = spec.bit_generator()
    if start >= 4:
        bg.advance(start // 4)
    gen = np.random.Generator(bg)
    skip = start % 4
    if skip:
        gen.random(skip)
    return gen.random(count)
