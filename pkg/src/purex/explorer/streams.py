"""Per-arm observation streams drawn in fixed-size chunks."""

from __future__ import annotations

import numpy as np

from purex import arms

CHUNK = 16384


class ArmStream:
    """Observations of one arm, generated ``CHUNK`` at a time.

    Both frameworks and both LUCB paths draw through this class, so a
    given seed yields the same observation sequence however it is consumed.

    Args:
        dist: The arm distribution.
        source: The arm's :class:`purex.arms.RandomSource`.
    """

    def __init__(self, dist, source: arms.RandomSource):
        self.dist = dist
        self._gen = source.generator()
        self.chunk = np.empty(0)
        self.pos = 0

    def refill(self) -> None:
        self.chunk = np.ascontiguousarray(arms.sample(self.dist, self._gen, CHUNK), dtype=float)
        self.pos = 0

    def take(self, k: int) -> np.ndarray:
        """The next ``k`` observations."""
        out = np.empty(int(k))
        done = 0
        while done < k:
            if self.pos == self.chunk.size:
                self.refill()
            step = min(k - done, self.chunk.size - self.pos)
            out[done : done + step] = self.chunk[self.pos : self.pos + step]
            self.pos += step
            done += step
        return out

    def next(self) -> float:
        if self.pos == self.chunk.size:
            self.refill()
        x = float(self.chunk[self.pos])
        self.pos += 1
        return x


def arm_streams(problem, seed: int) -> list[ArmStream]:
    """One independent stream per arm for replication seed ``seed``."""
    root = arms.RandomSource(int(seed))
    return [ArmStream(d, root.child(i)) for i, d in enumerate(problem.arms)]
