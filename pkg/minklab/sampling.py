"""
Deterministic sample plans over R^n minus the origin
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import SpecError

# Points closer to the origin than this are rejected everywhere.
EXCLUSION_RADIUS = 1e-8


@dataclass(frozen=True)
class SamplePlan:
    """Seeded stream of admissible sample points

    Directions are normalized standard normal vectors; radii are
    log-uniform in radius_range. extra_points are appended verbatim after
    the random stream.
    """

    seed: int = 7
    count: int = 200
    radius_range: Tuple[float, float] = (0.5, 2.0)
    exclusion: Optional[Dict[str, float]] = None
    extra_points: Tuple[Tuple[float, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if int(self.count) < 1:
            raise SpecError("sample plan count must be at least 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise SpecError("sample plan seed must fit in 64 bits")
        r_min, r_max = self.radius_range
        if r_min < 1e-3 or r_max < r_min:
            raise SpecError("radius range must satisfy 1e-3 <= rmin <= rmax")

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(int(self.seed))

    def directions(self, dim: int) -> np.ndarray:
        """count unit vectors, uniform on the Euclidean sphere"""
        rng = self._rng()
        raw = rng.standard_normal((int(self.count), dim))
        norms = np.linalg.norm(raw, axis=1)
        # A zero draw has probability zero; guard anyway so points stay admissible.
        norms[norms == 0.0] = 1.0
        dirs = raw / norms[:, None]
        return self._with_extra(dirs, dim, normalize=True)

    def points(self, dim: int) -> np.ndarray:
        """count admissible points with log-uniform Euclidean radii"""
        rng = self._rng()
        raw = rng.standard_normal((int(self.count), dim))
        norms = np.linalg.norm(raw, axis=1)
        norms[norms == 0.0] = 1.0
        r_min, r_max = self.radius_range
        radii = np.exp(rng.uniform(np.log(r_min), np.log(r_max), int(self.count)))
        pts = raw / norms[:, None] * radii[:, None]
        return self._with_extra(pts, dim, normalize=False)

    def _with_extra(self, arr: np.ndarray, dim: int, normalize: bool) -> np.ndarray:
        if not self.extra_points:
            return arr
        extra = np.array(self.extra_points, dtype=float).reshape(-1, dim)
        if np.any(np.linalg.norm(extra, axis=1) < EXCLUSION_RADIUS):
            raise SpecError("extra sample point inside the exclusion radius")
        if normalize:
            extra = extra / np.linalg.norm(extra, axis=1)[:, None]
        return np.vstack([arr, extra])

    def with_count(self, count: int) -> "SamplePlan":
        return SamplePlan(self.seed, count, self.radius_range, self.exclusion, self.extra_points)

    def summary(self) -> Dict:
        return {
            "seed": int(self.seed),
            "count": int(self.count),
            "radius_range": [float(self.radius_range[0]), float(self.radius_range[1])],
            "extra_points": [list(map(float, p)) for p in self.extra_points],
        }


def plan_from_config(config, extra_points: Sequence[Sequence[float]] = ()) -> SamplePlan:
    """Build a plan from a Config's seed/count/rmin/rmax"""
    return SamplePlan(
        seed=int(config.get("seed")),
        count=int(config.get("count")),
        radius_range=(float(config.get("rmin")), float(config.get("rmax"))),
        extra_points=tuple(tuple(p) for p in extra_points),
    )
