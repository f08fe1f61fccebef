"""
Derivative tower of F^2 up to order 4

Each catalog family is an explicit composition of polynomials, square roots
and products, so the partial derivatives are propagated exactly (to
rounding) through truncated multivariate Taylor arithmetic. Finite
differences are kept only as a cross-check.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import UnsupportedOrder
from .norms import NormSpec, check_point, evaluate

SUPPORTED_ORDERS = (2, 3, 4)

# Relative FD step per derivative order (h = scale * |y|).
FD_STEP_SCALE = {1: 1e-4, 2: 3e-3, 3: 5e-3, 4: 1e-2}

# Univariate central stencils: offsets (in units of h) and weights, O(h^2).
_STENCILS = {
    1: ((1, -1), (0.5, -0.5)),
    2: ((1, 0, -1), (1.0, -2.0, 1.0)),
    3: ((2, 1, -1, -2), (0.5, -1.0, 1.0, -0.5)),
    4: ((2, 1, 0, -1, -2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


@lru_cache(maxsize=None)
def _permutations(rank: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(itertools.permutations(range(rank)))


def symmetrize(t: np.ndarray) -> np.ndarray:
    """Average of t over all permutations of its axes"""
    if t.ndim < 2:
        return t
    perms = _permutations(t.ndim)
    out = np.zeros_like(t)
    for p in perms:
        out += np.transpose(t, p)
    return out / len(perms)


def _outer(*ts: np.ndarray) -> np.ndarray:
    out = ts[0]
    for t in ts[1:]:
        out = np.multiply.outer(out, t)
    return out


class _Series:
    """Truncated Taylor tower: value and partial-derivative arrays d[0..order]"""

    __slots__ = ("d", "order", "n")

    def __init__(self, d: List[np.ndarray], n: int):
        self.d = d
        self.order = len(d) - 1
        self.n = n

    @classmethod
    def quadratic(cls, A: np.ndarray, y: np.ndarray, order: int) -> "_Series":
        """q(y) = y^T A y"""
        n = len(y)
        d = [np.asarray(float(y @ A @ y)), 2.0 * A @ y, 2.0 * A]
        d += [np.zeros((n,) * k) for k in range(3, order + 1)]
        return cls(d[: order + 1], n)

    @classmethod
    def linear(cls, b: np.ndarray, y: np.ndarray, order: int) -> "_Series":
        n = len(y)
        d = [np.asarray(float(b @ y)), np.array(b, dtype=float)]
        d += [np.zeros((n,) * k) for k in range(2, order + 1)]
        return cls(d[: order + 1], n)

    @classmethod
    def power_sum4(cls, y: np.ndarray, order: int) -> "_Series":
        """p(y) = sum_i y_i^4, diagonal derivative arrays"""
        n = len(y)
        coeffs = [y ** 4, 4.0 * y ** 3, 12.0 * y ** 2, 24.0 * y, 24.0 * np.ones(n)]
        d = [np.asarray(float(coeffs[0].sum()))]
        idx = np.arange(n)
        for k in range(1, order + 1):
            t = np.zeros((n,) * k)
            t[(idx,) * k] = coeffs[k]
            d.append(t)
        return cls(d, n)

    def __add__(self, other: "_Series") -> "_Series":
        return _Series([a + b for a, b in zip(self.d, other.d)], self.n)

    def scale(self, c: float) -> "_Series":
        return _Series([c * a for a in self.d], self.n)

    def __mul__(self, other: "_Series") -> "_Series":
        a, b = self.d, other.d
        out = [a[0] * b[0]]
        for k in range(1, self.order + 1):
            term = a[k] * b[0] + a[0] * b[k]
            for j in range(1, k):
                term = term + math.comb(k, j) * symmetrize(_outer(a[j], b[k - j]))
            out.append(term)
        return _Series(out, self.n)

    def compose(self, phi: Tuple[float, ...]) -> "_Series":
        """phi(u) given phi and its derivatives at u = self.value (Faa di Bruno)"""
        u = self.d
        k = self.order
        out = [np.asarray(phi[0])]
        if k >= 1:
            out.append(phi[1] * u[1])
        if k >= 2:
            out.append(phi[2] * _outer(u[1], u[1]) + phi[1] * u[2])
        if k >= 3:
            out.append(
                phi[3] * _outer(u[1], u[1], u[1])
                + 3.0 * phi[2] * symmetrize(_outer(u[2], u[1]))
                + phi[1] * u[3]
            )
        if k >= 4:
            out.append(
                phi[4] * _outer(u[1], u[1], u[1], u[1])
                + 6.0 * phi[3] * symmetrize(_outer(u[2], u[1], u[1]))
                + 4.0 * phi[2] * symmetrize(_outer(u[3], u[1]))
                + 3.0 * phi[2] * symmetrize(_outer(u[2], u[2]))
                + phi[1] * u[4]
            )
        return _Series(out, self.n)

    def sqrt(self) -> "_Series":
        v = float(self.d[0])
        r = math.sqrt(v)
        phi = (r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v), -0.9375 / (r * v ** 3))
        return self.compose(phi)


@dataclass(frozen=True)
class Jet:
    """F^2 and its partial derivatives at one point

    partials[k-1] is the fully symmetric array of order k.
    """

    order: int
    point: np.ndarray
    value: float
    partials: Tuple[np.ndarray, ...]

    @property
    def gradient(self) -> np.ndarray:
        return self.partials[0]

    @property
    def hessian(self) -> np.ndarray:
        return self.partials[1]

    @property
    def third(self) -> np.ndarray:
        if self.order < 3:
            raise UnsupportedOrder("jet computed only to order %d" % self.order)
        return self.partials[2]

    @property
    def fourth(self) -> np.ndarray:
        if self.order < 4:
            raise UnsupportedOrder("jet computed only to order %d" % self.order)
        return self.partials[3]


def _f2_series(spec: NormSpec, y: np.ndarray, order: int) -> _Series:
    if spec.family == "euclidean":
        return _Series.quadratic(spec.A, y, order)
    if spec.family == "randers":
        alpha = _Series.quadratic(spec.A, y, order).sqrt()
        f = alpha + _Series.linear(spec.b, y, order)
        return f * f
    # quartic_reg: F^2 = sqrt(s^2 + eps p)
    s = _Series.quadratic(np.eye(len(y)), y, order)
    u = s * s + _Series.power_sum4(y, order).scale(spec.eps)
    return u.sqrt()


def _jet(spec: NormSpec, y, order: int) -> Jet:
    y = check_point(y, spec.dim)
    series = _f2_series(spec, y, order)
    partials = []
    for arr in series.d[1:]:
        # Products and compositions are symmetric up to rounding; enforce it exactly.
        arr = symmetrize(arr)
        arr.setflags(write=False)
        partials.append(arr)
    point = y.copy()
    point.setflags(write=False)
    return Jet(order, point, float(series.d[0]), tuple(partials))


def jet_of_F2(spec: NormSpec, y, order: int) -> Jet:
    """Partials of F^2 at y up to the given order (2, 3 or 4)"""
    if order not in SUPPORTED_ORDERS:
        raise UnsupportedOrder(f"jet order must be one of {SUPPORTED_ORDERS}, got {order}")
    return _jet(spec, y, order)


def gradient_of_F2(spec: NormSpec, y) -> Tuple[float, np.ndarray]:
    """(F^2, dF^2) without the higher orders"""
    series = _f2_series(spec, check_point(y, spec.dim), 1)
    return float(series.d[0]), series.d[1]


def _directional_fd(f: Callable[[float], float], k: int, h: float) -> float:
    offsets, weights = _STENCILS[k]

    def stencil(step):
        return sum(w * f(o * step) for o, w in zip(offsets, weights)) / step ** k

    coarse = stencil(h)
    fine = stencil(0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def _probe_directions(n: int, seed: int = 0, extra: int = 3) -> List[np.ndarray]:
    dirs = [np.eye(n)[i] for i in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        v = np.zeros(n)
        v[i] = v[j] = 1.0 / math.sqrt(2.0)
        dirs.append(v)
    rng = np.random.default_rng(seed)
    for _ in range(extra):
        v = rng.standard_normal(n)
        dirs.append(v / np.linalg.norm(v))
    return dirs


def _contract(t: np.ndarray, u: np.ndarray) -> float:
    for _ in range(t.ndim):
        t = t @ u
    return float(t)


def fd_cross_check(spec: NormSpec, y, order: int, jet: Optional[Jet] = None) -> float:
    """Max relative gap between jet partials and finite differences of F^2

    Every order 1..order is probed with k-th directional central differences
    (one Richardson level) along coordinate, pairwise and seeded random unit
    directions. Self-test only.
    """
    if order not in SUPPORTED_ORDERS:
        raise UnsupportedOrder(f"jet order must be one of {SUPPORTED_ORDERS}, got {order}")
    y = check_point(y, spec.dim)
    jet = jet if jet is not None and jet.order >= order else jet_of_F2(spec, y, order)
    radius = float(np.linalg.norm(y))
    worst = 0.0
    for u in _probe_directions(spec.dim):
        def along(t, u=u):
            return evaluate(spec, y + t * u) ** 2

        for k in range(1, order + 1):
            exact = _contract(jet.partials[k - 1], u)
            approx = _directional_fd(along, k, FD_STEP_SCALE[k] * radius)
            scale = abs(exact) + jet.value / radius ** k
            worst = max(worst, abs(approx - exact) / scale)
    return worst
