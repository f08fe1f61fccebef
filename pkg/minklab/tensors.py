"""
Pointwise tensors of the Riemannian space (R^n minus 0, g) induced by F

Index conventions: g[i, j] = g_ij, C_low[i, j, k] = C_ijk,
C_mixed[i, j, k] = C^i_jk = g^is C_sjk, gamma[i, j, k] = gamma^i_jk with
nabla_{d_k} d_j = gamma^i_jk d_i, and R[i, j, k, l] = R^i_jkl with
R(U, V)W = W^j U^k V^l R^i_jkl d_i.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .deriv import Jet, jet_of_F2
from .errors import DegeneratePlane, NotPositiveDefinite, UnsupportedOrder
from .norms import NormSpec, evaluate

_logger = logging.getLogger(__name__)

# Mapping from the coordinate formula
#   R^i_jkl = d_k gamma^i_jl - d_l gamma^i_jk + gamma^i_mk gamma^m_jl - gamma^i_ml gamma^m_jk
# to the Cartan-product formula. Calibrated with calibrate_convention on
# randers and quartic_reg samples: the identity mapping (no sign flip, no
# k<->l swap) makes both routes agree.
CURVATURE_SIGN = 1.0
CURVATURE_SWAP_KL = False

GRAM_TOL = 1e-12


@dataclass(frozen=True)
class MetricAtPoint:
    g: np.ndarray
    g_inv: np.ndarray
    point: np.ndarray
    norm_value: float


@dataclass(frozen=True)
class CartanAtPoint:
    C_low: np.ndarray
    C_mixed: np.ndarray
    A_mean: np.ndarray


@dataclass(frozen=True)
class CurvatureAtPoint:
    R: np.ndarray
    route: str

    @property
    def norm(self) -> float:
        return float(np.abs(self.R).max())


@dataclass(frozen=True)
class PointGeometry:
    """Every tensor at one point, all derived from a single jet"""

    jet: Jet
    metric: MetricAtPoint
    cartan: Optional[CartanAtPoint]
    gamma: Optional[np.ndarray]
    dgamma: Optional[np.ndarray]

    @property
    def g(self) -> np.ndarray:
        return self.metric.g

    @property
    def g_inv(self) -> np.ndarray:
        return self.metric.g_inv

    @property
    def F(self) -> float:
        return self.metric.norm_value

    def inner(self, u, v) -> float:
        return float(np.asarray(u) @ self.metric.g @ np.asarray(v))

    def curvature_cartan(self) -> CurvatureAtPoint:
        if self.cartan is None:
            raise UnsupportedOrder("Cartan curvature needs an order-3 jet")
        Cm = self.cartan.C_mixed
        R = (np.einsum("sjk,isl->ijkl", Cm, Cm) - np.einsum("sjl,isk->ijkl", Cm, Cm)) / self.jet.value
        return CurvatureAtPoint(R, "cartan_formula")

    def curvature_connection(self, sign: float = CURVATURE_SIGN,
                             swap_kl: bool = CURVATURE_SWAP_KL) -> CurvatureAtPoint:
        if self.dgamma is None:
            raise UnsupportedOrder("connection curvature needs an order-4 jet")
        G, dG = self.gamma, self.dgamma
        # dG[i, j, k, l] = d_l gamma^i_jk
        R = (
            np.transpose(dG, (0, 1, 3, 2))
            - dG
            + np.einsum("imk,mjl->ijkl", G, G)
            - np.einsum("iml,mjk->ijkl", G, G)
        )
        if swap_kl:
            R = np.transpose(R, (0, 1, 3, 2))
        return CurvatureAtPoint(sign * R, "connection_formula")


def metric_matrix(spec: NormSpec, y) -> np.ndarray:
    """g_ij(y) without the positive-definiteness check"""
    return 0.5 * np.asarray(jet_of_F2(spec, y, 2).hessian)


def _invert_spd(g: np.ndarray) -> np.ndarray:
    try:
        factor = cho_factor(g, lower=True, check_finite=True)
    except (LinAlgError, ValueError) as e:
        raise NotPositiveDefinite(f"fundamental tensor not positive definite: {e}") from e
    g_inv = cho_solve(factor, np.eye(g.shape[0]))
    return 0.5 * (g_inv + g_inv.T)


def point_geometry(spec: NormSpec, y, order: int = 4) -> PointGeometry:
    """Metric, Cartan torsion, connection and its derivative at y from one jet"""
    jet = jet_of_F2(spec, y, order)
    g = 0.5 * np.asarray(jet.hessian)
    g_inv = _invert_spd(g)
    F = evaluate(spec, jet.point)
    metric = MetricAtPoint(g, g_inv, jet.point, F)
    if order < 3:
        return PointGeometry(jet, metric, None, None, None)

    T = np.asarray(jet.third)
    C_low = 0.25 * F * T
    C_mixed = np.einsum("is,sjk->ijk", g_inv, C_low)
    A_mean = np.einsum("ij,ijk->k", g_inv, C_low)
    cartan = CartanAtPoint(C_low, C_mixed, A_mean)

    # d_k g_ij = (1/2) d_i d_j d_k F^2
    dg = 0.5 * T
    first_kind = 0.5 * (dg + np.transpose(dg, (0, 2, 1)) - np.transpose(dg, (2, 0, 1)))
    gamma = np.einsum("is,sjk->ijk", g_inv, first_kind)

    dgamma = None
    if order >= 4:
        d2g = 0.5 * np.asarray(jet.fourth)
        # d_l of the Christoffel symbols of the first kind, index order [s, j, k, l]
        d_first = 0.5 * (d2g + np.transpose(d2g, (0, 2, 1, 3)) - np.transpose(d2g, (2, 0, 1, 3)))
        d_ginv = -np.einsum("ia,abl,bs->isl", g_inv, dg, g_inv)
        dgamma = np.einsum("isl,sjk->ijkl", d_ginv, first_kind) + np.einsum("is,sjkl->ijkl", g_inv, d_first)
    return PointGeometry(jet, metric, cartan, gamma, dgamma)


def metric(spec: NormSpec, y) -> MetricAtPoint:
    return point_geometry(spec, y, order=2).metric


def cartan(spec: NormSpec, y) -> CartanAtPoint:
    return point_geometry(spec, y, order=3).cartan


def mean_cartan(spec: NormSpec, y) -> np.ndarray:
    return point_geometry(spec, y, order=3).cartan.A_mean


def christoffel(spec: NormSpec, y) -> np.ndarray:
    """gamma^i_jk from the metric-derivative formula"""
    return point_geometry(spec, y, order=3).gamma


def curvature_cartan(spec: NormSpec, y) -> CurvatureAtPoint:
    return point_geometry(spec, y, order=3).curvature_cartan()


def curvature_connection(spec: NormSpec, y) -> CurvatureAtPoint:
    return point_geometry(spec, y, order=4).curvature_connection()


def sectional_from_geometry(geom: PointGeometry, U, V) -> float:
    """g(R(U,V)V, U) / (g(U,U) g(V,V) - g(U,V)^2) with the Cartan-route curvature"""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    guu, gvv, guv = geom.inner(U, U), geom.inner(V, V), geom.inner(U, V)
    gram = guu * gvv - guv * guv
    if not gram > GRAM_TOL * float(U @ U) * float(V @ V):
        raise DegeneratePlane(f"Gram determinant {gram:.3e} too small")
    R = geom.curvature_cartan().R
    numerator = np.einsum("im,ijkl,j,k,l,m->", geom.g, R, V, U, V, U)
    return float(numerator / gram)


def sectional(spec: NormSpec, y, U, V) -> float:
    return sectional_from_geometry(point_geometry(spec, y, order=3), U, V)


def eq23_residual(geom: PointGeometry) -> float:
    """||gamma - C_mixed / F||_inf relative to 1 + ||gamma||_inf"""
    gap = np.abs(geom.gamma - geom.cartan.C_mixed / geom.F).max()
    return float(gap / (1.0 + np.abs(geom.gamma).max()))


def euler_residuals(geom: PointGeometry, spec: NormSpec) -> dict:
    """Relative residuals of the homogeneity identities at the jet's point"""
    y = geom.jet.point
    C = geom.cartan.C_low
    out = {
        "cartan_y": float(np.abs(C @ y).max() / (1.0 + np.abs(C).max())),
        "gamma_y": float(np.abs(np.einsum("ijk,j->ik", geom.gamma, y)).max() / (1.0 + np.abs(geom.gamma).max())),
        "g_yy": float(abs(y @ geom.g @ y - geom.jet.value) / geom.jet.value),
    }
    g2 = metric_matrix(spec, 2.0 * y)
    out["g_degree0"] = float(np.abs(g2 - geom.g).max() / np.abs(geom.g).max())
    A2 = point_geometry(spec, 2.0 * y, order=3).cartan.A_mean
    out["A_degree0"] = float(np.abs(A2 - geom.cartan.A_mean).max() / (1.0 + np.abs(geom.cartan.A_mean).max()))
    return out


def cross_route_gap(geom: PointGeometry) -> float:
    """Max entrywise gap between the two curvature routes relative to 1 + ||R||"""
    Rc = geom.curvature_cartan().R
    Rn = geom.curvature_connection().R
    return float(np.abs(Rc - Rn).max() / (1.0 + np.abs(Rc).max()))


def calibrate_convention(spec: NormSpec, points: Iterable) -> Tuple[float, bool, float]:
    """Pick the sign / k<->l mapping that best matches the Cartan formula

    Returns (sign, swap_kl, worst relative gap under that mapping).
    """
    geoms = [point_geometry(spec, y, order=4) for y in points]
    best = None
    for sign in (1.0, -1.0):
        for swap in (False, True):
            worst = 0.0
            for geom in geoms:
                Rc = geom.curvature_cartan().R
                Rn = geom.curvature_connection(sign=sign, swap_kl=swap).R
                worst = max(worst, float(np.abs(Rc - Rn).max() / (1.0 + np.abs(Rc).max())))
            if best is None or worst < best[2]:
                best = (sign, swap, worst)
    _logger.debug("Curvature convention calibration on %s: %s", spec.family, best)
    return best
