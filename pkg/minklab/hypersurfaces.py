"""
Implicit hypersurfaces of (R^n minus 0, g)

Covariant derivatives of surface fields are evaluated as central differences
along surface-projected curves (one Richardson level) plus the Christoffel
correction at the base point.
"""

import json
import logging
from dataclasses import dataclass, replace
from typing import Callable, List, NamedTuple, Optional

import numpy as np
from scipy.optimize import newton

from .deriv import gradient_of_F2
from .errors import (
    DegeneratePoint,
    DimensionTooSmall,
    FrameDegenerate,
    InvalidSpec,
    ParseError,
    ProjectionFailed,
)
from .norms import NormSpec, check_point, evaluate
from .sampling import SamplePlan
from .tensors import PointGeometry, point_geometry, sectional_from_geometry

_logger = logging.getLogger(__name__)

KINDS = ("level_set", "euclid_sphere", "translated_indicatrix")
KIND_FIELDS = {
    "level_set": {"r"},
    "euclid_sphere": {"c", "rho"},
    "translated_indicatrix": {"c", "r"},
}

FD_STEP = 1e-4
PIVOT_TOL = 1e-10
NORMAL_TOL = 1e-12
PROJECTION_MAXITER = 50


@dataclass(frozen=True, eq=False)
class SurfaceSpec:
    """Implicit hypersurface Phi(y) = 0

    level_set:             Phi = F(y) - r
    euclid_sphere:         Phi = sqrt((y-c)^T A (y-c)) - rho  (euclidean family only)
    translated_indicatrix: Phi = F(y - c) - r
    """

    kind: str
    r: Optional[float] = None
    c: Optional[np.ndarray] = None
    rho: Optional[float] = None

    @property
    def size(self) -> float:
        return float(self.rho if self.kind == "euclid_sphere" else self.r)

    def centre(self, dim: int) -> np.ndarray:
        return np.zeros(dim) if self.c is None else np.asarray(self.c, dtype=float)

    def summary(self) -> dict:
        out = {"kind": self.kind}
        if self.r is not None:
            out["r"] = float(self.r)
        if self.c is not None:
            out["c"] = [float(v) for v in self.c]
        if self.rho is not None:
            out["rho"] = float(self.rho)
        return out


def level_set(r: float) -> SurfaceSpec:
    return SurfaceSpec("level_set", r=float(r))


def euclid_sphere(c, rho: float) -> SurfaceSpec:
    return SurfaceSpec("euclid_sphere", c=np.array(c, dtype=float), rho=float(rho))


def translated_indicatrix(c, r: float) -> SurfaceSpec:
    return SurfaceSpec("translated_indicatrix", r=float(r), c=np.array(c, dtype=float))


def validate_surface(surface: SurfaceSpec, spec: NormSpec) -> SurfaceSpec:
    """Check a surface against its own invariants and the norm spec"""
    if surface.kind not in KINDS:
        raise InvalidSpec(f"unknown surface kind {surface.kind!r}")
    if surface.kind in ("level_set", "translated_indicatrix"):
        if surface.r is None or not surface.r > 0:
            raise InvalidSpec("surface radius r must be positive")
    if surface.kind == "euclid_sphere":
        if surface.rho is None or not surface.rho > 0:
            raise InvalidSpec("sphere radius rho must be positive")
        if not spec.is_euclidean:
            raise InvalidSpec("euclid_sphere requires the euclidean family")
    if surface.c is not None and np.asarray(surface.c).shape != (spec.dim,):
        raise InvalidSpec(f"surface centre must have {spec.dim} components")
    return surface


def parse_surface(text: str, spec: NormSpec) -> SurfaceSpec:
    """Parse a JSON surface-spec document against a norm spec"""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"surface spec is not valid JSON: {e}") from e
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError("surface spec must be an object with a 'kind' field")
    kind = doc["kind"]
    if kind not in KINDS:
        raise ParseError(f"unknown surface kind {kind!r}; expected one of {', '.join(KINDS)}")
    fields = KIND_FIELDS[kind]
    unknown = sorted(set(doc) - fields - {"kind"})
    if unknown:
        raise ParseError(f"unknown fields for {kind}: {', '.join(unknown)}")
    missing = sorted(fields - set(doc))
    if missing:
        raise ParseError(f"missing fields for {kind}: {', '.join(missing)}")
    try:
        surface = SurfaceSpec(
            kind,
            r=float(doc["r"]) if "r" in doc else None,
            c=np.array(doc["c"], dtype=float) if "c" in doc else None,
            rho=float(doc["rho"]) if "rho" in doc else None,
        )
    except (TypeError, ValueError) as e:
        raise ParseError(f"non-numeric surface parameter: {e}") from e
    return validate_surface(surface, spec)


def load_surface(path: str, spec: NormSpec) -> SurfaceSpec:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except (IOError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot read surface spec {path}: {e}") from e
    return parse_surface(text, spec)


def phi(surface: SurfaceSpec, spec: NormSpec, y) -> float:
    """Defining function Phi(y)"""
    y = np.asarray(y, dtype=float)
    w = y - surface.centre(spec.dim)
    if surface.kind == "euclid_sphere":
        return float(np.sqrt(w @ spec.A @ w) - surface.rho)
    return evaluate(spec, w) - surface.r


def dphi(surface: SurfaceSpec, spec: NormSpec, y) -> np.ndarray:
    """Coordinate differential dPhi at y"""
    y = np.asarray(y, dtype=float)
    w = check_point(y - surface.centre(spec.dim), spec.dim)
    if surface.kind == "euclid_sphere":
        Aw = spec.A @ w
        return Aw / np.sqrt(w @ Aw)
    _, grad = gradient_of_F2(spec, w)
    return grad / (2.0 * evaluate(spec, w))


def project_to_surface(surface: SurfaceSpec, spec: NormSpec, y0) -> np.ndarray:
    """Move y0 along the ray from the surface centre onto Phi = 0"""
    centre = surface.centre(spec.dim)
    w0 = check_point(np.asarray(y0, dtype=float) - centre, spec.dim)
    if surface.kind == "euclid_sphere":
        t0 = surface.rho / np.sqrt(w0 @ spec.A @ w0)
    else:
        # F is positively homogeneous, so F(t w0) = t F(w0).
        t0 = surface.r / evaluate(spec, w0)
    tol = 1e-12 * (1.0 + surface.size)
    y = centre + t0 * w0
    if abs(phi(surface, spec, y)) < tol:
        return check_point(y, spec.dim)

    _logger.debug("Refining ray projection at t0=%.17g", t0)
    try:
        t = newton(lambda t: phi(surface, spec, centre + t * w0), t0,
                   tol=1e-15 * max(1.0, t0), maxiter=PROJECTION_MAXITER)
    except (RuntimeError, DegeneratePoint) as e:
        raise ProjectionFailed(f"ray root-solve did not converge: {e}") from e
    y = centre + t * w0
    if not abs(phi(surface, spec, y)) < tol:
        raise ProjectionFailed(f"|Phi| = {abs(phi(surface, spec, y)):.3e} after {PROJECTION_MAXITER} iterations")
    return check_point(y, spec.dim)


def _raw_normal(surface: SurfaceSpec, spec: NormSpec, y, geom: Optional[PointGeometry] = None) -> np.ndarray:
    """g-gradient of Phi, g-normalized, before orientation"""
    geom = geom if geom is not None else point_geometry(spec, y, order=2)
    grad = geom.g_inv @ dphi(surface, spec, y)
    length = np.sqrt(max(float(grad @ geom.g @ grad), 0.0))
    if length < NORMAL_TOL:
        raise DegeneratePoint(f"g-gradient of Phi has norm {length:.3e}")
    return grad / length


def _step(y) -> float:
    return FD_STEP * (1.0 + float(np.linalg.norm(y)))


def _curve_derivative(surface: SurfaceSpec, spec: NormSpec, y: np.ndarray, e: np.ndarray,
                      field: Callable[[np.ndarray], np.ndarray]):
    """d/dt field(P(y + t e)) at t = 0, central difference with one Richardson level"""
    delta = _step(y)

    def central(h):
        plus = field(project_to_surface(surface, spec, y + h * e))
        minus = field(project_to_surface(surface, spec, y - h * e))
        return (plus - minus) / (2.0 * h)

    return (4.0 * central(0.5 * delta) - central(delta)) / 3.0


def covariant_derivative(surface: SurfaceSpec, spec: NormSpec, geom: PointGeometry, e: np.ndarray,
                         field: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """nabla_e W for a vector field W defined along the surface"""
    y = geom.jet.point
    W = field(y)
    return _curve_derivative(surface, spec, y, e, field) + np.einsum("ijk,j,k->i", geom.gamma, W, e)


@dataclass(frozen=True)
class FrameAtPoint:
    """g-orthonormal tangent frame and oriented unit normal

    h is the second fundamental form in this frame, already oriented; it is
    needed to choose the orientation and is kept to avoid recomputation.
    """

    point: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    orientation_sign: int
    geometry: PointGeometry
    h: np.ndarray


@dataclass(frozen=True)
class ShapeAtPoint:
    h: np.ndarray
    H: float
    umbilicity_deviation: float
    asymmetry: float

    @property
    def relative_asymmetry(self) -> float:
        """max |h_ab - h_ba| relative to max |h_ab|"""
        scale = float(np.abs(self.h).max()) if self.h.size else 0.0
        return self.asymmetry / scale if scale > 0.0 else self.asymmetry


def _gram_schmidt(geom: PointGeometry, normal: np.ndarray) -> np.ndarray:
    n = len(normal)
    g = geom.g
    candidates = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        candidates.append(e - float(e @ g @ normal) * normal)
    frame: List[np.ndarray] = []
    remaining = list(range(n))
    while len(frame) < n - 1:
        best, best_norm, best_vec = None, -1.0, None
        for i in remaining:
            v = candidates[i].copy()
            for t in frame:
                v = v - float(v @ g @ t) * t
            length = np.sqrt(max(float(v @ g @ v), 0.0))
            if length > best_norm:
                best, best_norm, best_vec = i, length, v
        if best_norm < PIVOT_TOL:
            raise FrameDegenerate(f"Gram-Schmidt pivot {best_norm:.3e} below {PIVOT_TOL:g}")
        frame.append(best_vec / best_norm)
        remaining.remove(best)
    # One re-orthogonalization pass keeps g(e_a, e_b) within rounding of delta_ab.
    cleaned: List[np.ndarray] = []
    for v in frame:
        v = v - float(v @ g @ normal) * normal
        for t in cleaned:
            v = v - float(v @ g @ t) * t
        cleaned.append(v / np.sqrt(float(v @ g @ v)))
    return np.array(cleaned)


def _shape_matrix(surface: SurfaceSpec, spec: NormSpec, geom: PointGeometry,
                  tangent: np.ndarray, sign: float) -> np.ndarray:
    def normal_field(p):
        return sign * _raw_normal(surface, spec, p)

    g = geom.g
    rows = []
    for e_a in tangent:
        dnu = covariant_derivative(surface, spec, geom, e_a, normal_field)
        rows.append([-float(dnu @ g @ e_b) for e_b in tangent])
    return np.array(rows)


def tangent_frame(surface: SurfaceSpec, spec: NormSpec, y, orientation: Optional[int] = None) -> FrameAtPoint:
    """Frame at a surface point; orientation chosen so that H >= 0 unless forced"""
    y = check_point(y, spec.dim)
    geom = point_geometry(spec, y, order=3)
    raw = _raw_normal(surface, spec, y, geom)
    tangent = _gram_schmidt(geom, raw)
    h_raw = _shape_matrix(surface, spec, geom, tangent, 1.0)
    if orientation is None:
        orientation = -1 if np.trace(h_raw) < 0.0 else 1
    return FrameAtPoint(y, tangent, orientation * raw, int(orientation), geom, orientation * h_raw)


def rotate_frame(frame: FrameAtPoint, a: int, b: int, angle: float) -> FrameAtPoint:
    """Rotate e_a, e_b by angle inside their span; h is carried along"""
    if a == b:
        raise ValueError("frame indices must differ")
    m = len(frame.tangent)
    Q = np.eye(m)
    cos, sin = np.cos(angle), np.sin(angle)
    Q[a, a], Q[a, b], Q[b, a], Q[b, b] = cos, sin, -sin, cos
    return replace(frame, tangent=Q @ frame.tangent, h=Q @ frame.h @ Q.T)


def unit_normal(surface: SurfaceSpec, spec: NormSpec, y) -> np.ndarray:
    return tangent_frame(surface, spec, y).normal


def second_fundamental_form(surface: SurfaceSpec, spec: NormSpec, frame: FrameAtPoint) -> ShapeAtPoint:
    """h_ab = -g(nabla_{e_a} nu, e_b), symmetrized, with H = trace / (n - 1)"""
    h_raw = frame.h
    h = 0.5 * (h_raw + h_raw.T)
    H = float(np.trace(h)) / h.shape[0]
    deviation = float(np.abs(h - H * np.eye(h.shape[0])).max())
    asymmetry = float(np.abs(h_raw - h_raw.T).max())
    return ShapeAtPoint(h, H, deviation, asymmetry)


def induced_sectional(surface: SurfaceSpec, spec: NormSpec, frame: FrameAtPoint, a: int, b: int) -> float:
    """Gauss equation: K = K_ambient(e_a, e_b) + h_aa h_bb - h_ab^2"""
    if spec.dim < 3:
        raise DimensionTooSmall("induced sectional curvature needs n >= 3")
    if a == b:
        raise ValueError("frame indices must differ")
    shape = second_fundamental_form(surface, spec, frame)
    h = shape.h
    k_ambient = sectional_from_geometry(frame.geometry, frame.tangent[a], frame.tangent[b])
    return k_ambient + h[a, a] * h[b, b] - h[a, b] ** 2


def ambient_curvature_normal_part(surface: SurfaceSpec, spec: NormSpec, frame: FrameAtPoint) -> float:
    """max |g(R(e_a, e_b) e_c, nu)| over frame triples"""
    geom = frame.geometry
    R = geom.curvature_cartan().R
    E = frame.tangent
    values = np.einsum("im,ijkl,cj,ak,bl,m->abc", geom.g, R, E, E, E, frame.normal)
    return float(np.abs(values).max())


@dataclass(frozen=True)
class MomentFunction:
    """f(y) = g(y, nu) (normal_moment) or f(y) = g(y, b) (b_moment)"""

    kind: str
    b: Optional[np.ndarray] = None

    @classmethod
    def normal_moment(cls) -> "MomentFunction":
        return cls("normal_moment")

    @classmethod
    def b_moment(cls, b) -> "MomentFunction":
        return cls("b_moment", np.array(b, dtype=float))


def moment_value(surface: SurfaceSpec, spec: NormSpec, y, f_kind: MomentFunction, sign: int) -> float:
    geom = point_geometry(spec, y, order=2)
    y = geom.jet.point
    if f_kind.kind == "normal_moment":
        return geom.inner(y, sign * _raw_normal(surface, spec, y, geom))
    return geom.inner(y, f_kind.b)


@dataclass(frozen=True)
class GradientResult:
    gradient: np.ndarray
    route: str
    closed_form: Optional[np.ndarray]
    finite_difference: np.ndarray
    gap: Optional[float]


def _closed_form_gradient(surface, spec, frame: FrameAtPoint, f_kind: MomentFunction,
                          tol_umbilic: float) -> Optional[np.ndarray]:
    geom = frame.geometry
    y = frame.point
    nu = frame.normal
    if f_kind.kind == "b_moment":
        # g(y, nabla_X b) = C(y, ., .) = 0 for constant b, so grad f = b^T on any surface.
        b = f_kind.b
        return b - geom.inner(b, nu) * nu
    shape = second_fundamental_form(surface, spec, frame)
    umbilical = shape.umbilicity_deviation < tol_umbilic * (1.0 + abs(shape.H))
    if not (surface.kind == "level_set" or umbilical):
        return None
    y_tangent = y - geom.inner(y, nu) * nu
    return -shape.H * y_tangent


def _fd_gradient(surface, spec, frame: FrameAtPoint, f_kind: MomentFunction) -> np.ndarray:
    y = frame.point

    def f(p):
        return np.array([moment_value(surface, spec, p, f_kind, frame.orientation_sign)])

    grad = np.zeros(spec.dim)
    for e_a in frame.tangent:
        grad += float(_curve_derivative(surface, spec, y, e_a, f)[0]) * e_a
    return grad


def surface_gradient(surface: SurfaceSpec, spec: NormSpec, frame: FrameAtPoint, f_kind: MomentFunction,
                     tol_umbilic: float = 1e-6) -> GradientResult:
    """Tangent gradient of f, closed form when available, reconciled with FD"""
    fd = _fd_gradient(surface, spec, frame, f_kind)
    closed = _closed_form_gradient(surface, spec, frame, f_kind, tol_umbilic)
    if closed is None:
        return GradientResult(fd, "finite_difference", None, fd, None)
    diff = closed - fd
    gap = float(np.sqrt(max(frame.geometry.inner(diff, diff), 0.0)))
    return GradientResult(closed, "closed_form", closed, fd, gap)


def obata_residual(surface: SurfaceSpec, spec: NormSpec, frame: FrameAtPoint, f_kind: MomentFunction,
                   c2: float, tol_umbilic: float = 1e-6) -> float:
    """max_a || (nabla_{e_a} grad f)^T + c2 * f~ * e_a ||_g

    f~ = f + 1/H for normal_moment, f~ = f for b_moment.
    """
    geom = frame.geometry
    y = frame.point
    nu = frame.normal
    base = surface_gradient(surface, spec, frame, f_kind, tol_umbilic)
    closed = base.route == "closed_form"
    sign = frame.orientation_sign

    def gradient_field(p):
        if np.array_equal(p, y):
            return base.gradient
        fr = tangent_frame(surface, spec, p, orientation=sign)
        if closed:
            value = _closed_form_gradient(surface, spec, fr, f_kind, np.inf)
            if value is not None:
                return value
        return _fd_gradient(surface, spec, fr, f_kind)

    f_tilde = moment_value(surface, spec, y, f_kind, sign)
    if f_kind.kind == "normal_moment":
        H = second_fundamental_form(surface, spec, frame).H
        f_tilde += 1.0 / H
    worst = 0.0
    for e_a in frame.tangent:
        D = covariant_derivative(surface, spec, geom, e_a, gradient_field)
        D_tangent = D - geom.inner(D, nu) * nu
        residual = D_tangent + c2 * f_tilde * e_a
        worst = max(worst, float(np.sqrt(max(geom.inner(residual, residual), 0.0))))
    return worst


class ConverseResult(NamedTuple):
    misalignment: float
    f_variation: float


def remark_converse_check(surface: SurfaceSpec, spec: NormSpec, sample_points) -> ConverseResult:
    """Normal-vs-radial misalignment and the spread of F over surface points"""
    points = [np.asarray(p, dtype=float) for p in sample_points]
    if len(points) < 2:
        raise ValueError("need at least two surface points")
    misalignment = 0.0
    values = []
    for y in points:
        geom = point_geometry(spec, y, order=2)
        nu = _raw_normal(surface, spec, y, geom)
        F = evaluate(spec, y)
        values.append(F)
        radial = y / F
        gaps = [nu - radial, nu + radial]
        misalignment = max(misalignment, min(np.sqrt(max(geom.inner(d, d), 0.0)) for d in gaps))
    return ConverseResult(float(misalignment), float(max(values) - min(values)))


def sample_surface(surface: SurfaceSpec, spec: NormSpec, plan: SamplePlan, count: Optional[int] = None) -> np.ndarray:
    """Plan directions, issued from the surface centre, projected onto the surface"""
    if count is not None:
        plan = plan.with_count(count)
    dirs = plan.directions(spec.dim)
    if surface.kind == "level_set":
        return np.array([check_point(surface.r * spec.indicatrix_point(d), spec.dim) for d in dirs])
    centre = surface.centre(spec.dim)
    return np.array([project_to_surface(surface, spec, centre + d) for d in dirs])
