"""
Catalog of Minkowski norm families
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import DegeneratePoint, InvalidSpec, ParseError
from .sampling import EXCLUSION_RADIUS, SamplePlan

_logger = logging.getLogger(__name__)

FAMILIES = ("euclidean", "randers", "quartic_reg")

# Fields accepted per family in a norm-spec document, besides dim and family.
FAMILY_FIELDS = {
    "euclidean": {"A"},
    "randers": {"A", "b"},
    "quartic_reg": {"eps"},
}

HOMOGENEITY_LAMBDAS = (0.5, 2.0, 7.0)
TOL_HOMOG = 1e-10
TOL_ABS_HOMOG = 1e-9


@dataclass(frozen=True, eq=False)
class NormSpec:
    """One member of a Minkowski norm family

    euclidean:   F(y) = sqrt(y^T A y)
    randers:     F(y) = sqrt(y^T A y) + b.y, with b^T A^-1 b < 1
    quartic_reg: F(y) = ((sum y_i^2)^2 + eps * sum y_i^4)^(1/4)
    """

    dim: int
    family: str
    A: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None
    eps: Optional[float] = None
    violation: Optional[str] = field(default=None, compare=False)

    def summary(self) -> Dict:
        """JSON-ready description of the spec"""
        out = {"dim": int(self.dim), "family": self.family}
        if self.A is not None:
            out["A"] = [[float(v) for v in row] for row in self.A]
        if self.b is not None:
            out["b"] = [float(v) for v in self.b]
        if self.eps is not None:
            out["eps"] = float(self.eps)
        return out

    @property
    def is_euclidean(self) -> bool:
        return self.family == "euclidean"

    def indicatrix_point(self, direction) -> np.ndarray:
        """Scale direction onto the unit indicatrix S(1)"""
        direction = np.asarray(direction, dtype=float)
        return direction / evaluate(self, direction)


def _find_violation(dim, family, A, b, eps) -> Optional[str]:
    if dim < 2:
        return "dimension must be at least 2"
    if family not in FAMILIES:
        return f"unknown family {family!r}"
    if family in ("euclidean", "randers"):
        if A is None or A.shape != (dim, dim):
            return f"A must be a {dim}x{dim} matrix"
        if not np.all(np.isfinite(A)):
            return "A has non-finite entries"
        if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(A).max())):
            return "A not symmetric"
        if np.linalg.eigvalsh(A).min() <= 0.0:
            return "A not positive definite"
    if family == "randers":
        if b is None or b.shape != (dim,):
            return f"b must have {dim} components"
        if not np.all(np.isfinite(b)):
            return "b has non-finite entries"
        if float(b @ np.linalg.solve(A, b)) >= 1.0:
            return "randers drift too large"
    if family == "quartic_reg":
        if eps is None or not np.isfinite(eps) or eps <= 0.0:
            return "eps must be positive"
    return None


def build_spec(dim, family, A=None, b=None, eps=None, strict: bool = True) -> NormSpec:
    """Construct and validate a NormSpec

    strict=False keeps an invariant-violating spec instead of raising; the
    violation is recorded on the spec. Only tests use it.
    """
    A = None if A is None else np.array(A, dtype=float)
    b = None if b is None else np.array(b, dtype=float)
    eps = None if eps is None else float(eps)
    if A is not None and A.ndim == 2 and A.shape[0] == A.shape[1]:
        A = 0.5 * (A + A.T) if np.allclose(A, A.T) else A
    violation = _find_violation(int(dim), family, A, b, eps)
    if violation and strict:
        raise InvalidSpec(violation)
    if violation:
        _logger.warning("Building spec that violates its invariants: %s", violation)
    if A is not None:
        A.setflags(write=False)
    if b is not None:
        b.setflags(write=False)
    return NormSpec(int(dim), family, A, b, eps, violation)


def euclidean(A) -> NormSpec:
    A = np.asarray(A, dtype=float)
    return build_spec(A.shape[0], "euclidean", A=A)


def randers(A, b) -> NormSpec:
    A = np.asarray(A, dtype=float)
    return build_spec(A.shape[0], "randers", A=A, b=b)


def quartic_reg(dim: int, eps: float) -> NormSpec:
    return build_spec(dim, "quartic_reg", eps=eps)


def check_point(y, dim: int) -> np.ndarray:
    """Validate a point's shape and distance from the origin"""
    y = np.asarray(y, dtype=float)
    if y.shape != (dim,):
        raise DegeneratePoint(f"point must have {dim} components, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise DegeneratePoint("point has non-finite components")
    if np.linalg.norm(y) < EXCLUSION_RADIUS:
        raise DegeneratePoint(f"|y| below exclusion radius {EXCLUSION_RADIUS:g}")
    return y


def evaluate(spec: NormSpec, y) -> float:
    """F(y) for a catalog norm"""
    y = check_point(y, spec.dim)
    if spec.family == "euclidean":
        return float(np.sqrt(y @ spec.A @ y))
    if spec.family == "randers":
        return float(np.sqrt(y @ spec.A @ y) + spec.b @ y)
    s = float(y @ y)
    return float((s * s + spec.eps * np.sum(y ** 4)) ** 0.25)


@dataclass(frozen=True)
class AxiomReport:
    """Sampled certificate of the Minkowski-norm axioms"""

    positivity_ok: bool
    homogeneity_residual: float
    min_metric_eigenvalue: float
    abs_homogeneity_residual: float
    samples_used: int

    def to_dict(self) -> Dict:
        return {
            "positivity_ok": self.positivity_ok,
            "homogeneity_residual": self.homogeneity_residual,
            "min_metric_eigenvalue": self.min_metric_eigenvalue,
            "abs_homogeneity_residual": self.abs_homogeneity_residual,
            "samples_used": self.samples_used,
        }


def _abs_residual(spec: NormSpec, y: np.ndarray) -> float:
    f_plus = evaluate(spec, y)
    return abs(evaluate(spec, -y) - f_plus) / abs(f_plus)


def check_axioms(spec: NormSpec, plan: SamplePlan) -> AxiomReport:
    """Positivity, positive homogeneity and strong convexity over a plan"""
    from .tensors import metric_matrix

    points = plan.points(spec.dim)
    positivity_ok = True
    homog = 0.0
    abs_homog = 0.0
    min_eig = np.inf
    for y in points:
        f = evaluate(spec, y)
        if not f > 0.0:
            positivity_ok = False
        scale = abs(f) if f != 0.0 else 1.0
        for lam in HOMOGENEITY_LAMBDAS:
            homog = max(homog, abs(evaluate(spec, lam * y) - lam * f) / scale)
        abs_homog = max(abs_homog, abs(evaluate(spec, -y) - f) / scale)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(metric_matrix(spec, y)).min()))
    return AxiomReport(positivity_ok, homog, float(min_eig), abs_homog, len(points))


def is_absolutely_homogeneous(spec: NormSpec, plan: SamplePlan,
                              tol: float = TOL_ABS_HOMOG) -> Tuple[bool, float]:
    """(residual < tol, max_y |F(-y) - F(y)| / F(y))"""
    residual = max(_abs_residual(spec, y) for y in plan.points(spec.dim))
    return residual < tol, float(residual)


def parse_spec(text: str) -> NormSpec:
    """Parse a UTF-8 JSON norm-spec document"""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"norm spec is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ParseError("norm spec must be a JSON object")
    for key in ("dim", "family"):
        if key not in doc:
            raise ParseError(f"norm spec missing field {key!r}")
    dim, family = doc["dim"], doc["family"]
    if isinstance(dim, bool) or not isinstance(dim, int):
        raise ParseError("dim must be an integer")
    if family not in FAMILIES:
        raise ParseError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    allowed = {"dim", "family"} | FAMILY_FIELDS[family]
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ParseError(f"unknown fields for {family}: {', '.join(unknown)}")
    missing = sorted(FAMILY_FIELDS[family] - set(doc))
    if missing:
        raise ParseError(f"missing fields for {family}: {', '.join(missing)}")

    params = {}
    try:
        if "A" in doc:
            params["A"] = np.array(doc["A"], dtype=float)
            if params["A"].ndim != 2:
                raise ParseError("A must be a nested array (row-major matrix)")
        if "b" in doc:
            params["b"] = np.array(doc["b"], dtype=float)
            if params["b"].ndim != 1:
                raise ParseError("b must be a flat array")
        if "eps" in doc:
            if isinstance(doc["eps"], (list, dict, bool, str)) or doc["eps"] is None:
                raise ParseError("eps must be a number")
            params["eps"] = float(doc["eps"])
    except (TypeError, ValueError) as e:
        raise ParseError(f"non-numeric family parameter: {e}") from e
    return build_spec(dim, family, **params)


def load_spec(path: str) -> NormSpec:
    """Read and parse a norm-spec file"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except (IOError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot read norm spec {path}: {e}") from e
    return parse_spec(text)
