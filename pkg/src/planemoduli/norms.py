"""Norms on the plane: evaluation, duality, sphere parametrization, support sets.

Supported families: Euclidean, l_p for p in [1, inf], weighted l_p (diagonal
scaling followed by l_p), and gauges of origin-symmetric convex polygons.
The l_1 and l_inf balls are canonicalized to 4-vertex polygons internally so
that all non-smooth support-set logic lives in a single code path.

Every norm evaluates vectorized: ``norm(v)`` accepts shape ``(..., 2)`` and
returns shape ``(...)`` (a plain float for a single point).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, RepresentationError

__all__ = [
    "SupportSet",
    "Norm",
    "EuclideanNorm",
    "LpNorm",
    "WeightedLpNorm",
    "PolygonNorm",
    "euclidean_norm",
    "lp_norm",
    "weighted_lp_norm",
    "polygon_norm",
    "regular_polygon_norm",
    "norm_from_json",
    "norm_to_json_dict",
    "norm_key",
    "perp",
]

# Supporting-facet ties on normalized polygon scores are detected at this
# absolute tolerance (scores are ~1 on the sphere).
_TIE_TOL = 1e-9


def perp(v: np.ndarray) -> np.ndarray:
    """Rotate by +90 degrees: (a, b) -> (-b, a). Works on (..., 2) arrays."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def _points(v, name: str = "v") -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.ndim == 0 or a.shape[-1] != 2:
        raise InputError(f"{name} must have shape (..., 2), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} contains non-finite coordinates")
    return a


@dataclass(frozen=True)
class SupportSet:
    """Endpoints of the segment of supporting functionals at a unit vector.

    The segment lies on the dual unit sphere; ``p_minus`` precedes ``p_plus``
    counterclockwise, and the two coincide at smooth points.
    """

    p_minus: np.ndarray
    p_plus: np.ndarray

    def is_degenerate(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.p_plus - self.p_minus)) <= tol)

    def lerp(self, t: float) -> np.ndarray:
        """Point of the segment at barycentric coordinate t in [0, 1]."""
        return (1.0 - t) * self.p_minus + t * self.p_plus


class Norm:
    """A norm on R^2, given by its gauge. Subclasses implement the family."""

    kind = "abstract"

    # -- evaluation ---------------------------------------------------------

    def _eval(self, a: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, v):
        a = _points(v)
        r = self._eval(a)
        return float(r) if np.ndim(r) == 0 else r

    # -- structure ----------------------------------------------------------

    def dual(self) -> "Norm":
        """The dual norm (gauge of the polar unit ball)."""
        raise NotImplementedError

    def sphere_point(self, theta) -> np.ndarray:
        """Unit-sphere point in direction angle theta (vectorized)."""
        th = np.asarray(theta, dtype=float)
        u = np.stack([np.cos(th), np.sin(th)], axis=-1)
        g = np.asarray(self._eval(u))
        return u / g[..., None]

    def _support_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Support-segment endpoints for a batch of (approximately unit) points.

        Returns (p_minus, p_plus), each of shape (n, 2). Inputs are normalized
        internally, so slightly off-sphere points are accepted.
        """
        raise NotImplementedError

    def support_set(self, x, tol: float = 1e-9) -> SupportSet:
        """Support set J(x) = {p on the dual sphere : <p, x> = 1} at unit x."""
        a = _points(x, "x")
        if a.shape != (2,):
            raise InputError("support_set expects a single point of shape (2,)")
        if abs(float(self._eval(a)) - 1.0) > tol:
            raise InputError("x must lie on the unit sphere")
        pm, pp = self._support_batch(a[None, :])
        return SupportSet(pm[0], pp[0])

    def special_angles(self) -> np.ndarray:
        """Direction angles of non-smooth sphere points (polygon vertices)."""
        return np.empty(0, dtype=float)

    def is_smooth(self) -> bool:
        return self.special_angles().size == 0

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_json_dict()})"


class EuclideanNorm(Norm):
    kind = "euclidean"

    def _eval(self, a):
        return np.sqrt(np.sum(a * a, axis=-1))

    def dual(self):
        return self

    def _support_batch(self, X):
        U = X / np.sqrt(np.sum(X * X, axis=-1))[..., None]
        return U, U.copy()

    def to_json_dict(self):
        return {"kind": "euclidean"}


class LpNorm(Norm):
    """The l_p norm for p in [1, inf]. p=1 and p=inf delegate support-set and
    vertex logic to an internal 4-vertex polygon (diamond / square)."""

    kind = "lp"

    def __init__(self, p):
        p = _parse_p(p)
        self.p = p
        self._poly = None
        if p == 1.0:
            self._poly = PolygonNorm([(1, 0), (0, 1), (-1, 0), (0, -1)])
        elif math.isinf(p):
            self._poly = PolygonNorm([(1, 1), (-1, 1), (-1, -1), (1, -1)])

    def _eval(self, a):
        if self.p == 1.0:
            return np.sum(np.abs(a), axis=-1)
        if math.isinf(self.p):
            return np.max(np.abs(a), axis=-1)
        if self.p == 2.0:
            return np.sqrt(np.sum(a * a, axis=-1))
        return np.sum(np.abs(a) ** self.p, axis=-1) ** (1.0 / self.p)

    def dual(self):
        return LpNorm(_conjugate(self.p))

    def _support_batch(self, X):
        if self._poly is not None:
            return self._poly._support_batch(X)
        U = X / np.asarray(self._eval(X))[..., None]
        P = np.sign(U) * np.abs(U) ** (self.p - 1.0)
        return P, P.copy()

    def special_angles(self):
        if self._poly is not None:
            return self._poly.special_angles()
        return np.empty(0, dtype=float)

    def to_json_dict(self):
        return {"kind": "lp", "p": "inf" if math.isinf(self.p) else self.p}


class WeightedLpNorm(Norm):
    """Diagonal scaling followed by l_p: ||x|| = ||(w1*x1, w2*x2)||_p.

    The dual is the weighted l_q norm with reciprocal weights, uniformly in p.
    """

    kind = "weighted-lp"

    def __init__(self, p, w):
        p = _parse_p(p)
        w = np.asarray(w, dtype=float)
        if w.shape != (2,) or not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise RepresentationError("weights must be two positive finite numbers")
        self.p = p
        self.w = w
        self._poly = None
        if p == 1.0:
            a, b = 1.0 / w[0], 1.0 / w[1]
            self._poly = PolygonNorm([(a, 0), (0, b), (-a, 0), (0, -b)])
        elif math.isinf(p):
            a, b = 1.0 / w[0], 1.0 / w[1]
            self._poly = PolygonNorm([(a, b), (-a, b), (-a, -b), (a, -b)])

    def _eval(self, a):
        s = a * self.w
        if self.p == 1.0:
            return np.sum(np.abs(s), axis=-1)
        if math.isinf(self.p):
            return np.max(np.abs(s), axis=-1)
        return np.sum(np.abs(s) ** self.p, axis=-1) ** (1.0 / self.p)

    def dual(self):
        return WeightedLpNorm(_conjugate(self.p), 1.0 / self.w)

    def _support_batch(self, X):
        if self._poly is not None:
            return self._poly._support_batch(X)
        U = X / np.asarray(self._eval(X))[..., None]
        P = np.sign(U) * self.w**self.p * np.abs(U) ** (self.p - 1.0)
        return P, P.copy()

    def special_angles(self):
        if self._poly is not None:
            return self._poly.special_angles()
        return np.empty(0, dtype=float)

    def to_json_dict(self):
        return {
            "kind": "weighted-lp",
            "p": "inf" if math.isinf(self.p) else self.p,
            "w": [float(self.w[0]), float(self.w[1])],
        }


class PolygonNorm(Norm):
    """Gauge of a convex origin-symmetric polygon, vertices counterclockwise.

    Evaluation is the maximum of the facet functionals a_i, which satisfy
    <a_i, .> = 1 on facet i; those functionals are exactly the vertices of the
    polar polygon, so duality is vertex bookkeeping.
    """

    kind = "polygon"

    def __init__(self, vertices):
        V = _points(vertices, "vertices")
        if V.ndim != 2 or len(V) < 4:
            raise RepresentationError("polygon needs at least 4 vertices")
        if len(V) % 2 != 0:
            raise RepresentationError("origin-symmetric polygon has an even vertex count")
        scale = float(np.max(np.abs(V)))
        if scale <= 0:
            raise RepresentationError("degenerate polygon")
        n = len(V)
        m = n // 2
        if np.max(np.abs(V[(np.arange(n) + m) % n] + V)) > 1e-9 * scale:
            raise RepresentationError("vertices are not origin-symmetric (v[i+n/2] must equal -v[i])")
        E = np.roll(V, -1, axis=0) - V
        cross = E[:, 0] * np.roll(E, -1, axis=0)[:, 1] - E[:, 1] * np.roll(E, -1, axis=0)[:, 0]
        if np.any(cross < 0):
            if np.all(cross <= 0):
                raise RepresentationError("vertices must be listed counterclockwise")
            raise RepresentationError("polygon is not convex")
        if np.any(cross <= 1e-12 * scale * scale):
            raise RepresentationError("collinear or repeated vertices")
        # outward facet normals for a CCW polygon, scaled to support value 1
        N = np.stack([E[:, 1], -E[:, 0]], axis=-1)
        c = np.sum(N * V, axis=-1)
        if np.any(c <= 1e-12 * scale * scale):
            raise RepresentationError("origin is not strictly interior")
        self.vertices = V
        self._functionals = N / c[:, None]

    def _eval(self, a):
        scores = a @ self._functionals.T
        return np.max(scores, axis=-1)

    def dual(self):
        return PolygonNorm(self._functionals)

    def _support_batch(self, X):
        A = self._functionals
        m = len(A)
        U = X / np.asarray(self._eval(X))[..., None]
        S = U @ A.T
        smax = np.max(S, axis=-1)
        tie = S >= (smax[:, None] - _TIE_TOL)
        idx = np.argmax(S, axis=-1)
        Pm = A[idx].copy()
        Pp = A[idx].copy()
        for r in np.nonzero(np.sum(tie, axis=-1) > 1)[0]:
            cols = np.nonzero(tie[r])[0]
            starts = [c for c in cols if not tie[r][(c - 1) % m]]
            if len(starts) != 1:
                continue  # tolerance fattened past a full cycle; keep the argmax facet
            j = starts[0]
            Pm[r] = A[j]
            Pp[r] = A[(j + len(cols) - 1) % m]
        return Pm, Pp

    def special_angles(self):
        return np.arctan2(self.vertices[:, 1], self.vertices[:, 0])

    def to_json_dict(self):
        return {"kind": "polygon", "vertices": [[float(a), float(b)] for a, b in self.vertices]}


# -- constructors and serialization ----------------------------------------


def _parse_p(p) -> float:
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity"):
            p = math.inf
        else:
            try:
                p = float(p)
            except ValueError:
                raise RepresentationError(f"cannot parse p={p!r}") from None
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise RepresentationError("p must satisfy 1 <= p <= inf")
    return p


def _conjugate(p: float) -> float:
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def euclidean_norm() -> EuclideanNorm:
    return EuclideanNorm()


def lp_norm(p) -> LpNorm:
    return LpNorm(p)


def weighted_lp_norm(p, w1: float, w2: float) -> WeightedLpNorm:
    return WeightedLpNorm(p, (w1, w2))


def polygon_norm(vertices) -> PolygonNorm:
    return PolygonNorm(vertices)


def regular_polygon_norm(n_vertices: int, angle_offset: float = 0.0) -> PolygonNorm:
    """Regular polygon with an even number of vertices on the unit circle.

    The second half is the exact negation of the first, so symmetry holds to
    the last bit.
    """
    n = int(n_vertices)
    if n < 4 or n % 2 != 0:
        raise RepresentationError("regular symmetric polygon needs an even vertex count >= 4")
    ang = angle_offset + 2.0 * np.pi * np.arange(n // 2) / n
    half = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    return PolygonNorm(np.concatenate([half, -half], axis=0))


def norm_from_json(data) -> Norm:
    """Build a norm from its JSON description (dict or JSON string)."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise InputError(f"invalid norm JSON: {e}") from None
    if not isinstance(data, dict) or "kind" not in data:
        raise InputError("norm JSON must be an object with a 'kind' field")
    kind = data["kind"]
    if kind == "euclidean":
        return EuclideanNorm()
    if kind == "lp":
        if "p" not in data:
            raise InputError("lp norm JSON needs 'p'")
        return LpNorm(data["p"])
    if kind == "weighted-lp":
        if "p" not in data or "w" not in data:
            raise InputError("weighted-lp norm JSON needs 'p' and 'w'")
        return WeightedLpNorm(data["p"], data["w"])
    if kind == "polygon":
        if "vertices" not in data:
            raise InputError("polygon norm JSON needs 'vertices'")
        return PolygonNorm(data["vertices"])
    raise InputError(f"unknown norm kind {kind!r}")


def norm_to_json_dict(norm: Norm) -> dict:
    return norm.to_json_dict()


def norm_key(norm: Norm) -> str:
    """Canonical JSON string; stable cache/identity key for a norm."""
    return json.dumps(norm.to_json_dict(), sort_keys=True, separators=(",", ":"))
