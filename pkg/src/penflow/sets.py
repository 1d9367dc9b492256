"""Compact convex constraint sets with exact projections.

Two families are provided, axis-aligned boxes and Euclidean balls. Both
support the exact Euclidean projection, the projection of a velocity onto
the tangent cone at a feasible point, and an infeasibility measure. These
are the only geometric primitives the flow integrator needs, and both have
closed forms, so no inner iterative solver is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

# Boundary detection tolerance. Iterates are re-projected after every step,
# so activity tests only have to beat float rounding, not integrator drift.
TOL_ACTIVE = 1e-9


def _as_vector(x, m=None):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError(f"expected a 1-d vector, got shape {x.shape}")
    if m is not None and x.shape[0] != m:
        raise DomainError(f"expected dimension {m}, got {x.shape[0]}")
    return x


@dataclass(frozen=True)
class Box:
    """Axis-aligned box {x : lower <= x <= upper}."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ConfigError("box bounds must be 1-d vectors of equal length")
        # strict interior needed so a coordinate is never lower- and
        # upper-active at once
        if not np.all(hi - lo > 2 * TOL_ACTIVE):
            raise ConfigError("box must satisfy upper - lower > 2*TOL_ACTIVE")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.shape[0]

    def contains(self, x, tol=0.0):
        x = _as_vector(x, self.dim)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def project(self, x):
        x = _as_vector(x, self.dim)
        return np.clip(x, self.lower, self.upper)

    def normal_residual(self, x):
        x = _as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.project(x)))

    def active_faces(self, x):
        """Masks of lower-active and upper-active coordinates at x."""
        x = _as_vector(x, self.dim)
        return x <= self.lower + TOL_ACTIVE, x >= self.upper - TOL_ACTIVE

    def tangent_project(self, x, v):
        """Project velocity v onto the tangent cone at feasible x.

        Coordinate-wise rule: at a lower-active coordinate any inward or
        zero velocity survives and outward (negative) velocity is zeroed,
        symmetrically at upper-active coordinates. This is the exact
        Euclidean projection onto the tangent cone, which for a box is a
        product of half-lines and lines.
        """
        x = _as_vector(x, self.dim)
        v = _as_vector(v, self.dim)
        if self.normal_residual(x) > TOL_ACTIVE:
            raise DomainError("tangent_project requires a feasible base point")
        low_act, up_act = self.active_faces(x)
        out = v.copy()
        out[low_act & (out < 0.0)] = 0.0
        out[up_act & (out > 0.0)] = 0.0
        return out

    def interior_margin(self, x):
        x = _as_vector(x, self.dim)
        return float(min(np.min(x - self.lower), np.min(self.upper - x)))

    def max_norm(self):
        """max ||x||_2 over the set (attained at a vertex)."""
        return float(np.sqrt(np.sum(np.maximum(self.lower**2, self.upper**2))))

    def sample(self, rng):
        return rng.uniform(self.lower, self.upper)


@dataclass(frozen=True)
class Ball:
    """Euclidean ball {x : ||x - center|| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.ndim != 1:
            raise ConfigError("ball center must be a 1-d vector")
        r = float(self.radius)
        if not r > 0.0:
            raise ConfigError("ball radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self):
        return self.center.shape[0]

    def contains(self, x, tol=0.0):
        x = _as_vector(x, self.dim)
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def project(self, x):
        x = _as_vector(x, self.dim)
        d = x - self.center
        nd = np.linalg.norm(d)
        if nd <= self.radius:
            return x.copy()
        return self.center + d * (self.radius / nd)

    def normal_residual(self, x):
        x = _as_vector(x, self.dim)
        return float(max(0.0, np.linalg.norm(x - self.center) - self.radius))

    def boundary_normal(self, x):
        """Outward unit normal if x sits on the sphere, else None."""
        x = _as_vector(x, self.dim)
        d = x - self.center
        nd = np.linalg.norm(d)
        if nd >= self.radius - TOL_ACTIVE:
            return d / nd
        return None

    def tangent_project(self, x, v):
        """Project velocity v onto the tangent cone at feasible x.

        Interior points pass v through; on the boundary the positive
        radial component is removed, which is the projection onto the
        half-space tangent to the sphere.
        """
        x = _as_vector(x, self.dim)
        v = _as_vector(v, self.dim)
        if self.normal_residual(x) > TOL_ACTIVE:
            raise DomainError("tangent_project requires a feasible base point")
        normal = self.boundary_normal(x)
        if normal is None:
            return v.copy()
        beta = max(0.0, float(v @ normal))
        return v - beta * normal

    def interior_margin(self, x):
        x = _as_vector(x, self.dim)
        return float(self.radius - np.linalg.norm(x - self.center))

    def max_norm(self):
        return float(np.linalg.norm(self.center) + self.radius)

    def sample(self, rng, max_tries=100):
        # rejection from the bounding box; projection fallback keeps the
        # draw well defined in high dimension
        lo = self.center - self.radius
        hi = self.center + self.radius
        for _ in range(max_tries):
            x = rng.uniform(lo, hi)
            if self.contains(x):
                return x
        return self.project(rng.uniform(lo, hi))


def project(set_, x):
    """Euclidean projection of x onto a set (free-function form)."""
    return set_.project(x)


def tangent_project(set_, x, v):
    """Projection of v onto the tangent cone of a set at feasible x."""
    return set_.tangent_project(x, v)


def normal_residual(set_, x):
    """Distance from x to the set; zero iff x is a member."""
    return set_.normal_residual(x)
