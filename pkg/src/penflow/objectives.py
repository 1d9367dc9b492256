"""Convex objective oracles with explicit subgradient selections.

Two families cover the experiment catalogue:

* ``L1PlusLinear``: f(x) = |x - a|_1 + b.x, piecewise linear.
* ``QuadPlusL1``:  f(x) = 0.5 x'Px + q.x + r|x|_1 with P symmetric
  positive definite, hence strongly convex with modulus lambda_min(P).

Each oracle returns values, a deterministic subgradient selection, and
closed-form metadata: a Lipschitz bound valid on a paired compact set and
the strong-convexity modulus. The bounds are deliberately overestimates;
they feed the penalty factor selection where soundness matters and slack
only increases the penalty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

# Dead zone half-width for the sign selection. Coordinates this close to a
# kink take the symmetric selection 0 instead of flapping between -1 and 1.
TOL_SIGN = 1e-9


def sign_select(u, tol=TOL_SIGN):
    """Coordinate-wise selection from the set-valued sign of u.

    Returns +1 where u > tol, -1 where u < -tol, and 0 inside the dead
    zone. Every output is a valid element of the subdifferential of |.|
    at the corresponding coordinate.
    """
    u = np.asarray(u, dtype=float)
    return np.where(u > tol, 1.0, np.where(u < -tol, -1.0, 0.0))


@dataclass(frozen=True)
class L1PlusLinear:
    """f(x) = |x - anchor|_1 + slope . x"""

    anchor: np.ndarray
    slope: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.anchor, dtype=float)
        b = np.asarray(self.slope, dtype=float)
        if a.ndim != 1 or a.shape != b.shape:
            raise ConfigError("anchor and slope must be 1-d vectors of equal length")
        object.__setattr__(self, "anchor", a)
        object.__setattr__(self, "slope", b)

    @property
    def dim(self):
        return self.anchor.shape[0]

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return float(np.sum(np.abs(x - self.anchor)) + self.slope @ x)

    def subgradient(self, x):
        x = np.asarray(x, dtype=float)
        return sign_select(x - self.anchor) + self.slope

    def lipschitz_bound(self, set_):
        # ||g|| <= ||sgn|| + ||b|| <= sqrt(m) + ||b||, independent of the set
        return float(np.sqrt(self.dim) + np.linalg.norm(self.slope))

    def strong_convexity_modulus(self):
        return 0.0


@dataclass(frozen=True)
class QuadPlusL1:
    """f(x) = 0.5 x'Px + q . x + r |x|_1"""

    P: np.ndarray
    q: np.ndarray
    r: float

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        q = np.asarray(self.q, dtype=float)
        r = float(self.r)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ConfigError("P must be a square matrix")
        if q.ndim != 1 or q.shape[0] != P.shape[0]:
            raise ConfigError("q must be a vector matching P")
        if not np.allclose(P, P.T, atol=1e-12, rtol=0.0):
            raise ConfigError("P must be symmetric within 1e-12")
        if r < 0.0:
            raise ConfigError("r must be nonnegative")
        eigs = np.linalg.eigvalsh(0.5 * (P + P.T))
        if eigs[0] <= 0.0:
            raise ConfigError("P must be positive definite")
        object.__setattr__(self, "P", 0.5 * (P + P.T))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "_eig_min", float(eigs[0]))
        object.__setattr__(self, "_eig_max", float(eigs[-1]))

    @property
    def dim(self):
        return self.q.shape[0]

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.P @ x + self.q @ x + self.r * np.sum(np.abs(x)))

    def subgradient(self, x):
        x = np.asarray(x, dtype=float)
        return self.P @ x + self.q + self.r * sign_select(x)

    def lipschitz_bound(self, set_):
        # sup ||Px + q + r s|| over the set, bounded via the operator norm
        # of P and the set's largest point norm
        r_max = set_.max_norm()
        return float(
            self._eig_max * r_max
            + np.linalg.norm(self.q)
            + self.r * np.sqrt(self.dim)
        )

    def strong_convexity_modulus(self):
        return self._eig_min


def value(obj, x):
    return obj.value(x)


def subgradient(obj, x):
    return obj.subgradient(x)


def lipschitz_bound(obj, set_):
    if obj.dim != set_.dim:
        raise DomainError("objective and set dimensions differ")
    return obj.lipschitz_bound(set_)


def strong_convexity_modulus(obj):
    return obj.strong_convexity_modulus()
