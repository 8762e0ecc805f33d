"""Young functions and their convex conjugates.

A Young function here is a convex, strictly increasing ``phi`` on
``[0, inf)`` with ``phi(0) = 0``, generated by a nondecreasing density
``phi'`` with ``phi'(0) = 0``, ``phi'(s) > 0`` for ``s > 0`` and
``phi'(s) -> inf``.  Three closed-form families are provided together
with a sampled-density family:

``PowerYoung(p, scale)``
    ``phi(t) = scale * t**p / p`` with ``p > 1``.  Conjugation stays in
    the family and sends exponent ``p`` to ``q = p / (p - 1)``.
``ExpYoung(scale, rate)``
    ``phi(t) = scale * (exp(rate*t) - rate*t - 1)``.
``LogYoung(scale, rate)``
    ``phi(t) = scale * ((1 + rate*t) * log1p(rate*t) - rate*t)``, the
    conjugate family of ``ExpYoung``.
``DensityYoung(samples, tail_slope)``
    ``phi'`` given by samples ``(s_i, d_i)`` interpolated piecewise
    linearly, extended linearly beyond the last sample.  Evaluation
    integrates the interpolant in closed form per segment, so no
    quadrature error enters.  When the sampled values are strictly
    increasing the conjugate is again a ``DensityYoung`` with the
    sample columns swapped and the tail slope inverted, which makes
    biconjugation exactly involutive.

The conjugate is ``phi*(t) = integral_0^t sup{s : phi'(s) <= t} ds``;
Young's inequality ``s*t <= phi(s) + phi*(t)`` holds with equality at
``t = phi'(s)`` (see :func:`young_gap`).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    DensityResolutionError,
    DomainError,
    InvalidDensityError,
)
from .numerics import solve_monotone


def _as_nonnegative(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("Young functions are defined for t >= 0")
    return arr


def _scalar_like(t, arr):
    return float(arr) if np.ndim(t) == 0 else arr


class YoungFunction:
    """Common interface of all Young-function families."""

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """Evaluate ``phi(t)`` for scalar or array ``t >= 0``."""
        raise NotImplementedError

    def density(self, s):
        """Evaluate the generating density ``phi'(s)``."""
        raise NotImplementedError

    def conjugate(self):
        """Return the convex conjugate as a :class:`YoungFunction`."""
        raise NotImplementedError

    def inverse(self, y, rel_tol=1e-12):
        """Solve ``phi(t) = y`` for ``t >= 0`` by bracketing bisection."""
        if y < 0.0:
            raise DomainError("phi takes no negative values")
        if y == 0.0:
            return 0.0
        return solve_monotone(self.eval, y, lo=0.0, rel_tol=rel_tol)

    def to_json(self):
        raise NotImplementedError


class PowerYoung(YoungFunction):
    """``phi(t) = scale * t**p / p`` for ``p > 1``, ``scale > 0``."""

    def __init__(self, p, scale=1.0):
        p = float(p)
        scale = float(scale)
        if not p > 1.0:
            raise InvalidDensityError(f"power family needs p > 1, got {p!r}")
        if not scale > 0.0:
            raise InvalidDensityError(f"scale must be positive, got {scale!r}")
        self.p = p
        self.scale = scale

    def eval(self, t):
        arr = _as_nonnegative(t)
        return _scalar_like(t, self.scale * arr ** self.p / self.p)

    def density(self, s):
        arr = _as_nonnegative(s)
        return _scalar_like(s, self.scale * arr ** (self.p - 1.0))

    def conjugate(self):
        q = self.p / (self.p - 1.0)
        return PowerYoung(q, self.scale ** (1.0 - q))

    def to_json(self):
        return {"family": "power", "params": {"p": self.p, "scale": self.scale}}

    def __repr__(self):
        return f"PowerYoung(p={self.p!r}, scale={self.scale!r})"

    def __eq__(self, other):
        return (isinstance(other, PowerYoung)
                and self.p == other.p and self.scale == other.scale)


class ExpYoung(YoungFunction):
    """``phi(t) = scale * (exp(rate*t) - rate*t - 1)``."""

    def __init__(self, scale=1.0, rate=1.0):
        scale = float(scale)
        rate = float(rate)
        if scale <= 0.0 or rate <= 0.0:
            raise InvalidDensityError("scale and rate must be positive")
        self.scale = scale
        self.rate = rate

    def eval(self, t):
        arr = _as_nonnegative(t)
        u = self.rate * arr
        with np.errstate(over="ignore"):
            out = self.scale * (np.expm1(u) - u)
        return _scalar_like(t, out)

    def density(self, s):
        arr = _as_nonnegative(s)
        with np.errstate(over="ignore"):
            out = self.scale * self.rate * np.expm1(self.rate * arr)
        return _scalar_like(s, out)

    def conjugate(self):
        return LogYoung(self.scale, 1.0 / (self.scale * self.rate))

    def to_json(self):
        return {"family": "exp", "params": {"scale": self.scale, "rate": self.rate}}

    def __repr__(self):
        return f"ExpYoung(scale={self.scale!r}, rate={self.rate!r})"

    def __eq__(self, other):
        return (isinstance(other, ExpYoung)
                and self.scale == other.scale and self.rate == other.rate)


class LogYoung(YoungFunction):
    """``phi(t) = scale * ((1 + rate*t) * log1p(rate*t) - rate*t)``.

    Closed under conjugation with :class:`ExpYoung`: the conjugate of
    ``LogYoung(a, b)`` is ``ExpYoung(a, 1/(a*b))`` and vice versa.
    """

    def __init__(self, scale=1.0, rate=1.0):
        scale = float(scale)
        rate = float(rate)
        if scale <= 0.0 or rate <= 0.0:
            raise InvalidDensityError("scale and rate must be positive")
        self.scale = scale
        self.rate = rate

    def eval(self, t):
        arr = _as_nonnegative(t)
        u = self.rate * arr
        out = self.scale * ((1.0 + u) * np.log1p(u) - u)
        return _scalar_like(t, out)

    def density(self, s):
        arr = _as_nonnegative(s)
        out = self.scale * self.rate * np.log1p(self.rate * arr)
        return _scalar_like(s, out)

    def conjugate(self):
        return ExpYoung(self.scale, 1.0 / (self.scale * self.rate))

    def to_json(self):
        return {"family": "log", "params": {"scale": self.scale, "rate": self.rate}}

    def __repr__(self):
        return f"LogYoung(scale={self.scale!r}, rate={self.rate!r})"

    def __eq__(self, other):
        return (isinstance(other, LogYoung)
                and self.scale == other.scale and self.rate == other.rate)


class DensityYoung(YoungFunction):
    """Young function generated by a sampled density.

    Parameters
    ----------
    samples : array_like, shape (m, 2)
        Rows ``(s_i, d_i)`` with ``s_0 = 0``, ``d_0 = 0``, the ``s_i``
        strictly increasing and the ``d_i`` nondecreasing and finite.
    tail_slope : float, optional
        Slope of the density beyond the last sample.  Defaults to the
        slope of the last segment, falling back to the mean slope
        ``d_m / s_m`` and finally to ``1.0``; must be positive so that
        the density is unbounded.
    """

    def __init__(self, samples, tail_slope=None):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 2 or samples.shape[0] < 2:
            raise InvalidDensityError("need an (m, 2) sample table with m >= 2")
        s = samples[:, 0]
        d = samples[:, 1]
        if not np.all(np.isfinite(samples)):
            raise InvalidDensityError("density samples must be finite")
        if s[0] != 0.0 or d[0] != 0.0:
            raise InvalidDensityError("the density must start at (0, 0)")
        if np.any(np.diff(s) <= 0.0):
            raise InvalidDensityError("sample points must be strictly increasing")
        if np.any(np.diff(d) < 0.0):
            raise InvalidDensityError("density values must be nondecreasing")
        if tail_slope is None:
            tail_slope = (d[-1] - d[-2]) / (s[-1] - s[-2])
            if tail_slope <= 0.0:
                tail_slope = d[-1] / s[-1]
            if tail_slope <= 0.0:
                tail_slope = 1.0
        tail_slope = float(tail_slope)
        if tail_slope <= 0.0:
            raise InvalidDensityError("tail slope must be positive")
        self.samples = samples
        self.tail_slope = tail_slope
        # Exact integrals of the interpolant up to each sample point.
        seg = 0.5 * (d[:-1] + d[1:]) * np.diff(s)
        self._cum = np.concatenate(([0.0], np.cumsum(seg)))
        self._s = s
        self._d = d

    def eval(self, t):
        arr = _as_nonnegative(t)
        s, d = self._s, self._d
        idx = np.clip(np.searchsorted(s, arr, side="right") - 1, 0, len(s) - 2)
        inside = arr <= s[-1]
        slope_in = (d[idx + 1] - d[idx]) / (s[idx + 1] - s[idx])
        dt_in = arr - s[idx]
        val_in = self._cum[idx] + d[idx] * dt_in + 0.5 * slope_in * dt_in ** 2
        dt_out = arr - s[-1]
        val_out = self._cum[-1] + d[-1] * dt_out + 0.5 * self.tail_slope * dt_out ** 2
        return _scalar_like(t, np.where(inside, val_in, val_out))

    def density(self, s_query):
        arr = _as_nonnegative(s_query)
        inside = np.interp(arr, self._s, self._d)
        out = self._d[-1] + self.tail_slope * (arr - self._s[-1])
        return _scalar_like(s_query, np.where(arr <= self._s[-1], inside, out))

    def conjugate(self):
        """Transpose the sample table; exact and involutive.

        The interpolated density is continuous and piecewise linear, so
        its sup-inverse is the plain inverse whenever the sampled values
        are strictly increasing, and that inverse is the piecewise
        linear interpolant through the swapped samples ``(d_i, s_i)``.
        Flat segments would put a jump into the inverse that no sample
        table can carry, hence the resolution error.
        """
        if np.any(np.diff(self._d) <= 0.0):
            i = int(np.argmin(np.diff(self._d)))
            raise DensityResolutionError(
                "density grid too coarse to invert: flat segment at "
                f"s in [{self._s[i]!r}, {self._s[i + 1]!r}] "
                f"(value {self._d[i]!r}); refine the samples so the "
                "density increases strictly"
            )
        swapped = np.column_stack((self._d, self._s))
        return DensityYoung(swapped, tail_slope=1.0 / self.tail_slope)

    def to_json(self):
        return {"density": self.samples.tolist(), "tail_slope": self.tail_slope}

    def __repr__(self):
        return (f"DensityYoung(<{len(self._s)} samples on "
                f"[0, {self._s[-1]!r}]>, tail_slope={self.tail_slope!r})")

    def __eq__(self, other):
        return (isinstance(other, DensityYoung)
                and np.array_equal(self.samples, other.samples)
                and self.tail_slope == other.tail_slope)


def young_from_json(obj):
    """Rebuild a Young function from its JSON form."""
    if "density" in obj:
        return DensityYoung(obj["density"], obj.get("tail_slope"))
    family = obj["family"]
    params = obj.get("params", {})
    if family == "power":
        return PowerYoung(**params)
    if family == "exp":
        return ExpYoung(**params)
    if family == "log":
        return LogYoung(**params)
    raise DomainError(f"unknown Young family {family!r}")


class ConjugatePair:
    """A Young function together with its conjugate.

    Provides the Young-inequality gap and a grid check of the defining
    duality relations.
    """

    def __init__(self, phi, phi_star=None):
        self.phi = phi
        self.phi_star = phi.conjugate() if phi_star is None else phi_star

    @classmethod
    def of(cls, phi):
        return cls(phi)

    def gap(self, s, t):
        """``phi(s) + phi*(t) - s*t``; nonnegative, zero at ``t = phi'(s)``."""
        return self.phi.eval(s) + self.phi_star.eval(t) - s * t

    def check(self, s_grid, rel_tol=1e-9):
        """Verify Young's inequality and the equality case on a grid.

        Returns a report dict; ``ok`` is False when the inequality is
        violated beyond rounding or the equality-case gap exceeds
        ``rel_tol`` at the scale of the terms.
        """
        worst_neg = 0.0
        worst_eq = 0.0
        for s in np.asarray(s_grid, dtype=float):
            t = self.phi.density(s)
            scale = max(1.0, abs(self.phi.eval(s)), abs(self.phi_star.eval(t)))
            g_eq = self.gap(s, t) / scale
            worst_eq = max(worst_eq, abs(g_eq))
            for t_off in (0.5 * t, 2.0 * t + 1.0):
                g = self.gap(s, t_off)
                sc = max(1.0, abs(self.phi.eval(s)), abs(self.phi_star.eval(t_off)))
                worst_neg = min(worst_neg, g / sc)
        ok = worst_neg >= -rel_tol and worst_eq <= rel_tol
        return {"ok": ok, "worst_negative_gap": worst_neg,
                "worst_equality_gap": worst_eq}


def young_gap(phi, s, t, phi_star=None):
    """Young-inequality gap ``phi(s) + phi*(t) - s*t``."""
    return ConjugatePair(phi, phi_star).gap(s, t)


def delta2_report(phi, t_min=1e-6, t_max=50.0, points=200, cap=1e6):
    """Check the doubling condition ``phi(2t) <= C * phi(t)``.

    For the power family the condition is exact with ``C = 2**p`` and
    no threshold.  For every other family the ratio ``phi(2t)/phi(t)``
    is examined on a geometric grid; this is a finite-grid check, not a
    proof.  The verdict is negative when the supremum of the ratio
    exceeds ``cap``.

    Returns a dict with keys ``holds``, ``kind`` (``"exact"`` or
    ``"grid"``), ``constant``, ``threshold``, ``sup_ratio``,
    ``witness_t`` and ``tail_growing``.
    """
    if isinstance(phi, PowerYoung):
        c = 2.0 ** phi.p
        return {"holds": True, "kind": "exact", "constant": c, "threshold": 0.0,
                "sup_ratio": c, "witness_t": None, "tail_growing": False}
    ts = np.geomspace(t_min, t_max, points)
    with np.errstate(over="ignore", invalid="ignore"):
        ratios = np.asarray(phi.eval(2.0 * ts)) / np.asarray(phi.eval(ts))
    i = int(np.nanargmax(ratios))
    sup_ratio = float(ratios[i])
    tail_growing = bool(ratios[-1] > ratios[-2] > ratios[-3])
    holds = sup_ratio <= cap
    return {"holds": holds, "kind": "grid",
            "constant": sup_ratio if holds else None,
            "threshold": float(t_min), "sup_ratio": sup_ratio,
            "witness_t": float(ts[i]), "tail_growing": tail_growing}


def limit_report(phi, t_max=1e13, points=400, rel_tol=1e-12):
    """Slope behaviour of ``phi`` at infinity and of its inverse.

    Tabulates ``phi(t)/t`` on a geometric grid ``[1, t_max]`` and
    ``phi^{-1}(y)/y`` on the image grid, and reports whether the former
    climbs above ``1e6`` and the latter falls below ``1e-6`` within the
    grid, along with monotonicity of both ratio sequences.
    """
    ts = np.geomspace(1.0, t_max, points)
    with np.errstate(over="ignore"):
        vals = np.asarray(phi.eval(ts))
    ratios = vals / ts
    finite = np.isfinite(ratios)
    grow_ok = bool(np.all(np.diff(ratios[finite]) > -1e-9 * ratios[finite][:-1]))
    ratio_max = float(np.max(ratios[finite])) if not np.all(finite) else float(ratios[-1])
    if np.any(~finite):
        ratio_max = math.inf
    ys = vals[finite & (vals > 0.0)]
    ys = ys[ys < 1e300]
    inv_ratios = []
    for y in ys[:: max(1, len(ys) // 60)]:
        inv_ratios.append(phi.inverse(float(y), rel_tol=rel_tol) / float(y))
    inv_ratios = np.asarray(inv_ratios)
    shrink_ok = bool(np.all(np.diff(inv_ratios) < 1e-9 * inv_ratios[:-1] + 1e-30))
    return {
        "ratio_max": ratio_max,
        "ratio_exceeds_1e6": bool(ratio_max > 1e6),
        "ratio_monotone_up": grow_ok,
        "inverse_ratio_min": float(np.min(inv_ratios)),
        "inverse_ratio_below_1e-6": bool(np.min(inv_ratios) < 1e-6),
        "inverse_ratio_monotone_down": shrink_ok,
    }
