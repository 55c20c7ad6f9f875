"""Bezier (Bernstein-basis) trajectory channels over one swing period.

A curve holds a C x (N+1) control matrix: C channels sharing degree N and
duration.  Endpoint values and endpoint derivatives depend only on the two
outermost control columns, which is what makes the boundary-value gait
constructions closed-form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, NamedTuple

import numpy as np


@lru_cache(maxsize=64)
def _uniform_basis(n_points: int, degree: int) -> np.ndarray:
    """Bernstein basis sampled on n uniform points of [0, 1]; shape (n, N+1)."""
    u = np.linspace(0.0, 1.0, n_points)
    b = np.stack([comb(degree, j) * (1.0 - u) ** (degree - j) * u ** j
                  for j in range(degree + 1)], axis=1)
    b.setflags(write=False)
    return b


def bernstein_matrix(u: np.ndarray, degree: int) -> np.ndarray:
    """Bernstein basis at arbitrary parameters u in [0, 1]; shape (len(u), N+1)."""
    u = np.asarray(u, dtype=float)
    return np.stack([comb(degree, j) * (1.0 - u) ** (degree - j) * u ** j
                     for j in range(degree + 1)], axis=-1)


@dataclass(frozen=True)
class BezierCurve:
    duration: float
    control: np.ndarray  # shape (C, N+1)

    def __post_init__(self):
        ctrl = np.array(self.control, dtype=float)
        ctrl.setflags(write=False)
        object.__setattr__(self, "control", ctrl)
        if ctrl.ndim != 2:
            raise ValueError(f"control must be 2-D (channels x points), got {ctrl.shape}")
        if ctrl.shape[1] < 4:
            raise ValueError("degree must be >= 3 (need boundary values and rates)")
        if not np.all(np.isfinite(ctrl)):
            raise ValueError("control points must be finite")
        if not (np.isfinite(self.duration) and self.duration > 0):
            raise ValueError(f"duration must be positive, got {self.duration!r}")

    @property
    def degree(self) -> int:
        return self.control.shape[1] - 1

    @property
    def channels(self) -> int:
        return self.control.shape[0]

    def _u(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-12) or np.any(t > self.duration + 1e-12):
            raise ValueError(f"time {t} outside [0, {self.duration}]")
        return np.clip(t / self.duration, 0.0, 1.0)

    def eval(self, t):
        """Channel values at time t; shape (C,) for scalar t, else (C, len(t))."""
        u = self._u(t)
        b = bernstein_matrix(u, self.degree)
        return self.control @ b.T if b.ndim == 2 else self.control @ b

    def derivative(self, t):
        """Exact time derivative via the hodograph (degree N-1 on differences)."""
        u = self._u(t)
        diff = np.diff(self.control, axis=1)
        b = bernstein_matrix(u, self.degree - 1)
        scale = self.degree / self.duration
        return scale * (diff @ b.T) if b.ndim == 2 else scale * (diff @ b)

    def eval_uniform(self, n: int) -> np.ndarray:
        """Channel values on n uniform samples of [0, duration]; shape (C, n)."""
        return self.control @ _uniform_basis(n, self.degree).T

    def derivative_uniform(self, n: int) -> np.ndarray:
        diff = np.diff(self.control, axis=1)
        return (self.degree / self.duration) * (diff @ _uniform_basis(n, self.degree - 1).T)

    def elevated(self, degree: int) -> "BezierCurve":
        """Equivalent curve of higher degree (classic degree elevation)."""
        if degree < self.degree:
            raise ValueError("can only elevate to a higher degree")
        ctrl = self.control
        for n in range(self.degree, degree):
            new = np.empty((ctrl.shape[0], n + 2))
            new[:, 0] = ctrl[:, 0]
            new[:, -1] = ctrl[:, -1]
            j = np.arange(1, n + 1)
            w = j / (n + 1.0)
            new[:, 1:-1] = w * ctrl[:, :-1][:, j - 1] + (1.0 - w) * ctrl[:, 1:][:, j - 1]
            ctrl = new
        return BezierCurve(self.duration, ctrl)


class FitResult(NamedTuple):
    curve: BezierCurve
    rms: float


def fit_constrained(samples: Iterable[tuple[float, float]], degree: int,
                    duration: float, pinned: dict[int, float] | None = None,
                    cond_limit: float = 1e12) -> FitResult:
    """Least-squares single-channel Bernstein fit with fixed control points.

    ``pinned`` maps control-point indices to fixed values.  Solves the normal
    equations, falling back to a rank-revealing solver when the Gram matrix
    conditioning exceeds ``cond_limit``.
    """
    pinned = dict(pinned or {})
    pts = np.asarray(list(samples), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("samples must be (t, value) pairs")
    t, y = pts[:, 0], pts[:, 1]
    if np.any(t < -1e-12) or np.any(t > duration + 1e-12):
        raise ValueError("sample times must lie within [0, duration]")
    free = [j for j in range(degree + 1) if j not in pinned]
    if len(pts) < len(free):
        raise ValueError(f"underdetermined fit: {len(pts)} samples for "
                         f"{len(free)} free control points")
    b = bernstein_matrix(np.clip(t / duration, 0.0, 1.0), degree)
    target = y.copy()
    if pinned:
        idx = sorted(pinned)
        target = target - b[:, idx] @ np.array([pinned[j] for j in idx])
    ctrl = np.zeros(degree + 1)
    for j, v in pinned.items():
        ctrl[j] = v
    if free:
        bf = b[:, free]
        gram = bf.T @ bf
        if np.linalg.cond(gram) <= cond_limit:
            coef = np.linalg.solve(gram, bf.T @ target)
        else:
            coef, *_ = np.linalg.lstsq(bf, target, rcond=None)
        ctrl[free] = coef
    resid = b @ ctrl - y
    rms = float(np.sqrt(np.mean(resid ** 2))) if len(resid) else 0.0
    return FitResult(BezierCurve(duration, ctrl[None, :]), rms)
