"""Domain types: observations, datasets, parameter vectors, step transforms.

All types are immutable after construction and safe to share across worker
processes.  The step transform is the nonparametric estimate of the
monotone time transformation; it is anchored at zero and represented by
nonnegative jump sizes on each side of the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DegenerateTransformError, InputError

__all__ = [
    "Observation",
    "Dataset",
    "ModelParams",
    "StepTransform",
    "linear_predictors",
    "step_eval",
    "step_inverse",
]


@dataclass(frozen=True)
class Observation:
    """One subject: observed time, censoring indicators, covariates.

    ``delta`` flags the event of interest, ``xi`` flags dependent
    censoring; both zero means administrative censoring.  ``x`` and ``w``
    are the covariate vectors of the event-time and censoring-time
    regressions.
    """

    z: float
    delta: int
    xi: int
    x: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.z):
            raise InputError(f"observed time must be finite, got {self.z}")
        if self.delta not in (0, 1) or self.xi not in (0, 1):
            raise InputError("delta and xi must be 0 or 1")
        if self.delta + self.xi > 1:
            raise InputError("delta + xi must be at most 1")
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))

    @property
    def zeta(self) -> int:
        return self.delta + self.xi


class Dataset:
    """Column-oriented container for right-censored observations.

    Stores the data as immutable arrays (``z``, ``delta``, ``xi``, ``x``,
    ``w``); iterating yields :class:`Observation` views for convenience.
    """

    __slots__ = ("z", "delta", "xi", "x", "w")

    def __init__(self, z, delta, xi, x, w):
        self.z = np.ascontiguousarray(z, dtype=float)
        self.delta = np.ascontiguousarray(delta, dtype=np.int64)
        self.xi = np.ascontiguousarray(xi, dtype=np.int64)
        self.x = np.ascontiguousarray(x, dtype=float)
        self.w = np.ascontiguousarray(w, dtype=float)
        if self.x.ndim != 2 or self.w.ndim != 2:
            raise InputError("covariate arrays must be 2-dimensional")
        n = self.z.shape[0]
        if not (self.delta.shape[0] == self.xi.shape[0] == self.x.shape[0] == self.w.shape[0] == n):
            raise InputError("all columns must have the same number of rows")
        if not np.all(np.isfinite(self.z)):
            raise InputError("observed times must all be finite")
        if not (np.isin(self.delta, (0, 1)).all() and np.isin(self.xi, (0, 1)).all()):
            raise InputError("delta and xi must be 0/1 indicators")
        if np.any(self.delta + self.xi > 1):
            raise InputError("delta + xi must be at most 1 for every row")
        for arr in (self.z, self.delta, self.xi, self.x, self.w):
            arr.setflags(write=False)

    @classmethod
    def from_observations(cls, observations: Sequence[Observation]) -> "Dataset":
        if not observations:
            raise InputError("dataset must contain at least one observation")
        p = observations[0].x.shape[0]
        q = observations[0].w.shape[0]
        for i, o in enumerate(observations):
            if o.x.shape[0] != p or o.w.shape[0] != q:
                raise InputError(f"observation {i}: covariate length mismatch")
        return cls(
            z=[o.z for o in observations],
            delta=[o.delta for o in observations],
            xi=[o.xi for o in observations],
            x=np.array([o.x for o in observations], dtype=float),
            w=np.array([o.w for o in observations], dtype=float),
        )

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def q(self) -> int:
        return self.w.shape[1]

    @property
    def zeta(self) -> np.ndarray:
        return self.delta + self.xi

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[Observation]:
        for i in range(self.n):
            yield Observation(self.z[i], int(self.delta[i]), int(self.xi[i]), self.x[i], self.w[i])

    def __getitem__(self, i: int) -> Observation:
        return Observation(self.z[i], int(self.delta[i]), int(self.xi[i]), self.x[i], self.w[i])

    def subset(self, idx) -> "Dataset":
        """Row subset (used by the nonparametric bootstrap)."""
        idx = np.asarray(idx)
        return Dataset(self.z[idx], self.delta[idx], self.xi[idx], self.x[idx], self.w[idx])

    def validate_for_fit(self) -> None:
        """Fitting needs every observation class to be present.

        Mirrors the requirement that events, dependent censoring and
        administrative censoring all occur with positive probability.
        """
        zeta = self.zeta
        if not np.any(self.delta == 1):
            raise InputError("fitting requires at least one event (delta=1)")
        if not np.any(self.xi == 1):
            raise InputError("fitting requires at least one dependently censored row (xi=1)")
        if not np.any(zeta == 0):
            raise InputError("fitting requires at least one administratively censored row")


@dataclass(frozen=True)
class ModelParams:
    """Parameter vector: regression coefficients, marginal and copula parameters."""

    beta: np.ndarray
    eta: np.ndarray
    lambda_t: float
    lambda_c: float
    r: float

    def __post_init__(self):
        object.__setattr__(self, "beta", np.atleast_1d(np.asarray(self.beta, dtype=float)))
        object.__setattr__(self, "eta", np.atleast_1d(np.asarray(self.eta, dtype=float)))
        if self.lambda_t < 0 or self.lambda_c < 0:
            raise InputError("lambda_t and lambda_c must be nonnegative")
        self.beta.setflags(write=False)
        self.eta.setflags(write=False)

    @property
    def p(self) -> int:
        return self.beta.shape[0]

    @property
    def q(self) -> int:
        return self.eta.shape[0]

    def as_vector(self) -> np.ndarray:
        """Natural-space layout: (beta, eta, lambda_t, lambda_c, r)."""
        return np.concatenate([self.beta, self.eta, [self.lambda_t, self.lambda_c, self.r]])

    @classmethod
    def from_vector(cls, vec: np.ndarray, p: int, q: int) -> "ModelParams":
        vec = np.asarray(vec, dtype=float)
        if vec.shape[0] != p + q + 3:
            raise InputError(f"expected parameter vector of length {p + q + 3}")
        return cls(vec[:p], vec[p:p + q], vec[p + q], vec[p + q + 1], vec[p + q + 2])


def linear_predictors(obs: Observation, params: ModelParams) -> tuple[float, float]:
    """Return (x'beta, w'eta) for one observation."""
    if obs.x.shape[0] != params.p or obs.w.shape[0] != params.q:
        raise InputError("covariate/coefficient dimension mismatch")
    return float(obs.x @ params.beta), float(obs.w @ params.eta)


def _as_sorted_jumps(pairs, sign: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = list(pairs)
    if not pairs:
        return np.empty(0), np.empty(0)
    t = np.asarray([p[0] for p in pairs], dtype=float)
    j = np.asarray([p[1] for p in pairs], dtype=float)
    order = np.argsort(t, kind="stable")
    t, j = t[order], j[order]
    if sign > 0 and np.any(t <= 0):
        raise InputError("positive-side jump times must be > 0")
    if sign < 0 and np.any(t >= 0):
        raise InputError("negative-side jump times must be < 0")
    if np.any(j < 0) or not np.all(np.isfinite(j)) or not np.all(np.isfinite(t)):
        raise InputError("jump sizes must be finite and nonnegative")
    if np.unique(t).shape[0] != t.shape[0]:
        raise InputError("jump times must be distinct")
    return t, j


@dataclass(frozen=True)
class StepTransform:
    """Nondecreasing step function H with H(0) = 0.

    For z >= 0, H(z) accumulates the positive-side jumps at times in
    (0, z]; for z < 0 it equals minus the sum of negative-side jumps at
    times in [z, 0), so H is nondecreasing on the whole line.  On the
    positive axis H is right-continuous (the value at a jump time includes
    the jump); the negative axis mirrors that convention around zero.
    """

    pos_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    pos_jumps: np.ndarray = field(default_factory=lambda: np.empty(0))
    neg_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    neg_jumps: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        pt, pj = _as_sorted_jumps(zip(self.pos_times, self.pos_jumps), +1)
        nt, nj = _as_sorted_jumps(zip(self.neg_times, self.neg_jumps), -1)
        for name, arr in (("pos_times", pt), ("pos_jumps", pj), ("neg_times", nt), ("neg_jumps", nj)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        # right-continuous cumulative on each side, cached for evaluation
        object.__setattr__(self, "_pos_cum", np.cumsum(pj))
        object.__setattr__(self, "_neg_suffix", np.cumsum(nj[::-1])[::-1] if nj.size else nj)

    @classmethod
    def from_jumps(cls, times, jumps) -> "StepTransform":
        times = np.asarray(times, dtype=float)
        jumps = np.asarray(jumps, dtype=float)
        if np.any(times == 0):
            raise InputError("jump times must be nonzero (H(0) = 0 is fixed)")
        pos = times > 0
        return cls(times[pos], jumps[pos], times[~pos], jumps[~pos])

    @property
    def times(self) -> np.ndarray:
        return np.concatenate([self.neg_times, self.pos_times])

    @property
    def jumps(self) -> np.ndarray:
        return np.concatenate([self.neg_jumps, self.pos_jumps])

    def eval(self, z):
        """Evaluate H at scalar or array argument."""
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        pos = z >= 0
        if self.pos_times.size:
            idx = np.searchsorted(self.pos_times, z[pos], side="right")
            cum = np.concatenate([[0.0], self._pos_cum])
            out[pos] = cum[idx]
        neg = ~pos
        if self.neg_times.size:
            idx = np.searchsorted(self.neg_times, z[neg], side="left")
            suf = np.concatenate([self._neg_suffix, [0.0]])
            out[neg] = -suf[idx]
        return out if out.ndim else float(out)

    def jump_at(self, z):
        """Jump size at time(s) z (zero where no jump point exists)."""
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        for times, jumps in ((self.pos_times, self.pos_jumps), (self.neg_times, self.neg_jumps)):
            if times.size:
                idx = np.searchsorted(times, z)
                valid = (idx < times.size) & (times[np.minimum(idx, times.size - 1)] == z)
                out[valid] = jumps[idx[valid]]
        return out if out.ndim else float(out)

    def inverse_array(self, y, return_clamped: bool = False, anchor: bool = True):
        """Generalized inverse inf{z in jump points + {0} : H(z) >= y}.

        Jump points with zero size are not discontinuities and are not
        candidates.  Arguments beyond the attained range clamp to the
        extreme jump points; ``return_clamped`` also reports which entries
        were clamped.  ``anchor=False`` removes 0 from the candidate set,
        forcing the result onto an actual jump point (the bootstrap needs
        times that can carry jumps).
        """
        y = np.atleast_1d(np.asarray(y, dtype=float))
        pos_keep = self.pos_jumps > 0
        neg_keep = self.neg_jumps > 0
        pt = self.pos_times[pos_keep]
        pc = self._pos_cum[pos_keep]
        nt = self.neg_times[neg_keep]
        nv = -self._neg_suffix[neg_keep]  # H value at each negative jump point
        if pt.size == 0 and nt.size == 0:
            if np.any(y != 0.0) or not anchor:
                raise DegenerateTransformError("transform has no jumps; inverse undefined away from 0")
            out = np.zeros_like(y)
            return (out, np.zeros_like(y, dtype=bool)) if return_clamped else out

        top = pt[-1] if pt.size else nt[-1]
        bottom = nt[0] if nt.size else pt[0]
        # value for arguments in [max negative-side value, 0]: the anchor
        # itself, or with anchor=False the first point at nonnegative height
        gap_value = 0.0 if anchor else (pt[0] if pt.size else top)
        out = np.full_like(y, gap_value)
        clamped = np.zeros_like(y, dtype=bool)
        if not anchor and not pt.size:
            clamped[(y <= 0) & (y >= nv[-1])] = True

        up = y > 0
        if np.any(up):
            if pt.size:
                idx = np.searchsorted(pc, y[up], side="left")
                over = idx >= pc.size
                vals = pt[np.minimum(idx, pc.size - 1)]
                vals[over] = top
                out[up] = vals
                clamped[up] = over
            else:
                out[up] = top
                clamped[up] = True

        dn = y < 0
        if np.any(dn):
            if nt.size:
                idx = np.searchsorted(nv, y[dn], side="left")
                vals = nt[np.minimum(idx, nv.size - 1)]
                # above every negative-side value: fall back to the gap value
                vals[idx >= nv.size] = gap_value
                out[dn] = vals
                clamped[dn] = y[dn] < nv[0]
            else:
                out[dn] = bottom
                clamped[dn] = True
        return (out, clamped) if return_clamped else out

    def inverse(self, y: float) -> float:
        """Scalar convenience wrapper around :meth:`inverse_array`."""
        return float(self.inverse_array(y)[0])

    def with_jumps(self, times, jumps) -> "StepTransform":
        return StepTransform.from_jumps(times, jumps)


def step_eval(transform: StepTransform, z):
    """Functional alias for :meth:`StepTransform.eval`."""
    return transform.eval(z)


def step_inverse(transform: StepTransform, y: float) -> float:
    """Functional alias for :meth:`StepTransform.inverse`."""
    return transform.inverse(y)
