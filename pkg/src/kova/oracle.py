"""Numeric cross-checks: RK4 flow with its Jacobian, and tensor pullbacks.

The Lie derivative is ``d/dt (phi_t^* T)`` at ``t = 0``.  Here the flow and
its derivative are integrated numerically and the pullback is
differentiated by a five-point central stencil, independently of the
symbolic code.  Upper slots are pulled back with the inverse flow Jacobian,
lower slots with the forward one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import OracleOptions
from .errors import KovaError
from .polyalg import NumericField, NumericPoly, VectorField
from .tensorfield import TensorField, lie_derivative

log = logging.getLogger(__name__)


@dataclass
class FlowSample:
    start: np.ndarray
    h: float
    horizon: int
    trajectory: np.ndarray      # (horizon + 1, n)
    jacobians: np.ndarray       # (horizon + 1, n, n)


def _rhs(num: NumericField, x, Phi):
    return num(x), num.jacobian(x) @ Phi


def rk4_flow(F, x0, h: float, steps: int) -> FlowSample:
    """Integrate ``x' = F(x)``, ``Phi' = DF(x) Phi`` with fixed-step RK4."""
    num = F if isinstance(F, NumericField) else NumericField(F.to_float())
    x = np.array(x0, dtype=float)
    n = x.size
    Phi = np.eye(n)
    traj, jacs = [x.copy()], [Phi.copy()]
    for _ in range(steps):
        k1, K1 = _rhs(num, x, Phi)
        k2, K2 = _rhs(num, x + 0.5 * h * k1, Phi + 0.5 * h * K1)
        k3, K3 = _rhs(num, x + 0.5 * h * k2, Phi + 0.5 * h * K2)
        k4, K4 = _rhs(num, x + h * k3, Phi + h * K3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        Phi = Phi + h / 6 * (K1 + 2 * K2 + 2 * K3 + K4)
        traj.append(x.copy())
        jacs.append(Phi.copy())
    return FlowSample(np.array(x0, dtype=float), h, steps, np.array(traj), np.array(jacs))


class NumericTensor:
    """Dense evaluation of a tensor field: array of shape ``(n,) * (p + q)``."""

    def __init__(self, T: TensorField):
        T = T.to_float()
        self.n, self.p, self.q = T.n, T.p, T.q
        self.keys = list(T.components)
        self._eval = NumericPoly([T[k] for k in self.keys]) if self.keys else None

    def __call__(self, x) -> np.ndarray:
        out = np.zeros((self.n,) * (self.p + self.q))
        if self._eval is not None:
            vals = self._eval(np.asarray(x, dtype=float))
            for k, v in zip(self.keys, vals):
                out[k] = v
        return out


def pullback(Tx: np.ndarray, Phi: np.ndarray, p: int, q: int) -> np.ndarray:
    """``(phi^* T)(x0)`` from ``T(phi(x0))`` and ``Phi = D phi(x0)``."""
    inv = np.linalg.solve(Phi, np.eye(Phi.shape[0]))
    log.debug("flow Jacobian condition number %.3g", np.linalg.cond(Phi))
    out = Tx
    for axis in range(p + q):
        M = inv if axis < p else Phi.T
        # contract slot `axis` of out with M: new[.., a, ..] = sum_b M[a, b] out[.., b, ..]
        out = np.moveaxis(np.tensordot(M, out, axes=([1], [axis])), 0, axis)
    return out


def pullback_at(F, NT: NumericTensor, x0, t: float, steps: int = 1) -> np.ndarray:
    fs = rk4_flow(F, x0, t / steps, steps)
    return pullback(NT(fs.trajectory[-1]), fs.jacobians[-1], NT.p, NT.q)


def fd_lie_derivative(F, NT: NumericTensor, x0, h: float = 1e-3) -> np.ndarray:
    """Five-point central difference of ``t -> phi_t^* T`` at ``t = 0``."""
    num = NumericField(F.to_float()) if isinstance(F, VectorField) else F
    P = {s: pullback_at(num, NT, x0, s * h) for s in (-2, -1, 1, 2)}
    return (P[-2] - 8 * P[-1] + 8 * P[1] - P[2]) / (12 * h)


def sample_points(n: int, count: int, opts: OracleOptions, rng=None, F=None):
    """Points in ``[-box, box]^n`` away from coordinate hyperplanes.

    With ``F`` given, points whose short flow leaves the escape ball are
    resampled (up to ``opts.max_retries`` extra draws).
    """
    rng = rng if rng is not None else np.random.default_rng(opts.seed)
    pts, retries = [], 0
    num = NumericField(F.to_float()) if F is not None else None
    while len(pts) < count:
        x = rng.uniform(-opts.box, opts.box, n)
        bad = np.any(np.abs(x) < opts.band)
        if not bad and num is not None:
            with np.errstate(all="ignore"):
                fs = rk4_flow(num, x, 2 * opts.h, 1)
            traj = fs.trajectory
            bad = not np.all(np.isfinite(traj)) or np.abs(traj).max() > opts.escape_norm
        if bad:
            retries += 1
            if retries > opts.max_retries:
                raise KovaError("too many rejected sample points", retries=retries)
            continue
        pts.append(x)
    return pts


def flow_pullback_residual(F: VectorField, T: TensorField, samples: int = 20,
                           opts: OracleOptions | None = None) -> float:
    """Max over sample points of ``|d/dt phi_t^* T|`` at ``t = 0``.

    Near zero (up to discretization error) exactly for invariants.
    """
    opts = opts or OracleOptions()
    NT = NumericTensor(T)
    num = NumericField(F.to_float())
    worst = 0.0
    for x0 in sample_points(F.n, samples, opts, F=F):
        worst = max(worst, float(np.abs(fd_lie_derivative(num, NT, x0, opts.h)).max(initial=0.0)))
    return worst


def oracle_disagreement(F: VectorField, T: TensorField, samples: int = 20,
                        opts: OracleOptions | None = None) -> float:
    """Max ``|finite-difference pullback derivative - symbolic L_F T|``."""
    opts = opts or OracleOptions()
    NT = NumericTensor(T)
    NL = NumericTensor(lie_derivative(T.to_float(), F.to_float()))
    num = NumericField(F.to_float())
    worst = 0.0
    for x0 in sample_points(F.n, samples, opts, F=F):
        diff = fd_lie_derivative(num, NT, x0, opts.h) - NL(x0)
        worst = max(worst, float(np.abs(diff).max(initial=0.0)))
    return worst


def rk4_order_ratio(F: VectorField, T: TensorField, x0, tau: float = 0.5, h: float = 0.05):
    """Error-reduction factor of the finite-time pullback under step halving.

    Uses Richardson differences ``|P_h - P_{h/2}| / |P_{h/2} - P_{h/4}|``,
    which tends to 16 for a fourth-order method.
    """
    NT = NumericTensor(T)
    num = NumericField(F.to_float())
    steps = int(round(tau / h))
    P = [pullback_at(num, NT, x0, tau, steps * 2 ** i) for i in range(3)]
    e1 = np.abs(P[0] - P[1]).max()
    e2 = np.abs(P[1] - P[2]).max()
    return float(e1 / e2) if e2 > 0 else float("inf")


def scale_invariant_solution_check(g_m: VectorField, grading, balance, t_grid=None) -> float:
    """Max defect of ``x(t) = t^{-H} c`` in ``x' = g_m(x)`` over ``t`` in [1, 2]."""
    if t_grid is None:
        t_grid = np.linspace(1.0, 2.0, 100)
    H = np.array([float(h) for h in grading.H])
    c = np.array([complex(v) for v in (balance.c if hasattr(balance, "c") else balance)])
    num = NumericField(g_m.to_float())
    worst = 0.0
    for t in t_grid:
        x = t ** (-H) * c
        dx = -H * t ** (-H - 1) * c
        worst = max(worst, float(np.abs(dx - num(x)).max()))
    return worst
