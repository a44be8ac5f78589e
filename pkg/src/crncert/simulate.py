"""Floating-point integration of ``x' = Gamma v(x)`` and empirical checks of the certified claims.

This is the only module that works in floating point.  Cones built
exactly elsewhere are converted to float arrays here for LP membership
tests with an explicit slack.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from .cone import CubicCone
from .kinetics import KineticModel, jacobian
from .network import stoichiometric_matrix

TOL_EQ = 1e-10
TOL_CONV = 1e-6
TOL_CONS = 1e-9
TAU_K = 1e-8
EPS_CLIP = 1e-12
# differences below this fraction of the state's l1 norm are round-off
ROUNDOFF_FLOOR = 1e-12

# Dormand-Prince 5(4)
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_A = [np.array(row) for row in _A]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


class IntegrationError(RuntimeError):
    """Step-size underflow or a non-finite state."""


class ConvergenceError(RuntimeError):
    """No equilibrium reached within the time budget."""


@dataclass(frozen=True)
class Controls:
    rtol: float = 1e-9
    atol: float = 1e-12
    eps_clip: float = EPS_CLIP
    fixed_step: float | None = None
    max_steps: int = 2_000_000
    h_min: float = 1e-14
    tol_eq: float = TOL_EQ
    newton_switch: float = 1e-6
    t_budget: float = 1e4


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    accepted: int = 0
    rejected: int = 0
    max_error: float = 0.0
    species: tuple[str, ...] = ()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = self.species or tuple(str(i + 1) for i in range(self.states.shape[1]))
        w.writerow(["t"] + [f"x_{s}" for s in names])
        for t, x in zip(self.times, self.states):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in x])
        return buf.getvalue()


def _initial_step(f, t, y, f0, rtol, atol, t_end):
    scale = atol + rtol * np.abs(y)
    d0 = np.sqrt(np.mean((y / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h, t_end - t)


def integrate_rhs(f: Callable[[np.ndarray], np.ndarray], x0: Sequence[float], t_end: float,
                  controls: Controls = Controls(), t_eval: Sequence[float] | None = None,
                  stop: Callable[[float, np.ndarray], bool] | None = None) -> Trajectory:
    """Adaptive Dormand-Prince integration of an autonomous field that must stay nonnegative.

    Steps that would push a component below ``-eps_clip`` are rejected and
    retried with half the step; components in ``[-eps_clip, 0)`` are clipped.
    With ``t_eval`` the solver lands exactly on those times and records only
    them (plus ``t = 0``); otherwise every accepted step is recorded.
    ``stop(t, y)`` ends integration early after an accepted step.
    """
    y = np.array(x0, dtype=float)
    if np.any(y < 0):
        raise ValueError("initial state must be nonnegative")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    marks = sorted(float(t) for t in t_eval) if t_eval is not None else None
    if marks and (marks[0] < 0 or marks[-1] > t_end + 1e-12):
        raise ValueError("t_eval outside [0, t_end]")

    t = 0.0
    times, states = [0.0], [y.copy()]
    k1 = f(y)
    fixed = controls.fixed_step
    h = fixed if fixed else _initial_step(f, t, y, k1, controls.rtol, controls.atol, t_end)
    accepted = rejected = 0
    max_err = 0.0
    mark_idx = 0
    if marks:
        while mark_idx < len(marks) and marks[mark_idx] <= 0.0:
            mark_idx += 1
    K = np.empty((7, y.size))

    while t < t_end:
        if accepted + rejected > controls.max_steps:
            raise IntegrationError(f"step budget exhausted at t={t:.6g}")
        target = marks[mark_idx] if marks and mark_idx < len(marks) else t_end
        h = min(h, target - t)
        if h < controls.h_min * max(1.0, abs(t)) and target - t > h:
            raise IntegrationError(f"step size underflow at t={t:.6g}, state={y.tolist()}")
        K[0] = k1
        for s in range(1, 7):
            K[s] = f(y + h * (_A[s] @ K[:s]))
        y_new = y + h * (_B5 @ K)
        if not np.all(np.isfinite(y_new)):
            raise IntegrationError(f"non-finite state at t={t:.6g}")
        if fixed:
            err = 0.0
        else:
            scale = controls.atol + controls.rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = float(np.sqrt(np.mean((h * (_E @ K) / scale) ** 2)))
        if np.any(y_new < -controls.eps_clip):
            rejected += 1
            if fixed:
                raise IntegrationError(f"fixed step left the orthant at t={t:.6g}")
            h *= 0.5
            continue
        if err > 1.0:
            rejected += 1
            h *= max(0.2, 0.9 * err ** -0.2)
            continue
        accepted += 1
        max_err = max(max_err, err)
        t_new = t + h
        if abs(t_new - target) <= 1e-12 * max(1.0, abs(target)):
            t_new = target
        clipped = y_new < 0
        if np.any(clipped):
            y_new[clipped] = 0.0
            k1 = f(y_new)
        else:
            k1 = K[6]
        t, y = t_new, y_new
        hit = marks is not None and mark_idx < len(marks) and t == marks[mark_idx]
        if marks is None or hit:
            times.append(t)
            states.append(y.copy())
            if hit:
                mark_idx += 1
        if stop is not None and stop(t, y):
            if marks is not None and times[-1] != t:
                times.append(t)
                states.append(y.copy())
            break
        if not fixed:
            h *= min(5.0, max(0.2, 0.9 * err ** -0.2)) if err > 0 else 5.0
    return Trajectory(np.array(times), np.array(states), accepted, rejected, max_err)


def integrate(model: KineticModel, x0: Sequence[float], t_end: float,
              controls: Controls = Controls(), t_eval: Sequence[float] | None = None) -> Trajectory:
    """Solve ``x' = Gamma v(x)`` from ``x0`` up to ``t_end``."""
    if len(x0) != model.network.m:
        raise ValueError("x0 length does not match species count")
    traj = integrate_rhs(model.rhs, x0, t_end, controls, t_eval)
    traj.species = model.network.species
    return traj


def residual(model: KineticModel, x: np.ndarray) -> float:
    return float(np.max(np.abs(model.rhs(np.asarray(x, dtype=float))), initial=0.0))


def _newton_polish(model: KineticModel, x_base: np.ndarray, tol: float, max_iter: int = 50):
    """Damped Newton for ``Q^T Gamma v(x_base + Q eta) = 0`` with Q an orthonormal basis of Im Gamma."""
    G = stoichiometric_matrix(model.network).to_numpy()
    U, s, _ = np.linalg.svd(G, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * max(1.0, s.max(initial=0.0))))
    if rank == 0:
        return x_base, residual(model, x_base)
    Q = U[:, :rank]
    x = x_base.copy()
    res = residual(model, x)
    for _ in range(max_iter):
        if res <= tol:
            break
        F = Q.T @ model.rhs(x)
        Jm = Q.T @ G @ jacobian(model, x) @ Q
        try:
            step = np.linalg.solve(Jm, -F)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(Jm, -F, rcond=None)[0]
        lam = 1.0
        while lam > 1e-8:
            x_try = x + lam * (Q @ step)
            if np.all(x_try >= 0):
                r_try = residual(model, x_try)
                if r_try < res:
                    x, res = x_try, r_try
                    break
            lam *= 0.5
        else:
            break
    return x, res


@dataclass
class EquilibriumRun:
    x: np.ndarray
    residual: float
    t_final: float
    max_norm: float
    conservation_drift: float
    steps: int


def solve_equilibrium(model: KineticModel, x0: Sequence[float], controls: Controls = Controls(),
                      r: Sequence[float] | None = None) -> EquilibriumRun:
    """Integrate towards equilibrium, then polish with Newton inside the stoichiometry class.

    Integration proceeds in growing windows until the residual
    ``||Gamma v(x)||_inf`` drops below ``newton_switch``; Newton then drives
    it below ``tol_eq``.  Drift and the largest sup-norm along the path are
    recorded against the covector ``r`` when given.
    """
    x = np.array(x0, dtype=float)
    if np.any(x < 0):
        raise ValueError("x0 must be nonnegative")
    rv = None if r is None else np.asarray(r, dtype=float)
    h0 = None if rv is None else float(rv @ x)
    t_total, steps = 0.0, 0
    max_norm = float(np.max(np.abs(x), initial=0.0))
    drift = 0.0
    window = 5.0
    res = residual(model, x)
    switch = max(controls.newton_switch, controls.tol_eq)
    while True:
        if res <= switch:
            xp, rp = _newton_polish(model, x, controls.tol_eq)
            if rp <= controls.tol_eq:
                if rv is not None:
                    drift = max(drift, abs(float(rv @ xp) - h0))
                return EquilibriumRun(xp, rp, t_total, max(max_norm, float(np.max(xp, initial=0.0))), drift, steps)
        if t_total >= controls.t_budget:
            raise ConvergenceError(f"no equilibrium within t={t_total:g}; last residual {res:.3e}")
        traj = integrate_rhs(model.rhs, x, window, controls,
                             stop=lambda t, y: residual(model, y) <= switch / 10)
        steps += traj.accepted
        t_total += float(traj.times[-1])
        max_norm = max(max_norm, float(np.max(np.abs(traj.states))))
        if rv is not None:
            drift = max(drift, float(np.max(np.abs(traj.states @ rv - h0))))
        x = traj.states[-1]
        res = residual(model, x)
        window = min(window * 2, controls.t_budget)


def find_equilibrium(model: KineticModel, x0: Sequence[float], controls: Controls = Controls()) -> np.ndarray:
    return solve_equilibrium(model, x0, controls).x


def _float_r(r) -> np.ndarray:
    return np.array([float(v) for v in r])


@dataclass
class ClassExperimentReport:
    h: float
    equilibrium: list[float]
    final_distances: list[float]
    max_pairwise_distance: float
    conservation_drifts: list[float]
    bounded: bool
    converged: bool
    seed: int
    count: int
    tol_conv: float = TOL_CONV
    tol_cons: float = TOL_CONS

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


def sample_class(G: np.ndarray, r: np.ndarray, x_ref: np.ndarray, count: int,
                 rng: np.random.Generator, max_attempts: int | None = None) -> np.ndarray:
    """Points ``x_ref + Gamma xi >= 0`` spread over the class of ``x_ref``.

    Proposals are drawn on ``{x >= 0 : r.x = h}`` and projected onto the
    coset ``x_ref + Im Gamma``; proposals that leave the orthant are rejected.
    """
    h = float(r @ x_ref)
    m = len(x_ref)
    out = []
    attempts = 0
    limit = max_attempts if max_attempts is not None else 100 * max(count, 1)
    while len(out) < count:
        attempts += 1
        if attempts > limit:
            raise RuntimeError(f"class sampling failed: {len(out)} of {count} admissible points")
        w = rng.dirichlet(np.ones(m)) * h / r
        xi = np.linalg.lstsq(G, w - x_ref, rcond=None)[0]
        x = x_ref + G @ xi
        if np.all(x >= -EPS_CLIP):
            out.append(np.maximum(x, 0.0))
    return np.array(out).reshape(count, m)


def class_convergence_experiment(model: KineticModel, cert, x_ref: Sequence[float], count: int,
                                 seed: int = 0, controls: Controls = Controls(),
                                 tol_conv: float = TOL_CONV, tol_cons: float = TOL_CONS) -> ClassExperimentReport:
    """Run ``count`` initial conditions of one class to equilibrium and compare the endpoints."""
    if not cert.certified:
        raise ValueError("class experiment requires a certified network")
    x_ref = np.asarray(x_ref, dtype=float)
    if np.any(x_ref < 0):
        raise ValueError("x_ref must be nonnegative")
    r = _float_r(cert.r)
    G = stoichiometric_matrix(model.network).to_numpy()
    rng = np.random.default_rng(seed)
    h = float(r @ x_ref)
    starts = sample_class(G, r, x_ref, count, rng)
    bound = h / float(np.min(r)) if h > 0 else 0.0
    finals, drifts, bounded = [], [], True
    for x0 in starts:
        run = solve_equilibrium(model, x0, controls, r)
        finals.append(run.x)
        drifts.append(max(run.conservation_drift, abs(float(r @ run.x) - h)))
        if run.max_norm > bound * (1 + 1e-9) + 1e-12:
            bounded = False
    finals_arr = np.array(finals)
    eq = finals_arr.mean(axis=0)
    dists = [float(np.max(np.abs(x - eq))) for x in finals_arr]
    pair = 0.0
    for a, b in itertools.combinations(range(count), 2):
        pair = max(pair, float(np.max(np.abs(finals_arr[a] - finals_arr[b]))))
    converged = pair <= tol_conv and all(d <= tol_cons * (1 + abs(h)) for d in drifts) and bounded
    return ClassExperimentReport(h, eq.tolist(), dists, pair, drifts, bounded, converged, seed, count,
                                 tol_conv, tol_cons)


def float_cone_member(lam: np.ndarray, y: np.ndarray, tau: float = TAU_K, floor: float = 0.0) -> bool:
    """``y`` in the cone of ``lam``'s columns up to an l1 slack of ``tau * ||y||_1``.

    ``y`` with ``||y||_1 <= floor`` is treated as zero; normalizing pure
    round-off would otherwise point it in an arbitrary direction.
    """
    norm = float(np.sum(np.abs(y)))
    if norm <= floor:
        return True
    m, N = lam.shape
    yn = y / norm
    A = np.hstack([lam, np.eye(m), -np.eye(m)])
    cost = np.concatenate([np.zeros(N), np.ones(2 * m)])
    res = linprog(cost, A_eq=A, b_eq=yn, bounds=(0, None), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        return False
    return float(res.fun) <= tau


def float_interior_margin(lam: np.ndarray, y: np.ndarray) -> float:
    """Largest ``delta`` with ``y/||y||_1 - delta * lam 1`` in the cone; 0 when there is none."""
    norm = float(np.sum(np.abs(y)))
    if norm == 0.0:
        return 0.0
    m, N = lam.shape
    A = np.hstack([lam, lam.sum(axis=1, keepdims=True)])
    cost = np.zeros(N + 1)
    cost[-1] = -1.0
    res = linprog(cost, A_eq=A, b_eq=y / norm, bounds=(0, None), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        return 0.0
    return float(-res.fun)


@dataclass
class OrderReport:
    pairs: int
    samples: int
    horizon: float
    violations: int
    interior_failures: int
    min_margin: float
    seed: int
    tau: float
    violation_details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.interior_failures == 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


def cone_float_matrix(cone: CubicCone) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in cone.lam])


def order_preservation_experiment(model: KineticModel, cone: CubicCone | np.ndarray, pair_count: int,
                                  horizon: float, samples: int = 20, seed: int = 0,
                                  tau: float = TAU_K, controls: Controls = Controls(),
                                  zero_pairs: bool = False, check_interior: bool = True) -> OrderReport:
    """Integrate ordered pairs ``x1 = x0 + Lambda z`` and test the order at sampled times.

    Both trajectories are integrated as one stacked system so they share
    the step sequence.  ``cone`` may also be a raw float generator matrix,
    which is how a corrupted cone is fed in as a negative control.
    """
    lam = cone_float_matrix(cone) if isinstance(cone, CubicCone) else np.asarray(cone, dtype=float)
    m, N = lam.shape
    rng = np.random.default_rng(seed)
    t_eval = np.linspace(0.0, horizon, samples + 1)[1:]
    violations = interior_failures = 0
    min_margin = np.inf
    details = []

    def stacked(y):
        return np.concatenate([model.rhs(y[:m]), model.rhs(y[m:])])

    for p in range(pair_count):
        z = np.zeros(N) if zero_pairs else rng.uniform(0.0, 1.0, N)
        step = lam @ z
        x0 = rng.uniform(0.0, 1.0, m) + np.maximum(0.0, -step)
        x1 = x0 + step
        x1[x1 < 0] = 0.0
        interior = bool(np.all(x0 > 0)) and not zero_pairs
        traj = integrate_rhs(stacked, np.concatenate([x0, x1]), horizon, controls, t_eval)
        for t, y in zip(traj.times[1:], traj.states[1:]):
            diff = y[m:] - y[:m]
            floor = ROUNDOFF_FLOOR * (1.0 + float(np.sum(np.abs(y))))
            if not float_cone_member(lam, diff, tau, floor):
                violations += 1
                details.append({"pair": p, "t": float(t)})
                continue
            if interior and check_interior and float(np.sum(np.abs(diff))) > floor:
                margin = float_interior_margin(lam, diff)
                min_margin = min(min_margin, margin)
                if not margin > 0:
                    interior_failures += 1
    return OrderReport(pair_count, samples, horizon, violations, interior_failures,
                       float(min_margin) if np.isfinite(min_margin) else 0.0, seed, tau, details[:20])


@dataclass
class BoundaryReport:
    faces: int
    points_per_face: int
    non_repelling: list = field(default_factory=list)
    flux_violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.non_repelling and not self.flux_violations


def boundary_repulsion_experiment(model: KineticModel, points_per_face: int = 50, seed: int = 0,
                                  scale: float = 2.0) -> BoundaryReport:
    """Sample each nontrivial face and check a zeroed species is produced.

    Also checks that no reaction drains a species already at zero, i.e.
    ``Gamma_ij v_j(x) >= 0`` whenever ``x_i = 0``.
    """
    net = model.network
    G = stoichiometric_matrix(net).to_numpy()
    rng = np.random.default_rng(seed)
    m = net.m
    report = BoundaryReport(0, points_per_face)
    for mask in range(1, (1 << m) - 1):
        Z = [i for i in range(m) if (mask >> i) & 1]
        S = [i for i in range(m) if not (mask >> i) & 1]
        report.faces += 1
        for _ in range(points_per_face):
            x = np.zeros(m)
            x[S] = rng.uniform(0.05, scale, len(S))
            v = model._rates(x)
            flux = G[Z] * v
            if np.any(flux < 0):
                report.flux_violations.append({"zero_set": Z, "x": x.tolist()})
            if not np.any(flux.sum(axis=1) > 0):
                report.non_repelling.append({"zero_set": Z, "x": x.tolist()})
    return report
