"""Centralized saddle-point solver for hard-margin and nu-SVM.

The saddle problem is max over the direction w of the min over dual
weights (eta, xi) of  w^T A eta - w^T B xi - 0.5 ||w||^2,  with the dual
weights on the simplex (hard margin) or the nu-capped simplex (nu mode),
entropy-regularized with weight gamma.  One iteration touches a single
random coordinate of w and performs a multiplicative-weights update of
the duals, at O(n1 + n2) cost via incremental inner-product caches.

Dual weights are kept in log domain alongside their linear images; only
normalizers and cap statistics exponentiate, always after max-shifting.
"""
from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .data_model import Dataset
from .errors import ConfigError, NumericalError
from .preprocess import TransformedData, TransformSpec, apply_transform, next_pow2, transform_points
from .rng import INDEX_SAMPLING, substream

# Tolerance on the total excess mass when deciding a capped vector is
# feasible; also the distributed clip-round termination test.
CLIP_TOL = 1e-12

# Half-squared distance below which a hard-margin run is reported as
# (numerically) non-separable rather than converged.
NONSEPARABLE_TOL = 1e-12


class Mode(str, enum.Enum):
    HARD_MARGIN = "hard-margin"
    NU = "nu"


@dataclass(frozen=True)
class SolverParams:
    epsilon: float
    beta: float
    nu: float | None
    gamma: float
    q: int
    tau: float
    sigma: float
    theta: float
    mode: Mode
    d_pad: int
    n: int
    n1: int
    n2: int
    # cached Phi coefficients: exponent = a_hist*log(eta) - c1*<...>
    dtau: float = field(default=0.0)   # d / tau
    c1: float = field(default=0.0)     # 1 / (gamma + d/tau)
    a_hist: float = field(default=0.0)  # c1 * d/tau


def derive_params(epsilon: float, beta: float, nu: float | None,
                  n: int, n1: int, n2: int, d_pad: int, mode: Mode) -> SolverParams:
    """Step sizes and momentum from (epsilon, beta) and the data shape."""
    if not 0.0 < epsilon < 1.0:
        raise ConfigError("epsilon must lie in (0, 1)")
    if not 0.0 < beta <= 1.0:
        raise ConfigError("beta must lie in (0, 1]")
    if d_pad < 1 or d_pad & (d_pad - 1):
        raise ConfigError("d_pad must be a power of two")
    if mode == Mode.NU:
        if nu is None:
            raise ConfigError("nu mode requires a nu value")
        bound = 1.0 / min(n1, n2)
        if nu < bound:
            raise ConfigError(
                f"nu = {nu} is infeasible; it must be at least 1/min(n1, n2) = {bound}"
            )
        if nu > 1.0:
            raise ConfigError("nu must be at most 1")
    else:
        nu = None
    log_n = math.log(n)
    gamma = epsilon * beta / (2.0 * log_n)
    q = max(1, math.ceil(math.sqrt(log_n)))
    tau = 0.5 / q * math.sqrt(d_pad / gamma)
    sigma = 0.5 / q * math.sqrt(d_pad * gamma)
    theta = 1.0 - 1.0 / (d_pad + q * math.sqrt(d_pad / gamma))
    dtau = d_pad / tau
    c1 = 1.0 / (gamma + dtau)
    return SolverParams(
        epsilon=epsilon, beta=beta, nu=nu, gamma=gamma, q=q, tau=tau,
        sigma=sigma, theta=theta, mode=mode, d_pad=d_pad, n=n, n1=n1, n2=n2,
        dtau=dtau, c1=c1, a_hist=c1 * dtau,
    )


class SaddleState:
    """Iterate triple (w, eta, xi) with one step of history and caches."""

    def __init__(self, params: SolverParams):
        self.t = 0
        self.w = np.zeros(params.d_pad)
        n1, n2 = params.n1, params.n2
        self.eta_cur = np.full(n1, 1.0 / n1)
        self.eta_prev = self.eta_cur.copy()
        self.log_eta_cur = np.full(n1, -math.log(n1))
        self.log_eta_prev = self.log_eta_cur.copy()
        self.xi_cur = np.full(n2, 1.0 / n2)
        self.xi_prev = self.xi_cur.copy()
        self.log_xi_cur = np.full(n2, -math.log(n2))
        self.log_xi_prev = self.log_xi_cur.copy()
        self.ip_p = np.zeros(n1)  # ip_p[i] = <w, Xp column i>
        self.ip_m = np.zeros(n2)


def init_state(params: SolverParams) -> SaddleState:
    return SaddleState(params)


def phi_log_update(log_cur, ip, xrow, params: SolverParams, ddw: float,
                   sign: float) -> np.ndarray:
    """Unnormalized log-domain Phi exponents for one dual block."""
    out = np.empty_like(log_cur)
    kernels.phi_log_weights(log_cur, ip, xrow, params.a_hist, params.c1,
                            ddw, sign, out)
    return out


def phi_update(state: SaddleState, params: SolverParams, data: TransformedData,
               w_new: float, w_old: float, i_star: int):
    """Unnormalized dual weights after a single-coordinate w change.

    Returned weights are scaled by an arbitrary common factor (the max log
    weight is subtracted before exponentiation); normalize with
    ``project_simplex_normalize``.
    """
    ddw = params.d_pad * (w_new - w_old)
    lw_eta = phi_log_update(state.log_eta_cur, state.ip_p, data.Xp[i_star],
                            params, ddw, 1.0)
    lw_xi = phi_log_update(state.log_xi_cur, state.ip_m, data.Xm[i_star],
                           params, ddw, -1.0)
    return np.exp(lw_eta - lw_eta.max()), np.exp(lw_xi - lw_xi.max())


def project_simplex_normalize(weights: np.ndarray) -> np.ndarray:
    """Divide positive weights by their sum."""
    total = float(np.sum(weights))
    if not np.isfinite(total) or total <= 0.0:
        raise NumericalError("degenerate weights: zero or non-finite normalizer")
    return weights / total


def _check_nu(n: int, nu: float) -> None:
    if nu * n < 1.0 - 1e-12:
        raise ConfigError(f"nu = {nu} is infeasible for a length-{n} vector")


def project_capped_loop(weights: np.ndarray, nu: float, *,
                        tol: float = CLIP_TOL,
                        return_passes: bool = False):
    """Iterative clip-and-rescale projection onto the nu-capped simplex.

    Each pass clamps entries above the cap and scales the remaining mass
    up; with exact arithmetic at most ceil(1/nu) passes run.
    """
    _check_nu(len(weights), nu)
    p = np.array(weights, dtype=np.float64)
    passes = 0
    max_passes = math.ceil(1.0 / nu) + 1
    while True:
        varsigma = float(np.sum(p[p > nu] - nu))
        if varsigma <= tol:
            break
        omega = float(np.sum(p[p < nu]))
        over = p >= nu
        p[over] = nu
        if omega > 0.0:
            p[~over] *= 1.0 + varsigma / omega
        passes += 1
        if passes > max_passes:
            raise NumericalError("capped projection failed to terminate")
    return (p, passes) if return_passes else p


def project_capped_sorted(weights: np.ndarray, nu: float) -> np.ndarray:
    """Sort-based projection onto the nu-capped simplex, O(n log n).

    With entries sorted ascending, sigma_i is the excess mass of the
    suffix starting at i and omega_i the mass before it; the threshold
    index is the largest i with sigma_i >= 0 whose predecessor stays
    below the cap after rescaling.  Ties broken by original index for
    determinism.
    """
    n = len(weights)
    _check_nu(n, nu)
    order = np.lexsort((np.arange(n), weights))
    p = np.asarray(weights, dtype=np.float64)[order]
    # sigma[i] = sum_{j >= i} (p[j] - nu), omega[i] = sum_{j < i} p[j], 0-based
    suffix = np.cumsum((p - nu)[::-1])[::-1]
    prefix = np.concatenate(([0.0], np.cumsum(p[:-1])))
    i_star = None
    factor = 1.0
    for i in range(n - 1, -1, -1):
        if suffix[i] < 0.0:
            continue
        if prefix[i] > 0.0:
            f = 1.0 + suffix[i] / prefix[i]
            ok = p[i - 1] * f < nu if i > 0 else True
        else:
            f = 1.0
            ok = True
        if ok:
            i_star = i
            factor = f
            break
    out_sorted = p.copy()
    if i_star is not None:
        out_sorted[:i_star] *= factor
        out_sorted[i_star:] = nu
    out = np.empty(n)
    out[order] = out_sorted
    return out


def iterate(state: SaddleState, data: TransformedData, params: SolverParams,
            rng: np.random.Generator) -> int:
    """One full iteration; returns the clip pass count (0 in hard margin).

    The exact sequence (and its floating-point order) is shared with the
    distributed simulator, which reproduces it bit for bit at k = 1.
    """
    d = params.d_pad
    i_star = int(rng.integers(d))
    xp_row = data.Xp[i_star]
    xm_row = data.Xm[i_star]

    delta_p = kernels.extrap_dot(xp_row, state.eta_cur, state.eta_prev, params.theta)
    delta_m = kernels.extrap_dot(xm_row, state.xi_cur, state.xi_prev, params.theta)

    w_old = state.w[i_star]
    w_new = (w_old + params.sigma * (delta_p - delta_m)) / (params.sigma + 1.0)
    state.w[i_star] = w_new
    dw = w_new - w_old
    ddw = d * dw

    lw_eta = phi_log_update(state.log_eta_cur, state.ip_p, xp_row, params, ddw, 1.0)
    lw_xi = phi_log_update(state.log_xi_cur, state.ip_m, xm_row, params, ddw, -1.0)
    z_p = kernels.sum_exp(lw_eta)
    z_m = kernels.sum_exp(lw_xi)
    if z_p <= 0.0 or z_m <= 0.0 or not (np.isfinite(z_p) and np.isfinite(z_m)):
        raise NumericalError("dual normalizer degenerated")
    eta_new = np.empty_like(lw_eta)
    xi_new = np.empty_like(lw_xi)
    kernels.finish_weights(lw_eta, math.log(z_p), eta_new)
    kernels.finish_weights(lw_xi, math.log(z_m), xi_new)

    passes = 0
    if params.mode == Mode.NU:
        nu = params.nu
        log_nu = math.log(nu)
        max_passes = math.ceil(1.0 / nu) + 1
        while True:
            sp, op = kernels.cap_stats(eta_new, nu)
            sm, om = kernels.cap_stats(xi_new, nu)
            if abs(sp) <= CLIP_TOL and abs(sm) <= CLIP_TOL:
                break
            if abs(sp) > CLIP_TOL:
                _apply_clip(eta_new, lw_eta, nu, log_nu, sp, op)
            if abs(sm) > CLIP_TOL:
                _apply_clip(xi_new, lw_xi, nu, log_nu, sm, om)
            passes += 1
            if passes > max_passes:
                raise NumericalError("cap projection loop failed to terminate")

    state.eta_prev, state.eta_cur = state.eta_cur, eta_new
    state.log_eta_prev, state.log_eta_cur = state.log_eta_cur, lw_eta
    state.xi_prev, state.xi_cur = state.xi_cur, xi_new
    state.log_xi_prev, state.log_xi_cur = state.log_xi_cur, lw_xi

    kernels.ip_update(state.ip_p, xp_row, dw)
    kernels.ip_update(state.ip_m, xm_row, dw)
    state.t += 1
    return passes


def _apply_clip(lin, lw, nu, log_nu, varsigma, omega):
    """Shared clip-pass arithmetic (also used per client in the simulator)."""
    if omega > 0.0:
        scale = 1.0 + varsigma / omega
        log_scale = math.log1p(varsigma / omega)
    else:
        scale, log_scale = 1.0, 0.0
    kernels.cap_apply(lin, lw, nu, log_nu, scale, log_scale)


def refresh_caches(state: SaddleState, data: TransformedData) -> None:
    """Recompute the inner-product caches from scratch."""
    state.ip_p = data.Xp.T @ state.w
    state.ip_m = data.Xm.T @ state.w


def dual_objective_g(w: np.ndarray, data: TransformedData,
                     params: SolverParams) -> float:
    """g(w) = min over the dual domain of w^T A eta - w^T B xi - ||w||^2/2."""
    ips_p = data.Xp.T @ w
    ips_m = data.Xm.T @ w
    if params.mode == Mode.NU:
        lo = _capped_extreme(np.sort(ips_p), params.nu)
        hi = -_capped_extreme(np.sort(-ips_m), params.nu)
    else:
        lo = float(np.min(ips_p))
        hi = float(np.max(ips_m))
    return lo - hi - 0.5 * float(np.dot(w, w))


def _capped_extreme(sorted_vals: np.ndarray, nu: float) -> float:
    """Min of <v, eta> over the capped simplex: nu on the smallest entries.

    The floor(1/nu) smallest values get weight nu; the leftover mass goes
    on the next one.
    """
    n = len(sorted_vals)
    m = min(int(math.floor(1.0 / nu + 1e-12)), n)
    total = nu * float(np.sum(sorted_vals[:m]))
    remainder = 1.0 - m * nu
    if remainder > 1e-15 and m < n:
        total += remainder * float(sorted_vals[m])
    return total


def primal_distance(eta: np.ndarray, xi: np.ndarray,
                    data: TransformedData) -> float:
    """Half the squared distance between the weighted class centroids."""
    diff = data.Xp @ eta - data.Xm @ xi
    return 0.5 * float(np.dot(diff, diff))


@dataclass
class Hyperplane:
    w: np.ndarray
    b: float
    margin: float


def recover_hyperplane(w: np.ndarray, eta: np.ndarray, xi: np.ndarray,
                       data: TransformedData) -> Hyperplane:
    """Offset and margin in transformed coordinates.

    The hyperplane bisects the segment between the optimal hull points,
    so b = <w, A eta + B xi>/2 and the margin is half the hull distance.
    """
    b = 0.5 * float(np.dot(w, data.Xp @ eta + data.Xm @ xi))
    margin = 0.5 * float(np.linalg.norm(data.Xp @ eta - data.Xm @ xi))
    return Hyperplane(w=w, b=b, margin=margin)


def predict(spec: TransformSpec, w: np.ndarray, b: float,
            X_raw: np.ndarray) -> np.ndarray:
    """Classify raw-space points by applying the fitted transform first."""
    Z = transform_points(spec, X_raw)
    scores = Z @ w - b
    return np.where(scores >= 0.0, 1, -1)


@dataclass
class SolveConfig:
    epsilon: float = 1e-3
    beta: float = 0.1
    nu: float | None = None
    alpha: float | None = None  # nu = 1/(alpha * min(n1, n2)) when given
    mode: Mode = Mode.HARD_MARGIN
    seed: int = 0
    max_blocks: int = 200
    block_size: int | None = None  # override the default T

    def resolve_nu(self, n1: int, n2: int) -> float | None:
        if self.mode != Mode.NU:
            return None
        if self.nu is not None:
            return self.nu
        if self.alpha is not None:
            return 1.0 / (self.alpha * min(n1, n2))
        raise ConfigError("nu mode requires either nu or alpha")


@dataclass
class Solution:
    """Converged direction, offset, duals, and convergence diagnostics.

    ``w`` lives in transformed coordinates; classify new points via
    ``predict`` with the attached TransformSpec.  ``primal`` is the
    half-squared hull distance in transformed (scaled) space;
    ``distance_input`` undoes the norm scaling so it is comparable across
    preprocessing choices.
    """
    w: np.ndarray
    b: float
    eta: np.ndarray
    xi: np.ndarray
    primal: float
    dual_value: float
    gap: float
    margin: float
    distance: float        # hull distance, transformed space
    distance_input: float  # hull distance in input-data units
    iterations: int
    wall_time: float
    status: str
    spec: TransformSpec
    params: SolverParams
    trace: list


def default_block_size(params: SolverParams) -> int:
    """Objective-check period: T = ceil(d + sqrt(d/(eps*beta)))."""
    d = params.d_pad
    return math.ceil(d + math.sqrt(d / (params.epsilon * params.beta)))


def build_solution(state: SaddleState, data: TransformedData,
                   params: SolverParams, trace: list, status: str,
                   t_start: float) -> Solution:
    """Assemble a Solution from a final state (shared with the simulator)."""
    primal = primal_distance(state.eta_cur, state.xi_cur, data)
    dual = dual_objective_g(state.w, data, params)
    plane = recover_hyperplane(state.w, state.eta_cur, state.xi_cur, data)
    distance = math.sqrt(max(2.0 * primal, 0.0))
    return Solution(
        w=state.w, b=plane.b, eta=state.eta_cur, xi=state.xi_cur,
        primal=primal, dual_value=dual, gap=primal - dual,
        margin=plane.margin, distance=distance,
        distance_input=distance / data.spec.scale,
        iterations=state.t, wall_time=time.perf_counter() - t_start,
        status=status, spec=data.spec, params=params, trace=trace,
    )


def checkpoint_row(t: int, primal: float, dual: float, t_start: float) -> dict:
    return {
        "iter": t,
        "primal": primal,
        "dual": dual,
        "gap": primal - dual,
        "elapsed_ms": (time.perf_counter() - t_start) * 1e3,
        "scalars_up": 0,
        "scalars_down": 0,
    }


class BestTracker:
    """Keeps the lowest-primal checkpoint iterate seen so far.

    The raw iterate oscillates between checkpoints (multiplicative-weights
    duals never settle exactly), so the returned solution is the best
    checkpoint, not the last one.  Shared with the distributed simulator
    so both paths stay bit-identical.
    """

    def __init__(self):
        self.primal = math.inf
        self.state: SaddleState | None = None

    def offer(self, state: SaddleState, primal: float) -> None:
        if primal < self.primal:
            self.primal = primal
            snap = SaddleState.__new__(SaddleState)
            snap.t = state.t
            snap.w = state.w.copy()
            snap.eta_cur = state.eta_cur.copy()
            snap.xi_cur = state.xi_cur.copy()
            self.state = snap


def solve(data: Dataset, config: SolveConfig) -> Solution:
    """Run the full pipeline: transform, iterate in blocks, stop on a
    small relative change of the primal objective between consecutive
    checks, and return the best checkpoint iterate."""
    t_start = time.perf_counter()
    tdata = apply_transform(data, config.seed)
    nu = config.resolve_nu(data.n1, data.n2)
    params = derive_params(config.epsilon, config.beta, nu, data.n,
                           data.n1, data.n2, tdata.spec.d_pad, config.mode)
    rng = substream(config.seed, INDEX_SAMPLING)
    state = init_state(params)
    block = config.block_size or default_block_size(params)
    trace = []
    best = BestTracker()
    prev_obj = None
    status = "max_blocks"
    for _ in range(config.max_blocks):
        for _ in range(block):
            iterate(state, tdata, params, rng)
        primal = primal_distance(state.eta_cur, state.xi_cur, tdata)
        dual = dual_objective_g(state.w, tdata, params)
        trace.append(checkpoint_row(state.t, primal, dual, t_start))
        best.offer(state, primal)
        if primal < NONSEPARABLE_TOL:
            status = "nonseparable"
            break
        if prev_obj is not None and abs(prev_obj - primal) < config.epsilon * primal:
            status = "converged"
            break
        prev_obj = primal
    final = best.state if best.state is not None else state
    return build_solution(final, tdata, params, trace, status, t_start)
