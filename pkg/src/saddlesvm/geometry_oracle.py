"""Ground-truth polytope-distance machinery.

``gilbert_solve`` is the classical baseline: iterate toward the minimum
norm point of the Minkowski-difference polytope {A eta - B xi}.

``fw_oracle`` is the high-precision verifier: away-step Frank-Wolfe on
0.5||A eta - B xi||^2 over the product of (possibly nu-capped) simplices.
Its linear oracle is exact and the final Frank-Wolfe gap certifies
optimality, so no external QP solver is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .preprocess import TransformedData

# Squared norms below this are treated as "distance indistinguishable
# from zero", i.e. the classes are not separable at working precision.
_DEGENERATE_SQ = 1e-18


@dataclass
class OracleResult:
    eta: np.ndarray
    xi: np.ndarray
    distance: float
    half_sq: float
    gap_certificate: float
    iterations: int
    status: str = "converged"  # or "nonseparable" / "max_iter"


class OracleIterationCap(NumericalError):
    """Iteration cap exceeded; carries the best result found so far."""

    def __init__(self, best: OracleResult):
        super().__init__("oracle iteration cap exceeded")
        self.best = best


def gilbert_solve(data: TransformedData, epsilon: float,
                  max_iter: int = 2_000_000) -> OracleResult:
    """Gilbert's algorithm for the distance between the two hulls.

    Maintains z = A eta - B xi; each step moves toward the extreme vertex
    of the difference polytope in direction -z with an exact line search,
    stopping once <z, z - v> <= epsilon ||z||^2.
    """
    Xp, Xm = data.Xp, data.Xm
    n1, n2 = Xp.shape[1], Xm.shape[1]
    eta = np.zeros(n1)
    xi = np.zeros(n2)
    eta[0] = 1.0
    xi[0] = 1.0
    z = Xp[:, 0] - Xm[:, 0]
    status = "max_iter"
    it = 0
    for it in range(1, max_iter + 1):
        zz = float(np.dot(z, z))
        if zz < _DEGENERATE_SQ:
            status = "nonseparable"
            break
        scores_p = Xp.T @ z
        scores_m = Xm.T @ z
        i = int(np.argmin(scores_p))
        j = int(np.argmax(scores_m))
        v = Xp[:, i] - Xm[:, j]
        slack = zz - float(np.dot(z, v))  # <z, z - v>
        if slack <= epsilon * zz:
            status = "converged"
            break
        dvec = v - z
        denom = float(np.dot(dvec, dvec))
        if denom == 0.0:
            status = "converged"
            break
        t = min(1.0, max(0.0, slack / denom))
        z = z + t * dvec
        eta *= 1.0 - t
        eta[i] += t
        xi *= 1.0 - t
        xi[j] += t
    dist = float(np.linalg.norm(Xp @ eta - Xm @ xi))
    return OracleResult(eta=eta, xi=xi, distance=dist, half_sq=0.5 * dist * dist,
                        gap_certificate=float("nan"), iterations=it,
                        status=status)


def _lmo_simplex(grad: np.ndarray) -> np.ndarray:
    s = np.zeros_like(grad)
    s[int(np.argmin(grad))] = 1.0
    return s


def _lmo_capped(grad: np.ndarray, nu: float) -> np.ndarray:
    """Exact linear minimization over the capped simplex: weight nu on the
    coordinates with smallest gradient, fractional remainder on the next."""
    n = len(grad)
    order = np.argsort(grad, kind="stable")
    s = np.zeros(n)
    m = min(int(math.floor(1.0 / nu + 1e-12)), n)
    s[order[:m]] = nu
    remainder = 1.0 - m * nu
    if remainder > 1e-15 and m < n:
        s[order[m]] = remainder
    return s


def fw_oracle(data: TransformedData, nu: float | None, tolerance: float,
              max_iter: int = 10_000_000, start: tuple | None = None) -> OracleResult:
    """Away-step Frank-Wolfe solve of the (reduced) hull distance.

    ``nu=None`` solves over the full simplices; otherwise over the
    nu-capped ones.  Terminates when the Frank-Wolfe gap is at most
    ``tolerance`` and returns the gap as a certificate (the optimum lies
    within ``gap_certificate`` of the returned objective value).
    """
    if tolerance <= 0.0:
        raise ValueError("tolerance must be positive")
    Xp, Xm = data.Xp, data.Xm
    n1, n2 = Xp.shape[1], Xm.shape[1]
    if nu is not None:
        if nu * min(n1, n2) < 1.0 - 1e-12 or nu > 1.0:
            raise NumericalError(f"infeasible nu = {nu}")
        lmo_p = lambda g: _lmo_capped(g, nu)
        lmo_m = lambda g: _lmo_capped(g, nu)
    else:
        lmo_p = _lmo_simplex
        lmo_m = _lmo_simplex

    if start is not None:
        eta0, xi0 = start
        eta = np.array(eta0, dtype=np.float64)
        xi = np.array(xi0, dtype=np.float64)
        atoms = {}  # starting interior: seed the active set with it as one atom
        atoms[(eta.tobytes(), xi.tobytes())] = [1.0, eta.copy(), xi.copy()]
    else:
        eta = np.full(n1, 1.0 / n1)
        xi = np.full(n2, 1.0 / n2)
        atoms = {(eta.tobytes(), xi.tobytes()): [1.0, eta.copy(), xi.copy()]}

    gap = float("inf")
    it = 0
    for it in range(1, max_iter + 1):
        u = Xp @ eta - Xm @ xi
        grad_p = Xp.T @ u
        grad_m = -(Xm.T @ u)
        s_p = lmo_p(grad_p)
        s_m = lmo_m(grad_m)
        gap = float(grad_p @ (eta - s_p) + grad_m @ (xi - s_m))
        if gap <= tolerance:
            break

        # Away atom: active atom most aligned with the gradient.
        away_key = max(
            atoms, key=lambda k: float(grad_p @ atoms[k][1] + grad_m @ atoms[k][2])
        )
        a_w, a_eta, a_xi = atoms[away_key]
        away_gap = float(grad_p @ (a_eta - eta) + grad_m @ (a_xi - xi))

        if gap >= away_gap or len(atoms) == 1:
            d_eta, d_xi = s_p - eta, s_m - xi
            t_max = 1.0
            step_key = (s_p.tobytes(), s_m.tobytes())
            away = False
        else:
            d_eta, d_xi = eta - a_eta, xi - a_xi
            t_max = a_w / (1.0 - a_w) if a_w < 1.0 else 0.0
            away = True

        du = Xp @ d_eta - Xm @ d_xi
        denom = float(du @ du)
        numer = -float(u @ du)
        if denom <= 0.0:
            t = t_max
        else:
            t = min(t_max, max(0.0, numer / denom))
        if t == 0.0 and not away:
            break  # no progress possible at working precision

        eta = eta + t * d_eta
        xi = xi + t * d_xi

        if away:
            for rec in atoms.values():
                rec[0] *= 1.0 + t
            a_rec = atoms[away_key]
            a_rec[0] -= t
            if a_rec[0] <= 1e-16:
                del atoms[away_key]
        else:
            if t >= 1.0:
                atoms = {}
            else:
                for rec in atoms.values():
                    rec[0] *= 1.0 - t
            rec = atoms.get(step_key)
            if rec is None:
                atoms[step_key] = [t if t < 1.0 else 1.0, s_p.copy(), s_m.copy()]
            else:
                rec[0] += t

        if it % 4096 == 0:
            # Rebuild the iterate from its atomic decomposition to cancel
            # floating-point drift (matters at 1e-10 tolerances).
            wsum = sum(rec[0] for rec in atoms.values())
            eta = sum(rec[0] * rec[1] for rec in atoms.values()) / wsum
            xi = sum(rec[0] * rec[2] for rec in atoms.values()) / wsum

    u = Xp @ eta - Xm @ xi
    dist = float(np.linalg.norm(u))
    result = OracleResult(eta=eta, xi=xi, distance=dist,
                          half_sq=0.5 * dist * dist, gap_certificate=gap,
                          iterations=it,
                          status="converged" if gap <= tolerance else "max_iter")
    if dist * dist < _DEGENERATE_SQ and nu is None:
        result.status = "nonseparable"
    if gap > tolerance and it >= max_iter:
        raise OracleIterationCap(result)
    return result
