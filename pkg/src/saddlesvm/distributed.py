"""Simulated distributed training with exact communication accounting.

One process plays the server and ``k`` clients.  Each client owns a
column slice of the transformed data, the dual-weight entries for those
columns, their inner-product caches, and a full replica of w.  Every
iteration exchanges only O(1) scalars per client:

  round 1  server -> clients : sampled coordinate i*            (1 down each)
  round 2  clients -> server : partial extrapolated deltas      (2 up each)
           server -> clients : aggregated deltas                (2 down each)
  round 3  clients -> server : partial dual normalizers         (2 up each)
           server -> clients : aggregated normalizers           (2 down each)

for 9k scalars per hard-margin iteration.  In nu mode each clip round
adds a 4-up/4-down cap-statistics exchange (8k scalars); the terminal
round, in which the aggregated excess is (numerically) zero and clients
skip the rescale, is exchanged and therefore metered too.

Aggregation always sums client contributions in ascending client order,
so a single-client run reproduces the centralized solver bit for bit and
multi-client runs differ from it only by float summation order.
"""
from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import saddle_core as core
from .backend import kernels
from .data_model import Dataset
from .errors import ConfigError, NumericalError, SimulationFault
from .preprocess import TransformedData, apply_transform
from .rng import INDEX_SAMPLING, PARTITION, substream

# Maximum allowed divergence between w replicas held by different clients.
REPLICA_TOL = 1e-12


class MessageKind(enum.Enum):
    PICK_INDEX = "pick-index"      # payload: (i_star,)
    CLIENT_DELTA = "client-delta"  # payload: (delta_plus, delta_minus)
    DELTA_BCAST = "delta-bcast"    # payload: (S.delta_plus, S.delta_minus)
    CLIENT_NORM = "client-norm"    # payload: (z_plus, z_minus)
    NORM_BCAST = "norm-bcast"      # payload: (S.z_plus, S.z_minus)
    CLIENT_CLIP = "client-clip"    # payload: (sig_p, om_p, sig_m, om_m)
    CLIP_BCAST = "clip-bcast"      # payload: (S.sig_p, S.om_p, S.sig_m, S.om_m)
    CHECKPOINT = "checkpoint"      # payload: (primal_part, dual_part)
    STOP_FLAG = "stop-flag"        # payload: (flag,)


@dataclass
class Message:
    kind: MessageKind
    payload: tuple
    sender: int    # -1 denotes the server
    receiver: int

    @property
    def scalars(self) -> int:
        return len(self.payload)


@dataclass
class CommStats:
    """Scalar traffic meter.  Checkpoint traffic is metered separately so
    the per-iteration closed form (9k, plus 8k per clip round) can be
    asserted exactly."""
    k: int
    iterations: int = 0
    scalars_up: int = 0
    scalars_down: int = 0
    checkpoint_up: int = 0
    checkpoint_down: int = 0
    clip_rounds: list = field(default_factory=list)  # rounds per nu iteration

    @property
    def total_scalars(self) -> int:
        return (self.scalars_up + self.scalars_down
                + self.checkpoint_up + self.checkpoint_down)


def partition(n1: int, n2: int, k: int, seed: int = 0,
              scheme: str = "round-robin") -> list:
    """Assign column indices of both classes to k clients.

    Returns a list of (idx_plus, idx_minus) integer-array pairs.  A client
    may end up with points from only one class (or, for extreme k, none).
    """
    if k < 1:
        raise ConfigError("k must be at least 1")
    if k > n1 + n2:
        raise ConfigError(f"k = {k} exceeds the number of points {n1 + n2}")
    idx_p = np.arange(n1)
    idx_m = np.arange(n2)
    if scheme == "round-robin":
        pass
    elif scheme == "contiguous":
        return [
            (np.array_split(idx_p, k)[c], np.array_split(idx_m, k)[c])
            for c in range(k)
        ]
    elif scheme == "random":
        rng = substream(seed, PARTITION)
        idx_p = rng.permutation(n1)
        idx_m = rng.permutation(n2)
    else:
        raise ConfigError(f"unknown partition scheme: {scheme!r}")
    return [(np.sort(idx_p[c::k]), np.sort(idx_m[c::k])) for c in range(k)]


class ClientState:
    """One client's shard: data columns, dual slices, caches, w replica."""

    def __init__(self, cid: int, tdata: TransformedData, idx_p: np.ndarray,
                 idx_m: np.ndarray, params: core.SolverParams):
        self.cid = cid
        self.idx_p = np.asarray(idx_p, dtype=np.intp)
        self.idx_m = np.asarray(idx_m, dtype=np.intp)
        # Row-indexable copies so row i* of the slice is contiguous.
        self.Xp = np.ascontiguousarray(tdata.Xp[:, self.idx_p])
        self.Xm = np.ascontiguousarray(tdata.Xm[:, self.idx_m])
        self.params = params
        n1, n2 = params.n1, params.n2
        m1, m2 = len(self.idx_p), len(self.idx_m)
        self.w = np.zeros(params.d_pad)
        self.eta_cur = np.full(m1, 1.0 / n1)
        self.eta_prev = self.eta_cur.copy()
        self.log_eta_cur = np.full(m1, -math.log(n1))
        self.log_eta_prev = self.log_eta_cur.copy()
        self.xi_cur = np.full(m2, 1.0 / n2)
        self.xi_prev = self.xi_cur.copy()
        self.log_xi_cur = np.full(m2, -math.log(n2))
        self.log_xi_prev = self.log_xi_cur.copy()
        self.ip_p = np.zeros(m1)
        self.ip_m = np.zeros(m2)

    # --- per-round client computations -------------------------------

    def local_deltas(self, i_star: int) -> tuple:
        p = self.params
        dp = kernels.extrap_dot(self.Xp[i_star], self.eta_cur, self.eta_prev, p.theta)
        dm = kernels.extrap_dot(self.Xm[i_star], self.xi_cur, self.xi_prev, p.theta)
        return dp, dm

    def apply_w_update(self, i_star: int, s_dp: float, s_dm: float) -> float:
        p = self.params
        w_old = self.w[i_star]
        w_new = (w_old + p.sigma * (s_dp - s_dm)) / (p.sigma + 1.0)
        self.w[i_star] = w_new
        return w_new - w_old

    def local_normalizers(self, i_star: int, dw: float) -> tuple:
        p = self.params
        ddw = p.d_pad * dw
        self._lw_eta = core.phi_log_update(self.log_eta_cur, self.ip_p,
                                           self.Xp[i_star], p, ddw, 1.0)
        self._lw_xi = core.phi_log_update(self.log_xi_cur, self.ip_m,
                                          self.Xm[i_star], p, ddw, -1.0)
        return kernels.sum_exp(self._lw_eta), kernels.sum_exp(self._lw_xi)

    def apply_normalization(self, s_zp: float, s_zm: float) -> None:
        if s_zp <= 0.0 or s_zm <= 0.0 or not (math.isfinite(s_zp) and math.isfinite(s_zm)):
            raise NumericalError("dual normalizer degenerated")
        self._eta_new = np.empty_like(self._lw_eta)
        self._xi_new = np.empty_like(self._lw_xi)
        kernels.finish_weights(self._lw_eta, math.log(s_zp), self._eta_new)
        kernels.finish_weights(self._lw_xi, math.log(s_zm), self._xi_new)

    def local_cap_stats(self) -> tuple:
        nu = self.params.nu
        sp, op = kernels.cap_stats(self._eta_new, nu)
        sm, om = kernels.cap_stats(self._xi_new, nu)
        return sp, op, sm, om

    def apply_clip(self, s_sp: float, s_op: float, s_sm: float, s_om: float) -> None:
        nu = self.params.nu
        log_nu = math.log(nu)
        if abs(s_sp) > core.CLIP_TOL:
            core._apply_clip(self._eta_new, self._lw_eta, nu, log_nu, s_sp, s_op)
        if abs(s_sm) > core.CLIP_TOL:
            core._apply_clip(self._xi_new, self._lw_xi, nu, log_nu, s_sm, s_om)

    def commit(self, i_star: int, dw: float) -> None:
        self.eta_prev, self.eta_cur = self.eta_cur, self._eta_new
        self.log_eta_prev, self.log_eta_cur = self.log_eta_cur, self._lw_eta
        self.xi_prev, self.xi_cur = self.xi_cur, self._xi_new
        self.log_xi_prev, self.log_xi_cur = self.log_xi_cur, self._lw_xi
        kernels.ip_update(self.ip_p, self.Xp[i_star], dw)
        kernels.ip_update(self.ip_m, self.Xm[i_star], dw)
        self._eta_new = self._xi_new = self._lw_eta = self._lw_xi = None


class Simulator:
    """Server loop over k ClientStates with a scalar-level traffic meter."""

    def __init__(self, tdata: TransformedData, params: core.SolverParams,
                 k: int, seed: int, scheme: str = "round-robin",
                 record: bool = False):
        self.tdata = tdata
        self.params = params
        self.k = k
        shards = partition(params.n1, params.n2, k, seed, scheme)
        self.clients = [
            ClientState(c, tdata, ip, im, params) for c, (ip, im) in enumerate(shards)
        ]
        self.stats = CommStats(k=k)
        self.log: list[Message] | None = [] if record else None
        self.t = 0

    # --- metering helpers ---------------------------------------------

    def _up(self, kind: MessageKind, payload: tuple, sender: int,
            checkpoint: bool = False) -> None:
        if checkpoint:
            self.stats.checkpoint_up += len(payload)
        else:
            self.stats.scalars_up += len(payload)
        if self.log is not None:
            self.log.append(Message(kind, payload, sender, -1))

    def _down(self, kind: MessageKind, payload: tuple, receiver: int,
              checkpoint: bool = False) -> None:
        if checkpoint:
            self.stats.checkpoint_down += len(payload)
        else:
            self.stats.scalars_down += len(payload)
        if self.log is not None:
            self.log.append(Message(kind, payload, -1, receiver))

    # --- protocol ------------------------------------------------------

    def run_iteration(self, rng: np.random.Generator) -> int:
        """Algorithm rounds for one iteration; returns clip-round count."""
        params = self.params
        i_star = int(rng.integers(params.d_pad))
        for c in self.clients:
            self._down(MessageKind.PICK_INDEX, (float(i_star),), c.cid)

        s_dp = 0.0
        s_dm = 0.0
        for c in self.clients:  # ascending order: determinism of the sums
            dp, dm = c.local_deltas(i_star)
            self._up(MessageKind.CLIENT_DELTA, (dp, dm), c.cid)
            s_dp += dp
            s_dm += dm
        dw = None
        for c in self.clients:
            self._down(MessageKind.DELTA_BCAST, (s_dp, s_dm), c.cid)
            dw_c = c.apply_w_update(i_star, s_dp, s_dm)
            dw = dw_c if dw is None else dw
        if any(abs(c.w[i_star] - self.clients[0].w[i_star]) > REPLICA_TOL
               for c in self.clients):
            raise SimulationFault("w replicas diverged beyond tolerance")

        s_zp = 0.0
        s_zm = 0.0
        for c in self.clients:
            zp, zm = c.local_normalizers(i_star, dw)
            self._up(MessageKind.CLIENT_NORM, (zp, zm), c.cid)
            s_zp += zp
            s_zm += zm
        for c in self.clients:
            self._down(MessageKind.NORM_BCAST, (s_zp, s_zm), c.cid)
            c.apply_normalization(s_zp, s_zm)

        rounds = 0
        if params.mode == core.Mode.NU:
            max_rounds = math.ceil(1.0 / params.nu) + 2
            while True:
                s_sp = s_op = s_sm = s_om = 0.0
                for c in self.clients:
                    sp, op, sm, om = c.local_cap_stats()
                    self._up(MessageKind.CLIENT_CLIP, (sp, op, sm, om), c.cid)
                    s_sp += sp
                    s_op += op
                    s_sm += sm
                    s_om += om
                done = abs(s_sp) <= core.CLIP_TOL and abs(s_sm) <= core.CLIP_TOL
                for c in self.clients:
                    self._down(MessageKind.CLIP_BCAST, (s_sp, s_op, s_sm, s_om), c.cid)
                    if not done:
                        c.apply_clip(s_sp, s_op, s_sm, s_om)
                rounds += 1
                if done:
                    break
                if rounds > max_rounds:
                    raise NumericalError("distributed cap projection failed to terminate")

        for c in self.clients:
            c.commit(i_star, dw)
        if params.mode == core.Mode.NU:
            self.stats.clip_rounds.append(rounds)
        self.t += 1
        self.stats.iterations += 1
        return rounds

    # --- global views (simulation-side; not communicated) --------------

    def gather_state(self) -> core.SaddleState:
        """Materialize the logical global iterate from the client shards."""
        params = self.params
        state = core.SaddleState(params)
        state.t = self.t
        state.w = self.clients[0].w
        for name, idx_attr in (("eta", "idx_p"), ("xi", "idx_m")):
            for attr in (f"{name}_cur", f"{name}_prev",
                         f"log_{name}_cur", f"log_{name}_prev"):
                buf = getattr(state, attr)
                for c in self.clients:
                    buf[getattr(c, idx_attr)] = getattr(c, attr)
        for c in self.clients:
            state.ip_p[c.idx_p] = c.ip_p
            state.ip_m[c.idx_m] = c.ip_m
        return state

    def checkpoint(self, t_start: float) -> dict:
        """Block-boundary objective check.

        The meter charges each client a 2-scalar partial-objective upload
        and a 1-scalar continue/stop flag download; the objective values
        themselves are evaluated on the gathered global state.
        """
        state = self.gather_state()
        primal = core.primal_distance(state.eta_cur, state.xi_cur, self.tdata)
        dual = core.dual_objective_g(state.w, self.tdata, self.params)
        for c in self.clients:
            self._up(MessageKind.CHECKPOINT, (primal, dual), c.cid, checkpoint=True)
        for c in self.clients:
            self._down(MessageKind.STOP_FLAG, (0.0,), c.cid, checkpoint=True)
        row = core.checkpoint_row(self.t, primal, dual, t_start)
        row["scalars_up"] = self.stats.scalars_up + self.stats.checkpoint_up
        row["scalars_down"] = self.stats.scalars_down + self.stats.checkpoint_down
        return row


def run_simulation(data: Dataset, config: core.SolveConfig, k: int,
                   scheme: str = "round-robin",
                   record: bool = False) -> tuple:
    """Distributed counterpart of ``saddle_core.solve``.

    Same transform, parameters, index stream, block schedule, and stopping
    rule; returns (Solution, CommStats).  With k = 1 the Solution matches
    the centralized one bit for bit.
    """
    t_start = time.perf_counter()
    tdata = apply_transform(data, config.seed)
    nu = config.resolve_nu(data.n1, data.n2)
    params = core.derive_params(config.epsilon, config.beta, nu, data.n,
                                data.n1, data.n2, tdata.spec.d_pad, config.mode)
    rng = substream(config.seed, INDEX_SAMPLING)
    sim = Simulator(tdata, params, k, config.seed, scheme, record=record)
    block = config.block_size or core.default_block_size(params)
    trace = []
    best = core.BestTracker()
    prev_obj = None
    status = "max_blocks"
    for _ in range(config.max_blocks):
        for _ in range(block):
            sim.run_iteration(rng)
        row = sim.checkpoint(t_start)
        trace.append(row)
        primal = row["primal"]
        best.offer(sim.gather_state(), primal)
        if primal < core.NONSEPARABLE_TOL:
            status = "nonseparable"
            break
        if prev_obj is not None and abs(prev_obj - primal) < config.epsilon * primal:
            status = "converged"
            break
        prev_obj = primal
    final = best.state if best.state is not None else sim.gather_state()
    solution = core.build_solution(final, tdata, params, trace, status, t_start)
    if record:
        return solution, sim.stats, sim.log
    return solution, sim.stats
