"""Pure-Python cycle kernel.

One PipelineState.step() call advances every stage by one cycle against
the state observed at cycle start: PEs consume, the router replays or
dispatches its held batch, the PrePEs hand a prepared batch to the router,
memory fetches the next batch, and the scheduling state machine advances.
Channel occupancy is committed at cycle end, so capacity is respected at
every cycle boundary and the stage order cannot leak tuples.

The compiled kernel (_kernel_cy) implements the same semantics; the two
must stay bit-identical and are cross-checked by tests and the benchmark.
"""

from __future__ import annotations

from collections import deque

from ..apps.base import KIND_DP, KIND_HHD, KIND_HLL, KIND_HISTO, KIND_PR
from ..apps.hhd import _ROUTE_SALT
from .job import SimulationError

MASK64 = (1 << 64) - 1
_C1 = 0xFF51AFD7ED558CCD
_C2 = 0xC4CEB9FE1A85EC53

# scheduling phases
RUNNING, PROFILING, PLAN_LATENCY, APPLYING, DRAINING, OVERHEAD = range(6)


def _fmix64(x: int) -> int:
    x ^= x >> 33
    x = (x * _C1) & MASK64
    x ^= x >> 33
    x = (x * _C2) & MASK64
    x ^= x >> 33
    return x


class PipelineState:
    def __init__(self, job):
        self.job = job
        self.m = job.m
        self.x = job.x
        self.num_pes = job.m + job.x
        self.keys = job.keys.tolist()
        self.vals = job.vals.tolist()
        self.n = len(self.keys)
        self.chans = [deque() for _ in range(self.num_pes)]
        self.cooldown = [0] * self.num_pes
        self.proc = [0] * self.num_pes
        self.serving = [p if p < job.m else -1 for p in range(self.num_pes)]
        self.table = [[r] * (job.x + 1) for r in range(job.m)]
        self.counters = [1] * job.m
        self.cursors = [0] * job.m
        self.pend = []  # router-held batch: [key, value, payload, dst]
        self.raw_k = []
        self.raw_v = []
        self.prepe_cd = 0
        # extra cycles per batch when the PrePE stage is the bottleneck
        self.prepe_extra = -(-job.ii_prepe * job.batch_size // job.n_lanes) - 1
        self.counts = [0] * job.m
        self.phase = PROFILING if job.x > 0 else RUNNING
        self.prof_elapsed = 0
        self.plan = []
        self.lat = 0
        self.pair_idx = 0
        self.ov = 0
        self.epochs = 0
        self.best = 0.0
        self.last_mark = 0
        self.total = 0
        self.cursor = 0
        self.cycle = 0
        self.stalls = 0
        self.hhd_a = job.hhd_a.tolist()
        self.hhd_b = job.hhd_b.tolist()

    @property
    def done(self) -> bool:
        return self.total >= self.n

    def step(self) -> None:
        job = self.job
        m = self.m
        kind = job.kind
        chans = self.chans
        cooldown = self.cooldown
        serving = self.serving

        # ---- PEs consume one tuple each (initiation interval permitting) ----
        for p in range(self.num_pes):
            cd = cooldown[p]
            if cd:
                cooldown[p] = cd - 1
            elif chans[p]:
                k, v, pl = chans[p].popleft()
                if kind == KIND_HISTO:
                    job.bins[p, pl] += 1
                elif kind == KIND_DP:
                    c = int(job.dp_cnt[p, pl])
                    job.dp_buf[p, pl, 2 * c] = k
                    job.dp_buf[p, pl, 2 * c + 1] = v
                    if c + 1 == job.line:
                        gpart = pl * m + serving[p]
                        job.flushes.append((gpart, job.dp_buf[p, pl].copy()))
                        job.dp_cnt[p, pl] = 0
                    else:
                        job.dp_cnt[p, pl] = c + 1
                elif kind == KIND_HLL:
                    lj = pl >> 8
                    rho = pl & 0xFF
                    if rho > job.regs[p, lj]:
                        job.regs[p, lj] = rho
                elif kind == KIND_HHD:
                    for i in range(job.hhd_d):
                        col = ((self.hhd_a[i] * k + self.hhd_b[i]) & MASK64) % job.hhd_w
                        job.sketch[p, i, col] += 1
                    job.candidates[p].add(k)
                else:  # KIND_PR
                    job.pr_accum[p, v % job.pr_block] += pl
                self.proc[p] += 1
                self.total += 1
                cooldown[p] = job.ii_pripe - 1

        # ---- mappers apply at most one plan pair per cycle ----
        if self.phase == APPLYING:
            if self.pair_idx < len(self.plan):
                r = self.plan[self.pair_idx]
                self.table[r][self.counters[r]] = m + self.pair_idx
                self.counters[r] += 1
                serving[m + self.pair_idx] = r
                self.pair_idx += 1
            if self.pair_idx >= len(self.plan):
                self.phase = RUNNING
                self.best = 0.0

        # ---- router: all-or-nothing dispatch of the held batch ----
        if self.pend:
            need = {}
            for item in self.pend:
                d = item[3]
                need[d] = need.get(d, 0) + 1
            depth = job.channel_depth
            for d, c in need.items():
                if len(chans[d]) + c > depth:
                    self.stalls += 1
                    break
            else:
                for k, v, pl, d in self.pend:
                    chans[d].append((k, v, pl))
                self.pend = []

        # ---- PrePEs prepare a batch and hand it to the router ----
        if not self.pend and self.raw_k:
            if self.prepe_cd:
                self.prepe_cd -= 1
            else:
                self._prepare_batch()

        # ---- memory fetch ----
        if not self.raw_k and self.cursor < self.n:
            end = self.cursor + job.batch_size
            self.raw_k = self.keys[self.cursor:end]
            self.raw_v = self.vals[self.cursor:end]
            self.cursor += len(self.raw_k)
            self.prepe_cd = self.prepe_extra

        # ---- scheduling state machine ----
        if self.x > 0:
            self._advance_fsm()

        self.cycle += 1
        if self.cycle % job.monitor_window == 0:
            self._monitor_window()

    def _prepare_batch(self) -> None:
        job = self.job
        m = self.m
        kind = job.kind
        profiling = self.phase == PROFILING
        counters = self.counters
        cursors = self.cursors
        occ = {}
        pend = self.pend
        for i in range(len(self.raw_k)):
            k = self.raw_k[i]
            v = self.raw_v[i]
            if kind == KIND_HISTO:
                b = k % job.nb
                pri = b % m
                pl = b // m
            elif kind == KIND_DP:
                pt = k & (job.fanout - 1)
                pri = pt % m
                pl = pt // m
            elif kind == KIND_HLL:
                h = _fmix64(k ^ job.hll_seed)
                j = h >> (64 - job.hll_b)
                rem = (h << job.hll_b) & MASK64
                rho = 65 - rem.bit_length() if rem else 64 - job.hll_b + 1
                pri = j % m
                pl = ((j // m) << 8) | rho
            elif kind == KIND_HHD:
                pri = _fmix64(k ^ _ROUTE_SALT) % m
                pl = 0
            else:  # KIND_PR
                pri = v // job.pr_block
                pl = int(job.pr_rank[k]) // int(job.pr_outdeg[k])
            if profiling:
                self.counts[pri] += 1
            c = counters[pri]
            if c > 1:
                o = occ.get(pri, 0)
                occ[pri] = o + 1
                d = self.table[pri][(cursors[pri] + o) % c]
            else:
                d = pri
            pend.append([k, v, pl, d])
        for r, o in occ.items():
            cursors[r] = (cursors[r] + o) % counters[r]
        self.raw_k = []
        self.raw_v = []

    def _advance_fsm(self) -> None:
        job = self.job
        m = self.m
        if self.phase == PROFILING:
            self.prof_elapsed += 1
            if self.prof_elapsed >= job.profiling_cycles:
                self.plan = list(job.plan_fn(self.counts, self.x))
                self.lat = self.x  # serial plan generation latency
                self.phase = PLAN_LATENCY
        elif self.phase == PLAN_LATENCY:
            self.lat -= 1
            if self.lat <= 0:
                self.phase = APPLYING
                self.pair_idx = 0
                job.out_plans.append((self.cycle, tuple(self.plan), self.epochs > 0))
        elif self.phase == DRAINING:
            if all(not self.chans[s] for s in range(m, self.num_pes)):
                for s in range(m, self.num_pes):
                    if self.serving[s] >= 0:
                        job.fold_fn(s, self.serving[s])
                        self.serving[s] = -1
                if job.reschedule_overhead > 0:
                    self.phase = OVERHEAD
                    self.ov = job.reschedule_overhead
                else:
                    self._restart_profiling()
        elif self.phase == OVERHEAD:
            self.ov -= 1
            if self.ov <= 0:
                self._restart_profiling()

    def _restart_profiling(self) -> None:
        self.phase = PROFILING
        self.counts = [0] * self.m
        self.prof_elapsed = 0

    def _monitor_window(self) -> None:
        job = self.job
        rate = (self.total - self.last_mark) / job.monitor_window
        job.out_samples.append(rate)
        self.last_mark = self.total
        if self.phase != RUNNING or self.x == 0:
            return
        if rate > self.best:
            self.best = rate
        elif job.threshold > 0.0 and rate < job.threshold * self.best:
            # rescheduling epoch: cut secondary routing immediately, then
            # drain, merge, and re-profile; primaries never pause
            self.epochs += 1
            for r in range(self.m):
                row = self.table[r]
                for ci in range(self.x + 1):
                    row[ci] = r
                self.counters[r] = 1
                self.cursors[r] = 0
            for item in self.pend:
                if item[3] >= self.m:
                    item[3] = self.serving[item[3]]
            self.phase = DRAINING

    def finish(self) -> None:
        job = self.job
        job.out_cycles = self.cycle
        job.out_stalls = self.stalls
        for p in range(self.num_pes):
            job.processed[p] = self.proc[p]
            job.serving[p] = self.serving[p]


def run_kernel(job) -> None:
    state = PipelineState(job)
    limit = 200 * state.n + 2_000_000
    while not state.done:
        state.step()
        if state.cycle > limit:
            raise SimulationError("cycle limit exceeded; pipeline wedged")
    state.finish()
