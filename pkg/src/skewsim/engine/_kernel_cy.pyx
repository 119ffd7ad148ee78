# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled cycle kernel.

Semantics are identical to _kernel_py.PipelineState (one call here runs
the whole pipeline to completion); the two are cross-checked bit for bit
by the test suite and the core benchmark.
"""

import numpy as np

from ..apps.base import KIND_DP, KIND_HHD, KIND_HLL, KIND_HISTO, KIND_PR
from ..apps.hhd import _ROUTE_SALT
from .job import SimulationError

ctypedef unsigned long long u64

cdef enum Phase:
    RUNNING, PROFILING, PLAN_LATENCY, APPLYING, DRAINING, OVERHEAD

cdef inline u64 _fmix64(u64 x) noexcept nogil:
    x ^= x >> 33
    x *= 0xFF51AFD7ED558CCDULL
    x ^= x >> 33
    x *= 0xC4CEB9FE1A85EC53ULL
    x ^= x >> 33
    return x

cdef inline int _clz64(u64 v) noexcept nogil:
    cdef int n = 0
    if v == 0:
        return 64
    while not (v & 0x8000000000000000ULL):
        v <<= 1
        n += 1
    return n


def run_kernel(job):
    cdef Py_ssize_t m = job.m
    cdef Py_ssize_t x = job.x
    cdef Py_ssize_t num_pes = m + x
    cdef Py_ssize_t batch = job.batch_size
    cdef int ii_pri = job.ii_pripe
    cdef Py_ssize_t depth = job.channel_depth
    cdef long long prof_cycles = job.profiling_cycles
    cdef long long window = job.monitor_window
    cdef double threshold = job.threshold
    cdef long long overhead = job.reschedule_overhead
    cdef int kind = job.kind

    cdef u64[::1] keys = job.keys
    cdef u64[::1] vals = job.vals
    cdef Py_ssize_t n = keys.shape[0]

    # application parameters and state
    cdef u64 nb = job.nb
    cdef u64 fanout = job.fanout
    cdef int line = job.line
    cdef int hll_b = job.hll_b
    cdef u64 hll_seed = job.hll_seed
    cdef int hhd_d = job.hhd_d
    cdef u64 hhd_w = job.hhd_w
    cdef u64 pr_block = job.pr_block
    cdef u64 route_salt = _ROUTE_SALT
    cdef long long[:, ::1] bins = job.bins
    cdef u64[:, :, ::1] dp_buf = job.dp_buf
    cdef int[:, ::1] dp_cnt = job.dp_cnt
    cdef unsigned char[:, ::1] regs = job.regs
    cdef long long[:, :, ::1] sketch = job.sketch
    cdef u64[::1] hhd_a = job.hhd_a
    cdef u64[::1] hhd_b = job.hhd_b
    cdef long long[::1] pr_rank = job.pr_rank
    cdef long long[::1] pr_outdeg = job.pr_outdeg
    cdef long long[:, ::1] pr_accum = job.pr_accum
    candidates = job.candidates
    flushes = job.flushes

    # channels: per-PE ring buffers
    cdef u64[:, ::1] ck = np.empty((num_pes, depth), np.uint64)
    cdef u64[:, ::1] cv = np.empty((num_pes, depth), np.uint64)
    cdef u64[:, ::1] cp = np.empty((num_pes, depth), np.uint64)
    cdef Py_ssize_t[::1] chead = np.zeros(num_pes, np.intp)
    cdef Py_ssize_t[::1] clen = np.zeros(num_pes, np.intp)

    cdef int[::1] cooldown = np.zeros(num_pes, np.int32)
    cdef long long[::1] proc = job.processed
    cdef int[::1] serving = job.serving

    # mapper state
    cdef int[:, ::1] table = np.empty((m, x + 1), np.int32)
    cdef int[::1] counters = np.ones(m, np.int32)
    cdef int[::1] cursors = np.zeros(m, np.int32)
    cdef int[::1] occ = np.zeros(m, np.int32)
    cdef int[::1] touched = np.zeros(batch, np.int32)
    cdef Py_ssize_t r, ci
    for r in range(m):
        for ci in range(x + 1):
            table[r, ci] = <int> r

    # router-held batch and raw fetch batch
    cdef u64[::1] pk = np.empty(batch, np.uint64)
    cdef u64[::1] pv = np.empty(batch, np.uint64)
    cdef u64[::1] pp = np.empty(batch, np.uint64)
    cdef int[::1] pd = np.empty(batch, np.int32)
    cdef Py_ssize_t pend_n = 0
    cdef u64[::1] rk = np.empty(batch, np.uint64)
    cdef u64[::1] rv = np.empty(batch, np.uint64)
    cdef Py_ssize_t raw_n = 0
    cdef int prepe_cd = 0
    cdef int prepe_extra = <int> (-(-job.ii_prepe * batch // job.n_lanes) - 1)

    cdef long long[::1] counts = np.zeros(m, np.int64)
    cdef int phase = PROFILING if x > 0 else RUNNING
    cdef long long prof_elapsed = 0
    plan = []
    cdef Py_ssize_t plan_len = 0
    cdef long long lat = 0
    cdef Py_ssize_t pair_idx = 0
    cdef long long ov = 0
    cdef long long epochs = 0
    cdef double best = 0.0
    cdef double rate
    cdef long long last_mark = 0
    cdef long long total = 0
    cdef Py_ssize_t cursor = 0
    cdef long long cycle = 0
    cdef long long stalls = 0
    cdef long long limit = 200 * n + 2_000_000

    out_samples = job.out_samples
    out_plans = job.out_plans
    plan_fn = job.plan_fn
    fold_fn = job.fold_fn

    cdef Py_ssize_t p, i, slot, ntouch, s, d
    cdef u64 k, v, pl, h, rem, b_, pt, j
    cdef int cd, c, o, rho, lj, col_i
    cdef u64 col
    cdef long long need_total
    cdef bint ok, drained, profiling
    cdef Py_ssize_t pri
    cdef long long gpart, cnt

    while total < n:
        # ---- PEs consume ----
        for p in range(num_pes):
            cd = cooldown[p]
            if cd:
                cooldown[p] = cd - 1
            elif clen[p]:
                slot = chead[p]
                k = ck[p, slot]
                v = cv[p, slot]
                pl = cp[p, slot]
                chead[p] = (slot + 1) % depth
                clen[p] -= 1
                if kind == KIND_HISTO:
                    bins[p, <Py_ssize_t> pl] += 1
                elif kind == KIND_DP:
                    lj = <int> pl
                    c = dp_cnt[p, lj]
                    dp_buf[p, lj, 2 * c] = k
                    dp_buf[p, lj, 2 * c + 1] = v
                    if c + 1 == line:
                        gpart = (<long long> lj) * m + serving[p]
                        flushes.append((gpart, np.asarray(dp_buf[p, lj]).copy()))
                        dp_cnt[p, lj] = 0
                    else:
                        dp_cnt[p, lj] = c + 1
                elif kind == KIND_HLL:
                    lj = <int> (pl >> 8)
                    rho = <int> (pl & 0xFF)
                    if rho > regs[p, lj]:
                        regs[p, lj] = <unsigned char> rho
                elif kind == KIND_HHD:
                    for col_i in range(hhd_d):
                        col = (hhd_a[col_i] * k + hhd_b[col_i]) % hhd_w
                        sketch[p, col_i, <Py_ssize_t> col] += 1
                    (<set> candidates[p]).add(k)
                else:  # KIND_PR
                    pr_accum[p, <Py_ssize_t> (v % pr_block)] += <long long> pl
                proc[p] += 1
                total += 1
                cooldown[p] = ii_pri - 1

        # ---- apply one plan pair per cycle ----
        if phase == APPLYING:
            if pair_idx < plan_len:
                r = <Py_ssize_t> plan[pair_idx]
                table[r, counters[r]] = <int> (m + pair_idx)
                counters[r] += 1
                serving[m + pair_idx] = <int> r
                pair_idx += 1
            if pair_idx >= plan_len:
                phase = RUNNING
                best = 0.0

        # ---- router dispatch, all-or-nothing ----
        if pend_n:
            ok = True
            # capacity check per destination; pend_n <= batch is tiny
            for i in range(pend_n):
                d = pd[i]
                need_total = 0
                for s in range(pend_n):
                    if pd[s] == d:
                        need_total += 1
                if clen[d] + need_total > depth:
                    ok = False
                    break
            if ok:
                for i in range(pend_n):
                    d = pd[i]
                    slot = (chead[d] + clen[d]) % depth
                    ck[d, slot] = pk[i]
                    cv[d, slot] = pv[i]
                    cp[d, slot] = pp[i]
                    clen[d] += 1
                pend_n = 0
            else:
                stalls += 1

        # ---- PrePEs prepare and hand off ----
        if pend_n == 0 and raw_n:
            if prepe_cd:
                prepe_cd -= 1
            else:
                profiling = phase == PROFILING
                ntouch = 0
                for i in range(raw_n):
                    k = rk[i]
                    v = rv[i]
                    if kind == KIND_HISTO:
                        b_ = k % nb
                        pri = <Py_ssize_t> (b_ % (<u64> m))
                        pl = b_ // (<u64> m)
                    elif kind == KIND_DP:
                        pt = k & (fanout - 1)
                        pri = <Py_ssize_t> (pt % (<u64> m))
                        pl = pt // (<u64> m)
                    elif kind == KIND_HLL:
                        h = _fmix64(k ^ hll_seed)
                        j = h >> (64 - hll_b)
                        rem = h << hll_b
                        if rem == 0:
                            rho = 64 - hll_b + 1
                        else:
                            rho = _clz64(rem) + 1
                        pri = <Py_ssize_t> (j % (<u64> m))
                        pl = ((j // (<u64> m)) << 8) | (<u64> rho)
                    elif kind == KIND_HHD:
                        pri = <Py_ssize_t> (_fmix64(k ^ route_salt) % (<u64> m))
                        pl = 0
                    else:  # KIND_PR
                        pri = <Py_ssize_t> (v // pr_block)
                        pl = <u64> (pr_rank[<Py_ssize_t> k] // pr_outdeg[<Py_ssize_t> k])
                    if profiling:
                        counts[pri] += 1
                    c = counters[pri]
                    if c > 1:
                        o = occ[pri]
                        if o == 0:
                            touched[ntouch] = <int> pri
                            ntouch += 1
                        occ[pri] = o + 1
                        d = table[pri, (cursors[pri] + o) % c]
                    else:
                        d = pri
                    pk[i] = k
                    pv[i] = v
                    pp[i] = pl
                    pd[i] = <int> d
                for i in range(ntouch):
                    r = touched[i]
                    cursors[r] = (cursors[r] + occ[r]) % counters[r]
                    occ[r] = 0
                pend_n = raw_n
                raw_n = 0

        # ---- memory fetch ----
        if raw_n == 0 and cursor < n:
            i = 0
            while i < batch and cursor + i < n:
                rk[i] = keys[cursor + i]
                rv[i] = vals[cursor + i]
                i += 1
            raw_n = i
            cursor += i
            prepe_cd = prepe_extra

        # ---- scheduling state machine ----
        if x > 0:
            if phase == PROFILING:
                prof_elapsed += 1
                if prof_elapsed >= prof_cycles:
                    plan = list(plan_fn([counts[i] for i in range(m)], x))
                    plan_len = len(plan)
                    lat = x
                    phase = PLAN_LATENCY
            elif phase == PLAN_LATENCY:
                lat -= 1
                if lat <= 0:
                    phase = APPLYING
                    pair_idx = 0
                    out_plans.append((cycle, tuple(plan), epochs > 0))
            elif phase == DRAINING:
                drained = True
                for s in range(m, num_pes):
                    if clen[s]:
                        drained = False
                        break
                if drained:
                    for s in range(m, num_pes):
                        if serving[s] >= 0:
                            fold_fn(s, serving[s])
                            serving[s] = -1
                    if overhead > 0:
                        phase = OVERHEAD
                        ov = overhead
                    else:
                        phase = PROFILING
                        for i in range(m):
                            counts[i] = 0
                        prof_elapsed = 0
            elif phase == OVERHEAD:
                ov -= 1
                if ov <= 0:
                    phase = PROFILING
                    for i in range(m):
                        counts[i] = 0
                    prof_elapsed = 0

        cycle += 1

        # ---- monitor window ----
        if cycle % window == 0:
            rate = (<double> (total - last_mark)) / (<double> window)
            out_samples.append(rate)
            last_mark = total
            if phase == RUNNING and x > 0:
                if rate > best:
                    best = rate
                elif threshold > 0.0 and rate < threshold * best:
                    epochs += 1
                    for r in range(m):
                        for ci in range(x + 1):
                            table[r, ci] = <int> r
                        counters[r] = 1
                        cursors[r] = 0
                    for i in range(pend_n):
                        if pd[i] >= m:
                            pd[i] = serving[pd[i]]
                    phase = DRAINING

        if cycle > limit:
            raise SimulationError("cycle limit exceeded; pipeline wedged")

    job.out_cycles = cycle
    job.out_stalls = stalls
