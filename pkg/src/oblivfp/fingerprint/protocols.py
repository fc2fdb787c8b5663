"""Secure fingerprint alignment and matching, written once for both engines.

Minutiae travel as triples ``(x, y, theta)`` of integer SArrays with the
point index on axis 0 (extra trailing axes batch independent probes).
High curvature points are ``(count, 3)`` fixed-point SArrays holding
``x, y, w``.  Spectral templates are pairs of ``(M', N')`` fixed-point
SArrays with the real and imaginary parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .. import blocks as B
from ..engine import PlainEngine, SArray, cat, stack
from ..errors import ConfigError, DomainError
from ..fixedpoint import const_raw
from ..numerics import SelectParams, s_arctan, s_cos, s_select, s_sin, s_sqrt
from .types import SHIFT_MIN, HighCurvatureParams, MatchThresholds, RotationTable

ANGLE_BITS = 12            # signed width of any orientation difference


def _bitlen(v: int) -> int:
    return max(1, int(v).bit_length())


def default_coord_bits(fmt) -> int:
    """Minutia coordinates live in the signed (ell - k - 1)-bit range."""
    return fmt.ell - fmt.k - 1


def guard_eps(fmt) -> int:
    """Raw value of the 2^(-k+4) guard added to denominators and norms."""
    return 1 << 4


# ---------------------------------------------------------------------- match

def s_match(T, S, thr: MatchThresholds, coord_bits: int | None = None, trace: list | None = None):
    """Greedy pairing count between gallery minutiae T and probe minutiae S.

    T components have shape (m,); S components (n,) or (n, *batch), in
    which case one count per batch entry is returned.  Each t_i in turn
    takes the closest still-available s_j that passes both thresholds
    (lowest index on ties).  ``trace`` receives ``(u_i, C_i)`` per step:
    the pairing bit and the one-hot vector of the consumed probe minutia.
    """
    tx, ty, tt = T
    sx, sy, st = S
    E = tx.E
    m, n = tx.shape[0], sx.shape[0]
    if m < 1 or n < 1:
        raise ConfigError("match needs nonempty minutia sets")
    batch = tuple(sx.shape[1:])
    full = (m, n) + batch
    cb = coord_bits or default_coord_bits(E.fmt)
    dist_bits = 2 * cb + 5
    lam2, lth = thr.lam2, thr.lam_theta

    def tb(a):
        return a.reshape((m, 1) + (1,) * len(batch)).broadcast_to(full)

    def sb(a):
        return a.reshape((1,) + a.shape).broadcast_to(full)

    with E.label("s_match"):
        dx, dy, dth = tb(tx) - sb(sx), tb(ty) - sb(sy), tb(tt) - sb(st)
        neg = E.ltz(dth, ANGLE_BITS)
        sq_x, sq_y, nd = E.mul_many([(dx, dx), (dy, dy), (neg, dth)])
        d = sq_x + sq_y
        a = dth - nd * 2                                   # |theta_i - theta'_j|
        c = E.ltz(cat([d - lam2, a - lth, (360 - lth) - a]), max(dist_bits, ANGLE_BITS + 1))
        c_d, c_a, c_b = c[0:m], c[m:2 * m], c[2 * m:3 * m]
        ang_ok = B.s_or(c_a, c_b)
        v = E.mul(c_d, ang_ok)
        # candidates keep their distance, others sit at the threshold
        dprime = E.mul(v, d - lam2) + lam2
        small = _bitlen(lam2) + 2
        used = E.zeros((n,) + batch)
        jidx = E.const(np.arange(n).reshape((n,) + (1,) * len(batch)))
        count = E.zeros(batch)
        for i in range(m):
            di = dprime[i] + E.mul(used, lam2 - dprime[i])
            dmin, jmin, _ = B.s_minmax(di, mode="min", bits=small)
            u = B.s_lt(dmin, lam2, small)
            eq = E.eqz(jmin.reshape((1,) + batch) - jidx, _bitlen(n) + 2)
            Ci = E.mul(eq, u.reshape((1,) + batch).broadcast_to((n,) + batch))
            used = used + Ci
            count = count + u
            if trace is not None:
                trace.append((u, Ci))
    return count


# ----------------------------------------------------------- geometric transform

def s_geom_trans(T, S, thr: MatchThresholds, precision: int | None = None,
                 coord_bits: int | None = None):
    """Best alignment over all reference pairs.

    For the pair (t_i, s_j) the probe is rotated by -dtheta with
    dtheta = theta'_j - theta_i and shifted so s_j lands on t_i:
    dx = cos(dtheta) x'_j + sin(dtheta) y'_j - x_i (fixed point), likewise
    dy.  Returns ``(C_max, dx, dy, dtheta)``; ties keep the first pair in
    i-major order.
    """
    tx, ty, tt = T
    sx, sy, st = S
    E = tx.E
    k = E.fmt.k
    m, n = tx.shape[0], sx.shape[0]
    P = m * n
    cb = coord_bits or default_coord_bits(E.fmt)
    ii = np.repeat(np.arange(m), n)
    jj = np.tile(np.arange(n), m)
    with E.label("s_geom_trans"):
        dth = st[jj] - tt[ii]                              # (P,)
        phi = dth + E.ltz(dth, ANGLE_BITS) * 360           # in [0, 360)
        sn = s_sin(phi, precision)
        cs = s_cos(phi, precision)
        full = (P, n)
        cs_b, sn_b = cs.reshape(P, 1).broadcast_to(full), sn.reshape(P, 1).broadcast_to(full)
        xs, ys = sx.reshape(1, n).broadcast_to(full), sy.reshape(1, n).broadcast_to(full)
        cx, sy_, cy, sx_ = E.mul_many([(cs_b, xs), (sn_b, ys), (cs_b, ys), (sn_b, xs)])
        rows = np.arange(P)
        ddx = cx[(rows, jj)] + sy_[(rows, jj)] - tx[ii].upscale(k)
        ddy = cy[(rows, jj)] - sx_[(rows, jj)] - ty[ii].upscale(k)
        X = cx + sy_ - ddx.reshape(P, 1).broadcast_to(full)
        Y = cy - sx_ - ddy.reshape(P, 1).broadcast_to(full)
        XY = E.trunc(cat([X, Y]), k, bits=k + cb + 4, exact=True)
        Xi, Yi = XY[0:P], XY[P:2 * P]
        w = st.reshape(1, n).broadcast_to(full) - phi.reshape(P, 1).broadcast_to(full)
        w = w + E.ltz(w, ANGLE_BITS) * 360
        S2 = (Xi.moveaxis(0, 1), Yi.moveaxis(0, 1), w.moveaxis(0, 1))    # (n, P)
        counts = s_match(T, S2, thr, coord_bits=cb + 1)
        cmax, _, (bdx, bdy, bdth) = B.s_minmax(counts, [ddx, ddy, dth], mode="max",
                                               bits=_bitlen(min(m, n)) + 2)
    return cmax, bdx, bdy, bdth


# -------------------------------------------------------------- closest points

def _fx_scale(E, a: SArray, c) -> SArray:
    """``a * c`` for a public real ``c`` (free for integers)."""
    c = Fraction(c)
    if c.denominator == 1:
        return a * int(c)
    k = E.fmt.k
    return E.rescale(a * E.const_raw(const_raw(c, k), k), a.frac)


def s_closest_points(That: SArray, Shat: SArray, alpha, beta):
    """Greedy nearest available gallery point for each probe point, in two passes.

    Returns ``(d, t_tilde)``: per probe point the distance
    sqrt(dx^2 + dy^2) + beta |dw| to its partner and the partner itself.
    Pass one accepts a partner only when the distance is below ``alpha``;
    pass two pairs every probe point left over.
    """
    E = That.E
    fmt = E.fmt
    k = fmt.k
    mh, nh = That.shape[0], Shat.shape[0]
    if nh > mh:
        raise ConfigError(f"closest points needs n_hat <= m_hat ({nh} > {mh})")
    full = (nh, mh)
    cmp_bits = fmt.ell + 1
    idx_bits = _bitlen(mh) + 2
    with E.label("s_closest_points"):
        tj = That.reshape(1, mh, 3).broadcast_to((nh, mh, 3))
        si = Shat.reshape(nh, 1, 3).broadcast_to((nh, mh, 3))
        diff = tj - si
        dx, dy, dw = diff[:, :, 0], diff[:, :, 1], diff[:, :, 2]
        sq = E.fxmul_many([(dx, dx), (dy, dy)], frac=k)
        neg = E.ltz(dw, fmt.ell)
        r = s_sqrt(sq[0] + sq[1])
        a = dw - E.mul(neg, dw) * 2
        d = r + _fx_scale(E, a, beta)
        alpha_c = E.const(Fraction(alpha), k)
        inf = E.const_raw(fmt.raw_max, k)                 # unavailable points
        jidx = E.const(np.arange(mh))
        avail = E.ones((mh,))
        d1, t1, pend = [], [], []
        for i in range(nh):
            di = E.mul(avail, d[i] - inf) + inf
            dmin, jmin, (tsel,) = B.s_minmax(di, [That], mode="min", bits=cmp_bits)
            b = B.s_lt(dmin, alpha_c, cmp_bits)
            eq = E.eqz(jmin - jidx, idx_bits)
            avail = avail - E.mul(eq, b.reshape(1).broadcast_to((mh,)))
            d1.append(dmin)
            t1.append(tsel)
            pend.append(1 - b)
        d_out, t_out = [], []
        for i in range(nh):
            di = E.mul(avail, d[i] - inf) + inf
            dmin, jmin, (tsel,) = B.s_minmax(di, [That], mode="min", bits=cmp_bits)
            eq = E.eqz(jmin - jidx, idx_bits)
            avail = avail - E.mul(eq, pend[i].reshape(1).broadcast_to((mh,)))
            # keep the pass-one result unless this point was still pending
            dn, tn = B.ifthen_many(pend[i], [(dmin, d1[i]), (tsel, t1[i])])
            d_out.append(dn)
            t_out.append(tn)
    return stack(d_out), stack(t_out)


# -------------------------------------------------------------- optimal motion

def _hamilton(E, a: SArray, b: SArray) -> SArray:
    """Batched quaternion product a * b over the last axis (w, x, y, z)."""
    k = E.fmt.k
    lead = (slice(None),) * (a.ndim - 1)
    A = [a[lead + (i,)] for i in range(4)]
    Bq = [b[lead + (i,)] for i in range(4)]
    pr = E.mul_many([(A[i], Bq[j]) for i in range(4) for j in range(4)])
    p = lambda i, j: pr[4 * i + j]                               # noqa: E731
    w = p(0, 0) - p(1, 1) - p(2, 2) - p(3, 3)
    x = p(0, 1) + p(1, 0) + p(2, 3) - p(3, 2)
    y = p(0, 2) - p(1, 3) + p(2, 0) + p(3, 1)
    z = p(0, 3) + p(1, 2) - p(2, 1) + p(3, 0)
    return E.rescale(stack([w, x, y, z], axis=-1), k)


def _ordered_product(E, q: SArray) -> SArray:
    """q_0 q_1 ... q_{f-1} by a pairwise tree that preserves the order."""
    while q.shape[0] > 1:
        f = q.shape[0]
        h = f // 2
        prod = _hamilton(E, q[0:2 * h:2], q[1:2 * h:2])
        q = cat([prod, q[f - 1:f]]) if f % 2 else prod
    return q[0]


def _centroid(E, P: SArray) -> SArray:
    f = P.shape[0]
    s = P.sum(axis=0)
    if f == 1:
        return s
    return E.rescale(s * E.const_raw(const_raw(Fraction(1, f), P.frac), P.frac), P.frac)


def _rotation_from_quaternion(E, q: SArray) -> SArray:
    k = E.fmt.k
    q1, q2, q3, q4 = (q[i] for i in range(4))
    names = [(q1, q1), (q2, q2), (q3, q3), (q4, q4), (q2, q3), (q1, q4), (q2, q4), (q1, q3),
             (q3, q4), (q1, q2)]
    h11, h22, h33, h44, h23, h14, h24, h13, h34, h12 = E.mul_many(names)
    R = [[h11 + h22 - h33 - h44, (h23 - h14) * 2, (h24 + h13) * 2],
         [(h23 + h14) * 2, h11 - h22 + h33 - h44, (h34 - h12) * 2],
         [(h24 - h13) * 2, (h34 + h12) * 2, h11 - h22 - h33 + h44]]
    return E.rescale(stack([stack(row) for row in R]), k)


def apply_motion(R: SArray, v: SArray, P: SArray, out_frac: int | None = None,
                 exact: bool | None = None) -> SArray:
    """Rows of ``P`` mapped to ``R p + v`` (one truncation per coordinate)."""
    E = R.E
    nrow, dim = P.shape[0], P.shape[1]
    Rb = R[0:dim, 0:dim].reshape(1, dim, dim).broadcast_to((nrow, dim, dim))
    Pb = P.reshape(nrow, 1, dim).broadcast_to((nrow, dim, dim))
    acc = E.mul(Rb, Pb).sum(axis=2)
    acc = acc + v[0:dim].reshape(1, dim).broadcast_to((nrow, dim)).upscale(acc.frac)
    target = P.frac if out_frac is None else out_frac
    return E.rescale(acc, target, exact=exact)


def s_optimal_motion(t: SArray, s: SArray, strict: bool = False):
    """Rigid motion (R, v) taking the points ``s`` onto ``t`` (both (f, 3), fixed point).

    Both sets are centred on their centroids.  Each pair contributes the
    unit quaternion of the smallest rotation turning s_i toward t_i (the
    identity when the two are parallel or one is zero); R comes from the
    ordered product of these and v = t_bar - R s_bar.  With ``strict`` (plaintext
    engine only) a centred point of zero norm raises :class:`DomainError`.
    """
    E = t.E
    k = E.fmt.k
    f = t.shape[0]
    if s.shape != t.shape or t.ndim != 2 or t.shape[1] != 3:
        raise ConfigError("optimal motion needs two (f, 3) point arrays")
    eps = E.const_raw(guard_eps(E.fmt), k)
    one = E.const(1, k)
    with E.label("s_optimal_motion"):
        tbar, sbar = _centroid(E, t), _centroid(E, s)
        tc = t - tbar.reshape(1, 3).broadcast_to((f, 3))
        sc = s - sbar.reshape(1, 3).broadcast_to((f, 3))
        both = cat([tc, sc])                                          # (2f, 3)
        n2 = E.fxmul(both, both, frac=k).sum(axis=1)
        nrm = s_sqrt(n2)
        if strict:
            if not isinstance(E, PlainEngine):
                raise ConfigError("strict domain checks are only available in plaintext")
            if any(int(v) == 0 for v in E.open(n2, kind="check").flat):
                raise DomainError("optimal motion got a point at the centroid (zero norm)")
        small = B.s_lt(nrm, eps)
        inv = B.s_div(one.broadcast_to((2 * f,)), nrm + small.upscale(k))
        unit = E.fxmul(both, inv.reshape(2 * f, 1).broadcast_to((2 * f, 3)), frac=k)
        ut, us = unit[0:f], unit[f:2 * f]
        # cross product s x t so that the rotation carries s toward t
        a1, a2, a3 = us[:, 0], us[:, 1], us[:, 2]
        b1, b2, b3 = ut[:, 0], ut[:, 1], ut[:, 2]
        pr = E.mul_many([(a1, b1), (a2, b2), (a3, b3), (a2, b3), (a3, b2), (a3, b1), (a1, b3),
                         (a1, b2), (a2, b1)])
        kdot = E.rescale(pr[0] + pr[1] + pr[2], k)
        cr = E.rescale(stack([pr[3] - pr[4], pr[5] - pr[6], pr[7] - pr[8]], axis=1), k)
        cn = s_sqrt(E.fxmul(cr, cr, frac=k).sum(axis=1))
        z = B.s_lt(cn, eps)
        uinv = B.s_div(one.broadcast_to((f,)), cn + z.upscale(k))
        u = E.fxmul(cr, uinv.reshape(f, 1).broadcast_to((f, 3)), frac=k)
        half = E.trunc(cat([one + kdot, one - kdot]).with_frac(k + 1), 1, bits=k + 4)   # (1 +- k)/2
        half = half - E.mul(E.ltz(half, k + 4), half)                  # clamp rounding below 0
        p = s_sqrt(half)
        p1, p2 = p[0:f], p[f:2 * f]
        vec = E.fxmul(p2.reshape(f, 1).broadcast_to((f, 3)), u, frac=k)
        q = cat([p1.reshape(f, 1), vec], axis=1)                       # (f, 4)
        ident = E.const(np.array([1, 0, 0, 0]), k).reshape(1, 4).broadcast_to((f, 4))
        q = B.s_ifthen(z, ident, q)
        qq = _ordered_product(E, q)
        R = _rotation_from_quaternion(E, qq)
        Rs = apply_motion(R, E.zeros((3,), k), sbar.reshape(1, 3))[0]
        v = tbar - Rs
    return R, v


# -------------------------------------------------------------- high curvature

def _minutia_transform(R, v, x, y, th, dtheta_deg):
    """Apply (R, v) to integer minutiae and subtract a fixed-point angle (degrees)."""
    E = R.E
    k = E.fmt.k
    n = x.shape[0]
    P = stack([x, y], axis=1)
    XY = apply_motion(R, v, P, out_frac=0, exact=True)
    w = E.trunc(th.upscale(k) - dtheta_deg.reshape(1).broadcast_to((n,)), k,
                bits=k + ANGLE_BITS, exact=True)
    lo_hi = E.ltz(cat([w, 359 - w]), ANGLE_BITS)
    w = w + lo_hi[0:n] * 360 - lo_hi[n:2 * n] * 360
    return XY[:, 0], XY[:, 1], w


def s_high_curvature(T, That, S, Shat, params: HighCurvatureParams, thr: MatchThresholds,
                     select: SelectParams | None = None, coord_bits: int | None = None,
                     trace: dict | None = None):
    """Align S to T with trimmed ICP on the high curvature points, then count matches.

    Runs all ``params.gamma`` iterations (no early exit).  Returns
    ``(C, R, v, dtheta)`` with dtheta in degrees.
    """
    E = That.E
    k = E.fmt.k
    nh = Shat.shape[0]
    if params.f > nh:
        raise ConfigError(f"f={params.f} exceeds n_hat={nh}")
    eps = E.const_raw(guard_eps(E.fmt), k)
    one = E.const(1, k)
    sel_trace = [] if trace is not None else None
    with E.label("s_high_curvature"):
        cur = Shat
        for it in range(params.gamma):
            d, tt = s_closest_points(That, cur, params.boxes[it], params.beta)
            y = s_select(d, params.f, select, bits=E.fmt.ell + 1, trace=sel_trace)
            l = B.s_lt(d, y + E.const_raw(1, k), E.fmt.ell + 1)
            sc, tc = B.s_compact(l, [cur, tt])
            R, v = s_optimal_motion(tc[0:params.f], sc[0:params.f])
            cur = apply_motion(R, v, cur)
        R, v = s_optimal_motion(cur, Shat)
        # slopes through the first two points, before and after
        num = cat([Shat[1:2, 1] - Shat[0:1, 1], cur[1:2, 1] - cur[0:1, 1]])
        den = cat([Shat[1:2, 0] - Shat[0:1, 0], cur[1:2, 0] - cur[0:1, 0]]) + eps
        c = B.s_div(num, den)
        c1, c2 = c[0], c[1]
        c3 = B.s_div(c1 - c2, one + E.fxmul(c1, c2, frac=k) + eps)
        rad = s_arctan(c3)
        deg = E.rescale(rad * E.const_raw(const_raw(180 / mpmath.pi, k), k), k)
        x2, y2, th2 = _minutia_transform(R, v, S[0], S[1], S[2], deg)
        C = s_match(T, (x2, y2, th2), thr, coord_bits=coord_bits)
    if trace is not None:
        trace["select"] = sel_trace
    return C, R, v, deg


# -------------------------------------------------------------------- spectral

COARSE_SHIFTS = tuple(-13 + 9 * i for i in range(4))
SCORES_PER_RUN = 8


@dataclass
class ScoreCounter:
    """Counts similarity-score evaluations."""

    count: int = 0
    shifts: list = field(default_factory=list)

    def add(self, n: int, what=None):
        self.count += n
        self.shifts.append(what)


def _rows(Z: RotationTable, alphas):
    c = np.stack([Z.row(a)[0] for a in alphas])
    s = np.stack([Z.row(a)[1] for a in alphas])
    return c, s


def lookup_tables(Z: RotationTable):
    """Public candidate rows: 4 for the +-3 step, 12 for the +-1 step (cos, sin; (rows, 2, N'))."""
    def build(lo_start, hi_start, step, count):
        lo = [lo_start + step * i for i in range(count)]
        hi = [hi_start + step * i for i in range(count)]
        cl, sl = _rows(Z, lo)
        ch, sh = _rows(Z, hi)
        return np.stack([cl, ch], axis=1), np.stack([sl, sh], axis=1)
    return build(-16, -10, 9, 4), build(-17, -15, 3, 12)


def reachable_shifts() -> set:
    """Every final shift the hierarchical search can output."""
    out = set()
    for i0 in range(4):
        for idx1 in range(3):
            for idx2 in range(3):
                out.add(SHIFT_MIN + 3 * (3 * i0 + idx1) + idx2)
    return out


def spectral_bits(fmt, M: int, Nc: int, mag_bits: int = 1):
    """(cell truncation, score truncation, score comparison) bit bounds."""
    k = fmt.k
    cell = 2 * k + 2 * mag_bits + 4
    L = _bitlen(M * Nc) + 2 * mag_bits + 4
    return cell, 2 * k + L + 1, k + L + 2


def s_spectral(Ta: SArray, Tb: SArray, Sa: SArray, Sb: SArray, Z: RotationTable,
               counter: ScoreCounter | None = None, mag_bits: int = 1):
    """Best rotation score over shifts -17..18 with 8 score evaluations.

    Feature magnitudes must stay below 2^mag_bits.  Returns
    ``(C_max, alpha_max)``; the score omits the public 1/(M N^2) factor.
    """
    E = Ta.E
    k = E.fmt.k
    M, Nc = Ta.shape
    if Sa.shape != (M, Nc) or Tb.shape != (M, Nc) or Sb.shape != (M, Nc):
        raise ConfigError("spectral templates must have equal dimensions")
    if Z.n_cols != Nc:
        raise ConfigError(f"rotation table has {Z.n_cols} columns, templates {Nc}")
    counter = counter if counter is not None else ScoreCounter()
    cell_bits, score_bits, cmp_bits = spectral_bits(E.fmt, M, Nc, mag_bits)
    w_all = np.array([1] + [2] * (Nc - 1), dtype=object).reshape(1, Nc)
    w_rest = np.array([0] + [2] * (Nc - 1), dtype=object).reshape(1, Nc)
    with E.label("s_spectral"):
        aa, bb, ab_, ab2 = E.mul_many([(Ta, Sa), (Tb, Sb), (Sa, Tb), (Ta, Sb)])
        x = aa * w_all + bb * w_rest
        y = ab_ * w_rest - ab2 * w_all
        xy = E.trunc(cat([x, y]), k, bits=cell_bits)
        # scores are linear in the cells, so column sums serve every shift
        X, Y = xy[0:M].sum(axis=0), xy[M:2 * M].sum(axis=0)

        def public_scores(alphas):
            zc, zs = _rows(Z, alphas)
            acc = (X.reshape(1, Nc) * zc).sum(axis=1) + (Y.reshape(1, Nc) * zs).sum(axis=1)
            acc = acc.with_frac(2 * k)                     # the coefficients carry k bits
            counter.add(len(alphas), tuple(alphas))
            return E.trunc(acc, k, bits=score_bits)

        def private_scores(zc, zs, tag):
            Xb = X.reshape(1, Nc).broadcast_to((2, Nc))
            Yb = Y.reshape(1, Nc).broadcast_to((2, Nc))
            p, q = E.mul_many([(zc, Xb), (zs, Yb)])
            counter.add(2, tag)
            return E.trunc((p + q).sum(axis=1), k, bits=score_bits)

        (c4, s4), (c12, s12) = lookup_tables(Z)
        C = public_scores(COARSE_SHIFTS)
        cmax, i0, _ = B.s_minmax(C, mode="max", bits=cmp_bits)
        zc, zs = B.s_lookup([E.const_raw(c4, k), E.const_raw(s4, k)], i0, bits=4)
        C2 = private_scores(zc, zs, "+-3")
        cmax, idx1, _ = B.s_minmax(stack([C2[0], cmax, C2[1]]), mode="max", bits=cmp_bits)
        i1 = i0 * 3 + idx1
        zc, zs = B.s_lookup([E.const_raw(c12, k), E.const_raw(s12, k)], i1, bits=6)
        C3 = private_scores(zc, zs, "+-1")
        cmax, idx2, _ = B.s_minmax(stack([C3[0], cmax, C3[1]]), mode="max", bits=cmp_bits)
        alpha = i1 * 3 + idx2 + SHIFT_MIN
    return cmax, alpha


__all__ = ["s_match", "s_geom_trans", "s_closest_points", "s_optimal_motion", "apply_motion",
           "s_high_curvature", "s_spectral", "ScoreCounter", "reachable_shifts",
           "lookup_tables", "spectral_bits", "COARSE_SHIFTS", "SCORES_PER_RUN", "ANGLE_BITS",
           "default_coord_bits", "guard_eps"]
