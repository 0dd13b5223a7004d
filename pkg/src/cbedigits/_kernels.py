"""Hot loops behind the public special-function and product evaluators.

Each kernel exists twice: a scalar-loop version compiled by numba and a
vectorized numpy twin. ``BACKEND`` in :mod:`cbedigits._accel` decides which
one the public names below point to; the benchmark and the tests call both.
"""
import math

import numpy as np

from ._accel import BACKEND, HAVE_NUMBA, njit

# Stirling coefficients B_{2k} / (2k (2k-1)) for k = 1..8.
STIRLING = np.array([
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
])
# |B_18| / (18 * 17), the first omitted coefficient.
STIRLING_NEXT = 43867.0 / 798.0 / 306.0
STIRLING_SHIFT = 12.0
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_{2j} / (2j)! for j = 1..8, used by the Euler-Maclaurin tail.
EM_COEF = np.array([
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
])

_LOG2 = math.log(2.0)
_BIG = 2.0 ** 400
_SMALL = 2.0 ** -400


# ---------------------------------------------------------------- log-gamma

def _loggamma_scalar_py(z, coef, nxt):
    acc = 0j
    while z.real <= 0.0 or abs(z) < STIRLING_SHIFT:
        acc += np.log(z)
        z += 1.0
    w = 1.0 / z
    w2 = w * w
    s = coef[7] + 0j
    for k in range(6, -1, -1):
        s = s * w2 + coef[k]
    s = s * w
    val = (z - 0.5) * np.log(z) - z + HALF_LOG_2PI + s - acc
    r = abs(z)
    c = math.cos(0.5 * math.atan2(z.imag, z.real))
    bound = nxt / (c ** 18 * r ** 17)
    return val, bound


_loggamma_scalar_nb = njit(_loggamma_scalar_py)


def _loggamma_nb_impl(z, coef, nxt, out, err):
    for i in range(z.shape[0]):
        v, b = _loggamma_scalar_nb(z[i], coef, nxt)
        out[i] = v
        err[i] = b


_loggamma_nb_loop = njit(_loggamma_nb_impl)


def loggamma_numba(z):
    """Principal log-gamma of a 1-d complex array (numba loop).

    Returns the values and the Stirling remainder bounds at the shifted
    arguments.
    """
    z = np.ascontiguousarray(z, dtype=np.complex128)
    out = np.empty_like(z)
    err = np.empty(z.shape, dtype=np.float64)
    _loggamma_nb_loop(z, STIRLING, STIRLING_NEXT, out, err)
    return out, err


def loggamma_numpy(z):
    """Vectorized twin of :func:`loggamma_numba`."""
    z = np.array(z, dtype=np.complex128, copy=True)
    acc = np.zeros_like(z)
    mask = (z.real <= 0.0) | (np.abs(z) < STIRLING_SHIFT)
    while mask.any():
        acc[mask] += np.log(z[mask])
        z[mask] += 1.0
        mask = (z.real <= 0.0) | (np.abs(z) < STIRLING_SHIFT)
    w = 1.0 / z
    w2 = w * w
    s = np.full_like(z, STIRLING[7])
    for k in range(6, -1, -1):
        s = s * w2 + STIRLING[k]
    s = s * w
    val = (z - 0.5) * np.log(z) - z + HALF_LOG_2PI + s - acc
    c = np.cos(0.5 * np.angle(z))
    err = STIRLING_NEXT / (c ** 18 * np.abs(z) ** 17)
    return val, err


# ------------------------------------------------------ log characteristic fn

def _log_psi_gamma_py(t, a, const):
    """Sum_j [lg(1+a_j+it) - 2 lg(1+a_j+it/2)] + const, Neumaier-compensated."""
    out = np.empty(t.shape[0], dtype=np.complex128)
    for i in range(t.shape[0]):
        ti = t[i]
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        for j in range(a.shape[0]):
            x = 1.0 + a[j]
            g1, _ = _loggamma_scalar_nb(complex(x, ti), STIRLING, STIRLING_NEXT)
            g2, _ = _loggamma_scalar_nb(complex(x, 0.5 * ti), STIRLING, STIRLING_NEXT)
            term = g1 - 2.0 * g2
            # Neumaier on real and imaginary parts
            v = term.real
            tmp = sr + v
            if abs(sr) >= abs(v):
                cr += (sr - tmp) + v
            else:
                cr += (v - tmp) + sr
            sr = tmp
            v = term.imag
            tmp = si + v
            if abs(si) >= abs(v):
                ci += (si - tmp) + v
            else:
                ci += (v - tmp) + si
            si = tmp
        out[i] = complex(sr + cr + const, si + ci)
    return out


_log_psi_gamma_nb = njit(_log_psi_gamma_py)


def _real_loggamma_sum(a, loggamma):
    vals, _ = loggamma(1.0 + np.asarray(a, dtype=np.complex128))
    return math.fsum(vals.real)


def log_psi_gamma_numba(t, a):
    """log psi(t) from the gamma-product form for each t (numba)."""
    t = np.ascontiguousarray(t, dtype=np.float64)
    a = np.ascontiguousarray(a, dtype=np.float64)
    const = _real_loggamma_sum(a, loggamma_numba)
    return _log_psi_gamma_nb(t, a, const)


def log_psi_gamma_numpy(t, a, block=1 << 20):
    """Vectorized twin of :func:`log_psi_gamma_numba` (pairwise sums)."""
    t = np.asarray(t, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    const = _real_loggamma_sum(a, loggamma_numpy)
    out = np.empty(t.shape[0], dtype=np.complex128)
    rows = max(1, block // max(1, a.shape[0]))
    x = 1.0 + a
    for s in range(0, t.shape[0], rows):
        tt = t[s:s + rows, None]
        g1, _ = loggamma_numpy((x[None, :] + 1j * tt).ravel())
        g2, _ = loggamma_numpy((x[None, :] + 0.5j * tt).ravel())
        term = (g1 - 2.0 * g2).reshape(tt.shape[0], a.shape[0])
        out[s:s + rows] = term.sum(axis=1) + const
    return out


# ------------------------------------------------------ Weierstrass partials

def _wfactor_log(u):
    # log[(1 + iu/2)^2 / (1 + iu)] in a cancellation-free form
    u2 = u * u
    re = 0.5 * math.log1p((0.0625 * u2 * u2 - 0.5 * u2) / (1.0 + u2))
    im = math.atan2(0.25 * u2 * u, 1.0 + 0.75 * u2)
    return re, im


_wfactor_log_nb = njit(_wfactor_log)


def _weierstrass_py(t, eps, ptr, checkpoints, members, n_max):
    """Partial log-products over n <= n_max for every j.

    Offsets a_j = m_j + eps_c are grouped by fractional class c. For one
    class, sum_{n=1}^{n_max} f(t/(n+m+eps)) = H(m+n_max) - H(m) with the
    running sum H(M) = sum_{i=1}^{M} f(t/(i+eps)), so a single pass over i
    serves every j in the class.
    """
    out = np.empty(t.shape[0], dtype=np.complex128)
    nmax_cp = 0
    for c in range(eps.shape[0]):
        k = ptr[c + 1] - ptr[c]
        if k > nmax_cp:
            nmax_cp = k
    hr = np.empty(nmax_cp)
    hi = np.empty(nmax_cp)
    for it in range(t.shape[0]):
        ti = t[it]
        totr = 0.0
        toti = 0.0
        ctr = 0.0
        cti = 0.0
        for c in range(eps.shape[0]):
            p0 = ptr[c]
            p1 = ptr[c + 1]
            e = eps[c]
            sr = 0.0
            cr = 0.0
            si = 0.0
            ci = 0.0
            q = 0
            # checkpoint value 0 means H(0) = 0
            while q < p1 - p0 and checkpoints[p0 + q] == 0:
                hr[q] = 0.0
                hi[q] = 0.0
                q += 1
            last = checkpoints[p1 - 1]
            for i in range(1, last + 1):
                re, im = _wfactor_log_nb(ti / (i + e))
                tmp = sr + re
                if abs(sr) >= abs(re):
                    cr += (sr - tmp) + re
                else:
                    cr += (re - tmp) + sr
                sr = tmp
                tmp = si + im
                if abs(si) >= abs(im):
                    ci += (si - tmp) + im
                else:
                    ci += (im - tmp) + si
                si = tmp
                while q < p1 - p0 and checkpoints[p0 + q] == i:
                    hr[q] = sr + cr
                    hi[q] = si + ci
                    q += 1
            for mi in range(members.shape[0] // 2):
                if members[2 * mi] < p0 or members[2 * mi] >= p1:
                    continue
                lo = members[2 * mi] - p0
                hi_idx = members[2 * mi + 1] - p0
                vr = hr[hi_idx] - hr[lo]
                vi = hi[hi_idx] - hi[lo]
                tmp = totr + vr
                if abs(totr) >= abs(vr):
                    ctr += (totr - tmp) + vr
                else:
                    ctr += (vr - tmp) + totr
                totr = tmp
                tmp = toti + vi
                if abs(toti) >= abs(vi):
                    cti += (toti - tmp) + vi
                else:
                    cti += (vi - tmp) + toti
                toti = tmp
        out[it] = complex(totr + ctr, toti + cti)
    return out


_weierstrass_nb = njit(_weierstrass_py)


def weierstrass_plan(floors, fracs, n_max):
    """Group offsets by fractional part and lay out the checkpoint tables."""
    floors = np.asarray(floors, dtype=np.int64)
    fracs = np.asarray(fracs, dtype=np.float64)
    classes = {}
    for m, e in zip(floors.tolist(), fracs.tolist()):
        classes.setdefault(e, []).append(m)
    eps = np.array(sorted(classes), dtype=np.float64)
    ptr = [0]
    checkpoints = []
    members = []
    for e in eps.tolist():
        ms = classes[e]
        pts = sorted(set(ms) | {m + n_max for m in ms})
        index = {v: i for i, v in enumerate(pts)}
        base = len(checkpoints)
        checkpoints.extend(pts)
        for m in ms:
            members.extend((base + index[m], base + index[m + n_max]))
        ptr.append(len(checkpoints))
    return (eps, np.array(ptr, dtype=np.int64), np.array(checkpoints, dtype=np.int64),
            np.array(members, dtype=np.int64), {e: classes[e] for e in eps.tolist()})


def log_weierstrass_numba(t, floors, fracs, n_max):
    """Partial Weierstrass log-product, numba pass with shared prefix sums."""
    t = np.ascontiguousarray(t, dtype=np.float64)
    eps, ptr, cps, members, _ = weierstrass_plan(floors, fracs, n_max)
    return _weierstrass_nb(t, eps, ptr, cps, members, int(n_max))


def log_weierstrass_numpy(t, floors, fracs, n_max):
    """Vectorized twin: each j summed directly with pairwise ``np.sum``."""
    t = np.asarray(t, dtype=np.float64)
    eps, _, _, _, classes = weierstrass_plan(floors, fracs, n_max)
    out = np.zeros(t.shape[0], dtype=np.complex128)
    for e, ms in classes.items():
        ms = np.asarray(ms, dtype=np.int64)
        length = int(ms.max()) + n_max
        idx = np.arange(1, length + 1, dtype=np.float64) + e
        for k, ti in enumerate(t.tolist()):
            u = ti / idx
            u2 = u * u
            re = 0.5 * np.log1p((0.0625 * u2 * u2 - 0.5 * u2) / (1.0 + u2))
            im = np.arctan2(0.25 * u2 * u, 1.0 + 0.75 * u2)
            parts_r = [re[m:m + n_max].sum() for m in ms.tolist()]
            parts_i = [im[m:m + n_max].sum() for m in ms.tolist()]
            out[k] += complex(math.fsum(parts_r), math.fsum(parts_i))
    return out


# ------------------------------------------------------------- k-products

def _kprod_py(t, starts, counts):
    """log of prod_j prod_{i<counts_j} (v+it) v / (v+it/2)^2, v = starts_j + i.

    The products are formed by plain complex multiplication; the running
    value is rescaled by powers of two to stay inside the float range.
    """
    out = np.empty(t.shape[0], dtype=np.complex128)
    for it in range(t.shape[0]):
        ti = t[it]
        z = 1.0 + 0j
        expo = 0
        for j in range(starts.shape[0]):
            v0 = starts[j]
            for i in range(counts[j]):
                v = v0 + i
                num = complex(v, ti) * v
                den = complex(v, 0.5 * ti)
                z = z * num / (den * den)
                m = abs(z)
                if m < _SMALL:
                    z = z * _BIG
                    expo -= 400
                elif m > _BIG:
                    z = z * _SMALL
                    expo += 400
        out[it] = np.log(z) + expo * _LOG2
    return out


_kprod_nb = njit(_kprod_py)


def log_kprod_numba(t, starts, counts):
    """Scaled k-products, numba loop."""
    return _kprod_nb(np.ascontiguousarray(t, dtype=np.float64),
                     np.ascontiguousarray(starts, dtype=np.float64),
                     np.ascontiguousarray(counts, dtype=np.int64))


def log_kprod_numpy(t, starts, counts, block=16):
    """Vectorized twin: plain products inside blocks of ``block`` factors.

    Each block factor has modulus at least about 4v/|t|, so a block of 16
    cannot underflow for |t| below 1e18; block logs are summed pairwise.
    """
    t = np.asarray(t, dtype=np.float64)
    starts = np.asarray(starts, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.int64)
    if counts.sum() == 0:
        return np.zeros(t.shape[0], dtype=np.complex128)
    v = np.concatenate([s + np.arange(c, dtype=np.float64) for s, c in zip(starts, counts)])
    pad = (-v.shape[0]) % block
    out = np.empty(t.shape[0], dtype=np.complex128)
    for k, ti in enumerate(t.tolist()):
        den = v + 0.5j * ti
        f = (v + 1j * ti) * v / (den * den)
        f = np.concatenate([f, np.ones(pad, dtype=np.complex128)]).reshape(-1, block)
        out[k] = np.log(np.prod(f, axis=1)).sum()
    return out


# ------------------------------------------------------------ Hurwitz zeta

def _hurwitz_py(l, s, coef):
    """sum_{n>=1} (n+s)^{-l}: direct terms then an Euler-Maclaurin tail."""
    out = np.empty(s.shape[0])
    for k in range(s.shape[0]):
        x = s[k]
        direct = 0.0
        a = x + 1.0
        while a < 16.0 + l:
            direct += a ** (-l)
            a += 1.0
        # tail: sum_{i>=0} (a+i)^{-l}
        tail = a ** (1.0 - l) / (l - 1.0) + 0.5 * a ** (-l)
        rising = float(l)
        p = a ** (-l - 1.0)
        inv2 = 1.0 / (a * a)
        for j in range(coef.shape[0]):
            tail += coef[j] * rising * p
            rising *= (l + 2 * j + 1.0) * (l + 2 * j + 2.0)
            p *= inv2
        out[k] = tail + direct
    return out


_hurwitz_nb = njit(_hurwitz_py)


def hurwitz_numba(l, s):
    """Hurwitz zeta on a 1-d array of shifts (numba loop)."""
    return _hurwitz_nb(int(l), np.ascontiguousarray(s, dtype=np.float64), EM_COEF)


def hurwitz_numpy(l, s):
    """Vectorized twin of :func:`hurwitz_numba`."""
    s = np.asarray(s, dtype=np.float64)
    a = s + 1.0
    direct = np.zeros_like(s)
    mask = a < 16.0 + l
    # small terms first is not needed here: at most 16+l terms of similar size
    while mask.any():
        direct[mask] += a[mask] ** (-float(l))
        a[mask] += 1.0
        mask = a < 16.0 + l
    tail = a ** (1.0 - l) / (l - 1.0) + 0.5 * a ** (-float(l))
    rising = float(l)
    p = a ** (-l - 1.0)
    inv2 = 1.0 / (a * a)
    for j in range(EM_COEF.shape[0]):
        tail += EM_COEF[j] * rising * p
        rising *= (l + 2 * j + 1.0) * (l + 2 * j + 2.0)
        p = p * inv2
    return tail + direct


# ------------------------------------------------------------- dispatch

if BACKEND == "numba":
    loggamma = loggamma_numba
    log_psi_gamma = log_psi_gamma_numba
    log_weierstrass = log_weierstrass_numba
    log_kprod = log_kprod_numba
    hurwitz = hurwitz_numba
else:
    loggamma = loggamma_numpy
    log_psi_gamma = log_psi_gamma_numpy
    log_weierstrass = log_weierstrass_numpy
    log_kprod = log_kprod_numpy
    hurwitz = hurwitz_numpy

KERNELS = {
    "loggamma": (loggamma_numba, loggamma_numpy),
    "log_psi_gamma": (log_psi_gamma_numba, log_psi_gamma_numpy),
    "log_weierstrass": (log_weierstrass_numba, log_weierstrass_numpy),
    "log_kprod": (log_kprod_numba, log_kprod_numpy),
    "hurwitz": (hurwitz_numba, hurwitz_numpy),
}
"""Name -> (numba, numpy) pairs for benchmarks and backend cross-checks."""

__all__ = ["loggamma", "log_psi_gamma", "log_weierstrass", "log_kprod", "hurwitz",
           "KERNELS", "HAVE_NUMBA", "BACKEND"]
