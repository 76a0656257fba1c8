"""Independent reference implementations used only by the tests.

Each one takes a different computational route from the library code it
checks.
"""

import math

import mpmath
import numpy as np
from scipy import special, stats


def bleu_reference(reference, candidate, max_order=4, smoothing=False):
    """Plain list-based n-gram counting, no Counter."""
    if not candidate:
        return 0.0
    logs = []
    for n in range(1, max_order + 1):
        cand = [tuple(candidate[i:i + n]) for i in range(len(candidate) - n + 1)]
        ref = [tuple(reference[i:i + n]) for i in range(len(reference) - n + 1)]
        pool = list(ref)
        hits = 0
        for g in cand:
            if g in pool:
                pool.remove(g)
                hits += 1
        num, den = hits, len(cand)
        if smoothing and n > 1:
            num, den = num + 1, den + 1
        if num == 0 or den == 0:
            return 0.0
        logs.append(math.log(num) - math.log(den))
    geo = math.exp(sum(logs) / max_order)
    c, r = len(candidate), len(reference)
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return bp * geo


def half_erfc(x):
    return float(mpmath.erfc(mpmath.sqrt(x)) / 2)


def alpha_mu_power(alpha, mu, size, rng):
    """|h|^2 through scipy's generalized gamma: R^2 = c * Y**(2/alpha), Y ~ Gamma(mu, 1)."""
    q = 2.0 / alpha
    scale = special.gamma(mu) / special.gamma(mu + q)
    y = stats.gengamma.rvs(a=mu, c=1.0 / q, size=size, random_state=rng)
    return scale * y


def dep_reference(p_t, p_j, g_tw, g_jw, k2, tau, alpha, mu, n, seed):
    """Paired H0/H1 radiometer errors counted one hypothesis at a time."""
    rng = np.random.RandomState(seed)
    h_tw = alpha_mu_power(alpha, mu, n, rng)
    h_jw = alpha_mu_power(alpha, mu, n, rng)
    idle = k2 + p_j * g_jw * h_jw
    busy = idle + p_t * g_tw * h_tw
    fa = np.count_nonzero(idle > tau) / n
    md = np.count_nonzero(busy < tau) / n
    errors = (idle > tau).astype(float) + (busy < tau)
    return fa + md, errors.std(ddof=1) / math.sqrt(n)


def central_difference(f, params, eps=1e-6):
    """Gradient of scalar ``f()`` w.r.t. each array in ``params`` (perturbed in place)."""
    grads = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            old = p[i]
            p[i] = old + eps
            up = f()
            p[i] = old - eps
            down = f()
            p[i] = old
            g[i] = (up - down) / (2 * eps)
        grads.append(g)
    return grads


def relative_error(analytic, numeric):
    a = np.concatenate([np.ravel(x) for x in analytic])
    b = np.concatenate([np.ravel(x) for x in numeric])
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-300))
