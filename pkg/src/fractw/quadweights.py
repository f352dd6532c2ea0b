"""Product-integration weights for the regularized memory kernel.

The marching scheme needs, at grid node m,

    I_m = int_{x0}^{x0 + m dx} psi'(y) (xi_m - y)^beta dy,   beta = 1 - alpha,

with psi' approximated linearly on each panel and the kernel moments taken
exactly. Writing n = m - j for the panel gap, the per-panel moments are

    WB(n) = int_0^1 t (n - t)^beta dt      (weight of the right panel node)
    WC(n) = int_0^1 (1-t) (n - t)^beta dt  (weight of the left panel node)

and the assembled rule is

    I_m = dx^(beta+1) [ WC(m) psi'_0
                        + sum_{i=1}^{m-1} (WC(m-i) + WB(m-i+1)) psi'_i
                        + WB(1) psi'_m ].

Because psi' is reproduced exactly when piecewise linear, the rule is O(dx^2)
uniformly in beta, unlike plain trapezoid on the same integrand whose endpoint
derivative singularity degrades it to O(dx^(1+beta)).
"""

from __future__ import annotations

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL_T = 0.5 * (_GL_NODES + 1.0)          # nodes mapped to (0, 1)
_GL_W = 0.5 * _GL_WEIGHTS

_cache: dict = {}


def product_weights(beta: float, n: int):
    """Tables (body, edge, newest) of the product rule up to gap n.

    body[k]  = WC(k) + WB(k+1)  (weight of an interior history node at gap k)
    edge[k]  = WC(k)            (weight of the oldest node, gap k)
    newest   = WB(1)            (weight of the target node itself)
    Index 0 of both arrays is unused (gap >= 1).
    """
    key = (float(beta), int(n))
    hit = _cache.get(key)
    if hit is not None:
        return hit

    gaps = np.arange(1, n + 2, dtype=float)        # WB needed up to gap n+1
    # (gap - t)^beta on Gauss-Legendre nodes; exact analytic values at gap 1,
    # where the integrand is only C^0 at t = 1.
    kernel = (gaps[:, None] - _GL_T[None, :]) ** beta
    wb = kernel @ (_GL_W * _GL_T)
    wc = kernel @ (_GL_W * (1.0 - _GL_T))
    wb[0] = 1.0 / ((beta + 1.0) * (beta + 2.0))
    wc[0] = 1.0 / (beta + 2.0)

    edge = np.empty(n + 1)
    body = np.empty(n + 1)
    edge[0] = body[0] = np.nan
    edge[1:] = wc[:n]
    body[1:] = wc[:n] + wb[1:n + 1]
    newest = float(wb[0])

    out = (body, edge, newest)
    if len(_cache) > 8:
        _cache.clear()
    _cache[key] = out
    return out
