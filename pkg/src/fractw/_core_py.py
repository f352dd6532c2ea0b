"""Pure-Python (numpy) marching core.

Mirrors `_core.pyx` exactly: Heun predictor-corrector for

    phi' = psi,    tau psi' = h(phi) - D^alpha[phi],

where the memory term at node m is evaluated from the split at j0
(j0 = 0 without windowing, j0 = m - window with it):

    D_m = tail[m]
          + mean(psi)|_[0, j0] * (pow[m] - pow[m - j0])      (pre-window closure)
          + pow[m - j0] * psi_j0                             (boundary term)
          + kq * (edge[m - j0] psi'_j0 + sum body[m-i] psi'_i)
          + c_new * psi'_m,

with pow[k] = d_alpha/(1-alpha) (k dx)^(1-alpha). The newest-node weight
c_new makes psi'_m implicit; since D is linear in it,
psi'_m = (h(phi_m) - rest) / (tau + c_new) solves the stage exactly.

window = 0 keeps the full O(N^2) memory (the default protocol); a positive
window truncates the product-rule quadrature to the last `window` nodes and
closes the older history with its exact kernel mass times the running mean
of psi there (an approximation, documented as such).

Status codes: 0 reached n_max, 1 blow-down (phi < floor), 2 non-finite.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

STATUS_DONE = 0
STATUS_BLOWDOWN = 1
STATUS_NONFINITE = 2


def march(phi0, psi0, tau, dx, n_max, use_modified, c, phi_minus, junction,
          qa, qb, qc, qd, qe, tail, pow_arr, body, edge, c_new, kq, floor,
          window=0):
    pm3 = phi_minus ** 3

    def h(phi):
        if use_modified and phi < junction:
            return qa * phi ** 4 + qb * phi ** 3 + qc * phi ** 2 + qd * phi + qe
        return -c * (phi - phi_minus) + phi ** 3 - pm3

    n_alloc = n_max + 1
    phi = np.empty(n_alloc)
    psi = np.empty(n_alloc)
    pp = np.empty(n_alloc)          # psi' accepted at each node
    dal = np.empty(n_alloc)         # stored D^alpha at each node
    # reversed psi' storage: ppr[n_max - i] = pp[i]; keeps the memory dot
    # product over two contiguous forward slices (no per-step reversal copy)
    ppr = np.empty(n_alloc)

    phi[0] = phi0
    psi[0] = psi0
    dal[0] = tail[0]
    pp[0] = (h(phi0) - dal[0]) / tau
    ppr[n_max] = pp[0]

    status = STATUS_DONE
    n_done = n_max
    denom = tau + c_new
    t_acc = 0.0        # trapezoid integral of psi over [0, j0]
    j_prev = 0

    # overflow to inf mirrors the compiled core; the finiteness check below
    # turns it into a NUMERICAL_FAILURE termination
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_max):
            m = k + 1
            phi_p = phi[k] + dx * psi[k]
            psi_p = psi[k] + dx * pp[k]

            j0 = m - window if (window and m > window) else 0
            while j_prev < j0:
                t_acc += 0.5 * dx * (psi[j_prev] + psi[j_prev + 1])
                j_prev += 1

            rest = tail[m]
            if j0 > 0:
                rest += (t_acc / (j0 * dx)) * (pow_arr[m] - pow_arr[m - j0])
            rest += pow_arr[m - j0] * psi[j0] + kq * edge[m - j0] * pp[j0]
            if m - j0 >= 2:
                # sum_{i=j0+1}^{m-1} body[m-i] pp[i], gaps 1 .. m-j0-1
                off = n_max - m
                rest += kq * float(np.dot(body[1:m - j0],
                                          ppr[off + 1:off + m - j0]))

            pp_pred = (h(phi_p) - rest) / denom

            phi[m] = phi[k] + 0.5 * dx * (psi[k] + psi_p)
            psi[m] = psi[k] + 0.5 * dx * (pp[k] + pp_pred)

            if not (math.isfinite(phi[m]) and math.isfinite(psi[m])):
                status = STATUS_NONFINITE
                n_done = k
                break

            pp[m] = (h(phi[m]) - rest) / denom
            ppr[n_max - m] = pp[m]
            dal[m] = rest + c_new * pp[m]

            if phi[m] < floor:
                status = STATUS_BLOWDOWN
                n_done = m
                break
        else:
            n_done = n_max

    n = n_done + 1
    return phi[:n].copy(), psi[:n].copy(), pp[:n].copy(), dal[:n].copy(), status
