"""Numpy implementation of the batched kernels.

Mirrors ``_kernels.pyx`` operation for operation (same products, same
summation order) so both backends produce bit-identical outputs.
Angles arrive as precomputed (cos, sin) half-angle pairs.
"""
import math

import numpy as np

BACKEND = "python"

_S = 1.0 / math.sqrt(2.0)

# Real Bell coefficients B[k][2a+b], walked in sampling order phi+, phi-, psi+, psi-.
_BELL = (
    (_S, 0.0, 0.0, _S),
    (_S, 0.0, 0.0, -_S),
    (0.0, _S, _S, 0.0),
    (0.0, _S, -_S, 0.0),
)


def _select(u, probs):
    """Index of the first cumulative bin exceeding u * total."""
    total = probs[0] + probs[1] + probs[2] + probs[3]
    thresh = u * total
    n = thresh.shape[0]
    pick = np.full(n, -1, dtype=np.int8)
    for k in range(3, -1, -1):
        fallback = (pick < 0) & (probs[k] > 0.0)
        pick[fallback] = k
    acc = np.zeros(n)
    chosen = np.zeros(n, dtype=bool)
    for k in range(4):
        acc = acc + probs[k]
        hit = (~chosen) & (thresh < acc)
        pick[hit] = k
        chosen |= hit
    return pick


def bell_teleport(a_re, a_im, b_re, b_im, u):
    """Bell-measure (message, Alice's half) of message (x) phi+ for each row."""
    n = a_re.shape[0]
    # psi[a, b, c] with psi = m[a] * phi+[b, c]; nonzero only at b == c.
    psi_re = np.zeros((8, n))
    psi_im = np.zeros((8, n))
    for a, (mr, mi) in enumerate(((a_re, a_im), (b_re, b_im))):
        for b in range(2):
            psi_re[4 * a + 2 * b + b] = mr * _S
            psi_im[4 * a + 2 * b + b] = mi * _S
    res_re = np.zeros((4, 2, n))
    res_im = np.zeros((4, 2, n))
    probs = []
    for k in range(4):
        for c in range(2):
            rr = np.zeros(n)
            ri = np.zeros(n)
            for ab in range(4):
                w = _BELL[k][ab]
                rr = rr + w * psi_re[2 * ab + c]
                ri = ri + w * psi_im[2 * ab + c]
            res_re[k, c] = rr
            res_im[k, c] = ri
        probs.append(
            res_re[k, 0] * res_re[k, 0] + res_im[k, 0] * res_im[k, 0]
            + res_re[k, 1] * res_re[k, 1] + res_im[k, 1] * res_im[k, 1]
        )
    pick = _select(u, probs)
    rows = np.arange(n)
    p = np.stack(probs)[pick, rows]
    norm = np.sqrt(p)
    bob_re = np.empty((n, 2))
    bob_im = np.empty((n, 2))
    for c in range(2):
        bob_re[:, c] = res_re[pick, c, rows] / norm
        bob_im[:, c] = res_im[pick, c, rows] / norm
    return pick, bob_re, bob_im


def _measure(x0, x1, y0, y1, u):
    """Shared sampling step; (x, y) are the bit-0 / bit-1 branch amplitudes."""
    p0 = x0 * x0 + x1 * x1
    p1 = y0 * y0 + y1 * y1
    bit = (u * (p0 + p1) >= p0).astype(np.int8)
    p = np.where(bit == 0, p0, p1)
    norm = np.sqrt(p)
    r0 = np.where(bit == 0, x0, y0) / norm
    r1 = np.where(bit == 0, x1, y1) / norm
    return bit, r0, r1


def _measure_second(psi, c, s, u, active=None):
    """Measure qubit 1 of a real 2-qubit state psi[4, n]; update psi in place."""
    x0 = c * psi[0] + s * psi[1]
    x1 = c * psi[2] + s * psi[3]
    y0 = -s * psi[0] + c * psi[1]
    y1 = -s * psi[2] + c * psi[3]
    bit, r0, r1 = _measure(x0, x1, y0, y1, u)
    e0 = np.where(bit == 0, c, -s)
    e1 = np.where(bit == 0, s, c)
    new = np.stack([e0 * r0, e1 * r0, e0 * r1, e1 * r1])
    if active is None:
        psi[:] = new
    else:
        psi[:, active] = new[:, active]
    return bit


def _measure_first(psi, c, s, u):
    x0 = c * psi[0] + s * psi[2]
    x1 = c * psi[1] + s * psi[3]
    y0 = -s * psi[0] + c * psi[2]
    y1 = -s * psi[1] + c * psi[3]
    bit, r0, r1 = _measure(x0, x1, y0, y1, u)
    e0 = np.where(bit == 0, c, -s)
    e1 = np.where(bit == 0, s, c)
    psi[:] = np.stack([e0 * r0, e0 * r1, e1 * r0, e1 * r1])
    return bit


def singlet_pairs(alice_c, alice_s, agent_c, agent_s, eve_mask, eve_c, eve_s, u):
    """Measure psi- pairs: optional Eve on the agent's qubit, then Alice, then agent.

    ``u`` has shape (n, 3): columns feed Eve, Alice, agent respectively.
    Returns (alice_bits, agent_bits, eve_bits); eve_bits is 0 where untouched.
    """
    n = alice_c.shape[0]
    psi = np.zeros((4, n))
    psi[1] = _S
    psi[2] = -_S
    active = eve_mask.astype(bool)
    eve_bits = _measure_second(psi, eve_c, eve_s, u[:, 0], active)
    eve_bits = np.where(active, eve_bits, 0).astype(np.int8)
    alice_bits = _measure_first(psi, alice_c, alice_s, u[:, 1])
    agent_bits = _measure_second(psi, agent_c, agent_s, u[:, 2])
    return alice_bits, agent_bits, eve_bits


def _measure_single(v0, v1, c, s, u):
    x = c * v0 + s * v1
    y = -s * v0 + c * v1
    p0 = x * x
    p1 = y * y
    bit = (u * (p0 + p1) >= p0).astype(np.int8)
    return bit


def photon_trips(prep_c, prep_s, prep_bit, eve_mask, eve_c, eve_s, flip, meas_c, meas_s, u):
    """Single photons: prepare, optional intercept-resend, optional u3 flip, measure.

    ``u`` has shape (n, 2): column 0 feeds Eve, column 1 the final measurement.
    Returns (eve_bits, out_bits); eve_bits is 0 where untouched.
    """
    one = prep_bit == 1
    v0 = np.where(one, -prep_s, prep_c)
    v1 = np.where(one, prep_c, prep_s)
    active = eve_mask.astype(bool)
    eve_bits = _measure_single(v0, v1, eve_c, eve_s, u[:, 0])
    eve_bits = np.where(active, eve_bits, 0).astype(np.int8)
    e_one = eve_bits == 1
    v0 = np.where(active, np.where(e_one, -eve_s, eve_c), v0)
    v1 = np.where(active, np.where(e_one, eve_c, eve_s), v1)
    flipped = flip.astype(bool)
    v0, v1 = np.where(flipped, v1, v0), np.where(flipped, -v0, v1)
    out_bits = _measure_single(v0, v1, meas_c, meas_s, u[:, 1])
    return eve_bits, out_bits
