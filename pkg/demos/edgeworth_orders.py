"""Edgeworth corrections to the normal tail, order by order."""

import numpy as np

from gammasum import (
    build_expansion,
    edgeworth_cdf,
    edgeworth_pdf,
    enumerate_eta,
    make_power_law_normalized,
    negative_pdf_mass,
    tail_cumulants,
)

spec = make_power_law_normalized(0.75, 0.5)
M = 10

# how many correction terms each order carries
print("order N : index vectors")
for n in range(2, 9):
    vecs = enumerate_eta(n)
    tags = ", ".join(
        "k=" + "".join(str(km) for km in v.k) + f" (H_{v.zeta_index + 1})" for v in vecs
    )
    print(f"  N = {n} : {len(vecs):2d}   {tags if n <= 5 else ''}")
print()

tc = tail_cumulants(spec, M, 8)
x = np.linspace(-6.0, 6.0, 2401)

# each order is a refinement; successive differences shrink fast because
# every extra unit of order costs a factor kappa_3 ~ 0.15
print(f"M = {M}, kappa_3 = {tc.kappa_k(3):.6f}")
print("order N : sup |F_N - F_(N-1)|   negative density mass")
prev = None
for n in range(2, 7):
    ex = build_expansion(tc, n)
    cur = edgeworth_cdf(ex, x)
    neg = negative_pdf_mass(ex)
    step = "" if prev is None else f"{np.max(np.abs(cur - prev)):.3e}"
    print(f"  N = {n} : {step:>12s}            {neg:.3e}")
    prev = cur

# the order-5 density integrates to one and reproduces the first three
# moments of the tail exactly
ex = build_expansion(tc, 5)
nodes, wts = np.polynomial.hermite.hermgauss(80)
t = nodes * np.sqrt(2.0)
w = wts / np.sqrt(np.pi)
ratio = edgeworth_pdf(ex, t) * np.sqrt(2.0 * np.pi) * np.exp(t**2 / 2.0)
print()
print(f"order 5 moments: mass = {np.sum(w * ratio):.12f}")
print(f"                 mean = {np.sum(w * t * ratio):+.2e}")
print(f"                 var  = {np.sum(w * t**2 * ratio):.12f}")
print(f"                 m3   = {np.sum(w * t**3 * ratio):.8f} vs kappa_3 above")
