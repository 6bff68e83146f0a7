"""Normal approximation error of the tail and when it fails.

The centered tail sum past truncation level M, scaled to unit variance,
is close to standard normal whenever the skewness of the scaled tail is
small.  The uniform CDF error is bounded by 0.7056 times that skewness.
For power-law weights lambda_n = C n^(-gamma) the skewness decays like a
power of M, so the bound shrinks and the normal tail replacement that
the full pipeline relies on gets better and better.

Geometrically decaying weights break this: every tail looks like its own
first term, the skewness never decays, and the support of the scaled
tail stays bounded below.  No normal limit is possible there.
"""

import math

from gammasum import (
    ExplicitWeights,
    GammaSumSpec,
    be_condition_ratio,
    berry_esseen_bound,
    make_power_law_normalized,
    sigma_M,
    support_lower_bound,
    tail_cumulants,
)

spec = make_power_law_normalized(0.75, 0.5)
print(f"power-law weights, gamma = 0.75, r = 0.5, C = {spec.weights.scale:.6f}")
print()

print(" M    sigma_M     kappa_3    BE bound    ratio*sqrt(M)")
for m in (1, 2, 5, 10, 20, 50, 100, 200):
    sig = sigma_M(spec, m)
    k3 = tail_cumulants(spec, m, 3).kappa_k(3)
    bound = berry_esseen_bound(spec, m)
    ratio = be_condition_ratio(spec, m)
    print(f"{m:4d}   {sig:.5f}   {k3:.6f}   {bound:.6f}   {ratio * math.sqrt(m):.4f}")

# gamma = 3/4 puts the ratio at about 0.283 / sqrt(M); the last column
# should be flattening toward that constant
print()
print("ratio * sqrt(M) approaches a constant: the bound decays like M^(-1/2)")
print()

# the counterexample: lambda_n = 2^(-n-1)
geo = GammaSumSpec(
    r=0.5, weights=ExplicitWeights(tuple(2.0 ** -(n + 1) for n in range(1, 81)))
)
print("geometric weights lambda_n = 2^(-n-1), r = 0.5")
print(" M    ratio      support lower bound")
for m in (1, 2, 5, 10, 20):
    print(
        f"{m:4d}   {be_condition_ratio(geo, m):.5f}   "
        f"{support_lower_bound(geo, m):+.12f}"
    )
print()
print(f"ratio is stuck near {be_condition_ratio(geo, 20):.4f}; the scaled tail")
print(f"never extends below {support_lower_bound(geo, 20):+.6f} = -sqrt(3 r),")
print("so its distribution cannot converge to a normal")
