"""
Checking closed forms against a covariance oracle
=================================================

Every formula in the library has an independent route: build the joint
Gaussian covariance of inputs, noises and outputs, then compute entropies
and mutual informations from it numerically.
"""

# %%
import numpy as np

from manytoone import StandardChannel, StrategySpec, rate_of
from manytoone.oracle import (
    GaussianSystem,
    McConfig,
    channel_system,
    gaussian_entropy,
    gaussian_mi,
    mc_entropy,
    rate_via_mi,
    smart_genie_mi,
    verify_lemma_li,
)

# %%
# One scalar first: y = x + n with unit variances carries half a bit.
sys = GaussianSystem.linear(np.eye(2), ["x", "n"], {"y": {"x": 1.0, "n": 1.0}})
print(gaussian_mi(sys, "x", "y"))

# %%
# The closed-form sum-rates agree with the oracle.
ch = StandardChannel(4, [1.2, 0.7, 2.0], [1.0, 3.0, 0.5, 2.0])
for spec in (StrategySpec.xc({1, 2}), StrategySpec.xc({1, 2, 3, 4}), StrategySpec.ic({2, 4})):
    print(spec.label, rate_of(ch, spec).sum_rate_bits, rate_via_mi(ch, spec))

# %%
# A Monte-Carlo estimate of an output entropy, with its standard error.
y = channel_system(ch)
est = mc_entropy(y, ["y1", "y2"], McConfig(seed=42, samples=10**6))
print(est.estimate, "+/-", est.stderr, "exact", gaussian_entropy(y, ["y1", "y2"]))

# %%
# The smart genie tells receiver 1 nothing it does not already know, while
# a mis-scaled genie leaks information.
ch3 = StandardChannel(3, [2.0, 0.6], [1.0, 1.0, 2.0])
print(smart_genie_mi(ch3), smart_genie_mi(ch3, eta_scale=1.1))

# %%
# The entropy-difference equality behind the outer bounds.
rep = verify_lemma_li([1.0, 4.0], [0.6, 0.5], sigma2=1.0)
print(rep.status, rep.lhs, rep.rhs)
