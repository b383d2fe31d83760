"""Tour of the special-function layer.

Everything the solvers need reduces to the gamma function and the
two-parameter Mittag-Leffler family, scalar and matrix valued.  A few
spot identities show the implementations doing what they claim.
"""

import math

import numpy as np

from fracfund import MLParams, gamma, log_gamma, mittag_leffler, ml_scalar

# gamma: reflection and recurrence
x = 0.3
print(f"gamma({x}) * gamma(1 - {x}) = {gamma(x) * gamma(1.0 - x):.12f}")
print(f"pi / sin(pi {x})            = {math.pi / math.sin(math.pi * x):.12f}")
print(f"gamma(5) = {gamma(5.0):.1f} (= 4!)")
print(f"log_gamma(170.5) = {log_gamma(170.5):.10f} (value near the double limit)")
print()

# order one collapses the family onto the exponential
for z in (-2.0, 0.5, 3.0):
    print(f"E_(1,1)({z:+.1f}) = {ml_scalar(1.0, z):+.12f}   "
          f"exp({z:+.1f}) = {math.exp(z):+.12f}")
print()

# half order against the classical closed form exp(z^2) erfc(-z)
z = -1.0
closed = math.exp(z * z) * math.erfc(-z)
print(f"E_(1/2,1)(-1) = {ml_scalar(0.5, -1.0):.12f}")
print(f"exp(1) erfc(1) = {closed:.12f}")
print()

# matrix argument: a nilpotent matrix truncates the series after two terms
Z = np.array([[0.0, 1.0], [0.0, 0.0]])
params = MLParams(0.6, 0.8)
got = mittag_leffler(params, Z)
want = np.eye(2) / gamma(0.8) + Z / gamma(1.4)
print("nilpotent argument, alpha = 0.6, beta = 0.8:")
print(got)
print(f"series truncation error: {np.abs(got - want).max():.2e}")
print()

# the rotation block mixes sine-like and cosine-like series components
R = np.array([[0.0, 1.0], [-1.0, 0.0]])
E = mittag_leffler(MLParams(1.0, 1.0), R)
print("E_(1,1) of the rotation block vs [cos 1, sin 1; -sin 1, cos 1]:")
dev = np.abs(E - np.array([[math.cos(1), math.sin(1)],
                           [-math.sin(1), math.cos(1)]])).max()
print(f"max deviation {dev:.2e}")
