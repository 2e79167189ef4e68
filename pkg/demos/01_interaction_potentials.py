"""Tour of the interaction potentials: shapes, gradients, Fourier modes.

The three simulation potentials share unit depth and comparable width, so
their thermodynamics lands in the same parameter range; the wrapped
Gaussian exists to validate the quadrature-based Fourier coefficients
against a closed form.

Run:  python3 demos/01_interaction_potentials.py
"""

import numpy as np

from torusclusters import GEM, Gaussian, Morse, WrappedGaussian
from torusclusters.potentials import evaluate, fourier_coefficient, gradient

BOX = 10.0

specs = {
    "gaussian": Gaussian(sigma2=0.5),
    "morse": Morse(a=2.0, d_e=1.0),
    "gem-4": GEM(sigma2=0.5, alpha=4.0),
}

print("potential values and half-box gradients")
grad_label = "|W'(L/2)|"
print(f"{'name':>10s} {'W(0)':>8s} {'W(1)':>9s} {'W(2)':>9s} {grad_label:>10s}")
for name, spec in specs.items():
    wp = abs(float(np.asarray(spec.radial_derivative(BOX / 2))))
    print(
        f"{name:>10s} {evaluate(spec, 0.0):8.4f} {evaluate(spec, 1.0):9.5f} "
        f"{evaluate(spec, 2.0):9.5f} {wp:10.2e}"
    )

print("\ngradient at displacement (1, 0):")
for name, spec in specs.items():
    print(f"{name:>10s}: {gradient(spec, np.array([1.0, 0.0]))}")

print("\nFourier coefficients what(k_n), k_n = 2 pi n / L:")
header = " ".join(f"{f'n={n}':>10s}" for n in range(5))
print(f"{'':>10s} {header}")
for name, spec in specs.items():
    vals = [fourier_coefficient(spec, 2 * np.pi * n / BOX, BOX) for n in range(5)]
    print(f"{name:>10s} " + " ".join(f"{v:10.5f}" for v in vals))

print("\nwrapped Gaussian: quadrature vs closed form")
wrapped = WrappedGaussian(sigma2=0.5, box=BOX, n_images=3)
for n in (0, 1, 2, 3):
    k = 2 * np.pi * n / BOX
    quad = fourier_coefficient(wrapped, k, BOX)
    closed = wrapped.fourier_analytic(k)
    print(f"  n={n}: quadrature {quad:+.10f}  closed form {closed:+.10f}  diff {abs(quad-closed):.1e}")
