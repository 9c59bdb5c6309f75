"""
Polymer-quantized gravitational bouncer.

This package contains:
- specfun: Airy and real-order Bessel functions, Airy zeros
- lattice: tridiagonal lattice Hamiltonian, Sturm bisection, inverse iteration
- spectrum: Bessel quantization condition, level tables, density profiles
- continuum: the Schrodinger (Airy) bouncer and the continuum limit
- transitions: vibration-induced transitions, lifetimes, the vibration bound
- radiative: quadrupole emission rates and their polymer corrections
- experiment: critical heights and the energy-resolution bound on lambda
- commands: report builders and writers used by run.py
"""
