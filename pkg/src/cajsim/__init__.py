"""Cooperative anti-jamming simulation library for uplink sensor networks.

The package is organized bottom-up:

- :mod:`cajsim.mathcore`: numerical kernels (SVD conventions, basis
  completion, special functions, complex Gaussian sampling).
- :mod:`cajsim.channel`: block and time-correlated Rayleigh fading.
- :mod:`cajsim.signal`: frame geometry, QPSK, pilots, received-signal assembly.
- :mod:`cajsim.estimator`: jamming-direction estimators.
- :mod:`cajsim.caj`: projection, transformed-channel fit, zero-forcing
  detection, and the per-frame pipeline.
- :mod:`cajsim.analysis`: closed-form predictions and Monte Carlo metrics.
- :mod:`cajsim.harness`: scenario catalog, seeded parallel runner, CSV output.

The ``cajsim`` command line front end lives in :mod:`cajsim.cli`.
"""

__version__ = "0.1.0"
