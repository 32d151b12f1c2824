"""Simulator for trapped-ion decoherence caused by polarization of the
residual background gas.

Submodules
----------
states            basis conventions, state containers, observables
pulses            closed-form carrier / red / blue sideband pulses
carrier_pfunc     Gaussian P-function dynamics in the carrier regime
ajc_hierarchy     moment hierarchy for the damped blue-sideband drive
lindblad_oracle   density-matrix reference solver
coupling_estimates  collision rates and quantized gas coupling
heuristic_fit     phenomenological damped-Rabi formula
scenarios, cli    configuration, presets and the ``iondecay`` command
"""

__version__ = "0.1.0"
