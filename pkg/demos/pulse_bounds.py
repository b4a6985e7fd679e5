# Fundamental detection limits for a Gaussian force pulse on the standard
# optomechanical detector in natural units (hbar = m = omega_m = 1).
#
# Computes the output-state fidelity between the signal and no-signal
# hypotheses, the fidelity exponent, the Bayes-optimal error bound, and a
# slice of the Neyman-Pearson trade-off curve.

from qdetlim import (
    GaussianPulse,
    TimeGrid,
    bounds_report,
    forward_transform,
    log_fidelity_optomech,
    natural_units_detector,
    render,
)

det = natural_units_detector()
grid = TimeGrid(0.0, 400.0, 8192)

print("detector: gamma=%.1f omega0=%.1f (quantum-noise-cancelling readout)" % (det.gamma, det.omega0))
print("window:   T=%.0f  dt=%.3f  n=%d" % (grid.duration, grid.dt, grid.n))
print()

# sweep the pulse area; fidelity falls exponentially in signal energy
print("%8s %12s %12s %14s" % ("area", "fidelity", "Gamma_F", "Bayes bound"))
for area in (1.0, 2.0, 4.0, 8.0):
    wf = GaussianPulse(area=area, center=100.0, width=8.0)
    log_f = log_fidelity_optomech(det, forward_transform(render(wf, grid)))
    rep = bounds_report(log_f, grid.duration, 0.5)
    print("%8.1f %12.6f %12.6g %14.6g" % (area, rep.fidelity, rep.gamma_f, rep.bayes_bound))
print()

# Neyman-Pearson curve for the area 4 pulse: the lowest miss probability any
# receiver can reach at a given false-alarm rate
wf = GaussianPulse(area=4.0, center=100.0, width=8.0)
log_f = log_fidelity_optomech(det, forward_transform(render(wf, grid)))
rep = bounds_report(log_f, grid.duration, 0.5, n_curve=11)
print("Neyman-Pearson floor (area 4 pulse, F=%.4f):" % rep.fidelity)
print("%10s %14s" % ("P10", "min P01"))
for p10, p01 in rep.np_points:
    print("%10.2f %14.6g" % (p10, p01))
