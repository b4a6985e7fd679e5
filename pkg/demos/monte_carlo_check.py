# Sampled receivers against their analytic error probabilities.
#
# The homodyne simulator synthesizes the filtered photocurrent statistic
# trial by trial; the Kennedy simulator draws photon counts.  Both should
# land within a few standard errors of the closed forms.

import math

from qdetlim import (
    GaussianPulse,
    TimeGrid,
    forward_transform,
    homodyne_snr,
    kennedy_p01_deterministic,
    natural_units_detector,
    render,
    simulate_homodyne_mc,
    simulate_kennedy_mc,
)

det = natural_units_detector()
trials = 200_000

###############
# homodyne
###############
grid = TimeGrid(0.0, 100.0, 64)
unit = GaussianPulse(area=1.0, center=50.0, width=5.0)
s2_unit = homodyne_snr(det, forward_transform(render(unit, grid)))

print("homodyne, symmetric threshold, %d trials per hypothesis:" % trials)
print("%8s %12s %12s %12s %10s" % ("sigma", "analytic", "P10 hat", "P01 hat", "|dev|/SE"))
for sigma in (0.5, 1.0, 1.5):
    wf = GaussianPulse(area=sigma / math.sqrt(s2_unit), center=50.0, width=5.0)
    res = simulate_homodyne_mc(det, wf, grid, trials, 0.0, 0)
    target = 0.5 * math.erfc(sigma)
    se = math.sqrt(target * (1.0 - target) / trials)
    worst = max(abs(res.mc.p10_hat - target), abs(res.mc.p01_hat - target)) / se
    print("%8.1f %12.6f %12.6f %12.6f %10.2f" % (sigma, target, res.mc.p10_hat, res.mc.p01_hat, worst))
print()

###############
# Kennedy
###############
# fine grid: the analytic reference cross-checks its time and frequency routes
grid = TimeGrid(0.0, 400.0, 16384)
print("Kennedy photon counting, %d trials:" % trials)
print("%12s %12s %12s %10s" % ("mean count", "exp(-mu)", "P01 hat", "|dev|/SE"))
unit = render(GaussianPulse(area=1.0, center=200.0, width=10.0), grid)
e_unit = kennedy_p01_deterministic(det, unit).energy_freq  # mean count of the unit pulse
for mu in (0.5, 2.0, 4.0):
    wf = GaussianPulse(area=math.sqrt(mu / e_unit), center=200.0, width=10.0)
    res = simulate_kennedy_mc(det, wf, grid, trials, 0)
    target = math.exp(-mu)
    se = math.sqrt(target * (1.0 - target) / trials)
    print("%12.1f %12.6f %12.6f %10.2f" % (mu, target, res.mc.p01_hat, abs(res.mc.p01_hat - target) / se))
    assert res.mc.p10_hat == 0.0
print()
print("false alarms under Kennedy: impossible by construction (all runs gave 0)")
