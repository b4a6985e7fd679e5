# Three concrete receivers against the quantum limit for one force pulse.
#
# Homodyne applies a likelihood-ratio threshold to the filtered photocurrent,
# Kennedy counts photons after displacing the no-signal hypothesis to vacuum,
# and Dolinar reaches the Helstrom bound exactly.  All error probabilities
# are analytic here; see monte_carlo_check.py for the sampled versions.

import math

from qdetlim import (
    GaussianPulse,
    TimeGrid,
    bayes_threshold,
    dolinar_error,
    forward_transform,
    helstrom_bayes_bound,
    homodyne_error_probs,
    homodyne_snr,
    kennedy_p01_deterministic,
    log_fidelity_optomech,
    natural_units_detector,
    render,
)

det = natural_units_detector()
grid = TimeGrid(0.0, 400.0, 8192)
wf = GaussianPulse(area=8.0, center=100.0, width=8.0)
p0 = 0.5

x = render(wf, grid)
spec = forward_transform(x)
log_f = log_fidelity_optomech(det, spec)
fidelity = math.exp(log_f)
bayes = helstrom_bayes_bound(fidelity, p0)

# homodyne: Gaussian statistic with variance 1, mean separation 2 sigma
sigma = math.sqrt(homodyne_snr(det, spec))
p10_h, p01_h = homodyne_error_probs(sigma, bayes_threshold(p0))
pe_h = p0 * p10_h + (1.0 - p0) * p01_h

# Kennedy: false alarms impossible, misses with probability F
ken = kennedy_p01_deterministic(det, x)
pe_k = (1.0 - p0) * ken.p01

# Dolinar: attains the Bayes bound
pe_d = dolinar_error(fidelity, p0)

print("pulse area 8, F = %.6f, Helstrom bound P_e >= %.6g" % (fidelity, bayes))
print()
print("%10s %12s %12s %12s %14s" % ("receiver", "P10", "P01", "P_e", "P_e / bound"))
print("%10s %12.4g %12.4g %12.4g %14.3f" % ("homodyne", p10_h, p01_h, pe_h, pe_h / bayes))
print("%10s %12.4g %12.4g %12.4g %14.3f" % ("kennedy", 0.0, ken.p01, pe_k, pe_k / bayes))
print("%10s %12s %12s %12.4g %14.3f" % ("dolinar", "-", "-", pe_d, pe_d / bayes))
print()

# asymptotics: error exponents, normalized by the fidelity exponent Gamma_F;
# homodyne pays a factor two, direct detection does not
gamma_f = -log_f / grid.duration
print("error exponents (fraction of Gamma_F = %.5g):" % gamma_f)
print("  homodyne  %.3f" % (sigma**2 / grid.duration / gamma_f))
print("  kennedy   %.3f" % (ken.energy_freq / grid.duration / gamma_f))
