"""How much does passing a significance test inflate an estimate?

Walks an exaggeration curve from low to high signal-to-noise and checks
two points by simulation.
"""
from sigfilter.mc_oracle import McConfig, simulate_fixed_beta
from sigfilter.selection import SelectionRule, exaggeration_curve, g, power_from_snr

curve = exaggeration_curve(0.5, 4.0, 8)
print("snr     power   exaggeration")
for snr, power, ex in curve.rows():
    print(f"{snr:5.2f}  {power:6.3f}  {ex:8.3f}")

rule = SelectionRule.from_alpha(0.05)
for snr in (1.0, 2.8):
    est = simulate_fixed_beta(snr, 1.0, rule, "abs_bias", McConfig(10**6, seed=1))
    print(f"snr={snr}: closed form g={g(snr, rule.c):.5f}  simulated={est.mean:.5f} +/- {est.std_error:.5f}"
          f"  (power {power_from_snr(snr, 0.05):.3f})")
