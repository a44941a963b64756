"""
Picking a transmission strategy
===============================

From physical link gains to a recommended scheme and the certificate that
backs it.
"""

# %%
# Physical gains and noise levels are normalized into standard form first.
from manytoone import RawChannel, recommend, rate_of, to_standard_form
from manytoone.channel import parse_strategy
from manytoone.optimality import applicable_certificates

raw = RawChannel(
    K=3,
    powers=[1.0, 1.0, 1.0],
    direct_gains=[1.0, 2.0, 2.0],
    cross_gains_to_rx1=[1.0, 1.0],
    noise_vars=[1.0, 1.0, 1.0],
)
ch = to_standard_form(raw)
print("standard form:", ch.h, ch.P)

# %%
# Every named strategy has a closed-form sum-rate in bits per channel use.
# Cancellation strategies also report whether their decoding order works;
# here the cross gains are too weak to decode either interferer.
for label in ("M1", "M2:2", "MAC:1,3", "M3", "MI1", "MI:2,3@2,3"):
    report = rate_of(ch, parse_strategy(label, ch.K))
    print(f"{label:>12}  {report.sum_rate_bits:.6f}  decodable={report.sic_feasible}")

# %%
# Weak interference: treating it as noise is optimal and T1 certifies it.
rec = recommend(ch, "XC")
print(rec.report.strategy.label, rec.certificate.theorem_id if rec.certificate else None)

# %%
# Strong interference from transmitter 2: a two-user MAC at receiver 1.
strong = ch.replace(h=[2.5, 0.5])
rec = recommend(strong, "XC")
print(rec.report.strategy.label, rec.certificate.theorem_id if rec.certificate else None)

# %%
# In the interference channel the receiver may cancel strong interferers
# instead. The certificate names the decoding order that works.
rec = recommend(ch.replace(h=[3.0, 0.8]), "IC")
print(rec.report.strategy.label, rec.certificate.theorem_id, rec.certificate.witness)

# %%
# All certificates for one strategy, with their margins.
for cert in applicable_certificates(strong, parse_strategy("M2:2", 3)):
    print(cert.theorem_id, cert.holds, [round(c.margin, 4) for c in cert.conditions])
