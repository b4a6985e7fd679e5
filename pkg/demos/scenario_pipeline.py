# The same computation through the scenario layer used by the CLI.
#
# Loads the shipped default scenario, runs bounds and all three receivers
# with Monte Carlo verification, and prints the payload that `qdetlim
# receivers` would emit.  Equal seeds give byte-identical payloads.

import json
import pathlib

from qdetlim.scenario import (
    canonical_payload_bytes,
    run_receivers,
    scenario_from_dict,
)

root = pathlib.Path(__file__).resolve().parents[1]
doc = json.loads((root / "scenarios" / "default.json").read_text())
doc["trials"] = 2000  # keep the demo quick
sc = scenario_from_dict(doc)

out = run_receivers(sc, mode="both")

print("scenario: %s" % (root / "scenarios" / "default.json"))
print("fidelity %.6f, Bayes bound %.6g" % (out["bounds"]["fidelity"], out["bounds"]["bayes_bound"]))
print()
print("%10s %12s %12s %12s %16s" % ("receiver", "P10", "P01", "P_e", "MC within 3 SE"))
for entry in out["receivers"]:
    mc = entry.get("mc")
    devs = entry.get("mc_vs_analytic_se") or {}
    flag = "-"
    if mc is not None and devs:
        vals = [abs(v) for v in devs.values() if v is not None]
        flag = "yes" if vals and max(vals) <= 3.0 else ("n/a" if not vals else "NO")
    fmt = lambda v: ("%12.4g" % v) if v is not None else "%12s" % "-"
    print("%10s %s %s %s %16s" % (entry["name"], fmt(entry["p10"]), fmt(entry["p01"]), fmt(entry["p_e"]), flag))
print()

payload = canonical_payload_bytes(out)
again = canonical_payload_bytes(run_receivers(sc, mode="both"))
print("payload bytes: %d, reproducible: %s" % (len(payload), payload == again))
