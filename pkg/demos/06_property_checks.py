# Random cross-checks against the reference semantics
#
# Generates small random systems and formulas, then compares the monitor's
# vectors and verdicts with direct evaluation and exhaustive search.

import json
import time

from stlmpm.scenario import check_property_scenario, gen_property_suite

suite = gen_property_suite(seed=7, count=30)
print("example formulas:")
for doc in suite[:5]:
    print("  ", doc["formula"], f"(horizon {doc['horizon']}, {doc['model']['kind']})")

t0 = time.perf_counter()
totals = {"entries": 0, "mismatches": 0, "prefixes": 0, "prefix_mismatches": 0}
for doc in suite:
    res = check_property_scenario(doc, n_traj=10, n_prefix=2)
    for key in totals:
        totals[key] += res[key]
totals["seconds"] = round(time.perf_counter() - t0, 2)
print(json.dumps(totals, indent=2))
