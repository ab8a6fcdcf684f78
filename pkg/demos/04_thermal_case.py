# Room temperature: an early alarm
#
# Requirement: over the next ten minutes the room must, every minute, reach
# the comfort band [20, 25] within five minutes.  The heater runs at half
# power for nine minutes and is then switched off.  The monitor raises the
# alarm as soon as no heater schedule can recover, which happens before the
# requirement is actually broken.

from pathlib import Path

from stlmpm.oracle import eval_partial
from stlmpm.scenario import Scenario, run_monitor

here = Path(__file__).resolve().parent.parent / "scenarios"

for name in ["thermal_steered", "thermal_heater_off", "thermal_recover", "thermal_drift"]:
    scn = Scenario.load(here / f"{name}.json")
    state = run_monitor(scn, verdicts_path="/dev/null", csv_path="/dev/null")
    temps = " ".join(f"{r.state[0]:4.1f}" for r in state.log)
    print(f"{name}\n  temps    {temps}")
    print(f"  verdicts {' '.join(f'{v.value:>4s}' for v in state.verdicts)}")

# %% When would a plain (non-predictive) monitor have noticed?
scn = Scenario.load(here / "thermal_heater_off.json")
model, tree = scn.build()
cells = [model.grid.cell_of(x) for x in scn.states(model)]
decided = next(k for k in range(len(cells)) if eval_partial(cells[:k + 1], tree.formula) is False)
state = run_monitor(scn, verdicts_path="/dev/null", csv_path="/dev/null")
print(f"\npredictive alarm at step {state.log[-1].k}; the prefix itself is only "
      f"violated at step {decided}")
