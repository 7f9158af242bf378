"""Delayed feedback as a movement-cost problem.

A tracking loss G*||w - c_t|| with piecewise-constant centers is run through
the delay reduction at several constant delays.  The reduction charges the
inner learner a movement coefficient G*|m_{t+1}| (the number of still-missing
gradients), so larger delays automatically make the learner more conservative.
Regret should grow roughly like sqrt((T + d_tot)/T) relative to the no-delay
run.
"""

import math

from movoco.experiments import run_experiment

T, SEED = 2048, 3
BASE = {
    "name": "delay-demo", "T": T, "dim": 1, "seed": SEED,
    "algorithm": "delay",
    "learner": {"G": 1.0, "epsilon": 1.0},
    "environment": {"kind": "tracking", "G": 1.0,
                    "center_kind": "piecewise_constant", "switches": 12},
    "comparator": {"kind": "centers"},
    "lambda": {"kind": "zero"},
}

print(f"tracking loss, T={T}, comparator = centers (zero comparator loss)")
print()

baseline = None
for d in (0, 2, 4, 8, 16):
    config = dict(BASE, delay={"kind": "constant", "d": d})
    _, summary = run_experiment(config)
    regret = summary["regret_asym"]
    d_tot = summary["realized"]["d_tot"]
    sigma = summary["realized"]["sigma_max"]
    if baseline is None:
        baseline = regret
    target = math.sqrt((T + d_tot) / T)
    print(f"d={d:2d}  sigma_max={sigma:2d}  d_tot={d_tot:6d}  "
          f"regret {regret:9.2f}  ratio vs d=0 {regret / baseline:5.2f}  "
          f"sqrt((T+d_tot)/T) = {target:4.2f}")

print()
print("The inner learner needs scale L >= G*(1 + 3*sigma_max); the runner")
print("picks that up from the ledger automatically when L is not given.")
