import math
from dataclasses import replace
from pathlib import Path

from leveler import load_scenario, run_scenario
from leveler.plant import NOISELESS

here = Path(__file__).parent
scenario = load_scenario(here / "scenarios" / "ramp10.json")

for noise in (NOISELESS, scenario.noise):
    records, summary = run_scenario(replace(scenario, noise=noise))
    print(  # noqa: T201
        f"noise={noise is not NOISELESS}: settle {summary.settle_time} s, "
        f"steady |pitch| {math.degrees(summary.steady_pitch):.3f} deg, "
        f"|roll| {math.degrees(summary.steady_roll):.3f} deg"
    )
    print(records[-1])  # noqa: T201
