from pathlib import Path

from leveler import BatteryBank, audit_table, runtime_estimate
from leveler.power import CLAIMED_RUNTIME_MIN, read_power_rows

here = Path(__file__).parent
rows = read_power_rows(here / "power_budget.csv")
report = audit_table(rows)

for entry in report.mismatches:
    name, computed, published = entry.row.name, entry.computed, entry.published
    print(f"{name}: computed {computed:g} mWh, published {published:g} mWh")  # noqa: T201
print(f"total {report.computed_total:g} mWh, published {report.published_total:g} mWh")  # noqa: T201
print(  # noqa: T201
    f"runtime {runtime_estimate(rows, BatteryBank()):.1f} min "
    f"({runtime_estimate(rows, BatteryBank(), use_published=True):.1f} min from published rows, "
    f"{CLAIMED_RUNTIME_MIN:g} min claimed)"
)
