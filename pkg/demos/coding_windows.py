"""How far out the input must be read to fix the output near the origin."""
from __future__ import annotations

import statistics

from finitary import TrialPlan, Undetermined, Window, coding_window, measure_coding_windows, sample_poisson


def main() -> None:
    widths, missing = [], 0
    for seed in range(200):
        try:
            widths.append(float(coding_window(sample_poisson(1, Window(-4000, 4000), seed))))
        except Undetermined:
            missing += 1
    print(f"window [-4000, 4000]: {len(widths)} finite, {missing} undetermined, "
          f"median {statistics.median(widths)}, max {max(widths)}")
    for adaptive in (False, True):
        r = measure_coding_windows(TrialPlan(seeds=list(range(200)), window_length=4000),
                                   adaptive=adaptive).results[0]
        print(f"buffer 2000, widened={adaptive}: {r.detail['finite']}/200 finite, "
              f"median {r.detail.get('median')}")


if __name__ == "__main__":
    main()
