#!/usr/bin/env python3
"""Generates the bundled synthetic fixture CSVs under data/fixtures/.

The fixture is fully deterministic (fixed RNG seed) and shaped so that:
  * five complaint categories cover 2010-01..2017-12 (96 months),
  * "Hazardous Materials" has a level drop at month index 48 (2014-01),
  * no pair of categories correlates above the 0.7 grouping threshold,
  * Hazardous Materials bills cluster at months 47-49 with singletons at the
    window edges (45, 51), so only the unshifted alignment reaches the
    observed association statistic.

Run from the repository root:  python3 scripts/make_fixtures.py
"""

import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "fixtures"
MONTHS = 96
START_YEAR = 2010
RNG = random.Random(1203)

TIMES = ["08:15:00 AM", "10:00:00 AM", "01:30:00 PM", "04:45:00 PM", "11:05:00 AM"]

# label -> (base level, seasonal amplitude, seasonal phase, noise sd)
CATEGORIES = {
    "Water System": (60.0, 7.0, 0.0, 5.0),
    "Dirty Conditions": (35.0, 6.0, 2 * math.pi / 5, 4.0),
    "Sanitation Condition": (30.0, 5.0, 4 * math.pi / 5, 4.0),
    "Rodent": (25.0, 7.0, 6 * math.pi / 5, 4.0),
    "Hazardous Materials": (45.0, 5.0, 8 * math.pi / 5, 3.0),
}
STEP_MONTH = 48
STEP_LEVEL_AFTER = 15.0  # Hazardous Materials level from 2014-01 on


def month_of(index):
    return START_YEAR + index // 12, 1 + index % 12


def monthly_counts():
    counts = {}
    for label, (base, amp, phase, sd) in CATEGORIES.items():
        row = []
        for t in range(MONTHS):
            level = base
            if label == "Hazardous Materials" and t >= STEP_MONTH:
                level = STEP_LEVEL_AFTER
            seasonal = amp * math.sin(2 * math.pi * (t % 12) / 12 + phase)
            value = level + seasonal + RNG.gauss(0.0, sd)
            row.append(max(0, round(value)))
        counts[label] = row
    return counts


def check_correlations(counts):
    labels = list(counts)
    worst = 0.0
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            xs, ys = counts[a], counts[b]
            mx, my = sum(xs) / MONTHS, sum(ys) / MONTHS
            sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
            sxx = sum((x - mx) ** 2 for x in xs)
            syy = sum((y - my) ** 2 for y in ys)
            r = sxy / math.sqrt(sxx * syy)
            worst = max(worst, abs(r))
            if abs(r) >= 0.6:
                raise SystemExit(f"correlation {a}/{b} = {r:.3f} too close to the 0.7 threshold")
    print(f"max |pairwise correlation| = {worst:.3f} (grouping threshold 0.7)")


def write_requests(counts):
    rows = []
    day = 0
    for t in range(MONTHS):
        year, month = month_of(t)
        for label in CATEGORIES:
            for _ in range(counts[label][t]):
                day += 1
                stamp = f"{month:02d}/{1 + day % 28:02d}/{year} {TIMES[day % len(TIMES)]}"
                rows.append((stamp, label, f"{label} report"))
    # a rare category that stays below the 0.5% frequency cut
    for i in range(50):
        year, month = month_of((7 * i) % MONTHS)
        rows.append((f"{month:02d}/15/{year} {TIMES[i % len(TIMES)]}", "Noise", "Noise report"))

    lines = ["Unique Key,Created Date,Complaint Type,Descriptor"]
    for key, (stamp, label, descriptor) in enumerate(rows, start=1):
        lines.append(f"{key},{stamp},{label},{descriptor}")
    # two malformed rows: an unparseable date and a blank complaint type
    lines.insert(501, "90001,32/45/2013 09:00:00 AM,Rodent,bad date row")
    lines.insert(1202, "90002,03/05/2012 09:00:00 AM,,missing type row")
    (OUT / "requests.csv").write_text("\n".join(lines) + "\n")
    print(f"requests.csv: {len(rows)} good rows + 2 malformed")
    return len(rows)


HAZMAT_TITLES = [
    "An act regulating hazardous waste transport permits",
    "An act on toxic substance disposal standards",
    "An act funding chemical spill response teams",
    "An act tightening chemical storage inspections",
]

BILL_SCHEDULES = {
    # label -> (title template pool, month stride, month offset)
    "Water System": (["An act to upgrade the municipal water main grid",
                      "An act funding hydrant maintenance districts"], 2, 0),
    "Rodent": (["An act establishing a rat mitigation task force",
                "An act expanding vermin abatement funding"], 3, 1),
    "Sanitation Condition": (["An act reorganizing waste collection services",
                              "An act on garbage transfer station siting"], 4, 2),
    "Dirty Conditions": (["An act to penalize illegal dumping",
                          "An act on litter enforcement officers"], 5, 3),
    "Smoking": (["An act restricting tobacco advertising near schools",
                 "An act on cigarette tax enforcement"], 6, 4),
}

UNMATCHED_TITLES = [
    "Textbook Transparency Act",
    "An act relating to municipal parking meters",
    "An act renaming the harbor commission",
    "An act on agricultural fair schedules",
]

# Hazardous Materials bills: cluster at months 47-49 plus edge singletons at
# 45 and 51 and sparse background far from the window.
HAZMAT_MONTHS = {45: 1, 47: 4, 48: 5, 49: 3, 51: 1, 8: 1, 27: 1, 66: 1, 88: 1}


def hazmat_shift_analysis(window=3, divider=48):
    series = [0.0] * MONTHS
    for m, n in HAZMAT_MONTHS.items():
        series[m] += n
    in_window = [abs(m - divider) <= window for m in range(MONTHS)]
    observed = sum(series[m] for m in range(MONTHS) if in_window[m])
    qualifying = [s for s in range(MONTHS)
                  if sum(series[(m - s) % MONTHS] for m in range(MONTHS) if in_window[m])
                  >= observed]
    print(f"association design: observed={observed}, qualifying shifts={qualifying}")
    if len(qualifying) > 2:
        raise SystemExit("too many qualifying shifts; the permutation p-value would be weak")


def write_bills():
    bills = []  # (month index, day, title, subject)
    for label, (titles, stride, offset) in BILL_SCHEDULES.items():
        for i, t in enumerate(range(offset, MONTHS, stride)):
            bills.append((t, 3 + (i * 5) % 24, titles[i % len(titles)], "Health"))
    hazmat_day = 0
    for t, n in sorted(HAZMAT_MONTHS.items()):
        for _ in range(n):
            hazmat_day += 1
            bills.append((t, 2 + (hazmat_day * 3) % 26, HAZMAT_TITLES[hazmat_day % len(HAZMAT_TITLES)],
                          "Environment"))
    for i, title in enumerate(UNMATCHED_TITLES * 3):
        bills.append(((11 * i + 5) % MONTHS, 9 + i % 18, title, "Education"))
    # pin the span to the full 96 months
    bills.append((0, 2, "An act adjusting court filing fees", "Judiciary"))
    bills.append((MONTHS - 1, 27, "An act on ferry schedule publication", "Transportation"))

    bills.sort(key=lambda b: (b[0], b[1], b[2]))
    lines = ["Create Date,Bill Title,Bill Subject"]
    for t, day, title, subject in bills:
        year, month = month_of(t)
        lines.append(f"{year}-{month:02d}-{day:02d},{title},{subject}")
    lines.insert(17, "2012-19-88,An act with a broken date,Health")  # malformed row
    (OUT / "bills.csv").write_text("\n".join(lines) + "\n")
    print(f"bills.csv: {len(bills)} good rows + 1 malformed")


def write_config():
    (OUT / "run_config.json").write_text("""{
  "requests": "data/fixtures/requests.csv",
  "bills": "data/fixtures/bills.csv",
  "dictionary": "data/dictionaries/health_areas.json",
  "out": "out/fixture",
  "subsample_n": 12000,
  "seed": 0
}
""")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    counts = monthly_counts()
    check_correlations(counts)
    hazmat_shift_analysis()
    total = write_requests(counts)
    write_bills()
    write_config()
    hazmat = counts["Hazardous Materials"]
    pre = sum(hazmat[:STEP_MONTH]) / STEP_MONTH
    post = sum(hazmat[STEP_MONTH:]) / (MONTHS - STEP_MONTH)
    print(f"hazmat mean before/after step: {pre:.1f} / {post:.1f}; total rows {total}")


if __name__ == "__main__":
    main()
