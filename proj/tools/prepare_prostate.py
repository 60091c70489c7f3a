#!/usr/bin/env python3
"""Convert the Byar & Green prostate trial data (Hmisc `prostate`, 502 rows)
into the cohort layout read by `fourway decompose --config configs/prostate.toml`.

    python3 tools/prepare_prostate.py prostate.csv data/prostate.csv

Keeps the placebo and 5.0 mg DES arms. Target event: death from prostate
cancer; competing event: death from any other cause; `alive` is censored.
Covariates follow the usual coding of this trial in the separable-effects
literature: impaired daily activity, age group (<60, 60-74, >=75),
hemoglobin < 12 g/100ml, and history of cardiovascular disease.
Subjects with a missing covariate are dropped and counted on stderr.
"""

import csv
import sys

HIGH_DOSE = "5.0 mg estrogen"
PLACEBO = "placebo"
TARGET = "dead - prostatic ca"
MAX_MONTHS = 76


def main(src, dst):
    kept, dropped = [], 0
    with open(src, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            if row["rx"] not in (HIGH_DOSE, PLACEBO):
                continue
            try:
                age = float(row["age"])
                hg = float(row["hg"])
                hx = int(float(row["hx"]))
                pf = row["pf"].strip()
                months = float(row["dtime"])
            except (KeyError, ValueError):
                dropped += 1
                continue
            if not pf or pf == "NA":
                dropped += 1
                continue
            if months > MAX_MONTHS:
                sys.exit(f"dtime {months} exceeds the {MAX_MONTHS}-month grid in configs/prostate.toml")
            status = row["status"].strip()
            event = 0 if status == "alive" else 1 if status == TARGET else 2
            kept.append({
                "id": row.get("patno") or row.get("rownames") or str(len(kept) + 1),
                "time": f"{months:g}",
                "event": event,
                "treatment": 1 if row["rx"] == HIGH_DOSE else 0,
                "act_impaired": 0 if pf == "normal activity" else 1,
                "age_60_74": 1 if 60 <= age < 75 else 0,
                "age_75plus": 1 if age >= 75 else 0,
                "hg_low": 1 if hg < 12 else 0,
                "hx": hx,
            })
    with open(dst, "w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=list(kept[0]), lineterminator="\r\n")
        w.writeheader()
        w.writerows(kept)
    print(f"wrote {len(kept)} subjects to {dst}; dropped {dropped} with missing covariates", file=sys.stderr)


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
