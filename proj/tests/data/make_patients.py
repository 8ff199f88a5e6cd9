#!/usr/bin/env python3
"""Regenerates patients.csv and patients_mock.json.

The table mimics a synthetic patient register: every SSN starts with the
invalid area number 999 and 817 of 1000 maiden names are empty. The mock
script answers every LLM step of a full pipeline run over that table.
"""

import csv
import json
import random
from datetime import date, timedelta
from pathlib import Path

HERE = Path(__file__).resolve().parent
ROWS = 1000
EMPTY_MAIDEN = 817

COLUMNS = ["Id", "BIRTHDATE", "SSN", "DRIVERS", "FIRST", "LAST", "MAIDEN", "GENDER", "LAT", "LON"]
HIERARCHY = {
    "Patient": {
        "Identification": ["Id", "SSN", "DRIVERS"],
        "Name": ["FIRST", "LAST", "MAIDEN"],
        "Demographics": ["BIRTHDATE", "GENDER"],
        "Location": ["LAT", "LON"],
    }
}
FIRST = ["Ana", "Bruno", "Carla", "Dmitri", "Elena", "Femi", "Grace", "Hiro", "Ines", "Jamal",
         "Kira", "Luis", "Mara", "Nils", "Olga", "Pavel", "Quinn", "Rosa", "Sven", "Tara"]
LAST = ["Abbott", "Baker", "Cortez", "Dunn", "Ellis", "Fischer", "Garcia", "Hahn", "Ito",
        "Jensen", "Kowalski", "Lind", "Moreau", "Novak", "Okafor", "Price", "Quist", "Reyes"]


def make_rows(rng):
    empty = set(rng.sample(range(ROWS), EMPTY_MAIDEN))
    start = date(1930, 1, 1)
    rows = []
    for i in range(ROWS):
        gender = rng.choice("MF")
        rows.append({
            "Id": "%08x-%04x-4%03x-%04x-%012x" % (
                rng.getrandbits(32), rng.getrandbits(16), rng.getrandbits(12),
                0x8000 | rng.getrandbits(14), rng.getrandbits(48)),
            "BIRTHDATE": (start + timedelta(days=rng.randrange(32000))).isoformat(),
            "SSN": "999-%02d-%04d" % (rng.randrange(100), rng.randrange(10000)),
            "DRIVERS": "" if rng.random() < 0.15 else "S999%05d" % rng.randrange(100000),
            "FIRST": "%s%d" % (rng.choice(FIRST), rng.randrange(100, 1000)),
            "LAST": "%s%d" % (rng.choice(LAST), rng.randrange(100, 1000)),
            "MAIDEN": "" if i in empty else "%s%d" % (rng.choice(LAST), rng.randrange(100, 1000)),
            "GENDER": gender,
            "LAT": "%.6f" % rng.uniform(41.3, 42.8),
            "LON": "%.6f" % rng.uniform(-73.4, -70.0),
        })
    return rows


def fenced(obj):
    return "```json\n" + json.dumps(obj, indent=2) + "\n```"


def profile(key, value, thought):
    return fenced({"Thought": thought, key: value})


def review(is_error, reasoning):
    return fenced({"reasoning": reasoning, "is_error": is_error})


SUMMARIES = {
    "Id": "UUID (Universally Unique Identifier).",
    "SSN": "Social Security Number of the patient.",
    "DRIVERS": "Driver's license identifier of the patient.",
    "FIRST": "First name of the patient.",
    "LAST": "Last name of the patient.",
    "MAIDEN": "Maiden name of the patient, recorded only where it applies.",
    "BIRTHDATE": "Date of birth of the patient.",
    "GENDER": "Gender of the patient, M or F.",
    "LAT": "Latitude of the patient's home address.",
    "LON": "Longitude of the patient's home address.",
}

EXPECTED_TYPE = {"Id": "string", "SSN": "string", "DRIVERS": "string", "FIRST": "string",
                 "LAST": "string", "MAIDEN": "string", "BIRTHDATE": "date", "GENDER": "string",
                 "LAT": "float", "LON": "float"}
UNIQUE = {"Id": True, "SSN": True, "DRIVERS": True}
ALLOW_MISSING = {"MAIDEN": True, "DRIVERS": True}
EXAMPLES = {
    "Id": ["1d604da9-9a81-4ba9-80c2-de3375d59b40", "8d4c4326-e9de-4f45-9a4c-f8c36bff89ae"],
    "SSN": ["210-58-9374", "539-24-5861", "412-77-1093"],
    "DRIVERS": ["S99962402", "S99941126"],
    "FIRST": ["Maria", "James", "Wei"],
    "LAST": ["Smith", "Okafor", "Nguyen"],
    "MAIDEN": ["Johnson", "Lopez"],
    "GENDER": ["M", "F"],
}


def mock_script():
    s = {}
    summary = ("The <u>patients</u> table holds medical and demographic records for patients. "
               "Each patient has an identifier <u>Id</u>, a social security number <u>SSN</u> and a "
               "driver's license <u>DRIVERS</u>; names are given by <u>FIRST</u>, <u>LAST</u> and "
               "<u>MAIDEN</u>; demographics by <u>BIRTHDATE</u> and <u>GENDER</u>; the home location "
               "by <u>LAT</u> and <u>LON</u>.")
    s["ctx.table_summary"] = [summary]
    s["ctx.hierarchy"] = [fenced(HIERARCHY)]
    for group, cols in HIERARCHY["Patient"].items():
        s["ctx.group_summary:Patient/" + group] = [fenced({c: SUMMARIES[c] for c in cols})]
    s["classify.HigherOrder:Patient/Identification"] = [fenced({"assignments": []})]
    s["classify.HigherOrder:Patient/Name"] = [fenced({"assignments": []})]
    s["classify.HigherOrder:Patient/Demographics"] = [
        fenced({"assignments": [{"columns": ["GENDER"], "type": "category"}]})]
    s["classify.HigherOrder:Patient/Location"] = [
        fenced({"assignments": [{"columns": ["LAT", "LON"], "type": "lat/long coordinates"}]})]

    s["sem.Duplication:patients"] = [profile(
        "ExpDuplicate", False, "Each row describes one distinct patient, so duplicates are errors.")]
    s["review.Duplication:patients"] = [review(True, "Duplicated patient rows are data errors.")]

    for c in COLUMNS:
        s["sem.ColumnType:" + c] = [profile(
            "ExpType", EXPECTED_TYPE[c], "The column %s should be stored as %s." % (c, EXPECTED_TYPE[c]))]
        s["review.ColumnType:" + c] = [review(False, "The stored type is acceptable.")]
        s["sem.UniqueKey:" + c] = [profile(
            "ExpUnique", UNIQUE.get(c, False),
            "Identifiers are unique per patient." if UNIQUE.get(c) else "Values may repeat.")]
        s["review.UniqueKey:" + c] = [review(True, "An identifier shared by several patients is an error.")]
        s["sem.Dmv:" + c] = [profile("PotentialDMV", ["N/A", "unknown"],
                                     "Placeholders such as N/A would stand in for missing values.")]
        s["review.Dmv:" + c] = [review(False, "The candidates are legitimate values, not placeholders.")]
        s["sem.MissingValue:" + c] = [profile(
            "AllowMissing", ALLOW_MISSING.get(c, False),
            "Missing maiden names are expected: only married patients who changed their name have one."
            if c == "MAIDEN" else "Missing values are acceptable for optional fields."
            if ALLOW_MISSING.get(c) else "Every patient should have this value.")]
        s["review.MissingValue:" + c] = [review(
            False,
            "Maiden names are missing for 81.7% of patients; this is normal and does not require "
            "cleaning." if c == "MAIDEN" else "The missing values are acceptable.")]
    for c in ("LAT", "LON"):
        bounds = [41.0, 41.6, 42.0, 42.4, 43.0] if c == "LAT" else [-73.5, -72.5, -71.5, -71.0, -70.0]
        s["sem.NumericOutlier:" + c] = [profile(
            "ExpQuantile", bounds, "Patients live in Massachusetts.")]
        s["review.NumericOutlier:" + c] = [review(False, "The quantiles fall within Massachusetts.")]
    for c, examples in EXAMPLES.items():
        s["sem.StringOutlier:" + c] = [profile("ExpStr", examples, "Realistic values for %s." % c)]
        s["review.StringOutlier:" + c] = [review(False, "The values match the expected format.")]
    s["review.StringOutlier:SSN"] = [review(
        True, "Every SSN matches 999-\\d{2}-\\d{4}, but 999 is an invalid area number, so the "
              "entire column is erroneous.")]
    s["sem.MissingRecord:GENDER"] = [profile(
        "ExpFreq", {"M": 1, "F": 1}, "Patients are roughly balanced between genders.")]
    s["review.MissingRecord:GENDER"] = [review(False, "Both genders are present in similar numbers.")]
    for k in ("UniqueKey", "MissingValue"):
        s["sem.%s:LAT+LON" % k] = [profile(
            "ExpUnique" if k == "UniqueKey" else "AllowMissing", False,
            "Several patients may share an address." if k == "UniqueKey"
            else "Every address has coordinates.")]
        s["review.%s:LAT+LON" % k] = [review(False, "Acceptable.")]
    return s


def main():
    rng = random.Random(20240521)
    rows = make_rows(rng)
    with open(HERE / "patients.csv", "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    with open(HERE / "patients_mock.json", "w") as f:
        json.dump(mock_script(), f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
