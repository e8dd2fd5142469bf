#!/usr/bin/env python3
"""Download the public benchmark datasets and normalize them into the
headered-CSV manifest format (comma separator, UTF-8, target column named).

Sources are the UCI repository's static archives. Megawatt1 has no public
source we can document, so it is not fetched; drop a megawatt1.csv with a
'failure' target into the data directory if you have one. The credit-default
workbook is an .xls file: converting it needs pandas+xlrd, which this script
uses when available and otherwise leaves instructions.

Usage: python scripts/fetch_datasets.py [--dest data] [--only name ...]
"""

import argparse
import csv
import io
import sys
import zipfile
from pathlib import Path
from urllib.request import urlopen

UCI = "https://archive.ics.uci.edu/static/public"

SOURCES = {
    "spambase": f"{UCI}/94/spambase.zip",
    "ionosphere": f"{UCI}/52/ionosphere.zip",
    "spectf": f"{UCI}/96/spectf+heart.zip",
    "german_credit": f"{UCI}/144/statlog+german+credit+data.zip",
    "credit_default": f"{UCI}/350/default+of+credit+card+clients.zip",
}


def fetch_zip(url: str) -> zipfile.ZipFile:
    print(f"  downloading {url}")
    with urlopen(url, timeout=120) as resp:
        return zipfile.ZipFile(io.BytesIO(resp.read()))


def write_csv(dest: Path, header, rows):
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"  wrote {dest} ({len(rows)} rows, {len(header)} columns)")


def convert_spambase(zf, dest):
    lines = zf.read("spambase.data").decode().strip().splitlines()
    rows = [ln.split(",") for ln in lines]
    header = [f"f{i}" for i in range(57)] + ["spam"]
    write_csv(dest, header, rows)


def convert_ionosphere(zf, dest):
    lines = zf.read("ionosphere.data").decode().strip().splitlines()
    rows = [ln.split(",") for ln in lines]
    header = [f"f{i}" for i in range(34)] + ["label"]
    write_csv(dest, header, rows)


def convert_spectf(zf, dest):
    rows = []
    for member in ("SPECTF.train", "SPECTF.test"):
        for ln in zf.read(member).decode().strip().splitlines():
            parts = ln.split(",")
            rows.append(parts[1:] + [parts[0]])  # move diagnosis from first to last
    header = [f"f{i}" for i in range(44)] + ["diagnosis"]
    write_csv(dest, header, rows)


def convert_german(zf, dest):
    lines = zf.read("german.data-numeric").decode().strip().splitlines()
    rows = [ln.split() for ln in lines]
    header = [f"f{i}" for i in range(24)] + ["risk"]
    write_csv(dest, header, rows)


def convert_credit_default(zf, dest):
    xls_name = next(n for n in zf.namelist() if n.lower().endswith(".xls"))
    try:
        import pandas as pd
        frame = pd.read_excel(io.BytesIO(zf.read(xls_name)), header=1)
    except ImportError:
        print("  ! pandas+xlrd not available; extract the workbook yourself,\n"
              "    drop the ID column, rename the last column to 'default',\n"
              f"    and save as {dest}")
        return
    frame = frame.drop(columns=["ID"])
    frame = frame.rename(columns={frame.columns[-1]: "default"})
    frame.to_csv(dest, index=False)
    print(f"  wrote {dest} ({len(frame)} rows, {len(frame.columns)} columns)")


CONVERTERS = {
    "spambase": convert_spambase,
    "ionosphere": convert_ionosphere,
    "spectf": convert_spectf,
    "german_credit": convert_german,
    "credit_default": convert_credit_default,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dest", default="data", help="output directory")
    ap.add_argument("--only", nargs="*", choices=sorted(SOURCES),
                    help="fetch just these datasets")
    args = ap.parse_args()

    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    names = args.only or sorted(SOURCES)
    failures = []
    for name in names:
        print(f"{name}:")
        try:
            zf = fetch_zip(SOURCES[name])
            CONVERTERS[name](zf, dest / f"{name}.csv")
        except Exception as err:
            print(f"  ! failed: {err}")
            failures.append(name)
    if failures:
        print(f"\nfailed: {', '.join(failures)}")
        return 1
    print("\nall requested datasets written; megawatt1 (if needed) must be "
          "provided manually")
    return 0


if __name__ == "__main__":
    sys.exit(main())
