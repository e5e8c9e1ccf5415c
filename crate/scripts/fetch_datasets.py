#!/usr/bin/env python3
"""Fetch the benchmark datasets into ./data as plain comma-separated files.

Every output file has no header; the last column is the class label.

  wine.csv                          178 rows, 13 features, 3 classes
  pendigits.tra.csv / .tes.csv      7494 / 3498 rows, 16 features, 10 classes
  thyroid.train.csv / .test.csv     3772 / 3428 rows, 21 features, 3 classes

Sources are tried in order. The UCI repository is preferred. When it is not
reachable, WINE comes from the copy bundled with scikit-learn and PENDIGITS
from the KEEL "penbased" file shipped in the keel-ds wheel. KEEL stores the
10992 pendigits rows pooled and shuffled, so the original train/test split
cannot be recovered; in that case data/penbased.csv is written instead and
the harness draws a seeded 7494/3498 split from it.
"""

import argparse
import io
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"


def fetch(url, timeout=20):
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read().decode()


def rows_from_text(text, sep=None):
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        cells = [c.strip() for c in (line.split(sep) if sep else line.split())]
        rows.append([c for c in cells if c != ""])
    return rows


def write_csv(path, rows):
    with open(path, "w") as fh:
        for row in rows:
            fh.write(",".join(row) + "\n")
    print(f"wrote {path} ({len(rows)} rows)")


def wine(out):
    try:
        rows = rows_from_text(fetch(f"{UCI}/wine/wine.data"), ",")
        # UCI wine puts the class first.
        rows = [r[1:] + r[:1] for r in rows]
    except Exception as exc:  # noqa: BLE001
        print(f"UCI wine unavailable ({exc}); using scikit-learn copy")
        from sklearn.datasets import load_wine

        ds = load_wine()
        rows = [[repr(float(v)) for v in x] + [str(int(y) + 1)] for x, y in zip(ds.data, ds.target)]
    write_csv(out / "wine.csv", rows)


def keel_penbased():
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "keel-ds==0.2.5", "--no-deps", "-d", tmp, "-q"],
            check=True,
        )
        wheel = next(Path(tmp).glob("keel_ds-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            return zf.read("keel_ds/data/balanced/raw/penbased.dat").decode()


def pendigits(out):
    try:
        tra = rows_from_text(fetch(f"{UCI}/pendigits/pendigits.tra"), ",")
        tes = rows_from_text(fetch(f"{UCI}/pendigits/pendigits.tes"), ",")
        write_csv(out / "pendigits.tra.csv", tra)
        write_csv(out / "pendigits.tes.csv", tes)
    except Exception as exc:  # noqa: BLE001
        print(f"UCI pendigits unavailable ({exc}); using KEEL penbased (pooled)")
        write_csv(out / "penbased.csv", rows_from_text(keel_penbased(), ","))


def thyroid(out):
    try:
        train = rows_from_text(fetch(f"{UCI}/thyroid-disease/ann-train.data"))
        test = rows_from_text(fetch(f"{UCI}/thyroid-disease/ann-test.data"))
    except Exception as exc:  # noqa: BLE001
        print(f"UCI ann-thyroid unavailable ({exc}); no fallback source, skipping")
        return
    write_csv(out / "thyroid.train.csv", train)
    write_csv(out / "thyroid.test.csv", test)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    wine(out)
    pendigits(out)
    thyroid(out)


if __name__ == "__main__":
    main()
