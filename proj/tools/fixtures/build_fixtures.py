#!/usr/bin/env python3
"""Regenerate the frozen CSV fixtures under data/ from upstream copies.

Upstream sources (fetch them once, then pass their locations):
  --giss     global-temp.csv from the vega-datasets package (GISS LOTI, year,temp)
  --co2      co2-concentration.csv from vega-datasets (Mauna Loa monthly)
  --annex2   cmip5_annex2_forcing.csv from the fair 1.6.x package (AR5 Table AII.1.2)
  --rcp85    RCP85_MIDYEAR_RADFORCING.csv from the fair 1.6.x package

The ensemble directory is synthetic: each member is the GISS series plus an
AR(1) perturbation whose amplitude shrinks from 0.06 C (1880) to 0.02 C
(2015), seeded by member index.
"""
import argparse
import hashlib
import json
import math
import os

import numpy as np
import pandas as pd

FIRST_YEAR, LAST_YEAR = 1880, 2015


def write_giss(src, out):
    df = pd.read_csv(src)
    df = df[(df.year >= FIRST_YEAR) & (df.year <= LAST_YEAR)]
    with open(out, "w") as f:
        f.write("# GISS Land-Ocean Temperature Index, annual mean, deg C anomaly vs 1951-1980\n")
        f.write("Year,J-D\n")
        for y, t in zip(df.year, df.temp):
            f.write(f"{y},{t:.2f}\n")
    return df


def write_forcing(annex2, co2, out, sidecar):
    a = pd.read_csv(annex2, index_col=0)
    c = pd.read_csv(co2, parse_dates=["Date"])
    c["year"] = c.Date.dt.year
    annual = c.groupby("year").CO2.mean()
    # 2012-2015: CO2 forcing extended with 5.35 ln(C/C2011), everything else frozen.
    base = a.loc[2011].copy()
    for y in range(2012, LAST_YEAR + 1):
        row = base.copy()
        row["CO2"] = base["CO2"] + 5.35 * math.log(annual.loc[y] / annual.loc[2011])
        a.loc[y] = row
    cols = list(a.columns)
    with open(out, "w") as f:
        f.write("# Effective radiative forcing (W/m2) by constituent, AR5 Table AII.1.2 for 1750-2011;\n")
        f.write("# 2012-2015 extend CO2 by 5.35*ln(C/C2011) with Mauna Loa annual means, others frozen.\n")
        f.write("year," + ",".join(cols) + "\n")
        for y, row in a.iterrows():
            f.write(f"{y}," + ",".join(f"{v:.4f}" for v in row.values) + "\n")
    cmap = {col: "anthropogenic" for col in cols}
    cmap["Solar"] = "natural"
    cmap["Volcano"] = "natural"
    with open(sidecar, "w") as f:
        json.dump({"column_map": cmap}, f, indent=2)
        f.write("\n")


def write_rcp85(src, out, sidecar):
    raw = np.loadtxt(src, skiprows=59, delimiter=",")
    with open(out, "w") as f:
        f.write("# RCP8.5 extended radiative forcing (W/m2), MAGICC6 midyear values 1765-2500\n")
        f.write("year,anthropogenic,solar,volcanic\n")
        for r in raw:
            f.write(f"{int(r[0])},{r[4]:.6f},{r[3]:.6f},{r[2]:.6f}\n")
    with open(sidecar, "w") as f:
        json.dump({"column_map": {"anthropogenic": "anthropogenic", "solar": "natural",
                                  "volcanic": "natural"}}, f, indent=2)
        f.write("\n")


def write_ensemble(giss, outdir, members=100):
    os.makedirs(outdir, exist_ok=True)
    years = giss.year.to_numpy()
    temps = giss.temp.to_numpy()
    frac = (years - years[0]) / (years[-1] - years[0])
    amp = 0.06 + (0.02 - 0.06) * frac
    for m in range(1, members + 1):
        rng = np.random.default_rng(1000 + m)
        e = np.empty(len(years))
        e[0] = rng.standard_normal()
        for i in range(1, len(years)):
            e[i] = 0.6 * e[i - 1] + math.sqrt(1 - 0.36) * rng.standard_normal()
        vals = temps + amp * e
        with open(os.path.join(outdir, f"member_{m:03d}.csv"), "w") as f:
            f.write("year,value\n")
            for y, v in zip(years, vals):
                f.write(f"{y},{v:.4f}\n")


def write_checksums(datadir):
    lines = []
    for root, _, files in os.walk(datadir):
        for name in sorted(files):
            if name == "SHA256SUMS":
                continue
            path = os.path.join(root, name)
            rel = os.path.relpath(path, datadir)
            with open(path, "rb") as f:
                lines.append(f"{hashlib.sha256(f.read()).hexdigest()}  {rel}")
    with open(os.path.join(datadir, "SHA256SUMS"), "w") as f:
        f.write("\n".join(sorted(lines, key=lambda s: s.split()[1])) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--giss", required=True)
    ap.add_argument("--co2", required=True)
    ap.add_argument("--annex2", required=True)
    ap.add_argument("--rcp85", required=True)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "..", "data"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    giss = write_giss(args.giss, os.path.join(args.out, "gistemp_loti_annual.csv"))
    write_forcing(args.annex2, args.co2, os.path.join(args.out, "forcing_ar5_annex2.csv"),
                  os.path.join(args.out, "forcing_ar5_annex2.json"))
    write_rcp85(args.rcp85, os.path.join(args.out, "rcp85_forcing.csv"),
                os.path.join(args.out, "rcp85_forcing.json"))
    write_ensemble(giss, os.path.join(args.out, "temperature_ensemble"))
    write_checksums(args.out)


if __name__ == "__main__":
    main()
