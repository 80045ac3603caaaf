#!/usr/bin/env python3
"""Regenerate IEEE Common Data Format files from MATPOWER case files.

MATPOWER's case_ieee30/case57/case118/case300 were themselves converted from
the UW archive CDF files; this script writes them back out using the column
layout documented in docs/cdf_format.md.

    python3 tools/mpc2cdf.py case_ieee30.m data/ieee30.cdf
"""
import re
import sys
from collections import Counter, defaultdict


def read_matrix(text, key):
    m = re.search(r"mpc\." + key + r"\s*=\s*\[(.*?)\];", text, re.S)
    rows = []
    for line in m.group(1).split("\n"):
        line = line.split("%")[0].strip().rstrip(";")
        if line:
            rows.append([float(x) for x in line.split()])
    return rows


def read_names(text):
    m = re.search(r"mpc\.bus_name\s*=\s*\{(.*?)\};", text, re.S)
    if not m:
        return None
    return re.findall(r"'([^']*)'", m.group(1))


def put(buf, col, width, s):
    """Place s right-aligned into 1-based columns [col, col+width)."""
    s = s.rjust(width)
    if len(s) > width:
        raise ValueError(f"field {s!r} overflows {width} columns at {col}")
    buf[col - 1:col - 1 + width] = list(s)


def put_left(buf, col, width, s):
    s = s.ljust(width)[:width]
    buf[col - 1:col - 1 + width] = list(s)


def main(src, dst):
    text = open(src).read()
    base = float(re.search(r"mpc\.baseMVA\s*=\s*([\d.]+)", text).group(1))
    bus = read_matrix(text, "bus")
    gen = read_matrix(text, "gen")
    branch = read_matrix(text, "branch")
    names = read_names(text)
    header = re.search(r"^%\s+(\d\d/\d\d/\d\d.*)$", text, re.M)

    pg = defaultdict(float)
    qg = defaultdict(float)
    qmax = defaultdict(float)
    qmin = defaultdict(float)
    vg = {}
    for g in gen:
        if g[7] <= 0:
            continue
        b = int(g[0])
        pg[b] += g[1]
        qg[b] += g[2]
        qmax[b] += g[3]
        qmin[b] += g[4]
        vg[b] = g[5]

    out = []
    title = [" "] * 73
    if header:
        put_left(title, 1, 73, " " + header.group(1).strip())
    put(title, 32, 6, f"{base:.1f}")
    out.append("".join(title).rstrip())

    out.append(f"BUS DATA FOLLOWS                            {len(bus)} ITEMS")
    type_map = {1: 0, 2: 2, 3: 3, 4: 4}
    for k, b in enumerate(bus):
        row = [" "] * 127
        num = int(b[0])
        put(row, 1, 4, str(num))
        put_left(row, 6, 12, names[k] if names else f"Bus {num}")
        put(row, 19, 2, str(int(b[6])))
        put(row, 21, 3, str(int(b[10])))
        put(row, 25, 2, str(type_map[int(b[1])]))
        put(row, 28, 6, f"{b[7]:.4f}")
        put(row, 34, 7, f"{b[8]:.2f}")
        put(row, 41, 9, f"{b[2]:.2f}")
        put(row, 50, 9, f"{b[3]:.2f}")
        put(row, 59, 9, f"{pg[num]:.2f}")
        put(row, 68, 8, f"{qg[num]:.2f}")
        put(row, 77, 7, f"{b[9]:.2f}")
        put(row, 85, 6, f"{vg.get(num, 0.0):.4f}")
        put(row, 91, 8, f"{qmax[num]:.2f}")
        put(row, 99, 8, f"{qmin[num]:.2f}")
        put(row, 107, 8, f"{b[4] / base:.5f}")
        put(row, 115, 8, f"{b[5] / base:.5f}")
        put(row, 124, 4, "0")
        out.append("".join(row).rstrip())
    out.append("-999")

    out.append(f"BRANCH DATA FOLLOWS                         {len(branch)} ITEMS")
    seen = Counter()
    for br in branch:
        if br[10] <= 0:
            continue
        row = [" "] * 126
        f, t = int(br[0]), int(br[1])
        key = (min(f, t), max(f, t))
        seen[key] += 1
        put(row, 1, 4, str(f))
        put(row, 6, 4, str(t))
        put(row, 11, 2, "1")
        put(row, 13, 2, "1")
        put(row, 17, 1, str(seen[key]))
        put(row, 19, 1, "1" if br[8] != 0 else "0")
        put(row, 20, 10, f"{br[2]:.6f}")
        put(row, 30, 11, f"{br[3]:.6f}")
        put(row, 41, 10, f"{br[4]:.6f}")
        put(row, 51, 5, "0")
        put(row, 57, 5, "0")
        put(row, 63, 5, "0")
        put(row, 69, 4, "0")
        put(row, 74, 1, "0")
        put(row, 77, 6, f"{br[8]:.4f}")
        put(row, 84, 7, f"{br[9]:.2f}")
        out.append("".join(row).rstrip())
    out.append("-999")
    out.append("LOSS ZONES FOLLOWS                     1 ITEMS")
    out.append("  1 ZONE 1")
    out.append("-99")
    out.append("INTERCHANGE DATA FOLLOWS               0 ITEMS")
    out.append("-9")
    out.append("TIE LINES FOLLOWS                      0 ITEMS")
    out.append("-999")
    out.append("END OF DATA")
    with open(dst, "w") as fh:
        fh.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
