#!/usr/bin/env python3
"""Independent Zbus fault-current reference for the bundled 30-bus fixture.

Hand-built nodal assembly + numpy inversion, kept deliberately separate from
the Rust implementation. Used to freeze ground-truth values into the Rust
test suite and to audit the fixture design (all-on fault currents must sit
in the 4-9 p.u. band, economically committed subsets must leave the remote
buses below the 5 p.u. threshold).

Usage:
  zbus_reference.py fixture <grid.toml>     summary table for design checks
  zbus_reference.py freeze <grid.toml>      values to embed in Rust tests
  zbus_reference.py ymatrix <grid.toml>     checksums of the all-on Y matrix
"""
import sys

import numpy as np


def load(path):
    """Minimal TOML-subset reader (scalars and [[array-of-table]] sections)."""
    doc, current = {}, None
    with open(path) as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[[") and line.endswith("]]"):
                name = line[2:-2].strip()
                current = {}
                doc.setdefault(name, []).append(current)
            else:
                key, val = (s.strip() for s in line.split("=", 1))
                if val.startswith("["):
                    val = [int(x) for x in val.strip("[]").split(",")]
                else:
                    try:
                        val = int(val)
                    except ValueError:
                        val = float(val)
                (current if current is not None else doc)[key] = val
    return doc


def bus_index(grid):
    return {b: i for i, b in enumerate(grid["buses"])}


def admittance(grid, commitment):
    idx = bus_index(grid)
    n = len(idx)
    y = np.zeros((n, n), dtype=complex)
    for br in grid["branches"]:
        f, t = idx[br["from"]], idx[br["to"]]
        yb = 1.0 / complex(br["r"], br["x"])
        y[f, f] += yb
        y[t, t] += yb
        y[f, t] -= yb
        y[t, f] -= yb
    for g, u in zip(grid["generators"], commitment):
        if u:
            b = idx[g["bus"]]
            y[b, b] += 1.0 / complex(0.0, g["x_subtransient"])
    return y


def scc(grid, commitment, alpha, bus):
    idx = bus_index(grid)
    b = idx[bus]
    inj = [c["kappa"] * a * c["rated_current"] for c, a in zip(grid["ibrs"], alpha)]
    if not any(commitment):
        return sum(inj)
    z = np.linalg.inv(admittance(grid, commitment))
    zbb = abs(z[b, b])
    cur = 1.0 / zbb
    for c, i in zip(grid["ibrs"], inj):
        cur += abs(z[b, idx[c["bus"]]]) / zbb * i
    return cur


def per_bus(grid, commitment, alpha):
    return {b: scc(grid, commitment, alpha, b) for b in grid["buses"]}


def commitment_by_bus(grid, on_buses):
    return [1 if g["bus"] in on_buses else 0 for g in grid["generators"]]


def main():
    mode, path = sys.argv[1], sys.argv[2]
    grid = load(path)
    nsg = len(grid["generators"])
    nibr = len(grid["ibrs"])
    all_on = [1] * nsg
    a0 = [0.0] * nibr
    a1 = [1.0] * nibr

    if mode == "fixture":
        thr = grid["scc_threshold"]
        cases = {
            "all_on_a0": (all_on, a0),
            "all_on_a1": (all_on, a1),
            # no-DR style merit-order commitment: bus-30 units stay off
            "nodr": (commitment_by_bus(grid, {2, 3, 4, 5, 27}), [0.5] * nibr),
            # DR style: lower demand, bus-4/27/30 units off
            "dr": (commitment_by_bus(grid, {2, 3, 5}), [0.5] * nibr),
        }
        for name, (u, a) in cases.items():
            vals = per_bus(grid, u, a)
            low = sorted(b for b, v in vals.items() if v < thr)
            print(f"{name}: min={min(vals.values()):.3f} max={max(vals.values()):.3f} "
                  f"below_thr={low}")
            print("   " + " ".join(f"{b}:{v:.2f}" for b, v in sorted(vals.items())))
    elif mode == "freeze":
        vals = per_bus(grid, all_on, a1)
        print("// all SGs on, alpha = 1 everywhere; bus -> oracle p.u.")
        for b in sorted(vals):
            print(f"({b}, {vals[b]!r}),")
        print("fault at bus 1:", repr(scc(grid, all_on, a1, 1)))
    elif mode == "ymatrix":
        y = admittance(grid, all_on)
        print("sum_abs:", repr(float(np.abs(y).sum())))
        print("diag0:", repr(complex(y[0, 0])))
        print("symmetric:", bool(np.array_equal(y, y.T)))
        z = np.linalg.inv(y)
        print("inv_residual:", float(np.abs(y @ z - np.eye(len(y))).max()))
    else:
        raise SystemExit(f"unknown mode {mode}")


if __name__ == "__main__":
    main()
