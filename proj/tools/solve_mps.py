#!/usr/bin/env python3
"""Reference external solver: reads a free-format MPS file, solves it with
scipy's HiGHS backend and writes `<variable name> <value>` lines.

Usage: solve_mps.py MODEL.mps SOLUTION.sol

Exit codes: 0 optimal, 3 infeasible or unbounded, 4 anything else.
This matches the command-template contract of the tpes external solver
adapter, e.g.  --solver "cmd:python3 tools/solve_mps.py {mps} {sol}".
"""

import sys

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

INF = float("inf")


def parse_mps(path):
    rows = []  # (name, sense)
    obj_name = None
    cols = {}  # name -> list[(row index, value)]
    col_order = []
    integer = {}
    obj = {}
    rhs = {}
    obj_rhs = 0.0
    ranges = {}
    bounds = []
    minimize = True

    section = None
    in_int = False
    row_index = {}

    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line or line.startswith("*"):
                continue
            toks = line.split()
            if not line[0].isspace():
                head = toks[0]
                if head in ("NAME",):
                    section = None
                elif head in ("ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "OBJSENSE"):
                    section = head
                elif head == "ENDATA":
                    section = "DONE"
                    break
                else:
                    raise ValueError(f"unsupported MPS section {head}")
                continue

            if section == "OBJSENSE":
                minimize = toks[0].upper().startswith("MIN")
            elif section == "ROWS":
                tag, name = toks[0], toks[1]
                if tag == "N":
                    if obj_name is None:
                        obj_name = name
                else:
                    row_index[name] = len(rows)
                    rows.append((name, tag))
            elif section == "COLUMNS":
                if len(toks) >= 3 and toks[1] == "'MARKER'":
                    in_int = toks[2] == "'INTORG'"
                    continue
                name = toks[0]
                if name not in cols:
                    cols[name] = []
                    col_order.append(name)
                    integer[name] = in_int
                for rname, val in zip(toks[1::2], toks[2::2]):
                    v = float(val)
                    if rname == obj_name:
                        obj[name] = obj.get(name, 0.0) + v
                    else:
                        cols[name].append((row_index[rname], v))
            elif section == "RHS":
                for rname, val in zip(toks[1::2], toks[2::2]):
                    if rname == obj_name:
                        obj_rhs = float(val)
                    else:
                        rhs[row_index[rname]] = float(val)
            elif section == "RANGES":
                for rname, val in zip(toks[1::2], toks[2::2]):
                    ranges[row_index[rname]] = float(val)
            elif section == "BOUNDS":
                btype, col = toks[0], toks[2]
                value = float(toks[3]) if len(toks) > 3 else 0.0
                bounds.append((btype, col, value))
            else:
                raise ValueError("data line outside a section")

    if section != "DONE":
        raise ValueError("missing ENDATA")

    n = len(col_order)
    col_pos = {c: i for i, c in enumerate(col_order)}
    lb = np.zeros(n)
    ub = np.full(n, INF)
    for i, c in enumerate(col_order):
        if integer[c]:
            ub[i] = 1.0
    for btype, col, value in bounds:
        i = col_pos[col]
        if btype == "UP":
            ub[i] = INF if value >= 1e30 else value
        elif btype == "LO":
            lb[i] = -INF if value <= -1e30 else value
        elif btype == "FX":
            lb[i] = ub[i] = value
        elif btype == "FR":
            lb[i], ub[i] = -INF, INF
        elif btype == "MI":
            lb[i] = -INF
        elif btype == "PL":
            ub[i] = INF
        elif btype == "BV":
            lb[i], ub[i] = 0.0, 1.0
        else:
            raise ValueError(f"unsupported bound type {btype}")

    m = len(rows)
    data, ri, ci = [], [], []
    for c, entries in cols.items():
        for r, v in entries:
            ri.append(r)
            ci.append(col_pos[c])
            data.append(v)
    A = sparse.csr_matrix((data, (ri, ci)), shape=(m, n))

    c_lo = np.full(m, -INF)
    c_hi = np.full(m, INF)
    for r, (name, tag) in enumerate(rows):
        b = rhs.get(r, 0.0)
        if tag == "L":
            c_hi[r] = b
        elif tag == "G":
            c_lo[r] = b
        else:
            c_lo[r] = c_hi[r] = b
        if r in ranges:
            rng = ranges[r]
            if tag == "L":
                c_lo[r] = b - abs(rng)
            elif tag == "G":
                c_hi[r] = b + abs(rng)
            else:
                c_lo[r], c_hi[r] = (b, b + rng) if rng >= 0 else (b + rng, b)

    cvec = np.zeros(n)
    for name, v in obj.items():
        cvec[col_pos[name]] = v
    ints = np.array([1 if integer[c] else 0 for c in col_order])
    if not minimize:
        cvec = -cvec
    return col_order, cvec, A, c_lo, c_hi, lb, ub, ints


def main():
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 4
    mps_path, sol_path = sys.argv[1], sys.argv[2]
    try:
        names, c, A, c_lo, c_hi, lb, ub, ints = parse_mps(mps_path)
    except Exception as exc:  # noqa: BLE001
        print(f"MPS parse error: {exc}", file=sys.stderr)
        return 4

    constraints = LinearConstraint(A, c_lo, c_hi) if A.shape[0] else ()
    res = milp(c=c, constraints=constraints, integrality=ints, bounds=Bounds(lb, ub))

    if res.status == 2:  # infeasible
        print("infeasible", file=sys.stderr)
        return 3
    if res.status == 3:  # unbounded
        print("unbounded", file=sys.stderr)
        return 3
    if not res.success or res.x is None:
        print(f"solver failure: {res.message}", file=sys.stderr)
        return 4

    with open(sol_path, "w") as fh:
        for name, value in zip(names, res.x):
            fh.write(f"{name} {value:.17g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
