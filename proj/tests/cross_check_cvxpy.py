"""Re-solve a dumped convexified subproblem with cvxpy and compare objectives.

Usage: cross_check_cvxpy.py <npn_inspect> [seed]
Exit 0 on agreement within 1e-6 (relative to max(1, |objective|)), 1 otherwise.
"""
import json
import subprocess
import sys

import cvxpy as cp
import numpy as np


def build(prog):
    n = prog["num_vars"]
    x = cp.Variable(n)
    cons = []
    for i, (lo, hi) in enumerate(zip(prog["lower"], prog["upper"])):
        if lo is not None:
            cons.append(x[i] >= lo)
        if hi is not None:
            cons.append(x[i] <= hi)
    for row in prog["constraints"]:
        expr = 0
        for idx, c in row["linear"]:
            expr = expr + c * x[idx]
        for t in row["logs"]:
            arg = t["constant"]
            for idx, c in t["coeffs"]:
                arg = arg + c * x[idx]
            expr = expr + t["weight"] * cp.log(arg)
        cons.append(expr >= row["lower"])
    obj = cp.Maximize(np.array(prog["objective"]) @ x)
    return cp.Problem(obj, cons)


def main():
    exe = sys.argv[1]
    seed = sys.argv[2] if len(sys.argv) > 2 else "5"
    out = subprocess.run(
        [exe, "subproblem", "--preset", "desk", "--seed", seed, "--gamma-min", "0.5", "--tau", "0",
         "--subcarriers", "4", "--ul-users", "2", "--dl-users", "2"],
        check=True, capture_output=True, text=True).stdout
    dump = json.loads(out)
    ours = dump["solution"]
    if ours["status"] != "optimal":
        print(f"npn solver status {ours['status']}")
        return 1
    prob = build(dump["program"])
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-9, tol_gap_rel=1e-9, tol_feas=1e-9)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        print(f"cvxpy status {prob.status}")
        return 1
    diff = abs(prob.value - ours["objective"])
    scale = max(1.0, abs(prob.value))
    print(f"npn {ours['objective']:.12g} cvxpy {prob.value:.12g} diff {diff:.3g}")
    return 0 if diff <= 1e-6 * scale else 1


if __name__ == "__main__":
    sys.exit(main())
