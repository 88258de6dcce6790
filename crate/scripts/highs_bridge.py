#!/usr/bin/env python3
"""Solve an LP-format model with HiGHS and write the p2s1 solution file.

Usage: highs_bridge.py MODEL.lp --time-limit=SECONDS

The solution is written next to the model with the extension `.sol`:
a `status` line (optimal, feasible, timeout or infeasible), the objective
and best bound when known, then one `<name> <value>` line per variable.
Requires the `highspy` package.
"""

import argparse
import pathlib
import sys

import highspy


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("model", type=pathlib.Path)
    parser.add_argument("--time-limit", type=float, default=60.0)
    args = parser.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(str(args.model)) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.model}", file=sys.stderr)
        return 1
    h.run()

    status = h.getModelStatus()
    info = h.getInfo()
    has_solution = info.primal_solution_status == 2
    if status == highspy.HighsModelStatus.kOptimal:
        label = "optimal"
    elif status == highspy.HighsModelStatus.kInfeasible:
        label = "infeasible"
    elif status == highspy.HighsModelStatus.kTimeLimit:
        label = "timeout"
    elif has_solution:
        label = "feasible"
    else:
        print(f"solver stopped with status {h.modelStatusToString(status)}", file=sys.stderr)
        return 1

    lines = [f"status {label}"]
    if has_solution and label != "infeasible":
        lines.append(f"objective {info.objective_function_value:.10g}")
        lines.append(f"bound {info.mip_dual_bound:.10g}")
        lp = h.getLp()
        values = h.getSolution().col_value
        for name, value in zip(lp.col_names_, values):
            lines.append(f"{name} {value:.10g}")
    args.model.with_suffix(".sol").write_text("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
