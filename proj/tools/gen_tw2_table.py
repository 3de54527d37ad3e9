#!/usr/bin/env python3
"""Generate the Tracy-Widom (beta = 2) CDF table used by tracy_widom.cpp.

Integrates the Hastings-McLeod solution of Painleve II, q'' = s q + 2 q^3,
backwards from s0 with Airy boundary data, together with

    u(s) = int_s^inf q(x)^2 dx,   v(s) = int_s^inf u(x) dx,

so that F2(s) = exp(-v(s)).  Writes a C++ include file with the grid.

Usage: gen_tw2_table.py OUT.inc
"""
import sys

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import airy

S_START = 12.0
S_MIN = -9.0
S_MAX = 6.0
STEP = 0.01


def rhs(s, y):
    q, dq, u, v = y
    return [dq, s * q + 2.0 * q ** 3, -q * q, -u]


def integrate():
    ai, aip, _, _ = airy(S_START)
    # u(s0) = Ai'^2 - s Ai^2 (antiderivative of Ai^2); v(s0) ~ 1e-27, dropped.
    y0 = [ai, aip, aip * aip - S_START * ai * ai, 0.0]
    n = int(round((S_MAX - S_MIN) / STEP)) + 1
    grid = S_MIN + STEP * np.arange(n)
    sol = solve_ivp(rhs, (S_START, S_MIN), y0, method="DOP853",
                    t_eval=np.concatenate(([S_START], grid[::-1])),
                    rtol=1e-13, atol=1e-300, first_step=1e-3)
    v = sol.y[3][1:][::-1]
    return grid, np.exp(-v)


def main():
    grid, cdf = integrate()
    assert np.all(np.diff(cdf) >= 0.0)
    pdf = np.gradient(cdf, grid)
    mean = np.trapezoid(grid * pdf, grid)
    var = np.trapezoid((grid - mean) ** 2 * pdf, grid)
    print(f"points={len(grid)} mean={mean:.10f} var={var:.10f}", file=sys.stderr)
    with open(sys.argv[1], "w") as out:
        out.write("// Generated by tools/gen_tw2_table.py. Do not edit.\n")
        out.write(f"constexpr double kTw2GridMin = {S_MIN!r};\n")
        out.write(f"constexpr double kTw2GridStep = {STEP!r};\n")
        out.write(f"constexpr std::size_t kTw2GridSize = {len(grid)};\n")
        out.write("constexpr double kTw2Cdf[kTw2GridSize] = {\n")
        for i in range(0, len(cdf), 4):
            out.write("    " + ", ".join(f"{c:.17e}" for c in cdf[i:i + 4]) + ",\n")
        out.write("};\n")


if __name__ == "__main__":
    main()
