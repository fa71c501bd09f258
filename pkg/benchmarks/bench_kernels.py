"""Compare the numba and numpy backends on the two hot loops.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Kernel timings call the ``*_loops`` and ``*_numpy`` variants directly; the
end-to-end row runs the L⁻_τ solver in a subprocess per backend so the
environment flag is exercised as a user would set it.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from carleman_lab import kernels
from carleman_lab._backend import HAVE_NUMBA
from carleman_lab.spectral import TGrid, varphi

E2E = """
import time
from carleman_lab import corpus as C
from carleman_lab.operators import solve_Lminus_tau
from carleman_lab.spectral import TGrid
tg = TGrid()
f = C.random_bandlimited(0, 16, tg).spectrum(tg)
solve_Lminus_tau(f, 8.0)
t0 = time.perf_counter()
for _ in range({n}):
    solve_Lminus_tau(f, 8.0)
print((time.perf_counter() - t0) / {n})
"""


def _solver_inputs(count: int, modes: int, tau: float = 8.0, k: int = 5):
    tg = TGrid(count=count)
    t, h = tg.t, tg.dt
    gx, gw = np.polynomial.legendre.leggauss(4)
    s = t[:-1, None] + h * 0.5 * (gx + 1)[None, :]
    rng = np.random.default_rng(0)
    f = rng.normal(size=(count - 1, 4, modes)) + 1j * rng.normal(size=(count - 1, 4, modes))
    fwd = k >= np.ceil(tau * (1 + 2 / t))
    return tau * varphi(t) - k * t, tau * varphi(s) - k * s, f, 0.5 * h * gw, fwd


def _best(fn, repeat: int) -> float:
    fn()  # warm-up, includes JIT compilation
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench(repeat: int) -> list[dict]:
    rows = []
    for lmax, npts in ((32, 256), (96, 512)):
        x = np.cos(np.linspace(0.01, np.pi - 0.01, npts))
        row = {"kernel": "legendre_table", "size": f"lmax={lmax} x={npts}",
               "numpy_s": _best(lambda: kernels.legendre_table_numpy(lmax, x), repeat)}
        if HAVE_NUMBA:
            row["numba_s"] = _best(lambda: kernels.legendre_table_loops(lmax, x), repeat)
        rows.append(row)
    for count, modes in ((1024, 17), (4096, 17)):
        args = _solver_inputs(count, modes)
        row = {"kernel": "kernel_solve", "size": f"t={count} modes={modes}",
               "numpy_s": _best(lambda: kernels.kernel_solve_numpy(*args), repeat)}
        if HAVE_NUMBA:
            row["numba_s"] = _best(lambda: kernels.kernel_solve_loops(*args), repeat)
        rows.append(row)
    e2e = {"kernel": "solve_Lminus_tau (subprocess)", "size": "default grid, k_max=16"}
    for backend in ("numpy", "numba"):
        env = {**os.environ, "CARLEMAN_LAB_BACKEND": backend}
        out = subprocess.run([sys.executable, "-c", E2E.format(n=repeat)], env=env,
                             capture_output=True, text=True, check=True)
        e2e[f"{backend}_s"] = float(out.stdout.strip())
    rows.append(e2e)
    for row in rows:
        if "numba_s" in row:
            row["speedup"] = row["numpy_s"] / row["numba_s"]
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the rows here")
    args = ap.parse_args()
    rows = bench(args.repeat)
    print(f"{'kernel':32s} {'size':24s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for r in rows:
        nb = r.get("numba_s", float("nan"))
        print(f"{r['kernel']:32s} {r['size']:24s} {1e3 * r['numpy_s']:11.3f} {1e3 * nb:11.3f} "
              f"{r.get('speedup', float('nan')):8.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
