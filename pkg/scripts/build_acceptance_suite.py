#!/usr/bin/env python3
"""Generate the full verification suite (bodies + experiments) as JSON,
runnable with `crofton suite`.

Covers the rotational surface/line/hyperplane routes on an off-center
ball and cube, the affine Minkowski routes on cube and ellipsoids, and
the harmonic route, at Monte Carlo size N (default 10^5).
"""

import argparse
import json
from pathlib import Path

BALL_OFF = {"type": "ball", "center": [0.3, 0.0, 0.1], "radius": 1.0}
CUBE_OFF = {"type": "polytope",
            "vertices": [[x, y, z] for x in (0.1, 1.1) for y in (0.1, 1.1)
                         for z in (0.1, 1.1)]}
CUBE_UNIT = {"type": "polytope",
             "vertices": [[x, y, z] for x in (0.0, 1.0) for y in (0.0, 1.0)
                          for z in (0.0, 1.0)]}
ELL = {"type": "ellipsoid", "center": [0.0, 0.0, 0.0],
       "semiaxes": [1.0, 1.0, 2.0]}
ELL_OFF = {"type": "ellipsoid", "center": [0.25, -0.1, 0.15],
           "semiaxes": [1.0, 1.0, 2.0]}

RS_LIST = [(0, 0), (1, 0), (0, 1), (0, 2), (1, 1)]
TOL = {"ci_mult": 3.0, "atol": 1e-4, "rel_tol": 0.02, "rel_floor": 1e-3}


def build(n_samples: int) -> dict:
    experiments = []

    def add(name, body, theorem, params, **kw):
        entry = {"name": name, "body": body, "theorem": theorem,
                 "params": params, "n_samples": n_samples,
                 "tolerances": dict(TOL)}
        entry.update(kw)
        experiments.append(entry)

    for tag, body in (("ball", BALL_OFF), ("cube", CUBE_OFF)):
        so = 8 if tag == "ball" else 32
        for r, s in RS_LIST:
            add(f"rot-surface-{tag}-r{r}s{s}", body, "rot-surface",
                {"j": 2, "r": r, "s": s}, section_order=so)
            add(f"rot-lines-{tag}-r{r}s{s}", body, "rot-lines",
                {"j": 1, "r": r, "s": s}, section_order=so)
    for r in (0, 1):
        add(f"rot-hyper-ball-r{r}", BALL_OFF, "rot-hyper",
            {"j": 2, "k": 0, "r": r}, section_order=8)
    add("aff-lines-ball", {"type": "ball", "center": [0, 0, 0],
                           "radius": 1.0},
        "aff-minkowski", {"j": 1, "k": 0})
    for j, k in ((1, 0), (2, 0), (2, 1)):
        add(f"aff-classical-cube-j{j}k{k}", CUBE_UNIT, "aff-minkowski",
            {"j": j, "k": k})
    for r in (0, 1):
        for s in range(4):
            add(f"aff-mink-ell-r{r}s{s}", ELL, "aff-minkowski",
                {"j": 2, "k": 1, "r": r, "s": s})
    add("aff-mink-cube-r0s2", CUBE_OFF, "aff-minkowski",
        {"j": 2, "k": 0, "r": 0, "s": 2})
    for s in (1, 2):
        add(f"aff-harmonic-ell-s{s}", ELL_OFF, "aff-harmonic",
            {"j": 2, "s": s})
    return {"seed": 20260809, "output_dir": "suite-out",
            "experiments": experiments}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-samples", type=int, default=100_000)
    parser.add_argument("--out", type=Path,
                        default=Path("suite/verification.json"))
    args = parser.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(build(args.n_samples), indent=2) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
