#!/usr/bin/env python3
"""Power-allocation case study: equilibria under all three feasibility modes.

Prints a comparison table (unconstrained / block / one-shot / revealing) for
the bundled two-state scenario and optionally dumps the full results as JSON.
"""
import argparse
import json

from infodesign.mac import build_scenario, default_config, load_config
from infodesign.persuasion import (Block, OneShot, Unconstrained,
                                   sender_value, solve_equilibrium)
from infodesign.prob import binary_entropy
from infodesign.splitting import PosteriorPair


def row(res):
    return {"phi1": res.phi1_star, "phi2": res.phi2_star,
            "posteriors": [res.posteriors.p1, res.posteriors.p2],
            "signal": [res.signal.alpha, res.signal.beta],
            "actions": list(res.receiver_actions),
            "no_info": res.no_info,
            "feasible": res.feasibility.feasible,
            "slack": res.feasibility.slack}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=None,
                    help="scenario config JSON (default: bundled)")
    ap.add_argument("--eps", type=float, default=0.25,
                    help="channel flip probability (default 0.25)")
    ap.add_argument("--resolution", type=float, default=1e-3)
    ap.add_argument("--json", dest="json_out", default=None,
                    help="write full results to this path")
    args = ap.parse_args()

    cfg = load_config(args.config) if args.config else default_config()
    sc = build_scenario(cfg)
    cap = 1.0 - binary_entropy(args.eps)

    results = {
        "unconstrained": row(solve_equilibrium(sc, Unconstrained(),
                                               args.resolution)),
        "block": row(solve_equilibrium(sc, Block(cap), args.resolution)),
        "one_shot": row(solve_equilibrium(sc, OneShot(args.eps),
                                          args.resolution)),
    }
    rev1, rev2 = sender_value(PosteriorPair(0.0, 1.0), cfg.prior_p, sc)
    results["revealing"] = {"phi1": rev1, "phi2": rev2}

    base = rev1
    print(f"eps={args.eps}  capacity={cap:.6f}  resolution={args.resolution}")
    print(f"{'mode':<14} {'phi1*':>10} {'phi2*':>10} {'gain vs revealing':>18}")
    for name in ("unconstrained", "block", "one_shot", "revealing"):
        r = results[name]
        gain = 100.0 * (r["phi1"] - base) / base
        print(f"{name:<14} {r['phi1']:>10.6f} {r['phi2']:>10.6f} "
              f"{gain:>17.2f}%")

    if args.json_out:
        with open(args.json_out, "w") as f:
            json.dump({"eps": args.eps, "capacity": cap,
                       "resolution": args.resolution, "results": results},
                      f, indent=2, sort_keys=True)
            f.write("\n")
        print(f"wrote {args.json_out}")


if __name__ == "__main__":
    main()
