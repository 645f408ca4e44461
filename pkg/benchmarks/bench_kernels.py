"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--rounds N] [--repeat R]
"""

import argparse
import timeit

import numpy as np

from mirrorsqkd import _kernels_py
from mirrorsqkd.adversary import NoiseChannelSpec, build_depolarizing_attack
from mirrorsqkd.stats import branch_tables

try:
    from mirrorsqkd import _kernels as _compiled
except ImportError:
    _compiled = None

SAE_ARGS = (0.2, 0.03, 0.04, 0.23, 0.5, 0.19, 0.2144, 1e-12)


def cases(rounds):
    alice_cdf, bob_cdf = branch_tables(*build_depolarizing_attack(NoiseChannelSpec(0.1, 0.1)))
    op_cdf = np.array([0.25, 0.5, 0.75, 1.0])
    u = np.random.default_rng(0).random((rounds, 4))
    t = np.linspace(-0.0346, 0.0346, 2001)
    return {
        f"tally_rounds ({rounds} rounds)": lambda m: m.tally_rounds(op_cdf, 0.5, alice_cdf, bob_cdf, u),
        "sae_scan (2001 points)": lambda m: m.sae_scan(*SAE_ARGS, t),
        "golden_section": lambda m: m.golden_section(*SAE_ARGS, -0.0246, 0.0346, 1e-11),
        "sae_point x1000": lambda m: [m.sae_point(*SAE_ARGS[:5], 0.1, 0.01) for _ in range(1000)],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rounds", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _compiled is None:
        print("compiled extension not built; only the numpy fallback is available")
    print(f"{'kernel':<32}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, fn in cases(args.rounds).items():
        py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if _compiled is None:
            print(f"{name:<32}{py:>14.3f}{'-':>14}{'-':>10}")
            continue
        cy = min(timeit.repeat(lambda: fn(_compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<32}{py:>14.3f}{cy:>14.3f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
