#!/usr/bin/env python3
"""Run every solver on one random instance and tabulate the outcomes."""

import argparse
import time

from psdsparsify import ALGORITHMS, reduce_to_identity, run_algorithm
from psdsparsify.instances import random_psd_collection
from psdsparsify.solve import certificate_passes


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--m", type=int, default=200)
    parser.add_argument("--eps", type=float, default=0.45)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    coll = random_psd_collection(args.n, args.m, seed=args.seed)
    reduced = reduce_to_identity(coll)
    print(f"instance: n={args.n} m={args.m} rank={reduced.rank} eps={args.eps}\n")
    print(f"{'algorithm':<12} {'support':>8} {'lambda_min':>12} {'lambda_max':>12} "
          f"{'pass':>5} {'time':>8}")
    for algo in ALGORITHMS:
        start = time.monotonic()
        result = run_algorithm(reduced, args.eps, algo, seed=args.seed)
        elapsed = time.monotonic() - start
        cert = result.certificate
        ok = certificate_passes(algo, args.eps, cert)
        print(
            f"{algo:<12} {cert.support_size:>8} {cert.lambda_min:>12.6f} "
            f"{cert.lambda_max:>12.6f} {'yes' if ok else 'NO':>5} {elapsed:>7.2f}s"
        )


if __name__ == "__main__":
    main()
