"""Search random measurement settings for a Bell violation by the named nc states.

For each state and seed the full local-polytope LP is solved; a non-local
table would come with a violated inequality. Also runs the CHSH control.
"""

import argparse
import time

import numpy as np

from nocorr.bell import MeasurementSet, born_table, critical_visibility
from nocorr.experiments import BellConfig, run_bell
from nocorr.notmap import nc_state
from nocorr.qla import DensityMatrix
from nocorr.states import NAMED_STATES, density, named_state


def chsh_control() -> None:
    def basis(theta):
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)

    m = MeasurementSet(((basis(0), basis(np.pi / 2)), (basis(np.pi / 4), basis(-np.pi / 4))))
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    v, _ = critical_visibility(born_table(DensityMatrix(np.outer(psi, psi), (2, 2)), m))
    print(f"CHSH control: critical visibility {v:.6f} (1/sqrt 2 = {1 / np.sqrt(2):.6f})")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--settings", type=int, default=3)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--states", default="".join(NAMED_STATES))
    args = ap.parse_args()

    chsh_control()
    cfg = BellConfig(settings=args.settings, trials=args.trials, seed=args.seed, workers=args.workers)
    for name in args.states:
        t0 = time.perf_counter()
        trials = run_bell(nc_state(density(named_state(name))), cfg)
        local = sum(t.result.local for t in trials)
        print(f"nc({name}): {local}/{len(trials)} local  ({time.perf_counter() - t0:.0f} s)")
        for t in trials:
            if not t.result.local:
                c = t.result.certificate
                print(f"  seed {t.seed}: violation {c.quantum_value:.6f} > {c.classical_bound:.6f}")


if __name__ == "__main__":
    main()
