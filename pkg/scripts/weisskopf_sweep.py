"""Mean resonance width against the channel count M for fully open channels.

Prints mean(gamma) / (M dw / 2 pi) per M; values near 1 reproduce the
Weisskopf estimate of the overlap scale.
"""
import argparse

import numpy as np

from openres.effective import resonances_of
from openres.ensembles import sample_coupling, sample_goe_spectrum
from openres.seeding import stage_seed, substream


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--modes", type=int, default=500)
    parser.add_argument("--channels", type=int, nargs="+", default=[1, 2, 4, 8])
    parser.add_argument("--realizations", type=int, default=50)
    parser.add_argument("--coupling", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'M':>3} {'mean gamma':>12} {'ratio':>8} {'overlap':>8}")
    for m in args.channels:
        gammas, overlaps = [], []
        for i in range(args.realizations):
            seq = substream(args.seed, i)
            spec = sample_goe_spectrum(args.modes, 1.0, 10.0 * args.modes, stage_seed(seq, "spectrum"))
            coup = sample_coupling(args.modes, m, args.coupling, 1.0, stage_seed(seq, "coupling"))
            res = resonances_of(spec, coup)
            gammas.append(res.gamma.mean())
            overlaps.append(res.overlap_ratio)
        g = float(np.mean(gammas))
        print(f"{m:>3} {g:12.5f} {g / (m / (2 * np.pi)):8.4f} {np.mean(overlaps):8.4f}")


if __name__ == "__main__":
    main()
