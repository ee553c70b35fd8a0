"""Sample Poisson points, find the globes, mark the points and undo the marking."""
from __future__ import annotations

import math
from fractions import Fraction

from finitary import (MarkDistribution, Window, find_globes, psi_forward, psi_inverse,
                      sample_poisson, special_cells)
from finitary.pointproc import refine_points


def main() -> None:
    dist = MarkDistribution.from_probs([Fraction(1, 3), Fraction(2, 3)])
    seed = 0
    while True:
        config = sample_poisson(1, Window(-4000, 4000), seed)
        if len(special_cells(config)) >= 3:
            break
        seed += 1
    print(f"seed {seed}: {len(config)} points on {config.window}")

    # a 64-bit sample cannot supply hundreds of marks from one point, so the
    # special points get extra uniform low-order bits first
    cells = special_cells(config)
    worst = max(-math.log2(p) for p in dist.probs)
    extra = {cur.index: math.ceil((cur.index - prev.index) * worst) + 64
             for prev, cur in zip(cells, cells[1:])}
    config = refine_points(config, extra, config.window.length / 2 ** 64, seed)

    gs = find_globes(config)
    special = [g for g in gs.globes if g.special]
    print(f"{len(gs.globes)} globes on the certified region {gs.certified}, {len(special)} special")
    for g in special:
        print(f"  globe [{g.lo}, {g.hi}] holds one point at offset {float(g.special_point - g.center):+.4f}")

    result = psi_forward(config, dist, globes=gs)
    print(f"marked region {result.core_region}")
    for rec in result.witness:
        print(f"  cell ending at {rec.center}: {rec.n} marks from one uniform, "
              f"{rec.bits_available} bits available, {rec.bits_needed:.0f} needed")
    marked = [m for m in result.output.marks if m is not None]
    share = marked.count(dist.alphabet[1]) / len(marked)
    print(f"{len(marked)} marks, share of the likelier symbol {share:.3f} (expected 0.667)")

    back = psi_inverse(result.output, dist)
    print(f"inverse restores the input exactly: {back == config}")


if __name__ == "__main__":
    main()
