"""Check a Markov target, then move between paths and marked points."""
from __future__ import annotations

from fractions import Fraction

from finitary import (IdentityEncoder, InvisibleJump, MarkDistribution, MarkovSpec, Window,
                      assemble_trajectory, disassemble, psi_forward, sample_ctmc, sample_poisson,
                      special_cells, validate_target)
from finitary.flow import stationary_occupancy

H = Fraction(1, 2)


def main() -> None:
    spec = MarkovSpec(("a", "b", "c"), [[0, H, H], [H, 0, H], [H, H, 0]], 1)
    dist = MarkDistribution.from_probs([H, H])
    report = validate_target(spec, dist, 1)
    for name, check in report.checks.items():
        print(f"{name:12s} {'ok' if check.passed else 'FAILS'}  {check.detail}")
    flip = validate_target(MarkovSpec(("r", "b"), [[0, 1], [1, 0]], 1),
                           MarkDistribution.from_probs([Fraction(1)]), 1)
    print(f"two-state flip chain accepted: {flip.passed}")

    # a sampled path splits into Poisson jump times and its state sequence, and back
    path = sample_ctmc(spec, Window(0, 20000), 1)
    enc = IdentityEncoder(spec.states)
    marked = disassemble(path, enc)
    again = assemble_trajectory(marked, enc)
    print(f"path with {len(marked)} jumps disassembles and reassembles: "
          f"{(again.jumps, again.states) == (path.jumps, path.states)}; the state before the "
          f"first jump ({path.initial_state!r}) is not carried by the marks, so it comes back as "
          f"{again.initial_state!r}")
    occ = stationary_occupancy(path)
    total = sum(occ.values())
    print("time shares:", {s: round(float(v / total), 3) for s, v in occ.items()})

    # i.i.d. marks repeat, so the identity code hides some jumps
    seed = 0
    while len(special_cells(config := sample_poisson(1, Window(-4000, 4000), seed))) < 2:
        seed += 1
    bits = IdentityEncoder(dist.alphabet)
    iid = assemble_trajectory(psi_forward(config, dist).output, bits)
    try:
        disassemble(iid, bits)
    except InvisibleJump as exc:
        print(f"i.i.d. marks under the identity code: {exc}")


if __name__ == "__main__":
    main()
