"""Build the qutrit Clifford group and check that it is a unitary 2-design.

The symmetric subspace of two qubits is a qutrit.  Its Clifford group has 216
elements up to global phase; averaging over it twirls any error channel into a
depolarizing one, which is what makes the decay a single exponential.
"""
import time

from srb.qgroups import build_clifford_group, frame_potential, weyl_unitary


def main():
    t0 = time.perf_counter()
    group = build_clifford_group()
    print(f"built {len(group)} Cliffords in {time.perf_counter() - t0:.2f} s")
    print(f"frame potential t=1: {frame_potential(group.unitaries, 1):.12f}")
    print(f"frame potential t=2: {frame_potential(group.unitaries, 2):.12f}  (2 for a 2-design)")

    # Each Clifford permutes the nine Weyl operators up to phase.
    c = 17
    print(f"\nClifford {c} maps Weyl labels as:")
    for a in range(3):
        row = [tuple(int(x) for x in group.weyl_image[c, a, b]) for b in range(3)]
        print("  ", row)

    # Compiled inversion: one Clifford undoes a sequence and appends a Weyl gate.
    seq = [5, 100, 42, 7]
    gate, outcome = group.compile_inversion(seq, (2, 1))
    print(f"\ninversion of {seq} with Weyl (2, 1): Clifford {gate}, ideal outcome {outcome}")
    print("X^2 Z |0> lands on |2>:", abs((weyl_unitary((2, 1)) @ [1, 0, 0])[2]) == 1)
    print("group checksum:", group.checksum[:16], "...")


if __name__ == "__main__":
    main()
