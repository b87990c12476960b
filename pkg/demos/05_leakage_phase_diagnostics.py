"""Why the leakage phase must be randomized.

With a fixed singlet phase per recipe, coherences between the RB block and the
singlet survive the sequence average (eigenvalues of magnitude 1).  Swapping
the last phase gate for the XX-YY gate in half of the Cliffords flips that
phase, and the coherence eigenvalues collapse.
"""
import numpy as np

from srb.analysis import twirl_diagnostics
from srb.tables import default_tables


def main():
    tables = default_tables()
    std = [r.unitary() for r in tables.recipes]
    rev = [r.unitary() for r in tables.reversed_recipes]

    fixed = twirl_diagnostics(std)
    mixed = twirl_diagnostics(std + rev, reference=std + std)
    for name, d in (("fixed phase", fixed), ("50/50 reversed", mixed)):
        print(f"{name}:")
        for sector, ev in d.sectors.items():
            print(f"  {sector:14s} |eig| = {np.round(np.abs(ev), 4)}")
        print(f"  unit eigenvalues of the averaged map: {d.unit_eigenvalues()}")


if __name__ == "__main__":
    main()
