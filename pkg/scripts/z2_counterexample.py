"""Z^2: an element of ker D_0 that is not in Im D_1, and how it splits.

Prints the verdicts for the diagonal element diag((1-t^-1)(1-t), (s^-1-1)(1-s))
and for a few more diagonal kernel elements, and writes a JSON table.
"""

import argparse
import json

from gapcert.complex import D_apply, from_presentation
from gapcert.group import free_abelian, parse_element
from gapcert.lift import im_D_membership, kernel_basis, sc_decompose
from gapcert.matrix import GRMatrix


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=int, default=2)
    ap.add_argument("--out", default="results/z2_counterexample.json")
    args = ap.parse_args()

    g = free_abelian(2)
    C = from_presentation(g)
    a = GRMatrix.diag(g, [parse_element(g, "1 - t^-1") * parse_element(g, "1 - t"),
                          parse_element(g, "s^-1 - 1") * parse_element(g, "1 - s")])
    rows = []
    for label, el in [("counterexample", a)] + [
            (f"kernel basis {i}", b) for i, b in enumerate(kernel_basis(C, 1, args.radius, True))]:
        assert D_apply(C, 0, el).is_zero()
        mem = im_D_membership(C, 1, el)
        dec = sc_decompose(C, 1, el)
        rows.append({"label": label, "diag": [str(el[0, 0]), str(el[1, 1])],
                     "im_D1": mem.status, "reason": mem.reason,
                     "sc_x": str(dec.x), "sc_y": str(dec.y)})
        print(f"{label:16s} {str(el[0, 0]):>28s} | {str(el[1, 1]):<28s} Im D_1: {mem.status:18s}"
              f" split conjugation: found")
    with open(args.out, "w") as fh:
        json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
