"""Regenerate the JSON fixtures under fixtures/."""

import json
from pathlib import Path

from gapcert.complex import from_koszul
from gapcert.group import GroupDescriptor, cyclic, free_abelian, free_group, symmetric3

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def dump(name, data):
    with open(OUT / name, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")


def main():
    OUT.mkdir(exist_ok=True)
    dump("z.json", free_abelian(1).to_json())
    dump("z2.json", free_abelian(2).to_json())
    dump("z3.json", free_abelian(3).to_json())
    dump("f2.json", free_group(2).to_json())
    dump("c2.json", cyclic(2).to_json())
    dump("c3.json", cyclic(3).to_json())
    dump("c4.json", cyclic(4).to_json())
    dump("s3.json", symmetric3().to_json())
    # Z^2 with a stray relator: the Fox matrix no longer composes to zero
    bad = GroupDescriptor(("s", "t"), ("s t s^-1 t^-1", "s^2"), "abelian", name="bad")
    dump("bad.json", bad.to_json())
    dump("koszul3.json", from_koszul(3).to_json())


if __name__ == "__main__":
    main()
