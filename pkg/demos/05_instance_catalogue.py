"""The bundled instances and the instance file format.

Prints the catalogue with derived quantities, then round-trips one
instance through its JSON form.
"""

import tempfile
from pathlib import Path

from fsspack import (
    builtin_catalogue,
    load_instance,
    radius_upper_bound,
    save_instance,
)


def main() -> None:
    catalogue = builtin_catalogue()
    print(f"{'name':14s} {'disks':>5s} {'largest':>8s} {'cap(n=10)':>10s}")
    for name, inst in sorted(catalogue.items()):
        print(f"{name:14s} {inst.f_count:5d} {inst.max_prohibited_radius():8.5f} "
              f"{radius_upper_bound(inst, 10):10.6f}")

    print()
    inst = catalogue["problem1-f11"]
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "union.json"
        save_instance(inst, path)
        back = load_instance(path)
        print(f"saved and reloaded {inst.name}: "
              f"{'identical' if back.prohibited == inst.prohibited else 'DIFFERENT'}")
        print("file head:")
        for line in path.read_text().splitlines()[:8]:
            print(f"  {line}")


if __name__ == "__main__":
    main()
