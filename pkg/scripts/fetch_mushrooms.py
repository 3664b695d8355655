"""Download the mushrooms dataset and store it as tests/data/mushrooms.libsvm.

Requires network access to the LIBSVM dataset mirror.  Labels arrive as
1/2 and are remapped to +1/-1; features are already one-hot in [0, 1].
Once the file exists, the second half of acceptance criterion 3 (the
mushrooms objective check) runs against it.
"""
import os
import sys
import urllib.request

URL = ("https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/"
       "datasets/binary/mushrooms")


def main() -> int:
    out_path = os.path.join(os.path.dirname(__file__), "..",
                            "tests", "data", "mushrooms.libsvm")
    try:
        with urllib.request.urlopen(URL, timeout=60) as resp:
            raw = resp.read().decode()
    except OSError as exc:
        print(f"download failed: {exc}", file=sys.stderr)
        return 1
    lines = []
    for line in raw.splitlines():
        if not line.strip():
            continue
        label, rest = line.split(None, 1)
        mapped = "+1" if label in ("1", "+1") else "-1"
        lines.append(f"{mapped} {rest}")
    with open(out_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {out_path}: {len(lines)} points")
    return 0


if __name__ == "__main__":
    sys.exit(main())
