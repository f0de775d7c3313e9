"""plot <artifact-dir> [--which snapshots|conservation|norms|stability|all]"""

from __future__ import annotations

import argparse
import sys

from .plots import WHICH, plot_all
from .reader import ArtifactError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot", description="render figures from a stored run artifact")
    parser.add_argument("artifact", help="run directory")
    parser.add_argument("--which", default="all",
                        choices=sorted(WHICH) + ["all"])
    parser.add_argument("--out", default=None,
                        help="output directory (default: <artifact>/figures)")
    args = parser.parse_args(argv)
    out = args.out or f"{args.artifact.rstrip('/')}/figures"
    try:
        if args.which == "all":
            written = plot_all(args.artifact, out)
        else:
            written = WHICH[args.which](args.artifact, out)
    except (ArtifactError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in written:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
