"""Standalone renderer: plotview --recipe recipe.yaml --out figure.png"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .recipes import EmptyInput, MissingColumn, recipe_from_dict, render


def cli_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotview", description=__doc__)
    parser.add_argument("--recipe", type=Path, required=True, help="recipe YAML file")
    parser.add_argument("--out", type=Path, required=True, help="output image (.png or .svg)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1

    try:
        doc = yaml.safe_load(args.recipe.read_text())
        recipe = recipe_from_dict(doc)
        render(recipe, args.out)
    except (MissingColumn, EmptyInput, ValueError, KeyError) as exc:
        print(f"recipe error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.out}")
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
