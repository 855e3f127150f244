"""plotview: publication-style figures from simulation CSV bundles."""

__version__ = "0.1.0"

from .recipes import (
    FIGURE_KINDS,
    EmptyInput,
    FigureRecipe,
    MissingColumn,
    RecipeInput,
    recipe_from_dict,
    render,
)

__all__ = [
    "FIGURE_KINDS",
    "EmptyInput",
    "FigureRecipe",
    "MissingColumn",
    "RecipeInput",
    "recipe_from_dict",
    "render",
]
