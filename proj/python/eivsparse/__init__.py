"""Sparse regression under design uncertainty."""

from ._core import (
    CvResult,
    Dataset,
    InputError,
    NumericalError,
    Path,
    __version__,
    anova,
    anova_per_variable,
    attenuation_experiment,
    cross_validate,
    dantzig,
    dantzig_grid,
    dantzig_path,
    design_uncertainty,
    forward_stagewise,
    generate,
    heteroscedastic_ensemble,
    lars,
    lasso_objective,
    load_csv,
    path_uncertainty,
    ridge,
    save_csv,
    scaling_diagonal,
    selection_agreement,
    toy_example,
)

__all__ = [
    "CvResult",
    "Dataset",
    "InputError",
    "NumericalError",
    "Path",
    "__version__",
    "anova",
    "anova_per_variable",
    "attenuation_experiment",
    "cross_validate",
    "dantzig",
    "dantzig_grid",
    "dantzig_path",
    "design_uncertainty",
    "forward_stagewise",
    "generate",
    "heteroscedastic_ensemble",
    "lars",
    "lasso_objective",
    "load_csv",
    "path_uncertainty",
    "ridge",
    "save_csv",
    "scaling_diagonal",
    "selection_agreement",
    "toy_example",
]
