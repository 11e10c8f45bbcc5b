"""C1-continuous local cubic interpolation on regular 3D and 4D grids.

Each grid cell carries its own tensor-product cubic whose coefficients
are pinned by the field value and all mixed first partials at the cell
corners, estimated from centered differences of the surrounding
samples. One precomputed operator per dimension turns a cell's raw
4-wide sample neighborhood directly into polynomial coefficients, so
queries cost a cache lookup plus a Horner contraction; values and all
first partial derivatives are continuous across cell faces and the
partials come out of the same polynomial analytically.

Quick start::

    import numpy as np
    from hyperspline import Axis, RegularGrid, Interpolator

    axes = [Axis(0.0, 0.5, 12)] * 3
    xs = axes[0].coordinates()
    zz, yy, xx = np.meshgrid(xs, xs, xs, indexing="ij")
    grid = RegularGrid(axes, np.sin(xx) * np.cos(yy) * np.cos(zz))
    f = Interpolator(grid)
    r = f.eval_with_gradient([1.3, 2.1, 0.9])
    r.values, r.gradient
"""

from .errors import (
    BadMagicError,
    CacheFormatError,
    DimensionMismatchError,
    FingerprintMismatchError,
    GridFormatError,
    HypersplineError,
    IncompleteGridError,
    IrregularSpacingError,
    MissingHeaderError,
    NonFiniteValueError,
    NonIntegerInverseWarning,
    OutOfDomainError,
    SingularMatrixError,
    TooFewPointsError,
    TruncatedFileError,
    UnsupportedDimensionError,
    VersionMismatchError,
)
from .grid import (
    Axis,
    BoundaryPolicy,
    ElementRef,
    RegularGrid,
    infer_axis,
    locate,
    neighborhood,
    neighborhood_block,
)
from .interpolator import BatchResult, Interpolator, QueryResult
from .operators import (
    OperatorSet,
    Quantity,
    SparseRational,
    constraint_matrix,
    constraint_quantities,
    difference_matrix,
    fused_matrix,
    invert_exact,
    operator_set,
)
from .fields import (
    AnalyticField,
    ContinuityReport,
    ConvergenceReport,
    builtin_fields,
    catmull_rom_1d,
    constant_field,
    continuity_scan,
    convergence_study,
    linear_field,
    multilinear_field,
    oracle_coefficients,
    quadrupole_field,
    sample,
    tensor_polynomial_field,
    trig_product_field,
)
from .io import load_cache, load_grid_csv, save_cache, write_grid_csv, write_results_csv

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "AnalyticField",
    "BatchResult",
    "BoundaryPolicy",
    "ContinuityReport",
    "ConvergenceReport",
    "ElementRef",
    "Interpolator",
    "OperatorSet",
    "Quantity",
    "QueryResult",
    "RegularGrid",
    "SparseRational",
    "builtin_fields",
    "catmull_rom_1d",
    "constant_field",
    "constraint_matrix",
    "constraint_quantities",
    "continuity_scan",
    "convergence_study",
    "difference_matrix",
    "fused_matrix",
    "infer_axis",
    "invert_exact",
    "linear_field",
    "load_cache",
    "load_grid_csv",
    "locate",
    "multilinear_field",
    "neighborhood",
    "neighborhood_block",
    "operator_set",
    "oracle_coefficients",
    "quadrupole_field",
    "sample",
    "save_cache",
    "tensor_polynomial_field",
    "trig_product_field",
    "write_grid_csv",
    "write_results_csv",
    # errors
    "HypersplineError",
    "BadMagicError",
    "CacheFormatError",
    "DimensionMismatchError",
    "FingerprintMismatchError",
    "GridFormatError",
    "IncompleteGridError",
    "IrregularSpacingError",
    "MissingHeaderError",
    "NonFiniteValueError",
    "NonIntegerInverseWarning",
    "OutOfDomainError",
    "SingularMatrixError",
    "TooFewPointsError",
    "TruncatedFileError",
    "UnsupportedDimensionError",
    "VersionMismatchError",
]
