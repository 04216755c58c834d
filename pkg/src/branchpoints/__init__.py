"""Branch-point analysis for polynomial minimal surfaces.

Truncated bivariate series, Weierstrass-pair surfaces, local normal forms
and sheet-difference geometry at branch points, exact-curve continuation of
self-intersections, covering-space arithmetic, and the area-preserving
cut-and-paste comparison map.
"""

from .biseries import BiSeries
from .branchlocal import (
    CourantReport,
    NormalForm,
    SheetDifference,
    classify_branch,
    courant_report,
    image_directions,
    normal_form,
    proper_index,
    sheet_difference,
    zero_directions,
)
from .curvetrace import (
    TraceConfig,
    ZeroCurve,
    big_phi_exact,
    tangent_angle_at_origin,
    trace_family,
    trace_zero_curve,
    z_of_w_numeric,
)
from .cutpaste import (
    PentagonDecomposition,
    PiecewiseMapQ,
    SeamReport,
    build_decomposition,
    build_q,
    seam_checks,
)
from .errors import NumericalError, ValidationError
from .meshes import ParamMesh, annulus_mesh, disk_mesh, grid_mesh
from .topology import (
    CoveringSpec,
    SurfaceType,
    admissible_quotients,
    euler_char,
    minimality_certificate,
    rh_branching,
)
from .weierstrass import (
    BranchPointRecord,
    SurfaceMap,
    WeierstrassData,
    build_surface,
    conformality_check,
    derive_fz,
    detect_branch_points,
    discrete_energy_area,
    mesh_energy_area,
)

__version__ = "0.1.0"
