"""Physics-informed MLPs trained with finite-difference PDE residuals.

Ground truths come from SOR (Laplace trough) and a fine-grid method-of-lines
solve (viscous Burgers); networks, gradients and the momentum optimizer are
plain numpy.
"""

from .grid import ScalarField, UniformGrid2D, field_from_fn, make_grid, node_coords
from .metrics import l2_burgers, l2_laplace
from .stencils import (StencilAxis, burgers_residual, central_diff2, collocation_nodes,
                       forward_diff1, laplace_residual)
from .training import TrainConfig, predict_field, train

__all__ = [
    "ScalarField", "UniformGrid2D", "field_from_fn", "make_grid", "node_coords",
    "l2_burgers", "l2_laplace", "StencilAxis", "burgers_residual", "central_diff2",
    "collocation_nodes", "forward_diff1", "laplace_residual", "TrainConfig",
    "predict_field", "train",
]
__version__ = "0.1.0"
