"""Two-layer ReLU training viewed as a reaction-diffusion process."""

try:
    from ._prdlab import *  # installed layout: extension lives inside the package
except ImportError:
    from _prdlab import *  # in-tree layout: extension comes from the build directory
