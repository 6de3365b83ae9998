"""Hot numerical kernels with a compiled core and a numpy fallback.

The Cython extension is preferred when it imported cleanly; otherwise the
pure-numpy implementations take over. ``BACKEND`` reports which one is
active. Set ``KPDEFORM_FORCE_PYTHON_KERNELS=1`` to force the fallback.
"""
import os

from . import _impl_py

if os.environ.get("KPDEFORM_FORCE_PYTHON_KERNELS"):
    _impl = _impl_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _impl_py

BACKEND = _impl.BACKEND

nearest_neighbors = _impl.nearest_neighbors
farthest_point_indices = _impl.farthest_point_indices
mean_value_coordinates = _impl.mean_value_coordinates
point_mesh_sqdist = _impl.point_mesh_sqdist

__all__ = [
    "BACKEND",
    "nearest_neighbors",
    "farthest_point_indices",
    "mean_value_coordinates",
    "point_mesh_sqdist",
]
