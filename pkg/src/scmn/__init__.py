"""Spatially-coupled MacKay-Neal codes over channels with affine-subspace
outputs: exact GF(2) subspace algebra, channel transfer functions, density
evolution with threshold search, EXIT-like curve tracing, and Monte-Carlo
joint decoding."""

__version__ = "0.1.0"

from . import channel, de, ensemble, gf2, sim  # noqa: F401
