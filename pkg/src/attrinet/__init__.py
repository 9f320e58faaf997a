"""attrinet: attributed preferential-attachment networks, their large-network limits and sampling."""

from .errors import AttrinetError
from .model import Graph, ModelParams, RngStream, validate_params

__version__ = "0.1.0"

__all__ = ["AttrinetError", "Graph", "ModelParams", "RngStream", "validate_params", "__version__"]
