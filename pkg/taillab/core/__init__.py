from .errors import ConfigError, NumericFailure, SpectralAssumptionError, TaillabError
from .grids import GridFunction
from .logs import get_logger
