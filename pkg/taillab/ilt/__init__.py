from .bromwich import bromwich, bromwich_many
from .contours import DeformedHairpin, QuadratureRule, VerticalLine
from .hairpin import CutModel, deformed_cut_integral, watson_leading
from .reconstruct import reconstruct_time_solution, tail_models, tail_prediction
