"""Weierstrass-like functions from twisted cohomological equations over expanding circle maps."""

__version__ = "0.1.0"

from .alpha import (EvalResult, GraphSample, TwistConfig, eval_alpha, eval_alpha_iterative,
                    residual, truncation_for)
from .bounds import (ConditionAReport, WitnessReport, condition_a_report, find_witness,
                     hardy_threshold, pinching_constant)
from .maps import (CircleMap, CircleMapSpec, MapConstants, OrbitSlice, distortion_check,
                   forward_orbit, linear_map, make_map, map_constants, sine_map)
from .observables import Observable, compose_frequency, make_constant, make_cosine, scale
from .regularity import (BoxDimEstimate, HolderEstimate, box_dimension,
                         exponent_bound_from_dimension, holder_exponent_at)
from .symbolic import (DimViaPressure, PressureEstimate, SymbolSeq, birkhoff_ratio,
                       code_point, cylinder_diameter, dimension_via_pressure, itinerary,
                       pressure)
