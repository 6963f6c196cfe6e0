"""RIS-assisted uplink exposure and coverage planning simulator."""

from .scene import (Scene, Material, Wall, AntennaPattern, BsArraySpec, RisSpec,
                    LinkBudget, GridSpec, TracerSettings, parse_scene,
                    serialize_scene, validate_scene, bs_element_positions,
                    ris_element_positions)
from .raytrace import trace_paths, path_amplitude, pattern_gain, PathTrace, Path
from .channel import compute_h, compute_w, compute_q, channel_power, ChannelSet
from .ris import ris_weights_literal, ris_weights_cascade, equivalent_channel, RisWeights
from .link import (noise_power_dbm, target_snr, snr, target_power_dbm,
                   apply_power_control, evaluate_link, LinkResult, CoverageStatus)
from .mapper import (compute_map, improvement_map, classify, map_summary,
                     export_map_csv, CoverageMap, ClassificationMap)

__version__ = "0.1.0"
