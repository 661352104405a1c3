"""Connectivity and latency simulation of laser-linked LEO satellite networks.

Builds a uniform Walker-delta shell, classifies candidate laser links by
plane relation and permanence, snapshots the connectivity graph per time
slot under a range and link policy, and routes minimum-latency paths
between ground stations.
"""
from .geometry import PhysicalConstants, great_circle_distance, max_lisl_range
from .links import GraphSnapshot, Link, LinkEngine, LinkType, Mode, Permanence, link_census
from .orbital import (ConstellationSpec, GroundStation, SatelliteId, StateVector,
                      build_constellation, format_id, ground_station_position)
from .routing import PathResult, oracle_shortest_path, shortest_path, shortest_path_exact
from .scenario import (BUNDLED_STATIONS, DEFAULT_RANGES_KM, ComparisonResult,
                       MetricsSummary, ScenarioConfig, SlotRecord, compare,
                       range_sweep, run_scenario)

__all__ = [
    "BUNDLED_STATIONS", "ComparisonResult", "ConstellationSpec", "DEFAULT_RANGES_KM",
    "GraphSnapshot", "GroundStation", "Link", "LinkEngine", "LinkType", "MetricsSummary",
    "Mode", "PathResult", "Permanence", "PhysicalConstants", "SatelliteId", "ScenarioConfig",
    "SlotRecord", "StateVector", "build_constellation", "compare", "format_id",
    "great_circle_distance", "ground_station_position", "link_census", "max_lisl_range",
    "oracle_shortest_path", "range_sweep", "run_scenario", "shortest_path",
    "shortest_path_exact",
]

__version__ = "0.1.0"
