"""Laser-link classification and per-slot connectivity graphs.

Links between satellites are classed two ways: by the orbital-plane
relation of their endpoints (intra-plane, adjacent-plane, nearby-plane, or
crossing-plane) and by permanence (a pair is permanent at a given range iff
it never leaves that range over one orbital period). Snapshots collect all
feasible links at one instant under a range and a link policy:

* NG  - permanent inter-satellite links only,
* NNG - permanent and temporary inter-satellite links.

Ground-to-satellite links are present in both policies and are always
classed temporary (satellites pass over stations).

Because every orbit shares the same radius, period, and inclination, the
distance history of a pair depends only on the plane offset and slot offset
between its members. Permanence is therefore precomputed once per
constellation into a (plane_count x sats_per_plane) class table of
max/min separations over one period, sampled at 1 s; intra-plane offsets
short-circuit to the constant chord 2*r*sin(pi*ds/S).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import PhysicalConstants
from .orbital import Constellation, GroundStation, SatelliteId, format_id, ground_station_position


class LinkType(enum.Enum):
    INTRA_OP = "IntraOP"
    ADJACENT_OP = "AdjacentOP"
    NEARBY_OP = "NearbyOP"
    CROSSING_OP = "CrossingOP"
    GROUND_LINK = "GroundLink"


class Permanence(enum.Enum):
    PERMANENT = "Permanent"
    TEMPORARY = "Temporary"


class Mode(enum.Enum):
    """Link policy of a snapshot: permanent-only (NG) or all links (NNG)."""

    NG = "NG"
    NNG = "NNG"


_SAT_TYPE_CODES = (LinkType.INTRA_OP, LinkType.ADJACENT_OP,
                   LinkType.NEARBY_OP, LinkType.CROSSING_OP)


@dataclass(frozen=True)
class Link:
    """One undirected laser link present in a snapshot."""

    endpoint_a: str
    endpoint_b: str
    length_km: float
    propagation_delay_ms: float
    link_type: LinkType
    permanence: Permanence


@dataclass(frozen=True)
class LinkCensus:
    """Exhaustive partition of a snapshot's links by (type, permanence)."""

    time_s: float
    lisl_range_km: float
    mode: Mode
    counts: dict[tuple[LinkType, Permanence], int]
    total_undirected: int
    total_directed: int  # every link counted once per direction


class GraphSnapshot:
    """The connectivity graph of the network at one time slot.

    Satellite nodes use flat indices 0..N-1; ground stations follow in the
    order given, at indices N..N+K-1. Link data is held in parallel arrays;
    the ``links`` property materializes Link records on demand.
    """

    def __init__(self, *, time_s, lisl_range_km, mode, constellation, constants,
                 stations, sat_positions, gs_positions,
                 sat_a, sat_b, sat_length_km, sat_type_code, sat_permanent,
                 gs_station_index, gs_sat_index, gs_length_km):
        self.time_s = time_s
        self.lisl_range_km = lisl_range_km
        self.mode = mode
        self.constellation = constellation
        self.constants = constants
        self.stations = tuple(stations)
        self.sat_positions = sat_positions
        self.gs_positions = gs_positions
        self.sat_a = sat_a
        self.sat_b = sat_b
        self.sat_length_km = sat_length_km
        self.sat_type_code = sat_type_code
        self.sat_permanent = sat_permanent
        self.gs_station_index = gs_station_index
        self.gs_sat_index = gs_sat_index
        self.gs_length_km = gs_length_km

    @property
    def satellite_count(self) -> int:
        return len(self.constellation)

    @property
    def node_count(self) -> int:
        return self.satellite_count + len(self.stations)

    @property
    def link_count(self) -> int:
        return len(self.sat_a) + len(self.gs_sat_index)

    def node_name(self, index: int) -> str:
        if index < self.satellite_count:
            return format_id(self.constellation.satellite_id(index))
        return self.stations[index - self.satellite_count].name

    def node_index(self, node) -> int:
        """Resolve a SatelliteId, station name, or formatted id to a node index."""
        if isinstance(node, SatelliteId):
            return self.constellation.flat_index(node)
        if isinstance(node, GroundStation):
            node = node.name
        for k, gs in enumerate(self.stations):
            if gs.name == node:
                return self.satellite_count + k
        for k in range(self.satellite_count):
            if format_id(self.constellation.satellite_id(k)) == node:
                return k
        raise KeyError(f"node {node!r} not present in snapshot")

    @cached_property
    def _position_table(self) -> np.ndarray:
        if len(self.stations) == 0:
            return self.sat_positions
        return np.vstack([self.sat_positions, self.gs_positions])

    def node_position(self, index: int) -> np.ndarray:
        return self._position_table[index]

    @property
    def links(self) -> list[Link]:
        delay = self.constants.propagation_delay_ms
        out = []
        for a, b, length, code, perm in zip(self.sat_a, self.sat_b, self.sat_length_km,
                                            self.sat_type_code, self.sat_permanent):
            out.append(Link(
                endpoint_a=self.node_name(int(a)),
                endpoint_b=self.node_name(int(b)),
                length_km=float(length),
                propagation_delay_ms=float(delay(length)),
                link_type=_SAT_TYPE_CODES[int(code)],
                permanence=Permanence.PERMANENT if perm else Permanence.TEMPORARY))
        for gi, si, length in zip(self.gs_station_index, self.gs_sat_index, self.gs_length_km):
            out.append(Link(
                endpoint_a=self.node_name(int(si)),
                endpoint_b=self.stations[int(gi)].name,
                length_km=float(length),
                propagation_delay_ms=float(delay(length)),
                link_type=LinkType.GROUND_LINK,
                permanence=Permanence.TEMPORARY))
        return out


class LinkEngine:
    """Builds snapshots of one constellation under shared physical constants.

    The pair-class permanence tables are computed once at construction and
    are read-only afterwards, so one engine can serve any number of slots,
    ranges, and modes, from any number of threads.
    """

    def __init__(self, constellation: Constellation, constants: PhysicalConstants | None = None,
                 earth_rotation0_deg: float = 0.0):
        self.constellation = constellation
        self.constants = constants if constants is not None else PhysicalConstants()
        self.earth_rotation0_deg = earth_rotation0_deg
        self._pair_max_km, self._pair_min_km = self._build_class_tables()
        self._candidate_cache: dict[tuple[Mode, float], tuple[np.ndarray, ...]] = {}

    # -- pair classes -------------------------------------------------

    def _build_class_tables(self) -> tuple[np.ndarray, np.ndarray]:
        spec = self.constellation.spec
        planes, slots = spec.plane_count, spec.sats_per_plane
        r = spec.orbit_radius_km
        times = np.arange(0.0, math.ceil(spec.orbital_period_s) + 1.0, 1.0)

        u_ref = spec.mean_motion_rad_s * times
        incl = math.radians(spec.inclination_deg)
        ci, si = math.cos(incl), math.sin(incl)

        def track(raan_rad, u):
            cu, su = np.cos(u), np.sin(u)
            co, so = math.cos(raan_rad), math.sin(raan_rad)
            return np.stack([
                r * (cu * co - su * so * ci),
                r * (cu * so + su * co * ci),
                r * (su * si)], axis=-1)

        ref = track(0.0, u_ref)
        pair_max = np.full((planes, slots), np.inf)
        pair_min = np.full((planes, slots), np.inf)
        slot_step = 2.0 * math.pi / slots
        phase_step = 2.0 * math.pi / (planes * slots)
        chords = 2.0 * r * np.sin(np.pi * np.arange(1, slots) / slots)
        pair_max[0, 1:] = chords
        pair_min[0, 1:] = chords
        ds_offsets = np.arange(slots) * slot_step
        for dp in range(1, planes):
            raan = 2.0 * math.pi * dp / planes * (spec.raan_spread_deg / 360.0)
            u = u_ref[None, :] + (ds_offsets + dp * spec.phasing_offset * phase_step)[:, None]
            d = np.linalg.norm(track(raan, u) - ref[None, :, :], axis=-1)
            pair_max[dp] = d.max(axis=1)
            pair_min[dp] = d.min(axis=1)
        return pair_max, pair_min

    @property
    def pair_max_table_km(self) -> np.ndarray:
        """Class table of max pair separation over one period, by (plane offset, slot offset)."""
        return self._pair_max_km

    @property
    def pair_min_table_km(self) -> np.ndarray:
        """Class table of min pair separation over one period, by (plane offset, slot offset)."""
        return self._pair_min_km

    def _pair_class(self, plane_a, slot_a, plane_b, slot_b):
        """Map a satellite pair to its separation-history class (dp, ds).

        Swapping endpoints leaves the separation history unchanged, so the
        class is always read from the lower-plane endpoint; dp never wraps
        and the mapping holds for partial-spread shells too. Works on
        scalars or arrays.
        """
        swap = plane_b < plane_a
        dp = np.where(swap, plane_a - plane_b, plane_b - plane_a)
        ds = np.where(swap, slot_a - slot_b, slot_b - slot_a) % self.constellation.spec.sats_per_plane
        return dp, ds

    def pair_max_distance_km(self, a: SatelliteId, b: SatelliteId) -> float:
        """Largest separation the pair reaches over one orbital period."""
        dp, ds = self._pair_class(a.plane_index, a.slot_index, b.plane_index, b.slot_index)
        return float(self._pair_max_km[dp, ds])

    def pair_min_distance_km(self, a: SatelliteId, b: SatelliteId) -> float:
        """Smallest separation the pair reaches over one orbital period."""
        dp, ds = self._pair_class(a.plane_index, a.slot_index, b.plane_index, b.slot_index)
        return float(self._pair_min_km[dp, ds])

    def is_permanent(self, a: SatelliteId, b: SatelliteId, lisl_range_km: float) -> bool:
        """True iff the pair never drifts beyond lisl_range_km over a period."""
        if a == b:
            raise ValueError("a pair needs two distinct satellites")
        return self.pair_max_distance_km(a, b) <= lisl_range_km

    def link_type_at(self, a: SatelliteId, b: SatelliteId, t: float) -> LinkType:
        """Plane relation of the pair, using the velocity dot sign at time t."""
        if a == b:
            raise ValueError("a pair needs two distinct satellites")
        if a.plane_index == b.plane_index:
            return LinkType.INTRA_OP
        va = self.constellation.state_at(a, t).velocity_kms
        vb = self.constellation.state_at(b, t).velocity_kms
        if float(va @ vb) <= 0.0:
            return LinkType.CROSSING_OP
        planes = self.constellation.spec.plane_count
        off = abs(a.plane_index - b.plane_index)
        off = min(off, planes - off)
        return LinkType.ADJACENT_OP if off == 1 else LinkType.NEARBY_OP

    # -- snapshots ----------------------------------------------------

    def _candidate_pairs(self, mode: Mode, lisl_range_km: float):
        """Unordered satellite pairs that can ever satisfy (mode, range).

        NG keeps pairs whose class max stays within range (permanent);
        NNG keeps pairs whose class min ever comes within range.
        """
        key = (mode, float(lisl_range_km))
        cached = self._candidate_cache.get(key)
        if cached is not None:
            return cached
        spec = self.constellation.spec
        if mode is Mode.NG:
            table = self._pair_max_km
            threshold = lisl_range_km
        else:
            # Pair separations are sampled at 1 s; between samples a pair can
            # close by up to the relative speed times half a step, so pad the
            # candidate cut to keep it a superset of anything ever in range.
            table = self._pair_min_km
            threshold = lisl_range_km + spec.orbital_speed_kms + 1e-3
        # A class (dp, ds) reaches the partner dp planes above the base, so
        # enumerating qualifying classes from every base satellite generates
        # each cross-plane pair once (from its lower-plane endpoint) and each
        # intra-plane pair twice; a < b dedupes the latter.
        cls_dp, cls_ds = np.nonzero(table <= threshold)
        n = spec.satellite_count
        a = np.repeat(np.arange(n, dtype=np.int32), len(cls_dp))
        dp = np.tile(cls_dp.astype(np.int32), n)
        ds = np.tile(cls_ds.astype(np.int32), n)
        plane_b = self.constellation.plane_of[a] + dp
        slot_b = (self.constellation.slot_of[a] + ds) % spec.sats_per_plane
        keep = plane_b < spec.plane_count
        a, dp, ds, plane_b, slot_b = a[keep], dp[keep], ds[keep], plane_b[keep], slot_b[keep]
        b = (plane_b * spec.sats_per_plane + slot_b).astype(np.int32)
        keep = a < b
        a, b = a[keep], b[keep]
        permanent = self._pair_max_km[dp[keep], ds[keep]] <= lisl_range_km
        plane_offset = np.abs(self.constellation.plane_of[a] - self.constellation.plane_of[b])
        plane_offset = np.minimum(plane_offset, spec.plane_count - plane_offset)
        result = (a, b, permanent, plane_offset)
        self._candidate_cache[key] = result
        return result

    def snapshot(self, t: float, lisl_range_km: float, mode: Mode,
                 ground_stations: list[GroundStation] | tuple[GroundStation, ...] = ()) -> GraphSnapshot:
        """All links feasible at time t under the range and link policy.

        A non-positive range yields a snapshot with no satellite links.
        """
        spec = self.constellation.spec
        pos = self.constellation.positions_at(t)
        a, b, permanent, plane_offset = self._candidate_pairs(mode, lisl_range_km)

        diff = pos[a] - pos[b]
        length = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        within = length <= lisl_range_km
        occ = self.constants.occlusion_radius_km
        if lisl_range_km > 2.0 * math.sqrt(max(spec.orbit_radius_km**2 - occ**2, 0.0)):
            # Range exceeds the grazing chord, so visibility can bind.
            within &= _segments_clear_origin(pos[a], pos[b], occ)
        a, b = a[within], b[within]
        length = length[within]
        permanent = permanent[within]
        plane_offset = plane_offset[within]

        vel = self.constellation.velocities_at(t)
        co_moving = np.einsum("ij,ij->i", vel[a], vel[b]) > 0.0
        type_code = np.full(len(a), 3, dtype=np.int8)  # crossing unless shown otherwise
        type_code[(plane_offset == 1) & co_moving] = 1
        type_code[(plane_offset >= 2) & co_moving] = 2
        type_code[plane_offset == 0] = 0

        stations = tuple(ground_stations)
        gs_positions = np.zeros((len(stations), 3))
        gs_station_index: list[np.ndarray] = []
        gs_sat_index: list[np.ndarray] = []
        gs_length: list[np.ndarray] = []
        for k, gs in enumerate(stations):
            g = ground_station_position(
                gs, t, self.earth_rotation0_deg, self.constants.earth_radius_km)
            gs_positions[k] = g
            delta = pos - g
            slant = np.sqrt(np.einsum("ij,ij->i", delta, delta))
            above_horizon = delta @ g > 0.0
            feasible = np.nonzero((slant <= gs.range_km) & above_horizon)[0]
            gs_station_index.append(np.full(len(feasible), k, dtype=np.int32))
            gs_sat_index.append(feasible.astype(np.int32))
            gs_length.append(slant[feasible])

        return GraphSnapshot(
            time_s=t, lisl_range_km=lisl_range_km, mode=mode,
            constellation=self.constellation, constants=self.constants,
            stations=stations, sat_positions=pos, gs_positions=gs_positions,
            sat_a=a, sat_b=b, sat_length_km=length,
            sat_type_code=type_code, sat_permanent=permanent,
            gs_station_index=_concat(gs_station_index),
            gs_sat_index=_concat(gs_sat_index),
            gs_length_km=_concat(gs_length, dtype=float))


def _concat(chunks, dtype=np.int32):
    if not chunks:
        return np.zeros(0, dtype=dtype)
    return np.concatenate(chunks)


def _segments_clear_origin(p, q, occlusion_radius_km):
    chord = q - p
    cc = np.einsum("ij,ij->i", chord, chord)
    s = np.clip(-np.einsum("ij,ij->i", p, chord) / np.maximum(cc, 1e-300), 0.0, 1.0)
    closest = p + s[:, None] * chord
    return np.einsum("ij,ij->i", closest, closest) >= occlusion_radius_km**2


def degree(snapshot: GraphSnapshot, sat: SatelliteId) -> int:
    """Incident satellite-satellite links of one satellite (ground links excluded)."""
    k = snapshot.constellation.flat_index(sat)
    return int((snapshot.sat_a == k).sum() + (snapshot.sat_b == k).sum())


def degree_counts(snapshot: GraphSnapshot) -> np.ndarray:
    """Satellite-satellite degree of every satellite, shape (N,)."""
    n = snapshot.satellite_count
    return (np.bincount(snapshot.sat_a, minlength=n)
            + np.bincount(snapshot.sat_b, minlength=n))


def link_census(snapshot: GraphSnapshot) -> LinkCensus:
    """Counts of links by (type, permanence), plus undirected/directed totals."""
    counts: dict[tuple[LinkType, Permanence], int] = {}
    for code, link_type in enumerate(_SAT_TYPE_CODES):
        of_type = snapshot.sat_type_code == code
        n_perm = int((of_type & snapshot.sat_permanent).sum())
        n_temp = int((of_type & ~snapshot.sat_permanent).sum())
        if n_perm:
            counts[(link_type, Permanence.PERMANENT)] = n_perm
        if n_temp:
            counts[(link_type, Permanence.TEMPORARY)] = n_temp
    n_ground = len(snapshot.gs_sat_index)
    if n_ground:
        counts[(LinkType.GROUND_LINK, Permanence.TEMPORARY)] = n_ground
    total = int(sum(counts.values()))
    return LinkCensus(
        time_s=snapshot.time_s, lisl_range_km=snapshot.lisl_range_km, mode=snapshot.mode,
        counts=counts, total_undirected=total, total_directed=2 * total)
