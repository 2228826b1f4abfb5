"""Source-routing header: wire format and the five in-flight update cases.

The header carries the route plan as an ordered list of segments.  The
front segment is always the active one; completed segments are removed
from the front.  Layout (big endian):

    u16 src | u16 dst | u32 flow | u32 creation tick | u8 segment count
    per segment: u8 type
        type 0 (inter-satellite): u16 end node | u8 direction | u16 rem_h | u16 rem_v
        type 1 (relay crossing):  u16 relay    | u16 up gateway

Fixed-width u16 ids cap constellations at 65535 satellites.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

from .minhop import Direction

HEADER_FIXED_BYTES = 13
INTERSAT_SEGMENT_BYTES = 8  # type byte + 7 payload bytes
COOP_SEGMENT_BYTES = 5      # type byte + 4 payload bytes

_FIXED = struct.Struct(">HHIIB")
_INTERSAT = struct.Struct(">HBHH")
_COOP = struct.Struct(">HH")

_TYPE_INTERSAT = 0
_TYPE_COOP = 1
_U16_MAX = 0xFFFF
_U32_MAX = 0xFFFFFFFF


class HeaderError(ValueError):
    """Malformed header bytes or an update applied outside its contract."""


@dataclass(frozen=True)
class InterSatSegment:
    """Active ISL stretch: fixed direction pair plus remaining hop budget."""

    end_node: int
    direction: Direction
    rem_h: int
    rem_v: int

    @property
    def complete(self) -> bool:
        return self.rem_h == 0 and self.rem_v == 0

    @property
    def planned_hops(self) -> int:
        return self.rem_h + self.rem_v


@dataclass(frozen=True)
class CoopSegment:
    """Relay crossing: downlink at the current gateway, uplink to up_gateway."""

    relay_id: int
    up_gateway: int

    @property
    def planned_hops(self) -> int:
        return 2


@dataclass(frozen=True)
class PacketHeader:
    src: int
    dst: int
    flow_id: int
    creation_tick: int
    segments: tuple = ()

    @property
    def active(self):
        return self.segments[0] if self.segments else None

    @property
    def planned_hops(self) -> int:
        return sum(s.planned_hops for s in self.segments)

    def byte_length(self) -> int:
        return HEADER_FIXED_BYTES + sum(
            INTERSAT_SEGMENT_BYTES if isinstance(s, InterSatSegment) else COOP_SEGMENT_BYTES
            for s in self.segments
        )


def _check_u16(value: int, name: str) -> int:
    if not 0 <= value <= _U16_MAX:
        raise HeaderError(f"{name} {value} does not fit in 16 bits")
    return value


def encode(header: PacketHeader) -> bytes:
    """Serialize a header; raises HeaderError for out-of-range fields."""
    if not 0 <= header.flow_id <= _U32_MAX or not 0 <= header.creation_tick <= _U32_MAX:
        raise HeaderError("flow id and creation tick must fit in 32 bits")
    if len(header.segments) > 0xFF:
        raise HeaderError("too many segments")
    parts = [
        _FIXED.pack(
            _check_u16(header.src, "src"),
            _check_u16(header.dst, "dst"),
            header.flow_id,
            header.creation_tick,
            len(header.segments),
        )
    ]
    for seg in header.segments:
        if isinstance(seg, InterSatSegment):
            parts.append(bytes([_TYPE_INTERSAT]))
            parts.append(
                _INTERSAT.pack(
                    _check_u16(seg.end_node, "end node"),
                    int(seg.direction),
                    _check_u16(seg.rem_h, "rem_h"),
                    _check_u16(seg.rem_v, "rem_v"),
                )
            )
        elif isinstance(seg, CoopSegment):
            parts.append(bytes([_TYPE_COOP]))
            parts.append(
                _COOP.pack(
                    _check_u16(seg.relay_id, "relay id"),
                    _check_u16(seg.up_gateway, "up gateway"),
                )
            )
        else:
            raise HeaderError(f"unknown segment type {type(seg).__name__}")
    return b"".join(parts)


def decode(buf: bytes) -> PacketHeader:
    """Parse header bytes; raises HeaderError on truncation or bad fields."""
    if len(buf) < HEADER_FIXED_BYTES:
        raise HeaderError("buffer shorter than the fixed header")
    src, dst, flow_id, tick, count = _FIXED.unpack_from(buf, 0)
    offset = HEADER_FIXED_BYTES
    segments = []
    for _ in range(count):
        if offset >= len(buf):
            raise HeaderError("segment count exceeds buffer")
        seg_type = buf[offset]
        offset += 1
        if seg_type == _TYPE_INTERSAT:
            if offset + _INTERSAT.size > len(buf):
                raise HeaderError("truncated inter-satellite segment")
            end, direction, rem_h, rem_v = _INTERSAT.unpack_from(buf, offset)
            if direction > 3:
                raise HeaderError(f"direction code {direction} out of range")
            segments.append(InterSatSegment(end, Direction(direction), rem_h, rem_v))
            offset += _INTERSAT.size
        elif seg_type == _TYPE_COOP:
            if offset + _COOP.size > len(buf):
                raise HeaderError("truncated relay-crossing segment")
            relay, up = _COOP.unpack_from(buf, offset)
            segments.append(CoopSegment(relay, up))
            offset += _COOP.size
        else:
            raise HeaderError(f"unknown segment type byte {seg_type}")
    if offset != len(buf):
        raise HeaderError("trailing bytes after last segment")
    return PacketHeader(src, dst, flow_id, tick, tuple(segments))


def apply_forward(header: PacketHeader, horizontal: bool) -> PacketHeader:
    """Account one ISL hop: decrement the matching remaining count on the
    active segment, removing it once both counts reach zero."""
    seg = header.active
    if not isinstance(seg, InterSatSegment):
        raise HeaderError("active segment is not inter-satellite")
    if horizontal:
        if seg.rem_h == 0:
            raise HeaderError("no horizontal hops remaining")
        seg = replace(seg, rem_h=seg.rem_h - 1)
    else:
        if seg.rem_v == 0:
            raise HeaderError("no vertical hops remaining")
        seg = replace(seg, rem_v=seg.rem_v - 1)
    rest = header.segments[1:]
    if seg.complete:
        return replace(header, segments=rest)
    return replace(header, segments=(seg,) + rest)


def apply_case(header: PacketHeader, case: int, *, new_segment: InterSatSegment | None = None,
               new_segments: tuple | None = None, up_gateway: int | None = None
               ) -> PacketHeader:
    """Apply one of the five in-flight header updates.

    1. pop the completed front ISL segment (gateway about to forward down)
    2. insert a re-planned ISL segment toward an alternate down-gateway in
       front of the active relay crossing (``new_segment`` required)
    3. replace all segments with a freshly estimated route (``new_segments``)
    4. pop the front relay crossing on arrival at its up gateway
       (``up_gateway`` must match)
    5. replace all segments after a relay-side diversion; the receiving
       gateway supplies the rebuilt route (``new_segments``)
    """
    front = header.active
    if case == 1:
        if not isinstance(front, InterSatSegment) or not front.complete:
            raise HeaderError("case 1 expects a completed inter-satellite segment in front")
        return replace(header, segments=header.segments[1:])
    if case == 2:
        if not isinstance(front, CoopSegment):
            raise HeaderError("case 2 expects the relay crossing in front")
        if not isinstance(new_segment, InterSatSegment):
            raise HeaderError("case 2 needs the re-planned inter-satellite segment")
        if new_segment.end_node == 0:
            raise HeaderError("re-planned segment must target a gateway")
        return replace(header, segments=(new_segment,) + header.segments)
    if case == 3:
        if new_segments is None:
            raise HeaderError("case 3 needs the re-estimated route segments")
        return replace(header, segments=tuple(new_segments))
    if case == 4:
        if not isinstance(front, CoopSegment):
            raise HeaderError("case 4 expects the relay crossing in front")
        if up_gateway is not None and front.up_gateway != up_gateway:
            raise HeaderError("case 4 applied at a node that is not the planned up gateway")
        return replace(header, segments=header.segments[1:])
    if case == 5:
        if new_segments is None:
            raise HeaderError("case 5 needs the rebuilt route segments")
        return replace(header, segments=tuple(new_segments))
    raise HeaderError(f"unknown update case {case}")


def segments_from_plan(plan) -> tuple:
    """Wire segments for a route plan (zero-hop ISL legs are dropped)."""
    segments = []
    for leg in plan.legs:
        if hasattr(leg, "relay_id"):
            segments.append(CoopSegment(relay_id=leg.relay_id, up_gateway=leg.up_gateway))
        else:
            if leg.h_h == 0 and leg.h_v == 0:
                continue
            segments.append(
                InterSatSegment(
                    end_node=leg.end,
                    direction=leg.direction,
                    rem_h=leg.h_h,
                    rem_v=leg.h_v,
                )
            )
    return tuple(segments)


def header_for_plan(plan, flow_id: int, creation_tick: int) -> PacketHeader:
    return PacketHeader(
        src=plan.src,
        dst=plan.dst,
        flow_id=flow_id,
        creation_tick=creation_tick,
        segments=segments_from_plan(plan),
    )
