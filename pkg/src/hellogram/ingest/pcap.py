"""
ClientHello extraction from classic pcap captures.

Only single-segment ClientHellos are extracted; there is no TCP stream
reassembly. A TCP payload is a candidate when it starts with a handshake
record (0x16) whose handshake type is ClientHello (0x01). Candidates that do
not parse, including ClientHellos continued in later segments, are counted as
skips so that ``emitted + skipped == candidates``.
"""

import logging
from pathlib import Path
from typing import Optional, Union

import dpkt

from hellogram.core.errors import NotPcap, ParseError
from hellogram.ingest.corpus import CorpusEntry, CorpusFile, CorpusFormat, SkipRecord
from hellogram.wire.clienthello import (
    CONTENT_TYPE_HANDSHAKE,
    HANDSHAKE_CLIENT_HELLO,
    RECORD_HEADER_LEN,
    RawClientHello,
    parse_client_hello,
)

logger = logging.getLogger(__name__)

LINKTYPE_ETHERNET = 1
# DLT_RAW differs between platforms; 101 is the canonical LINKTYPE_RAW.
LINKTYPES_RAW_IP = frozenset({12, 14, 101})

PathLike = Union[str, Path]


def _ip_packet(buf: bytes, linktype: int) -> Optional[dpkt.dpkt.Packet]:
    if linktype == LINKTYPE_ETHERNET:
        # dpkt strips a single 802.1Q tag while decoding the frame.
        return dpkt.ethernet.Ethernet(buf).data
    if not buf:
        return None
    version = buf[0] >> 4
    if version == 4:
        return dpkt.ip.IP(buf)
    if version == 6:
        return dpkt.ip6.IP6(buf)
    return None


def tcp_payload(buf: bytes, linktype: int) -> Optional[bytes]:
    """TCP payload of one captured frame, or None for non-TCP traffic.

    Raises:
        dpkt.dpkt.UnpackError: The frame cannot be decoded.
    """
    ip = _ip_packet(buf, linktype)
    if not isinstance(ip, (dpkt.ip.IP, dpkt.ip6.IP6)):
        return None
    tcp = ip.data
    if not isinstance(tcp, dpkt.tcp.TCP):
        return None
    return bytes(tcp.data)


def is_client_hello_candidate(payload: bytes) -> bool:
    """True for payloads that start a handshake record carrying a ClientHello.

    A payload too short to show its handshake type still counts; it is
    reported as a skip rather than silently dropped.
    """
    if not payload or payload[0] != CONTENT_TYPE_HANDSHAKE:
        return False
    if len(payload) <= RECORD_HEADER_LEN:
        return True
    return payload[RECORD_HEADER_LEN] == HANDSHAKE_CLIENT_HELLO


def _first_record(payload: bytes) -> bytes:
    if len(payload) < RECORD_HEADER_LEN:
        return payload
    record_len = int.from_bytes(payload[3:5], "big")
    return payload[: RECORD_HEADER_LEN + record_len]


def read_pcap(path: PathLike) -> CorpusFile:
    """Extract every single-segment ClientHello from a pcap file.

    Both microsecond and nanosecond captures in either byte order are read.
    Ethernet (with at most one 802.1Q tag) and raw IPv4/IPv6 link types are
    supported.

    Raises:
        NotPcap: The file is not a classic pcap capture or uses an unsupported
            link type.
    """
    path = Path(path)
    corpus = CorpusFile(format=CorpusFormat.PCAP)

    with path.open("rb") as handle:
        try:
            reader = dpkt.pcap.Reader(handle)
        except (ValueError, dpkt.dpkt.UnpackError) as e:
            raise NotPcap(f"{path}: not a pcap file ({e})", details={"path": str(path)}) from e

        linktype = reader.datalink()
        if linktype != LINKTYPE_ETHERNET and linktype not in LINKTYPES_RAW_IP:
            raise NotPcap(
                f"{path}: unsupported link type {linktype}",
                details={"path": str(path), "linktype": linktype},
            )

        frame_no = 0
        try:
            for _ts, buf in reader:
                frame_no += 1
                source_id = f"{path.name}#{frame_no}"
                try:
                    payload = tcp_payload(buf, linktype)
                except (dpkt.dpkt.UnpackError, IndexError) as e:
                    logger.debug(f"[Ingest] {source_id}: undecodable frame ({e})")
                    corpus.malformed_packets += 1
                    continue

                if payload is None or not is_client_hello_candidate(payload):
                    continue

                raw = RawClientHello(data=_first_record(payload), source_id=source_id)
                try:
                    parse_client_hello(raw)
                except ParseError as e:
                    logger.debug(f"[Ingest] {source_id}: {e.message}")
                    corpus.skipped.append(SkipRecord(source_id=source_id, reason=e.code))
                    continue
                corpus.entries.append(CorpusEntry(raw=raw))
        except dpkt.dpkt.NeedData:
            logger.warning(f"[Ingest] {path}: capture ends mid-packet after frame {frame_no}")

    logger.info(
        f"[Ingest] {path}: {len(corpus)} ClientHellos from {frame_no} frames, "
        f"{len(corpus.skipped)} skipped"
    )
    return corpus
