"""5-byte command frames and a resynchronizing stream decoder.

Wire format: FF AA 01 <code> FE with code 0..6.  The encoder is exact; the
decoder consumes arbitrary chunkings of a byte stream, skips garbage one
byte at a time until a plausible header, and never drops a well-formed
frame.
"""

from __future__ import annotations

__all__ = [
    "HEADER",
    "TRAILER",
    "FRAME_LEN",
    "COMMAND_NAMES",
    "encode",
    "FrameDecoder",
]

HEADER = bytes((0xFF, 0xAA, 0x01))
TRAILER = 0xFE
FRAME_LEN = 5
MAX_CODE = 6

# Serial rate of the original link, kept for traceability: 112500 baud is a
# nonstandard value (115200 was almost certainly intended) and has no effect
# on the framing logic.
REFERENCE_BAUD = 112500

COMMAND_NAMES = {
    0: "Stop",
    1: "Forward",
    2: "Reverse",
    3: "RotCcw",
    4: "RotCw",
    5: "LED_on",
    6: "LED_off",
}


def encode(code: int) -> bytes:
    """Build the 5-byte frame for a command code."""
    if not 0 <= code <= MAX_CODE:
        raise ValueError(f"command code must be 0..{MAX_CODE}, got {code}")
    return HEADER + bytes((code, TRAILER))


class FrameDecoder:
    """Incremental frame scanner over a chunked byte stream.

    Feed chunks with push(); every completed frame yields its code, in
    order.  Malformed prefixes are discarded byte by byte (resync restarts
    at the byte after a failed 0xFF candidate, so a forged trailer cannot
    swallow a real header) and counted in bytes_skipped.  At most a partial
    frame (under 5 bytes) is ever buffered.
    """

    def __init__(self):
        self._buffer = bytearray()
        self.frames_emitted = 0
        self.bytes_skipped = 0

    def push(self, chunk: bytes) -> list[int]:
        """Consume a chunk, returning the codes of all completed frames."""
        self._buffer.extend(chunk)
        buf = self._buffer
        codes: list[int] = []
        i = 0
        while i < len(buf):
            matched = self._match_at(buf, i)
            if matched == FRAME_LEN:
                codes.append(buf[i + 3])
                self.frames_emitted += 1
                i += FRAME_LEN
            elif i + matched == len(buf):
                # still a valid prefix; wait for more bytes
                break
            else:
                i += 1
                self.bytes_skipped += 1
        del buf[:i]
        return codes

    @staticmethod
    def _match_at(buf: bytearray, start: int) -> int:
        """Length of the longest frame prefix matching at start (0..5)."""
        length = min(FRAME_LEN, len(buf) - start)
        for j in range(length):
            b = buf[start + j]
            if j == 3:
                if b > MAX_CODE:
                    return j
            elif j == 4:
                if b != TRAILER:
                    return j
            elif b != HEADER[j]:
                return j
        return length
