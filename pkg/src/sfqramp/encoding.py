"""Bit-exact compact encoding of snapped schedules.

A schedule is stored as three fields: the ramp (n_max pulse slots, each a
symbol in [0, clock_multiple * r_max] where 0 means "no pulse" and k means
"tick k-1"), the train length, and the ramp length. The n_max slot symbols
are packed arithmetically as one mixed-radix integer, which is what makes
the six-slot ramp field fit in ceil(6 * log2(641)) = 56 bits rather than
6 * 10 = 60; with 5 train bits (inductive) or 7 (capacitive) plus 3 ramp
length bits, a whole gate costs 64 or 66 bits.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "EncodedSchedule",
    "EncodingParams",
    "bit_cost",
    "decode",
    "encode",
    "expand_to_pulse_stream",
]


@dataclass(frozen=True)
class EncodingParams:
    """Alphabet sizes of the encoding: slot count, ramp/train length caps, grid."""

    n_max: int = 6
    r_max: int = 5
    clock_multiple: int = 128
    n_train_max: int = 31

    def __post_init__(self):
        if min(self.n_max, self.r_max, self.clock_multiple, self.n_train_max) < 1:
            raise ValueError("all encoding parameters must be positive")

    @property
    def symbol_base(self) -> int:
        return self.clock_multiple * self.r_max + 1


@dataclass(frozen=True)
class BitLayout:
    ramp_bits: int
    train_bits: int
    ramplen_bits: int

    @property
    def total(self) -> int:
        return self.ramp_bits + self.train_bits + self.ramplen_bits


@dataclass(frozen=True)
class EncodedSchedule:
    """Packed bits plus the self-describing layout and alphabet."""

    word: int
    layout: BitLayout
    params: EncodingParams

    @property
    def total_bits(self) -> int:
        return self.layout.total

    def to_bits(self) -> list[int]:
        """Bit vector, most significant first."""
        return [(self.word >> (self.total_bits - 1 - k)) & 1 for k in range(self.total_bits)]

    def to_hex(self) -> str:
        """Hex string, most significant bit first, zero-padded to the layout width."""
        return format(self.word, f"0{(self.total_bits + 3) // 4}x")

    @classmethod
    def from_hex(cls, text: str, params: EncodingParams) -> "EncodedSchedule":
        layout = _layout(params)
        word = int(text, 16)
        if word >> layout.total:
            raise ValueError("hex string does not fit the declared bit layout")
        return cls(word=word, layout=layout, params=params)


def _layout(params: EncodingParams) -> BitLayout:
    # Integer-exact ceil(log2(...)) via bit_length.
    ramp_bits = (params.symbol_base**params.n_max - 1).bit_length()
    train_bits = params.n_train_max.bit_length()
    ramplen_bits = (params.r_max - 1).bit_length()
    return BitLayout(ramp_bits=ramp_bits, train_bits=train_bits, ramplen_bits=ramplen_bits)


def bit_cost(
    n_max: int, r_max: int, clock_multiple: int, n_train_max: int
) -> tuple[int, int, int, int]:
    """(ramp_bits, train_bits, ramplen_bits, total) for the given alphabet."""
    layout = _layout(
        EncodingParams(
            n_max=n_max, r_max=r_max, clock_multiple=clock_multiple, n_train_max=n_train_max
        )
    )
    return layout.ramp_bits, layout.train_bits, layout.ramplen_bits, layout.total


def encode(
    ramp_ticks: list[int] | tuple[int, ...],
    r: int,
    n_train: int,
    params: EncodingParams = EncodingParams(),
) -> EncodedSchedule:
    """Pack a snapped ramp, its length, and the train count into one bit word."""
    ticks = [int(t) for t in ramp_ticks]
    if len(ticks) > params.n_max:
        raise ValueError(f"ramp has {len(ticks)} pulses; the layout allows {params.n_max}")
    if len(set(ticks)) != len(ticks):
        raise ValueError("ramp tick indices must be distinct")
    if not 1 <= r <= params.r_max:
        raise ValueError(f"ramp length {r} outside [1, {params.r_max}]")
    for t in ticks:
        if not 0 <= t < params.clock_multiple * r:
            raise ValueError(f"tick index {t} outside the ramp window [0, {params.clock_multiple * r})")
    if not 0 <= n_train <= params.n_train_max:
        raise ValueError(f"n_train {n_train} outside [0, {params.n_train_max}]")

    symbols = sorted(t + 1 for t in ticks) + [0] * (params.n_max - len(ticks))
    base = params.symbol_base
    ramp_value = 0
    for symbol in symbols:
        ramp_value = ramp_value * base + symbol

    layout = _layout(params)
    word = ramp_value << (layout.train_bits + layout.ramplen_bits)
    word |= n_train << layout.ramplen_bits
    word |= r - 1
    return EncodedSchedule(word=word, layout=layout, params=params)


def decode(e: EncodedSchedule) -> tuple[list[int], int, int]:
    """Exact inverse of encode: (ramp_ticks, r, n_train)."""
    params = e.params
    layout = e.layout
    ramplen_mask = (1 << layout.ramplen_bits) - 1
    r = (e.word & ramplen_mask) + 1
    if r > params.r_max:
        raise ValueError(f"corrupt encoding: ramp length {r} exceeds r_max {params.r_max}")
    n_train = (e.word >> layout.ramplen_bits) & ((1 << layout.train_bits) - 1)
    if n_train > params.n_train_max:
        raise ValueError(f"corrupt encoding: n_train {n_train} exceeds {params.n_train_max}")
    ramp_value = e.word >> (layout.train_bits + layout.ramplen_bits)
    base = params.symbol_base
    if ramp_value >= base**params.n_max:
        raise ValueError("corrupt encoding: mixed-radix ramp field overflows")

    symbols = []
    for _ in range(params.n_max):
        symbols.append(ramp_value % base)
        ramp_value //= base
    symbols.reverse()

    ticks = []
    seen_absent = False
    previous = -1
    for symbol in symbols:
        if symbol == 0:
            seen_absent = True
            continue
        if seen_absent:
            raise ValueError("corrupt encoding: pulse slot after an absent slot")
        tick = symbol - 1
        if tick >= params.clock_multiple * r:
            raise ValueError(
                f"corrupt encoding: tick {tick} outside the declared ramp of {r} periods"
            )
        if tick <= previous:
            raise ValueError("corrupt encoding: pulse slots not strictly ascending")
        ticks.append(tick)
        previous = tick
    return ticks, r, n_train


def expand_to_pulse_stream(
    ramp_ticks: list[int] | tuple[int, ...],
    r: int,
    n_train: int,
    clock_multiple: int,
) -> list[bool]:
    """One flag per clock tick over the whole mirrored gate.

    True marks a kick: the on-ramp ticks, the train ticks at multiples of the
    period starting at r periods, and the mirrored off-ramp ticks.
    """
    if n_train < 1:
        raise ValueError("pulse stream requires at least one train kick")
    if any(float(t) != int(t) for t in ramp_ticks):
        raise ValueError("non-integer tick index; snap the schedule first")
    ticks = [int(t) for t in ramp_ticks]
    if any(not 0 <= t < clock_multiple * r for t in ticks):
        raise ValueError("ramp tick outside the ramp window; snap the schedule first")
    if len(set(ticks)) != len(ticks):
        raise ValueError("ramp tick indices must be distinct")
    total_ticks = (2 * r + n_train - 1) * clock_multiple
    stream = [False] * (total_ticks + 1)
    for t in ticks:
        stream[t] = True
        stream[total_ticks - t] = True
    for k in range(n_train):
        stream[(r + k) * clock_multiple] = True
    return stream
