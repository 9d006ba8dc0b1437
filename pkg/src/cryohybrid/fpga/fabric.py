"""Configurable fabric of two-input logic blocks joined by 4:1 routers.

Layout, for ``rows`` x ``cols`` CLBs:

* there are ``2 * rows`` horizontal tracks; track t feeds input t % 2 of
  the CLB in row t // 2;
* router column c (0..cols) sits in front of CLB column c; router
  column ``cols`` drives the output pins;
* router (t, c) picks one of four sources:
  straight  -- router (t, c-1), or input pin t in column 0
  left      -- router (t-1, c) in the same column (constant 0 at the edge)
  right     -- router (t+1, c) in the same column (constant 0 at the edge)
  connect   -- output t % 2 of CLB (t // 2, c-1), or input pin t in column 0

Configuration bits, MSB first: two per CLB in row-major order, then two
per router ordered by column and then track.
"""

from __future__ import annotations

import enum
import graphlib
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple, Union

BitsLike = Union[str, Sequence[int]]


class ClbFunction(enum.IntEnum):
    AND = 0
    OR = 1
    NOT = 2
    HALF_ADDER = 3


class Route(enum.IntEnum):
    STRAIGHT = 0
    LEFT = 1
    RIGHT = 2
    CONNECT = 3


class ConfigError(ValueError):
    pass


def clb_outputs(fn: ClbFunction, a: int, b: int) -> Tuple[int, int]:
    """(primary, secondary) outputs. NOT inverts each input; AND/OR repeat the result."""
    if fn is ClbFunction.AND:
        v = a & b
        return v, v
    if fn is ClbFunction.OR:
        v = a | b
        return v, v
    if fn is ClbFunction.NOT:
        return 1 - a, 1 - b
    return a ^ b, a & b


@dataclass(frozen=True)
class Fabric:
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("fabric needs at least one CLB row and column")

    @property
    def tracks(self) -> int:
        return 2 * self.rows

    @property
    def n_clbs(self) -> int:
        return self.rows * self.cols

    @property
    def n_routers(self) -> int:
        return self.tracks * (self.cols + 1)

    @property
    def config_length(self) -> int:
        return 2 * (self.n_clbs + self.n_routers)

    def encode(self, clbs: Dict[Tuple[int, int], ClbFunction], routes: Dict[Tuple[int, int], Route]) -> str:
        """Bit string for the given settings; unlisted CLBs are AND, unlisted routers STRAIGHT."""
        out = []
        for r in range(self.rows):
            for c in range(self.cols):
                out.append(format(int(clbs.get((r, c), ClbFunction.AND)), "02b"))
        for c in range(self.cols + 1):
            for t in range(self.tracks):
                out.append(format(int(routes.get((t, c), Route.STRAIGHT)), "02b"))
        return "".join(out)


def _to_bits(bits: BitsLike) -> Tuple[int, ...]:
    if isinstance(bits, str):
        s = bits.replace("_", "").replace(" ", "")
        if set(s) - {"0", "1"}:
            raise ConfigError("configuration string may contain only 0 and 1")
        return tuple(int(ch) for ch in s)
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ConfigError("configuration bits must be 0 or 1")
    return out


@dataclass(frozen=True)
class ConfiguredFabric:
    fabric: Fabric
    bits: Tuple[int, ...]
    clbs: Tuple[Tuple[ClbFunction, ...], ...]  # [row][col]
    routes: Tuple[Tuple[Route, ...], ...]  # [col][track]
    order: Tuple[tuple, ...]  # evaluation order of router and CLB nodes

    def _source(self, t: int, c: int):
        route = self.routes[c][t]
        T = self.fabric.tracks
        if route is Route.STRAIGHT:
            return ("pin", t) if c == 0 else ("rt", t, c - 1)
        if route is Route.LEFT:
            return ("rt", t - 1, c) if t > 0 else None
        if route is Route.RIGHT:
            return ("rt", t + 1, c) if t + 1 < T else None
        return ("pin", t) if c == 0 else ("clb", t // 2, c - 1, t % 2)

    def evaluate(self, inputs: Sequence[int]) -> Tuple[int, ...]:
        T = self.fabric.tracks
        if len(inputs) != T:
            raise ValueError(f"expected {T} input bits, got {len(inputs)}")
        val: Dict[tuple, int] = {("pin", t): int(b) & 1 for t, b in enumerate(inputs)}
        for node in self.order:
            if node[0] == "rt":
                _, t, c = node
                src = self._source(t, c)
                if src is None:
                    val[node] = 0
                elif src[0] == "clb":
                    val[node] = val[("clbo",) + src[1:]]
                else:
                    val[node] = val[src]
            elif node[0] == "clb":
                _, r, c = node
                a, b = val[("rt", 2 * r, c)], val[("rt", 2 * r + 1, c)]
                p, s = clb_outputs(self.clbs[r][c], a, b)
                val[("clbo", r, c, 0)] = p
                val[("clbo", r, c, 1)] = s
        C = self.fabric.cols
        return tuple(val[("rt", t, C)] for t in range(T))


def configure(fabric: Fabric, bits: BitsLike) -> ConfiguredFabric:
    b = _to_bits(bits)
    k = fabric.config_length
    if len(b) != k:
        raise ConfigError(f"configuration has {len(b)} bits, fabric needs {k}")
    it = iter(zip(b[0::2], b[1::2]))
    clbs = tuple(
        tuple(ClbFunction(2 * hi + lo) for hi, lo in (next(it) for _ in range(fabric.cols)))
        for _ in range(fabric.rows)
    )
    routes = tuple(
        tuple(Route(2 * hi + lo) for hi, lo in (next(it) for _ in range(fabric.tracks)))
        for _ in range(fabric.cols + 1)
    )
    partial = ConfiguredFabric(fabric, b, clbs, routes, ())
    graph: Dict[tuple, set] = {}
    for c in range(fabric.cols + 1):
        for t in range(fabric.tracks):
            src = partial._source(t, c)
            deps = set()
            if src is not None and src[0] == "rt":
                deps.add(src)
            elif src is not None and src[0] == "clb":
                deps.add(("clb", src[1], src[2]))
            graph[("rt", t, c)] = deps
    for r in range(fabric.rows):
        for c in range(fabric.cols):
            graph[("clb", r, c)] = {("rt", 2 * r, c), ("rt", 2 * r + 1, c)}
    try:
        order = tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as err:
        cycle = err.args[1]
        raise ConfigError(f"routing forms a combinational loop through {cycle}") from None
    return ConfiguredFabric(fabric, b, clbs, routes, order)


def evaluate(cf: ConfiguredFabric, inputs: Sequence[int]) -> Tuple[int, ...]:
    if not isinstance(cf, ConfiguredFabric):
        raise ConfigError("fabric is not configured")
    return cf.evaluate(inputs)


def to_hex(bits: BitsLike) -> str:
    """Hex encoding, MSB first, zero-padded on the right to whole nibbles."""
    b = _to_bits(bits)
    pad = (-len(b)) % 4
    s = "".join(map(str, b)) + "0" * pad
    return "".join(format(int(s[i : i + 4], 2), "x") for i in range(0, len(s), 4))


def from_hex(text: str, k: int) -> Tuple[int, ...]:
    h = "".join(text.split()).lower()
    if h.startswith("0x"):
        h = h[2:]
    try:
        bits = "".join(format(int(ch, 16), "04b") for ch in h)
    except ValueError:
        raise ConfigError("configuration file is not valid hex") from None
    if len(bits) < k or len(bits) - k >= 4:
        raise ConfigError(f"hex string holds {len(bits)} bits; expected {k} rounded up to whole nibbles")
    if set(bits[k:]) - {"0"}:
        raise ConfigError("padding bits after the configuration must be zero")
    return tuple(int(ch) for ch in bits[:k])


@dataclass(frozen=True)
class AdderLayout:
    fabric: Fabric
    bits: str
    a_pins: Tuple[int, int]  # (bit 0, bit 1)
    b_pins: Tuple[int, int]
    sum_outputs: Tuple[int, int]
    carry_output: int

    def pack(self, a: int, b: int) -> List[int]:
        pins = [0] * self.fabric.tracks
        for i in range(2):
            pins[self.a_pins[i]] = (a >> i) & 1
            pins[self.b_pins[i]] = (b >> i) & 1
        return pins

    def unpack(self, outputs: Sequence[int]) -> int:
        s = outputs[self.sum_outputs[0]] | (outputs[self.sum_outputs[1]] << 1)
        return s | (outputs[self.carry_output] << 2)


def ripple_adder_2bit() -> AdderLayout:
    """Two half adders and an OR on a 3 x 3 fabric computing a + b for 2-bit a, b."""
    fab = Fabric(3, 3)
    F, R = ClbFunction, Route
    clbs = {(0, 0): F.HALF_ADDER, (2, 0): F.HALF_ADDER, (1, 1): F.HALF_ADDER, (2, 2): F.OR}
    routes = {
        # column 1: s0 and c0 from the low half adder, a1^b1 and a1&b1 from the high one;
        # tracks 2/3 pull c0 and a1^b1 in for the middle half adder
        (0, 1): R.CONNECT, (1, 1): R.CONNECT, (2, 1): R.LEFT, (3, 1): R.RIGHT,
        (4, 1): R.CONNECT, (5, 1): R.CONNECT,
        # column 2: s1 and the middle carry come out; the carry moves down to join a1&b1 at the OR
        (2, 2): R.CONNECT, (3, 2): R.CONNECT, (4, 2): R.LEFT,
        # output column: s0 and s1 pass through; the OR result becomes the carry out
        (4, 3): R.CONNECT,
    }
    return AdderLayout(fab, fab.encode(clbs, routes), (0, 4), (1, 5), (0, 2), 4)
