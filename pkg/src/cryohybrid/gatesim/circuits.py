"""Netlist builders: adiabatic shift register and AND gate, DC-rail CMOS shift register.

Adiabatic stage k lives on clock phase k mod 4. Its two rails connect to
that phase's clock through transmission gates controlled by the previous
stage (forward, to charge) and by the next stage (retraction, to discharge
after the previous stage has already let go). A stage with no successor
retracts on its own value.
"""

from __future__ import annotations

from ..device_models import TransistorProcess
from .netlist import ADIABATIC, CMOS, Netlist, OutputPort, Rail


def _clock_rails(net: Netlist):
    for k in range(4):
        net.rails[f"phi{k}"] = Rail("clock", k)


def _drive_input(net: Netlist, port: str, signal: str, p: TransistorProcess):
    r_on = p.on_resistance
    pos, neg = net.add_signal(signal, p.capacitance)
    net.inputs[port] = signal
    net.connect(pos, "phi0", r_on, (port, True))
    net.connect(neg, "phi0", r_on, (port, False))
    return pos, neg


def build_shift_register(n_stages: int, p: TransistorProcess, loopback: bool = False) -> Netlist:
    """Dual-rail adiabatic shift register with input port ``in`` and output ``out``.

    An input bit held during cycle c is valid at slot 4c+1 and appears at the
    output ``n_stages`` slots later. With ``loopback`` the last stage feeds
    the first, so the stored pattern circulates with period ``n_stages``
    phases; that needs n_stages to be a multiple of 4 so the phases line up.
    """
    if n_stages < 1:
        raise ValueError("n_stages must be >= 1")
    if loopback and n_stages % 4:
        raise ValueError("loopback needs a multiple of 4 stages")
    r = p.on_resistance
    net = Netlist(ADIABATIC, name=f"shift_register_{n_stages}")
    _clock_rails(net)
    _drive_input(net, "in", "s0", p)
    for k in range(1, n_stages + 1):
        net.add_signal(f"s{k}", p.capacitance)
    for k in range(1, n_stages + 1):
        rail = f"phi{k % 4}"
        pos, neg = f"s{k}", f"s{k}_n"
        srcs = [k - 1]
        if loopback and k == 1:
            srcs.append(n_stages)
        for src in srcs:
            net.connect(pos, rail, r, (f"s{src}", True))
            net.connect(neg, rail, r, (f"s{src}_n", True))
        # the last stage self-retracts even in a loop: stage 1 may have been
        # charged from the input port rather than from stage n
        nxt = k + 1 if k < n_stages else k
        net.connect(pos, rail, r, (f"s{nxt}", True))
        net.connect(neg, rail, r, (f"s{nxt}_n", True))
    net.outputs["out"] = OutputPort(f"s{n_stages}", (n_stages % 4 + 1) % 4)
    net.gate_count = n_stages
    return net


def build_and_gate(p: TransistorProcess) -> Netlist:
    """Dual-rail adiabatic AND: inputs ``a``, ``b`` on phase 0, output ``y`` on phase 1.

    The true rail charges through a two-switch series stack (a AND b); the
    complement rail charges through either complement input (NOT a OR NOT b).
    """
    r = p.on_resistance
    net = Netlist(ADIABATIC, name="and_gate")
    _clock_rails(net)
    _drive_input(net, "a", "sa", p)
    _drive_input(net, "b", "sb", p)
    y, y_n = net.add_signal("y", p.capacitance)
    net.connect(y, "phi1", 2 * r, ("sa", True), ("sb", True))
    net.connect(y_n, "phi1", r, ("sa_n", True))
    net.connect(y_n, "phi1", r, ("sb_n", True))
    net.connect(y, "phi1", r, (y, True))
    net.connect(y_n, "phi1", r, (y_n, True))
    net.outputs["y"] = OutputPort("y", 2)
    net.gate_count = 1
    return net


def build_cmos_shift_register(n_stages: int, p: TransistorProcess) -> Netlist:
    """Static CMOS shift register of pass gates and inverters on DC rails.

    Odd stages latch on phase 2, even stages on phase 0; the clock rails only
    drive switch gates. Every stage inverts, so an even stage count passes
    data unchanged; a bit applied in cycle c is read at slot 0 of cycle
    c + n_stages // 2.
    """
    if n_stages < 2 or n_stages % 2:
        raise ValueError("n_stages must be an even number >= 2")
    r = p.on_resistance
    c = p.capacitance
    net = Netlist(CMOS, name=f"cmos_shift_register_{n_stages}")
    _clock_rails(net)
    net.rails["vdd"] = Rail("high")
    net.rails["gnd"] = Rail("low")
    net.add_signal("x0", c, dual_rail=False)
    net.inputs["in"] = "x0"
    net.connect("x0", "vdd", r, ("in", True))
    net.connect("x0", "gnd", r, ("in", False))
    level = False  # consistent initial state with x0 low
    for k in range(1, n_stages + 1):
        m, x = f"m{k}", f"x{k}"
        net.add_signal(m, c, dual_rail=False, initial_high=level)
        level = not level
        net.add_signal(x, c, dual_rail=False, initial_high=level)
        net.connect(m, f"x{k - 1}", r, ("phi2" if k % 2 else "phi0", True))
        net.connect(x, "vdd", r, (m, False))
        net.connect(x, "gnd", r, (m, True))
    net.outputs["out"] = OutputPort(f"x{n_stages}", 0)
    net.gate_count = n_stages
    return net
