"""RTZ <-> RTO conversion by gate duality."""

from dataclasses import replace

from .netlist import GateInst, Netlist, check_valid


def dualize(netlist: Netlist) -> Netlist:
    """Swap every gate for its Boolean dual and flip the protocol tag.

    C-elements are self-dual and keep their inputs; topology, ids, names and
    ports are untouched.
    """
    check_valid(netlist)
    cells = tuple(GateInst(c.id, c.kind.dual, c.inputs, c.output) for c in netlist.cells)
    return replace(netlist, protocol=netlist.protocol.other, cells=cells,
                   metadata=dict(netlist.metadata))
