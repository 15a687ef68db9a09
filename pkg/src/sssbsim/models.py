"""Lattice model builders: geometry, initial stabilizers, dephasing channels.

Five systems, all with periodic boundary conditions:

* ``chain-zz``         1D chain, +X product start, nearest-neighbour ZZ dephasing
* ``square-zz``        2D square lattice, +X product start, ZZ dephasing on both
                       link directions
* ``cluster1d-x``      1D cluster state (ZXZ generators), on-site X dephasing on
                       every site
* ``cluster1d-x-even`` same initial state, X dephasing on even sites only
* ``lieb-x``           2D cluster state on the Lieb lattice (vertex qubits plus
                       two link qubits per vertex), X dephasing on link qubits
* ``toric-x``          toric code ground state (fixed logical sector), X
                       dephasing on every edge

Qubit addressing is row-major in the vertex index ``j = iy*Lx + ix``; models
with link qubits store them two per vertex (x-direction first).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliString, symplectic_product
from .stabilizer import StabilizerMixedState


class ModelError(ValueError):
    """Unknown model id or invalid dimensions."""


@dataclass(frozen=True)
class ModelInstance:
    """Immutable bundle of one lattice system.

    ``channel_ops`` is the ordered list of candidate dephasing operators (one
    per location); ``channel_bonds`` gives, for bond-like channels, the two
    charge-site indices joined by each location (used by the percolation
    oracle).  ``charge_qubits[i]`` is the qubit carrying the Z-type charged
    operator of charge site i (None for the toric code, whose charged objects
    are open 't Hooft strings).
    """

    name: str
    Lx: int
    Ly: int
    n: int
    initial: StabilizerMixedState
    channel_ops: tuple[PauliString, ...]
    channel_bonds: np.ndarray | None
    symmetries: tuple[PauliString, ...]
    charge_sites: tuple
    charge_qubits: np.ndarray | None

    @property
    def V(self) -> int:
        return len(self.charge_sites)

    @property
    def n_ops(self) -> int:
        return len(self.channel_ops)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.Lx, self.Ly)

    def charge_op(self, site) -> PauliString:
        """Z-type charged operator at a charge site label."""
        if self.charge_qubits is None:
            raise ModelError(
                f"{self.name} has no on-site charged operator; use thooft_string"
            )
        try:
            idx = self.charge_sites.index(site)
        except ValueError:
            raise ModelError(f"site {site!r} not a charge site of {self.name}")
        return PauliString.single(self.n, int(self.charge_qubits[idx]), "Z")

    def charge_op_by_index(self, idx: int) -> PauliString:
        if self.charge_qubits is None:
            raise ModelError(
                f"{self.name} has no on-site charged operator; use thooft_string"
            )
        return PauliString.single(self.n, int(self.charge_qubits[idx]), "Z")


def _norm_dims(name: str, dims) -> tuple[int, int]:
    if isinstance(dims, (int, np.integer)):
        d = (int(dims), int(dims))
    else:
        t = tuple(int(v) for v in dims)
        if len(t) == 1:
            d = (t[0], t[0])
        elif len(t) == 2:
            d = t
        else:
            raise ModelError(f"bad dims {dims!r}")
    if d[0] <= 0 or d[1] <= 0:
        raise ModelError(f"dims must be positive, got {d}")
    return d


def _build_chain(L: int) -> ModelInstance:
    if L < 2:
        raise ModelError("chain needs L >= 2")
    n = L
    gens = [PauliString.single(n, i, "X") for i in range(n)]
    ops = [
        PauliString.from_ops(n, {i: "Z", (i + 1) % L: "Z"}) for i in range(L)
    ]
    bonds = np.array([[i, (i + 1) % L] for i in range(L)], dtype=np.int64)
    parity = PauliString.from_ops(n, {i: "X" for i in range(n)})
    return ModelInstance(
        name="chain-zz",
        Lx=L,
        Ly=1,
        n=n,
        initial=StabilizerMixedState.from_generators(n, gens),
        channel_ops=tuple(ops),
        channel_bonds=bonds,
        symmetries=(parity,),
        charge_sites=tuple(range(L)),
        charge_qubits=np.arange(L, dtype=np.int64),
    )


def _build_square(Lx: int, Ly: int) -> ModelInstance:
    if Lx < 2 or Ly < 2:
        raise ModelError("square lattice needs Lx, Ly >= 2")
    n = Lx * Ly

    def site(ix, iy):
        return (iy % Ly) * Lx + (ix % Lx)

    gens = [PauliString.single(n, j, "X") for j in range(n)]
    ops = []
    bonds = []
    for iy in range(Ly):
        for ix in range(Lx):
            a = site(ix, iy)
            for b in (site(ix + 1, iy), site(ix, iy + 1)):
                ops.append(PauliString.from_ops(n, {a: "Z", b: "Z"}))
                bonds.append((a, b))
    parity = PauliString.from_ops(n, {j: "X" for j in range(n)})
    sites = tuple((ix, iy) for iy in range(Ly) for ix in range(Lx))
    return ModelInstance(
        name="square-zz",
        Lx=Lx,
        Ly=Ly,
        n=n,
        initial=StabilizerMixedState.from_generators(n, gens),
        channel_ops=tuple(ops),
        channel_bonds=np.array(bonds, dtype=np.int64),
        symmetries=(parity,),
        charge_sites=sites,
        charge_qubits=np.arange(n, dtype=np.int64),
    )


def _build_cluster1d(L: int, even_only: bool) -> ModelInstance:
    if L < 4 or L % 2:
        raise ModelError("cluster chain needs even L >= 4")
    n = L
    gens = [
        PauliString.from_ops(n, {i: "Z", (i + 1) % L: "X", (i + 2) % L: "Z"})
        for i in range(L)
    ]
    sites = range(0, L, 2) if even_only else range(L)
    ops = [PauliString.single(n, i, "X") for i in sites]
    g1 = PauliString.from_ops(n, {2 * j: "X" for j in range(L // 2)})
    g2 = PauliString.from_ops(n, {2 * j + 1: "X" for j in range(L // 2)})
    return ModelInstance(
        name="cluster1d-x-even" if even_only else "cluster1d-x",
        Lx=L,
        Ly=1,
        n=n,
        initial=StabilizerMixedState.from_generators(n, gens),
        channel_ops=tuple(ops),
        channel_bonds=None,
        symmetries=(g1, g2),
        charge_sites=tuple(range(L)),
        charge_qubits=np.arange(L, dtype=np.int64),
    )


def _build_lieb(Lx: int, Ly: int) -> ModelInstance:
    if Lx < 1 or Ly < 1 or Lx * Ly < 2:
        raise ModelError("lieb lattice needs at least two vertices")
    V = Lx * Ly
    n = 3 * V

    def vert(ix, iy):
        return (iy % Ly) * Lx + (ix % Lx)

    def xlink(ix, iy):
        return V + 2 * vert(ix, iy)

    def ylink(ix, iy):
        return V + 2 * vert(ix, iy) + 1

    gens = []
    for iy in range(Ly):
        for ix in range(Lx):
            # vertex stabilizer tau^x Z Z Z Z on the four touching links;
            # from_ops XORs repeated qubits away on thin lattices
            gens.append(
                PauliString.from_ops(
                    n,
                    _xor_ops(
                        [(vert(ix, iy), "X")],
                        [
                            (xlink(ix, iy), "Z"),
                            (xlink(ix - 1, iy), "Z"),
                            (ylink(ix, iy), "Z"),
                            (ylink(ix, iy - 1), "Z"),
                        ],
                    ),
                )
            )
    for iy in range(Ly):
        for ix in range(Lx):
            gens.append(
                PauliString.from_ops(
                    n,
                    _xor_ops(
                        [(xlink(ix, iy), "X")],
                        [(vert(ix, iy), "Z"), (vert(ix + 1, iy), "Z")],
                    ),
                )
            )
            gens.append(
                PauliString.from_ops(
                    n,
                    _xor_ops(
                        [(ylink(ix, iy), "X")],
                        [(vert(ix, iy), "Z"), (vert(ix, iy + 1), "Z")],
                    ),
                )
            )
    ops = []
    bonds = []
    for iy in range(Ly):
        for ix in range(Lx):
            ops.append(PauliString.single(n, xlink(ix, iy), "X"))
            bonds.append((vert(ix, iy), vert(ix + 1, iy)))
            ops.append(PauliString.single(n, ylink(ix, iy), "X"))
            bonds.append((vert(ix, iy), vert(ix, iy + 1)))
    syms = [PauliString.from_ops(n, {j: "X" for j in range(V)})]
    for iy in range(Ly):  # non-contractible X loop along x in row iy
        syms.append(
            PauliString.from_ops(n, {xlink(ix, iy): "X" for ix in range(Lx)})
        )
    for ix in range(Lx):
        syms.append(
            PauliString.from_ops(n, {ylink(ix, iy): "X" for iy in range(Ly)})
        )
    sites = tuple((ix, iy) for iy in range(Ly) for ix in range(Lx))
    return ModelInstance(
        name="lieb-x",
        Lx=Lx,
        Ly=Ly,
        n=n,
        initial=StabilizerMixedState.from_generators(n, gens),
        channel_ops=tuple(ops),
        channel_bonds=np.array(bonds, dtype=np.int64),
        symmetries=tuple(syms),
        charge_sites=sites,
        charge_qubits=np.arange(V, dtype=np.int64),
    )


def _build_toric(Lx: int, Ly: int) -> ModelInstance:
    if Lx < 2 or Ly < 2:
        raise ModelError("toric code needs Lx, Ly >= 2")
    V = Lx * Ly
    n = 2 * V

    def vert(ix, iy):
        return (iy % Ly) * Lx + (ix % Lx)

    def xedge(ix, iy):  # edge from (ix,iy) towards +x
        return 2 * vert(ix, iy)

    def yedge(ix, iy):  # edge from (ix,iy) towards +y
        return 2 * vert(ix, iy) + 1

    def star(ix, iy):
        return PauliString.from_ops(
            n,
            {
                xedge(ix, iy): "X",
                xedge(ix - 1, iy): "X",
                yedge(ix, iy): "X",
                yedge(ix, iy - 1): "X",
            },
        )

    def plaq(ix, iy):
        return PauliString.from_ops(
            n,
            {
                xedge(ix, iy): "Z",
                xedge(ix, iy + 1): "Z",
                yedge(ix, iy): "Z",
                yedge(ix + 1, iy): "Z",
            },
        )

    gens = [star(ix, iy) for iy in range(Ly) for ix in range(Lx)]
    gens += [plaq(ix, iy) for iy in range(Ly) for ix in range(Lx)]
    # fix the logical sector: +1 for both non-contractible Z loops
    gens.append(PauliString.from_ops(n, {xedge(ix, 0): "Z" for ix in range(Lx)}))
    gens.append(PauliString.from_ops(n, {yedge(0, iy): "Z" for iy in range(Ly)}))

    ops = []
    bonds = []  # dual-lattice bonds: plaquette indices joined by each edge
    def pidx(px, py):
        return (py % Ly) * Lx + (px % Lx)

    for iy in range(Ly):
        for ix in range(Lx):
            ops.append(PauliString.single(n, xedge(ix, iy), "X"))
            bonds.append((pidx(ix, iy - 1), pidx(ix, iy)))
            ops.append(PauliString.single(n, yedge(ix, iy), "X"))
            bonds.append((pidx(ix - 1, iy), pidx(ix, iy)))
    syms = tuple(star(ix, iy) for iy in range(Ly) for ix in range(Lx))
    sites = tuple((ix, iy) for iy in range(Ly) for ix in range(Lx))
    return ModelInstance(
        name="toric-x",
        Lx=Lx,
        Ly=Ly,
        n=n,
        initial=StabilizerMixedState.from_generators(n, gens),
        channel_ops=tuple(ops),
        channel_bonds=np.array(bonds, dtype=np.int64),
        symmetries=syms,
        charge_sites=sites,
        charge_qubits=None,
    )


def _xor_ops(*groups) -> dict[int, str]:
    """Merge (qubit, letter) pairs, cancelling repeated identical factors."""
    acc: dict[int, str] = {}
    for group in groups:
        for q, letter in group:
            if q in acc and acc[q] == letter:
                del acc[q]
            elif q in acc:
                raise ModelError(f"conflicting factors on qubit {q}")
            else:
                acc[q] = letter
    return acc


_BUILDERS = {
    "chain-zz": lambda Lx, Ly: _build_chain(Lx),
    "square-zz": _build_square,
    "cluster1d-x": lambda Lx, Ly: _build_cluster1d(Lx, even_only=False),
    "cluster1d-x-even": lambda Lx, Ly: _build_cluster1d(Lx, even_only=True),
    "lieb-x": _build_lieb,
    "toric-x": _build_toric,
}

ALIASES = {
    "chain": "chain-zz",
    "square": "square-zz",
    "cluster1d": "cluster1d-x",
    "cluster1d-even": "cluster1d-x-even",
    "lieb": "lieb-x",
    "toric": "toric-x",
}

MODEL_NAMES = tuple(_BUILDERS)


def canonical_name(name: str) -> str:
    name = name.lower()
    name = ALIASES.get(name, name)
    if name not in _BUILDERS:
        raise ModelError(
            f"unknown model {name!r}; known: {', '.join(sorted(_BUILDERS))}"
        )
    return name


def build(name: str, dims) -> ModelInstance:
    """Build a model by id; dims is L or (Lx, Ly)."""
    cname = canonical_name(name)
    Lx, Ly = _norm_dims(cname, dims)
    if cname in ("chain-zz", "cluster1d-x", "cluster1d-x-even"):
        if not isinstance(dims, (int, np.integer)) and len(tuple(dims)) == 2:
            Lx, Ly = tuple(dims)
            if Ly != 1 and Ly != Lx:
                raise ModelError(f"{cname} is one-dimensional, got Ly={Ly}")
        Ly = 1
    model = _BUILDERS[cname](Lx, Ly)
    _check_strong_symmetry_condition(model)
    return model


def _check_strong_symmetry_condition(model: ModelInstance) -> None:
    for m in model.channel_ops:
        for u in model.symmetries:
            if symplectic_product(m, u):
                raise ModelError(
                    f"channel operator {m} anticommutes with symmetry {u}"
                )


def thooft_string(
    model: ModelInstance, start: tuple[int, int], length: int, direction: str = "x"
) -> PauliString:
    """Open 't Hooft string: X on the edges crossed by a straight dual path.

    The path starts at dual site (plaquette) ``start`` and runs ``length``
    steps in +x or +y.  It anticommutes with exactly the two endpoint
    plaquette stabilizers.  Closed (wrapping) paths are rejected: those are
    symmetry operators, not order parameters.
    """
    if model.name != "toric-x":
        raise ModelError("'t Hooft strings are defined for the toric model")
    Lx, Ly = model.Lx, model.Ly
    px, py = start
    L_dir = Lx if direction == "x" else Ly
    if direction not in ("x", "y"):
        raise ModelError(f"direction must be 'x' or 'y', got {direction!r}")
    if not 1 <= length <= L_dir // 2:
        raise ModelError(
            f"string length must be in [1, {L_dir // 2}] (no wrapping), got {length}"
        )
    V = Lx * Ly
    ops: dict[int, str] = {}
    for step in range(1, length + 1):
        if direction == "x":
            ix, iy = (px + step) % Lx, py % Ly
            edge = 2 * (iy * Lx + ix) + 1  # y-edge shared by p(x-1,y), p(x,y)
        else:
            ix, iy = px % Lx, (py + step) % Ly
            edge = 2 * (iy * Lx + ix)  # x-edge shared by p(x,y-1), p(x,y)
        ops[edge] = "X"
    return PauliString.from_ops(model.n, ops)
