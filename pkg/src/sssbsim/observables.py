"""SSSB diagnostics on stabilizer mixed states.

On a stabilizer mixed state the Renyi-2 correlator
``Tr[O_i O_j rho O_j O_i rho] / Tr[rho^2]`` is exactly 0 or 1: it is 1 iff
the product O_i O_j commutes with every generator.  Collecting the
anticommutation bits of each charged operator against the generator list
into columns turns the susceptibility into a column-class count,

    chi = (1/V) sum_{i,j} C2(i, j) = (1/V) sum_c m_c^2,

where m_c are the multiplicities of identical columns.  The Type-I
correlator ``Tr[rho O_i O_j]`` is the signed group-membership test.
"""

from __future__ import annotations

import numpy as np

from . import bitops
from .models import ModelInstance, ModelError, thooft_string
from .pauli import PauliString
from .stabilizer import StabilizerMixedState


def renyi2_correlator(
    state: StabilizerMixedState, op_i: PauliString, op_j: PauliString
) -> int:
    """1 iff O_i O_j commutes with all generators, else 0."""
    q = op_i * op_j
    if not q.is_hermitian:
        raise ValueError(f"charged pair product {q} must be Hermitian")
    return 0 if state._anticommute_vector(q.x, q.z).any() else 1


def type1_correlator(
    state: StabilizerMixedState, op_i: PauliString, op_j: PauliString
) -> int:
    """Tr[rho O_i O_j] for Pauli charges: the sign s with s*OiOj in the group, else 0."""
    q = op_i * op_j
    if not q.is_hermitian:
        raise ValueError(f"charged pair product {q} must be Hermitian")
    if state._anticommute_vector(q.x, q.z).any():
        return 0
    s = state.member(q)
    return 0 if s is None else s


def type1_pair_matrix(state: StabilizerMixedState, model: ModelInstance) -> np.ndarray:
    """Type-I correlator for every ordered charge pair, as a (V, V) int matrix.

    Charged operators are Z-type, so Z_a Z_b can only be a product of the
    pure-Z rows of the canonical tableau.  Those rows are in reduced echelon
    form, hence the only candidate combination uses the rows whose pivot
    qubit is a or b; the pair is in the group iff that combination
    reproduces exactly {a, b}, with sign the product of the row signs.
    """
    if model.charge_qubits is None:
        raise ModelError(f"{model.name} has no on-site charged operators")
    canon = state._canonical()
    n = state.n
    W = max(bitops.n_words(n), 1)
    rz = np.zeros((n, W), dtype=np.uint64)  # z-part of the pivot row per qubit
    sign = np.ones(n, dtype=np.int8)
    for i in range(canon.k):
        if canon._X[i].any():
            continue
        piv = int(canon._pivots[i]) - n  # pure-Z row pivots sit in the Z block
        rz[piv] = canon._Z[i]
        sign[piv] = 1 if canon._phase[i] == 0 else -1
    qubits = np.asarray(model.charge_qubits, dtype=np.int64)
    unit = np.zeros((len(qubits), W), dtype=np.uint64)
    for t, q in enumerate(qubits):
        bitops.set_bit(unit[t], int(q))
    A = rz[qubits]  # (V, W)
    match = np.all(
        (A[:, None, :] ^ A[None, :, :]) == (unit[:, None, :] ^ unit[None, :, :]),
        axis=2,
    )
    signs = sign[qubits][:, None] * sign[qubits][None, :]
    return np.where(match, signs, 0).astype(np.int8)


def anticommutation_matrix(
    state: StabilizerMixedState, model: ModelInstance
) -> np.ndarray:
    """Packed column per charge site: bit g = [charge_op anticommutes with g].

    Charged operators are single-qubit Z-type for every model that has them,
    so column v is just the X-bit column of the tableau at that qubit.
    Returns a (V, bytes) uint8 array usable as hashable column keys.
    """
    if model.charge_qubits is None:
        raise ModelError(f"{model.name} has no on-site charged operators")
    xb = bitops.to_bool(state._X, state.n)  # (k, n)
    cols = xb[:, model.charge_qubits].T  # (V, k)
    if cols.shape[1] == 0:
        return np.zeros((model.V, 1), dtype=np.uint8)
    return np.packbits(cols.astype(np.uint8), axis=1, bitorder="little")


def column_classes(cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(class id per site, multiplicity per class) for packed column keys."""
    _, inverse, counts = np.unique(
        cols, axis=0, return_inverse=True, return_counts=True
    )
    return inverse.reshape(-1), counts


def chi_from_counts(counts: np.ndarray, V: int) -> float:
    return float((counts.astype(np.int64) ** 2).sum()) / V


def chi2(state: StabilizerMixedState, model: ModelInstance) -> float:
    """Renyi-2 susceptibility (1/V) sum_{i,j} C2(O_i, O_j), diagonal included."""
    _, counts = column_classes(anticommutation_matrix(state, model))
    return chi_from_counts(counts, model.V)


def corr_profile(
    state: StabilizerMixedState, model: ModelInstance, max_ell: int | None = None
) -> np.ndarray:
    """Mean over base sites of C2(O_i, O_{i + ell x}) for ell = 1 .. Lx/2."""
    ids, _ = column_classes(anticommutation_matrix(state, model))
    return profile_from_class_ids(ids, model, max_ell)


def profile_from_class_ids(
    ids: np.ndarray, model: ModelInstance, max_ell: int | None = None
) -> np.ndarray:
    if model.name not in ("square-zz", "lieb-x"):
        raise ModelError(f"corr profile is defined for square/lieb, not {model.name}")
    Lx, Ly = model.Lx, model.Ly
    max_ell = Lx // 2 if max_ell is None else min(max_ell, Lx // 2)
    grid = ids.reshape(Ly, Lx)
    out = np.empty(max_ell, dtype=np.float64)
    for ell in range(1, max_ell + 1):
        out[ell - 1] = np.mean(grid == np.roll(grid, -ell, axis=1))
    return out


def thooft_renyi2(
    state: StabilizerMixedState,
    model: ModelInstance,
    start: tuple[int, int],
    length: int,
    direction: str = "x",
) -> int:
    """Renyi-2 correlator of one open 't Hooft string (0 or 1)."""
    h = thooft_string(model, start, length, direction)
    return 0 if state._anticommute_vector(h.x, h.z).any() else 1


def thooft_profile(
    state: StabilizerMixedState, model: ModelInstance, max_ell: int | None = None
) -> np.ndarray:
    """Mean over base plaquettes of the length-ell 't Hooft Renyi-2 correlator.

    x-direction strings only, ell = 1 .. Lx/2; the string of base (px, py)
    and length ell crosses the y-edges at x = px+1 .. px+ell in row py, so a
    prefix XOR of the tableau Z-bits along each row evaluates all bases at
    once.
    """
    if model.name != "toric-x":
        raise ModelError("'t Hooft profile is defined for the toric model")
    Lx, Ly = model.Lx, model.Ly
    max_ell = Lx // 2 if max_ell is None else min(max_ell, Lx // 2)
    k = state.k
    if k == 0:
        return np.ones(max_ell)
    zb = bitops.to_bool(state._Z, state.n)  # (k, n)
    # y-edge qubit at vertex (ix, iy) is 2*(iy*Lx+ix)+1
    yedges = (2 * (np.arange(Ly)[:, None] * Lx + np.arange(Lx)[None, :]) + 1)
    E = zb[:, yedges]  # (k, Ly, Lx)
    Edbl = np.concatenate([E, E[:, :, : max_ell + 1]], axis=2).astype(np.uint8)
    P = np.zeros((k, Ly, Lx + max_ell + 2), dtype=np.uint8)
    np.bitwise_xor.accumulate(Edbl, axis=2, out=P[:, :, 1 : Lx + max_ell + 2])
    out = np.empty(max_ell, dtype=np.float64)
    for ell in range(1, max_ell + 1):
        px = np.arange(Lx)
        anti = P[:, :, px + ell + 1] ^ P[:, :, px + 1]  # (k, Ly, Lx)
        out[ell - 1] = np.mean(~anti.any(axis=0))
    return out
