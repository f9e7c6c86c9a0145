"""Invariant suites behind ``--mode validate``."""

from __future__ import annotations

import numpy as np

from itc.cells import Geometry, Kind, build_complex
from itc.code import (
    Phase,
    Presentation,
    apply_ucx,
    build_itc,
    build_logicals,
    check_logicals,
    count_logical_qubits,
    family_ranks,
    gauge_fix,
    mirror_permutation,
    permute_qubits,
    same_span,
    stabilizer_discrepancy,
)
from itc.decoder import Decoder, is_logical_failure
from itc.syndrome import Sector, apply, build_maps, outcome

EXPECTED_K = {Kind.TORUS3: 0, Kind.SLAB: 2, Kind.CUBE: 1}


def expected_ranks(kind: Kind, L: int) -> dict[str, int]:
    """Closed-form ranks of the Av, Ac, Be, Bf families."""
    L3, L2 = L**3, L**2
    if kind is Kind.TORUS3:
        return {"Av": L3 - 1, "Ac": L3 - 1, "Be": 2 * L3 - 2, "Bf": 2 * L3 - 2}
    if kind is Kind.SLAB:
        return {"Av": L3 + L2 - 1, "Ac": L3 - 1, "Be": 2 * L3 - L2 - 1, "Bf": 2 * L3 + L2 - 1}
    return {"Av": L3 + L2 - L - 1, "Ac": L3, "Be": 2 * L3 - L2 - 1, "Bf": 2 * L3 + L2}


def single_error_suite(code, maps) -> tuple[bool, bool]:
    """(every single qubit error corrected, every single flip contained)."""
    dec = Decoder(maps)
    dq, dm = maps.dims["C_Q"], maps.dims["C_M"]
    qubit_ok = True
    for j in range(dq):
        eps = np.zeros(dq, np.uint8)
        eps[j] = 1
        eps ^= dec.decode(outcome(maps, eps).zeta).eps_hat
        qubit_ok &= not apply(maps.bS_sp, eps).any() and not is_logical_failure(code, maps, eps)
    flip_ok = True
    for j in range(dm):
        mu = np.zeros(dm, np.uint8)
        mu[j] = 1
        eps = dec.decode(mu).eps_hat
        flip_ok &= int(apply(maps.bS_sp, eps).sum()) <= 2
        eps ^= dec.decode(outcome(maps, eps).zeta).eps_hat
        flip_ok &= not apply(maps.bS_sp, eps).any() and not is_logical_failure(code, maps, eps)
    return qubit_ok, flip_ok


def run_all(geometry: str, sizes, presentation: str = "kvc") -> list[tuple[str, bool]]:
    kind = Kind(geometry)
    results: list[tuple[str, bool]] = []
    for L in sizes:
        tag = f"{kind.value} L={L}"
        cx = build_complex(Geometry(kind, L))
        code = build_itc(cx, presentation)
        results.append((f"{tag}: K={EXPECTED_K[kind]}", count_logical_qubits(code) == EXPECTED_K[kind]))
        results.append((f"{tag}: explicit stabilizers generate the center", stabilizer_discrepancy(code) == 0))
        ranks = family_ranks(code)
        for name, want in expected_ranks(kind, L).items():
            results.append((f"{tag}: rank {name} = {want}", ranks[name] == want))
        toric = build_itc(cx, Presentation.TORIC)
        kvc = build_itc(cx, Presentation.KVC)
        results.append((f"{tag}: presentations span the same group", same_span(toric.checks, kvc.checks)))
        image = apply_ucx(kvc)
        if kind is Kind.TORUS3:
            results.append((f"{tag}: U_CX preserves the check group", same_span(image.checks, kvc.checks)))
        else:
            mirrored = permute_qubits(kvc.checks, mirror_permutation(kvc))
            results.append((f"{tag}: U_CX swaps the z boundaries", same_span(image.checks, mirrored)))
        code = build_logicals(kvc)
        results.append((f"{tag}: logical operator invariants", not check_logicals(code)))
        if kind is not Kind.CUBE:
            for phase in Phase:
                try:
                    gauge_fix(code, phase)
                    ok = True
                except RuntimeError:
                    ok = False
                results.append((f"{tag}: gauge fixing {phase.value}", ok))
        for sector in Sector:
            maps = build_maps(code, sector)
            for name, ok in maps.identities().items():
                results.append((f"{tag} {sector.value}: {name}", ok))
            if 3 <= L <= 4:
                qubit_ok, flip_ok = single_error_suite(code, maps)
                results.append((f"{tag} {sector.value}: single qubit errors corrected", qubit_ok))
                results.append((f"{tag} {sector.value}: single measurement flips contained", flip_ok))
    return results
