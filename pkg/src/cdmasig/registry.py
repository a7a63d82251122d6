"""
Published sub-optimum signature matrices.

Entries are copied digit for digit from the printed tables. Ids have the
form ``tab<TABLE>.<name>``, e.g. ``tabIII.A5``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Alphabet, CdmaError, SignatureMatrix

__all__ = ["Provenance", "RegistryEntry", "REGISTRY", "get", "ids"]


@dataclass(frozen=True)
class Provenance:
    table: str
    criterion: str
    optimizer: str
    design_ebn0_db: float


@dataclass(frozen=True)
class RegistryEntry:
    id: str
    matrix: SignatureMatrix
    provenance: Provenance


def _parse(text: str) -> np.ndarray:
    return np.array([[float(v) for v in row.split()] for row in text.strip().splitlines()])


_TABLES = [
    # (id, table, criterion, optimizer, design Eb/N0, alphabet, entries)
    ("tabIII.A1", "III", "capacity", "ga", 8.0, "real", """
        0.1235   0.3177  0.7605  0.8739   0.4069
        0.3723   0.9240  0.5021  0.0154  -0.2553
    """),
    ("tabIII.A2", "III", "capacity", "ga", 11.0, "real", """
        -0.3724  0.7299  -0.0115   1.0000   0.5408
        -0.5254  0.2538   0.9584  -0.3117  -0.7224
    """),
    ("tabIII.A3", "III", "capacity", "ga", 8.0, "real", """
         0.9764  0.3895  0.7448  -0.9375
        -1.0000  0.1711  0.4241   0.6451
         0.8529  0.6424  0.0930   1.0000
    """),
    ("tabIII.A4", "III", "capacity", "ga", 8.0, "real", """
        1      1      0.969   0.468  1
        0.424 -1      0.5    -0.871  0.5
        1      0.015 -0.906  -0.75   0.719
        0.430  0.995 -0.938   0.984  0.984
    """),
    ("tabIII.A5", "III", "capacity", "ga", 8.0, "binary", """
        1  1  1  1  1
        1 -1  1 -1  1
        1  1 -1 -1  1
        1 -1 -1  1 -1
    """),
    ("tabIV.A1", "IV", "ed", "ga", 8.0, "real", """
         0.0591  0.8787  -0.6226  0.4163  0.2166
        -0.9198  0.1760   0.1907  0.6094  0.8851
    """),
    ("tabIV.A2", "IV", "ed", "ga", 8.0, "real", """
         0.9572  0.4704   0.5922   0.1288
        -1.0000  0.8393   0.3621   0.7090
         0.3995  0.6776  -0.7468  -0.1777
    """),
    ("tabIV.A3", "IV", "ed", "ga", 8.0, "binary", """
        -1 -1  1 -1  1
        -1  1 -1  1  1
         1  1 -1 -1  1
        -1 -1 -1 -1 -1
    """),
    ("tabV.QD_3x4", "V", "qd", "ga", 8.0, "real", """
         0.4520  -0.3740  0.9029   0.1059
        -0.7780   0.3048  0.9585  -0.6561
         0.9163   0.4018  0.3265  -0.0717
    """),
    ("tabV.MD_3x4", "V", "md", "ga", 8.0, "real", """
        0.5924  0.1238  0.4630  -0.4371
        0.0557  0.4388  0.6436   0.5020
        0.9595  0.4137  0.0075   0.4325
    """),
    ("tabV.BER_3x4", "V", "ber", "ga", 8.0, "real", """
        0.2502  0.4917   0.1048  -0.9300
        0.6206  0.9009  -0.9958   0.4022
        0.9903  0.2592   0.4383   0.9961
    """),
    ("tabV.QD_2x5", "V", "qd", "ga", 8.0, "real", """
        0.5315  0.9989  -0.9456   0.5273  0.4257
        0.4364  0.3203   0.5859  -0.9514  0.7039
    """),
    ("tabVI.capacity_2x5", "VI", "capacity", "pso", 8.0, "real", """
        1.0000  0       1.0000  1.0000  -0.3120
        0.9419  1.0000 -0.6067  0.0812   0.6859
    """),
    ("tabVI.capacity_3x4", "VI", "capacity", "pso", 8.0, "real", """
        0       0       1.0000  0.3137
        0       1.0000  1.0000  0
        1.0000  0       1.0000  0
    """),
    ("tabVI.ED_2x5", "VI", "ed", "pso", 8.0, "real", """
        1.0000  1.0000   1.0000  0.5432  -0.0269
        0.5206  0.1099  -0.2031  1.0000   1.0000
    """),
    ("tabVI.ED_3x4", "VI", "ed", "pso", 8.0, "real", """
        1.0000  0       0.0665  1.0000
        0       1.0000  0       1.0000
        0       0       1.0000  1.0000
    """),
    ("tabVI.MD_2x5", "VI", "md", "pso", 8.0, "real", """
        0.3045  0.6719  1.0000   0.2925  -0.0804
        1.0000  0.2708  0.0711  -0.7045   1.0000
    """),
    ("tabVI.MD_3x4", "VI", "md", "pso", 8.0, "real", """
        1.0000  0       1.0000  0.0483
        1.0000  1.0000  0.0574  0
        1.0000  0.0701  0       1.0000
    """),
    ("tabVI.BER_2x5", "VI", "ber", "pso", 8.0, "real", """
        1.0000  -0.7644  0        1.0000  0.4113
        1.0000   1.0000  0.5402  -0.4707  1.0000
    """),
    ("tabVI.BER_3x4", "VI", "ber", "pso", 8.0, "real", """
        1.0000   1.0000  -0.2516  -0.9898
        1.0000  -0.1536   1.0000  -0.0209
        1.0000   0       -0.6976   1.0000
    """),
]

REGISTRY: dict[str, RegistryEntry] = {
    rid: RegistryEntry(
        rid,
        SignatureMatrix(_parse(text), Alphabet(alphabet)),
        Provenance(table, criterion, optimizer, ebn0),
    )
    for rid, table, criterion, optimizer, ebn0, alphabet, text in _TABLES
}


def ids() -> list[str]:
    return list(REGISTRY)


def get(matrix_id: str) -> RegistryEntry:
    try:
        return REGISTRY[matrix_id]
    except KeyError:
        raise CdmaError(f"unknown registry id {matrix_id!r}; see `cdmasig registry-list`") from None
