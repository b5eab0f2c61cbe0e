"""Bundled verification corpus: twelve deterministic cases for ``verify-all``.

Everything is defined inline (including the one explicit-matrix case) so a
seeded run is reproducible byte for byte.
"""

from __future__ import annotations

from .generators import unitary_times_nilpotent


def _mixed_pair_matrices() -> list[dict]:
    t = unitary_times_nilpotent(401, 2, 3)
    return [t[0].to_dict(), t[1].to_dict()]


def corpus_cases() -> list[dict]:
    return [
        {
            "name": "series-hardy-cube",
            "weights": "hardy,hardy,hardy",
            "degrees": [12, 12, 12],
            "run": ["series", "props"],
        },
        {
            "name": "series-mixed-presets",
            "weights": "bergman:1.5,bergman:3",
            "degrees": [24, 24],
            "run": ["series", "props"],
        },
        {
            "name": "nilpotent-pair-hardy",
            "weights": "hardy,hardy",
            "tuple": "nilpotent:1:4:2:0.6",
            "degrees": [8, 8],
            "run": ["check", "monotonicity", "dilate-pure"],
        },
        {
            "name": "nilpotent-pair-bergman",
            "weights": "bergman:2,hardy",
            "tuple": "nilpotent:2:5:2:0.45",
            "degrees": [8, 8],
            "run": ["check", "subtuple", "dilate-pure"],
        },
        {
            "name": "charfn-nilpotent-bergman2",
            "weights": "bergman:2",
            "tuple": "nilpotent:3:6:1:0.5",
            "degrees": [8],
            "seed": 3,
            "run": ["check", "charfn"],
        },
        {
            "name": "charfn-nilpotent-hardy",
            "weights": "hardy",
            "tuple": "nilpotent:4:5:1:0.8",
            "degrees": [8],
            "seed": 4,
            "run": ["charfn", "dilate-pure"],
        },
        {
            "name": "scalar-pair-bergman",
            "weights": "bergman:2,bergman:3",
            "tuple": "scalars:[0.5,0.4]",
            "degrees": [16, 16],
            "gamma": [2, 3],
            "run": ["check", "equivalence", "dilate-pure"],
        },
        {
            "name": "scalar-coisometry-mixed",
            "weights": "hardy,hardy",
            "tuple": "scalars:[1.0,0.5]",
            "degrees": [8, 8],
            "run": ["check", "dilate-general"],
        },
        {
            "name": "multishift-2d",
            "weights": "bergman:2,bergman:2",
            "tuple": "multishift:4x4",
            "degrees": [6, 6],
            "run": ["check", "dilate-pure"],
        },
        {
            "name": "random-pair-crosscheck",
            "weights": "bergman:2,bergman:2",
            "tuple": "random-contraction:7:5:2:0.9",
            "degrees": [12, 12],
            "gamma": [2, 2],
            "run": ["equivalence"],
        },
        {
            "name": "unitary-nilpotent-general",
            "weights": "bergman:2,hardy",
            "tuple": {"kind": "explicit", "matrices": _mixed_pair_matrices()},
            "degrees": [4, 4],
            "run": ["check", "dilate-general"],
        },
        {
            "name": "random-pair-subtuple",
            "weights": "hardy,bergman:2",
            "tuple": "random-contraction:11:6:2:0.85",
            "degrees": [12, 12],
            "gamma": [1, 2],
            "run": ["equivalence", "subtuple", "monotonicity"],
        },
    ]
