"""Published reference values that the pipeline re-derives and compares against.

Each entry maps a stage name to ``(tag, value, direction, rel_tol)``:

* ``direction`` is ``"upper"`` when the value is an upper bound (smaller is
  stronger), ``"lower"`` for lower bounds, ``"equal"`` for exact quantities.
* ``rel_tol`` is the relative tolerance inside which the verdict is "matches".
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .seqkit import SequenceKind


class Reference(NamedTuple):
    tag: str
    value: Optional[str]
    direction: str
    rel_tol: str = "0"


LUCAS = {
    "r_floor": Reference("L_r >= 36 => r >= 8", "8", "lower"),
    "slack": Reference("(3.3) slack 1.0025", None, "equal"),
    "nonvanishing": Reference("Delta != 0", None, "equal"),
    "k_coefficient": Reference("(3.4)", "5.38e9", "upper", "0.10"),
    "r_bound": Reference("(3.5)", "1.1e13", "upper", "0.10"),
    "k_bound": Reference("(3.6)", "1.71e11", "upper", "0.10"),
    "m_bound": Reference("(3.7)", "55", "upper"),
    "n_bound": Reference("(3.7)", "61", "upper"),
    "legendre_applicability": Reference("assume k >= 9", None, "equal"),
    "legendre_k_bound": Reference("(3.11) k <= 8", "8", "upper"),
    "r_bound_reduced": Reference("(3.1) r <= 3865", "3865", "upper"),
    "m_bound_reduced": Reference("(2.1) m <= 12", "12", "upper"),
    "n_bound_reduced": Reference("(2.1) n <= 16", "16", "upper"),
    "r_cap_final": Reference("r <= 313", "313", "upper"),
    "search": Reference("Theorem 3.1", "[]", "equal"),
    "search_replay": Reference("naive replay", None, "equal"),
    "nonvanishing_check": Reference("Delta != 0 on searched tuples", None, "equal"),
}

PELL = {
    "r_floor": Reference("P_r >= 12 => r >= 4", "4", "lower"),
    "slack": Reference("(3.15) slack 1.00275", None, "equal"),
    "nonvanishing": Reference("Delta_1 != 0", None, "equal"),
    "k_coefficient": Reference("(3.16)", "3.81e12", "upper", "0.10"),
    "r_bound": Reference("(3.17)", "6.13e15", "upper", "0.10"),
    "k_bound": Reference("(3.18)", "1.45e14", "upper", "0.10"),
    "m_bound": Reference("(3.19)", "43", "upper"),
    "n_bound": Reference("(3.20)", "52", "upper"),
    "reduction_1_q": Reference("q_47(43)", "641041703362692900403363", "equal"),
    "reduction_1_epsilon": Reference("min eps pass 1", "8.19224442290261e-10", "lower", "1e-9"),
    "reduction_1_k_bound": Reference("(3.22)", "109", "upper"),
    "r_bound_reduced_1": Reference("(3.23)", "6764", "upper"),
    "m_bound_reduced_1": Reference("(3.24)", "12", "upper"),
    "n_bound_reduced_1": Reference("(3.24)", "12", "upper"),
    "reduction_2_q": Reference("q_15(12)", "706130", "equal"),
    "reduction_2_epsilon": Reference("min eps pass 2", "7.61409861253325e-5", "lower", "1e-9"),
    "reduction_2_k_bound": Reference("(3.25)", "33", "upper"),
    "r_bound_reduced_2": Reference("r <= 618", "618", "upper"),
    "search": Reference("Theorem 3.2", "[(4,2,2,1)]", "equal"),
    "search_replay": Reference("naive replay", None, "equal"),
    "nonvanishing_check": Reference("Delta_1 != 0 on searched tuples", None, "equal"),
}

REFERENCES = {SequenceKind.LUCAS: LUCAS, SequenceKind.PELL: PELL}

# final boxes (m_max, n_max, k_max) used by the search-only stage
FINAL_BOXES = {
    SequenceKind.LUCAS: (12, 16, 8),
    SequenceKind.PELL: (12, 12, 33),
}

EXPECTED_SOLUTIONS = {
    SequenceKind.LUCAS: [],
    SequenceKind.PELL: [(4, 2, 2, 1)],
}
