"""Regenerate end_to_end.json: exact-vs-closed-form connection mass per scenario.

Run from the repository root: ``python tests/fixtures/make_end_to_end.py``.
The threshold is the largest observed relative difference rounded up to two
significant digits.
"""

import json
import math
import pathlib
import sys

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))

from marcumq.approximation import published_poly_params  # noqa: E402
from marcumq.connectivity import (  # noqa: E402
    Scenario,
    connection_mass_closed_form,
    connection_mass_numeric,
)
from oracles import random_scenarios  # noqa: E402


def main():
    rows = []
    for case in random_scenarios():
        sc = Scenario(**case)
        closed = connection_mass_closed_form(sc, published_poly_params(sc.a))
        exact = connection_mass_numeric(sc, "exact", tol=1e-10)
        rows.append({**case, "closed_form": closed, "numeric_exact": exact,
                     "relative_difference": abs(exact - closed) / exact})
    worst = max(r["relative_difference"] for r in rows)
    digits = 1 - math.floor(math.log10(worst))
    threshold = math.ceil(worst * 10 ** digits) / 10 ** digits
    payload = {"threshold": threshold, "scenarios": rows}
    (HERE / "end_to_end.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(f"worst {worst:.4g}, threshold {threshold}")


if __name__ == "__main__":
    main()
