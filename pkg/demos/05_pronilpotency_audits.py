#!/usr/bin/env python3
"""Pronilpotency audits on finite bracket tables.

A finite-type graded Lie algebra is the inverse limit of its
lower-central-series quotients exactly when its degree-0 part is nilpotent
and the iterated degree-0 action on each positive degree eventually
vanishes.  Both conditions are decided here with exact witnesses, and the
combined verdict is cross-checked against the definitional condition
computed directly on the finite table.
"""

from lietower import FiniteLieData, definitional_pronilpotency, g_series, lemma1_audit

print("== the three-dimensional nilpotent algebra ==")
heis = FiniteLieData([("a", 0), ("b", 0), ("c", 0)], {("a", "b"): {"c": 1}})
print(lemma1_audit(heis).to_text())

print()
print("== the affine line: [y, x] = x ==")
aff = FiniteLieData([("x", 0), ("y", 0)], {("y", "x"): {"x": 1}})
audit = lemma1_audit(aff)
print(audit.to_text())
print("the witness persists: [y, witness] =",
      aff.pretty(aff.bracket({aff.index["y"]: 1}, audit.condition_a.witness)))

print()
print("== a weight action trips the positive-degree condition ==")
act = FiniteLieData([("y", 0), ("z", 1)], {("y", "z"): {"z": 1}})
print(lemma1_audit(act).to_text())
print("the action layers never shrink:",
      [len(g_series(act, 1, n)) for n in range(1, 6)])

print()
print("== definitional cross-checks ==")
for label, table in (("nilpotent", heis), ("affine", aff), ("weight action", act)):
    print(f"{label}: audit = {lemma1_audit(table).combined.outcome}, "
          f"definitional = {definitional_pronilpotency(table).outcome}")
