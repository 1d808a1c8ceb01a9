"""Compile a small ONE-IN-THREE instance, encode assignments, decode them back."""

from acflow_hardness.cnf import CnfInstance, iter_assignments, verify_one_in_three
from acflow_hardness.network import check_feasible, throughput
from acflow_hardness.reduction import compile_instance, decode_witness, encode_witness

cnf = CnfInstance(3, ((1, -2, 3),))
inst = compile_instance(cnf)
print(len(inst.network.buses), "buses,", len(inst.network.lines), "lines, threshold", inst.threshold)

for a in iter_assignments(3):
    pt = encode_witness(inst, a, saturate=True)
    dec = decode_witness(inst, pt)
    rep = check_feasible(inst.network, pt, 1e-6)
    worst = rep.limit_violations[0].element if rep.limit_violations else "-"
    print(
        "".join("1" if a[j] else "0" for j in (1, 2, 3)),
        "1-in-3" if verify_one_in_three(cnf, a) else "      ",
        "decoded", dec.assignment == a,
        "feasible", rep.verdict,
        f"demand {throughput(inst.network, pt, inst.load):.4f}",
        "first violation", worst,
    )
