"""Walking the analytical cost model of the in-memory accelerator.

The model maps a database onto 512x2048 phase-change-memory arrays
(row-major atomic vectors for encoding, column-major prototypes plus
complements for classification) and prices a workload with closed-form
latency/energy formulas anchored to the reference hardware
characterization (2.8 ns reads, 100 ns writes, 2 ns / 4 pJ ADC samples).
"""

from hdprofiler.costmodel import (
    CostParams,
    area_report,
    classify_cost,
    encode_cost,
    plan_layout,
    program_cost,
)

D = 40_000
N = 16
PROTOTYPES = 20
READ_LENGTH = 150

params = CostParams()
plan = plan_layout(D, PROTOTYPES, params)

print(f"layout for D={D}, {PROTOTYPES} prototypes on "
      f"{params.array_rows}x{params.array_cols} arrays:")
print(f"  encoding side: {plan.chunks_per_vector} chunks of {plan.chunk_bits} bits, "
      f"one array each -> {plan.im_arrays} arrays")
print(f"  matching side: {plan.am_chunks_per_vector} column chunks of "
      f"{plan.am_chunk_rows} bits per prototype, {plan.am_columns_needed} columns "
      f"-> {plan.am_array_pairs} array pair(s)")
print()

enc = encode_cost(READ_LENGTH, N, params)
print(f"encoding one {READ_LENGTH}-base read (N={N}):")
print(f"  {enc.n_grams} windows x {N} symbol reads = {enc.symbol_reads} reads")
print(f"  latency {enc.latency_ns / 1000:.3f} us   energy {enc.energy_nj:.3e} nJ")
print()

cls = classify_cost(PROTOTYPES, D, params)
print(f"classifying one query against {PROTOTYPES} prototypes:")
print(f"  {cls.column_samples} column samples x {params.adc_latency_ns} ns "
      f"= {cls.latency_ns / 1000:.3f} us")
print(f"  ADC energy {cls.adc_energy_nj:.3f} nJ (+ adder {cls.adder_energy_nj:.2e} nJ)")
print()

prog = program_cost(plan, params)
print("one-time database programming (100 ns per written row/column):")
print(f"  item memory: {prog.im_rows_written} rows -> {prog.im_latency_ns / 1000:.1f} us")
print(f"  prototypes:  {prog.am_columns_written} columns -> {prog.am_latency_ns / 1000:.1f} us")
print()

area = area_report(params)
print(f"area breakdown (total {area.total_mm2:.4f} mm^2):")
for unit, mm2 in area.unit_areas_mm2.items():
    print(f"  {unit:<11} {mm2:>7.4f} mm^2  {area.shares_percent[unit]:>5.1f} %")
print()

# scaling: encode latency is linear in the window count, classification in
# the prototype count, so databases grow cheaply but long reads cost
print("read length ->  encode us   |  prototypes -> classify us")
for length, protos in zip((50, 150, 300), (5, 20, 31)):
    e = encode_cost(length, N, params).latency_ns / 1000
    c = classify_cost(protos, D, params).latency_ns / 1000
    print(f"   {length:>4}     ->  {e:>8.3f}   |   {protos:>4}      -> {c:>8.3f}")
