"""Parse and re-serialize COGS-format rows without losing a byte."""

from lexcontrol import parse_lf, print_lf, parse_split_file, serialize_split_file

# A logical form in the official spaced rendering: definite descriptions come
# first, then the role-atom conjunction. Variable indices are token positions.
spaced = "* hedgehog ( x _ 3 ) ; like . agent ( x _ 1 , Emma ) AND like . theme ( x _ 1 , x _ 3 )"
lf = parse_lf(spaced)
print("definites:", lf.definites)
print("atoms:")
for atom in lf.atoms:
    print("  ", atom)

# The same structure in both renderings; parsing either gives the same AST.
compact = print_lf(lf, "compact")
print("compact :", compact)
print("spaced  :", print_lf(lf, "spaced"))
assert parse_lf(compact) == lf
assert print_lf(lf, "spaced") == spaced

# Primitive entries use the lambda form.
prim = parse_lf("LAMBDA a . LAMBDA b . LAMBDA e . touch . agent ( e , b ) AND touch . theme ( e , a )")
print("lambdas :", prim.lambdas)

# Whole files round-trip byte-exactly too.
data = (
    "Emma liked the hedgehog .\t" + spaced + "\tin_distribution\n"
    "shark\tLAMBDA a . shark ( a )\tprimitive\n"
).encode()
split = parse_split_file(data, "train")
assert serialize_split_file(split) == data
print("file round-trip: ok,", len(split), "rows")
