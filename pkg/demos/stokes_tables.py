"""Stokes multipliers on both sides of the critical time, and the jump between them."""

from exactwkb import painleve1 as P

minus, plus = P.stokes_tables()
for table in (minus, plus):
    print(table.side)
    for j in range(-2, 3):
        print("  s_%+d = %s" % (j, table.s[j]))
    print("  cyclic relation:", "holds" if P.cyclic_check(table)[0] else "fails")

ok, bad = P.ddp_map_check(minus, plus)
print("X_A -> X_A (1 - X_B) carries one table to the other:", ok)
