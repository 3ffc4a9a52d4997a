# %% [markdown]
# Helix capacity
#
# Phase measures scale the mean weight; the fractal factor comes from a
# geometric series that needs beta > 5 (planar) or gamma > 7 (spatial).

# %%
from kgcycles.helix import capacity_table, koch2d_prefractal, koch2d_series, koch3d_series, prefractal_area

print(capacity_table())

# %%
s2 = koch2d_series(6.3)
print("planar surplus", round(s2.closed_form, 4), "factor", round(s2.total_factor, 4))
s3 = koch3d_series(8.0, 200)
print("spatial surplus", s3.closed_form, "partial at 40", s3.partial_sums[39], "at 200", s3.partial_sums[-1])

# %%
# the snowflake itself: 3 * 4**n vertices, area tends to 8/5 of the triangle
for n in range(6):
    print(n, len(koch2d_prefractal(n)), round(prefractal_area(n), 6))
