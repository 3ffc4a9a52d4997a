# %% [markdown]
# Fibonacci-ratio forecast
#
# Later cycle lengths are the first cycle scaled by the limit of C(i)/C(i+m)
# for consecutive m, starting at m = 4.

# %%
from kgcycles.fibonacci import duration_ratio_match, forecast_changes, ratio_limits

print([round(v, 4) for v in ratio_limits(6).limits])
print(duration_ratio_match([105, 35, 25]))

# %%
for mode in ("paper-compat", "exact"):
    fc = forecast_changes(105, 2006, start_m=4, count=2, mode=mode)
    print(mode, fc.predicted_durations, fc.predicted_change_years)
