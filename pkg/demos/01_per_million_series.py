# %% [markdown]
# Patent grants per million residents
#
# Load the bundled yearly counts, normalise by population and take a look
# at a few years.

# %%
from kgcycles import load_bundled, per_million

patents, population = load_bundled()
print(patents.first_year, patents.last_year, len(patents))

# %%
# population has decennial gaps before 1900; they are filled linearly
pm = per_million(patents, population)
print(len(pm.interpolated_population), "interpolated population years")

# %%
for year in (1840, 1900, 1945, 1980, 2006, 2013):
    print(year, round(pm.value_at(year), 2))
