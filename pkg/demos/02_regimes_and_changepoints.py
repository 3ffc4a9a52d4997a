# %% [markdown]
# Linear regimes
#
# Fit one line per fixed period, then let the segmentation search pick its
# own three breakpoints for comparison.

# %%
from kgcycles import load_bundled, per_million
from kgcycles.changepoints import detect_changepoints
from kgcycles.regimes import analyze_regimes, duration_conventions, ols_fit, paper_segmentation, Segment

pm = per_million(*load_bundled())
ra = analyze_regimes(pm, paper_segmentation(pm))
for seg, fit in zip(ra.segmentation, ra.fits):
    print(f"{seg.start_year}-{seg.end_year}: slope {fit.slope:7.3f}  r2 {fit.r_squared:.3f}")
print("slope ratios", [round(r, 3) for r in ra.ratios])

# %%
# the last slope is sensitive to the start year
for start in (2006, 2007, 2008, 2009):
    print(start, round(ols_fit(pm, Segment(start, pm.last_year)).slope, 2))

# %%
print(duration_conventions(ra.segmentation))

# %%
res = detect_changepoints(pm, k=3, min_len=10)
print("breakpoints", res.breakpoints, "total sse", round(res.total_sse, 1))
