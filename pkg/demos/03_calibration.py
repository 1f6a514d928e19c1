# coding: utf-8

# # Calibration: false and true positive rates
#
# `calibrate` repeats the experiment with fresh data from a fixed precision
# matrix and counts how often each test flags a true-zero entry (false
# positive) or a non-zero entry (true positive).

# In[1]:

import tempfile

from covbounds.cli import RunConfig, calibrate
from covbounds.synth import SyntheticSpec


# A small run so that this finishes in a few seconds. The acceptance suite
# uses `n = 50_000` and 100 replicates.

# In[2]:

out = tempfile.mkdtemp()
config = RunConfig(synthetic=SyntheticSpec(p=5, n=20_000, seed=33), delta=0.05, out=out)
doc = calibrate(config, replicates=30)


# In[3]:

print(f"{'data':<9}{'method':<10}{'FPR':>7}{'95% CI':>18}{'TPR':>7}")
for r in doc["rows"]:
    lo, hi = r["fpr_ci"]
    print(f"{r['distribution']:<9}{r['method']:<10}{r['fpr']:7.3f}"
          f"   [{lo:.3f}, {hi:.3f}]{r['tpr']:7.3f}")


# The same table is written to `calibration.csv` and `calibration.json` in the
# output directory. From the command line:
#
#     covbounds calibrate --p 5 --n 50000 --seed 33 --replicates 100 --out calib
