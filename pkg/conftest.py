import os
import sys
from pathlib import Path

import hypothesis
import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

np.seterr(all="warn")

hypothesis.settings.register_profile("ci", derandomize=True, deadline=None, max_examples=100)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))
