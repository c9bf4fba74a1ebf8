"""Backend selection for the hot kernels.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
numpy implementation in ``_pykernels`` is used.  Setting the environment
variable FRACPOT_PURE_PYTHON=1 forces the fallback.
"""

import os

from . import _pykernels as python

compiled = None
if os.environ.get("FRACPOT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

active = compiled if compiled is not None else python
NAME = "compiled" if compiled is not None else "python"
