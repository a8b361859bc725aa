"""Kernel selection: compiled extension when built, pure Python otherwise.

Set AGENTRIG_PURE_KERNELS=1 to force the pure implementation (used by the
equivalence tests and the benchmark).
"""

from __future__ import annotations

import logging
import os

logger = logging.getLogger(__name__)

if os.environ.get("AGENTRIG_PURE_KERNELS") == "1":
    from agentrig.denoise import _gates_py as _impl

    BACKEND = "pure"
else:
    try:
        from agentrig.denoise import _gates as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from agentrig.denoise import _gates_py as _impl

        BACKEND = "pure"
        logger.info("compiled gate kernels unavailable; using pure Python")

kernel_threshold = _impl.kernel_threshold
kernel_factor = _impl.kernel_factor
kernel_smallest = _impl.kernel_smallest
