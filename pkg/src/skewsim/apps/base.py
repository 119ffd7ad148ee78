"""Application contract shared by the pipeline engine and the oracles.

An application supplies four hooks: prepare (tuple -> primary destination
plus payload, evaluated in the PrePEs), process (payload -> PE-local buffer
update), fold (merge one helper PE's state into its primary, used by the
merger at rescheduling epochs and at the end of a run), and finalize
(assemble the application result). The prepare/process hot paths are keyed
by an integer kind so the kernels can inline them; the Python-level hooks
here are the slow-path and test surface.
"""

from __future__ import annotations

import numpy as np

# Kernel dispatch codes.
KIND_HISTO = 0
KIND_DP = 1
KIND_HLL = 2
KIND_HHD = 3
KIND_PR = 4


class AppError(ValueError):
    pass


class AppInstance:
    """Per-run state of an application bound to one ArchConfig."""

    kind: int
    decomposable: bool = True
    num_passes: int = 1

    def __init__(self, cfg):
        self.cfg = cfg
        self.params: list = []       # int parameters for the kernels
        self.arrays: dict = {}       # numpy state arrays shared with kernels
        self.aux: dict = {}          # python-side state (lists, sets)

    # slow-path hooks -------------------------------------------------------

    def prepare(self, key: int, value: int) -> tuple:
        """Pure function of the tuple: (primary destination, payload)."""
        raise NotImplementedError

    def begin_pass(self, index: int) -> None:
        """Multi-pass applications update pass-level inputs here."""

    def fold(self, helper: int, primary: int) -> None:
        """Merge helper PE state into its primary and clear the helper."""
        raise NotImplementedError

    def finalize(self, serving: np.ndarray, total_tuples: int):
        """Fold outstanding helper state and assemble the result."""
        raise NotImplementedError

    # capacity model --------------------------------------------------------

    def per_pe_entries(self) -> int:
        """Buffered entries per PE, checked against the capacity model."""
        raise NotImplementedError

    def _fold_remaining(self, serving: np.ndarray) -> None:
        m = self.cfg.m_pripe
        for s in range(m, self.cfg.num_pes):
            if serving[s] >= 0:
                self.fold(s, int(serving[s]))
                serving[s] = -1


class AppFactory:
    """Creates per-run instances and computes the reference oracle."""

    name: str

    def instantiate(self, cfg, stream) -> AppInstance:
        raise NotImplementedError

    def reference(self, stream):
        """Single-instance, no-routing oracle result for a stream."""
        raise NotImplementedError


def reference_run(app: AppFactory, stream):
    """Canonical single-threaded result used in equivalence tests."""
    return app.reference(stream)
