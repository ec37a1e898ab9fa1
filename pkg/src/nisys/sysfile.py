"""JSON on-disk format for systems fed to the command line tools.

Three kinds:

  {"kind": "ss", "A": [[...]], "B": [[...]], "C": [[...]], "D": [[...]]}
      state space; D optional (defaults to zeros)
  {"kind": "modal", "output": "position" | "velocity",
   "modes": [{"omega": w, "kappa": k, "psi": [...]}, ...]}
      lightly damped structure given mode by mode
  {"kind": "uncertain", "A": ..., "B1": ..., "B2": ..., "C1": ...}
      synthesis plant with disturbance port (B1, C1) and control input B2
"""

from __future__ import annotations

import json

import numpy as np

from .lti import ModalModel, StateSpace, modal_to_ss
from .synthesis import UncertainPlant


class SystemFileError(ValueError):
    pass


def _mat(obj, key, path, required=True):
    if key not in obj:
        if required:
            raise SystemFileError(f"{path}: missing field {key!r}")
        return None
    try:
        M = np.asarray(obj[key], dtype=float)
    except (TypeError, ValueError) as e:
        raise SystemFileError(f"{path}: field {key!r} is not numeric: {e}") from e
    if not np.all(np.isfinite(M)):
        raise SystemFileError(f"{path}: field {key!r} has non-finite entries")
    return M


def _load_ss(obj, path):
    A = _mat(obj, "A", path)
    B = _mat(obj, "B", path)
    C = _mat(obj, "C", path)
    D = _mat(obj, "D", path, required=False)
    if D is None:
        B2 = np.atleast_2d(B)
        C2 = np.atleast_2d(C)
        D = np.zeros((C2.shape[0], B2.shape[1] if B2.size else 0))
    try:
        return StateSpace(A, B, C, D)
    except ValueError as e:
        raise SystemFileError(f"{path}: {e}") from e


def _load_modal(obj, path):
    modes = obj.get("modes")
    if not isinstance(modes, list) or not modes:
        raise SystemFileError(f"{path}: 'modes' must be a nonempty list")
    out = obj.get("output", "position")
    parsed = []
    for i, m in enumerate(modes):
        if not isinstance(m, dict):
            raise SystemFileError(f"{path}: mode {i} must be an object")
        try:
            omega = float(m["omega"])
            kappa = float(m["kappa"])
            psi = tuple(float(x) for x in np.atleast_1d(m["psi"]))
        except (KeyError, TypeError, ValueError) as e:
            raise SystemFileError(f"{path}: mode {i}: {e}") from e
        parsed.append((omega, kappa, psi))
    try:
        return modal_to_ss(ModalModel(modes=tuple(parsed), output=out))
    except ValueError as e:
        raise SystemFileError(f"{path}: {e}") from e


def _load_uncertain(obj, path):
    try:
        return UncertainPlant(_mat(obj, "A", path), _mat(obj, "B1", path),
                              _mat(obj, "B2", path), _mat(obj, "C1", path))
    except ValueError as e:
        raise SystemFileError(f"{path}: {e}") from e


def load_system(path: str):
    """Load any of the three kinds; returns StateSpace or UncertainPlant."""
    try:
        with open(path) as f:
            obj = json.load(f)
    except OSError as e:
        raise SystemFileError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SystemFileError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise SystemFileError(f"{path}: top level must be an object")
    kind = obj.get("kind")
    if kind == "ss":
        return _load_ss(obj, path)
    if kind == "modal":
        return _load_modal(obj, path)
    if kind == "uncertain":
        return _load_uncertain(obj, path)
    raise SystemFileError(f"{path}: unknown kind {kind!r} "
                          "(expected 'ss', 'modal', or 'uncertain')")


def load_lti(path: str) -> StateSpace:
    sys = load_system(path)
    if not isinstance(sys, StateSpace):
        raise SystemFileError(f"{path}: this command needs an LTI system "
                              "('ss' or 'modal'), got an uncertain plant")
    return sys


def load_uncertain(path: str) -> UncertainPlant:
    sys = load_system(path)
    if not isinstance(sys, UncertainPlant):
        raise SystemFileError(f"{path}: this command needs an uncertain plant "
                              "(kind 'uncertain')")
    return sys
