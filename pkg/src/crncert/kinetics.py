"""Mass-action kinetics, Jacobians and the qualitative sign classes Q, Q0, Q1."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .network import ReactionNetwork

Q, Q0, Q1 = "Q", "Q0", "Q1"
_TAGS = {"Q": Q, "Q0": Q0, "Q1": Q1, "Q₀": Q0, "Q₁": Q1}


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def qualitative_class_member(M: Sequence[Sequence], N: Sequence[Sequence], tag: str) -> bool:
    """Is ``N`` in Q(M), Q0(M) or Q1(M)?

    Q: identical sign pattern.  Q0: closure of Q, so zeros of ``M`` force
    zeros of ``N`` and nonzeros agree weakly.  Q1: weak agreement on the
    nonzeros of ``M`` only.
    """
    if tag not in _TAGS:
        raise ValueError(f"unknown qualitative class {tag!r}")
    tag = _TAGS[tag]
    if len(M) != len(N) or any(len(a) != len(b) for a, b in zip(M, N)):
        raise ValueError("dimension mismatch")
    for rm, rn in zip(M, N):
        for a, b in zip(rm, rn):
            sa, sb = _sign(a), _sign(b)
            if tag == Q:
                if sa != sb:
                    return False
            elif sa == 0:
                if tag == Q0 and sb != 0:
                    return False
            elif sb == -sa:
                return False
    return True


@dataclass(frozen=True)
class KineticModel:
    network: ReactionNetwork
    kf: tuple[float, ...]
    kr: tuple[float | None, ...]
    law: str = "mass-action"
    _left: np.ndarray = field(init=False, repr=False, compare=False)
    _right: np.ndarray = field(init=False, repr=False, compare=False)
    _kr_arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        net = self.network
        if self.law != "mass-action":
            raise ValueError(f"unsupported rate law {self.law!r}")
        if len(self.kf) != net.n or len(self.kr) != net.n:
            raise ValueError("one forward and one reverse slot per reaction required")
        for j, (rx, f, r) in enumerate(zip(net.reactions, self.kf, self.kr)):
            if not f > 0:
                raise ValueError(f"reaction {j + 1}: forward constant must be positive")
            if rx.reversible and not (r is not None and r > 0):
                raise ValueError(f"reaction {j + 1}: reverse constant must be positive")
            if not rx.reversible and r is not None:
                raise ValueError(f"reaction {j + 1}: irreversible reaction has a reverse constant")
        left = np.zeros((net.n, net.m))
        right = np.zeros((net.n, net.m))
        for j, rx in enumerate(net.reactions):
            for i, a in rx.left:
                left[j, i] = a
            for i, a in rx.right:
                right[j, i] = a
        object.__setattr__(self, "_left", left)
        object.__setattr__(self, "_right", right)
        object.__setattr__(self, "_kr_arr", np.array([r or 0.0 for r in self.kr], dtype=float))

    @classmethod
    def unit(cls, net: ReactionNetwork) -> "KineticModel":
        return cls(net, (1.0,) * net.n, tuple(1.0 if rx.reversible else None for rx in net.reactions))

    @classmethod
    def from_params(cls, net: ReactionNetwork, params: dict | None) -> "KineticModel":
        """Build from a mapping ``{"<1-based reaction index>": {"kf": .., "kr": ..}}``; absent entries are 1."""
        params = params or {}
        for key in params:
            if not str(key).isdigit() or not 1 <= int(key) <= net.n:
                raise ValueError(f"parameter key {key!r} is not a reaction index in 1..{net.n}")
        kf, kr = [], []
        for j, rx in enumerate(net.reactions):
            entry = params.get(str(j + 1), params.get(j + 1, {})) or {}
            kf.append(float(entry.get("kf", 1.0)))
            kr.append(float(entry.get("kr", 1.0)) if rx.reversible else entry.get("kr"))
        return cls(net, tuple(kf), tuple(kr))

    @property
    def kf_array(self) -> np.ndarray:
        return np.asarray(self.kf, dtype=float)

    def rhs(self, x: np.ndarray) -> np.ndarray:
        """``Gamma v(x)`` in floating point, no input validation (integrator hot path)."""
        return (self._right - self._left).T @ self._rates(x)

    def _rates(self, x: np.ndarray) -> np.ndarray:
        fwd = self.kf_array * np.prod(x ** self._left, axis=1)
        rev = self._kr_arr * np.prod(x ** self._right, axis=1)
        return fwd - rev


def load_params(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("parameters file must hold a JSON object")
    return data


def _is_exact(x) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in x)


def _check_conc(x) -> None:
    if any(v < 0 for v in x):
        raise ValueError("negative concentration")


def rate_vector(model: KineticModel, x: Sequence) -> np.ndarray | list[Fraction]:
    """Net rate of every reaction; exact when ``x`` is integral/rational and constants are too."""
    _check_conc(x)
    if not _is_exact(x):
        return model._rates(np.asarray(x, dtype=float))
    out = []
    for rx, f, r in zip(model.network.reactions, model.kf, model.kr):
        fwd = Fraction(f)
        for i, a in rx.left:
            fwd *= Fraction(x[i]) ** a
        rev = Fraction(0)
        if rx.reversible:
            rev = Fraction(r)
            for i, a in rx.right:
                rev *= Fraction(x[i]) ** a
        out.append(fwd - rev)
    return out


def _monomial_grad(x, side, i):
    """d/dx_i of prod_{l in side} x_l^{a_l}."""
    a_i = dict(side).get(i, 0)
    if a_i == 0:
        return 0
    g = a_i * x[i] ** (a_i - 1)
    for l, a in side:
        if l != i:
            g = g * x[l] ** a
    return g


def jacobian(model: KineticModel, x: Sequence) -> np.ndarray | list[list[Fraction]]:
    """``V(x)``: row j is reaction j, column i is species i."""
    _check_conc(x)
    exact = _is_exact(x)
    xs = [Fraction(v) for v in x] if exact else [float(v) for v in x]
    rows = []
    for rx, f, r in zip(model.network.reactions, model.kf, model.kr):
        f = Fraction(f) if exact else f
        row = []
        for i in range(model.network.m):
            d = f * _monomial_grad(xs, rx.left, i)
            if rx.reversible:
                d -= (Fraction(r) if exact else r) * _monomial_grad(xs, rx.right, i)
            row.append(d)
        rows.append(row)
    return rows if exact else np.array(rows, dtype=float).reshape(model.network.n, model.network.m)


def structural_jacobian_signs(net: ReactionNetwork) -> list[list[int]]:
    """Sign pattern of ``V(x)`` at interior ``x`` for any law obeying the kinetic sign rules.

    Reactants raise the forward rate; products lower it only when the
    reaction is reversible.
    """
    S = [[0] * net.m for _ in range(net.n)]
    for j, rx in enumerate(net.reactions):
        for i in rx.left_species:
            S[j][i] = 1
        if rx.reversible:
            for i in rx.right_species:
                S[j][i] = -1
    return S
