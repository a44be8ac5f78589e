"""Hypothesis checking for cubic-order convergence and exact JSON certificates.

``certify`` runs every check even after a failure so a refuted certificate
still carries full diagnostics.  Verdict strings are ``pass``, ``fail``,
``not-run`` and, for the default ``c`` search only, ``exhausted-defaults``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .cone import (
    ConeError,
    CubicCone,
    build_cubic_cone,
    default_c_candidates,
    find_diagonal_rescale,
    find_nonneg_right_inverse,
    lambda_matrix,
    unit_vector,
    verify_diagonal_rescale,
    verify_right_inverse,
)
from .digraph import is_strongly_connected, structural_digraph
from .kinetics import qualitative_class_member, structural_jacobian_signs
from .network import (
    NetworkError,
    ReactionNetwork,
    parse_network,
    render,
    repelling_faces_check,
    stoichiometric_matrix,
)

VERSION = 1
# reaction subsets tried by the orientation stage of the c search: 2^n - 1
MAX_ORIENTATION_SEARCH = 10
PASS, FAIL, NOT_RUN, EXHAUSTED = "pass", "fail", "not-run", "exhausted-defaults"
CERTIFIED, REFUTED, INAPPLICABLE = "certified", "refuted", "inapplicable"

VERDICT_ORDER = (
    "rank_full",
    "kernel_dim_one",
    "c_choice_valid",
    "right_inverse",
    "diagonal_rescale",
    "kinetics_sign_class",
    "strong_connectivity",
    "persistence",
)
# hypotheses that do not depend on the cone; a failure here refutes even
# when the cone construction itself is out of scope
CONE_FREE = ("kinetics_sign_class", "strong_connectivity", "persistence")


class CertificateError(ValueError):
    """Malformed certificate serialization."""


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class Certificate:
    network_text: str
    species: tuple[str, ...]
    m: int
    n: int
    c: tuple[Fraction, ...] | None
    c_source: str | None
    verdicts: dict[str, str]
    r: tuple[Fraction, ...] | None = None
    P: tuple[tuple[Fraction, ...], ...] | None = None
    D: tuple[Fraction, ...] | None = None
    failing_zero_sets: tuple[tuple[str, ...], ...] = ()
    status: str = INAPPLICABLE
    condition: str | None = None
    reason: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    @property
    def digest(self) -> str:
        return digest(self.network_text)

    @property
    def overall(self) -> str:
        if self.status == REFUTED:
            return f"refuted({self.condition})"
        if self.status == INAPPLICABLE:
            return f"inapplicable({self.reason})"
        return CERTIFIED

    def to_dict(self) -> dict:
        fs = linalg.frac_str
        return {
            "version": VERSION,
            "network": {"species": list(self.species), "text": self.network_text},
            "digest": self.digest,
            "m": self.m,
            "n": self.n,
            "c": None if self.c is None else [fs(v) for v in self.c],
            "c_source": self.c_source,
            "verdicts": {k: self.verdicts[k] for k in VERDICT_ORDER},
            "witnesses": {
                "r": None if self.r is None else [fs(v) for v in self.r],
                "P": None if self.P is None else [[fs(v) for v in row] for row in self.P],
                "D": None if self.D is None else [fs(v) for v in self.D],
                "failing_zero_sets": [list(z) for z in self.failing_zero_sets],
            },
            "overall": {"status": self.status, "condition": self.condition, "reason": self.reason},
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        try:
            if d["version"] != VERSION:
                raise CertificateError(f"unsupported certificate version {d['version']!r}")
            w = d["witnesses"]
            pf = linalg.parse_frac
            verdicts = dict(d["verdicts"])
            if set(verdicts) != set(VERDICT_ORDER):
                raise CertificateError("verdict set does not match the expected conditions")
            cert = cls(
                network_text=d["network"]["text"],
                species=tuple(d["network"]["species"]),
                m=int(d["m"]),
                n=int(d["n"]),
                c=None if d["c"] is None else tuple(pf(v) for v in d["c"]),
                c_source=d["c_source"],
                verdicts=verdicts,
                r=None if w["r"] is None else tuple(pf(v) for v in w["r"]),
                P=None if w["P"] is None else tuple(tuple(pf(v) for v in row) for row in w["P"]),
                D=None if w["D"] is None else tuple(pf(v) for v in w["D"]),
                failing_zero_sets=tuple(tuple(z) for z in w.get("failing_zero_sets", [])),
                status=d["overall"]["status"],
                condition=d["overall"].get("condition"),
                reason=d["overall"].get("reason"),
                notes=list(d.get("notes", [])),
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, CertificateError):
                raise
            raise CertificateError(f"malformed certificate: {exc}") from exc
        if d.get("digest") != cert.digest:
            cert.notes.append("digest-mismatch")
        return cert

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateError(f"certificate is not JSON: {exc}") from exc
        return cls.from_dict(data)

    def cone(self) -> CubicCone:
        """Rebuild the cone from the stored network and ``c``."""
        net = parse_network(self.network_text)
        return build_cubic_cone(stoichiometric_matrix(net), self.c)


def _overall(verdicts: dict[str, str], shape_ok: bool) -> tuple[str, str | None, str | None]:
    for k in CONE_FREE:
        if verdicts[k] == FAIL:
            return REFUTED, k, None
    if not shape_ok:
        return INAPPLICABLE, None, "stoichiometric matrix is not (n+1) x n"
    exhausted = verdicts["c_choice_valid"] == EXHAUSTED
    for k in VERDICT_ORDER:
        # with no valid c found, cone checks ran on a stand-in c and prove nothing
        if exhausted and k in ("right_inverse", "diagonal_rescale"):
            continue
        if verdicts[k] == FAIL:
            return REFUTED, k, None
    if exhausted:
        return INAPPLICABLE, None, "no default unit vector c satisfies the cone conditions"
    if verdicts["persistence"] == NOT_RUN:
        return INAPPLICABLE, None, "face criterion unavailable for irreversible reactions"
    if any(verdicts[k] != PASS for k in VERDICT_ORDER):
        return INAPPLICABLE, None, "a prerequisite check could not run"
    return CERTIFIED, None, None


def _kinetics_sign_ok(net: ReactionNetwork, G) -> bool:
    neg_gt = [[-G[i][j] for i in range(net.m)] for j in range(net.n)]
    return qualitative_class_member(neg_gt, structural_jacobian_signs(net), "Q0")


def _search_c(G, candidates):
    """First candidate c giving both witnesses, plus the first c outside Im Gamma."""
    fallback = None
    for cvec in candidates:
        try:
            trial = build_cubic_cone(G, cvec)
        except ConeError:
            continue
        fallback = fallback or trial
        d_w = find_diagonal_rescale(trial.lam)
        if d_w is None:
            continue
        p_w = find_nonneg_right_inverse(trial.lam)
        if p_w is not None:
            return (trial, p_w, d_w), fallback
    return None, fallback


def _orientation_candidates(G, m: int, n: int):
    """``e_k - sum_{j in F} Gamma_j``: the unit-vector cones with the reactions in F reversed.

    Reversing column j reflects the cube along coordinate j, which moves
    the apex generator from ``c`` to ``c - Gamma_j``.
    """
    for size in range(1, n + 1):
        for F in itertools.combinations(range(n), size):
            shift = [sum((G[i][j] for j in F), Fraction(0)) for i in range(m)]
            for k in default_c_candidates(m):
                yield tuple(Fraction(int(i == k)) - shift[i] for i in range(m))


def _describe_c(c) -> str:
    return "(" + ", ".join(linalg.frac_str(v) for v in c) + ")"


def certify(net: ReactionNetwork, c: Sequence | None = None) -> Certificate:
    """Check every hypothesis of the cubic-cone convergence theorem for ``net``."""
    S = stoichiometric_matrix(net)
    G = S.as_fractions()
    m, n = net.m, net.n
    verdicts = {k: NOT_RUN for k in VERDICT_ORDER}
    notes: list[str] = []

    rk = linalg.rank(G) if n else 0
    shape_ok = m == n + 1
    verdicts["rank_full"] = PASS if n > 0 and rk == n else FAIL
    verdicts["kernel_dim_one"] = PASS if m - rk == 1 else FAIL

    cone: CubicCone | None = None
    P = D = None
    c_source = None
    if verdicts["rank_full"] == PASS and m > n:
        if c is not None:
            c_source = "given"
            cvec = tuple(linalg.parse_frac(v) if isinstance(v, str) else Fraction(v) for v in c)
            if len(cvec) != m:
                raise ValueError(f"c has length {len(cvec)}, network has {m} species")
            try:
                cone = build_cubic_cone(G, cvec)
                verdicts["c_choice_valid"] = PASS
            except ConeError:
                verdicts["c_choice_valid"] = FAIL
                notes.append("given c lies in Im Gamma")
        else:
            c_source = "default"
            found, fallback = _search_c(G, (unit_vector(m, k) for k in default_c_candidates(m)))
            if found is None and shape_ok and n <= MAX_ORIENTATION_SEARCH:
                found, _ = _search_c(G, _orientation_candidates(G, m, n))
                if found is not None:
                    notes.append("c chosen by orientation search: " + _describe_c(found[0].c))
            elif found is not None:
                notes.append(f"c chosen by default search: e_{found[0].c.index(1) + 1}")
            if found is None:
                verdicts["c_choice_valid"] = EXHAUSTED
                cone = fallback
                if fallback is not None:
                    notes.append("default c search exhausted; diagnostics use the first c outside Im Gamma")
            else:
                cone, P, D = found
                verdicts["c_choice_valid"] = PASS
        if cone is not None:
            if P is None:
                P = find_nonneg_right_inverse(cone.lam)
            if D is None:
                D = find_diagonal_rescale(cone.lam)
            verdicts["right_inverse"] = PASS if P is not None else FAIL
            verdicts["diagonal_rescale"] = PASS if D is not None else FAIL

    verdicts["kinetics_sign_class"] = PASS if _kinetics_sign_ok(net, S.entries) else FAIL
    verdicts["strong_connectivity"] = PASS if is_strongly_connected(structural_digraph(net)) else FAIL

    failing: tuple[tuple[str, ...], ...] = ()
    if net.all_reversible:
        report = repelling_faces_check(net)
        verdicts["persistence"] = PASS if report.all_repelling else FAIL
        failing = tuple(tuple(z) for z in report.failing_names())
    else:
        notes.append("persistence not decided: network has irreversible reactions")

    status, condition, reason = _overall(verdicts, shape_ok)
    if status == CERTIFIED and cone is not None:
        k = next((i for i, v in enumerate(cone.c) if v != 0), None)
        if k is not None and sum(1 for v in cone.c if v != 0) == 1 and cone.r[k] <= 0:
            raise AssertionError("certified cone with r_k <= 0 for c = e_k")
    return Certificate(
        network_text=render(net),
        species=net.species,
        m=m,
        n=n,
        c=None if cone is None else cone.c,
        c_source=c_source,
        verdicts=verdicts,
        r=None if cone is None else tuple(Fraction(v) for v in cone.r),
        P=None if P is None else P.P,
        D=None if D is None else D.diagonal,
        failing_zero_sets=failing,
        status=status,
        condition=condition,
        reason=reason,
        notes=notes,
    )


def verify_certificate(cert: Certificate | dict | str) -> bool:
    """Recompute every witness identity from the serialized data alone."""
    if isinstance(cert, str):
        cert = Certificate.from_json(cert)
    elif isinstance(cert, dict):
        cert = Certificate.from_dict(cert)
    if "digest-mismatch" in cert.notes:
        return False
    try:
        net = parse_network(cert.network_text)
    except NetworkError:
        return False
    if net.species != cert.species or (net.m, net.n) != (cert.m, cert.n):
        return False
    v = cert.verdicts
    if any(val not in (PASS, FAIL, NOT_RUN, EXHAUSTED) for val in v.values()):
        return False
    if EXHAUSTED in (val for k, val in v.items() if k != "c_choice_valid"):
        return False
    G = stoichiometric_matrix(net).as_fractions()

    if cert.r is not None:
        if any(x != 0 for x in linalg.matvec(linalg.transpose(G), cert.r)):
            return False
        if cert.c is None or sum((a * b for a, b in zip(cert.r, cert.c)), Fraction(0)) <= 0:
            return False
    lam = lambda_matrix(G, cert.c) if cert.c is not None else None
    if cert.P is not None and (lam is None or not verify_right_inverse(lam, cert.P)):
        return False
    if cert.D is not None and (lam is None or not verify_diagonal_rescale(lam, cert.D)):
        return False
    if v["right_inverse"] == PASS and cert.P is None:
        return False
    if v["diagonal_rescale"] == PASS and cert.D is None:
        return False

    # cheap structural checks are recomputed rather than trusted
    rk = linalg.rank(G) if net.n else 0
    if (v["rank_full"] == PASS) != (net.n > 0 and rk == net.n):
        return False
    if (v["kernel_dim_one"] == PASS) != (net.m - rk == 1):
        return False
    if v["c_choice_valid"] == PASS and (cert.c is None or cert.r is None):
        return False
    if (v["kinetics_sign_class"] == PASS) != _kinetics_sign_ok(net, stoichiometric_matrix(net).entries):
        return False
    if (v["strong_connectivity"] == PASS) != is_strongly_connected(structural_digraph(net)):
        return False
    if net.all_reversible:
        report = repelling_faces_check(net)
        if (v["persistence"] == PASS) != report.all_repelling:
            return False
    elif v["persistence"] != NOT_RUN:
        return False

    status, condition, reason = _overall(v, net.m == net.n + 1)
    return (status, condition) == (cert.status, cert.condition)
