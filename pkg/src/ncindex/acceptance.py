"""Acceptance criteria as executable checks.

Each ``criterion_XX`` returns a ``CriterionResult``; ``run_all`` runs a
selection and ``format_table`` renders the pass/fail table printed by
``ncindex selftest``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra.crossed import CrossedElement, block, cp_mul, cp_seminorm
from .algebra.groups import reflection
from .analytic.circle import assemble_circle, operator_matrix
from .analytic.index import GAP_ACCEPT, numerical_index
from .analytic.line import line_index
from .analytic.schemes import CircleFourier, LineGrid
from .analytic.torus_map import (TorusGrid, correspondence_residuals, line_samples, line_to_torus,
                                 quasi_periodicity_residual, torus_to_line)
from .errors import NCIndexError
from .rieffel import (build_rieffel, build_rieffel_adaptive, connes_index, frac_inverse,
                      pointwise_identity_residual, unit_projection)
from .suite import (character_projection, d_phi_operator, elliptic_suite, golden_group,
                    lower_order_perturbation, random_element, random_elliptic_symbol, random_operator)
from .symbols.formulas import euler_index_finite, winding_index
from .symbols.kclass import k_class_projectors
from .symbols.operators import (NCOperatorSpec, SymbolPair, compose, identity_operator, mark_elliptic,
                                parametrix_operator, principal_symbol)
from .symbols.twisting import assemble_twisted_circle

THETAS = (0.7, 0.45, 0.3)
EXPECTED = {0.7: -1, 0.45: -2, 0.3: -3}
# grid fixed by criterion 3 and the resolved default of the runner
LITERAL_GRID = LineGrid(16, 20.0, p=8)
DEFAULT_GRID = LineGrid(64, 26.0, p=8)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool = False
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0
    error: str | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.error})" if self.error else ""
        return f"[{status}] {self.number:2d}. {self.title}  {self.seconds:.1f}s{extra}"


def _finite(x: float) -> float | str:
    return x if math.isfinite(x) else "inf"


def criterion_01() -> CriterionResult:
    r = CriterionResult(1, "reflection example: Euler contributions and analytic index")
    G = reflection()
    P = character_projection(G, 0)
    eu = euler_index_finite(P)
    by = eu.by_class()
    D = assemble_twisted_circle(d_phi_operator(G), P, CircleFourier(128, 0), "functions", "one-forms")
    an = numerical_index(D)
    r.metrics = {"contribution_e": str(by[(0,)].snapped), "contribution_r": str(by[(1,)].snapped),
                 "raw_r": by[(1,)].raw, "total": str(eu.total_snapped), "analytic": an.index,
                 "gap_ratio": _finite(an.gap_ratio)}
    r.passed = (by[(0,)].snapped == 0 and by[(1,)].snapped == 1 and eu.total_snapped == 1
                and not any(c.flagged for c in eu.contributions)
                and an.index == 1 and an.gap_ratio >= GAP_ACCEPT)
    return r


def criterion_02() -> CriterionResult:
    r = CriterionResult(2, "Chern path: -[1/theta] at N=256 and N=512")
    ok = True
    for th in THETAS:
        for N in (256, 512):
            c = connes_index(build_rieffel(th, N=N))
            r.metrics[f"theta={th},N={N}"] = {"value": c.value, "snapped": c.snapped, "residual": c.residual}
            ok &= c.snapped == EXPECTED[th] and c.residual <= 1e-6
    r.passed = ok
    return r


def criterion_03() -> CriterionResult:
    r = CriterionResult(3, "analytic path on the line at q=16, L=20, p=8")
    ok = True
    for th in (0.7, 0.45):
        P = build_rieffel(th, N=256)
        try:
            res, _, tail = line_index(P, LITERAL_GRID)
            r.metrics[f"theta={th}"] = {"index": res.index, "gap_ratio": _finite(res.gap_ratio), "tail": tail}
            good = res.index == EXPECTED[th] and res.gap_ratio >= GAP_ACCEPT
        except NCIndexError as exc:
            r.metrics[f"theta={th}"] = {"error": str(exc)}
            good = False
        ok &= good
        if not good:
            r.error = f"theta={th} gives {r.metrics[f'theta={th}'].get('index')} instead of {EXPECTED[th]}"
    r.passed = ok
    return r


def criterion_04() -> CriterionResult:
    r = CriterionResult(4, "unit projection: both paths give +1")
    P = unit_projection(0.45)
    c = connes_index(P)
    res, _, tail = line_index(P, LITERAL_GRID)
    r.metrics = {"chern": c.snapped, "analytic": res.index, "gap_ratio": _finite(res.gap_ratio), "tail": tail}
    r.passed = c.snapped == 1 and res.index == 1 and res.gap_ratio >= GAP_ACCEPT
    return r


def criterion_05() -> CriterionResult:
    r = CriterionResult(5, "Rieffel certification: idempotency, trace, pointwise identity")
    ok = True
    for th in THETAS:
        P = build_rieffel(th, N=256, certify=False)
        pid = pointwise_identity_residual(P.ramp, 4096)
        r.metrics[f"theta={th}"] = {"idempotency": P.idempotency_residual,
                                    "trace_error": abs(P.trace - frac_inverse(th)), "pointwise": pid}
        ok &= P.idempotency_residual <= 1e-9 and abs(P.trace - frac_inverse(th)) <= 1e-8 and pid <= 1e-12
    r.passed = ok
    return r


def criterion_06() -> CriterionResult:
    r = CriterionResult(6, "winding formula equals numerical index on the elliptic suite")
    ok = True
    suite = elliptic_suite()
    for s in suite:
        w = winding_index(principal_symbol(s.op))
        an = numerical_index(assemble_circle(s.op, CircleFourier(64, s.op.bandwidth)))
        r.metrics[s.name] = {"winding": w.snapped, "residual": w.residual, "analytic": an.index,
                             "gap_ratio": _finite(an.gap_ratio)}
        ok &= w.snapped == an.index and w.residual <= 1e-6 and an.gap_ratio >= GAP_ACCEPT
    shifts = sum(s.shifts for s in suite)
    ones = sum(abs(s.expected) == 1 for s in suite)
    r.passed = ok and len(suite) >= 5 and shifts >= 2 and ones >= 1
    return r


def criterion_07(pairs: int = 50, N: int = 64, seed: int = 7) -> CriterionResult:
    r = CriterionResult(7, "composition formula on random operator pairs")
    rng = np.random.default_rng(seed)
    G = golden_group()
    worst_sym = worst_mat = 0.0
    n = 24
    for _ in range(pairs):
        D = random_operator(rng, G, N, int(rng.integers(0, 3)))
        Q = random_operator(rng, G, N, int(rng.integers(0, 3)))
        DQ, exact = compose(D, Q)
        M = 2 * N
        lhs = principal_symbol(DQ).resize(M)
        rhs = principal_symbol(D).resize(M) @ principal_symbol(Q).resize(M)
        worst_sym = max(worst_sym, lhs.distance(rhs))
        bd, bq = D.bandwidth, Q.bandwidth
        A = operator_matrix(D, n + bq, n + bq + bd) @ operator_matrix(Q, n, n + bq)
        B = operator_matrix(DQ, n, n + bq + bd)
        worst_mat = max(worst_mat, float(np.max(np.abs(A - B)) / np.max(np.abs(A))))
    r.metrics = {"symbol_error": worst_sym, "matrix_error": worst_mat, "pairs": pairs}
    r.passed = worst_sym <= 1e-9 and worst_mat <= 1e-9
    return r


def criterion_08() -> CriterionResult:
    r = CriterionResult(8, "parametrix: top-order symbol of Id - QD vanishes")
    ok = True
    for s in elliptic_suite():
        Q = parametrix_operator(s.op)
        QD, _ = compose(Q, s.op)
        R = NCOperatorSpec(s.op.group, 0, (identity_operator(s.op.group, QD.N) + QD.scaled(-1)).terms,
                           N=QD.N, check_order=False)
        sym = principal_symbol(R).norm()
        # the matrix of Id - QD should be small on high modes
        n, b = 64, QD.bandwidth
        Mq = operator_matrix(Q, n + s.op.bandwidth, n + s.op.bandwidth + Q.bandwidth)
        Md = operator_matrix(s.op, n, n + s.op.bandwidth)
        Rm = -(Mq @ Md)
        off = s.op.bandwidth + Q.bandwidth
        Rm[off:off + 2 * n + 1] += np.eye(2 * n + 1)
        k = np.abs(np.arange(-n, n + 1))
        tail = float(np.max(np.linalg.norm(Rm[:, k >= n // 2], axis=0)))
        r.metrics[s.name] = {"symbol_norm": sym, "matrix_tail": tail}
        ok &= sym <= 1e-8
    r.passed = ok
    return r


def criterion_09(count: int = 10, N: int = 16, seed: int = 9) -> CriterionResult:
    r = CriterionResult(9, "K-class projectors: idempotent at 33 nodes, exact endpoints")
    rng = np.random.default_rng(seed)
    G = golden_group()
    ok = True
    worst = 0.0
    for i in range(count):
        sig = random_elliptic_symbol(rng, G, N, 0.3, rank=2)
        sig, inv = mark_elliptic(sig)
        d = np.zeros((2, 2, 2 * N + 1), dtype=complex)
        d[0, 0, N] = 1.0
        P2c = CrossedElement(G, N, {G.identity: d}, rank=2)
        P2 = SymbolPair(P2c, P2c)
        P1 = inv @ (P2 @ sig)
        K = k_class_projectors(sig, inv, P1, P2)
        A1, A2 = P1.to_matrix(), P2.to_matrix()
        z1, z2 = A1 * 0.0, A2 * 0.0
        start = K.q2[0].distance(block([[A1, None], [None, z2]]))
        end = K.q2[-1].distance(block([[z1, None], [None, A2]]))
        worst = max(worst, K.max_residual)
        ok &= K.max_residual <= 1e-8 and start == 0.0 and end == 0.0 and len(K.q2) == 33
    r.metrics = {"max_idempotency": worst, "symbols": count}
    r.passed = ok
    return r


def gaussian_family(count: int = 20, seed: int = 10):
    """``exp(-a (x - c)^2 / 2 + i k x)`` with their derivatives."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        a, c, k = rng.uniform(0.5, 2.0), rng.uniform(-2, 2), rng.uniform(-3, 3)

        def u(x, a=a, c=c, k=k):
            return np.exp(-a * (x - c) ** 2 / 2 + 1j * k * x)

        def du(x, a=a, c=c, k=k, u=u):
            return (-a * (x - c) + 1j * k) * u(x)

        out.append((u, du))
    return out


def criterion_10(theta: float = 0.45) -> CriterionResult:
    r = CriterionResult(10, "line to torus isomorphism and operator correspondence")
    grid = TorusGrid.for_theta(theta)
    rt = qp = 0.0
    corr: dict = {}
    for u, du in gaussian_family():
        S = line_samples(u, grid)
        rt = max(rt, float(np.max(np.abs(torus_to_line(line_to_torus(S, grid), grid) - S)) / np.max(np.abs(S))))
        qp = max(qp, quasi_periodicity_residual(u, grid))
        for k, v in correspondence_residuals(u, du, grid).items():
            corr[k] = max(corr.get(k, 0.0), v)
    r.metrics = {"round_trip": rt, "quasi_periodicity": qp, **corr}
    r.passed = rt <= 1e-8 and qp <= 1e-10 and all(v <= 1e-6 for v in corr.values()) and len(corr) == 4
    return r


def criterion_11(seed: int = 11) -> CriterionResult:
    r = CriterionResult(11, "robustness: resolution doubling, ramp swap, lower-order terms")
    rng = np.random.default_rng(seed)
    checks: dict = {}
    # Chern path
    for th in THETAS:
        base = connes_index(build_rieffel(th, N=256))
        sq = build_rieffel(th, N=512, profile="exp-sq")
        half = build_rieffel_adaptive(th, eps=build_rieffel(th, N=256).eps / 2, N=512)
        checks[f"chern doubling theta={th}"] = connes_index(build_rieffel(th, N=512)).snapped == base.snapped
        checks[f"chern ramp swap theta={th}"] = (connes_index(sq).snapped == base.snapped
                                                 and abs(sq.trace - build_rieffel(th, N=512).trace) <= 1e-8)
        checks[f"chern eps/2 theta={th}"] = connes_index(half).snapped == base.snapped
    # line path
    ref = {}
    for th in (0.7, 0.45):
        P = build_rieffel(th, N=512)
        a = line_index(P, LineGrid(32, 26.0))[0].index
        b = line_index(P, LineGrid(64, 26.0))[0].index
        ref[th] = b
        checks[f"line q doubling theta={th}"] = a == b == EXPECTED[th]
    P = build_rieffel(0.45, N=512)
    checks["line L+4 theta=0.45"] = line_index(P, LineGrid(64, 30.0))[0].index == ref[0.45]
    sq = build_rieffel(0.45, N=512, profile="exp-sq")
    checks["line ramp swap theta=0.45"] = line_index(sq, LineGrid(128, 26.0))[0].index == ref[0.45]
    c1, c2 = rng.normal(size=2)
    pert = lambda x: 0.3 * c1 * np.cos(2 * np.pi * x / 0.45) + 0.3j * c2 * np.sin(4 * np.pi * x / 0.45)
    checks["line lower-order theta=0.45"] = line_index(P, DEFAULT_GRID, perturbation=pert)[0].index == ref[0.45]
    # circle suite
    for s in elliptic_suite():
        a = numerical_index(assemble_circle(s.op, CircleFourier(64, s.op.bandwidth))).index
        b = numerical_index(assemble_circle(s.op, CircleFourier(128, s.op.bandwidth))).index
        w1 = winding_index(principal_symbol(s.op)).snapped
        w2 = winding_index(principal_symbol(s.op).resize(2 * s.op.N)).snapped
        p = lower_order_perturbation(rng, s.op)
        c = numerical_index(assemble_circle(p, CircleFourier(64, p.bandwidth))).index
        checks[f"circle {s.name}"] = a == b == c and w1 == w2
    # reflection example
    G = reflection()
    Pr = character_projection(G, 0)
    idx = [numerical_index(assemble_twisted_circle(d_phi_operator(G), Pr, CircleFourier(N, 0),
                                                   "functions", "one-forms")).index for N in (128, 256)]
    checks["reflection doubling"] = idx[0] == idx[1]
    r.metrics = {k: bool(v) for k, v in checks.items()}
    r.passed = all(checks.values())
    return r


CRITERIA = {i: globals()[f"criterion_{i:02d}"] for i in range(1, 12)}


def run_criterion(i: int) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        res = CRITERIA[i]()
    except NCIndexError as exc:
        res = CriterionResult(i, CRITERIA[i].__doc__ or f"criterion {i}", False, error=f"{type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - t0
    return res


def run_all(selected=None) -> list[CriterionResult]:
    return [run_criterion(i) for i in (selected or sorted(CRITERIA))]


def format_table(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    n = sum(r.passed for r in results)
    lines.append(f"{n}/{len(results)} criteria passed")
    return "\n".join(lines)
