"""Cross-checks between the closed forms and the dense numerical path.

Each check returns a :class:`CheckResult`.  :func:`run_checks` accepts a
mapping of replacement functions so that a deliberately wrong closed form can
be injected to confirm that the suite notices.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import analytic
from .entanglement import (EPS_NEG, Bipartition, negativity, partial_trace, pt_field_factorization_check,
                           pt_sign_test, pure_negativity, separability_ball_test)
from .limits import TOL, all_global_bipartitions, field_independence_report
from .spectral import decompose, thermal_state
from .spinchain import ChainSpec


@dataclass
class CheckResult:
    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0


def _draw(rng, n_draws):
    for _ in range(n_draws):
        yield (float(rng.uniform(-6, 2)), float(rng.uniform(0.05, 3)), float(rng.uniform(0, 2)),
               int(rng.choice([1, -1])))


def _entangled(rho, part, spec, t, eps_neg):
    # strong fields at low t can push a genuine negativity far below eps_neg;
    # the field-free frame keeps the signs and removes that suppression
    return pt_sign_test(rho, part, spec.b / t, eps_neg, method="dense")[0]


def check_oracle_n2(rng, samples, eps_neg, fns):
    dev, mismatches = 0.0, 0
    ab = Bipartition.parse("a-b", 2)
    for delta, t, bb, vs in _draw(rng, samples):
        spec = ChainSpec.from_reduced(2, delta, bb, vs, "single-pair")
        p = analytic.thermal_weights(spec, t)
        rho = thermal_state(decompose(spec), t)
        num = negativity(rho, ab, eps_neg, method="dense").value
        dev = max(dev, abs(fns["two_qubit_negativity"](p) - num))
        mismatches += fns["two_qubit_entangled"](p) != _entangled(rho, ab, spec, t, eps_neg)
    return dev, 1e-9, mismatches


def check_oracle_n3(rng, samples, eps_neg, fns):
    dev, mismatches = 0.0, 0
    glob, pair = Bipartition.parse("a-bc", 3), Bipartition.parse("a-b", 3)
    for delta, t, bb, vs in _draw(rng, samples):
        spec = ChainSpec.from_reduced(3, delta, bb, vs)
        p = analytic.thermal_weights(spec, t)
        rho = thermal_state(decompose(spec), t)
        ng = negativity(rho, glob, eps_neg, method="dense").value
        npair = negativity(rho, pair, eps_neg, method="dense").value
        dev = max(dev, abs(fns["three_qubit_global_negativity"](p) - ng),
                  abs(fns["two_qubit_negativity"](fns["reduce_weights_3to2"](p)) - npair))
        mismatches += fns["three_qubit_global_condition"](p) != _entangled(rho, glob, spec, t, eps_neg)
        mismatches += fns["pair_condition_n3"](p) != _entangled(rho, pair, spec, t, eps_neg)
    return dev, 1e-9, mismatches


def _border_cases(fns):
    ts = (0.05, 0.2, 0.5, 0.8, 1.0)
    yield "n2", 2, 1, 0.0, fns["border_n2"], ts
    for vs in (1, -1):
        yield f"n3 global v{vs:+d}", 3, vs, 0.0, lambda t, vs=vs: fns["border_n3_global"](t, vs), ts
    for vs, bbs in ((1, (0.0, 0.5, 1.0)), (-1, (0.5, 1.0))):
        for bb in bbs:
            yield (f"n3 pair v{vs:+d} b{bb:g}", 3, vs, bb,
                   lambda t, vs=vs, bb=bb: fns["border_n3_pair"](t, bb, vs), ts)


def check_borders(rng, samples, eps_neg, fns, step=1e-4):
    """The state just inside each border is entangled, just outside it is not.

    Entanglement is decided by the thermal condition on the Gibbs weights,
    which does not involve the border formula under test.  (Near the border
    at low t with a field the negativity itself is far below ``eps_neg``.)
    """
    conditions = {"n2": fns["two_qubit_entangled"], "global": fns["three_qubit_global_condition"],
                  "pair": fns["pair_condition_n3"]}
    failures = []
    evaluated = 0
    for name, n, vs, bb, border, ts in _border_cases(fns):
        cond = conditions[next(k for k in conditions if k in name)]
        topo = "single-pair" if n == 2 else "cyclic-nn"
        for t in ts:
            dmax = border(t)
            if dmax is None:
                continue
            evaluated += 1
            for sign, want in ((-1, True), (1, False)):
                spec = ChainSpec.from_reduced(n, dmax + sign * step, bb, vs, topo)
                if cond(analytic.thermal_weights(spec, t)) != want:
                    failures.append(f"{name} t={t:g} side={sign:+d}")
    detail = f"{evaluated} border points; failures: {failures[:5]}" if failures else f"{evaluated} border points"
    return float(len(failures)), 0.0, 0, detail


def check_saturation(rng, samples, eps_neg, fns):
    tc = fns["pair_saturation_temperature"](0.0, 1)
    return abs(tc - 3 / (4 * math.log(2))), 1e-9, 0


def check_m0_ring_state(rng, samples, eps_neg, fns):
    dev = 0.0
    for delta in (-3.0, 0.0, 0.5, 1.5, 3.0, 5.0):
        fam = fns["m0_ring_state"](delta)
        psi = fam.vector()
        rho = np.outer(psi, psi)
        for label, want in fam.negativities.items():
            part = Bipartition.parse(label, 4)
            got = pure_negativity(psi, part) if part.is_global else negativity(rho, part).value
            dev = max(dev, abs(got - want))
    return dev, 1e-9, 0


def _random_state(rng, n):
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return psi / np.linalg.norm(psi)


def check_pure_states(rng, samples, eps_neg, fns, max_n=6):
    dev = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, max_n + 1))
        psi = _random_state(rng, n)
        rho = np.outer(psi, psi.conj())
        for part in all_global_bipartitions(n):
            dev = max(dev, abs(negativity(rho, part, eps_neg).value - pure_negativity(psi, part)))
    return dev, 1e-9, 0


def check_factorization(rng, samples, eps_neg, fns, max_n=5):
    dev = 0.0
    for n in range(3, max(3, min(max_n, 5)) + 1):
        for bb in (0.3, 1.7):
            spec = ChainSpec.from_reduced(n, float(rng.uniform(-2, 2)), bb)
            mask = int(rng.integers(1, (1 << n) - 1))
            dev = max(dev, pt_field_factorization_check(spec, Bipartition(n, mask), float(rng.uniform(0.3, 3))))
    return dev, 1e-9, 0


def check_field_independence(rng, samples, eps_neg, fns, max_n=4, tol=TOL):
    worst = 0.0
    for n in range(3, max(3, min(max_n, 4)) + 1):
        for part in all_global_bipartitions(n):
            rows = field_independence_report(n, "cyclic-nn", 1, part, (0.0, 0.5, 2.0), (-3.0, 0.0, 1.5),
                                             tol=tol, eps_neg=eps_neg)
            worst = max([worst] + [r.spread for r in rows])
    return worst, 10 * tol, 0


def check_sign_pattern(rng, samples, eps_neg, fns, max_n=5):
    """Entangled flag and k of the partial transpose do not depend on the field."""
    mismatches = 0
    for _ in range(max(samples // 5, 4)):
        n = int(rng.integers(3, max(3, min(max_n, 5)) + 1))
        delta, t = float(rng.uniform(-3, 2)), float(rng.uniform(0.05, 2))
        part = all_global_bipartitions(n)[int(rng.integers(len(all_global_bipartitions(n))))]
        seen = set()
        for bb in (0.0, 0.5, 2.0):
            rho = thermal_state(decompose(ChainSpec.from_reduced(n, delta, bb)), t)
            seen.add(pt_sign_test(rho, part, bb / t, eps_neg))
        mismatches += len(seen) != 1
    return 0.0, 0.0, mismatches


def check_tracing(rng, samples, eps_neg, fns, max_n=5):
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(4, max(4, min(max_n, 5)) + 1))
        spec = ChainSpec.from_reduced(n, float(rng.uniform(-4, 2)), float(rng.uniform(0, 1)),
                                      int(rng.choice([1, -1])))
        rho = thermal_state(decompose(spec), float(rng.uniform(0.05, 2)))
        val = {lab: negativity(rho, Bipartition.parse(lab, n)).value
               for lab in ("a-b", "a-c", "a-bc", "a-bcd")}
        worst = max(worst, val["a-b"] - val["a-bc"], val["a-bc"] - val["a-bcd"], val["a-c"] - val["a-bc"])
    return max(worst, 0.0), 1e-10, 0


def check_ball(rng, samples, eps_neg, fns, max_n=5):
    passed_ball, bad = 0, 0
    for _ in range(samples):
        n = int(rng.integers(3, max(3, max_n) + 1))
        spec = ChainSpec.from_reduced(n, float(rng.uniform(-4, 2)), float(rng.uniform(0, 2)))
        rho = thermal_state(decompose(spec), float(rng.uniform(1, 60)))
        if separability_ball_test(rho):
            passed_ball += 1
            bad += any(negativity(rho, p).value >= eps_neg for p in all_global_bipartitions(n))
    return 0.0, 0.0, bad, f"{passed_ball} states inside the ball"


def check_reduce_weights(rng, samples, eps_neg, fns):
    dev = 0.0
    for _ in range(samples):
        p3 = analytic.random_weights(3, rng)
        lhs = partial_trace(analytic.weights_to_density(p3), 0b011)
        rhs = analytic.weights_to_density(fns["reduce_weights_3to2"](p3))
        dev = max(dev, float(np.max(np.abs(lhs - rhs))))
    return dev, 1e-12, 0


DEFAULT_FUNCTIONS = {name: getattr(analytic, name) for name in (
    "two_qubit_negativity", "two_qubit_entangled", "three_qubit_global_negativity",
    "three_qubit_global_condition", "reduce_weights_3to2", "pair_condition_n3", "border_n2",
    "border_n3_global", "border_n3_pair", "pair_saturation_temperature", "m0_ring_state")}


def run_checks(max_n: int = 5, samples: int = 50, seed: int = 0, eps_neg: float = EPS_NEG,
               tol: float = TOL, functions: dict | None = None, only=None) -> list[CheckResult]:
    """Run the suite; ``functions`` replaces entries of :data:`DEFAULT_FUNCTIONS`."""
    fns = dict(DEFAULT_FUNCTIONS)
    fns.update(functions or {})
    checks = [
        ("oracle_n2", check_oracle_n2, {}),
        ("oracle_n3", check_oracle_n3, {}),
        ("borders", check_borders, {}),
        ("saturation_t_c0", check_saturation, {}),
        ("m0_ring_state_bundle", check_m0_ring_state, {}),
        ("reduce_weights", check_reduce_weights, {}),
        ("pure_state_agreement", check_pure_states, {"max_n": max_n}),
        ("field_factorization", check_factorization, {"max_n": max_n}),
        ("field_sign_pattern", check_sign_pattern, {"max_n": max_n}),
        ("field_independence", check_field_independence, {"max_n": max_n, "tol": tol}),
        ("tracing_monotonicity", check_tracing, {"max_n": max_n}),
        ("separability_ball", check_ball, {"max_n": max_n}),
    ]
    out = []
    for i, (name, fn, kw) in enumerate(checks):
        if only is not None and name not in only:
            continue
        rng = np.random.default_rng([seed, i])
        t0 = time.perf_counter()
        res = fn(rng, samples, eps_neg, fns, **kw)
        dev, tolerance, mismatches = res[:3]
        detail = res[3] if len(res) > 3 else (f"{mismatches} condition mismatches" if mismatches else "")
        passed = bool(dev <= tolerance and mismatches == 0)
        out.append(CheckResult(name, passed, float(dev), float(tolerance), detail,
                               round(time.perf_counter() - t0, 3)))
    return out


def report(results: list[CheckResult]) -> dict:
    return {"passed": all(r.passed for r in results), "checks": [asdict(r) for r in results]}
