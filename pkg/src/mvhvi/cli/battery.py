"""
Acceptance battery behind `mvhvi suite`.

Each check draws its own deterministic instances from the seed, so checks
are independent and may run on a thread pool; results keep battery order.
"""

from __future__ import annotations

import dataclasses
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from mvhvi.cli.gallery import (
    ExampleGallery,
    equality_case,
    kink_multiplier,
    random_instance,
    scalar_lcp,
)
from mvhvi.core.errors import MvhviError
from mvhvi.core.operators import HFunctionSpec
from mvhvi.core.problem import ProblemInstance
from mvhvi.hypotheses.infsup import infsup_constant
from mvhvi.nonsmooth.piecewise import PiecewiseC1Spec
from mvhvi.nonsmooth.properties import check_clarke_calculus
from mvhvi.solver.config import SolverConfig
from mvhvi.solver.multistart import multi_start
from mvhvi.solver.uzawa import solve
from mvhvi.utils.logging import get_logger
from mvhvi.utils.sampling import make_rng
from mvhvi.verify.oracle import brute_force_oracle, oracle_tolerance
from mvhvi.verify.probes import boundedness_probe, convexity_probe, stability_check
from mvhvi.verify.residuals import ProbeSettings
from mvhvi.verify.special_cases import special_case_crosscheck

logger = get_logger(__name__)

EQUIVALENCE_TOL = 1e-7
SPREAD_TOL = 1e-7
CONVEXITY_TOL = 1e-7
MULTIPLIER_SPREAD_MIN = 0.5
INFSUP_RTOL = 1e-10
SPECIAL_CASE_TOL = 1e-8
ORACLE_ATTEMPTS = 5


@dataclass(frozen=True)
class BatterySizes:
    equivalence_instances: int
    probes: int
    oracle_instances: int
    uniqueness_instances: int
    restarts: int
    stability_instances: int
    stability_pairs: int
    convexity_pairs: int
    bound_samples: int
    calculus_samples: int
    infsup_matrices: int


FULL = BatterySizes(
    equivalence_instances=50,
    probes=10000,
    oracle_instances=20,
    uniqueness_instances=20,
    restarts=20,
    stability_instances=10,
    stability_pairs=100,
    convexity_pairs=10,
    bound_samples=100,
    calculus_samples=10000,
    infsup_matrices=100,
)

REDUCED = BatterySizes(
    equivalence_instances=4,
    probes=2000,
    oracle_instances=2,
    uniqueness_instances=3,
    restarts=5,
    stability_instances=2,
    stability_pairs=5,
    convexity_pairs=3,
    bound_samples=10,
    calculus_samples=1000,
    infsup_matrices=20,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float
    exit_code: int = 0


Check = Callable[[BatterySizes, int], tuple[bool, str]]


def _random_dims(rng: np.random.Generator, max_dim: int = 6) -> tuple[int, int, int]:
    n = int(rng.integers(1, max_dim + 1))
    m = int(rng.integers(1, n + 1))
    k = int(rng.integers(1, max_dim + 1))
    return n, m, k


def _random_instances(count: int, seed: int, max_dim: int = 6) -> list[ProblemInstance]:
    rng = make_rng(seed)
    instances = []
    for i in range(count):
        n, m, k = _random_dims(rng, max_dim)
        instances.append(random_instance(seed * 1000 + i, n, m, k, box=bool(i % 3 == 2)))
    return instances


def check_equivalence(sizes: BatterySizes, seed: int) -> tuple[bool, str]:
    """Every certified pair has all four residuals within 1e-7."""
    probes = ProbeSettings(samples=sizes.probes, seed=seed)
    worst = 0.0
    for inst in _random_instances(sizes.equivalence_instances, seed):
        pair, _ = solve(inst, SolverConfig(), probes=probes)
        worst = max(worst, pair.residuals.worst if pair.residuals else float("inf"))
    count = sizes.equivalence_instances
    return worst <= EQUIVALENCE_TOL, f"worst residual {worst:.3e} over {count} instances"


def check_oracle(sizes: BatterySizes, seed: int) -> tuple[bool, str]:
    """The solver's u lies within one grid step of the oracle's accepted set."""
    worst_gap = 0.0
    checked = 0
    for i in range(sizes.oracle_instances):
        n = 1 if i % 2 == 0 else 2
        r = s = 5.0 if n == 1 else 3.0
        delta = 0.01 if n == 1 else 0.05
        for attempt in range(ORACLE_ATTEMPTS):
            inst = random_instance(seed * 1000 + 100 * i + attempt, n, 1)
            pair, _ = solve(inst, SolverConfig(), certify=False)
            if np.linalg.norm(pair.u) <= 0.8 * r and np.linalg.norm(pair.lam) <= 0.8 * s:
                break
        else:
            continue
        tol = oracle_tolerance(inst, r, s, delta)
        per_axis = 41 if n > 1 else 101
        result = brute_force_oracle(inst, r, s, delta, tol, per_axis, capture=delta)
        worst_gap = max(worst_gap, result.distance_to(pair.u) - delta)
        checked += 1
    passed = checked > 0 and worst_gap <= 1e-6
    return passed, f"{checked} instance(s), largest excess distance {worst_gap:.3e}"


def check_uniqueness(sizes: BatterySizes, seed: int) -> tuple[bool, str]:
    """u agrees across restarts; the kink instance's multipliers do not."""
    cfg = SolverConfig(restarts=sizes.restarts)
    worst = 0.0
    for inst in _random_instances(sizes.uniqueness_instances, seed + 1, max_dim=4):
        worst = max(worst, multi_start(inst, cfg, seed).u_spread)
    kink_cfg = dataclasses.replace(cfg, restarts=max(sizes.restarts, 10))
    kink = multi_start(kink_multiplier(), kink_cfg, seed)
    passed = worst <= SPREAD_TOL and kink.lambda_spread >= MULTIPLIER_SPREAD_MIN
    return passed, f"u-spread {worst:.3e}; kink-multiplier lambda-spread {kink.lambda_spread:.3f}"


def check_stability(sizes: BatterySizes, seed: int) -> tuple[bool, str]:
    """Random load pairs satisfy the bound; the equality case attains it."""
    rng = make_rng(seed)
    cfg = SolverConfig()
    probes = ProbeSettings(samples=500, seed=seed)
    worst_ratio = 0.0
    for inst in _random_instances(sizes.stability_instances, seed + 2, max_dim=4):
        for _ in range(sizes.stability_pairs):
            f1 = inst.f + inst.scale * rng.standard_normal(inst.n)
            f2 = inst.f + inst.scale * rng.standard_normal(inst.n)
            result = stability_check(inst, f1, f2, cfg, probes)
            if not result.passed:
                return False, f"bound violated on {inst.name}: {result.lhs:.6g} > {result.rhs:.6g}"
            worst_ratio = max(worst_ratio, result.lhs / result.rhs if result.rhs > 0 else 0.0)

    eq = equality_case()
    tight = stability_check(eq, np.array([1.0, 2.0]), np.array([-0.5, 3.0]), cfg, probes)
    attained = abs(tight.lhs - tight.rhs) <= 1e-8 * tight.rhs
    detail = (
        f"largest lhs/rhs {worst_ratio:.4f}; "
        f"equality case {tight.lhs:.12g} vs {tight.rhs:.12g}"
    )
    return attained, detail


def check_convexity(sizes: BatterySizes, seed: int) -> tuple[bool, str]:
    """Segments between kink-instance solutions stay inside the solution set."""
    inst = kink_multiplier()
    report = multi_start(inst, SolverConfig(restarts=2 * sizes.convexity_pairs + 2), seed)
    solutions = sorted(report.solutions, key=lambda p: float(p.lam[0]))
    probes = ProbeSettings(samples=1000, seed=seed)
    worst = 0.0
    pairs = 0
    for i in range(min(sizes.convexity_pairs, len(solutions) // 2)):
        worst = max(worst, convexity_probe(inst, solutions[i], solutions[-1 - i], probes=probes))
        pairs += 1
    return pairs > 0 and worst <= CONVEXITY_TOL, f"{pairs} segment(s), worst residual {worst:.3e}"


def check_bounds(sizes: BatterySizes, seed: int) -> tuple[bool, str]:
    """A-priori bounds hold and sup-norms are stable across two f-ball draws."""
    gallery = ExampleGallery()
    instances = [gallery.get(name) for name in gallery.names()]
    instances += _random_instances(2, seed + 3, max_dim=3)
    for inst in instances:
        first = boundedness_probe(inst, 1.0, sizes.bound_samples, seed)
        second = boundedness_probe(inst, 1.0, sizes.bound_samples, seed + 1)
        if not (first.bounds_hold and second.bounds_hold):
            return False, f"a-priori bound violated on {inst.name}"
        sups = (first.sup_u, second.sup_u)
        if not all(np.isfinite(sups)) or abs(sups[0] - sups[1]) > 0.5 * max(max(sups), 1e-12):
            return False, f"sup |u| unstable on {inst.name}: {sups[0]:.4g} vs {sups[1]:.4g}"
    return True, f"{len(instances)} instances"


def check_calculus(sizes: BatterySizes, seed: int) -> tuple[bool, str]:
    """Clarke calculus rules on every gallery J and a random one."""
    gallery = ExampleGallery()
    kernels = [gallery.get(name).J for name in gallery.names()]
    kernels.append(random_instance(seed, 3, 1, 4).J)
    for J in kernels:
        check_clarke_calculus(J, sizes.calculus_samples, seed)
    return True, f"{len(kernels)} functionals x {sizes.calculus_samples} samples"


def check_infsup(sizes: BatterySizes, seed: int) -> tuple[bool, str]:
    """Inf-sup constant against an eigen-decomposition, plus its scaling law."""
    rng = make_rng(seed)
    for i in range(sizes.infsup_matrices):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(1, n + 1))
        if i % 4 == 3 and m > 1:
            B = rng.standard_normal((m, m - 1)) @ rng.standard_normal((m - 1, n))
            expected = 0.0
        else:
            B = rng.standard_normal((m, n))
            expected = float(np.sqrt(max(np.linalg.eigvalsh(B @ B.T)[0], 0.0)))
        value = infsup_constant(B)
        if abs(value - expected) > INFSUP_RTOL * max(expected, 1.0):
            return False, f"matrix {i}: {value:.17g} vs {expected:.17g}"
        c = float(rng.uniform(0.1, 10.0))
        if abs(infsup_constant(c * B) - c * value) > 1e-12 * max(c * value, 1.0):
            return False, f"matrix {i}: scaling by {c:g} breaks homogeneity"
    return True, f"{sizes.infsup_matrices} matrices"


def check_special_cases(sizes: BatterySizes, seed: int) -> tuple[bool, str]:
    """J = 0 against active-set enumeration, B = 0 against the inclusion solve."""
    linear = random_instance(seed, 3, 2)
    linear = dataclasses.replace(
        linear,
        J=PiecewiseC1Spec.zero(linear.k),
        h=HFunctionSpec.power(linear.A.sym_min_eigenvalue),
        name="random-linear",
    )
    kink = kink_multiplier()
    cases = [scalar_lcp(), linear, kink.with_b(np.zeros((kink.m, kink.n))).with_name("kink-free")]
    worst = 0.0
    for inst in cases:
        report = special_case_crosscheck(inst, seed=seed)
        if not report.passed(SPECIAL_CASE_TOL):
            return False, f"{inst.name} ({report.case.value}): deviation {report.deviation:.3e}"
        worst = max(worst, report.deviation)
    return True, f"{len(cases)} cases, worst deviation {worst:.3e}"


CHECKS: tuple[tuple[str, Check], ...] = (
    ("equivalence", check_equivalence),
    ("oracle", check_oracle),
    ("uniqueness", check_uniqueness),
    ("stability", check_stability),
    ("convexity", check_convexity),
    ("bounds", check_bounds),
    ("calculus", check_calculus),
    ("infsup", check_infsup),
    ("special-cases", check_special_cases),
)


def _run_check(name: str, check: Check, sizes: BatterySizes, seed: int) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, detail = check(sizes, seed)
        code = 0 if passed else 4
    except MvhviError as e:
        logger.warning(f"suite check {name} raised: {e}")
        passed, detail, code = False, str(e), e.exit_code
    elapsed = time.perf_counter() - start
    logger.info(f"suite check {name}: {'passed' if passed else 'FAILED'} in {elapsed:.1f}s")
    return CheckResult(name, passed, detail, elapsed, code)


def run_battery(full: bool = False, seed: int = 0, workers: int = 1) -> list[CheckResult]:
    sizes = FULL if full else REDUCED
    jobs = [(name, check) for name, check in CHECKS]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: _run_check(job[0], job[1], sizes, seed), jobs))
    return [_run_check(name, check, sizes, seed) for name, check in jobs]
