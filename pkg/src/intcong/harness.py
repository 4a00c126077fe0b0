"""Randomized property harnesses behind the acceptance suite and the
``selftest`` command.

Every ``criterion_*`` function takes a seeded ``random.Random`` and a
``scale`` (1.0 = the full acceptance workload, 0 = smoke run) and returns a
:class:`CriterionResult`.  Nothing here loosens a check with the scale; only
the number of instances changes.
"""

from __future__ import annotations

import itertools
import random
import time
from math import gcd
from typing import Callable, NamedTuple

from . import abgroup, cochain, lattice, simplicial, solver
from .abgroup import FPGroup, Subgroup
from .cochain import FULL, INCREASING, FamilyCochain, FamilyComplex, RefinementMap, SubgroupFamily
from .intlin import lcm


class CriterionResult(NamedTuple):
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.seconds:.2f}s) {self.detail}"


def _count(full: int, scale: float, smoke: int = 2) -> int:
    if scale <= 0:
        return min(full, smoke)
    return max(1, round(full * scale))


def _timed(number: int, name: str, fn: Callable[[], tuple[bool, str]]) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, reported not raised
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(number, name, ok, detail, time.perf_counter() - t0)


def planted_instance(rng: random.Random, max_size: int = 6, pool: int = 60,
                     degrees=(1, 2, 3)) -> solver.CongruenceInstance:
    """``a = dy`` for random ``y``, then shifted by random multiples of the
    tuple gcds (which keeps it solvable)."""
    I = rng.sample(range(1, pool + 1), rng.randint(1, max_size))
    n = rng.choice(degrees)
    y = {s: rng.randint(-100, 100) for s in itertools.product(sorted(I), repeat=n)}
    a = solver.integer_coboundary(I, y, n)
    a = {t: v + rng.randint(-5, 5) * gcd(*t) for t, v in a.items()}
    return solver.CongruenceInstance(I, n, a)


def integer_family(indices) -> SubgroupFamily:
    Z = FPGroup.free(1)
    return SubgroupFamily(Z, {i: Subgroup(Z, [[i]]) for i in indices})


# 1
def criterion_1(rng: random.Random, scale: float = 1.0) -> CriterionResult:
    count = _count(200, scale)

    def run():
        for k in range(count):
            inst = planted_instance(rng)
            sol = solver.solve(inst)
            ok, bad = solver.verify(inst, sol)
            if not ok:
                return False, f"instance {k}: violations {bad[:3]}"
        return True, f"{count} planted instances solved and verified"
    return _timed(1, "sufficiency on planted instances", run)


# 2
def criterion_2(rng: random.Random, scale: float = 1.0) -> CriterionResult:
    subsets = [I for k in range(1, 6) for I in itertools.combinations(range(2, 13), k)]
    if scale < 1:
        subsets = rng.sample(subsets, _count(len(subsets), scale, smoke=5))

    def run():
        for I in subsets:
            C = FamilyComplex(integer_family(I), INCREASING, max_degree=3)
            for n in (1, 2):
                h = cochain.cohomology(C, n)
                if not h.is_trivial:
                    return False, f"H^{n} = {h} for I = {I}"
        return True, f"H^1 = H^2 = 0 for {len(subsets)} index sets"
    return _timed(2, "vanishing H^1, H^2 for families iZ", run)


# 3
def criterion_3(rng: random.Random, scale: float = 1.0) -> CriterionResult:
    n_cocycles = _count(200, scale)
    n_perturb = _count(50, scale)

    def run():
        for _ in range(n_cocycles):
            I = rng.sample(range(1, 61), rng.randint(1, 5))
            n = rng.choice((1, 2, 3))
            y = {s: rng.randint(-100, 100) for s in itertools.product(sorted(I), repeat=n)}
            inst = solver.CongruenceInstance(I, n, solver.integer_coboundary(I, y, n))
            ok, bad = solver.check_cocycle(inst)
            if not ok:
                return False, f"d(y) flagged at {bad[:3]}"
        found = 0
        attempts = 0
        while found < n_perturb:
            attempts += 1
            if attempts > 100 * n_perturb:
                return False, "could not generate enough non-cocycle perturbations"
            inst = planted_instance(rng, max_size=4, pool=30, degrees=(1, 2))
            targets = [t for t in inst.tuples(inst.degree + 1) if gcd(*t) > 1]
            if not targets:
                continue
            t = rng.choice(targets)
            g = gcd(*t)
            data = dict(inst.data)
            data[t] = data.get(t, 0) + rng.randint(1, g - 1)
            bumped = solver.CongruenceInstance(inst.indices, inst.degree, data)
            # independent route: the subgroup-family complex over Z
            C = FamilyComplex(integer_family(bumped.indices), FULL, max_degree=bumped.degree + 1)
            a = FamilyCochain(bumped.degree, {s: (v,) for s, v in bumped.data.items()})
            indep_ok, indep_bad = cochain.is_cocycle(C, a)
            if indep_ok:
                continue  # the perturbation happened to stay a cocycle
            found += 1
            ok, bad = solver.check_cocycle(bumped)
            if ok:
                return False, f"perturbation at {t} not detected"
            if set(bad) != set(indep_bad):
                return False, "witness sets differ between the two routes"
            for w in bad:
                if gcd(*w) == 1 or solver.alternating_sum(bumped.data, w) % gcd(*w) == 0:
                    return False, f"bogus witness {w}"
        return True, f"{n_cocycles} coboundaries accepted, {n_perturb} perturbations rejected with correct witnesses"
    return _timed(3, "necessity and witnesses", run)


def small_index_sets(max_size: int = 3, max_lcm: int = 12) -> list[tuple[int, ...]]:
    return [I for k in range(1, max_size + 1) for I in itertools.combinations(range(1, max_lcm + 1), k)
            if lcm(*I) <= max_lcm]


def _data_space(I, n):
    tuples = list(itertools.product(I, repeat=n + 1))
    return tuples, [gcd(*t) for t in tuples]


# 4
def criterion_4(rng: random.Random, scale: float = 1.0) -> CriterionResult:
    per_set = _count(48, scale, smoke=2)

    def run():
        total = 0
        for I in small_index_sets():
            tuples, moduli = _data_space(I, 1)
            space = 1
            for m in moduli:
                space *= m
            if space <= per_set:
                datas = itertools.product(*(range(m) for m in moduli))
            else:
                datas = []
                for k in range(per_set):
                    if k % 2:
                        y = {(i,): rng.randrange(lcm(*I)) for i in I}
                        planted = solver.integer_coboundary(I, y, 1)
                        datas.append([planted[t] % m for t, m in zip(tuples, moduli)])
                    else:
                        datas.append([rng.randrange(m) for m in moduli])
            for vals in datas:
                inst = solver.CongruenceInstance(I, 1, dict(zip(tuples, vals)))
                try:
                    solver.brute_force_solve(inst)
                    brute = True
                except solver.Unsolvable:
                    brute = False
                try:
                    solver.solve(inst)
                    fast = True
                except solver.CocycleViolation:
                    fast = False
                total += 1
                if brute != fast:
                    return False, f"disagreement on I={I}, a={dict(zip(tuples, vals))}"
        return True, f"{total} instances agree"
    return _timed(4, "agreement with exhaustive search", run)


# 5
def criterion_5(rng: random.Random, scale: float = 1.0) -> CriterionResult:
    def run():
        t0 = time.perf_counter()
        rep = lattice.counterexample_h1(lattice.generic_lines(3, 4))
        dt = time.perf_counter() - t0
        ok = (rep.h1 == abgroup.Invariants(1, ()) and rep.is_cocycle and rep.unsolvable
              and rep.full_mode_is_cocycle and rep.full_mode_unsolvable)
        detail = f"H^1 = {rep.h1}, cocycle={rep.is_cocycle}, unsolvable={rep.unsolvable}"
        if dt > 1.0:
            return False, detail + ", over the 1 s budget"
        return ok, detail
    return _timed(5, "four lines: nonzero H^1 and an unsolvable cocycle", run)


def random_chain_family(rng: random.Random) -> SubgroupFamily:
    """A descending chain of subgroups of Z/m + Z/k."""
    m, k = rng.randint(2, 12), rng.randint(1, 12)
    G = FPGroup(2, [[m, 0], [0, k]])
    gens = [(rng.randrange(m), rng.randrange(k)) for _ in range(rng.randint(1, 3))]
    chain = []
    current = Subgroup(G, gens + [(1, 0), (0, 1)])
    for _ in range(rng.randint(2, 4)):
        chain.append(current)
        c = rng.choice((2, 3, 1))
        current = Subgroup(G, [tuple(c * x for x in g) for g in current.canonical().generators])
    rng.shuffle(chain)
    return SubgroupFamily(G, chain)


def random_integer_family(rng: random.Random) -> SubgroupFamily:
    return integer_family(rng.sample(range(1, 61), rng.randint(2, 4)))


# 6
def criterion_6(rng: random.Random, scale: float = 1.0) -> CriterionResult:
    count = _count(50, scale)

    def run():
        for k in range(count):
            fam = random_chain_family(rng) if k % 2 == 0 else random_integer_family(rng)
            rep = lattice.theorem4_harness(fam, nmax=2)
            if not rep.holds:
                return False, f"family {k}: cohomology {rep.cohomology}"
        four = lattice.close(lattice.generic_lines(3, 4).family(), strict=False, max_rounds=1)
        drep = lattice.is_distributive(four)
        if drep.distributive:
            return False, "four lines reported distributive"
        return True, f"{count} distributive families with H^1 = H^2 = 0; four lines non-distributive"
    return _timed(6, "distributive families have vanishing cohomology", run)


def random_refinement_pair(rng: random.Random, mode: str):
    """Source family ``A``, target ``B_j`` containing ``A_{tau j} + A_{sigma j}``."""
    if rng.random() < 0.5:
        src = integer_family(rng.sample(range(1, 31), rng.randint(1, 3)))
    else:
        src = random_chain_family(rng)
    G = src.ambient
    labels = list(src.labels)
    J = [f"j{k}" for k in range(rng.randint(1, 3))]
    tau = {j: rng.choice(labels) for j in J}
    sigma = {j: rng.choice(labels) for j in J}
    members = {}
    for j in J:
        extra = [tuple(rng.randint(-3, 3) for _ in range(G.rank))] if rng.random() < 0.5 else []
        members[j] = Subgroup(G, src[tau[j]].generators + src[sigma[j]].generators + tuple(extra))
    S = FamilyComplex(src, mode, max_degree=3)
    T = FamilyComplex(SubgroupFamily(G, members, J), mode, max_degree=3)
    return RefinementMap(S, T, tau), RefinementMap(S, T, sigma)


def random_cochain(rng: random.Random, C: FamilyComplex, n: int) -> FamilyCochain:
    return FamilyCochain(n, {t: tuple(rng.randint(-20, 20) for _ in range(C.rank)) for t in C.tuples(n)})


def duplicated_family(rng: random.Random) -> SubgroupFamily:
    G = FPGroup.free(1)
    base = rng.sample(range(2, 13), rng.randint(1, 2))
    picks = [rng.choice(base) for _ in range(rng.randint(1, 2))] + base
    rng.shuffle(picks)
    return SubgroupFamily(G, [Subgroup(G, [[m]]) for m in picks])


# 7
def criterion_7(rng: random.Random, scale: float = 1.0) -> CriterionResult:
    count = _count(50, scale)

    def run():
        for k in range(count):
            mode = (FULL, INCREASING)[k % 2]
            if k % 5 == 4:
                C = FamilyComplex(duplicated_family(rng), mode, max_degree=3)
                C_J, pi, iota = cochain.tautological(C)
                r_id = RefinementMap(C, C, {i: i for i in C.family.labels})
                r_loop = iota.compose(pi)  # i -> iota(pi(i))
                pairs = [(r_id, r_loop)]
                for n in (1, 2):
                    if cochain.cohomology(C, n) != cochain.cohomology(C_J, n):
                        return False, f"tautological family changes H^{n}"
                # iota o pi on J indices is the identity: pi then iota induces id on C(J)
                f = random_cochain(rng, C_J, 1)
                back = cochain.induced_map(iota, cochain.induced_map(pi, f))
                if not C_J.equal(back, f):
                    return False, "iota* pi* is not the identity on C(J)"
            else:
                pairs = [random_refinement_pair(rng, mode)]
            for r_tau, r_sigma in pairs:
                for n in (0, 1, 2):
                    f = random_cochain(rng, r_tau.source, n)
                    bad = cochain.homotopy_defects(r_tau, r_sigma, f)
                    if bad:
                        return False, f"pair {k}, degree {n}: defects at {bad[:3]}"
        return True, f"dh + hd = sigma - tau on {count} refinement pairs"
    return _timed(7, "refinement homotopy", run)


def _contraction_failure(s: tuple):
    """First ``t`` in the carrier of ``s`` where the augmented cone
    contraction fails ``d k + k d = id``, or None."""
    k = len(s) - 1
    for j in range(0, k + 1):
        for f in itertools.product(range(k + 1), repeat=j + 1):
            t = tuple(s[i] for i in f)
            lhs = simplicial.boundary(simplicial.carrier_contraction(s, {t: 1}))
            if j == 0:
                lhs.add(simplicial.carrier_contraction(s, simplicial.augmentation({t: 1})))
            else:
                lhs.add(simplicial.carrier_contraction(s, simplicial.boundary({t: 1})))
            if lhs != {t: 1}:
                return t
    return None


def _check_chain_identities(rng: random.Random, scale: float) -> tuple[bool, str]:
    patterns = set()
    tri = simplicial.SimplicialComplex.full("abc")
    tet = simplicial.SimplicialComplex.full("abcd")
    for K in (tri, tet):
        for k in range(0, 4):
            for s in simplicial.enumerate_simplices(K, k):
                if k >= 2 and simplicial.boundary(simplicial.boundary({s: 1})):
                    return False, f"dd != 0 at {s}"
                if k == 1 and simplicial.augmentation(simplicial.boundary({s: 1})):
                    return False, f"augmentation of a boundary at {s}"
                # natural under renaming vertices: one s per vertex pattern
                pattern = tuple(s.index(v) for v in s)
                if pattern not in patterns:
                    patterns.add(pattern)
                    bad = _contraction_failure(s)
                    if bad is not None:
                        return False, f"cone contraction fails on {bad} in carrier of {s}"
                # dh + hd == phi
                lhs = simplicial.boundary(simplicial.homotopy(s, K.key)) if k >= 0 else simplicial.Chain()
                if k >= 1:
                    for t, c in simplicial.boundary({s: 1}).items():
                        lhs.add(simplicial.homotopy(t, K.key), c)
                if lhs != simplicial.phi(s, K.key):
                    return False, f"dh + hd != phi at {s}"
    n_random = _count(20, scale)
    for V in (simplicial.ConstantSystem(FPGroup.free(1)), simplicial.ConstantSystem(FPGroup.cyclic(6))):
        C = simplicial.SystemComplex(tri, V, max_degree=3)
        for _ in range(n_random):
            q = rng.choice((1, 2))
            c = simplicial.SysCochain(q, {s: (rng.randint(-9, 9),) for s in C.simplices(q)})
            p = simplicial.alternating_project(C, c)
            if simplicial.alternation_violations(C, p):
                return False, "projection is not alternating"
            if not C.equal(simplicial.alternating_project(C, p), p):
                return False, "projection is not idempotent"
            a = C.d(simplicial.h_prime(C, c))
            b = simplicial.h_prime(C, C.d(c))
            tot = simplicial.SysCochain(q, {s: tuple(x + y for x, y in zip(C.get(a, s), C.get(b, s)))
                                            for s in C.simplices(q)})
            if not C.equal(tot, simplicial.phi_prime(C, c)):
                return False, "dh' + h'd != phi'"
    circle = simplicial.SimplicialComplex.simplex_boundary("abc")
    for K in (tri, circle):
        for G in (FPGroup.free(1), FPGroup.cyclic(6)):
            V = simplicial.ConstantSystem(G)
            for n in (0, 1, 2):
                if not simplicial.quasi_iso_check(K, V, n):
                    return False, f"quasi-isomorphism fails in degree {n}"
    h1 = simplicial.SystemComplex(circle, simplicial.ConstantSystem(FPGroup.free(1)), max_degree=2).cohomology(1)
    h1_alt = simplicial.SystemComplex(circle, simplicial.ConstantSystem(FPGroup.free(1)), True,
                                      max_degree=2).cohomology(1)
    if h1.free_rank != 1 or h1_alt.free_rank != 1:
        return False, f"circle H^1 = {h1} / {h1_alt}"
    return True, "chain identities, carrier contraction, homotopy, projector and quasi-isomorphism"


# 8
def criterion_8(rng: random.Random, scale: float = 1.0) -> CriterionResult:
    return _timed(8, "singular chain identities", lambda: _check_chain_identities(rng, scale))


def random_cyclic_family(rng: random.Random) -> list[FPGroup]:
    return [FPGroup.cyclic(rng.randint(1, 60)) for _ in range(rng.randint(1, 5))]


# 9
def criterion_9(rng: random.Random, scale: float = 1.0) -> CriterionResult:
    n_fam = _count(20, scale)
    n_sat = _count(100, scale)

    def run():
        for _ in range(n_fam):
            fam = random_cyclic_family(rng)
            for p in (2, 3, 5):
                if not abgroup.product_localization_check(fam, p):
                    return False, f"localization of {fam} at {p} does not split"
        for _ in range(n_sat):
            m = rng.randint(1, 10 ** 6)
            p = rng.choice((2, 3, 5, 7))
            s = solver.saturate(m, p)
            if solver.saturate(s, p) != s or m % s or (m // s) % p == 0 or abgroup.vp(s, p) != abgroup.vp(m, p):
                return False, f"saturation fails for m={m}, p={p}"
        groups = [FPGroup(2, [[a, 0], [0, b]]) for a, b in ((6, 1), (4, 6), (2, 9), (12, 10))]
        for G in groups:
            m, k = G.relations[0, 0], G.relations[1, 1]
            for e in itertools.product(range(m), range(k)):
                order = next(q for q in range(1, m * k + 1) if (q * e[0]) % m == 0 and (q * e[1]) % k == 0)
                for p in (2, 3, 5):
                    if abgroup.localization_kernel(G, e, p) != (order % p != 0):
                        return False, f"kernel test wrong for {e} in {G} at {p}"
        if abgroup.localization_kernel(FPGroup.free(1), (1,), 2):
            return False, "infinite-order element reported in the kernel"
        return True, f"{n_fam} product checks, {n_sat} saturations, enumerated kernels"
    return _timed(9, "localization lemmas", run)


def planted_local_instance(rng: random.Random, p: int = None) -> tuple[solver.LocalInstance, dict]:
    p = p or rng.choice((2, 3))
    N = rng.randint(1, 5)
    n = rng.randint(1, 3)
    vals = sorted(rng.randint(0, 3) for _ in range(N))
    x_star = {t: rng.randint(-50, 50) for t in itertools.combinations(range(1, N + 1), n)}
    li = solver.LocalInstance(p, n, vals)
    data = {}
    for t in li.tuples(n + 1):
        v = solver.alternating_sum(x_star, t) % li.modulus(t)
        if v:
            data[t] = v
    li.data = data
    return li, x_star


# 10
def criterion_10(rng: random.Random, scale: float = 1.0) -> CriterionResult:
    count = _count(100, scale)

    def run():
        for k in range(count):
            li, _ = planted_local_instance(rng)
            x = solver.local_solve(li)
            bad = solver.local_violations(li, x)
            if bad:
                return False, f"instance {k}: violations {bad[:3]}"
            if li.degree == 1:
                for i in range(1, li.N + 1):
                    if x[(i,)] != sum(li.data.get((m, m + 1), 0) for m in range(1, i)):
                        return False, f"instance {k}: not the prefix sums"
        return True, f"{count} planted local instances solved"
    return _timed(10, "local induction", run)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(seed: int = 0, scale: float = 1.0) -> list[CriterionResult]:
    return [crit(random.Random(f"{seed}:{k}"), scale) for k, crit in enumerate(CRITERIA, start=1)]
