"""Independent checks of candidate equilibria.

Three best-response engines are provided. ``DualBisection`` solves the
player's concave program exactly through its own budget multiplier;
``GridRefine`` only evaluates utilities on a lattice (knapsack dynamic
programming, then local zooming) and shares no code with the solvers;
``ProjectedAscent`` is a plain projected-gradient fallback.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from ._roots import root_decreasing
from .model import (
    Allocation,
    Equilibrium,
    Family,
    GameSpec,
    ModelKind,
    RIDClass,
    SecGameError,
    VerificationReport,
    breach_probability,
    defence_gain,
    eval_eff,
    eval_eff_prime,
    inv_eff_prime,
    marginals,
    recover_duals,
    rid_class,
    utilities,
    make_equilibrium,
)
from .product import kkt_residual
from . import proportion as _prop

EPS_REL = 1e-4
KKT_TOL = 1e-6
_TINY_X = 1e-12


class NotFound(SecGameError, RuntimeError):
    """Brute-force search found no discrete epsilon-equilibrium."""


class Player(str, enum.Enum):
    ATTACKER = "Attacker"
    DEFENDER = "Defender"


class BRMethod(str, enum.Enum):
    GRID_REFINE = "GridRefine"
    PROJECTED_ASCENT = "ProjectedAscent"
    DUAL_BISECTION = "DualBisection"


@dataclass(frozen=True, eq=False)
class BestResponseResult:
    alloc: np.ndarray
    utility: float
    method: BRMethod


# ---------------------------------------------------------------- helpers

def _budget(spec: GameSpec, player: Player) -> float:
    return spec.budget_attacker if player is Player.ATTACKER else spec.budget_defender


def _price(spec: GameSpec, player: Player) -> float:
    return spec.cost_attacker if player is Player.ATTACKER else spec.cost_defender


def _caps(spec: GameSpec, player: Player, budget: float) -> np.ndarray:
    """Per-target upper bounds: budget, domain edge, and cost dominance.

    Spending more than ``w_i / price`` on a target is dominated by spending
    nothing there, since the stake of a target is at most ``w_i``.
    """
    w = spec.w
    cap = np.full(spec.n, float(budget))
    price = _price(spec, player)
    if price > 0:
        cap = np.minimum(cap, w / price)
    if spec.model is ModelKind.LINEAR:
        cap = np.minimum(cap, 1.0)
    if player is Player.DEFENDER and spec.defence_eff.domain_upper is not None:
        cap = np.minimum(cap, spec.defence_eff.domain_upper * (1.0 - 1e-9))
    return cap


def _alloc(player: Player, own: np.ndarray, opp: np.ndarray) -> Allocation:
    return Allocation(own, opp) if player is Player.ATTACKER else Allocation(opp, own)


def player_utility(spec: GameSpec, player: Player, own: np.ndarray, opp: np.ndarray) -> float:
    u_a, u_d = utilities(spec, _alloc(player, np.asarray(own, float), np.asarray(opp, float)))
    return u_a if player is Player.ATTACKER else u_d


def _target_values(spec: GameSpec, player: Player, i: int, own: np.ndarray, opp_i: float) -> np.ndarray:
    """Utility contribution of target ``i`` for each candidate own amount."""
    w = spec.weights[i]
    opp = np.full_like(own, opp_i)
    if player is Player.ATTACKER:
        p = breach_probability(spec, own, opp)
        return w * p - spec.cost_attacker * own
    p = breach_probability(spec, opp, own)
    return -w * p - spec.cost_defender * own


# ------------------------------------------------------ dual bisection path

def _attacker_reply(spec: GameSpec, w: float, y: float, price: float) -> float:
    if price <= 0:
        return math.inf
    if spec.model is ModelKind.PRODUCT:
        gt = eval_eff(spec.defence_eff, y)
        return 0.0 if gt <= 0 else inv_eff_prime(spec.attack_eff, price / (w * gt))
    g = defence_gain(spec.defence_eff, y)
    if g <= 0:
        # undefended contest target: any positive effort wins it
        return _TINY_X
    f = spec.attack_eff
    if f.family is Family.POWER and f.a == 1.0:
        return float(_prop.attacker_best_response_a1(np.array(w), np.array(g), price))

    def foc(x: float) -> float:
        return w * eval_eff_prime(f, x) * g / (eval_eff(f, x) + g) ** 2 - price

    f0 = foc(0.0)
    if f0 <= 0:
        return 0.0
    hi = 1.0
    while foc(hi) > 0:
        hi *= 2.0
    lo = 0.0 if math.isfinite(f0) else min(1e-300, hi)
    return brentq(foc, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=1000)


def _defender_reply(spec: GameSpec, w: float, x: float, price: float) -> float:
    if spec.model is ModelKind.PRODUCT:
        fx = eval_eff(spec.attack_eff, x)
        if fx <= 0:
            return 0.0
        if price <= 0:
            return math.inf
        return inv_eff_prime(spec.defence_eff, -price / (w * fx))
    return _prop._defender_reply(spec, w, x, price)


def _knapsack(marg: np.ndarray, caps: np.ndarray, budget: float) -> np.ndarray:
    """Exact maximiser of a separable linear objective over a capped simplex."""
    out = np.zeros_like(marg)
    left = budget
    for i in sorted(range(len(marg)), key=lambda j: (-marg[j], j)):
        if marg[i] <= 0 or left <= 0:
            break
        out[i] = min(caps[i], left)
        left -= out[i]
    return out


def _dual_bisection(spec: GameSpec, player: Player, opp: np.ndarray, budget: float) -> np.ndarray:
    w = spec.w
    if spec.model is ModelKind.LINEAR:
        gbar = 1.0 - spec.gamma
        if player is Player.ATTACKER:
            marg = w * (1.0 - gbar * opp) - spec.cost_attacker
        else:
            marg = w * opp * gbar - spec.cost_defender
        return _knapsack(marg, _caps(spec, player, budget), budget)

    reply = _attacker_reply if player is Player.ATTACKER else _defender_reply
    base = _price(spec, player)

    def demand_vec(mu: float) -> np.ndarray:
        return np.array([reply(spec, float(w[i]), float(opp[i]), base + mu) for i in range(spec.n)])

    mu = root_decreasing(lambda m: float(demand_vec(m).sum()), budget)
    z = demand_vec(mu)
    total = z.sum()
    if total > budget > 0:
        z *= budget / total
    return z


# ------------------------------------------------------ grid refine path

def _dp(values: Sequence[np.ndarray], units: int) -> tuple[float, list[int]]:
    """Max of ``sum_j values[j][k_j]`` subject to ``sum_j k_j <= units``."""
    best = np.full(units + 1, -np.inf)
    best[0] = 0.0
    choices = []
    for v in values:
        k_max = min(len(v) - 1, units)
        b = np.arange(units + 1)[:, None]
        k = np.arange(k_max + 1)[None, :]
        prev_idx = b - k
        valid = prev_idx >= 0
        cand = np.where(valid, v[: k_max + 1][None, :] + best[np.clip(prev_idx, 0, None)], -np.inf)
        arg = np.argmax(cand, axis=1)
        best = cand[np.arange(units + 1), arg]
        choices.append(arg)
    b_star = int(np.argmax(best))
    total = float(best[b_star])
    ks = []
    for arg in reversed(choices):
        k = int(arg[b_star])
        ks.append(k)
        b_star -= k
    return total, ks[::-1]


def _grid_refine(
    spec: GameSpec, player: Player, opp: np.ndarray, budget: float, resolution: int, rounds: int = 3
) -> np.ndarray:
    n = spec.n
    caps = _caps(spec, player, budget)
    step = budget / resolution
    lo = np.zeros(n)
    counts = [int(math.floor(caps[i] / step + 1e-9)) for i in range(n)]
    units = resolution
    z = np.zeros(n)
    for r in range(rounds + 1):
        vals = []
        for i in range(n):
            pts = lo[i] + step * np.arange(counts[i] + 1)
            vals.append(_target_values(spec, player, i, pts, float(opp[i])))
        _, ks = _dp(vals, units)
        z = lo + step * np.asarray(ks, dtype=float)
        if r == rounds:
            break
        new_step = step / 20.0
        lo = np.maximum(z - 2.0 * step, 0.0)
        hi = np.minimum(z + 2.0 * step, caps)
        counts = [int(math.floor((hi[i] - lo[i]) / new_step + 1e-9)) for i in range(n)]
        step = new_step
        units = int(math.floor((budget - lo.sum()) / step + 1e-9))
        units = max(0, min(units, sum(counts)))
    return z


# ------------------------------------------------------ projected ascent path

def _project(v: np.ndarray, caps: np.ndarray, budget: float) -> np.ndarray:
    z = np.clip(v, 0.0, caps)
    if z.sum() <= budget:
        return z
    tau = brentq(lambda t: np.clip(v - t, 0.0, caps).sum() - budget, 0.0, float(np.max(v)), xtol=1e-15)
    return np.clip(v - tau, 0.0, caps)


def _projected_ascent(
    spec: GameSpec, player: Player, opp: np.ndarray, budget: float, max_iter: int = 5000
) -> np.ndarray:
    caps = _caps(spec, player, budget)
    z = _project(np.full(spec.n, budget / spec.n), caps, budget)
    util = player_utility(spec, player, z, opp)
    step = 1.0
    for _ in range(max_iter):
        if player is Player.ATTACKER:
            grad = marginals(spec, np.maximum(z, 1e-15), opp)[0]
        else:
            grad = marginals(spec, opp, z)[1]
        grad = np.nan_to_num(grad, nan=0.0, posinf=1e6)
        while step > 1e-16:
            cand = _project(z + step * grad, caps, budget)
            u = player_utility(spec, player, cand, opp)
            if u >= util:
                break
            step *= 0.5
        moved = float(np.max(np.abs(cand - z)))
        if u < util:
            break
        z, util = cand, u
        step *= 2.0
        if moved < 1e-14:
            break
    return z


# ------------------------------------------------------ public API

def best_response(
    player: Player | str,
    fixed_opponent,
    spec: GameSpec,
    resolution: int = 400,
    *,
    method: BRMethod | str = BRMethod.DUAL_BISECTION,
    budget: float | None = None,
) -> BestResponseResult:
    """Utility-maximising allocation of ``player`` against a frozen opponent."""
    player = Player(player)
    method = BRMethod(method)
    opp = np.asarray(fixed_opponent, dtype=float)
    if opp.shape != (spec.n,):
        raise ValueError(f"opponent allocation must have length {spec.n}")
    budget = _budget(spec, player) if budget is None else float(budget)
    if budget <= 0:
        z = np.zeros(spec.n)
    elif method is BRMethod.DUAL_BISECTION:
        z = _dual_bisection(spec, player, opp, budget)
    elif method is BRMethod.GRID_REFINE:
        z = _grid_refine(spec, player, opp, budget, resolution)
    else:
        z = _projected_ascent(spec, player, opp, budget)
    return BestResponseResult(z, player_utility(spec, player, z, opp), method)


def _lemma_checks(spec: GameSpec, x: np.ndarray, y: np.ndarray, tol: float = 1e-9) -> list[tuple[str, bool, str]]:
    out: list[tuple[str, bool, str]] = []
    ka = int(np.count_nonzero(x > 0))
    kd = int(np.count_nonzero(y > 0))
    if spec.model is ModelKind.PRODUCT:
        prefix = bool(np.all(x[:ka] > 0) and np.all(y[:kd] > 0) and kd <= ka)
        out.append(("lemma2_prefix", prefix, f"K_A={ka}, K_D={kd}"))
        ok = bool(np.all(np.diff(y[:kd]) <= tol * (1 + np.abs(y[: kd - 1]))) if kd > 1 else True)
        mid = x[kd:ka]
        ok &= bool(np.all(np.diff(mid) <= tol * (1 + np.abs(mid[:-1])))) if len(mid) > 1 else True
        d = np.diff(x[:kd])
        if kd > 1:
            rid = rid_class(spec.defence_eff)
            scale = 1e-6 * (1 + np.abs(x[: kd - 1]))
            if rid is RIDClass.INCREASING:
                ok &= bool(np.all(d < tol))
            elif rid is RIDClass.CONSTANT:
                ok &= bool(np.all(np.abs(d) <= scale))
            else:
                ok &= bool(np.all(d > -tol))
        out.append(("lemma4_ordering", ok, f"x={x.tolist()}, y={y.tolist()}"))
    elif spec.model is ModelKind.LINEAR:
        out.append(("lemma5_support", ka - kd in (0, 1), f"K_A={ka}, K_D={kd}"))
    else:
        pos = bool(np.all(x > 1e-12) and np.all(y > 1e-12))
        out.append(("lemma6_positive", pos, f"min x={x.min():.3g}, min y={y.min():.3g}"))
        order = bool(np.all(np.diff(x) < 0) and np.all(np.diff(y) < 0))
        out.append(("lemma7_ordering", order, f"x={x.tolist()}, y={y.tolist()}"))
    return out


def epsilon_nash_check(
    spec: GameSpec,
    eq: Equilibrium | Allocation,
    *,
    eps_rel: float = EPS_REL,
    methods: Sequence[BRMethod | str] = (BRMethod.DUAL_BISECTION,),
    resolution: int = 400,
    kkt_tol: float = KKT_TOL,
    lemmas: bool = True,
) -> VerificationReport:
    """Best-response gains of both players plus the structural invariants."""
    if isinstance(eq, Allocation):
        lam, rho = recover_duals(spec, eq)
        eq = make_equilibrium(spec, eq.x, eq.y, lam, rho)
    x, y = eq.x, eq.y
    u_a, u_d = utilities(spec, eq.alloc)
    gain_a = gain_d = 0.0
    for m in methods:
        gain_a = max(gain_a, best_response(Player.ATTACKER, y, spec, resolution, method=m).utility - u_a)
        gain_d = max(gain_d, best_response(Player.DEFENDER, x, spec, resolution, method=m).utility - u_d)
    gain_a, gain_d = max(gain_a, 0.0), max(gain_d, 0.0)
    res = kkt_residual(spec, eq)
    checks = [
        ("feasible", eq.alloc.is_feasible(spec), f"sum x={x.sum():.6g}, sum y={y.sum():.6g}"),
        (
            "epsilon_nash",
            gain_a <= eps_rel * (1 + abs(u_a)) and gain_d <= eps_rel * (1 + abs(u_d)),
            f"gain_A={gain_a:.3g}, gain_D={gain_d:.3g}",
        ),
        ("kkt_residual", res <= kkt_tol, f"residual={res:.3g}"),
    ]
    if lemmas:
        checks += _lemma_checks(spec, x, y)
    return VerificationReport(gain_a, gain_d, res, checks)


def random_feasible_allocation(spec: GameSpec, rng: np.random.Generator) -> Allocation:
    def draw(player: Player) -> np.ndarray:
        budget = _budget(spec, player)
        caps = _caps(spec, player, budget)
        z = rng.dirichlet(np.ones(spec.n)) * budget * rng.uniform(0.2, 1.0)
        return np.minimum(z, caps * rng.uniform(0.1, 1.0, spec.n))

    return Allocation(draw(Player.ATTACKER), draw(Player.DEFENDER))


def best_response_dynamics(
    spec: GameSpec,
    start: Allocation,
    max_iters: int = 500,
    tol: float = 1e-9,
    *,
    damping: float = 0.5,
    method: BRMethod | str = BRMethod.DUAL_BISECTION,
) -> tuple[list[Allocation], bool]:
    """Damped alternating best responses.

    Each player moves a fraction ``damping`` of the way to its best reply;
    the fraction is halved whenever the step grows and recovers slowly while
    it shrinks. Undamped alternation can
    orbit the equilibrium forever. Converged when neither player's best
    reply differs from its current allocation by more than ``tol``.
    """
    x, y = start.x.copy(), start.y.copy()
    traj = [Allocation(x, y)]
    alpha = damping
    last = math.inf
    for _ in range(max_iters):
        bx = best_response(Player.ATTACKER, y, spec, method=method).alloc
        gap_x = float(np.max(np.abs(bx - x)))
        x = x + alpha * (bx - x)
        by = best_response(Player.DEFENDER, x, spec, method=method).alloc
        gap_y = float(np.max(np.abs(by - y)))
        if max(gap_x, gap_y) <= tol:
            traj.append(Allocation(x, y))
            return traj, True
        y = y + alpha * (by - y)
        traj.append(Allocation(x, y))
        step = max(gap_x, gap_y)
        if step > last:
            alpha = max(alpha * 0.5, 1e-3)
        else:
            alpha = min(alpha * 1.25, damping)
        last = step
    return traj, False


def uniqueness_probe(
    spec: GameSpec, starts: int = 10, seed: int = 0, tol: float = 1e-9, max_iters: int = 2000
) -> tuple[list[Allocation], float]:
    """Run damped dynamics from random starts; return end points and their max-norm spread."""
    rng = np.random.default_rng(seed)
    ends = []
    for _ in range(starts):
        traj, ok = best_response_dynamics(spec, random_feasible_allocation(spec, rng), max_iters, tol)
        if not ok:
            raise NotFound("best-response dynamics did not converge")
        ends.append(traj[-1])
    stack = np.array([np.concatenate([a.x, a.y]) for a in ends])
    spread = float(np.max(stack.max(axis=0) - stack.min(axis=0)))
    return ends, spread


# ------------------------------------------------------ brute force

def _profiles(lo: np.ndarray, hi: np.ndarray, step: float, budget: float) -> np.ndarray:
    """Lattice points of the box within the budget, plus their budget-face completions."""
    axes = [lo[i] + step * np.arange(int(math.floor((hi[i] - lo[i]) / step + 1e-9)) + 1) for i in range(len(lo))]
    pts = np.array(list(itertools.product(*axes)))
    pts = pts[pts.sum(axis=1) <= budget + 1e-12]
    extra = []
    for j in range(len(lo)):
        rest = pts.sum(axis=1) - pts[:, j]
        fill = budget - rest
        keep = (fill >= lo[j]) & (fill <= hi[j])
        cand = pts[keep].copy()
        cand[:, j] = fill[keep]
        extra.append(cand)
    allp = np.vstack([pts] + extra) if extra else pts
    allp = np.unique(np.round(allp, 15), axis=0)  # unique also sorts lexicographically
    return allp


def _payoff_tensors(spec: GameSpec, xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w = spec.w
    loss = np.zeros((len(xs), len(ys)))
    for i in range(spec.n):
        p = breach_probability(spec, xs[:, i][:, None], ys[:, i][None, :])
        loss += w[i] * p
    u_a = loss - spec.cost_attacker * xs.sum(axis=1)[:, None]
    u_d = -loss - spec.cost_defender * ys.sum(axis=1)[None, :]
    return u_a, u_d


def brute_force_ne(
    spec: GameSpec,
    grid_step: float = 1e-3,
    *,
    coarse_points: int | None = None,
    eps: float | None = None,
) -> Allocation:
    """Multi-resolution exhaustive search for a discrete epsilon-equilibrium.

    The first level is exhaustive over both (capped) budget simplices. Each
    later level halves the lattice step inside a box of two old steps around
    the incumbent, until the step reaches ``grid_step``. At every level the
    profile minimising the larger unilateral gain wins, earliest in
    lexicographic order on ties. The final profile must pass a grid best
    response check with gain at most ``eps``.
    """
    n = spec.n
    if n > 3:
        raise ValueError("brute force is limited to N <= 3")
    if grid_step < 1e-3:
        raise ValueError("grid_step must be at least 1e-3")
    if coarse_points is None:
        coarse_points = {1: 201, 2: 41, 3: 13}[n]
    X, Y = spec.budget_attacker, spec.budget_defender
    cap_x = _caps(spec, Player.ATTACKER, X)
    cap_y = _caps(spec, Player.DEFENDER, Y)
    step_x = max(float(cap_x.max()) / (coarse_points - 1), grid_step)
    step_y = max(float(cap_y.max()) / (coarse_points - 1), grid_step)
    lo_x, hi_x = np.zeros(n), cap_x.copy()
    lo_y, hi_y = np.zeros(n), cap_y.copy()
    while True:
        xs = _profiles(lo_x, hi_x, step_x, X)
        ys = _profiles(lo_y, hi_y, step_y, Y)
        u_a, u_d = _payoff_tensors(spec, xs, ys)
        gain = np.maximum(u_a.max(axis=0)[None, :] - u_a, u_d.max(axis=1)[:, None] - u_d)
        a, d = np.unravel_index(int(np.argmin(gain)), gain.shape)
        x, y = xs[a], ys[d]
        if step_x <= grid_step and step_y <= grid_step:
            break
        lo_x, hi_x = np.maximum(x - 2 * step_x, 0.0), np.minimum(x + 2 * step_x, cap_x)
        lo_y, hi_y = np.maximum(y - 2 * step_y, 0.0), np.minimum(y + 2 * step_y, cap_y)
        step_x, step_y = max(step_x / 2, grid_step), max(step_y / 2, grid_step)

    if eps is None:
        eps = 10.0 * grid_step * float(spec.w.max()) * n
    g_a = best_response(Player.ATTACKER, y, spec, method=BRMethod.GRID_REFINE).utility - player_utility(
        spec, Player.ATTACKER, x, y
    )
    g_d = best_response(Player.DEFENDER, x, spec, method=BRMethod.GRID_REFINE).utility - player_utility(
        spec, Player.DEFENDER, y, x
    )
    if max(g_a, g_d) > eps:
        raise NotFound(f"best discrete profile still has gain {max(g_a, g_d):.3g} > {eps:.3g}")
    return Allocation(x, y)


def random_deviation_check(
    spec: GameSpec, eq: Equilibrium, rng: np.random.Generator, samples: int = 50, eps_rel: float = EPS_REL
) -> tuple[str, bool, str]:
    """No random feasible unilateral deviation beats the profile by more than ``eps``."""
    u_a, u_d = eq.utility_attacker, eq.utility_defender
    worst_a = worst_d = -math.inf
    for _ in range(samples):
        alt = random_feasible_allocation(spec, rng)
        worst_a = max(worst_a, player_utility(spec, Player.ATTACKER, alt.x, eq.y) - u_a)
        worst_d = max(worst_d, player_utility(spec, Player.DEFENDER, alt.y, eq.x) - u_d)
    ok = worst_a <= eps_rel * (1 + abs(u_a)) and worst_d <= eps_rel * (1 + abs(u_d))
    return "random_deviations", ok, f"best random gain A={worst_a:.3g}, D={worst_d:.3g} over {samples} draws"
