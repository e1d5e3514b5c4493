"""Ray and zero level sets of torus momentum maps, and their frames.

Sampling is moduli-first: J depends only on t_j = |z_j|^2, so the level
set is a polytope in t (a slice of the simplex) crossed with phases.
Coordinates that vanish identically on the polytope are detected by
linear programming and turned into linear constraints z_j = 0; this is
what keeps level sets like {z_0 = 0} regular even though the defining
quadratic |z_0|^2 is critical there.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import tolerances
from .actions import KernelAlgebra, MomentumCovector, kernel_algebra, local_freeness
from .errors import (
    DegenerateAction,
    EmptyFrame,
    EmptyLevelSet,
    FrameInconsistent,
    NoConvergence,
    WrongRay,
)
from .geometry import Geometry
from .manifolds import EmbeddedManifold, LinearConstraint, ModuliConstraint, SphereConstraint
from .tensor_kernel import AmbientPoint, Frame, gram_schmidt
from .jets import value
from .vecops import as_list, vvalue


@dataclass(frozen=True)
class LevelSetSample:
    """A point of the level set with its ray parameter."""

    point: AmbientPoint
    s: float

    def coords(self):
        return self.point.as_list()


@dataclass
class ModuliPolytope:
    """Feasibility data for {t >= 0, sum t = 1, rows . t = 0 (, c . t > 0)}."""

    n: int
    rows: np.ndarray          # zero-constraint rows on moduli
    ray_coeff: np.ndarray | None  # c with s(t) = c . t, None in zero mode
    support: list             # coordinates not identically zero
    fixed_zero: list          # coordinates identically zero on the polytope
    interior: np.ndarray      # an interior point, full length n
    null_basis: np.ndarray    # directions spanning the polytope's affine hull
    kept_rows: np.ndarray     # independent, support-restricted constraint rows


_S_FLOOR = 1e-8


def _lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None):
    return linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                   bounds=bounds, method="highs")


def analyze_moduli(n, rows, ray_coeff=None):
    """Support detection and interior point of the moduli polytope."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float)) if len(rows) else np.zeros((0, n))
    A_eq = np.vstack([np.ones((1, n)), rows])
    b_eq = np.zeros(len(A_eq))
    b_eq[0] = 1.0
    A_ub = b_ub = None
    if ray_coeff is not None:
        A_ub = -np.asarray(ray_coeff, dtype=float).reshape(1, n)
        b_ub = np.asarray([-_S_FLOOR])

    probe = _lp(np.zeros(n), A_ub, b_ub, A_eq, b_eq, [(0, None)] * n)
    if not probe.success:
        raise EmptyLevelSet(
            "moduli polytope infeasible", certificate={"status": probe.status, "message": probe.message}
        )

    support, fixed_zero = [], []
    for j in range(n):
        c = np.zeros(n)
        c[j] = -1.0
        res = _lp(c, A_ub, b_ub, A_eq, b_eq, [(0, None)] * n)
        if res.success and -res.fun > 1e-9:
            support.append(j)
        else:
            fixed_zero.append(j)

    ns = len(support)
    rows_s = rows[:, support] if rows.size else np.zeros((0, ns))
    kept = []
    rank = 0
    for r in rows_s:
        if np.linalg.norm(r) < 1e-12:
            continue
        cand = np.vstack(kept + [r]) if kept else r.reshape(1, -1)
        new_rank = int(np.linalg.matrix_rank(cand, tol=1e-11))
        if new_rank > rank:
            kept.append(r)
            rank = new_rank
    kept = np.vstack(kept) if kept else np.zeros((0, ns))

    # interior point: maximize the smallest margin delta
    nv = ns + 1
    A_eq_s = np.hstack([np.vstack([np.ones((1, ns)), kept]), np.zeros((1 + len(kept), 1))])
    b_eq_s = np.zeros(len(A_eq_s))
    b_eq_s[0] = 1.0
    ineq, rhs = [], []
    for j in range(ns):
        row = np.zeros(nv)
        row[j] = -1.0
        row[-1] = 1.0
        ineq.append(row)          # delta - t_j <= 0
        rhs.append(0.0)
    if ray_coeff is not None:
        c_s = np.asarray(ray_coeff, dtype=float)[support]
        row = np.zeros(nv)
        row[:ns] = -c_s
        row[-1] = 1.0
        ineq.append(row)          # delta - c.t <= 0
        rhs.append(0.0)
    obj = np.zeros(nv)
    obj[-1] = -1.0
    res = _lp(obj, np.vstack(ineq), np.asarray(rhs), A_eq_s, b_eq_s,
              [(0, None)] * ns + [(0, 1.0)])
    if not res.success:
        raise EmptyLevelSet(
            "no interior point in the moduli polytope",
            certificate={"status": res.status, "message": res.message},
        )
    x_s = res.x[:ns]

    eqs = np.vstack([np.ones((1, ns)), kept])
    _, sv, vt = np.linalg.svd(eqs)
    r = int(np.sum(sv > 1e-11 * max(1.0, sv[0])))
    null = vt[r:]

    interior = np.zeros(n)
    interior[support] = x_s
    return ModuliPolytope(
        n=n,
        rows=rows,
        ray_coeff=None if ray_coeff is None else np.asarray(ray_coeff, dtype=float),
        support=support,
        fixed_zero=fixed_zero,
        interior=interior,
        null_basis=null,
        kept_rows=kept,
    )


def _hit_and_run(poly, rng, steps=32):
    """Interior-weighted walk on the support polytope (Beta(2,2) mix)."""
    ns = len(poly.support)
    x = poly.interior[poly.support].copy()
    if poly.null_basis.shape[0] == 0:
        return x
    c_s = None
    if poly.ray_coeff is not None:
        c_s = poly.ray_coeff[poly.support]
    for _ in range(steps):
        d = poly.null_basis.T @ rng.standard_normal(poly.null_basis.shape[0])
        nrm = np.linalg.norm(d)
        if nrm < 1e-14:
            continue
        d /= nrm
        lo, hi = -np.inf, np.inf
        for a, b in _segment_ineqs(ns, c_s):
            ad = float(a @ d)
            gap = float(b - a @ x)
            if abs(ad) < 1e-14:
                continue
            lam = gap / ad
            if ad > 0:
                hi = min(hi, lam)
            else:
                lo = max(lo, lam)
        if not np.isfinite(lo) or not np.isfinite(hi) or hi <= lo:
            continue
        x = x + (lo + (hi - lo) * rng.beta(2.0, 2.0)) * d
    return x


def _segment_ineqs(ns, c_s):
    # a . t <= b form: -t_j <= 0 and (ray) -c.t <= -floor
    for j in range(ns):
        a = np.zeros(ns)
        a[j] = -1.0
        yield a, 0.0
    if c_s is not None:
        yield -c_s, -_S_FLOOR


def sample_moduli(poly, count, seed):
    """Deterministic batch of moduli vectors (full length n)."""
    out = []
    children = np.random.SeedSequence(seed).spawn(count)
    for i in range(count):
        rng = np.random.default_rng(children[i])
        x_s = _hit_and_run(poly, rng)
        t = np.zeros(poly.n)
        t[poly.support] = np.maximum(x_s, 0.0)
        t /= t.sum()
        out.append((t, rng))
    return out


def _assemble_point(t, rng):
    n = len(t)
    coords = np.zeros(2 * n)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    for j in range(n):
        r = math.sqrt(t[j])
        coords[2 * j] = r * math.cos(theta[j])
        coords[2 * j + 1] = r * math.sin(theta[j])
    coords /= np.linalg.norm(coords)
    return coords


def sample_level_set(action, mu, count, seed, structure=None):
    """Samples of J^{-1}(R_+ mu), deterministic in (action, mu, count, seed)."""
    mu = mu if isinstance(mu, MomentumCovector) else MomentumCovector.of(mu)
    kern = kernel_algebra(mu)
    rows = kern.matrix @ action.matrix if kern.k else np.zeros((0, action.n))
    ray_coeff = action.matrix.T @ np.asarray(mu.unit)
    poly = analyze_moduli(action.n, rows, ray_coeff)
    samples = []
    tol = tolerances.DEFAULTS["level_set_residual"]
    for t, rng in sample_moduli(poly, count, seed):
        coords = _assemble_point(t, rng)
        j_val = np.asarray(action.momentum(list(coords)))
        s = float(j_val @ np.asarray(mu.unit))
        resid = float(np.linalg.norm(j_val - s * np.asarray(mu.unit)))
        if resid > tol or s <= tolerances.DEFAULTS["newton_min_s"]:
            raise FrameInconsistent(
                f"sampled point misses the ray: residual {resid:.3e}, s {s:.3e}"
            )
        samples.append(LevelSetSample(AmbientPoint.of(coords), s))
    return samples


def sample_zero_level(action, rows, count, seed):
    """Samples of the joint zero level of the momenta of the given
    subalgebra rows (used by zero reduction and the cone suite)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    mom_rows = rows @ action.matrix
    poly = analyze_moduli(action.n, mom_rows, None)
    out = []
    for t, rng in sample_moduli(poly, count, seed):
        coords = _assemble_point(t, rng)
        out.append(AmbientPoint.of(coords))
    return out


def newton_project(action, mu, q, tol=None, max_iter=None):
    """Gauss-Newton projection onto {|z| = 1, J(z) = s mu_unit, s > 0}."""
    mu = mu if isinstance(mu, MomentumCovector) else MomentumCovector.of(mu)
    tol = tolerances.DEFAULTS["newton_tol"] if tol is None else tol
    max_iter = tolerances.DEFAULTS["newton_max_iter"] if max_iter is None else max_iter
    unit = np.asarray(mu.unit)
    z = np.asarray(as_list(q), dtype=float)
    s = float(np.asarray(action.momentum(list(z))) @ unit)
    for _ in range(max_iter):
        j_val = np.asarray(action.momentum(list(z)))
        F = np.concatenate([[z @ z - 1.0], j_val - s * unit])
        if float(np.max(np.abs(F))) < tol:
            if s <= tolerances.DEFAULTS["newton_min_s"]:
                raise WrongRay(f"converged with ray parameter s = {s:.3e}")
            return LevelSetSample(AmbientPoint.of(z), s)
        jac = np.zeros((1 + action.d, len(z) + 1))
        jac[0, :-1] = 2.0 * z
        jac[1:, :-1] = action.momentum_jacobian(list(z))
        jac[1:, -1] = -unit
        step, *_ = np.linalg.lstsq(jac, -F, rcond=None)
        z = z + step[:-1]
        s = s + float(step[-1])
    raise NoConvergence(f"no convergence after {max_iter} iterations")


def transversality_check(action, mu, sample):
    """Rank test of [dJ(tangent frame) | mu_unit] at the sample."""
    mu = mu if isinstance(mu, MomentumCovector) else MomentumCovector.of(mu)
    p = sample.coords() if isinstance(sample, LevelSetSample) else as_list(sample)
    from .manifolds import Sphere

    frame = Sphere(len(p)).tangent_basis(p)
    dj = action.momentum_jacobian(p) @ frame.T
    M = np.hstack([dj, np.asarray(mu.unit).reshape(-1, 1)])
    svals = np.linalg.svd(M, compute_uv=False)
    ok = bool(svals[-1] > tolerances.DEFAULTS["rank_singular_value"])
    return ok, [float(s) for s in svals]


# ----------------------------------------------------------------------
# reduction setups: ray mode and zero mode share everything downstream
# ----------------------------------------------------------------------


class ReductionSetup:
    """Level-set geometry plus the acting subalgebra of the quotient.

    mode "ray":  level set J^{-1}(R_+ mu), acting algebra ker(mu).
    mode "zero": joint zero level of the momenta of `rows`, acting
                 algebra spanned by those same rows.
    """

    def __init__(self, structure, action, mu=None, zero_rows=None):
        if (mu is None) == (zero_rows is None):
            raise ValueError("give exactly one of mu / zero_rows")
        self.structure = structure
        self.action = action
        if mu is not None:
            self.mode = "ray"
            self.mu = mu if isinstance(mu, MomentumCovector) else MomentumCovector.of(mu)
            self.kernel = kernel_algebra(self.mu)
            self.acting_rows = self.kernel.matrix
        else:
            self.mode = "zero"
            self.mu = None
            rows = np.atleast_2d(np.asarray(zero_rows, dtype=float))
            self.kernel = KernelAlgebra(None, tuple(tuple(float(x) for x in r) for r in rows))
            self.acting_rows = rows
        mom_rows = (
            self.acting_rows @ action.matrix
            if len(self.acting_rows)
            else np.zeros((0, action.n))
        )
        ray_coeff = (
            action.matrix.T @ np.asarray(self.mu.unit) if self.mode == "ray" else None
        )
        self.polytope = analyze_moduli(action.n, mom_rows, ray_coeff)
        self.manifold = self._build_manifold(mom_rows)
        self.geometry = Geometry(self.manifold, structure.metric)

    def _build_manifold(self, mom_rows):
        cons = [SphereConstraint()]
        for j in self.polytope.fixed_zero:
            for off in (0, 1):
                e = np.zeros(2 * self.action.n)
                e[2 * j + off] = 1.0
                cons.append(LinearConstraint(e))
        for r in self.polytope.kept_rows:
            full = np.zeros(self.action.n)
            full[self.polytope.support] = r
            cons.append(ModuliConstraint(full))
        return EmbeddedManifold(2 * self.action.n, cons)

    # -- sampling ------------------------------------------------------

    def samples(self, count, seed):
        if self.mode == "ray":
            return sample_level_set(self.action, self.mu, count, seed)
        pts = sample_zero_level(self.action, self.acting_rows, count, seed)
        return [LevelSetSample(p, 0.0) for p in pts]

    # -- per-sample hypothesis data -------------------------------------

    def hypothesis_report(self, sample):
        ok_slice, slice_info = _slice(self)
        trans_ok, svals = (
            transversality_check(self.action, self.mu, sample)
            if self.mode == "ray"
            else (True, [])
        )
        rank, degenerate, fsvals = local_freeness(self.action, self.kernel, sample.coords())
        return {
            "slice_condition": ok_slice,
            "slice_info": slice_info,
            "transversal": trans_ok,
            "transversality_svals": svals,
            "freeness_rank": rank,
            "freeness_expected": self.kernel.k,
            "freeness_degenerate": degenerate,
            "freeness_svals": fsvals,
        }


def _slice(setup):
    from .actions import slice_condition

    if setup.mode == "ray":
        return slice_condition(setup.mu)
    return True, {"note": "zero reduction: ker 0 = g"}


def quotient_dimension(dim_m, d, k):
    """Level-set dimension dim_m - (d - 1), minus the orbit dimension k."""
    return dim_m - (d - 1) - k


def printed_remark_dimension(n, d, m, k):
    """The 2n - d - m - k + 1 bookkeeping value, reported for comparison
    (it overcounts by one on every toric example; see the run reports)."""
    return 2 * n - d - m - k + 1


@dataclass
class ReductionFrame:
    """Concrete orthogonal splitting at a level-set sample."""

    sample: LevelSetSample
    vertical: Frame
    reeb: tuple
    contact_d: Frame
    normal: Frame
    vertical_rows: np.ndarray       # algebra rows whose fields stay independent
    dims: dict
    checks: dict

    @property
    def horizontal(self):
        """contactD followed by the Reeb direction."""
        return [list(v) for v in self.contact_d.vectors] + [list(self.reeb)]


def build_frame(setup, sample, strict=True):
    """Vertical / Reeb / contact-horizontal / normal splitting at a sample."""
    p = sample.coords()
    S = setup.structure
    g = S.metric.g
    man = setup.manifold
    tol = tolerances.DEFAULTS["frame_orthogonality"]

    rows = setup.acting_rows
    vert_vecs = [vvalue(setup.action.fundamental_field(r, p)) for r in rows]
    try:
        vertical = gram_schmidt(S.metric, p, vert_vecs,
                                labels=[f"vert{i}" for i in range(len(vert_vecs))])
    except EmptyFrame:
        vertical = Frame(tuple(p), (), ())
    k_eff = len(vertical)
    if 0 < k_eff < len(rows) and strict:
        raise DegenerateAction(
            f"fundamental fields have rank {k_eff} < {len(rows)} at the sample"
        )
    # rows whose fields survive, for vertical projection as fields
    if k_eff == len(rows):
        vrows = rows
    elif k_eff == 0:
        vrows = np.zeros((0, setup.action.d))
    else:
        vrows = _independent_rows(rows, vert_vecs, k_eff)

    reeb = vvalue(S.reeb(p))
    tangent = [list(r) for r in man.tangent_basis(p)]
    combined = gram_schmidt(
        S.metric,
        p,
        [list(v) for v in vertical.vectors] + [reeb] + tangent,
        labels=[f"vert{i}" for i in range(k_eff)] + ["reeb"]
        + [f"d{i}" for i in range(len(tangent))],
    )
    d_vectors = [list(v) for v, lab in zip(combined.vectors, combined.labels)
                 if lab.startswith("d")]
    contact_d = Frame(tuple(p), tuple(tuple(v) for v in d_vectors),
                      tuple(f"D{i}" for i in range(len(d_vectors))))

    normal_inputs = [vvalue(S.phi(p, list(v))) for v in vertical.vectors]
    if normal_inputs:
        normal = gram_schmidt(S.metric, p, normal_inputs,
                              labels=[f"nu{i}" for i in range(len(normal_inputs))])
    else:
        normal = Frame(tuple(p), (), ())

    dim_n = man.dim
    dims = {
        "level_set": dim_n,
        "vertical": k_eff,
        "contact_d": len(contact_d),
        "normal": len(normal),
        "quotient": len(contact_d) + 1,
    }

    checks = _frame_checks(setup, p, vertical, reeb, contact_d, normal, tangent)
    frame = ReductionFrame(sample, vertical, tuple(reeb), contact_d, normal,
                           np.asarray(vrows, dtype=float), dims, checks)
    if strict:
        bad = {k: v for k, v in checks.items() if v > tol}
        if len(contact_d) != dim_n - k_eff - 1:
            raise FrameInconsistent(
                f"contact block has dim {len(contact_d)}, expected {dim_n - k_eff - 1}"
            )
        if bad:
            raise FrameInconsistent(f"frame invariants violated: {bad}")
    return frame


def _independent_rows(rows, vecs, k_eff):
    picked, idx = [], []
    for i, v in enumerate(vecs):
        cand = picked + [v]
        if np.linalg.matrix_rank(np.asarray(cand), tol=1e-10) > len(picked):
            picked.append(v)
            idx.append(i)
        if len(picked) == k_eff:
            break
    return np.asarray(rows)[idx]


def _frame_checks(setup, p, vertical, reeb, contact_d, normal, tangent):
    S = setup.structure
    g = S.metric.g
    checks = {}
    blocks = {
        "vertical": [list(v) for v in vertical.vectors],
        "reeb": [list(reeb)],
        "contact_d": [list(v) for v in contact_d.vectors],
    }
    worst = 0.0
    names = list(blocks)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            for u in blocks[a]:
                for v in blocks[b]:
                    worst = max(worst, abs(value(g(p, u, v))))
    checks["block_orthogonality"] = worst

    worst = 0.0
    for u in blocks["vertical"] + blocks["contact_d"]:
        worst = max(worst, abs(value(S.eta(p, u))))
    checks["eta_on_vertical_and_d"] = worst
    checks["eta_on_reeb"] = abs(value(S.eta(p, reeb)) - 1.0)

    worst = 0.0
    for nu in normal.vectors:
        for t in tangent:
            worst = max(worst, abs(value(g(p, list(nu), t))))
    checks["normal_vs_tangent"] = worst

    stack = blocks["vertical"] + blocks["reeb"] + blocks["contact_d"]
    if stack:
        rank = int(np.linalg.matrix_rank(np.asarray(stack), tol=1e-8))
        checks["span_defect"] = float(len(stack) - rank)
    else:
        checks["span_defect"] = 0.0
    return checks


@dataclass
class ReducedPointData:
    """Reduced tensors in the horizontal frame representation."""

    frame: ReductionFrame
    reduced_eta: np.ndarray
    reduced_gram: np.ndarray
    d_eta_matrix: np.ndarray
    d_eta_det: float
    checks: dict


def reduced_tensors(setup, rframe):
    """eta, g and d(eta) on {contactD, reeb}: the reduced tensors under
    the Riemannian-submersion identification."""
    S = setup.structure
    p = list(rframe.sample.coords())
    horiz = rframe.horizontal
    eta_vals = np.asarray([value(S.eta(p, v)) for v in horiz])
    gram = np.asarray(
        [[value(S.metric.g(p, u, v)) for v in horiz] for u in horiz], dtype=float
    )
    dvecs = [list(v) for v in rframe.contact_d.vectors]
    m = len(dvecs)
    deta = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if i != j:
                deta[i, j] = value(S.d_eta(p, dvecs[i], dvecs[j]))
    antisym = float(np.max(np.abs(deta + deta.T))) if m else 0.0
    det = abs(float(np.linalg.det(deta))) if m else 0.0

    tangent = [list(r) for r in setup.manifold.tangent_basis(p)]
    worst_basic = 0.0
    for vrow in rframe.vertical_rows:
        vfield_p = vvalue(setup.action.fundamental_field(vrow, p))
        for t in tangent:
            worst_basic = max(worst_basic, abs(value(S.d_eta(p, vfield_p, t))))

    checks = {
        "reduced_eta_profile": float(
            np.max(np.abs(eta_vals - np.eye(len(horiz))[-1]))
        ),
        "reduced_gram_identity": float(np.max(np.abs(gram - np.eye(len(horiz))))),
        "d_eta_antisymmetry": antisym,
        "basic_d_eta": worst_basic,
    }
    return ReducedPointData(rframe, eta_vals, gram, deta, det, checks)
