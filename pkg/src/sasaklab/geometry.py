"""Connection and curvature engine for embedded manifolds.

All tangent vectors are extended to fields by one fixed convention:
``v`` at ``p`` becomes the field ``q -> project_q(v_hat)`` where
``v_hat`` holds the frozen ambient components of ``v``.  Every covariant
derivative, curvature slot, bracket and exterior derivative below uses
this convention, so independent evaluation paths are comparable.

Derivatives are taken along straight ambient lines ``q + s w``.  Only
first derivatives are extracted per nesting level and all velocities are
tangent at on-manifold base points, so the curve choice does not affect
the extracted coefficients (any curve with the same velocity gives the
same first derivative of an ambient formula).
"""

import numpy as np

from . import tolerances
from .errors import SingularMetric
from .jets import Dual, enter_level, exit_level, imag, value
from .vecops import solve_linear, vdot, vsub, vvalue


class InducedMetric:
    """Restriction of the ambient Euclidean pairing."""

    euclidean = True

    def g(self, q, u, v):
        return vdot(u, v)


class Geometry:
    """Bundles a manifold and a metric evaluator.

    Instances are immutable and safe to share; the per-point frame cache
    is the only mutable state and is keyed by the raw coordinate bytes.
    """

    def __init__(self, manifold, metric=None):
        self.manifold = manifold
        self.metric = metric if metric is not None else InducedMetric()
        self._frames = {}

    # ------------------------------------------------------------------
    # frames and metric health
    # ------------------------------------------------------------------

    def tangent_frame(self, p):
        """Euclidean-orthonormal tangent basis at the float point under
        the jet value of p; deterministic and cached."""
        base = vvalue(p)
        key = np.asarray(base, dtype=float).tobytes()
        hit = self._frames.get(key)
        if hit is None:
            if len(self._frames) > 8192:
                self._frames.clear()
            hit = self.manifold.tangent_basis(base)
            self._frames[key] = hit
        return hit

    def check_metric(self, p):
        """Raise SingularMetric when the tangent Gram matrix at p is
        numerically singular."""
        if self.metric.euclidean:
            return 1.0
        frame = self.tangent_frame(p)
        rows = [list(r) for r in frame]
        gram = np.asarray(
            [[value(self.metric.g(p, u, v)) for v in rows] for u in rows], dtype=float
        )
        cond = float(np.linalg.cond(gram))
        if not np.isfinite(cond) or cond > tolerances.DEFAULTS["metric_condition"]:
            raise SingularMetric(f"tangent Gram condition number {cond:.3e}")
        return cond

    # ------------------------------------------------------------------
    # fields and elementary derivatives
    # ------------------------------------------------------------------

    def extend(self, vec):
        """Extension convention: freeze the ambient components, project
        pointwise."""
        hat = vvalue(vec)
        man = self.manifold
        return lambda q: man.project(q, hat)

    def _coordinate_fields(self, q):
        m = self.manifold.ambient_dim
        hats = np.eye(m)
        return [self.manifold.project(q, list(hats[a])) for a in range(m)]

    def d_field(self, q, w, field):
        """D_w field at q: componentwise derivative along q + s w."""
        lvl = enter_level()
        try:
            rs = [Dual(lvl, a, b) for a, b in zip(q, w)]
            return [imag(c, lvl) for c in field(rs)]
        finally:
            exit_level()

    def bracket(self, q, Xf, Yf, project=False):
        """[X, Y](q) = D_X Y - D_Y X for the extended fields."""
        Xq, Yq = Xf(q), Yf(q)
        dxy = self.d_field(q, Xq, Yf)
        dyx = self.d_field(q, Yq, Xf)
        out = vsub(dxy, dyx)
        if project:
            out = self.manifold.project(q, out)
        return out

    # ------------------------------------------------------------------
    # covariant derivative
    # ------------------------------------------------------------------

    def covariant(self, q, dir_field, field):
        """Levi-Civita derivative (nabla_X Y)(q) for fields X, Y.

        For the induced metric the Koszul formula collapses exactly to
        the tangential ambient derivative (every metric-derivative term
        expands by the product rule and cancels against the brackets),
        so that cheaper algebraically-equal form is used; general
        metrics go through the explicit formula.
        """
        if self.metric.euclidean:
            w = self.d_field(q, dir_field(q), field)
            return self.manifold.project(q, w)
        return self.covariant_koszul(q, dir_field, field)

    def covariant_koszul(self, q, dir_field, field):
        """Term-by-term Koszul formula, any metric."""
        kap2, tests = self._koszul_rhs(q, dir_field, field)
        if self.metric.euclidean:
            # test fields are the projected coordinate vectors e_a, so
            # sum_a kappa_a e_a reassembles the ambient representative.
            return self.manifold.project(q, [k * 0.5 for k in kap2])
        gram = [[self.metric.g(q, u, v) for v in tests] for u in tests]
        coef = solve_linear(gram, [k * 0.5 for k in kap2])
        out = [0.0] * self.manifold.ambient_dim
        for c, t in zip(coef, tests):
            out = [a + c * b for a, b in zip(out, t)]
        return out

    def _koszul_rhs(self, q, Xf, Yf):
        """2 g(nabla_X Y, E_a) for each test field E_a, plus the E_a(q)."""
        man, met = self.manifold, self.metric
        Xq, Yf_q = Xf(q), Yf(q)
        if met.euclidean:
            hats = [list(r) for r in np.eye(man.ambient_dim)]
        else:
            hats = [list(r) for r in self.tangent_frame(q)]
        E_fields = [lambda r, h=h: man.project(r, h) for h in hats]
        Eq = [Ef(q) for Ef in E_fields]
        na = len(hats)

        # shared curve along X: derivatives of Y, every E_a and g(Y, E_a)
        lvl = enter_level()
        try:
            rs = [Dual(lvl, a, b) for a, b in zip(q, Xq)]
            Y_rs = Yf(rs)
            E_rs = [Ef(rs) for Ef in E_fields]
            t1 = [imag(met.g(rs, Y_rs, E_rs[a]), lvl) for a in range(na)]
            dXY = [imag(c, lvl) for c in Y_rs]
            dXE = [[imag(c, lvl) for c in E_rs[a]] for a in range(na)]
        finally:
            exit_level()

        # shared curve along the value of Y
        lvl = enter_level()
        try:
            rs = [Dual(lvl, a, b) for a, b in zip(q, Yf_q)]
            X_rs = Xf(rs)
            E_rs = [Ef(rs) for Ef in E_fields]
            t2 = [imag(met.g(rs, X_rs, E_rs[a]), lvl) for a in range(na)]
            dYX = [imag(c, lvl) for c in X_rs]
            dYE = [[imag(c, lvl) for c in E_rs[a]] for a in range(na)]
        finally:
            exit_level()

        bXY = vsub(dXY, dYX)

        kap2 = []
        for a in range(na):
            # curve along E_a: t3 and the E_a-derivatives of X and Y
            lvl = enter_level()
            try:
                rs = [Dual(lvl, u, w) for u, w in zip(q, Eq[a])]
                X_rs = Xf(rs)
                Y_rs = Yf(rs)
                t3 = imag(met.g(rs, X_rs, Y_rs), lvl)
                dEX = [imag(c, lvl) for c in X_rs]
                dEY = [imag(c, lvl) for c in Y_rs]
            finally:
                exit_level()
            bXE = vsub(dXE[a], dEX)
            bYE = vsub(dYE[a], dEY)
            kap2.append(
                t1[a] + t2[a] - t3
                + met.g(q, bXY, Eq[a])
                - met.g(q, bXE, Yf_q)
                - met.g(q, bYE, Xq)
            )
        return kap2, Eq

    # ------------------------------------------------------------------
    # curvature
    # ------------------------------------------------------------------

    def curvature(self, p, x, y, z):
        """R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
        at the float point p, inputs extended by the fixed convention."""
        self.check_metric(p)
        Xf, Yf, Zf = self.extend(x), self.extend(y), self.extend(z)
        Wyz = lambda r: self.covariant(r, Yf, Zf)
        Wxz = lambda r: self.covariant(r, Xf, Zf)
        term_a = self.covariant(p, Xf, Wyz)
        term_b = self.covariant(p, Yf, Wxz)
        bxy = self.manifold.project(p, self.bracket(p, Xf, Yf))
        term_c = self.covariant(p, self.extend(bxy), Zf)
        return vsub(vsub(term_a, term_b), term_c)

    def curvature_4(self, p, x, y, z, v):
        """R(X,Y,Z,V) = g(R(X,Y)Z, V)."""
        return self.metric.g(p, self.curvature(p, x, y, z), v)

    def sectional(self, p, x, y):
        """K(X,Y) = R(X,Y,Y,X) / (|X|^2 |Y|^2 - g(X,Y)^2)."""
        g = self.metric.g
        num = value(self.curvature_4(p, x, y, y, x))
        den = value(g(p, x, x)) * value(g(p, y, y)) - value(g(p, x, y)) ** 2
        return num / den
