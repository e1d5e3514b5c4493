"""Riemannian-submersion curvature machinery.

A SubmersionContext holds, at one sample of a level set N: the ambient
structure, the level-set manifold, vertical fields (jet-generic), and
the horizontal frame.  Quotient tensors are never written in quotient
coordinates; they are evaluated on horizontal representatives upstairs.

Sign conventions, fixed once: R(X,Y)Z = nab_X nab_Y Z - nab_Y nab_X Z -
nab_[X,Y] Z, slots R(X,Y,Z,V) = g(R(X,Y)Z, V), sectional K(X,Y) =
R(X,Y,Y,X) on orthonormal pairs.  In these slots the horizontal
curvature formula of a submersion reads

    R_P(X,Y,Z,V) = R_N(X,Y,Z,V) - 2 g(A(X,Y), A(Z,V))
                   + g(A(Y,Z), A(X,V)) - g(A(X,Z), A(Y,V))

which gives K_P = K_N + 3 |A(X,Y)|^2 on orthonormal pairs; the sign
is pinned by the Hopf gate test (S^3 -> S^2: upstairs 1, downstairs 4)
before anything else trusts it.
"""

import math

from .geometry import Geometry
from .jets import jsqrt, value
from .manifolds import Sphere
from .structures import RoundSphereStructure
from .tensor_kernel import gram_schmidt
from .vecops import solve_linear, vscale, vsub, vvalue


class SubmersionContext:
    """Per-sample bundle for O'Neill computations."""

    def __init__(self, structure, manifold, vertical_fields, p,
                 horizontal_frame=None, vertical_frame=None):
        self.structure = structure
        self.manifold = manifold
        self.vertical_fields = list(vertical_fields)
        self.p = list(p)
        self.geometry = Geometry(manifold, structure.metric)
        self.ambient_geometry = structure.geometry
        if vertical_frame is None:
            vecs = [vvalue(f(self.p)) for f in self.vertical_fields]
            vertical_frame = [list(v) for v in
                              gram_schmidt(structure.metric, self.p, vecs).vectors] if vecs else []
        self.vertical_frame = vertical_frame
        if horizontal_frame is None:
            horizontal_frame = self._default_horizontal()
        self.horizontal_frame = [list(v) for v in horizontal_frame]
        self._tangent_on = None
        self._normal_on = None

    @classmethod
    def from_reduction(cls, setup, rframe):
        fields = [
            (lambda q, r=tuple(row): setup.action.fundamental_field(r, q))
            for row in rframe.vertical_rows
        ]
        return cls(
            setup.structure,
            setup.manifold,
            fields,
            rframe.sample.coords(),
            horizontal_frame=rframe.horizontal,
            vertical_frame=[list(v) for v in rframe.vertical.vectors],
        )

    def _default_horizontal(self):
        S = self.structure
        reeb = vvalue(S.reeb(self.p))
        v_reeb = vvalue(self.vertical_project(self.p, reeb))
        reeb_is_vertical = (
            max(abs(a - b) for a, b in zip(reeb, v_reeb)) < 1e-8
            if self.vertical_fields
            else False
        )
        tangent = [list(r) for r in self.manifold.tangent_basis(self.p)]
        head = self.vertical_frame if reeb_is_vertical else self.vertical_frame + [reeb]
        combined = gram_schmidt(
            S.metric, self.p,
            head + tangent,
            labels=[f"v{i}" for i in range(len(head))]
            + [f"d{i}" for i in range(len(tangent))],
        )
        d_block = [list(v) for v, lab in zip(combined.vectors, combined.labels)
                   if lab.startswith("d")]
        return d_block if reeb_is_vertical else d_block + [reeb]

    # -- projections (jet-generic) --------------------------------------

    def vertical_project(self, q, w):
        if not self.vertical_fields:
            return [0.0 * c for c in w]
        vals = [f(q) for f in self.vertical_fields]
        g = self.structure.metric.g
        gram = [[g(q, a, b) for b in vals] for a in vals]
        rhs = [g(q, a, w) for a in vals]
        coef = solve_linear(gram, rhs)
        out = [0.0] * len(w)
        for c, v in zip(coef, vals):
            out = [o + c * b for o, b in zip(out, v)]
        return out

    def horizontal_project(self, q, w):
        t = self.manifold.project(q, w)
        return vsub(t, self.vertical_project(q, t))

    def horizontal_extend(self, vec):
        hat = vvalue(vec)
        return lambda q: self.horizontal_project(q, hat)

    # -- O'Neill A tensor ------------------------------------------------

    def a_tensor(self, x, y):
        """A(X,Y) = vertical part of nab^N_X Y~ for horizontal x, y."""
        Xh = self.horizontal_extend(x)
        Yh = self.horizontal_extend(y)
        w = self.geometry.covariant(self.p, Xh, Yh)
        return self.vertical_project(self.p, w)

    def a_tensor_bracket(self, x, y):
        """Independent oracle: A(X,Y) = (1/2) v([X~, Y~])."""
        Xh = self.horizontal_extend(x)
        Yh = self.horizontal_extend(y)
        b = self.geometry.bracket(self.p, Xh, Yh)
        return vscale(self.vertical_project(self.p, b), 0.5)

    # -- second fundamental form of N in the ambient sphere --------------

    def _tangent_frames(self):
        if self._tangent_on is None:
            S = self.structure
            rows = [list(r) for r in self.manifold.tangent_basis(self.p)]
            self._tangent_on = [list(v) for v in
                                gram_schmidt(S.metric, self.p, rows).vectors]
            sph_rows = [list(r) for r in S.sphere.tangent_basis(self.p)]
            combined = gram_schmidt(
                S.metric, self.p, self._tangent_on + sph_rows,
                labels=[f"t{i}" for i in range(len(self._tangent_on))]
                + [f"c{i}" for i in range(len(sph_rows))],
            )
            self._normal_on = [list(v) for v, lab in
                               zip(combined.vectors, combined.labels)
                               if lab.startswith("c")]
        return self._tangent_on, self._normal_on

    def normal_frame(self):
        return self._tangent_frames()[1]

    def second_fundamental(self, x, y):
        """h(X,Y): normal (to N, inside TS) part of nab^S_X Y~ where Y~
        is the projection-extended field tangent to N."""
        man = self.manifold
        yhat = vvalue(y)
        xhat = vvalue(x)
        Yf = lambda q: man.project(q, yhat)
        Xf = lambda q: man.project(q, xhat)
        w = self.ambient_geometry.covariant(self.p, Xf, Yf)
        tangent_on, _ = self._tangent_frames()
        g = self.structure.metric.g
        out = list(w)
        for u in tangent_on:
            c = g(self.p, u, out)
            out = [a - c * b for a, b in zip(out, u)]
        return out

    # -- curvature paths --------------------------------------------------

    def ambient_curvature_4(self, x, y, z, v):
        return self.structure.ambient_curvature_4(self.p, x, y, z, v)

    def gauss_curvature_n4(self, x, y, z, v, h_cache=None):
        """R^N(X,Y,Z,V) from the ambient curvature by the Gauss equation."""
        g = self.structure.metric.g
        h = self._h_cached(h_cache)
        rm = self.ambient_curvature_4(x, y, z, v)
        return (
            value(rm)
            + value(g(self.p, h(x, v), h(y, z)))
            - value(g(self.p, h(x, z), h(y, v)))
        )

    def _h_cached(self, cache):
        if cache is None:
            cache = {}

        def h(a, b):
            key = (id(a), id(b))
            if key not in cache:
                val = self.second_fundamental(a, b)
                cache[key] = val
                cache[(id(b), id(a))] = val
            return cache[key]

        return h

    def quotient_curvature_4(self, x, y, z, v, a_cache=None, h_cache=None):
        """Horizontal 4-tensor of the quotient via O'Neill's formula."""
        g = self.structure.metric.g
        A = self._a_cached(a_cache)
        rn = self.gauss_curvature_n4(x, y, z, v, h_cache=h_cache)
        gp = lambda u, w: value(g(self.p, u, w))
        return (
            rn
            - 2.0 * gp(A(x, y), A(z, v))
            + gp(A(y, z), A(x, v))
            - gp(A(x, z), A(y, v))
        )

    def _a_cached(self, cache):
        if cache is None:
            cache = {}

        def A(a, b):
            key = (id(a), id(b))
            if key not in cache:
                val = vvalue(self.a_tensor(a, b))
                cache[key] = val
                cache[(id(b), id(a))] = [-c for c in val]
            return cache[key]

        return A

    def quotient_curvature_vector(self, x, y, z):
        """R^P(X,Y)Z as a horizontal vector, assembled on the frame."""
        a_cache, h_cache = {}, {}
        out = [0.0] * len(self.p)
        for f in self.horizontal_frame:
            comp = self.quotient_curvature_4(x, y, z, f, a_cache, h_cache)
            out = [o + comp * c for o, c in zip(out, f)]
        return out

    def quotient_sasakian_residual(self, x, y):
        """|R^P(X, zeta)Y - (eta(Y) X - g(X,Y) zeta)| on representatives."""
        S = self.structure
        zeta = vvalue(S.reeb(self.p))
        r = self.quotient_curvature_vector(x, zeta, y)
        g = S.metric.g
        expected = vsub(
            vscale(x, value(S.eta(self.p, y))),
            vscale(zeta, value(g(self.p, x, y))),
        )
        diff = vsub(r, expected)
        return math.sqrt(max(value(g(self.p, diff, diff)), 0.0))

    def phi_horizontal(self, x):
        """(phi_P X) on representatives: horizontal part of nab^N_X xi."""
        S = self.structure
        Xh = self.horizontal_extend(x)
        w = self.geometry.covariant(self.p, Xh, lambda q: S.reeb_field(q))
        return self.horizontal_project(self.p, vvalue(w))

    def phi_sectional_quotient(self, x):
        """K_P(X, phi_P X) via the O'Neill path, X horizontal unit."""
        g = self.structure.metric.g
        px = self.phi_horizontal(x)
        num = self.quotient_curvature_4(x, px, px, x)
        den = (
            value(g(self.p, x, x)) * value(g(self.p, px, px))
            - value(g(self.p, x, px)) ** 2
        )
        return num / den

    # -- Weingarten identity ----------------------------------------------

    def weingarten_residual(self, row, y, z):
        """Residual of the shape-operator identity for the unit normal
        phi(X_M)/|X_M| attached to the fundamental field of `row`."""
        S = self.structure
        g = S.metric.g
        p = self.p
        act_field = self.vertical_fields[row] if isinstance(row, int) else row
        geo_s = self.ambient_geometry

        xm_p = vvalue(act_field(p))
        nrm = math.sqrt(value(g(p, xm_p, xm_p)))

        def nu_field(q):
            xm = act_field(q)
            w = geo_s.covariant(q, act_field, S.reeb_field)
            scale = 1.0 / jsqrt(g(q, xm, xm))
            return [scale * c for c in w]

        Yf = lambda q: self.manifold.project(q, vvalue(y))
        dn = geo_s.covariant(p, Yf, nu_field)
        tangent_on, _ = self._tangent_frames()
        a_nu_y = [0.0] * len(p)
        for u in tangent_on:
            c = value(g(p, u, dn))
            a_nu_y = [a + (-c) * b for a, b in zip(a_nu_y, u)]
        lhs = value(g(p, a_nu_y, z))

        grad = geo_s.covariant(p, Yf, act_field)
        phi_grad = geo_s.covariant(p, geo_s.extend(vvalue(grad)), S.reeb_field)
        rhs = (
            value(g(p, xm_p, y)) * value(S.eta(p, z))
            - value(g(p, phi_grad, z))
        ) / nrm
        return abs(lhs - rhs)


def hopf_context():
    """S^3 -> S^2 with the Reeb circle vertical: the sign gate for the
    O'Neill formula (upstairs curvature 1, downstairs 4)."""
    S = RoundSphereStructure(2)
    man = Sphere(4)
    p = [1.0, 0.0, 0.0, 0.0]
    return SubmersionContext(S, man, [S.reeb_field], p)
