// Embedded primal-dual interior-point solver for conic programs
//
//   minimize    c'x
//   subject to  A x = b
//               G x + s = h,   s in K = R+^l  x  SOC(q_1) x ... x SOC(q_N)
//
// where SOC(q) = { (v0, v1) in R x R^{q-1} : v0 >= |v1|_2 }.
//
// The implementation follows the standard homogeneous self-dual embedding
// with Nesterov-Todd scaling and a Mehrotra predictor-corrector step. Each
// iteration factors the quasi-definite KKT system
//
//   [ dI   A'   G'  ]
//   [ A   -dI   0   ]
//   [ G    0   -W'W - dI ]
//
// with a sparse simplicial LDLT (AMD ordering, static regularization d,
// iterative refinement against the unregularized operator). Problem data is
// Ruiz-equilibrated up front; second-order cone rows share one scale factor
// so the cone geometry is preserved.
//
// Sized for desk-scale models (up to a few tens of thousands of rows); this
// is not a general-purpose replacement for an industrial solver.

#ifndef FHSAP_CONIC_HPP
#define FHSAP_CONIC_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace fhsap::conic {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

struct ConeSpec {
    int nonneg = 0;
    std::vector<int> soc;

    int dim() const {
        int d = nonneg;
        for (int q : soc) d += q;
        return d;
    }
    // Barrier degree: each nonnegative coordinate and each SOC block counts 1.
    int degree() const { return nonneg + static_cast<int>(soc.size()); }
};

struct Problem {
    Vec c;
    SpMat A;  // p x n (p may be 0)
    Vec b;
    SpMat G;  // m x n, m = cone.dim() >= 1
    Vec h;
    ConeSpec cone;
};

enum class ConicStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIters, Numerical };

struct ConicSettings {
    double feastol = 1e-9;
    double abstol = 1e-9;
    double reltol = 1e-10;
    // Looser thresholds applied to the best iterate when the tight targets
    // were not reached before the iteration limit. Primal feasibility is the
    // binding contract; the dual residual may sit an order higher on badly
    // scaled cones.
    double pres_accept = 1e-7;
    double dres_accept = 1e-6;
    double reltol_accept = 1e-7;
    int max_iters = 120;
    double static_reg = 1e-10;
    int refine_steps = 3;
    int ruiz_iters = 10;
    double time_limit_s = 0.0;  // 0 = unlimited
};

struct ConicSolution {
    ConicStatus status = ConicStatus::Numerical;
    Vec x, y, z, s;
    double primal_obj = std::numeric_limits<double>::quiet_NaN();
    double dual_obj = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    double pres = std::numeric_limits<double>::quiet_NaN();
    double dres = std::numeric_limits<double>::quiet_NaN();
    int iters = 0;
    std::string message;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SocScaling {
    double eta = 1.0;   // W = eta * Pbar(wbar)^(1/2)
    double eta2 = 1.0;  // eta^2
    double w0 = 1.0;    // wbar head, with w0^2 - |w1|^2 = 1
    Vec w1;             // wbar tail
};

struct Scaling {
    Vec lp_w;    // w_i = sqrt(s_i / z_i), nonneg block
    Vec lp_w2;   // w_i^2
    Vec lambda;  // full cone dimension, lambda = W z = W^{-1} s
    std::vector<SocScaling> socs;
};

// ---- cone-wise vector operations ------------------------------------------

inline bool compute_scaling(const ConeSpec& K, const Vec& s, const Vec& z, Scaling& W) {
    const int l = K.nonneg;
    W.lp_w.resize(l);
    W.lp_w2.resize(l);
    W.lambda.resize(K.dim());
    W.socs.resize(K.soc.size());
    for (int i = 0; i < l; ++i) {
        if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
        W.lp_w2[i] = s[i] / z[i];
        W.lp_w[i] = std::sqrt(W.lp_w2[i]);
        W.lambda[i] = std::sqrt(s[i] * z[i]);
    }
    int off = l;
    for (std::size_t bi = 0; bi < K.soc.size(); ++bi) {
        const int q = K.soc[bi];
        const double s0 = s[off];
        const double z0 = z[off];
        const auto s1 = s.segment(off + 1, q - 1);
        const auto z1 = z.segment(off + 1, q - 1);
        const double sres = s0 * s0 - s1.squaredNorm();
        const double zres = z0 * z0 - z1.squaredNorm();
        if (!(sres > 0.0) || !(zres > 0.0) || !(s0 > 0.0) || !(z0 > 0.0)) return false;
        const double a = std::sqrt(sres);
        const double b = std::sqrt(zres);

        const double sbar0 = s0 / a;
        const double zbar0 = z0 / b;
        const double dot_sz = (sbar0 * zbar0) + (s1 / a).dot(z1 / b);
        const double gamma = std::sqrt((1.0 + dot_sz) / 2.0);

        SocScaling& sc = W.socs[bi];
        sc.eta2 = a / b;
        sc.eta = std::sqrt(sc.eta2);
        sc.w0 = (sbar0 + zbar0) / (2.0 * gamma);
        sc.w1 = (s1 / a - z1 / b) / (2.0 * gamma);

        // lambda block = sqrt(ab) * Wbar zbar
        const double zb0 = zbar0;
        const Vec zb1 = z1 / b;
        const double wz = sc.w1.dot(zb1);
        const double lam0 = sc.w0 * zb0 + wz;  // equals gamma
        Vec lam1 = zb1 + (zb0 + wz / (1.0 + sc.w0)) * sc.w1;
        const double scale = std::sqrt(a * b);
        W.lambda[off] = scale * lam0;
        W.lambda.segment(off + 1, q - 1) = scale * lam1;
        off += q;
    }
    return true;
}

// W v (symmetric scaling applied to a full cone-dimension vector).
inline Vec apply_W(const ConeSpec& K, const Scaling& W, const Vec& v) {
    Vec out(v.size());
    const int l = K.nonneg;
    out.head(l) = W.lp_w.cwiseProduct(v.head(l));
    int off = l;
    for (std::size_t bi = 0; bi < K.soc.size(); ++bi) {
        const int q = K.soc[bi];
        const auto& sc = W.socs[bi];
        const double v0 = v[off];
        const auto v1 = v.segment(off + 1, q - 1);
        const double wv = sc.w1.dot(v1);
        out[off] = sc.eta * (sc.w0 * v0 + wv);
        out.segment(off + 1, q - 1) = sc.eta * (v1 + (v0 + wv / (1.0 + sc.w0)) * sc.w1);
        off += q;
    }
    return out;
}

// W^{-1} v.
inline Vec apply_Winv(const ConeSpec& K, const Scaling& W, const Vec& v) {
    Vec out(v.size());
    const int l = K.nonneg;
    out.head(l) = v.head(l).cwiseQuotient(W.lp_w);
    int off = l;
    for (std::size_t bi = 0; bi < K.soc.size(); ++bi) {
        const int q = K.soc[bi];
        const auto& sc = W.socs[bi];
        const double v0 = v[off];
        const auto v1 = v.segment(off + 1, q - 1);
        const double wv = sc.w1.dot(v1);
        out[off] = (sc.w0 * v0 - wv) / sc.eta;
        out.segment(off + 1, q - 1) = (v1 + (-v0 + wv / (1.0 + sc.w0)) * sc.w1) / sc.eta;
        off += q;
    }
    return out;
}

// W^2 v = W (W v) using the rank-structured form eta^2 (2 wbar wbar' - J).
inline Vec apply_W2(const ConeSpec& K, const Scaling& W, const Vec& v) {
    Vec out(v.size());
    const int l = K.nonneg;
    out.head(l) = W.lp_w2.cwiseProduct(v.head(l));
    int off = l;
    for (std::size_t bi = 0; bi < K.soc.size(); ++bi) {
        const int q = K.soc[bi];
        const auto& sc = W.socs[bi];
        const double v0 = v[off];
        const auto v1 = v.segment(off + 1, q - 1);
        const double d = sc.w0 * v0 + sc.w1.dot(v1);
        out[off] = sc.eta2 * (2.0 * sc.w0 * d - v0);
        out.segment(off + 1, q - 1) = sc.eta2 * (2.0 * d * sc.w1 + v1);
        off += q;
    }
    return out;
}

// Jordan product u o v.
inline Vec jordan_mul(const ConeSpec& K, const Vec& u, const Vec& v) {
    Vec out(u.size());
    const int l = K.nonneg;
    out.head(l) = u.head(l).cwiseProduct(v.head(l));
    int off = l;
    for (int q : K.soc) {
        const auto u1 = u.segment(off + 1, q - 1);
        const auto v1 = v.segment(off + 1, q - 1);
        out[off] = u[off] * v[off] + u1.dot(v1);
        out.segment(off + 1, q - 1) = u[off] * v1 + v[off] * u1;
        off += q;
    }
    return out;
}

// Solve lambda o u = d for u.
inline Vec jordan_div(const ConeSpec& K, const Vec& lambda, const Vec& d) {
    Vec out(d.size());
    const int l = K.nonneg;
    out.head(l) = d.head(l).cwiseQuotient(lambda.head(l));
    int off = l;
    for (int q : K.soc) {
        const double l0 = lambda[off];
        const auto l1 = lambda.segment(off + 1, q - 1);
        const double det = l0 * l0 - l1.squaredNorm();
        const double d0 = d[off];
        const auto d1 = d.segment(off + 1, q - 1);
        const double u0 = (l0 * d0 - l1.dot(d1)) / det;
        out[off] = u0;
        out.segment(off + 1, q - 1) = (d1 - u0 * l1) / l0;
        off += q;
    }
    return out;
}

inline Vec cone_identity(const ConeSpec& K) {
    Vec e = Vec::Zero(K.dim());
    e.head(K.nonneg).setOnes();
    int off = K.nonneg;
    for (int q : K.soc) {
        e[off] = 1.0;
        off += q;
    }
    return e;
}

// Smallest "eigenvalue" margin: min_i v_i over the nonneg block and
// v0 - |v1| per SOC block. Positive iff v is strictly inside K.
inline double cone_margin(const ConeSpec& K, const Vec& v) {
    double m = kInf;
    for (int i = 0; i < K.nonneg; ++i) m = std::min(m, v[i]);
    int off = K.nonneg;
    for (int q : K.soc) {
        m = std::min(m, v[off] - v.segment(off + 1, q - 1).norm());
        off += q;
    }
    return m;
}

// Strict interior test using the same arithmetic compute_scaling relies on,
// so a committed step is guaranteed to stay scalable.
inline bool strict_interior(const ConeSpec& K, const Vec& v) {
    for (int i = 0; i < K.nonneg; ++i)
        if (!(v[i] > 0.0)) return false;
    int off = K.nonneg;
    for (int q : K.soc) {
        const double v0 = v[off];
        if (!(v0 > 0.0) || !(v0 * v0 - v.segment(off + 1, q - 1).squaredNorm() > 0.0))
            return false;
        off += q;
    }
    return true;
}

// Largest step a >= 0 with v + a dv in K (boundary allowed); may return kInf.
inline double max_step(const ConeSpec& K, const Vec& v, const Vec& dv) {
    double alpha = kInf;
    for (int i = 0; i < K.nonneg; ++i)
        if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
    int off = K.nonneg;
    for (int q : K.soc) {
        const double v0 = v[off];
        const double d0 = dv[off];
        const auto v1 = v.segment(off + 1, q - 1);
        const auto d1 = dv.segment(off + 1, q - 1);
        off += q;
        if (d0 >= d1.norm()) continue;  // direction inside the cone
        const double qa = d0 * d0 - d1.squaredNorm();
        const double qb = 2.0 * (v0 * d0 - v1.dot(d1));
        const double qc = std::max(v0 * v0 - v1.squaredNorm(), 0.0);
        double root = kInf;
        if (std::abs(qa) < 1e-300) {
            if (qb < 0.0) root = -qc / qb;
        } else {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double r1 = (-qb - sq) / (2.0 * qa);
                const double r2 = (-qb + sq) / (2.0 * qa);
                for (double r : {std::min(r1, r2), std::max(r1, r2)}) {
                    if (r >= 0.0 && v0 + r * d0 >= -1e-14 * (std::abs(v0) + 1.0)) {
                        root = r;
                        break;
                    }
                }
            } else if (qa < 0.0) {
                root = 0.0;  // numerically at the boundary already
            }
        }
        alpha = std::min(alpha, root);
    }
    return alpha;
}

// ---- KKT system -------------------------------------------------------------

class KktSolver {
  public:
    KktSolver(const SpMat& A, const SpMat& G, const ConeSpec& cone, double reg, int refine)
        : A_(A), G_(G), cone_(cone), reg_(reg), refine_(refine) {
        n_ = static_cast<int>(A.cols() > 0 ? A.cols() : G.cols());
        p_ = static_cast<int>(A.rows());
        m_ = static_cast<int>(G.rows());
        dim_ = n_ + p_ + m_;
    }

    bool factor(const Scaling& W) {
        scaling_ = &W;
        std::vector<Triplet> trip;
        trip.reserve(static_cast<std::size_t>(A_.nonZeros() + G_.nonZeros() + dim_) + soc_fill());
        for (int i = 0; i < n_; ++i) trip.emplace_back(i, i, reg_);
        for (int j = 0; j < p_; ++j) trip.emplace_back(n_ + j, n_ + j, -reg_);
        for (int k = 0; k < A_.outerSize(); ++k)
            for (SpMat::InnerIterator it(A_, k); it; ++it)
                trip.emplace_back(n_ + static_cast<int>(it.row()), static_cast<int>(it.col()),
                                  it.value());
        for (int k = 0; k < G_.outerSize(); ++k)
            for (SpMat::InnerIterator it(G_, k); it; ++it)
                trip.emplace_back(n_ + p_ + static_cast<int>(it.row()), static_cast<int>(it.col()),
                                  it.value());
        const int zoff = n_ + p_;
        for (int i = 0; i < cone_.nonneg; ++i)
            trip.emplace_back(zoff + i, zoff + i, -W.lp_w2[i] - reg_);
        int off = cone_.nonneg;
        for (std::size_t bi = 0; bi < cone_.soc.size(); ++bi) {
            const int q = cone_.soc[bi];
            const auto& sc = W.socs[bi];
            // -W^2 = -eta^2 (2 wbar wbar' - J), dense lower triangle of the block
            for (int r = 0; r < q; ++r) {
                const double wr = r == 0 ? sc.w0 : sc.w1[r - 1];
                for (int c = 0; c <= r; ++c) {
                    const double wc = c == 0 ? sc.w0 : sc.w1[c - 1];
                    double val = -sc.eta2 * 2.0 * wr * wc;
                    if (r == c) val += sc.eta2 * (r == 0 ? 1.0 : -1.0);
                    if (r == c) val -= reg_;
                    trip.emplace_back(zoff + off + r, zoff + off + c, val);
                }
            }
            off += q;
        }
        SpMat K(dim_, dim_);
        K.setFromTriplets(trip.begin(), trip.end());
        if (!analyzed_) {
            ldlt_.analyzePattern(K);
            analyzed_ = true;
        }
        ldlt_.factorize(K);
        return ldlt_.info() == Eigen::Success;
    }

    // Unregularized KKT operator (for iterative refinement).
    Vec multiply(const Vec& u) const {
        Vec out(dim_);
        const auto ux = u.head(n_);
        const auto uy = u.segment(n_, p_);
        const auto uz = u.tail(m_);
        Vec ox = G_.transpose() * uz;
        if (p_ > 0) ox += A_.transpose() * uy;
        out.head(n_) = ox;
        if (p_ > 0) out.segment(n_, p_) = A_ * ux;
        out.tail(m_) = G_ * ux - apply_W2(cone_, *scaling_, uz);
        return out;
    }

    void solve(const Vec& bx, const Vec& by, const Vec& bz, Vec& ux, Vec& uy, Vec& uz) const {
        Vec rhs(dim_);
        rhs.head(n_) = bx;
        rhs.segment(n_, p_) = by;
        rhs.tail(m_) = bz;
        Vec u = ldlt_.solve(rhs);
        double best_res = (rhs - multiply(u)).norm();
        for (int it = 0; it < refine_; ++it) {
            if (best_res <= 1e-14 * (1.0 + rhs.norm())) break;
            Vec r = rhs - multiply(u);
            Vec cand = u + ldlt_.solve(r);
            const double res = (rhs - multiply(cand)).norm();
            if (res >= best_res) break;
            u = cand;
            best_res = res;
        }
        ux = u.head(n_);
        uy = u.segment(n_, p_);
        uz = u.tail(m_);
    }

    void set_reg(double reg) { reg_ = reg; }

  private:
    std::size_t soc_fill() const {
        std::size_t f = 0;
        for (int q : cone_.soc) f += static_cast<std::size_t>(q) * (q + 1) / 2;
        return f;
    }

    const SpMat& A_;
    const SpMat& G_;
    const ConeSpec& cone_;
    double reg_;
    int refine_;
    int n_ = 0, p_ = 0, m_ = 0, dim_ = 0;
    const Scaling* scaling_ = nullptr;
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt_;
    bool analyzed_ = false;
};

// ---- Ruiz equilibration ------------------------------------------------------

struct Equilibration {
    Vec col;    // variable scales d
    Vec row_a;  // A row scales
    Vec row_g;  // G row scales (uniform within each SOC block)
    double obj_scale = 1.0;
    double rhs_scale = 1.0;
};

inline Equilibration equilibrate(Problem& P, int iters) {
    const int n = static_cast<int>(P.c.size());
    const int p = static_cast<int>(P.A.rows());
    const int m = static_cast<int>(P.G.rows());
    Equilibration eq;
    eq.col = Vec::Ones(n);
    eq.row_a = Vec::Ones(p);
    eq.row_g = Vec::Ones(m);

    // Block id per G row: -1 for LP rows, otherwise SOC block index.
    std::vector<int> block_of(m, -1);
    {
        int off = P.cone.nonneg;
        for (std::size_t bi = 0; bi < P.cone.soc.size(); ++bi) {
            for (int r = 0; r < P.cone.soc[bi]; ++r) block_of[off + r] = static_cast<int>(bi);
            off += P.cone.soc[bi];
        }
    }

    for (int pass = 0; pass < iters; ++pass) {
        Vec cmax = Vec::Zero(n), ramax = Vec::Zero(p), rgmax = Vec::Zero(m);
        for (int k = 0; k < P.A.outerSize(); ++k)
            for (SpMat::InnerIterator it(P.A, k); it; ++it) {
                const double a = std::abs(it.value());
                cmax[it.col()] = std::max(cmax[it.col()], a);
                ramax[it.row()] = std::max(ramax[it.row()], a);
            }
        for (int k = 0; k < P.G.outerSize(); ++k)
            for (SpMat::InnerIterator it(P.G, k); it; ++it) {
                const double a = std::abs(it.value());
                cmax[it.col()] = std::max(cmax[it.col()], a);
                rgmax[it.row()] = std::max(rgmax[it.row()], a);
            }
        // SOC blocks share one scale: the block max.
        for (std::size_t bi = 0; bi < P.cone.soc.size(); ++bi) {
            double bm = 0.0;
            for (int r = 0; r < m; ++r)
                if (block_of[r] == static_cast<int>(bi)) bm = std::max(bm, rgmax[r]);
            for (int r = 0; r < m; ++r)
                if (block_of[r] == static_cast<int>(bi)) rgmax[r] = bm;
        }
        Vec dc(n), dra(p), drg(m);
        for (int j = 0; j < n; ++j) dc[j] = cmax[j] > 0 ? 1.0 / std::sqrt(cmax[j]) : 1.0;
        for (int i = 0; i < p; ++i) dra[i] = ramax[i] > 0 ? 1.0 / std::sqrt(ramax[i]) : 1.0;
        for (int i = 0; i < m; ++i) drg[i] = rgmax[i] > 0 ? 1.0 / std::sqrt(rgmax[i]) : 1.0;

        for (int k = 0; k < P.A.outerSize(); ++k)
            for (SpMat::InnerIterator it(P.A, k); it; ++it)
                it.valueRef() *= dra[it.row()] * dc[it.col()];
        for (int k = 0; k < P.G.outerSize(); ++k)
            for (SpMat::InnerIterator it(P.G, k); it; ++it)
                it.valueRef() *= drg[it.row()] * dc[it.col()];
        eq.col.array() *= dc.array();
        eq.row_a.array() *= dra.array();
        eq.row_g.array() *= drg.array();
    }
    P.b.array() *= eq.row_a.array();
    P.h.array() *= eq.row_g.array();
    P.c.array() *= eq.col.array();

    eq.obj_scale = std::max(1.0, P.c.lpNorm<Eigen::Infinity>());
    double rhs_norm = 0.0;
    if (p > 0) rhs_norm = P.b.lpNorm<Eigen::Infinity>();
    rhs_norm = std::max(rhs_norm, P.h.lpNorm<Eigen::Infinity>());
    eq.rhs_scale = std::max(1.0, rhs_norm);
    P.c /= eq.obj_scale;
    P.b /= eq.rhs_scale;
    P.h /= eq.rhs_scale;
    return eq;
}

}  // namespace detail

// ---- main solver -------------------------------------------------------------

inline ConicSolution solve(const Problem& problem, const ConicSettings& settings = {}) {
    using namespace detail;
    const auto t_start = std::chrono::steady_clock::now();

    Problem P = problem;  // scaled copy
    if (P.G.rows() != P.cone.dim())
        throw std::invalid_argument("conic::solve: G rows do not match cone dimension");
    if (P.G.rows() == 0) throw std::invalid_argument("conic::solve: empty cone");
    const Equilibration eq = equilibrate(P, settings.ruiz_iters);

    const int n = static_cast<int>(P.c.size());
    const int p = static_cast<int>(P.A.rows());
    const int m = static_cast<int>(P.G.rows());
    const ConeSpec& K = P.cone;
    const int deg = K.degree();
    const Vec e = cone_identity(K);

    ConicSolution sol;
    auto finalize_point = [&](const Vec& x, const Vec& y, const Vec& z, const Vec& s, double tau) {
        sol.x = eq.col.cwiseProduct(x) * (eq.rhs_scale / tau);
        sol.s = s.cwiseQuotient(eq.row_g) * (eq.rhs_scale / tau);
        sol.y = eq.row_a.cwiseProduct(y) * (eq.obj_scale / tau);
        sol.z = eq.row_g.cwiseProduct(z) * (eq.obj_scale / tau);
        sol.primal_obj = problem.c.dot(sol.x);
        double d = 0.0;
        if (p > 0) d -= problem.b.dot(sol.y);
        d -= problem.h.dot(sol.z);
        sol.dual_obj = d;
    };

    detail::Scaling W;
    KktSolver kkt(P.A, P.G, K, settings.static_reg, settings.refine_steps);

    // Identity-scaling factorization for the starting point.
    const Vec s0 = e, z0 = e;
    if (!compute_scaling(K, s0, z0, W)) {
        sol.message = "internal: identity scaling failed";
        return sol;
    }
    {
        double reg = settings.static_reg;
        int tries = 0;
        while (!kkt.factor(W)) {
            reg *= 100.0;
            kkt.set_reg(reg);
            if (++tries > 5) {
                sol.message = "initial KKT factorization failed";
                return sol;
            }
        }
    }

    Vec x(n), y(p), z(m), s(m);
    {
        Vec ux, uy, uz;
        kkt.solve(Vec::Zero(n), P.b, P.h, ux, uy, uz);
        x = ux;
        Vec scand = -uz;
        const double margin = cone_margin(K, scand);
        s = margin > 0.0 ? scand : scand + (1.0 - margin) * e;

        kkt.solve(-P.c, Vec::Zero(p), Vec::Zero(m), ux, uy, uz);
        y = uy;
        Vec zcand = uz;
        const double zmargin = cone_margin(K, zcand);
        z = zmargin > 0.0 ? zcand : zcand + (1.0 - zmargin) * e;
    }
    double tau = 1.0, kappa = 1.0;

    const double normb = 1.0 + (p > 0 ? P.b.norm() : 0.0);
    const double normh = 1.0 + P.h.norm();
    const double normc = 1.0 + P.c.norm();

    double best_metric = kInf;
    Vec bx, by_, bz_, bs_;
    double btau = 1.0;
    double bpres = kInf, bdres = kInf, bgap = kInf, bpobj = 0;

    Vec dsa, dza;
    double dtaua = 0.0, dkappaa = 0.0;

    // Grades the best iterate seen so far; an iterate inside the acceptance
    // thresholds still counts as optimal when the tight targets proved
    // unreachable in floating point.
    auto wrap_up = [&](ConicStatus fallback, const std::string& why, int iters) {
        finalize_point(bx, by_, bz_, bs_, btau);
        sol.gap = bgap;
        sol.pres = bpres;
        sol.dres = bdres;
        sol.iters = iters;
        if (bpres <= settings.pres_accept && bdres <= settings.dres_accept &&
            bgap / std::max(1.0, std::abs(bpobj)) <= settings.reltol_accept) {
            sol.status = ConicStatus::Optimal;
            sol.message = "reduced-accuracy optimum (" + why + ")";
        } else {
            sol.status = fallback;
            sol.message = why;
        }
        return sol;
    };

    for (int iter = 0;; ++iter) {
        // residuals of the homogeneous system
        Vec r1 = P.G.transpose() * z + P.c * tau;  // + A'y below
        if (p > 0) r1 += P.A.transpose() * y;
        Vec r2 = p > 0 ? Vec(P.A * x - P.b * tau) : Vec(0);
        Vec r3 = P.G * x + s - P.h * tau;
        double r4 = P.c.dot(x) + P.h.dot(z) + kappa;
        if (p > 0) r4 += P.b.dot(y);
        const double mu = (s.dot(z) + tau * kappa) / (deg + 1);

        const double pcost = P.c.dot(x) / tau;
        const double gap = s.dot(z) / (tau * tau);
        const double relgap = gap / std::max(1.0, std::abs(pcost));
        const double pres =
            std::max(p > 0 ? r2.norm() / tau / normb : 0.0, r3.norm() / tau / normh);
        const double dres = r1.norm() / tau / normc;

        const double metric = std::max({pres, dres, relgap});
        if (metric < best_metric) {
            best_metric = metric;
            bx = x;
            by_ = y;
            bz_ = z;
            bs_ = s;
            btau = tau;
            bpres = pres;
            bdres = dres;
            bgap = gap;
            bpobj = pcost;
        }

        if (pres <= settings.feastol && dres <= settings.feastol &&
            (gap <= settings.abstol || relgap <= settings.reltol)) {
            finalize_point(x, y, z, s, tau);
            sol.status = ConicStatus::Optimal;
            sol.gap = gap;
            sol.pres = pres;
            sol.dres = dres;
            sol.iters = iter;
            return sol;
        }

        // infeasibility certificates
        double byhz = P.h.dot(z);
        if (p > 0) byhz += P.b.dot(y);
        if (byhz < -1e-12) {
            Vec dual_cert = P.G.transpose() * z;
            if (p > 0) dual_cert += P.A.transpose() * y;
            if (dual_cert.norm() / (-byhz) <= settings.feastol * normc) {
                sol.status = ConicStatus::PrimalInfeasible;
                sol.y = eq.row_a.cwiseProduct(y) / (-byhz);
                sol.z = eq.row_g.cwiseProduct(z) / (-byhz);
                sol.iters = iter;
                sol.message = "primal infeasibility certificate found";
                return sol;
            }
        }
        const double cx = P.c.dot(x);
        if (cx < -1e-12) {
            const double pr = std::max(p > 0 ? (P.A * x).norm() : 0.0, (P.G * x + s).norm());
            if (pr / (-cx) <= settings.feastol * std::max(normb, normh)) {
                sol.status = ConicStatus::DualInfeasible;
                sol.x = eq.col.cwiseProduct(x) / (-cx);
                sol.iters = iter;
                sol.message = "dual infeasibility certificate found (primal unbounded)";
                return sol;
            }
        }

        const bool over_time =
            settings.time_limit_s > 0.0 &&
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count() >
                settings.time_limit_s;
        if (iter >= settings.max_iters || over_time || mu < 1e-300)
            return wrap_up(ConicStatus::MaxIters, "iteration or time limit reached", iter);

        if (!compute_scaling(K, s, z, W))
            return wrap_up(ConicStatus::Numerical, "iterate reached the cone boundary", iter);
        {
            double reg = settings.static_reg;
            int tries = 0;
            bool ok = kkt.factor(W);
            while (!ok && tries < 5) {
                reg *= 100.0;
                kkt.set_reg(reg);
                ok = kkt.factor(W);
                ++tries;
            }
            if (!ok)
                return wrap_up(ConicStatus::Numerical, "KKT factorization failed", iter);
        }

        Vec x1, y1, z1;
        kkt.solve(-P.c, P.b, P.h, x1, y1, z1);
        double den = P.c.dot(x1) + P.h.dot(z1) - kappa / tau;
        if (p > 0) den += P.b.dot(y1);

        Vec dx, dy, dz, ds;
        double dtau = 0.0, dkappa = 0.0;
        double sigma = 0.0, mu_target = 0.0;

        for (int pass = 0; pass < 2; ++pass) {
            Vec ds_t;  // complementarity target in scaled space
            double dk_t;
            if (pass == 0) {
                ds_t = -jordan_mul(K, W.lambda, W.lambda);
                dk_t = -tau * kappa;
            } else {
                ds_t = -jordan_mul(K, W.lambda, W.lambda) -
                       jordan_mul(K, apply_Winv(K, W, dsa), apply_W(K, W, dza)) +
                       sigma * mu_target * e;
                dk_t = -tau * kappa - dtaua * dkappaa + sigma * mu_target;
            }
            const Vec wld = apply_W(K, W, jordan_div(K, W.lambda, ds_t));
            Vec ux, uy, uz;
            kkt.solve(-r1, -r2, -(r3 + wld), ux, uy, uz);
            double num = -r4 - dk_t / tau - (P.c.dot(ux) + P.h.dot(uz));
            if (p > 0) num -= P.b.dot(uy);
            const double dt = num / den;
            dx = ux + dt * x1;
            dy = p > 0 ? Vec(uy + dt * y1) : Vec(0);
            dz = uz + dt * z1;
            ds = wld - apply_W2(K, W, dz);
            dtau = dt;
            dkappa = (dk_t - kappa * dt) / tau;

            double amax = std::min(max_step(K, s, ds), max_step(K, z, dz));
            if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
            if (dkappa < 0.0) amax = std::min(amax, -kappa / dkappa);

            if (pass == 0) {
                const double a = std::min(1.0, amax);
                const double mu_aff =
                    ((s + a * ds).dot(z + a * dz) + (tau + a * dtau) * (kappa + a * dkappa)) /
                    (deg + 1);
                sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);
                mu_target = mu;
                dsa = ds;
                dza = dz;
                dtaua = dtau;
                dkappaa = dkappa;
            } else {
                double a = std::min(1.0, 0.99 * amax);
                // keep the stepped iterate strictly scalable
                for (int back = 0; back < 60; ++back) {
                    if (strict_interior(K, s + a * ds) && strict_interior(K, z + a * dz) &&
                        tau + a * dtau > 0.0 && kappa + a * dkappa > 0.0)
                        break;
                    a *= 0.7;
                }
                x += a * dx;
                if (p > 0) y += a * dy;
                z += a * dz;
                s += a * ds;
                tau += a * dtau;
                kappa += a * dkappa;
            }
        }
    }
}

}  // namespace fhsap::conic

#endif  // FHSAP_CONIC_HPP
