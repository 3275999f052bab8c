#include "polyzono/pz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polyzono {

namespace {

void check_factor_range(const Vec& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!(v(i) >= -1.0 && v(i) <= 1.0)) {
            throw std::invalid_argument(std::string(what) + " factor outside [-1,1] at index " +
                                        std::to_string(i));
        }
    }
}

bool column_all_even(const ExpMat& E, Eigen::Index col) {
    for (Eigen::Index k = 0; k < E.rows(); ++k) {
        if (E(k, col) % 2 != 0) {
            return false;
        }
    }
    return true;
}

bool column_all_zero(const ExpMat& E, Eigen::Index col) {
    for (Eigen::Index k = 0; k < E.rows(); ++k) {
        if (E(k, col) != 0) {
            return false;
        }
    }
    return true;
}

}  // namespace

PolyZonotope::PolyZonotope(Vec c)
    : c_(std::move(c)), G_(c_.size(), 0), GI_(c_.size(), 0), E_(0, 0) {}

PolyZonotope::PolyZonotope(Vec c, Mat G, Mat GI, ExpMat E)
    : c_(std::move(c)), G_(std::move(G)), GI_(std::move(GI)), E_(std::move(E)) {
    const Eigen::Index n = c_.size();
    if (G_.cols() == 0) {
        G_.resize(n, 0);
    }
    if (GI_.cols() == 0) {
        GI_.resize(n, 0);
    }
    if (E_.cols() == 0) {
        E_.conservativeResize(E_.rows(), 0);
    }
    if (G_.cols() != E_.cols()) {
        throw std::invalid_argument("PolyZonotope: G and E column counts differ");
    }
    if (G_.rows() != n || GI_.rows() != n) {
        throw std::invalid_argument("PolyZonotope: generator row count does not match dimension");
    }
    for (Eigen::Index i = 0; i < E_.rows(); ++i) {
        for (Eigen::Index j = 0; j < E_.cols(); ++j) {
            if (E_(i, j) < 0) {
                throw std::invalid_argument("PolyZonotope: negative exponent entry");
            }
        }
    }
}

PolyZonotope PolyZonotope::from_box(const Box& box) {
    const Eigen::Index n = box.dim();
    Mat G = Mat::Zero(n, n);
    G.diagonal() = box.rad();
    ExpMat E = ExpMat::Identity(n, n);
    return PolyZonotope(box.mid(), std::move(G), Mat(n, 0), std::move(E));
}

double PolyZonotope::order() const {
    if (dim() == 0) {
        return 0.0;
    }
    return static_cast<double>(num_dependent() + num_independent()) / static_cast<double>(dim());
}

double monomial(const Vec& alpha, const ExpMat& E, Eigen::Index col) {
    double m = 1.0;
    for (Eigen::Index k = 0; k < E.rows(); ++k) {
        const std::int64_t e = E(k, col);
        double base = alpha(k);
        std::int64_t exp = e;
        while (exp > 0) {
            if (exp & 1) {
                m *= base;
            }
            base *= base;
            exp >>= 1;
        }
    }
    return m;
}

Vec evaluate(const PolyZonotope& pz, const FactorAssignment& fa) {
    if (fa.alpha.size() != pz.num_factors() || fa.beta.size() != pz.num_independent()) {
        throw std::invalid_argument("evaluate: factor assignment dimensions do not match");
    }
    check_factor_range(fa.alpha, "evaluate: dependent");
    check_factor_range(fa.beta, "evaluate: independent");

    Vec x = pz.c();
    for (Eigen::Index i = 0; i < pz.num_dependent(); ++i) {
        x += monomial(fa.alpha, pz.E(), i) * pz.G().col(i);
    }
    if (pz.num_independent() > 0) {
        x += pz.GI() * fa.beta;
    }
    return x;
}

PolyZonotope affine_map(const Mat& A, const PolyZonotope& pz, const Vec& b) {
    if (A.cols() != pz.dim()) {
        throw std::invalid_argument("affine_map: matrix column count does not match set dimension");
    }
    if (b.size() != A.rows()) {
        throw std::invalid_argument("affine_map: offset length does not match matrix row count");
    }
    return PolyZonotope(A * pz.c() + b, A * pz.G(), A * pz.GI(), pz.E());
}

PolyZonotope minkowski_sum_interval(const PolyZonotope& pz, const Box& box) {
    if (box.dim() != pz.dim()) {
        throw std::invalid_argument("minkowski_sum_interval: interval dimension mismatch");
    }
    const Eigen::Index n = pz.dim();
    const Vec rad = box.rad();

    Eigen::Index extra = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (rad(i) != 0.0) {
            ++extra;
        }
    }
    Mat GI(n, pz.num_independent() + extra);
    GI.leftCols(pz.num_independent()) = pz.GI();
    Eigen::Index col = pz.num_independent();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (rad(i) != 0.0) {
            GI.col(col).setZero();
            GI(i, col) = rad(i);
            ++col;
        }
    }
    return PolyZonotope(pz.c() + box.mid(), pz.G(), std::move(GI), pz.E());
}

PolyZonotope cartesian_product_dep(const PolyZonotope& pz1, const PolyZonotope& pz2,
                                   Eigen::Index shared_beta) {
    if (pz1.num_factors() != pz2.num_factors()) {
        throw std::invalid_argument("cartesian_product_dep: dependent factor counts differ");
    }
    if (shared_beta < 0 || shared_beta > std::min(pz1.num_independent(), pz2.num_independent())) {
        throw std::invalid_argument("cartesian_product_dep: invalid shared independent count");
    }
    const Eigen::Index n1 = pz1.dim();
    const Eigen::Index n2 = pz2.dim();
    const Eigen::Index h1 = pz1.num_dependent();
    const Eigen::Index h2 = pz2.num_dependent();
    const Eigen::Index q1 = pz1.num_independent();
    const Eigen::Index q2 = pz2.num_independent();
    const Eigen::Index p = pz1.num_factors();

    // match pz2's exponent columns against pz1's to recover the [E1 E2] split
    std::vector<bool> used(static_cast<std::size_t>(h2), false);
    Mat G2_aligned = Mat::Zero(n2, h1);
    for (Eigen::Index i = 0; i < h1; ++i) {
        for (Eigen::Index j = 0; j < h2; ++j) {
            if (!used[static_cast<std::size_t>(j)] && pz2.E().col(j) == pz1.E().col(i)) {
                G2_aligned.col(i) = pz2.G().col(j);
                used[static_cast<std::size_t>(j)] = true;
                break;
            }
        }
    }
    std::vector<Eigen::Index> private_cols;
    for (Eigen::Index j = 0; j < h2; ++j) {
        if (!used[static_cast<std::size_t>(j)]) {
            private_cols.push_back(j);
        }
    }
    const Eigen::Index u = static_cast<Eigen::Index>(private_cols.size());

    Vec c(n1 + n2);
    c << pz1.c(), pz2.c();

    Mat G = Mat::Zero(n1 + n2, h1 + u);
    G.block(0, 0, n1, h1) = pz1.G();
    G.block(n1, 0, n2, h1) = G2_aligned;
    ExpMat E(p, h1 + u);
    E.leftCols(h1) = pz1.E();
    for (Eigen::Index k = 0; k < u; ++k) {
        G.block(n1, h1 + k, n2, 1) = pz2.G().col(private_cols[static_cast<std::size_t>(k)]);
        E.col(h1 + k) = pz2.E().col(private_cols[static_cast<std::size_t>(k)]);
    }

    const Eigen::Index s = shared_beta;
    Mat GI = Mat::Zero(n1 + n2, q1 + (q2 - s));
    GI.block(0, 0, n1, q1) = pz1.GI();
    GI.block(n1, 0, n2, s) = pz2.GI().leftCols(s);
    GI.block(n1, q1, n2, q2 - s) = pz2.GI().rightCols(q2 - s);

    return PolyZonotope(std::move(c), std::move(G), std::move(GI), std::move(E));
}

std::vector<Eigen::Index> even_exponent_columns(const ExpMat& E) {
    std::vector<Eigen::Index> H;
    for (Eigen::Index i = 0; i < E.cols(); ++i) {
        if (column_all_even(E, i)) {
            H.push_back(i);
        }
    }
    return H;
}

Box interval_enclosure(const PolyZonotope& pz) {
    const Eigen::Index n = pz.dim();
    Vec g1 = Vec::Zero(n);
    Vec g2 = Vec::Zero(n);
    Vec g3 = Vec::Zero(n);
    Vec g4 = Vec::Zero(n);
    for (Eigen::Index i = 0; i < pz.num_dependent(); ++i) {
        if (column_all_even(pz.E(), i)) {
            g1 += 0.5 * pz.G().col(i);
            g2 += 0.5 * pz.G().col(i).cwiseAbs();
        } else {
            g3 += pz.G().col(i).cwiseAbs();
        }
    }
    for (Eigen::Index j = 0; j < pz.num_independent(); ++j) {
        g4 += pz.GI().col(j).cwiseAbs();
    }
    const Vec base = pz.c() + g1;
    const Vec spread = g2 + g3 + g4;
    return Box(base - spread, base + spread);
}

Zonotope zonotope_enclosure(const PolyZonotope& pz) {
    const Eigen::Index n = pz.dim();
    const std::vector<Eigen::Index> H = even_exponent_columns(pz.E());

    Vec center = pz.c();
    Mat gens(n, pz.num_dependent() + pz.num_independent());
    Eigen::Index col = 0;
    for (Eigen::Index i : H) {
        center += 0.5 * pz.G().col(i);
        gens.col(col++) = 0.5 * pz.G().col(i);
    }
    for (Eigen::Index i = 0; i < pz.num_dependent(); ++i) {
        if (!column_all_even(pz.E(), i)) {
            gens.col(col++) = pz.G().col(i);
        }
    }
    gens.rightCols(pz.num_independent()) = pz.GI();
    return Zonotope{std::move(center), std::move(gens)};
}

PolyZonotope quadratic_map(const PolyZonotope& pz, double a1, double a2, double a3) {
    if (pz.dim() != 1) {
        throw std::invalid_argument("quadratic_map: set must be one-dimensional");
    }
    const Eigen::Index h = pz.num_dependent();
    const Eigen::Index q = pz.num_independent();
    const Eigen::Index p = pz.num_factors();
    const double c0 = pz.c()(0);
    const Eigen::RowVectorXd g = pz.G().row(0);
    const Eigen::RowVectorXd gi = pz.GI().row(0);
    const double lin = 2.0 * a1 * c0 + a2;

    Vec cq(1);
    cq(0) = a1 * c0 * c0 + a2 * c0 + a3 + 0.5 * a1 * gi.squaredNorm();

    // dependent part: [lin*G  a1*G^2  2 a1 G_i G_j], exponents [E  2E  E_i + E_j]
    const Eigen::Index h_out = h + h + h * (h - 1) / 2;
    Mat Gq(1, h_out);
    ExpMat Eq(p, h_out);
    Gq.leftCols(h) = lin * g;
    Eq.leftCols(h) = pz.E();
    Gq.middleCols(h, h) = a1 * g.cwiseProduct(g);
    Eq.middleCols(h, h) = 2 * pz.E();
    Eigen::Index col = 2 * h;
    for (Eigen::Index i = 0; i < h; ++i) {
        for (Eigen::Index j = i + 1; j < h; ++j) {
            Gq(0, col) = 2.0 * a1 * g(i) * g(j);
            Eq.col(col) = pz.E().col(i) + pz.E().col(j);
            ++col;
        }
    }

    // independent part: [lin*GI  2 a1 G_i GI_j (i-major)  0.5 a1 GI^2  2 a1 GI_i GI_j]
    const Eigen::Index q_out = q + h * q + q + q * (q - 1) / 2;
    Mat GIq(1, q_out);
    GIq.leftCols(q) = lin * gi;
    col = q;
    for (Eigen::Index i = 0; i < h; ++i) {
        for (Eigen::Index j = 0; j < q; ++j) {
            GIq(0, col++) = 2.0 * a1 * g(i) * gi(j);
        }
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        GIq(0, col++) = 0.5 * a1 * gi(i) * gi(i);
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        for (Eigen::Index j = i + 1; j < q; ++j) {
            GIq(0, col++) = 2.0 * a1 * gi(i) * gi(j);
        }
    }

    return PolyZonotope(std::move(cq), std::move(Gq), std::move(GIq), std::move(Eq));
}

FactorAssignment quadratic_map_witness(const PolyZonotope& pz, const FactorAssignment& fa) {
    if (pz.dim() != 1) {
        throw std::invalid_argument("quadratic_map_witness: set must be one-dimensional");
    }
    if (fa.alpha.size() != pz.num_factors() || fa.beta.size() != pz.num_independent()) {
        throw std::invalid_argument("quadratic_map_witness: factor assignment dimensions mismatch");
    }
    const Eigen::Index h = pz.num_dependent();
    const Eigen::Index q = pz.num_independent();

    Vec beta_ext(q + h * q + q + q * (q - 1) / 2);
    beta_ext.head(q) = fa.beta;
    Eigen::Index col = q;
    for (Eigen::Index i = 0; i < h; ++i) {
        const double mono = monomial(fa.alpha, pz.E(), i);
        for (Eigen::Index j = 0; j < q; ++j) {
            beta_ext(col++) = fa.beta(j) * mono;
        }
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        beta_ext(col++) = 2.0 * fa.beta(i) * fa.beta(i) - 1.0;
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        for (Eigen::Index j = i + 1; j < q; ++j) {
            beta_ext(col++) = fa.beta(i) * fa.beta(j);
        }
    }
    return FactorAssignment{fa.alpha, std::move(beta_ext)};
}

PolyZonotope reduce_order(const PolyZonotope& pz, double rho) {
    ReductionRecord record;
    return reduce_order(pz, rho, record);
}

PolyZonotope reduce_order(const PolyZonotope& pz, double rho, ReductionRecord& record) {
    if (rho < 1.0) {
        throw std::invalid_argument("reduce_order: order threshold must be at least 1");
    }
    record = ReductionRecord{};
    const Eigen::Index n = pz.dim();
    const Eigen::Index h = pz.num_dependent();
    const Eigen::Index q = pz.num_independent();
    const Eigen::Index total = h + q;
    if (static_cast<double>(total) <= rho * static_cast<double>(n)) {
        return pz;
    }
    record.reduced = true;

    const Eigen::Index keep = static_cast<Eigen::Index>(std::floor(rho * static_cast<double>(n)));

    // rank columns by infinity norm, smallest first; stable keeps index order on ties
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> norms(static_cast<std::size_t>(total));
    for (Eigen::Index i = 0; i < h; ++i) {
        norms[static_cast<std::size_t>(i)] = pz.G().col(i).cwiseAbs().maxCoeff();
    }
    for (Eigen::Index j = 0; j < q; ++j) {
        norms[static_cast<std::size_t>(h + j)] = pz.GI().col(j).cwiseAbs().maxCoeff();
    }
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        return norms[static_cast<std::size_t>(a)] < norms[static_cast<std::size_t>(b)];
    });

    std::vector<bool> remove(static_cast<std::size_t>(total), false);
    for (Eigen::Index k = 0; k < total - keep; ++k) {
        remove[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = true;
    }

    // interval hull of the removed part; even monomials range over [0,1]
    Vec lo = Vec::Zero(n);
    Vec hi = Vec::Zero(n);
    for (Eigen::Index i = 0; i < h; ++i) {
        if (!remove[static_cast<std::size_t>(i)]) {
            continue;
        }
        record.removed_dependent.push_back(i);
        const Vec col = pz.G().col(i);
        if (column_all_even(pz.E(), i)) {
            lo += col.cwiseMin(Vec::Zero(n));
            hi += col.cwiseMax(Vec::Zero(n));
        } else {
            lo -= col.cwiseAbs();
            hi += col.cwiseAbs();
        }
    }
    for (Eigen::Index j = 0; j < q; ++j) {
        if (!remove[static_cast<std::size_t>(h + j)]) {
            continue;
        }
        record.removed_independent.push_back(j);
        lo -= pz.GI().col(j).cwiseAbs();
        hi += pz.GI().col(j).cwiseAbs();
    }

    const Eigen::Index rd = static_cast<Eigen::Index>(record.removed_dependent.size());
    const Eigen::Index ri = static_cast<Eigen::Index>(record.removed_independent.size());
    record.removed_G.resize(n, rd);
    record.removed_E.resize(pz.num_factors(), rd);
    for (Eigen::Index k = 0; k < rd; ++k) {
        record.removed_G.col(k) = pz.G().col(record.removed_dependent[static_cast<std::size_t>(k)]);
        record.removed_E.col(k) = pz.E().col(record.removed_dependent[static_cast<std::size_t>(k)]);
    }
    record.removed_GI.resize(n, ri);
    for (Eigen::Index k = 0; k < ri; ++k) {
        record.removed_GI.col(k) =
            pz.GI().col(record.removed_independent[static_cast<std::size_t>(k)]);
    }
    record.box_mid = 0.5 * (lo + hi);
    record.box_rad = 0.5 * (hi - lo);

    Mat G(n, h - rd);
    ExpMat E(pz.num_factors(), h - rd);
    Eigen::Index gcol = 0;
    for (Eigen::Index i = 0; i < h; ++i) {
        if (!remove[static_cast<std::size_t>(i)]) {
            G.col(gcol) = pz.G().col(i);
            E.col(gcol) = pz.E().col(i);
            ++gcol;
        }
    }

    Eigen::Index box_cols = 0;
    for (Eigen::Index d = 0; d < n; ++d) {
        if (record.box_rad(d) != 0.0) {
            ++box_cols;
        }
    }
    Mat GI(n, q - ri + box_cols);
    Eigen::Index icol = 0;
    for (Eigen::Index j = 0; j < q; ++j) {
        if (!remove[static_cast<std::size_t>(h + j)]) {
            GI.col(icol++) = pz.GI().col(j);
        }
    }
    for (Eigen::Index d = 0; d < n; ++d) {
        if (record.box_rad(d) != 0.0) {
            GI.col(icol).setZero();
            GI(d, icol) = record.box_rad(d);
            record.box_dims.push_back(d);
            ++icol;
        }
    }

    return PolyZonotope(pz.c() + record.box_mid, std::move(G), std::move(GI), std::move(E));
}

PolyZonotope compact(const PolyZonotope& pz) {
    CompactRecord record;
    return compact(pz, record);
}

PolyZonotope compact(const PolyZonotope& pz, CompactRecord& record) {
    record = CompactRecord{};
    const Eigen::Index n = pz.dim();
    const Eigen::Index h = pz.num_dependent();
    const Eigen::Index q = pz.num_independent();
    const Eigen::Index p = pz.num_factors();

    // merge dependent columns with identical exponent vectors; constant
    // columns (all-zero exponents) fold into the centre
    Vec c = pz.c();
    std::map<std::vector<std::int64_t>, Eigen::Index> first_seen;
    std::vector<Eigen::Index> merged_order;
    std::vector<Vec> merged_gens;
    for (Eigen::Index i = 0; i < h; ++i) {
        if (column_all_zero(pz.E(), i)) {
            c += pz.G().col(i);
            continue;
        }
        std::vector<std::int64_t> key(static_cast<std::size_t>(p));
        for (Eigen::Index k = 0; k < p; ++k) {
            key[static_cast<std::size_t>(k)] = pz.E()(k, i);
        }
        auto it = first_seen.find(key);
        if (it == first_seen.end()) {
            first_seen.emplace(std::move(key), static_cast<Eigen::Index>(merged_gens.size()));
            merged_order.push_back(i);
            merged_gens.push_back(pz.G().col(i));
        } else {
            merged_gens[static_cast<std::size_t>(it->second)] += pz.G().col(i);
        }
    }

    std::vector<Eigen::Index> kept_dep;
    for (std::size_t k = 0; k < merged_gens.size(); ++k) {
        if (merged_gens[k].cwiseAbs().maxCoeff() != 0.0) {
            kept_dep.push_back(static_cast<Eigen::Index>(k));
        }
    }
    Mat G(n, static_cast<Eigen::Index>(kept_dep.size()));
    ExpMat E(p, static_cast<Eigen::Index>(kept_dep.size()));
    for (std::size_t k = 0; k < kept_dep.size(); ++k) {
        G.col(static_cast<Eigen::Index>(k)) = merged_gens[static_cast<std::size_t>(kept_dep[k])];
        E.col(static_cast<Eigen::Index>(k)) =
            pz.E().col(merged_order[static_cast<std::size_t>(kept_dep[k])]);
    }

    for (Eigen::Index j = 0; j < q; ++j) {
        if (pz.GI().col(j).cwiseAbs().maxCoeff() != 0.0) {
            record.kept_independent.push_back(j);
        }
    }
    Mat GI(n, static_cast<Eigen::Index>(record.kept_independent.size()));
    for (std::size_t k = 0; k < record.kept_independent.size(); ++k) {
        GI.col(static_cast<Eigen::Index>(k)) = pz.GI().col(record.kept_independent[k]);
    }

    return PolyZonotope(std::move(c), std::move(G), std::move(GI), std::move(E));
}

}  // namespace polyzono
