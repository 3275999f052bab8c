#pragma once

/**
 * @file pz.hpp
 * @brief Polynomial zonotopes and their set operations.
 *
 * A polynomial zonotope <c, G, GI, E> is the set
 *
 *   { c + sum_i (prod_k alpha_k^E(k,i)) G(:,i) + sum_j beta_j GI(:,j)
 *     | alpha_k, beta_j in [-1, 1] }.
 *
 * The alpha_k are dependent factors (shared across generators through the
 * exponent matrix E), the beta_j are independent factors. Factor identity is
 * positional: sets passed together to dependency-aware operations must use
 * the same row ordering of E.
 *
 * All values are immutable after construction and all operations are pure,
 * so concurrent use is safe.
 */

#include "polyzono/interval.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace polyzono {

/// Exponent matrix; entries are non-negative integers.
using ExpMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/**
 * @brief Assignment of dependent (alpha) and independent (beta) factors.
 *
 * Every entry must lie in [-1, 1].
 */
struct FactorAssignment {
    Vec alpha;
    Vec beta;
};

/// Plain zonotope {center + generators * beta | beta in [-1,1]^q}.
struct Zonotope {
    Vec center;
    Mat generators;
};

/**
 * @brief Sparse-representation polynomial zonotope.
 */
class PolyZonotope {
  public:
    /// Degenerate point set {c}.
    explicit PolyZonotope(Vec c);

    /// Validates dimension consistency and non-negativity of E.
    PolyZonotope(Vec c, Mat G, Mat GI, ExpMat E);

    /// Box [l, u] as a purely dependent set: <mid, diag(rad), [], I_n>.
    /// Zero-width dimensions keep their (zero) generator column so that the
    /// factor count always equals the dimension.
    static PolyZonotope from_box(const Box& box);

    const Vec& c() const { return c_; }
    const Mat& G() const { return G_; }
    const Mat& GI() const { return GI_; }
    const ExpMat& E() const { return E_; }

    Eigen::Index dim() const { return c_.size(); }                ///< n
    Eigen::Index num_dependent() const { return G_.cols(); }      ///< h
    Eigen::Index num_independent() const { return GI_.cols(); }   ///< q
    Eigen::Index num_factors() const { return E_.rows(); }        ///< p

    /// Representation order (h + q) / n.
    double order() const;

  private:
    Vec c_;
    Mat G_;
    Mat GI_;
    ExpMat E_;
};

/// Monomial value prod_k alpha_k^E(k,i) for one exponent column (0^0 = 1).
double monomial(const Vec& alpha, const ExpMat& E, Eigen::Index col);

/// Point of the defining polynomial map for a concrete factor assignment.
Vec evaluate(const PolyZonotope& pz, const FactorAssignment& fa);

/// A * PZ + b = <A c + b, A G, A GI, E>.
PolyZonotope affine_map(const Mat& A, const PolyZonotope& pz, const Vec& b);

/// Minkowski sum with an interval; fresh independent generators
/// 0.5 diag(u - l), zero-width dimensions dropped.
PolyZonotope minkowski_sum_interval(const PolyZonotope& pz, const Box& box);

/**
 * @brief Dependency-preserving Cartesian product.
 *
 * Both operands must share the dependent-factor space (equal p, positional
 * identity). Columns of pz2's exponent matrix are matched against pz1's by
 * exact equality to recover the [E1 E2] partition; unmatched columns form the
 * private block. The first shared_beta independent factors of pz2 are
 * identified with pz1's leading independent factors; the remainder stays
 * private (default: all private).
 */
PolyZonotope cartesian_product_dep(const PolyZonotope& pz1, const PolyZonotope& pz2,
                                   Eigen::Index shared_beta = 0);

/**
 * @brief Tight interval enclosure.
 *
 * [c + g1 - g2 - g3 - g4, c + g1 + g2 + g3 + g4] where H collects the
 * exponent columns that are even in every factor (their monomials range over
 * [0,1]), K the rest, and
 *   g1 = 0.5 sum_H G(:,i),   g2 = 0.5 sum_H |G(:,i)|,
 *   g3 = sum_K |G(:,i)|,     g4 = sum_j |GI(:,j)|.
 */
Box interval_enclosure(const PolyZonotope& pz);

/// Enclosing zonotope: center c + 0.5 sum_H G(:,i), generators
/// [0.5 G(:,H)  G(:,K)  GI].
Zonotope zonotope_enclosure(const PolyZonotope& pz);

/// Indices of all-even exponent columns (the set H above).
std::vector<Eigen::Index> even_exponent_columns(const ExpMat& E);

/**
 * @brief Image of a one-dimensional polynomial zonotope under
 *        g(x) = a1 x^2 + a2 x + a3.
 *
 * Returns the full block structure
 *   c_q  = a1 c^2 + a2 c + a3 + 0.5 a1 sum_j GI(j)^2
 *   G_q  = [(2 a1 c + a2) G   a1 Ghat]
 *   E_q  = [E  Ehat]
 *   GI_q = [(2 a1 c + a2) GI  2 a1 Gbar  a1 Gcheck]
 * with Ghat/Ehat the squared and pairwise dependent blocks, Gbar the
 * dependent-independent cross terms in i-major order and Gcheck the
 * independent squares and pairwise products. Exact-zero columns are kept so
 * that witness indices stay aligned; use compact() to drop them.
 *
 * Output column counts: h + h(h+1)/2 dependent, q + hq + q(q+1)/2
 * independent.
 */
PolyZonotope quadratic_map(const PolyZonotope& pz, double a1, double a2, double a3);

/**
 * @brief Factor assignment for the output of quadratic_map such that
 *        evaluate(quadratic_map(pz, a), extend(fa)) == g(evaluate(pz, fa))
 *        exactly.
 *
 * alpha is unchanged; beta is extended by the substituted terms
 *   beta_j * prod_k alpha_k^E(k,i)  (cross block, i-major),
 *   2 beta_i^2 - 1                  (square block),
 *   beta_i beta_j                   (pairwise block, i < j lexicographic),
 * all of which lie in [-1, 1].
 */
FactorAssignment quadratic_map_witness(const PolyZonotope& pz, const FactorAssignment& fa);

/**
 * @brief Order reduction.
 *
 * If (h + q) <= rho * n the input is returned unchanged. Otherwise all
 * generator columns are ranked by infinity norm (stable, ties by original
 * index), the floor(rho * n) largest are kept and the rest are
 * over-approximated by their interval hull, which is appended as at most n
 * axis-aligned independent generators. Exponent rows are never deleted, so
 * factor identity survives reduction.
 */
PolyZonotope reduce_order(const PolyZonotope& pz, double rho);

/// Reduction bookkeeping for witness replay.
struct ReductionRecord {
    bool reduced = false;
    std::vector<Eigen::Index> removed_dependent;    ///< original dependent column indices
    std::vector<Eigen::Index> removed_independent;  ///< original independent column indices
    Mat removed_G;       ///< generators of removed dependent columns
    ExpMat removed_E;    ///< exponents of removed dependent columns
    Mat removed_GI;      ///< generators of removed independent columns
    Vec box_mid;         ///< centre shift absorbed into c
    Vec box_rad;         ///< per-dimension radius of the appended box part
    std::vector<Eigen::Index> box_dims;  ///< dims that received a box column, in order
};

/// reduce_order variant that reports what was removed.
PolyZonotope reduce_order(const PolyZonotope& pz, double rho, ReductionRecord& record);

/// Column bookkeeping for compact(); dependent factors are never touched.
struct CompactRecord {
    std::vector<Eigen::Index> kept_independent;  ///< surviving GI columns (input indices)
};

/**
 * @brief Redundancy removal; the resulting set is pointwise equal.
 *
 * Constant columns (all-zero exponent column) move into the centre, dependent
 * columns with identical exponent columns are merged by summing generators,
 * and all-zero generator columns are dropped. Exponent rows are preserved.
 */
PolyZonotope compact(const PolyZonotope& pz);
PolyZonotope compact(const PolyZonotope& pz, CompactRecord& record);

}  // namespace polyzono
