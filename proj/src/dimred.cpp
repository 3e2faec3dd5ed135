#include "proctrace/dimred.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/Sparse>

#include "proctrace/rng.hpp"

namespace proctrace {

namespace {

constexpr std::size_t kOversampling = 10;
constexpr int kPowerIterations = 4;

Eigen::SparseMatrix<double> to_sparse(const FeatureMatrix& features) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t r = 0; r < features.rows.size(); ++r) {
        for (const auto& [idx, val] : features.rows[r].nonzeros) {
            triplets.emplace_back(static_cast<int>(r), static_cast<int>(idx), val);
        }
    }
    Eigen::SparseMatrix<double> x(static_cast<int>(features.rows.size()),
                                  static_cast<int>(features.width));
    x.setFromTriplets(triplets.begin(), triplets.end());
    return x;
}

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

ProjectionBasis fit_projection(const FeatureMatrix& features, std::size_t m, std::uint64_t seed) {
    const std::size_t n = features.rows.size();
    const std::size_t d = features.width;
    if (n == 0) throw ParamError("feature matrix is empty");
    if (m < 1 || m > std::min(n, d))
        throw ParamError("component count m=" + std::to_string(m) + " out of range [1, " +
                         std::to_string(std::min(n, d)) + "]");

    const Eigen::SparseMatrix<double> x = to_sparse(features);
    if (x.nonZeros() == 0) throw DataError("feature matrix is all zero");

    const auto l = static_cast<Eigen::Index>(std::min(m + kOversampling, std::min(n, d)));

    // Gaussian test matrix, filled in a fixed order so results only depend
    // on the seed.
    Rng rng(mix_seed(seed, 0x5fd1));
    Eigen::MatrixXd omega(static_cast<Eigen::Index>(n), l);
    for (Eigen::Index i = 0; i < omega.rows(); ++i)
        for (Eigen::Index j = 0; j < omega.cols(); ++j) omega(i, j) = rng.gaussian();

    // Range of x^T, refined by power iterations with re-orthonormalization.
    Eigen::MatrixXd q = thin_q(x.transpose() * omega);
    for (int it = 0; it < kPowerIterations; ++it) {
        const Eigen::MatrixXd w = thin_q(x * q);
        q = thin_q(x.transpose() * w);
    }

    // Exact SVD of the small projected matrix x*q (n x l).
    const Eigen::MatrixXd c = x * q;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd dirs = q * svd.matrixV();  // d x l right singular vectors of x

    ProjectionBasis basis;
    basis.m = m;
    basis.width = d;
    basis.seed = seed;
    basis.singular_values.resize(m);
    basis.directions.assign(m, std::vector<double>(d, 0.0));
    for (std::size_t k = 0; k < m; ++k) {
        basis.singular_values[k] = svd.singularValues()(static_cast<Eigen::Index>(k));
        Eigen::Index imax = 0;
        dirs.col(static_cast<Eigen::Index>(k)).cwiseAbs().maxCoeff(&imax);
        const double sign = dirs(imax, static_cast<Eigen::Index>(k)) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            basis.directions[k][i] = sign * dirs(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(k));
        }
    }
    return basis;
}

std::vector<double> project(const FeatureVector& v, const ProjectionBasis& basis) {
    if (v.length != basis.width)
        throw ParamError("vector length " + std::to_string(v.length) +
                         " does not match basis width " + std::to_string(basis.width));
    std::vector<double> coords(basis.m, 0.0);
    for (std::size_t k = 0; k < basis.m; ++k) {
        double acc = 0.0;
        const auto& dir = basis.directions[k];
        for (const auto& [idx, val] : v.nonzeros) acc += val * dir[static_cast<std::size_t>(idx)];
        coords[k] = acc;
    }
    return coords;
}

}  // namespace proctrace
