#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace driftcast {

using Vec = std::vector<double>;

// Dense row-major matrix, sized for the small systems handled here (n <= ~16).
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Mat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Mat operator*(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
Vec mat_vec(const Mat& a, const Vec& x);

double frobenius_norm(const Mat& a);
double euclidean_norm(std::span<const double> v);

// Deterministic pairwise (cascade) summation; fixed reduction tree
// regardless of how the values were produced.
double pairwise_sum(std::span<const double> values);

struct EigenDecomposition {
    Vec eigenvalues;  // ascending
    Mat eigenvectors; // columns, same order as eigenvalues
};

// Cyclic Jacobi iteration for symmetric matrices. Sweeps run in a fixed
// (p, q) order until the off-diagonal Frobenius norm falls below
// 1e-12 * ||A||_F (or absolutely to zero for the null matrix).
EigenDecomposition jacobi_eigen(const Mat& sym);

// Symmetric PSD square root via Jacobi: A = U diag(w) U^T with negative
// eigenvalues clamped to zero before the square root. If clamped_mass is
// given it receives the magnitude of the most negative eigenvalue seen.
Mat symmetric_sqrt(const Mat& sym, double* clamped_mass = nullptr);

// Solve the SPD system A x = b by Cholesky; throws SingularDesign when a
// pivot falls below tol * max-diagonal.
Vec solve_spd(Mat a, Vec b, double tol = 1e-12);

} // namespace driftcast
