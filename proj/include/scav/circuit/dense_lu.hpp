#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace scav::circuit {

/// Row-major square matrix, just enough for the small MNA systems here.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
    void zero() { std::fill(a_.begin(), a_.end(), 0.0); }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
/// Returns the column index of the first numerically singular pivot, or
/// nothing on success (x is left in b).
[[nodiscard]] inline std::optional<std::size_t> lu_solve(DenseMatrix& A, std::vector<double>& b) {
    const std::size_t n = A.size();
    // Pivots are judged against their own column's original scale, since MNA
    // columns mix conductances spanning many decades.
    std::vector<double> colmax(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) colmax[c] = std::max(colmax[c], std::abs(A(r, c)));

    for (std::size_t k = 0; k < n; ++k) {
        const double tiny = colmax[k] * 1e-13;
        std::size_t p = k;
        double best = std::abs(A(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(A(r, k)) > best) {
                best = std::abs(A(r, k));
                p = r;
            }
        }
        if (!(best > tiny)) return k;
        if (p != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A(k, c), A(p, c));
            std::swap(b[k], b[p]);
        }
        const double piv = A(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = A(r, k) / piv;
            if (f == 0.0) continue;
            A(r, k) = 0.0;
            for (std::size_t c = k + 1; c < n; ++c) A(r, c) -= f * A(k, c);
            b[r] -= f * b[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= A(k, c) * b[c];
        b[k] = s / A(k, k);
    }
    return std::nullopt;
}

}  // namespace scav::circuit
