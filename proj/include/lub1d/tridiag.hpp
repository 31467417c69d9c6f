#pragma once

// Thomas elimination for symmetric tridiagonal systems, no pivoting.
// Valid for the SPD / diagonally dominant matrices arising here; the matrices
// are kept as two diagonals and never densified.

#include <stdexcept>
#include <vector>

namespace lub1d {

struct SymTridiag {
    std::vector<double> diag;  // n entries
    std::vector<double> off;   // n-1 entries, off[i] couples rows i and i+1

    std::size_t size() const { return diag.size(); }

    // y = A x
    std::vector<double> apply(const std::vector<double>& x) const {
        const std::size_t n = diag.size();
        std::vector<double> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = diag[i] * x[i];
            if (i > 0) y[i] += off[i - 1] * x[i - 1];
            if (i + 1 < n) y[i] += off[i] * x[i + 1];
        }
        return y;
    }
};

// Solves A x = b for symmetric tridiagonal A; b is consumed.
inline std::vector<double> solve_sym_tridiag(const SymTridiag& a, std::vector<double> b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw std::invalid_argument("tridiagonal rhs size mismatch");
    if (n == 0) return b;
    std::vector<double> c(n > 1 ? n - 1 : 0);
    double piv = a.diag[0];
    if (piv == 0.0) throw std::runtime_error("zero pivot in tridiagonal solve");
    b[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = a.off[i - 1] / piv;
        piv = a.diag[i] - a.off[i - 1] * c[i - 1];
        if (piv == 0.0) throw std::runtime_error("zero pivot in tridiagonal solve");
        b[i] = (b[i] - a.off[i - 1] * b[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) b[i] -= c[i] * b[i + 1];
    return b;
}

}  // namespace lub1d
