#include "nosig/random.hpp"

#include <cmath>
#include <numbers>

namespace nosig {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) return 0;
    // Rejection keeps the result exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

PureState random_state(int dim, Rng& rng) {
    ComplexVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.complex_normal();
    return PureState::normalized(v);
}

ComplexMatrix random_hermitian(int dim, Rng& rng) {
    const ComplexMatrix g = random_matrix(dim, dim, rng);
    return 0.5 * (g + g.adjoint());
}

ComplexMatrix random_psd(int dim, int rank, Rng& rng) {
    const ComplexMatrix g = random_matrix(dim, rank, rng);
    return g * g.adjoint();
}

ComplexMatrix random_matrix(int rows, int cols, Rng& rng) {
    ComplexMatrix g(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) g(i, j) = rng.complex_normal() / std::sqrt(2.0);
    }
    return g;
}

}  // namespace nosig
