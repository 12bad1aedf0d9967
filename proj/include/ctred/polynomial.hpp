#pragma once

#include <complex>
#include <vector>

#include "matrix_kernels.hpp"

namespace ctred {

/// Dense polynomial, coefficients in ascending powers.
template <class T>
struct Poly {
    std::vector<T> c;

    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) { trim(); }
    static Poly constant(T v) { return Poly(std::vector<T>{v}); }

    int degree() const { return c.empty() ? -1 : static_cast<int>(c.size()) - 1; }
    T lead() const { return c.empty() ? T(0) : c.back(); }
    T operator[](std::size_t i) const { return i < c.size() ? c[i] : T(0); }

    void trim() {
        while (!c.empty() && c.back() == T(0)) c.pop_back();
    }

    template <class S>
    auto operator()(S s) const {
        using R = decltype(T() * s);
        R v = 0;
        for (std::size_t i = c.size(); i-- > 0;) v = v * s + R(c[i]);
        return v;
    }
};

template <class T>
Poly<T> operator+(const Poly<T>& a, const Poly<T>& b) {
    std::vector<T> r(std::max(a.c.size(), b.c.size()), T(0));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
    return Poly<T>(r);
}

template <class T>
Poly<T> operator-(const Poly<T>& a, const Poly<T>& b) {
    std::vector<T> r(std::max(a.c.size(), b.c.size()), T(0));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] - b[i];
    return Poly<T>(r);
}

template <class T>
Poly<T> operator*(const Poly<T>& a, const Poly<T>& b) {
    if (a.c.empty() || b.c.empty()) return Poly<T>();
    std::vector<T> r(a.c.size() + b.c.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return Poly<T>(r);
}

template <class T>
Poly<T> operator*(T k, const Poly<T>& a) {
    std::vector<T> r = a.c;
    for (auto& x : r) x *= k;
    return Poly<T>(r);
}

using RPoly = Poly<double>;
using CPoly = Poly<cplx>;

inline CPoly to_complex(const RPoly& p) {
    std::vector<cplx> c(p.c.begin(), p.c.end());
    return CPoly(c);
}

/// Monic complex polynomial with the given roots.
inline CPoly poly_from_roots(const std::vector<cplx>& roots) {
    std::vector<cplx> c{1.0};
    for (auto& r : roots) {
        std::vector<cplx> n(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            n[i + 1] += c[i];
            n[i] -= r * c[i];
        }
        c = n;
    }
    return CPoly(c);
}

/// Real polynomial from a conjugate-closed root set (imaginary residue dropped).
inline RPoly real_poly_from_roots(const std::vector<cplx>& roots) {
    CPoly p = poly_from_roots(roots);
    std::vector<double> c;
    for (auto& x : p.c) c.push_back(x.real());
    return RPoly(c);
}

/// Polynomial roots via companion-matrix eigenvalues.
template <class T>
std::vector<cplx> roots(const Poly<T>& p) {
    std::vector<cplx> out;
    int d = p.degree();
    if (d <= 0) return out;
    std::size_t z = 0;
    while (z < p.c.size() && p.c[z] == T(0)) ++z;
    for (std::size_t i = 0; i < z; ++i) out.push_back(0.0);
    int m = d - static_cast<int>(z);
    if (m <= 0) return out;
    CMatrix Cm = CMatrix::Zero(m, m);
    cplx lead = cplx(p.lead());
    for (int i = 1; i < m; ++i) Cm(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) Cm(i, m - 1) = -cplx(p.c[z + i]) / lead;
    Eigen::ComplexEigenSolver<CMatrix> es(Cm, false);
    require(es.info() == Eigen::Success, ErrorKind::Convergence, "polynomial roots failed");
    for (int i = 0; i < m; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

/// Taylor coefficients of p about s0: p(s) = sum_k t_k (s - s0)^k.
inline std::vector<cplx> taylor_shift(const CPoly& p, cplx s0) {
    std::vector<cplx> a = p.c;
    int n = static_cast<int>(a.size());
    for (int k = 0; k < n; ++k)
        for (int i = n - 2; i >= k; --i) a[i] += s0 * a[i + 1];
    return a;
}

}  // namespace ctred
