#include "bulkq/matrix.hpp"

#include <cmath>

#include "bulkq/errors.hpp"

namespace bulkq {

CMatrix CMatrix::identity(std::size_t d) {
    CMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = cplx{1.0, 0.0};
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw DomainError("matrix shape mismatch in +=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw DomainError("matrix shape mismatch in -=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(const cplx& scale) {
    for (auto& v : a_) v *= scale;
    return *this;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

cplx CMatrix::trace() const {
    if (rows_ != cols_) throw DomainError("trace of a non-square matrix");
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
}

CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs) {
    if (lhs.cols() != rhs.rows()) throw DomainError("matrix shape mismatch in *");
    CMatrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const cplx v = lhs(i, k);
            if (v == cplx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += v * rhs(k, j);
        }
    }
    return out;
}

CMatrix operator+(CMatrix lhs, const CMatrix& rhs) {
    lhs += rhs;
    return lhs;
}

CMatrix operator-(CMatrix lhs, const CMatrix& rhs) {
    lhs -= rhs;
    return lhs;
}

CMatrix operator*(const cplx& scale, CMatrix m) {
    m *= scale;
    return m;
}

std::vector<cplx> apply_matrix(const CMatrix& m, const std::vector<cplx>& x) {
    if (m.cols() != x.size()) throw DomainError("matrix/vector shape mismatch");
    std::vector<cplx> y(m.rows(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < m.rows(); ++i) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

cplx trace_product(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols())
        throw DomainError("matrix shape mismatch in trace_product");
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
    return t;
}

double frobenius_distance(const CMatrix& a, const CMatrix& b) {
    CMatrix d = a;
    d -= b;
    return d.frobenius_norm();
}

double commutator_norm(const CMatrix& a, const CMatrix& b) {
    return frobenius_distance(a * b, b * a);
}

} // namespace bulkq
