#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace bulkq {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Everything here is desk scale (dimension
// bounded by the dense guard), so simple triple loops are plenty.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cplx{0.0, 0.0}) {}

    static CMatrix identity(std::size_t d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    CMatrix adjoint() const;
    CMatrix& operator+=(const CMatrix& other);
    CMatrix& operator-=(const CMatrix& other);
    CMatrix& operator*=(const cplx& scale);

    double frobenius_norm() const;
    cplx trace() const;
    double max_abs() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs);
CMatrix operator+(CMatrix lhs, const CMatrix& rhs);
CMatrix operator-(CMatrix lhs, const CMatrix& rhs);
CMatrix operator*(const cplx& scale, CMatrix m);

// y = M x
std::vector<cplx> apply_matrix(const CMatrix& m, const std::vector<cplx>& x);

// tr(a * b)
cplx trace_product(const CMatrix& a, const CMatrix& b);

double frobenius_distance(const CMatrix& a, const CMatrix& b);

// ||a b - b a||_F
double commutator_norm(const CMatrix& a, const CMatrix& b);

} // namespace bulkq
