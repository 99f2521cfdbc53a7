#pragma once

// Minimal sparse linear algebra: CSR storage built from triplets, a direct
// LU solver and conjugate gradients. Factorizations are backed by Eigen.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "tpns/errors.hpp"

namespace tpns {

struct Triplet {
    int row;
    int col;
    double value;
};

class TripletBuilder {
public:
    void add(int row, int col, double value) { entries_.push_back({row, col, value}); }
    void reserve(std::size_t n) { entries_.reserve(n); }
    const std::vector<Triplet>& entries() const { return entries_; }

private:
    std::vector<Triplet> entries_;
};

// Compressed sparse row matrix. Column indices are strictly increasing within
// each row and duplicates are summed on construction.
class SparseMatrix {
public:
    SparseMatrix() : rows_(0), cols_(0) { row_ptr_.push_back(0); }

    static SparseMatrix from_triplets(const TripletBuilder& builder, int rows, int cols) {
        for (const Triplet& t : builder.entries()) {
            if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
                throw std::out_of_range("sparse: triplet index (" + std::to_string(t.row) + ", " +
                                        std::to_string(t.col) + ") outside " + std::to_string(rows) +
                                        "x" + std::to_string(cols));
        }
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(builder.entries().size());
        for (const Triplet& t : builder.entries()) trips.emplace_back(t.row, t.col, t.value);
        Eigen::SparseMatrix<double, Eigen::RowMajor> m(rows, cols);
        m.setFromTriplets(trips.begin(), trips.end());  // sums duplicates
        m.makeCompressed();

        SparseMatrix out;
        out.rows_ = rows;
        out.cols_ = cols;
        out.row_ptr_.assign(m.outerIndexPtr(), m.outerIndexPtr() + rows + 1);
        out.col_idx_.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
        out.values_.assign(m.valuePtr(), m.valuePtr() + m.nonZeros());
        return out;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }
    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    std::vector<double> spmv(const std::vector<double>& v) const {
        if (static_cast<int>(v.size()) != cols_)
            throw std::invalid_argument("sparse: spmv dimension mismatch: matrix has " +
                                        std::to_string(cols_) + " columns, vector has " +
                                        std::to_string(v.size()) + " entries");
        std::vector<double> out(rows_, 0.0);
        for (int r = 0; r < rows_; ++r) {
            double s = 0.0;
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * v[col_idx_[k]];
            out[r] = s;
        }
        return out;
    }

    double entry(int r, int c) const {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            if (col_idx_[k] == c) return values_[k];
        return 0.0;
    }

    // Maps onto Eigen without copying (CSR == row-major compressed).
    Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor>> eigen_view() const {
        return {rows_, cols_, static_cast<Eigen::Index>(values_.size()), row_ptr_.data(),
                col_idx_.data(), values_.data()};
    }

private:
    int rows_, cols_;
    std::vector<int> row_ptr_;
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

inline double vec_norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double vec_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double relative_residual(const SparseMatrix& m, const std::vector<double>& x,
                                const std::vector<double>& rhs) {
    std::vector<double> r = m.spmv(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
    double denom = vec_norm2(rhs);
    if (denom == 0.0) return vec_norm2(r);
    return vec_norm2(r) / denom;
}

struct SolveResult {
    std::vector<double> x;
    double rel_residual = 0.0;
    int iterations = 0;  // 0 for direct solves
};

// Reusable sparse LU factorization (partial-pivoting direct solver).
class LuSolver {
public:
    explicit LuSolver(const SparseMatrix& m, double residual_tol = 1e-10)
        : matrix_(m), residual_tol_(residual_tol) {
        if (m.rows() != m.cols())
            throw std::invalid_argument("sparse: lu requires a square matrix, got " +
                                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
        check_structure(m);
        Eigen::SparseMatrix<double> col_major = m.eigen_view();
        lu_.compute(col_major);
        if (lu_.info() != Eigen::Success)
            throw solver_error("sparse: numerical singularity during LU factorization" +
                               (lu_.lastErrorMessage().empty() ? std::string()
                                                               : ": " + lu_.lastErrorMessage()));
    }

    SolveResult solve(const std::vector<double>& rhs) const {
        if (static_cast<int>(rhs.size()) != matrix_.rows())
            throw std::invalid_argument("sparse: rhs size mismatch");
        Eigen::Map<const Eigen::VectorXd> b(rhs.data(), rhs.size());
        Eigen::VectorXd x = lu_.solve(b);
        if (lu_.info() != Eigen::Success) throw solver_error("sparse: LU back-substitution failed");

        SolveResult out;
        out.x.assign(x.data(), x.data() + x.size());
        out.rel_residual = relative_residual(matrix_, out.x, rhs);
        // One round of iterative refinement if rounding left the residual high.
        for (int pass = 0; pass < 2 && out.rel_residual > residual_tol_; ++pass) {
            std::vector<double> r = matrix_.spmv(out.x);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
            Eigen::Map<const Eigen::VectorXd> re(r.data(), r.size());
            Eigen::VectorXd dx = lu_.solve(re);
            for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += dx[i];
            out.rel_residual = relative_residual(matrix_, out.x, rhs);
        }
        if (out.rel_residual > residual_tol_)
            throw solver_error("sparse: LU residual " + std::to_string(out.rel_residual) +
                               " above tolerance " + std::to_string(residual_tol_));
        return out;
    }

private:
    static void check_structure(const SparseMatrix& m) {
        // Structural singularity (empty row/column) is reported before factorization.
        std::vector<char> col_seen(m.cols(), 0);
        for (int r = 0; r < m.rows(); ++r) {
            bool nonzero = false;
            for (int k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
                if (m.values()[k] != 0.0) {
                    nonzero = true;
                    col_seen[m.col_idx()[k]] = 1;
                }
            }
            if (!nonzero)
                throw solver_error("sparse: structural singularity, empty row " + std::to_string(r));
        }
        for (int c = 0; c < m.cols(); ++c)
            if (!col_seen[c])
                throw solver_error("sparse: structural singularity, empty column " + std::to_string(c));
    }

    SparseMatrix matrix_;
    double residual_tol_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

inline SolveResult lu_solve(const SparseMatrix& m, const std::vector<double>& rhs,
                            double residual_tol = 1e-10) {
    return LuSolver(m, residual_tol).solve(rhs);
}

// Conjugate gradients for symmetric positive definite systems. Negative
// curvature (p'Ap <= 0) means the matrix is not positive definite.
inline SolveResult cg_solve(const SparseMatrix& m, const std::vector<double>& rhs, double tol,
                            int max_iter) {
    if (m.rows() != m.cols()) throw std::invalid_argument("sparse: cg requires a square matrix");
    if (static_cast<int>(rhs.size()) != m.rows())
        throw std::invalid_argument("sparse: rhs size mismatch");

    const double rhs_norm = vec_norm2(rhs);
    SolveResult out;
    out.x.assign(rhs.size(), 0.0);
    if (rhs_norm == 0.0) return out;

    std::vector<double> r = rhs;  // residual of x = 0
    std::vector<double> p = r;
    double rr = vec_dot(r, r);
    for (int it = 1; it <= max_iter; ++it) {
        std::vector<double> ap = m.spmv(p);
        double pap = vec_dot(p, ap);
        if (pap <= 0.0)
            throw solver_error("sparse: cg found non-positive curvature (matrix not SPD)");
        double alpha = rr / pap;
        for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += alpha * p[i];
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * ap[i];
        double rr_new = vec_dot(r, r);
        out.iterations = it;
        if (std::sqrt(rr_new) <= tol * rhs_norm) {
            out.rel_residual = relative_residual(m, out.x, rhs);
            return out;
        }
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    }
    throw solver_error("sparse: cg did not converge in " + std::to_string(max_iter) +
                       " iterations (relative residual " +
                       std::to_string(vec_norm2(r) / rhs_norm) + ")");
}

}  // namespace tpns
