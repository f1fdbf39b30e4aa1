// Copyright 2026 The qcirc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcirc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qcirc/error.hpp"

namespace qcirc {

namespace {

void require_same_shape(const ComplexMatrix &a, const ComplexMatrix &b, const char *what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

/// Bit masks (in basis-index space) for each listed register; masks[0]
/// corresponds to the most significant bit of the local operator index.
std::vector<std::size_t> register_masks(std::span<const std::size_t> registers, std::size_t n) {
    std::vector<std::size_t> masks;
    masks.reserve(registers.size());
    for (std::size_t r : registers) {
        if (r >= n) {
            throw InvalidArgument("register " + std::to_string(r) + " out of range for " + std::to_string(n) +
                                  " qubits");
        }
        std::size_t mask = std::size_t{1} << (n - 1 - r);
        for (std::size_t m : masks) {
            if (m == mask) {
                throw InvalidArgument("register " + std::to_string(r) + " listed twice");
            }
        }
        masks.push_back(mask);
    }
    return masks;
}

/// offsets[j] = basis-index bits set by local index j.
std::vector<std::size_t> local_offsets(const std::vector<std::size_t> &masks) {
    std::size_t k = masks.size();
    std::vector<std::size_t> offsets(std::size_t{1} << k, 0);
    for (std::size_t j = 0; j < offsets.size(); ++j) {
        for (std::size_t m = 0; m < k; ++m) {
            if ((j >> (k - 1 - m)) & 1) {
                offsets[j] |= masks[m];
            }
        }
    }
    return offsets;
}

void check_local_op(const ComplexMatrix &op, std::size_t k) {
    std::size_t dim = std::size_t{1} << k;
    if (op.rows() != dim || op.cols() != dim) {
        throw DimensionError("operator is " + std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                             " but acts on " + std::to_string(k) + " registers");
    }
}

void apply_strided(const ComplexMatrix &op, const std::vector<std::size_t> &offsets, std::size_t all_mask,
                   std::size_t dim, Complex *data, std::size_t stride) {
    std::size_t local = offsets.size();
    std::vector<Complex> in(local), out(local);
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & all_mask) {
            continue;
        }
        for (std::size_t j = 0; j < local; ++j) {
            in[j] = data[(base | offsets[j]) * stride];
        }
        for (std::size_t r = 0; r < local; ++r) {
            Complex acc = 0;
            for (std::size_t c = 0; c < local; ++c) {
                acc += op(r, c) * in[c];
            }
            out[r] = acc;
        }
        for (std::size_t j = 0; j < local; ++j) {
            data[(base | offsets[j]) * stride] = out[j];
        }
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex{0, 0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw DimensionError("matrix entry count " + std::to_string(entries_.size()) + " does not match " +
                             std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto &row : rows) {
        if (row.size() != cols_) {
            throw DimensionError("ragged matrix literal");
        }
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = 1;
    }
    return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> ket, std::span<const Complex> bra) {
    ComplexMatrix m(ket.size(), bra.size());
    for (std::size_t r = 0; r < ket.size(); ++r) {
        for (std::size_t c = 0; c < bra.size(); ++c) {
            m(r, c) = ket[r] * std::conj(bra[c]);
        }
    }
    return m;
}

ComplexMatrix ComplexMatrix::basis_projector(std::size_t dim, std::size_t index) {
    ComplexMatrix m(dim, dim);
    m(index, index) = 1;
    return m;
}

ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &other) {
    require_same_shape(*this, other, "operator+");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] += other.entries_[i];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &other) {
    require_same_shape(*this, other, "operator-");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] -= other.entries_[i];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator*=(Complex scale) {
    for (auto &e : entries_) {
        e *= scale;
    }
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
ComplexMatrix operator*(Complex scale, ComplexMatrix a) { return a *= scale; }
ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) { return mat_mul(a, b); }

ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            Complex s = a(ar, ac);
            if (s == Complex{0, 0}) {
                continue;
            }
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
                }
            }
        }
    }
    return out;
}

ComplexMatrix dagger(const ComplexMatrix &a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(c, r) = std::conj(a(r, c));
        }
    }
    return out;
}

ComplexMatrix mat_mul(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("mat_mul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            Complex s = a(r, k);
            if (s == Complex{0, 0}) {
                continue;
            }
            for (std::size_t c = 0; c < b.cols(); ++c) {
                out(r, c) += s * b(k, c);
            }
        }
    }
    return out;
}

Complex trace(const ComplexMatrix &a) {
    if (!a.is_square()) {
        throw DimensionError("trace of non-square " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " matrix");
    }
    Complex t = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        t += a(i, i);
    }
    return t;
}

double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    require_same_shape(a, b, "max_abs_diff");
    double worst = 0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t i = 0; i < ea.size(); ++i) {
        worst = std::max(worst, std::abs(ea[i] - eb[i]));
    }
    return worst;
}

bool approx_equal(const ComplexMatrix &a, const ComplexMatrix &b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return false;
    }
    return max_abs_diff(a, b) <= tol;
}

bool is_hermitian(const ComplexMatrix &a, double tol) { return a.is_square() && approx_equal(a, dagger(a), tol); }

bool is_unitary(const ComplexMatrix &a, double tol) {
    return a.is_square() && approx_equal(dagger(a) * a, ComplexMatrix::identity(a.rows()), tol);
}

double min_hermitian_eigenvalue(const ComplexMatrix &a) {
    if (!a.is_square()) {
        throw DimensionError("eigenvalues of non-square matrix");
    }
    auto dim = static_cast<Eigen::Index>(a.rows());
    Eigen::MatrixXcd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            m(r, c) = 0.5 * (a(r, c) + std::conj(a(c, r)));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

std::size_t qubit_count_for_dimension(std::size_t dim) {
    if (dim == 0 || !std::has_single_bit(dim)) {
        throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
    }
    return static_cast<std::size_t>(std::countr_zero(dim));
}

ComplexMatrix embed(const ComplexMatrix &op, std::span<const std::size_t> registers, std::size_t n) {
    check_local_op(op, registers.size());
    auto masks = register_masks(registers, n);
    auto offsets = local_offsets(masks);
    std::size_t all_mask = 0;
    for (auto m : masks) {
        all_mask |= m;
    }
    std::size_t dim = std::size_t{1} << n;
    ComplexMatrix out(dim, dim);
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & all_mask) {
            continue;
        }
        for (std::size_t r = 0; r < offsets.size(); ++r) {
            for (std::size_t c = 0; c < offsets.size(); ++c) {
                out(base | offsets[r], base | offsets[c]) = op(r, c);
            }
        }
    }
    return out;
}

void apply_local(const ComplexMatrix &op, std::span<const std::size_t> registers, std::size_t n,
                 std::span<Complex> state) {
    check_local_op(op, registers.size());
    std::size_t dim = std::size_t{1} << n;
    if (state.size() != dim) {
        throw DimensionError("state has length " + std::to_string(state.size()) + ", expected " +
                             std::to_string(dim));
    }
    auto masks = register_masks(registers, n);
    std::size_t all_mask = 0;
    for (auto m : masks) {
        all_mask |= m;
    }
    apply_strided(op, local_offsets(masks), all_mask, dim, state.data(), 1);
}

void apply_local_to_columns(const ComplexMatrix &op, std::span<const std::size_t> registers, std::size_t n,
                            ComplexMatrix &m) {
    check_local_op(op, registers.size());
    std::size_t dim = std::size_t{1} << n;
    if (m.rows() != dim) {
        throw DimensionError("matrix has " + std::to_string(m.rows()) + " rows, expected " + std::to_string(dim));
    }
    auto masks = register_masks(registers, n);
    std::size_t all_mask = 0;
    for (auto mask : masks) {
        all_mask |= mask;
    }
    auto offsets = local_offsets(masks);
    for (std::size_t c = 0; c < m.cols(); ++c) {
        apply_strided(op, offsets, all_mask, dim, m.entries().data() + c, m.cols());
    }
}

ComplexMatrix conjugate_local(const ComplexMatrix &op, std::span<const std::size_t> registers, std::size_t n,
                              const ComplexMatrix &rho) {
    // (A (A rho)^dagger)^dagger = A rho A^dagger
    ComplexMatrix left = rho;
    apply_local_to_columns(op, registers, n, left);
    ComplexMatrix right = dagger(left);
    apply_local_to_columns(op, registers, n, right);
    return dagger(right);
}

ComplexMatrix partial_trace(const ComplexMatrix &m, std::size_t n, std::span<const std::size_t> keep) {
    std::size_t dim = std::size_t{1} << n;
    if (m.rows() != dim || m.cols() != dim) {
        throw DimensionError("partial_trace: matrix is not 2^" + std::to_string(n) + " square");
    }
    if (keep.empty()) {
        throw InvalidArgument("partial_trace: keep set is empty");
    }
    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
        throw InvalidArgument("partial_trace: keep set has duplicates");
    }
    if (kept.back() >= n) {
        throw InvalidArgument("partial_trace: register " + std::to_string(kept.back()) + " out of range");
    }
    std::vector<std::size_t> traced;
    for (std::size_t r = 0; r < n; ++r) {
        if (!std::binary_search(kept.begin(), kept.end(), r)) {
            traced.push_back(r);
        }
    }
    auto keep_offsets = local_offsets(register_masks(kept, n));
    auto trace_offsets = local_offsets(register_masks(traced, n));
    std::size_t out_dim = keep_offsets.size();
    ComplexMatrix out(out_dim, out_dim);
    for (std::size_t a = 0; a < out_dim; ++a) {
        for (std::size_t b = 0; b < out_dim; ++b) {
            Complex acc = 0;
            for (std::size_t t : trace_offsets) {
                acc += m(keep_offsets[a] | t, keep_offsets[b] | t);
            }
            out(a, b) = acc;
        }
    }
    return out;
}

DensityOperator DensityOperator::from_matrix(ComplexMatrix m, double tol) {
    if (!m.is_square()) {
        throw InvalidArgument("density operator must be square");
    }
    std::size_t n = qubit_count_for_dimension(m.rows());
    for (const auto &e : m.entries()) {
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
            throw InvalidArgument("density operator has a non-finite entry");
        }
    }
    if (!is_hermitian(m, tol)) {
        throw InvalidArgument("density operator is not Hermitian");
    }
    if (min_hermitian_eigenvalue(m) < -tol) {
        throw InvalidArgument("density operator is not positive semidefinite");
    }
    if (qcirc::trace(m).real() <= tol) {
        throw InvalidArgument("density operator has zero trace");
    }
    return DensityOperator(n, std::move(m));
}

DensityOperator DensityOperator::from_ket(std::span<const Complex> ket) {
    std::size_t n = qubit_count_for_dimension(ket.size());
    double norm = 0;
    for (const auto &a : ket) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw InvalidArgument("ket has a non-finite amplitude");
        }
        norm += std::norm(a);
    }
    if (norm <= 0) {
        throw InvalidArgument("ket is zero");
    }
    return DensityOperator(n, ComplexMatrix::outer(ket, ket));
}

DensityOperator DensityOperator::normalized() const {
    ComplexMatrix m = matrix_;
    m *= 1.0 / trace();
    return DensityOperator(n_qubits_, std::move(m));
}

DensityOperator partial_trace(const DensityOperator &rho, std::span<const std::size_t> keep) {
    return DensityOperator::from_matrix(partial_trace(rho.matrix(), rho.n_qubits(), keep));
}

}  // namespace qcirc
