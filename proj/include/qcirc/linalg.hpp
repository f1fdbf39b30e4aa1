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

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qcirc {

using Complex = std::complex<double>;
using StateVector = std::vector<Complex>;

/// Absolute entrywise tolerance used by every approximate comparison unless
/// the caller passes its own.
inline constexpr double kDefaultTolerance = 1e-9;

/// Dense row-major complex matrix. Operators, Kraus operators and density
/// matrices all use this one carrier.
class ComplexMatrix {
   public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t dim);
    /// |ket><bra|
    static ComplexMatrix outer(std::span<const Complex> ket, std::span<const Complex> bra);
    /// Diagonal projector onto one computational basis vector.
    static ComplexMatrix basis_projector(std::size_t dim, std::size_t index);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return entries_.empty(); }

    Complex &operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Complex &operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<Complex> entries() { return entries_; }
    std::span<const Complex> entries() const { return entries_; }

    ComplexMatrix &operator+=(const ComplexMatrix &other);
    ComplexMatrix &operator-=(const ComplexMatrix &other);
    ComplexMatrix &operator*=(Complex scale);

    friend bool operator==(const ComplexMatrix &, const ComplexMatrix &) = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b);
ComplexMatrix operator*(Complex scale, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b);

/// Kronecker product; `a` acts on the more significant index bits.
ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b);
/// Conjugate transpose.
ComplexMatrix dagger(const ComplexMatrix &a);
ComplexMatrix mat_mul(const ComplexMatrix &a, const ComplexMatrix &b);
Complex trace(const ComplexMatrix &a);

/// max_{r,c} |a(r,c) - b(r,c)|. Throws DimensionError on shape mismatch.
double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b);
bool approx_equal(const ComplexMatrix &a, const ComplexMatrix &b, double tol = kDefaultTolerance);
bool is_hermitian(const ComplexMatrix &a, double tol = kDefaultTolerance);
bool is_unitary(const ComplexMatrix &a, double tol = kDefaultTolerance);
/// Smallest eigenvalue of the Hermitian part (a + a^dagger) / 2.
double min_hermitian_eigenvalue(const ComplexMatrix &a);

/// log2 of a power-of-two dimension; throws DimensionError otherwise.
std::size_t qubit_count_for_dimension(std::size_t dim);

/// 2^n x 2^n matrix acting as `op` on `registers` (first listed register is
/// the most significant bit of op's index) and as identity elsewhere.
/// Register 0 is the most significant bit of the full basis index.
ComplexMatrix embed(const ComplexMatrix &op, std::span<const std::size_t> registers, std::size_t n);

/// In place: state <- embed(op, registers, n) * state.
void apply_local(const ComplexMatrix &op, std::span<const std::size_t> registers, std::size_t n,
                 std::span<Complex> state);
/// In place: m <- embed(op, registers, n) * m, for any m with 2^n rows.
void apply_local_to_columns(const ComplexMatrix &op, std::span<const std::size_t> registers, std::size_t n,
                            ComplexMatrix &m);
/// embed(op) * rho * embed(op)^dagger without materialising the embedding.
ComplexMatrix conjugate_local(const ComplexMatrix &op, std::span<const std::size_t> registers, std::size_t n,
                              const ComplexMatrix &rho);

/// Traces out every register not in `keep`. Kept registers stay in ascending
/// order. Works on any 2^n x 2^n matrix (no positivity assumed).
ComplexMatrix partial_trace(const ComplexMatrix &m, std::size_t n, std::span<const std::size_t> keep);

/// Possibly non-normalized density operator: Hermitian, positive
/// semidefinite, with positive trace.
class DensityOperator {
   public:
    /// Validates the invariants within `tol`; throws InvalidArgument.
    static DensityOperator from_matrix(ComplexMatrix m, double tol = kDefaultTolerance);
    /// |psi><psi| for a nonzero ket of length 2^n.
    static DensityOperator from_ket(std::span<const Complex> ket);

    std::size_t n_qubits() const { return n_qubits_; }
    const ComplexMatrix &matrix() const { return matrix_; }
    double trace() const { return qcirc::trace(matrix_).real(); }
    DensityOperator normalized() const;

   private:
    DensityOperator(std::size_t n, ComplexMatrix m) : n_qubits_(n), matrix_(std::move(m)) {}

    std::size_t n_qubits_ = 0;
    ComplexMatrix matrix_;
};

DensityOperator partial_trace(const DensityOperator &rho, std::span<const std::size_t> keep);

}  // namespace qcirc
