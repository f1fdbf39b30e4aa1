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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qcirc/error.hpp"
#include "qcirc/linalg.hpp"
#include "support.hpp"

namespace qcirc {
namespace {

using testing::embed_oracle;
using testing::hadamard;
using testing::kron_oracle;
using testing::partial_trace_oracle;
using testing::pauli_x;
using testing::random_density;
using testing::random_unitary;
using testing::Rng;

ComplexMatrix random_matrix(std::size_t r, std::size_t c, Rng &rng) {
    ComplexMatrix m(r, c);
    for (auto &z : m.entries()) {
        z = testing::gaussian(rng);
    }
    return m;
}

TEST(Tensor, IdentityTimesIdentity) {
    EXPECT_EQ(tensor(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
}

TEST(Tensor, OneByOneIdentityIsUnit) {
    EXPECT_EQ(tensor(pauli_x(), ComplexMatrix{{1}}), pauli_x());
    EXPECT_EQ(tensor(ComplexMatrix{{1}}, pauli_x()), pauli_x());
}

TEST(Tensor, MatchesKroneckerLoop) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix a = random_matrix(2, 2, rng);
        ComplexMatrix b = random_matrix(2, 2, rng);
        EXPECT_LE(max_abs_diff(tensor(a, b), kron_oracle(a, b)), 1e-15);
    }
    ComplexMatrix a = random_matrix(2, 3, rng);
    ComplexMatrix b = random_matrix(4, 1, rng);
    EXPECT_LE(max_abs_diff(tensor(a, b), kron_oracle(a, b)), 1e-15);
}

TEST(Dagger, Examples) {
    EXPECT_EQ(dagger(ComplexMatrix{{0, 1}, {0, 0}}), (ComplexMatrix{{0, 0}, {1, 0}}));
    EXPECT_TRUE(approx_equal(dagger(hadamard()), hadamard(), 0));
    Complex i{0, 1};
    EXPECT_EQ(dagger(ComplexMatrix{{i, 0}, {0, 0}}), (ComplexMatrix{{-i, 0}, {0, 0}}));
}

TEST(MatMul, Examples) {
    EXPECT_TRUE(approx_equal(mat_mul(pauli_x(), pauli_x()), ComplexMatrix::identity(2)));
    Rng rng(3);
    ComplexMatrix a = random_matrix(2, 2, rng);
    EXPECT_EQ(mat_mul(ComplexMatrix::identity(2), a), a);
    EXPECT_TRUE(approx_equal(mat_mul(hadamard(), hadamard()), ComplexMatrix::identity(2), 1e-15));
}

TEST(MatMul, ShapeMismatchThrows) {
    EXPECT_THROW(mat_mul(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), DimensionError);
}

TEST(Trace, Examples) {
    EXPECT_EQ(trace(ComplexMatrix::identity(4)), Complex(4));
    EXPECT_EQ(trace(ComplexMatrix::basis_projector(2, 0)), Complex(1));
    EXPECT_EQ(trace(pauli_x()), Complex(0));
    EXPECT_THROW(trace(ComplexMatrix(2, 3)), DimensionError);
}

TEST(Construction, RejectsWrongEntryCount) {
    EXPECT_THROW(ComplexMatrix(2, 2, std::vector<Complex>(3)), DimensionError);
}

TEST(PartialTrace, ProductStateFactorizes) {
    Rng rng(5);
    ComplexMatrix ra = random_density(1, rng);
    ComplexMatrix rb = random_density(2, rng);
    std::vector<std::size_t> keep{0};
    ComplexMatrix expected = trace(rb) * ra;
    EXPECT_LE(max_abs_diff(partial_trace(tensor(ra, rb), 3, keep), expected), 1e-12);
}

TEST(PartialTrace, BellStateGivesMaximallyMixed) {
    double s = 1 / std::numbers::sqrt2;
    StateVector bell{s, 0, 0, s};
    ComplexMatrix rho = ComplexMatrix::outer(bell, bell);
    std::vector<std::size_t> keep{0};
    ComplexMatrix oracle = partial_trace_oracle(rho, 2, keep);
    EXPECT_LE(max_abs_diff(partial_trace(rho, 2, keep), oracle), 1e-15);
    EXPECT_LE(max_abs_diff(oracle, 0.5 * ComplexMatrix::identity(2)), 1e-15);
}

TEST(PartialTrace, KeepAllIsIdentity) {
    Rng rng(8);
    ComplexMatrix rho = random_density(3, rng);
    std::vector<std::size_t> keep{0, 1, 2};
    EXPECT_EQ(partial_trace(rho, 3, keep), rho);
}

TEST(PartialTrace, MatchesDoubleIndexOracleAndPreservesTrace) {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 1 + rng() % 4;
        ComplexMatrix m = random_matrix(std::size_t{1} << n, std::size_t{1} << n, rng);
        std::vector<std::size_t> keep;
        for (std::size_t r = 0; r < n; ++r) {
            if (rng() % 2) {
                keep.push_back(r);
            }
        }
        if (keep.empty()) {
            keep.push_back(n - 1);
        }
        ComplexMatrix got = partial_trace(m, n, keep);
        EXPECT_LE(max_abs_diff(got, partial_trace_oracle(m, n, keep)), 1e-12);
        EXPECT_LE(std::abs(trace(got) - trace(m)), 1e-12);
    }
}

TEST(PartialTrace, RejectsBadKeepSets) {
    ComplexMatrix m = ComplexMatrix::identity(4);
    std::vector<std::size_t> dup{0, 0};
    std::vector<std::size_t> out_of_range{2};
    std::vector<std::size_t> none;
    EXPECT_THROW(partial_trace(m, 2, dup), InvalidArgument);
    EXPECT_THROW(partial_trace(m, 2, out_of_range), InvalidArgument);
    EXPECT_THROW(partial_trace(m, 2, none), InvalidArgument);
}

TEST(Embed, Examples) {
    std::vector<std::size_t> r0{0};
    std::vector<std::size_t> r1{1};
    EXPECT_EQ(embed(pauli_x(), r0, 2), tensor(pauli_x(), ComplexMatrix::identity(2)));
    EXPECT_EQ(embed(pauli_x(), r1, 2), tensor(ComplexMatrix::identity(2), pauli_x()));
}

TEST(Embed, CnotOnReversedRegistersMatchesPermutationOracle) {
    std::vector<std::size_t> regs{2, 0};
    ComplexMatrix got = embed(testing::cnot(), regs, 3);
    EXPECT_EQ(got, embed_oracle(testing::cnot(), {2, 0}, 3));
    // Control on register 2 (LSB), target register 0 (MSB): |x0 x1 1> flips x0.
    for (std::size_t x = 0; x < 8; ++x) {
        std::size_t y = (x & 1) ? (x ^ 4) : x;
        EXPECT_EQ(got(y, x), Complex(1));
    }
}

TEST(Embed, AgreesWithBasisVectorOracleUpToFiveQubits) {
    Rng rng(99);
    for (std::size_t n = 1; n <= 5; ++n) {
        for (int trial = 0; trial < 6; ++trial) {
            std::size_t k = 1 + rng() % std::min<std::size_t>(n, 3);
            std::vector<std::size_t> regs(n);
            for (std::size_t r = 0; r < n; ++r) {
                regs[r] = r;
            }
            std::shuffle(regs.begin(), regs.end(), rng);
            regs.resize(k);
            ComplexMatrix op = random_matrix(std::size_t{1} << k, std::size_t{1} << k, rng);
            ComplexMatrix full = embed(op, regs, n);
            // Column x of the embedding is op applied to the addressed bits of |x>.
            std::size_t dim = std::size_t{1} << n;
            for (std::size_t x = 0; x < dim; ++x) {
                std::size_t local = 0;
                for (std::size_t r : regs) {
                    local = (local << 1) | ((x >> (n - 1 - r)) & 1);
                }
                for (std::size_t y = 0; y < dim; ++y) {
                    bool rest_equal = true;
                    std::size_t out_local = 0;
                    for (std::size_t r = 0; r < n; ++r) {
                        bool addressed = std::find(regs.begin(), regs.end(), r) != regs.end();
                        if (!addressed && ((x >> (n - 1 - r)) & 1) != ((y >> (n - 1 - r)) & 1)) {
                            rest_equal = false;
                        }
                    }
                    for (std::size_t r : regs) {
                        out_local = (out_local << 1) | ((y >> (n - 1 - r)) & 1);
                    }
                    Complex expected = rest_equal ? op(out_local, local) : Complex(0);
                    ASSERT_LE(std::abs(full(y, x) - expected), 1e-15);
                }
            }
            std::vector<std::size_t> regs_copy = regs;
            EXPECT_LE(max_abs_diff(full, embed_oracle(op, regs_copy, n)), 1e-15);
        }
    }
}

TEST(Embed, LocalApplicationMatchesEmbedding) {
    Rng rng(4);
    std::size_t n = 4;
    std::vector<std::size_t> regs{3, 1};
    ComplexMatrix u = random_unitary(4, rng);
    ComplexMatrix full = embed(u, regs, n);
    ComplexMatrix rho = random_density(n, rng);
    EXPECT_LE(max_abs_diff(conjugate_local(u, regs, n, rho), full * rho * dagger(full)), 1e-12);
    ComplexMatrix cols = rho;
    apply_local_to_columns(u, regs, n, cols);
    EXPECT_LE(max_abs_diff(cols, full * rho), 1e-12);
    StateVector psi = testing::random_ket(n, rng);
    StateVector applied = psi;
    apply_local(u, regs, n, applied);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        Complex expected = 0;
        for (std::size_t j = 0; j < psi.size(); ++j) {
            expected += full(i, j) * psi[j];
        }
        EXPECT_LE(std::abs(applied[i] - expected), 1e-12);
    }
}

TEST(Properties, DaggerDistributesOverTensor) {
    Rng rng(6);
    for (int trial = 0; trial < 25; ++trial) {
        ComplexMatrix a = random_matrix(1 + rng() % 3, 1 + rng() % 3, rng);
        ComplexMatrix b = random_matrix(1 + rng() % 3, 1 + rng() % 3, rng);
        EXPECT_LE(max_abs_diff(dagger(tensor(a, b)), tensor(dagger(a), dagger(b))), 1e-12);
    }
}

TEST(Properties, TraceIsCyclic) {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t d = 1 + rng() % 6;
        ComplexMatrix a = random_matrix(d, d, rng);
        ComplexMatrix b = random_matrix(d, d, rng);
        EXPECT_LE(std::abs(trace(mat_mul(a, b)) - trace(mat_mul(b, a))), 1e-12);
    }
}

TEST(Predicates, UnitaryAndHermitian) {
    Rng rng(12);
    EXPECT_TRUE(is_unitary(random_unitary(8, rng)));
    EXPECT_FALSE(is_unitary(ComplexMatrix{{1, 1}, {0, 1}}));
    EXPECT_TRUE(is_hermitian(hadamard()));
    EXPECT_FALSE(is_hermitian(ComplexMatrix{{0, 1}, {0, 0}}));
    EXPECT_NEAR(min_hermitian_eigenvalue(ComplexMatrix{{2, 0}, {0, -1}}), -1.0, 1e-12);
}

TEST(DensityOperator, ValidatesInvariants) {
    EXPECT_NO_THROW(DensityOperator::from_matrix(2.0 * ComplexMatrix::basis_projector(2, 0)));
    EXPECT_THROW(DensityOperator::from_matrix(ComplexMatrix{{1, 0}, {0, -1}}), InvalidArgument);
    EXPECT_THROW(DensityOperator::from_matrix(ComplexMatrix{{0, 1}, {0, 0}}), InvalidArgument);
    EXPECT_THROW(DensityOperator::from_matrix(ComplexMatrix(2, 2)), InvalidArgument);
    EXPECT_THROW(DensityOperator::from_matrix(ComplexMatrix::identity(3)), DimensionError);
    StateVector ket{0.6, Complex{0, 0.8}};
    DensityOperator rho = DensityOperator::from_ket(ket);
    EXPECT_EQ(rho.n_qubits(), 1u);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-15);
    DensityOperator twice = DensityOperator::from_matrix(2.0 * rho.matrix());
    EXPECT_LE(max_abs_diff(twice.normalized().matrix(), rho.matrix()), 1e-15);
}

}  // namespace
}  // namespace qcirc
