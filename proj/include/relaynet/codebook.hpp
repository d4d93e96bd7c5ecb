// Copyright 2026 The relaynet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace relaynet {

/// Linear dispersion code with BPSK symbols and M = T unitary matrices.
/// Codeword k carries s_t = +1 when bit t of k is clear and -1 otherwise;
/// its matrix is S_k = [A_1 s_k, ..., A_M s_k].
struct LdCodebook {
    int block_length = 0;  // T (= M)
    std::vector<Eigen::MatrixXcd> dispersion;  // A_i, T x T
    std::vector<Eigen::VectorXcd> symbols;     // s_k, 2^T entries
    std::vector<Eigen::MatrixXcd> codewords;   // S_k, T x M
    double lambda_min = 0.0;

    std::size_t relays() const { return dispersion.size(); }
    std::size_t size() const { return codewords.size(); }

    /// Builds symbols and codewords from the dispersion matrices and caches lambda_min.
    static LdCodebook from_dispersion(std::vector<Eigen::MatrixXcd> dispersion);
};

inline constexpr int kMaxExhaustiveBlockLength = 12;

/// Haar-distributed dispersion matrices, deterministic per seed. Draws are
/// repeated (with derived seeds) until lambda_min > 1e-9.
LdCodebook generate_codebook(int block_length, std::uint64_t seed);

/// Haar unitary via QR of a complex Gaussian matrix with R-diagonal phases
/// absorbed into Q.
Eigen::MatrixXcd haar_unitary(int n, std::uint64_t seed, std::uint64_t index);

/// Smallest eigenvalue of (S_k - S_l)^H (S_k - S_l) over all codeword pairs.
/// BPSK differences are 2 d with d in {-1,0,1}^T, so each +-d pair is
/// evaluated once.
double compute_lambda_min(const std::vector<Eigen::MatrixXcd>& dispersion);

/// Largest |A^H A - I| entry across the dispersion matrices.
double unitarity_residual(const LdCodebook& code);

/// Text format: header line "ldcodebook T <T> M <M>", then each A_i as T rows
/// of real/imag pairs (17 significant digits), then "lambda_min <value>".
void write_codebook(std::ostream& os, const LdCodebook& code);
LdCodebook read_codebook(std::istream& is);

} // namespace relaynet
