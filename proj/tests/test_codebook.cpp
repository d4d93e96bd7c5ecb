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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "relaynet/codebook.hpp"
#include "relaynet/errors.hpp"

using namespace relaynet;

namespace {

// Brute force over all codeword pairs, independent of the +-d shortcut.
double lambda_min_all_pairs(const LdCodebook& code)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < code.size(); ++k) {
        for (std::size_t l = k + 1; l < code.size(); ++l) {
            const Eigen::MatrixXcd d = code.codewords[k] - code.codewords[l];
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d.adjoint() * d);
            best = std::min(best, es.eigenvalues().minCoeff());
        }
    }
    return best;
}

} // namespace

TEST_CASE("scalar codebook")
{
    const auto code = generate_codebook(1, 5);
    REQUIRE(code.size() == 2);
    CHECK(std::abs(std::abs(code.dispersion[0](0, 0)) - 1.0) < 1e-12);
    CHECK(code.codewords[0](0, 0) == -code.codewords[1](0, 0));
    CHECK(code.lambda_min == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("generated codebooks are unitary, full rank and deterministic")
{
    for (int t = 1; t <= 6; ++t) {
        const auto code = generate_codebook(t, 100 + static_cast<std::uint64_t>(t));
        CHECK(code.relays() == static_cast<std::size_t>(t));
        CHECK(code.size() == (std::size_t{1} << t));
        CHECK(unitarity_residual(code) < 1e-12);
        CHECK(code.lambda_min > 1e-9);
        CHECK(code.lambda_min == doctest::Approx(lambda_min_all_pairs(code)).epsilon(1e-9));
        const auto again = generate_codebook(t, 100 + static_cast<std::uint64_t>(t));
        CHECK(again.dispersion[0] == code.dispersion[0]);
    }
    CHECK(generate_codebook(3, 1).dispersion[0] != generate_codebook(3, 2).dispersion[0]);
    CHECK_THROWS_AS(generate_codebook(13, 1), SizeError);
    CHECK_THROWS_AS(generate_codebook(0, 1), ContractError);
}

TEST_CASE("symbol mapping")
{
    const auto code = generate_codebook(3, 7);
    CHECK(code.symbols[0] == Eigen::VectorXcd::Constant(3, 1.0));
    CHECK(code.symbols[5](0) == std::complex<double>(-1.0, 0.0));
    CHECK(code.symbols[5](1) == std::complex<double>(1.0, 0.0));
    CHECK(code.symbols[5](2) == std::complex<double>(-1.0, 0.0));
    // Column i of S_k is A_i s_k.
    CHECK((code.codewords[5].col(1) - code.dispersion[1] * code.symbols[5]).norm() < 1e-14);
}

TEST_CASE("Haar sampler has isotropic first moments")
{
    // E|U_jk|^2 = 1/n and E U_jk = 0 for Haar unitaries.
    const int n = 3;
    Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXd power = Eigen::MatrixXd::Zero(n, n);
    const int draws = 20000;
    for (int k = 0; k < draws; ++k) {
        const auto u = haar_unitary(n, 99, static_cast<std::uint64_t>(k));
        mean += u;
        power += u.cwiseAbs2();
    }
    mean /= draws;
    power /= draws;
    CHECK(mean.cwiseAbs().maxCoeff() < 0.02);
    CHECK((power.array() - 1.0 / n).abs().maxCoeff() < 0.01);
}

TEST_CASE("codebook text round trip")
{
    const auto code = generate_codebook(4, 11);
    std::stringstream ss;
    write_codebook(ss, code);
    const auto back = read_codebook(ss);
    CHECK(back.block_length == 4);
    for (std::size_t i = 0; i < code.relays(); ++i)
        CHECK((back.dispersion[i] - code.dispersion[i]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.lambda_min == code.lambda_min);

    std::istringstream bad("ldcodebook T 2 M 2\nA 0\n1 0 0\n");
    CHECK_THROWS_AS(read_codebook(bad), ConfigError);
}

TEST_CASE("lambda_min of a hand-made code")
{
    // Identity dispersion for every relay gives rank-one differences, so lambda_min = 0 for M = T = 2.
    std::vector<Eigen::MatrixXcd> same(2, Eigen::MatrixXcd::Identity(2, 2));
    CHECK(compute_lambda_min(same) == doctest::Approx(0.0).epsilon(1e-12));
    // Alamouti-like pair keeps full rank.
    Eigen::MatrixXcd a2(2, 2);
    a2 << 0, -1, 1, 0;
    std::vector<Eigen::MatrixXcd> ortho{Eigen::MatrixXcd::Identity(2, 2), a2};
    CHECK(compute_lambda_min(ortho) > 1.0);
}
