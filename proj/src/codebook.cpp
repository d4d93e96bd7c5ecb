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

#include "relaynet/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "relaynet/errors.hpp"
#include "relaynet/rng.hpp"

namespace relaynet {

namespace {

constexpr double kRankThreshold = 1e-9;

} // namespace

Eigen::MatrixXcd haar_unitary(int n, std::uint64_t seed, std::uint64_t index)
{
    Engine eng = make_stream(seed, {0x4c44ULL, index});
    ComplexGaussian gauss;
    Eigen::MatrixXcd z(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r)
            z(r, c) = gauss(eng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k) {
        const std::complex<double> d = r(k, k);
        const double mag = std::abs(d);
        if (mag > 0.0)
            q.col(k) *= d / mag;
    }
    return q;
}

double compute_lambda_min(const std::vector<Eigen::MatrixXcd>& dispersion)
{
    if (dispersion.empty())
        throw ContractError("codebook has no dispersion matrices");
    const int t = static_cast<int>(dispersion.front().rows());
    const int m = static_cast<int>(dispersion.size());
    // ternary enumeration of d in {-1,0,1}^T with first nonzero entry +1
    std::vector<int> digits(static_cast<std::size_t>(t), 0);
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd d(t);
    Eigen::MatrixXcd diff(t, m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
    for (;;) {
        // next ternary number, digits mapped 0 -> 0, 1 -> +1, 2 -> -1
        int pos = 0;
        while (pos < t && digits[static_cast<std::size_t>(pos)] == 2)
            digits[static_cast<std::size_t>(pos++)] = 0;
        if (pos == t)
            break;
        ++digits[static_cast<std::size_t>(pos)];
        int lead = t - 1;
        while (lead >= 0 && digits[static_cast<std::size_t>(lead)] == 0)
            --lead;
        if (digits[static_cast<std::size_t>(lead)] != 1)
            continue;
        for (int k = 0; k < t; ++k) {
            const int v = digits[static_cast<std::size_t>(k)];
            d(k) = v == 0 ? 0.0 : (v == 1 ? 2.0 : -2.0);
        }
        for (int i = 0; i < m; ++i)
            diff.col(i) = dispersion[static_cast<std::size_t>(i)] * d;
        solver.compute(diff.adjoint() * diff, Eigen::EigenvaluesOnly);
        best = std::min(best, solver.eigenvalues().minCoeff());
    }
    return std::max(best, 0.0);
}

LdCodebook LdCodebook::from_dispersion(std::vector<Eigen::MatrixXcd> dispersion)
{
    if (dispersion.empty())
        throw ContractError("codebook has no dispersion matrices");
    const int t = static_cast<int>(dispersion.front().rows());
    if (t > kMaxExhaustiveBlockLength)
        throw SizeError("block length T = " + std::to_string(t) +
                        " exceeds the exhaustive limit of 12; supply lambda_min externally");
    if (static_cast<int>(dispersion.size()) != t)
        throw ContractError("LD codebook requires M = T");
    for (const auto& a : dispersion)
        if (a.rows() != t || a.cols() != t)
            throw ContractError("dispersion matrices must be T x T");

    LdCodebook code;
    code.block_length = t;
    code.dispersion = std::move(dispersion);
    const std::size_t count = std::size_t{1} << t;
    code.symbols.reserve(count);
    code.codewords.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Eigen::VectorXcd s(t);
        for (int b = 0; b < t; ++b)
            s(b) = ((k >> b) & 1u) ? -1.0 : 1.0;
        Eigen::MatrixXcd cw(t, t);
        for (int i = 0; i < t; ++i)
            cw.col(i) = code.dispersion[static_cast<std::size_t>(i)] * s;
        code.symbols.push_back(std::move(s));
        code.codewords.push_back(std::move(cw));
    }
    code.lambda_min = compute_lambda_min(code.dispersion);
    return code;
}

LdCodebook generate_codebook(int block_length, std::uint64_t seed)
{
    if (block_length < 1)
        throw ContractError("block length must be >= 1");
    if (block_length > kMaxExhaustiveBlockLength)
        throw SizeError("block length T = " + std::to_string(block_length) +
                        " exceeds the exhaustive limit of 12; supply lambda_min externally");
    for (std::uint64_t attempt = 0;; ++attempt) {
        std::vector<Eigen::MatrixXcd> a;
        for (int i = 0; i < block_length; ++i)
            a.push_back(haar_unitary(block_length, seed, attempt * 64 + static_cast<std::uint64_t>(i)));
        auto code = LdCodebook::from_dispersion(std::move(a));
        if (code.lambda_min > kRankThreshold)
            return code;
    }
}

double unitarity_residual(const LdCodebook& code)
{
    double worst = 0.0;
    for (const auto& a : code.dispersion) {
        const Eigen::MatrixXcd e = a.adjoint() * a - Eigen::MatrixXcd::Identity(a.rows(), a.cols());
        worst = std::max(worst, e.cwiseAbs().maxCoeff());
    }
    return worst;
}

void write_codebook(std::ostream& os, const LdCodebook& code)
{
    const auto old = os.precision(17);
    const int t = code.block_length;
    os << "ldcodebook T " << t << " M " << code.relays() << '\n';
    for (std::size_t i = 0; i < code.relays(); ++i) {
        os << "A " << (i + 1) << '\n';
        const auto& a = code.dispersion[i];
        for (int r = 0; r < t; ++r) {
            for (int c = 0; c < t; ++c)
                os << (c ? " " : "") << a(r, c).real() << ' ' << a(r, c).imag();
            os << '\n';
        }
    }
    os << "lambda_min " << code.lambda_min << '\n';
    os.precision(old);
}

LdCodebook read_codebook(std::istream& is)
{
    std::string tag, t_tag, m_tag;
    int t = 0, m = 0;
    if (!(is >> tag >> t_tag >> t >> m_tag >> m) || tag != "ldcodebook" || t_tag != "T" || m_tag != "M")
        throw ConfigError("codebook: malformed header");
    if (t < 1 || m != t)
        throw ConfigError("codebook: requires M = T >= 1");
    std::vector<Eigen::MatrixXcd> a;
    for (int i = 0; i < m; ++i) {
        int index = 0;
        if (!(is >> tag >> index) || tag != "A" || index != i + 1)
            throw ConfigError("codebook: expected 'A " + std::to_string(i + 1) + "'");
        Eigen::MatrixXcd mat(t, t);
        for (int r = 0; r < t; ++r)
            for (int c = 0; c < t; ++c) {
                double re = 0.0, im = 0.0;
                if (!(is >> re >> im))
                    throw ConfigError("codebook: truncated matrix A " + std::to_string(i + 1));
                mat(r, c) = {re, im};
            }
        a.push_back(std::move(mat));
    }
    return LdCodebook::from_dispersion(std::move(a));
}

} // namespace relaynet
