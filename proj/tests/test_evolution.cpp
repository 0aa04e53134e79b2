// Copyright 2026 The qlap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include <qlap/corpus.hpp>
#include <qlap/evolution.hpp>

using namespace qlap;
using Catch::Matchers::WithinAbs;

namespace {

LaplacianMatrix normalized(const Graph &g) {
    return normalize_laplacian(build_laplacian(pad_to_power_of_two(g)));
}

EvolutionBackend trotter(std::size_t r, TrotterOrder order = TrotterOrder::first) {
    EvolutionBackend b;
    b.kind = BackendKind::trotter;
    b.trotter_steps = r;
    b.trotter_order = order;
    return b;
}

EvolutionBackend exact() {
    EvolutionBackend b;
    b.kind = BackendKind::exact;
    return b;
}

Graph connected_random(std::size_t n, std::size_t index) {
    for (std::size_t attempt = 0;; ++attempt) {
        auto g = corpus::erdos_renyi(n, 0.4, RngStream(606, index * 100 + attempt));
        if (connected_components(g).count == 1) {
            return g;
        }
    }
}

double distance_to_oracle(const ComplexMatrix &u, const LaplacianMatrix &l, double t) {
    const Eigen::MatrixXcd ref = oracle::propagator(oracle::to_eigen(l.to_dense()), t);
    const Eigen::MatrixXcd diff = oracle::to_eigen(u) - ref;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
    return svd.singularValues()(0);
}

QuantumState random_state(unsigned n, RngStream rng) {
    std::vector<complex_t> a(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &x : a) {
        x = {rng.normal(), rng.normal()};
        norm += std::norm(x);
    }
    for (auto &x : a) {
        x /= std::sqrt(norm);
    }
    return QuantumState::from_amplitudes(std::move(a));
}

} // namespace

TEST_CASE("edge exponential", "[evolution][edge]") {
    CHECK(edge_exponential(0.0) == complex_t(0.0));
    const auto swap = edge_exponential(std::numbers::pi / 2);
    CHECK(std::abs(swap - complex_t(-1.0)) < 1e-15);

    std::vector<complex_t> pair{complex_t(0.3, 0.1), complex_t(-0.2, 0.5)};
    const auto a = pair;
    detail::apply_edge(pair, 0, 1, swap);
    CHECK(std::abs(pair[0] - a[1]) < 1e-15);
    CHECK(std::abs(pair[1] - a[0]) < 1e-15);

    SECTION("2x2 block equals the series of exp(i theta L_e) and is unitary") {
        Eigen::Matrix2d le;
        le << 1, -1, -1, 1;
        for (int k = -20; k <= 20; ++k) {
            const double theta = 0.37 * k;
            const auto beta = edge_exponential(theta);
            Eigen::Matrix2cd block = Eigen::Matrix2cd::Identity() + beta * le.cast<complex_t>();
            const Eigen::Matrix2cd ref = oracle::propagator(le, theta);
            CHECK((block - ref).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((block.adjoint() * block - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("exact propagator", "[evolution][exact]") {
    SECTION("t = 0 is the identity") {
        const auto u = exact_propagator(normalized(corpus::barbell()), 0.0);
        CHECK(max_abs_diff(u, ComplexMatrix::identity(8)) < 1e-14);
    }
    SECTION("K2 eigenphases 1 and -1 at t = 2 pi") {
        const auto u = exact_propagator(normalized(corpus::path(2)), kTwoPi);
        // (1,1)/sqrt2 -> itself; (1,-1)/sqrt2 -> minus itself; so U = [[0,1],[1,0]]
        CHECK(std::abs(u(0, 0)) < 1e-14);
        CHECK(std::abs(u(0, 1) - complex_t(1.0)) < 1e-14);
        CHECK(std::abs(u(1, 0) - complex_t(1.0)) < 1e-14);
    }
    SECTION("edgeless graph gives the identity") {
        const auto u = exact_propagator(normalized(corpus::edgeless(4)), 3.3);
        CHECK(max_abs_diff(u, ComplexMatrix::identity(4)) < 1e-15);
    }
    SECTION("matches Pade exponentiation on the corpus") {
        for (const auto &ng : corpus::all_graphs()) {
            const auto l = normalized(ng.graph);
            CHECK(distance_to_oracle(exact_propagator(l, kTwoPi), l, kTwoPi) < 1e-10);
        }
    }
    SECTION("unnormalized input is rejected") {
        CHECK_THROWS_AS(exact_propagator(build_laplacian(corpus::path(2)), 1.0), InvalidArgument);
    }
}

TEST_CASE("operator distance", "[evolution][norm]") {
    ComplexMatrix a(2, 2);
    a(0, 0) = 3.0;
    a(1, 1) = complex_t(0.0, -4.0);
    CHECK_THAT(spectral_norm(a), WithinAbs(4.0, 1e-12));
    CHECK_THAT(operator_distance(a, a), WithinAbs(0.0, 1e-12));
    for (std::size_t i = 0; i < 5; ++i) {
        const auto l = normalized(connected_random(8, i));
        const auto u = EvolutionOperator(l, trotter(16)).dense();
        const auto v = exact_propagator(l, kTwoPi);
        const Eigen::MatrixXcd diff = oracle::to_eigen(u) - oracle::to_eigen(v);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
        CHECK_THAT(operator_distance(u, v), WithinAbs(svd.singularValues()(0), 1e-10));
    }
}

TEST_CASE("Trotter product formulas", "[evolution][trotter]") {
    SECTION("a single edge is exact for any r") {
        const auto l = normalized(corpus::path(2));
        for (std::size_t r : {1U, 2U, 7U, 64U}) {
            for (auto order : {TrotterOrder::first, TrotterOrder::symmetric}) {
                const auto u = EvolutionOperator(l, trotter(r, order)).dense();
                CHECK(operator_distance(u, exact_propagator(l, kTwoPi)) < 1e-12);
            }
        }
    }
    SECTION("edgeless graph gives the identity") {
        const auto u = EvolutionOperator(normalized(corpus::edgeless(4)), trotter(8)).dense();
        CHECK(max_abs_diff(u, ComplexMatrix::identity(4)) == 0.0);
    }
    SECTION("P3: first-order error halves from r = 32 to r = 64") {
        const auto l = normalized(corpus::path(3));
        const auto ex = exact_propagator(l, kTwoPi);
        const double e32 = operator_distance(EvolutionOperator(l, trotter(32)).dense(), ex);
        const double e64 = operator_distance(EvolutionOperator(l, trotter(64)).dense(), ex);
        const double ratio = e32 / e64;
        CHECK(ratio >= 1.6);
        CHECK(ratio <= 2.4);
    }
    SECTION("trotter_propagator_apply agrees with the dense operator") {
        const auto l = normalized(corpus::barbell());
        const auto psi = random_state(3, RngStream(1));
        const auto out = trotter_propagator_apply(psi, l, kTwoPi, 32, TrotterOrder::symmetric);
        const auto u = EvolutionOperator(l, trotter(32, TrotterOrder::symmetric)).dense();
        const auto want = matvec(u, psi.amplitudes());
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK(std::abs(out[i] - want[i]) < 1e-13);
        }
    }
    SECTION("symmetric order within 1e-6 of exact at r = 4096 on corpus graphs with N <= 8") {
        for (const auto &ng : corpus::all_graphs()) {
            if (ng.graph.num_vertices() > 8) {
                continue;
            }
            const auto l = normalized(ng.graph);
            const auto u = EvolutionOperator(l, trotter(4096, TrotterOrder::symmetric)).dense();
            INFO(ng.name);
            CHECK(operator_distance(u, exact_propagator(l, kTwoPi)) < 1e-6);
        }
    }
    SECTION("first order at r = 4096 stays under its commutator bound") {
        for (const auto &ng : corpus::named_graphs()) {
            const auto l = normalized(ng.graph);
            const auto u = EvolutionOperator(l, trotter(4096)).dense();
            const double err = operator_distance(u, exact_propagator(l, kTwoPi));
            const auto r_needed = suggest_trotter_steps(l, kTwoPi, err, TrotterOrder::first);
            INFO(ng.name << " err " << err);
            CHECK((r_needed >= 4096 || err < 1e-12));
        }
    }
}

TEST_CASE("backends preserve the norm", "[evolution][property]") {
    const auto l = normalized(connected_random(8, 3));
    const EvolutionOperator ex(l, exact());
    const EvolutionOperator tr(l, trotter(20, TrotterOrder::symmetric));
    for (std::size_t i = 0; i < 100; ++i) {
        const auto psi = random_state(3, RngStream(55, i));
        CHECK(std::abs(ex.apply_power(psi, i % 4).norm() - 1.0) < 1e-9);
        CHECK(std::abs(tr.apply_power(psi, i % 3).norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("eigenvectors pick up the phase exp(i lambda t)", "[evolution][phase]") {
    for (const auto &ng : corpus::named_graphs()) {
        const auto l = normalized(ng.graph);
        const auto ref = oracle::eig(oracle::to_eigen(l.to_dense()));
        const EvolutionOperator op(l, exact());
        for (Eigen::Index k = 0; k < ref.vectors.cols(); ++k) {
            std::vector<double> v(ref.vectors.col(k).data(), ref.vectors.col(k).data() + ref.vectors.rows());
            const auto out = op.apply_power(QuantumState::from_real(v), 0);
            complex_t overlap = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                overlap += v[i] * out[i];
            }
            INFO(ng.name << " k=" << k);
            CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-10);
            CHECK(std::abs(overlap - std::polar(1.0, ref.values[static_cast<std::size_t>(k)] * kTwoPi)) < 1e-10);
        }
    }
}

TEST_CASE("controlled powers", "[evolution][controlled]") {
    const auto l = normalized(corpus::barbell());
    const unsigned n = 3;

    SECTION("control |0> leaves the state unchanged") {
        const auto psi = random_state(n, RngStream(3));
        std::vector<complex_t> joint(16, 0.0);
        std::copy(psi.amplitudes().begin(), psi.amplitudes().end(), joint.begin());
        const auto s = QuantumState::from_amplitudes(joint);
        for (unsigned j = 0; j < 3; ++j) {
            CHECK(controlled_evolution_power(s, n, exact(), l, j) == s);
            CHECK(controlled_evolution_power(s, n, trotter(8), l, j) == s);
        }
    }
    SECTION("exact backend: phase exp(i lambda 2^j t) on the |1> branch") {
        const auto ref = oracle::eig(oracle::to_eigen(l.to_dense()));
        for (unsigned j = 0; j < 4; ++j) {
            for (Eigen::Index k = 0; k < 8; ++k) {
                std::vector<complex_t> joint(16, 0.0);
                for (std::size_t i = 0; i < 8; ++i) {
                    joint[i] = ref.vectors(static_cast<Eigen::Index>(i), k) / std::sqrt(2.0);
                    joint[8 + i] = joint[i];
                }
                const auto out = controlled_evolution_power(QuantumState::from_amplitudes(joint),
                                                            n, exact(), l, j);
                const auto phase = std::polar(1.0, ref.values[static_cast<std::size_t>(k)] *
                                                       std::ldexp(kTwoPi, static_cast<int>(j)));
                for (std::size_t i = 0; i < 8; ++i) {
                    CHECK(std::abs(out[i] - joint[i]) < 1e-12);
                    CHECK(std::abs(out[8 + i] - phase * joint[8 + i]) < 1e-12);
                }
            }
        }
    }
    SECTION("trotter controlled power converges at first order") {
        const EvolutionOperator ex(l, exact());
        for (unsigned j = 0; j < 3; ++j) {
            const auto target = ex.dense(j);
            const double e1 = operator_distance(EvolutionOperator(l, trotter(16)).dense(j), target);
            const double e2 = operator_distance(EvolutionOperator(l, trotter(32)).dense(j), target);
            INFO("j=" << j);
            CHECK(e1 / e2 >= 1.6);
            CHECK(e1 / e2 <= 2.4);
        }
    }
    SECTION("ladder equals the sequence of single controlled powers") {
        const auto psi = random_state(6, RngStream(9));
        const std::vector<unsigned> anc{3, 4, 5};
        for (const auto &b : {exact(), trotter(4)}) {
            const EvolutionOperator op(l, b);
            auto seq = psi;
            for (unsigned j = 0; j < 3; ++j) {
                seq = op.apply_controlled_power(std::move(seq), anc[j], j);
            }
            const auto ladder = op.apply_controlled_ladder(psi, anc);
            for (std::size_t i = 0; i < psi.size(); ++i) {
                CHECK(std::abs(ladder[i] - seq[i]) < 1e-12);
            }
            auto cached = op;
            cached.cache_trotter_powers(3);
            const auto fast = cached.apply_controlled_ladder(psi, anc);
            for (std::size_t i = 0; i < psi.size(); ++i) {
                CHECK(std::abs(fast[i] - seq[i]) < 1e-12);
            }
        }
    }
    SECTION("control inside the system register is rejected") {
        CHECK_THROWS_AS(controlled_evolution_power(QuantumState(4), 1, exact(), l, 0), InvalidArgument);
    }
}
