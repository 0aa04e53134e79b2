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
#include <cstdlib>

#include "oracles.hpp"
#include <qlap/corpus.hpp>
#include <qlap/spectral.hpp>
#include <qlap/symmetric_eigen.hpp>

using namespace qlap;
using Catch::Matchers::WithinAbs;

namespace {

Graph random_graph(std::size_t index, std::size_t n_min = 2, std::size_t n_max = 16,
                   double p = 0.3) {
    RngStream rng(9001, index);
    const std::size_t n = n_min + rng.below(n_max - n_min + 1);
    return corpus::erdos_renyi(n, p, rng);
}

Graph random_connected(std::size_t index, std::size_t n) {
    for (std::size_t attempt = 0;; ++attempt) {
        auto g = corpus::erdos_renyi(n, 0.4, RngStream(77, index * 1000 + attempt));
        if (connected_components(g).count == 1) {
            return g;
        }
    }
}

RealMatrix random_symmetric(std::size_t n, RngStream rng) {
    RealMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            a(i, j) = a(j, i) = rng.normal();
        }
    }
    return a;
}

} // namespace

TEST_CASE("dense eigensolver against Eigen", "[spectral][eigen]") {
    for (std::size_t n : {1U, 2U, 3U, 5U, 8U, 17U, 40U}) {
        const auto a = random_symmetric(n, RngStream(5, n));
        const auto mine = symmetric_eigen(a);
        const auto ref = oracle::eig(oracle::to_eigen(a));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK_THAT(mine.values[i], WithinAbs(ref.values[i], 1e-10));
        }
        // A v = lambda v and orthonormal columns
        for (std::size_t c = 0; c < n; ++c) {
            const auto v = mine.vectors.column(c);
            const auto av = matvec(a, std::span<const double>(v));
            for (std::size_t r = 0; r < n; ++r) {
                CHECK_THAT(av[r], WithinAbs(mine.values[c] * v[r], 1e-10));
            }
            for (std::size_t d = 0; d < n; ++d) {
                double dot = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    dot += v[r] * mine.vectors(r, d);
                }
                CHECK_THAT(dot, WithinAbs(c == d ? 1.0 : 0.0, 1e-10));
            }
        }
    }
}

TEST_CASE("eig_sym on small graphs", "[spectral][eig]") {
    SECTION("K2") {
        const auto s = eig_sym(build_laplacian(corpus::path(2)));
        CHECK_THAT(s.eigenvalues[0], WithinAbs(0.0, 1e-14));
        CHECK_THAT(s.eigenvalues[1], WithinAbs(2.0, 1e-14));
        const double h = 1.0 / std::sqrt(2.0);
        CHECK_THAT(s.eigenvectors(0, 0), WithinAbs(h, 1e-14));
        CHECK_THAT(s.eigenvectors(1, 0), WithinAbs(h, 1e-14));
        CHECK_THAT(s.eigenvectors(0, 1), WithinAbs(h, 1e-14));
        CHECK_THAT(s.eigenvectors(1, 1), WithinAbs(-h, 1e-14));
    }
    SECTION("P3: roots of the characteristic polynomial -x(x-1)(x-3)") {
        const auto s = eig_sym(build_laplacian(corpus::path(3)));
        const std::vector<double> want{0.0, 1.0, 3.0};
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK_THAT(s.eigenvalues[i], WithinAbs(want[i], 1e-12));
            // det(L - x I) for L = [[1,-1,0],[-1,2,-1],[0,-1,1]]
            const double x = s.eigenvalues[i];
            const double det = (1 - x) * ((2 - x) * (1 - x) - 1) - (1 - x);
            CHECK_THAT(det, WithinAbs(0.0, 1e-11));
        }
    }
    SECTION("K4: {0, 4, 4, 4}") {
        const auto s = eig_sym(build_laplacian(corpus::complete(4)));
        CHECK_THAT(s.eigenvalues[0], WithinAbs(0.0, 1e-12));
        for (std::size_t i = 1; i < 4; ++i) {
            CHECK_THAT(s.eigenvalues[i], WithinAbs(4.0, 1e-12));
        }
    }
    SECTION("barbell: {0, (5-sqrt17)/2, 3, 3, 3, (5+sqrt17)/2}") {
        const auto s = eig_sym(build_laplacian(corpus::barbell()));
        const double r = std::sqrt(17.0);
        const std::vector<double> want{0.0, (5 - r) / 2, 3, 3, 3, (5 + r) / 2};
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK_THAT(s.eigenvalues[i], WithinAbs(want[i], 1e-12));
        }
    }
    SECTION("normalized input scales zero_tol") {
        const auto l = normalize_laplacian(build_laplacian(corpus::two_triangles()));
        CHECK(eig_sym(l).num_zero == 2);
    }
}

TEST_CASE("degenerate clusters are canonical", "[spectral][eig]") {
    // K4's eigenvalue-4 space: Gram-Schmidt of projected e0, e1, e2
    const auto s = eig_sym(build_laplacian(corpus::complete(4)));
    const double a = std::sqrt(3.0) / 2.0;
    CHECK_THAT(s.eigenvectors(0, 1), WithinAbs(a, 1e-12));
    for (std::size_t r = 1; r < 4; ++r) {
        CHECK_THAT(s.eigenvectors(r, 1), WithinAbs(-1.0 / (2.0 * std::sqrt(3.0)), 1e-12));
    }
    CHECK_THAT(s.eigenvectors(0, 2), WithinAbs(0.0, 1e-12));
    CHECK(s.eigenvectors(1, 2) > 0.0);

    // identical across permuted-but-equal inputs: solve twice, compare bits
    const auto again = eig_sym(build_laplacian(corpus::complete(4)));
    CHECK(again.eigenvectors.data().size() == s.eigenvectors.data().size());
    CHECK(std::equal(again.eigenvectors.data().begin(), again.eigenvectors.data().end(),
                     s.eigenvectors.data().begin()));

    SECTION("first nonzero component is positive in every column") {
        for (const auto &ng : corpus::all_graphs()) {
            const auto sp = eig_sym(build_laplacian(ng.graph));
            for (std::size_t c = 0; c < sp.eigenvalues.size(); ++c) {
                const auto v = sp.eigenvectors.column(c);
                const auto it = std::find_if(v.begin(), v.end(),
                                             [](double x) { return std::abs(x) > 1e-9; });
                REQUIRE(it != v.end());
                CHECK(*it > 0.0);
            }
        }
    }
}

TEST_CASE("spectral decomposition properties", "[spectral][property]") {
    SECTION("reconstruction sum_i lambda_i v_i v_i^T = L") {
        for (std::size_t i = 0; i < 30; ++i) {
            const auto g = i < 3 ? random_graph(i, 64, 64, 0.1) : random_graph(i);
            const auto l = build_laplacian(g);
            const auto s = eig_sym(l);
            const auto d = l.to_dense();
            const std::size_t n = l.dim();
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) {
                    double acc = 0.0;
                    for (std::size_t k = 0; k < n; ++k) {
                        acc += s.eigenvalues[k] * s.eigenvectors(r, k) * s.eigenvectors(c, k);
                    }
                    CHECK_THAT(acc, WithinAbs(d(r, c), 1e-8));
                }
            }
        }
    }
    SECTION("num_zero equals the component count") {
        for (const auto &ng : corpus::all_graphs()) {
            CHECK(eig_sym(build_laplacian(ng.graph)).num_zero ==
                  connected_components(ng.graph).count);
        }
    }
    SECTION("Fiedler value never decreases when an edge is added") {
        for (std::size_t i = 0; i < 40; ++i) {
            const auto g = random_connected(i, 4 + i % 9);
            const auto n = g.num_vertices();
            RngStream rng(31, i);
            std::vector<Edge> edges = g.edges();
            for (int tries = 0; tries < 100; ++tries) {
                const auto u = static_cast<vertex_t>(rng.below(n));
                const auto v = static_cast<vertex_t>(rng.below(n));
                if (u == v) {
                    continue;
                }
                const Edge e{std::min(u, v), std::max(u, v)};
                if (std::find(edges.begin(), edges.end(), e) == edges.end()) {
                    edges.push_back(e);
                    break;
                }
            }
            const Graph h(n, edges);
            CHECK(fiedler(build_laplacian(h)).value >=
                  fiedler(build_laplacian(g)).value - 1e-10);
        }
    }
}

TEST_CASE("Fiedler pair", "[spectral][fiedler]") {
    const auto k2 = fiedler(build_laplacian(corpus::path(2)));
    CHECK_THAT(k2.value, WithinAbs(2.0, 1e-14));
    CHECK_THAT(k2.vector[0], WithinAbs(1.0 / std::sqrt(2.0), 1e-14));
    CHECK_THAT(k2.vector[1], WithinAbs(-1.0 / std::sqrt(2.0), 1e-14));

    const auto b = fiedler(build_laplacian(corpus::barbell()));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(b.vector[i] > 0.0);
        CHECK(b.vector[i + 3] < 0.0);
    }
    // matches Eigen up to sign
    const auto ref = oracle::eig(oracle::laplacian(corpus::barbell()));
    const double flip = ref.vectors(0, 1) > 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK_THAT(b.vector[i], WithinAbs(flip * ref.vectors(static_cast<Eigen::Index>(i), 1), 1e-10));
    }

    try {
        (void)fiedler(build_laplacian(Graph(4, {{0, 1}, {2, 3}})));
        FAIL("expected DisconnectedGraph");
    } catch (const DisconnectedGraph &e) {
        CHECK(e.components() == 2);
    }
}

TEST_CASE("sign bisection", "[spectral][bisect]") {
    const auto k2 = corpus::path(2);
    const std::vector<double> v{0.7, -0.7};
    CHECK(sign_bisect(k2, v).assignment == std::vector<std::size_t>{0, 1});

    const auto b = corpus::barbell();
    const auto p = sign_bisect(b, fiedler(build_laplacian(b)).vector);
    CHECK(p.assignment == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
    CHECK(p.cut_edges == 1);

    const std::vector<double> pos{0.1, 0.2, 0.3};
    const auto single = sign_bisect(corpus::path(3), pos);
    CHECK(single.num_blocks == 1);
    const std::vector<double> neg{-0.1, -0.2, -0.3};
    CHECK(sign_bisect(corpus::path(3), neg).num_blocks == 1);

    SECTION("ties go to block 0") {
        const std::vector<double> t{1.0, 0.0, -1.0};
        CHECK(sign_bisect(corpus::path(3), t).assignment == std::vector<std::size_t>{0, 0, 1});
    }
    SECTION("invariant under positive scaling, swapped under negation") {
        for (std::size_t i = 0; i < 20; ++i) {
            const auto g = random_connected(i + 50, 6 + i % 8);
            auto f = fiedler(build_laplacian(g)).vector;
            const auto base = sign_bisect(g, f);
            auto scaled = f;
            for (auto &x : scaled) {
                x *= 3.5;
            }
            CHECK(sign_bisect(g, scaled) == base);
            auto neg_f = f;
            for (auto &x : neg_f) {
                x = -x;
            }
            if (std::none_of(f.begin(), f.end(), [](double x) { return std::abs(x) <= 1e-9; })) {
                CHECK(same_up_to_relabeling(sign_bisect(g, neg_f), base));
            }
        }
    }
    SECTION("ghost entries are ignored") {
        const auto padded = pad_to_power_of_two(corpus::barbell());
        std::vector<double> w{1, 1, 1, -1, -1, -1, -5, -5};
        CHECK(sign_bisect(padded, w).assignment.size() == 6);
    }
}

TEST_CASE("spectral embedding", "[spectral][embed]") {
    const auto b = corpus::barbell();
    const auto l = build_laplacian(b);
    const auto e1 = spectral_embed(l, 1);
    for (std::size_t r = 0; r < 6; ++r) {
        CHECK_THAT(e1(r, 0), WithinAbs(1.0 / std::sqrt(6.0), 1e-12));
    }
    const auto e2 = spectral_embed(l, 2);
    const auto f = fiedler(l).vector;
    for (std::size_t r = 0; r < 6; ++r) {
        CHECK(e2(r, 1) == f[r]);
    }
    const auto full = spectral_embed(l, 6);
    for (std::size_t a = 0; a < 6; ++a) {
        for (std::size_t c = 0; c < 6; ++c) {
            double dot = 0.0;
            for (std::size_t r = 0; r < 6; ++r) {
                dot += full(r, a) * full(r, c);
            }
            CHECK_THAT(dot, WithinAbs(a == c ? 1.0 : 0.0, 1e-12));
        }
    }
    CHECK_THROWS_AS(spectral_embed(l, 0), InvalidArgument);
    CHECK_THROWS_AS(spectral_embed(l, 7), InvalidArgument);
}

TEST_CASE("recursive bisection", "[spectral][recursive]") {
    const auto b = corpus::barbell();
    CHECK(recursive_bisect(b, 2).assignment == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
    CHECK(recursive_bisect(b, 1).num_blocks == 1);
    const auto tt = recursive_bisect(corpus::two_triangles(), 2);
    CHECK(tt.assignment == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
    CHECK(tt.cut_edges == 0);
    const auto k4 = recursive_bisect(corpus::path(8), 4);
    CHECK(k4.num_blocks == 4);
    CHECK(k4.cut_edges == 3);
    CHECK_THROWS_AS(recursive_bisect(b, 0), InvalidArgument);
    CHECK_THROWS_AS(recursive_bisect(b, 7), InvalidArgument);

    SECTION("k = 2 on connected graphs equals Fiedler sign bisection") {
        for (std::size_t i = 0; i < 20; ++i) {
            const auto g = random_connected(i + 80, 4 + i % 12);
            const auto direct = sign_bisect(g, fiedler(build_laplacian(g)).vector);
            CHECK(same_up_to_relabeling(recursive_bisect(g, 2), direct));
        }
    }
}

TEST_CASE("oracle size cap", "[spectral][cap]") {
    const auto l = build_laplacian(corpus::path(6));
    SpectralOptions opts;
    opts.cap = 4;
    CHECK_THROWS_AS(eig_sym(l, opts), CapExceeded);
    ::setenv("QLAP_ORACLE_CAP", "5", 1);
    CHECK(oracle_cap() == 5);
    CHECK_THROWS_AS(eig_sym(l), CapExceeded);
    ::unsetenv("QLAP_ORACLE_CAP");
    CHECK(oracle_cap() == kDefaultOracleCap);
    CHECK_NOTHROW(eig_sym(l));
}
