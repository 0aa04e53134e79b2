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

#include <algorithm>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include <qlap/corpus.hpp>
#include <qlap/graph.hpp>

using namespace qlap;
using Catch::Matchers::WithinAbs;

namespace {

Graph random_graph(std::size_t index, std::size_t n_max = 16, double p = 0.3) {
    RngStream rng(4242, index);
    const std::size_t n = 1 + rng.below(n_max);
    return corpus::erdos_renyi(n, p, rng);
}

} // namespace

TEST_CASE("edge list parsing", "[graph][parse]") {
    SECTION("plain edges") {
        const auto g = parse_edge_list("0 1\n1 2");
        CHECK(g.num_vertices() == 3);
        CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
    }
    SECTION("duplicates in both orders collapse") {
        const auto g = parse_edge_list("0 1\n1 0\n0 1");
        CHECK(g.num_vertices() == 2);
        CHECK(g.edges() == std::vector<Edge>{{0, 1}});
    }
    SECTION("self loop reports its line") {
        try {
            (void)parse_edge_list("0 0");
            FAIL("expected SelfLoopError");
        } catch (const SelfLoopError &e) {
            CHECK(e.line() == 1);
        }
        CHECK_THROWS_AS(parse_edge_list("# c\n0 1\n\n2 2\n"), SelfLoopError);
    }
    SECTION("comments, blank lines, CRLF and a header") {
        const auto g = parse_edge_list("# triangle plus isolated\r\nN 5\r\n\r\n0 1 # first\r\n1 2\r\n2 0\r\n");
        CHECK(g.num_vertices() == 5);
        CHECK(g.edges().size() == 3);
    }
    SECTION("malformed input") {
        CHECK_THROWS_AS(parse_edge_list("0 x"), ParseError);
        CHECK_THROWS_AS(parse_edge_list("0 1 2"), ParseError);
        CHECK_THROWS_AS(parse_edge_list("-1 2"), ParseError);
        CHECK_THROWS_AS(parse_edge_list("N 2\n0 5"), ParseError);
        CHECK_THROWS_AS(parse_edge_list(""), ParseError);
        CHECK_THROWS_AS(parse_edge_list("N 0"), ParseError);
    }
    SECTION("header with no edges is an edgeless graph") {
        const auto g = parse_edge_list("N 4\n");
        CHECK(g.num_vertices() == 4);
        CHECK(g.edges().empty());
    }
    SECTION("round trip through to_edge_list") {
        for (std::size_t i = 0; i < 20; ++i) {
            const auto g = random_graph(i);
            CHECK(parse_edge_list(to_edge_list(g)) == g);
        }
    }
}

TEST_CASE("graph construction rejects bad edges", "[graph]") {
    CHECK_THROWS_AS(Graph(3, {{0, 3}}), InvalidArgument);
    CHECK_THROWS_AS(Graph(3, {{1, 1}}), InvalidArgument);
    CHECK_THROWS_AS(Graph(0, {}), InvalidArgument);
    CHECK_THROWS_AS(Graph(4, {{0, 3}}, 1), InvalidArgument); // edge touches a ghost
}

TEST_CASE("Laplacian of small graphs", "[graph][laplacian]") {
    SECTION("single edge") {
        const auto l = build_laplacian(corpus::path(2)).to_dense();
        CHECK(l(0, 0) == 1.0);
        CHECK(l(0, 1) == -1.0);
        CHECK(l(1, 0) == -1.0);
        CHECK(l(1, 1) == 1.0);
    }
    SECTION("triangle") {
        const auto l = build_laplacian(corpus::complete(3));
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(l.entry(i, j) == (i == j ? 2.0 : -1.0));
            }
        }
    }
    SECTION("star") {
        const auto l = build_laplacian(corpus::star(3));
        CHECK(l.entry(0, 0) == 3.0);
        for (std::size_t j = 1; j <= 3; ++j) {
            CHECK(l.entry(j, j) == 1.0);
            CHECK(l.entry(0, j) == -1.0);
            CHECK(l.entry(j, 0) == -1.0);
        }
        CHECK(l.entry(1, 2) == 0.0);
    }
}

TEST_CASE("Laplacian invariants on random graphs", "[graph][laplacian][property]") {
    for (std::size_t i = 0; i < 50; ++i) {
        const auto g = random_graph(i);
        const auto l = build_laplacian(g);
        const auto d = l.to_dense();
        const auto ref = oracle::laplacian(g);
        for (std::size_t r = 0; r < l.dim(); ++r) {
            double row_sum = 0.0;
            for (std::size_t c = 0; c < l.dim(); ++c) {
                CHECK(d(r, c) == d(c, r));
                CHECK(d(r, c) == ref(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
                row_sum += d(r, c);
            }
            CHECK(row_sum == 0.0);
        }
        const std::vector<double> ones(l.dim(), 1.0);
        for (const double y : l.apply(ones)) {
            CHECK(y == 0.0);
        }
        for (const double lambda : oracle::eigenvalues(g)) {
            CHECK(lambda > -1e-10);
        }
    }
}

TEST_CASE("padding to a power of two", "[graph][pad]") {
    const auto p3 = pad_to_power_of_two(corpus::path(3));
    CHECK(p3.num_vertices() == 4);
    CHECK(p3.ghost_count() == 1);
    CHECK(p3.real_vertices() == 3);
    CHECK(p3.edges() == corpus::path(3).edges());

    const auto c4 = corpus::cycle(4);
    CHECK(pad_to_power_of_two(c4) == c4);

    const auto b = pad_to_power_of_two(corpus::barbell());
    CHECK(b.num_vertices() == 8);
    CHECK(b.ghost_count() == 2);

    SECTION("each ghost adds exactly one zero eigenvalue") {
        for (std::size_t i = 0; i < 30; ++i) {
            const auto g = random_graph(i);
            const auto padded = pad_to_power_of_two(g);
            CHECK(padded.num_vertices() - g.num_vertices() == padded.ghost_count());
            const auto z0 = oracle::zero_count(oracle::eigenvalues(g));
            const auto z1 = oracle::zero_count(oracle::eigenvalues(padded));
            CHECK(z1 == z0 + padded.ghost_count());
        }
    }
}

TEST_CASE("normalization", "[graph][normalize]") {
    SECTION("K2: c = 4, spectrum {0, 0.5}") {
        const auto l = normalize_laplacian(build_laplacian(corpus::path(2)));
        CHECK(l.divisor() == 4.0);
        CHECK(l.is_normalized());
        const auto ev = oracle::eig(oracle::to_eigen(l.to_dense())).values;
        CHECK_THAT(ev[0], WithinAbs(0.0, 1e-14));
        CHECK_THAT(ev[1], WithinAbs(0.5, 1e-14));
    }
    SECTION("C4: c = 8, spectrum {0, .25, .25, .5}") {
        const auto l = normalize_laplacian(build_laplacian(corpus::cycle(4)));
        CHECK(l.divisor() == 8.0);
        const auto ev = oracle::eig(oracle::to_eigen(l.to_dense())).values;
        const std::vector<double> want{0.0, 0.25, 0.25, 0.5};
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK_THAT(ev[i], WithinAbs(want[i], 1e-14));
        }
    }
    SECTION("edgeless: c = 1, zero matrix") {
        const auto l = normalize_laplacian(build_laplacian(corpus::edgeless(4)));
        CHECK(l.divisor() == 1.0);
        const auto d = l.to_dense();
        CHECK(std::all_of(d.data().begin(), d.data().end(), [](double x) { return x == 0.0; }));
    }
    SECTION("double normalization is rejected") {
        const auto l = normalize_laplacian(build_laplacian(corpus::path(3)));
        CHECK_THROWS_AS(normalize_laplacian(l), InvalidArgument);
    }
    SECTION("exact mode puts the top eigenvalue just below 1") {
        const auto l = normalize_laplacian(build_laplacian(corpus::barbell()), NormMode::exact);
        const auto ev = oracle::eig(oracle::to_eigen(l.to_dense())).values;
        CHECK(ev.back() < 1.0);
        CHECK(ev.back() > 1.0 - 1e-5);
    }
    SECTION("gershgorin_pow2 stays strictly below 1 on 50 random graphs") {
        for (std::size_t i = 0; i < 50; ++i) {
            const auto g = random_graph(i + 100);
            const auto l = normalize_laplacian(build_laplacian(g));
            const auto ev = oracle::eig(oracle::to_eigen(l.to_dense())).values;
            CHECK(ev.back() < 1.0);
            CHECK(std::has_single_bit(static_cast<std::size_t>(l.divisor())));
        }
    }
}

TEST_CASE("connected components", "[graph][components]") {
    CHECK(connected_components(Graph(4, {{0, 1}, {2, 3}})).count == 2);
    CHECK(connected_components(corpus::barbell()).count == 1);

    const auto padded = pad_to_power_of_two(corpus::path(3));
    const auto c = connected_components(padded);
    CHECK(c.count == 1);
    CHECK(c.labels.size() == 3);
    CHECK(c.ghost_components == 1);

    SECTION("count equals the number of zero eigenvalues") {
        for (std::size_t i = 0; i < 50; ++i) {
            const auto g = random_graph(i + 200, 16, 0.15);
            CHECK(connected_components(g).count == oracle::zero_count(oracle::eigenvalues(g)));
        }
    }
}

TEST_CASE("cut size", "[graph][cut]") {
    const auto b = corpus::barbell();
    CHECK(cut_size(b, std::vector<std::size_t>{0, 0, 0, 1, 1, 1}, 2) == 1);
    CHECK(cut_size(b, std::vector<std::size_t>(6, 0), 1) == 0);
    CHECK(cut_size(corpus::complete(4), std::vector<std::size_t>{0, 0, 1, 1}, 2) == 4);

    const auto p = make_partition(b, {5, 5, 5, 2, 2, 2});
    CHECK(p.assignment == std::vector<std::size_t>{1, 1, 1, 0, 0, 0});
    CHECK(p.num_blocks == 2);
    CHECK(p.cut_edges == 1);
    CHECK(same_up_to_relabeling(p, make_partition(b, {0, 0, 0, 1, 1, 1})));
    CHECK_FALSE(same_up_to_relabeling(p, make_partition(b, {0, 0, 1, 1, 1, 1})));
}
