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
#include <sstream>

#include <qlap/corpus.hpp>
#include <qlap/resources.hpp>

using namespace qlap;
using Catch::Matchers::WithinAbs;

TEST_CASE("resource estimates from the formulas", "[resources]") {
    SECTION("N = 1024, delta = 1/64") {
        const auto r = estimate_resources(1024, 5, 1.0 / 64, 1e-3);
        CHECK(r.n_system == 10);
        CHECK(r.m_ancilla == 8);
        CHECK(r.total_qubits == 18);
        CHECK(r.controlled_u_applications == 255);
    }
    SECTION("N = 5 padded to 8, delta = 1/4") {
        const auto r = estimate_resources(5, 2, 0.25, 1e-3);
        CHECK(r.padded_vertices == 8);
        CHECK(r.n_system == 3);
        CHECK(r.m_ancilla == 4);
        CHECK(r.total_qubits == 7);
        CHECK(r.controlled_u_applications == 15);
    }
    SECTION("query and runtime fields") {
        const auto r = estimate_resources(16, 3, 0.125, 0.25);
        CHECK_THAT(r.oracle_calls_per_u, WithinAbs(2.0 * std::numbers::pi + 2.0, 1e-12));
        CHECK_THAT(r.runtime_value, WithinAbs(3.0 * 4.0 / 0.125, 1e-12));
        CHECK(r.runtime_class == "O(d*log(N)/delta)");
        CHECK(r.classical_exact_class == "O(N^3)");
        CHECK(r.classical_memory_class == "O(N)");
    }
    SECTION("out-of-range parameters are rejected") {
        CHECK_THROWS_AS(estimate_resources(8, 2, 2.0, 0.1), InvalidArgument);
        CHECK_THROWS_AS(estimate_resources(8, 2, 0.0, 0.1), InvalidArgument);
        CHECK_THROWS_AS(estimate_resources(8, 2, 0.1, 1.0), InvalidArgument);
        CHECK_THROWS_AS(estimate_resources(0, 0, 0.1, 0.1), InvalidArgument);
    }
    SECTION("graph overload uses N and the max degree") {
        const auto r = estimate_resources(corpus::barbell(), 0.25, 0.01);
        CHECK(r.num_vertices == 6);
        CHECK(r.max_degree == 3);
        CHECK(r.total_qubits == 7);
    }
}

TEST_CASE("streaming degree summary", "[resources][stream]") {
    for (const auto &ng : corpus::all_graphs()) {
        std::istringstream in(to_edge_list(ng.graph));
        const auto s = stream_degrees(in);
        CHECK(s.num_vertices == ng.graph.num_vertices());
        CHECK(s.max_degree == ng.graph.max_degree());
        CHECK(s.edges_read == ng.graph.edges().size());
    }
    std::istringstream dup("0 1\n1 0\n0 1\n1 2\n");
    const auto s = stream_degrees(dup);
    CHECK(s.max_degree == 2);
    CHECK(s.num_vertices == 3);
    std::istringstream loop("0 0\n");
    CHECK_THROWS_AS(stream_degrees(loop), SelfLoopError);
    std::istringstream empty("# nothing\n");
    CHECK_THROWS_AS(stream_degrees(empty), ParseError);
}
