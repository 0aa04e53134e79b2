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
/**
 * @file
 * Resource counts for phase estimation on a graph Laplacian, from the
 * textbook QPE formulas. Nothing here simulates anything, so it works for
 * graphs far beyond the simulator's reach.
 */
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <unordered_set>
#include <vector>

#include "errors.hpp"
#include "evolution.hpp"
#include "graph.hpp"
#include "qpe.hpp"

namespace qlap {

struct ResourceEstimate {
    std::size_t num_vertices = 0;
    std::size_t padded_vertices = 0;
    std::size_t max_degree = 0;
    double delta = 0.0;
    double epsilon = 0.0;
    double t = kTwoPi;

    unsigned n_system = 0;
    unsigned m_ancilla = 0;
    unsigned total_qubits = 0;
    std::uint64_t controlled_u_applications = 0;
    /// kappa * (t + log2(1/epsilon)) with kappa = 1
    double oracle_calls_per_u = 0.0;
    std::string oracle_calls_formula = "kappa*(t + log2(1/epsilon)), kappa = 1";
    std::string runtime_class = "O(d*log(N)/delta)";
    double runtime_value = 0.0; ///< d * log2(N) / delta
    std::string classical_exact_class = "O(N^3)";
    std::string classical_memory_class = "O(N)";
};

inline ResourceEstimate estimate_resources(std::size_t num_vertices, std::size_t max_degree,
                                           double delta, double epsilon,
                                           unsigned guard = 2, double t = kTwoPi) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InvalidArgument("delta must lie in (0, 1)");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvalidArgument("epsilon must lie in (0, 1)");
    }
    if (num_vertices == 0) {
        throw InvalidArgument("graph has no vertices");
    }
    ResourceEstimate r;
    r.num_vertices = num_vertices;
    r.padded_vertices = next_power_of_two(num_vertices);
    r.max_degree = max_degree;
    r.delta = delta;
    r.epsilon = epsilon;
    r.t = t;
    r.n_system = static_cast<unsigned>(std::countr_zero(r.padded_vertices));
    r.m_ancilla = bits_for_precision(delta) + guard;
    r.total_qubits = r.n_system + r.m_ancilla;
    if (r.m_ancilla >= 64) {
        throw InvalidArgument("delta too small: ancilla count overflows");
    }
    r.controlled_u_applications = (std::uint64_t{1} << r.m_ancilla) - 1;
    r.oracle_calls_per_u = t + std::log2(1.0 / epsilon);
    r.runtime_value = static_cast<double>(max_degree) *
                      std::log2(static_cast<double>(r.padded_vertices)) / delta;
    return r;
}

inline ResourceEstimate estimate_resources(const Graph &g, double delta, double epsilon,
                                           unsigned guard = 2, double t = kTwoPi) {
    return estimate_resources(g.num_vertices(), g.max_degree(), delta, epsilon, guard, t);
}

/// Vertex count and maximum degree of an edge list in one pass, without
/// building the Laplacian. Duplicate edges count once.
struct DegreeSummary {
    std::size_t num_vertices = 0;
    std::size_t max_degree = 0;
    std::size_t edges_read = 0;
};

inline DegreeSummary stream_degrees(std::istream &in) {
    DegreeSummary s;
    std::vector<std::size_t> deg;
    std::unordered_set<std::uint64_t> seen;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    std::size_t declared = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = detail::trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) {
            continue;
        }
        const auto toks = detail::split_ws(body);
        if (!header_seen && s.edges_read == 0 && toks.size() == 2 && toks[0] == "N") {
            declared = detail::parse_index(toks[1], lineno);
            if (declared == 0) {
                throw ParseError(lineno, "vertex count must be positive");
            }
            header_seen = true;
            continue;
        }
        if (toks.size() != 2) {
            throw ParseError(lineno, "expected two vertex ids");
        }
        const auto u = detail::parse_index(toks[0], lineno);
        const auto v = detail::parse_index(toks[1], lineno);
        if (u == v) {
            throw SelfLoopError(lineno);
        }
        if (header_seen && (u >= declared || v >= declared)) {
            throw ParseError(lineno, "vertex id out of range");
        }
        const auto lo = std::min(u, v);
        const auto hi = static_cast<std::size_t>(std::max(u, v));
        if (!seen.insert((lo << 32) | hi).second) {
            continue;
        }
        if (deg.size() <= hi) {
            deg.resize(hi + 1, 0);
        }
        s.max_degree = std::max({s.max_degree, ++deg[u], ++deg[v]});
        ++s.edges_read;
    }
    s.num_vertices = header_seen ? declared : deg.size();
    if (s.num_vertices == 0) {
        throw ParseError(lineno, "empty graph");
    }
    return s;
}

} // namespace qlap
