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
 * The built-in graph corpus: small named graphs plus seeded Erdos-Renyi
 * graphs.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"

namespace qlap::corpus {

struct NamedGraph {
    std::string name;
    Graph graph;
};

inline Graph path(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        edges.push_back({static_cast<vertex_t>(i), static_cast<vertex_t>(i + 1)});
    }
    return Graph(n, std::move(edges));
}

inline Graph cycle(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        edges.push_back({static_cast<vertex_t>(i), static_cast<vertex_t>((i + 1) % n)});
    }
    return Graph(n, std::move(edges));
}

inline Graph complete(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            edges.push_back({static_cast<vertex_t>(i), static_cast<vertex_t>(j)});
        }
    }
    return Graph(n, std::move(edges));
}

/// Centre 0 joined to `leaves` leaves.
inline Graph star(std::size_t leaves) {
    std::vector<Edge> edges;
    for (std::size_t i = 1; i <= leaves; ++i) {
        edges.push_back({0, static_cast<vertex_t>(i)});
    }
    return Graph(leaves + 1, std::move(edges));
}

/// Triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
inline Graph barbell() {
    return Graph(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}});
}

inline Graph two_triangles() {
    return Graph(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
}

inline Graph edgeless(std::size_t n) { return Graph(n, {}); }

/// G(n, p): each pair (i, j), i < j in lexicographic order, is kept when a
/// uniform draw falls below p.
inline Graph erdos_renyi(std::size_t n, double p, RngStream rng) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.uniform() < p) {
                edges.push_back({static_cast<vertex_t>(i), static_cast<vertex_t>(j)});
            }
        }
    }
    return Graph(n, std::move(edges));
}

inline constexpr std::uint64_t kRandomSeed = 20260101;
inline constexpr std::size_t kRandomCount = 20;
inline constexpr double kRandomEdgeProbability = 0.3;

/// Random graph i of the shipped corpus: N uniform in [4, 16], p = 0.3.
inline Graph random_graph(std::size_t i) {
    const RngStream base(kRandomSeed, 0);
    auto stream = base.split(i);
    const std::size_t n = 4 + stream.below(13);
    return erdos_renyi(n, kRandomEdgeProbability, stream);
}

inline std::vector<NamedGraph> named_graphs() {
    return {
        {"P2", path(2)},
        {"P3", path(3)},
        {"C4", cycle(4)},
        {"K4", complete(4)},
        {"S4", star(3)},
        {"B6", barbell()},
        {"two_triangles", two_triangles()},
    };
}

inline std::vector<NamedGraph> random_graphs() {
    std::vector<NamedGraph> out;
    for (std::size_t i = 0; i < kRandomCount; ++i) {
        out.push_back({"random_" + std::string(i < 10 ? "0" : "") + std::to_string(i),
                       random_graph(i)});
    }
    return out;
}

inline std::vector<NamedGraph> all_graphs() {
    auto out = named_graphs();
    for (auto &g : random_graphs()) {
        out.push_back(std::move(g));
    }
    return out;
}

} // namespace qlap::corpus
