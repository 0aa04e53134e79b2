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
 * Undirected simple graphs, edge-list parsing, the combinatorial Laplacian
 * L = D - A, power-of-two padding with isolated "ghost" vertices, spectral
 * normalization and union-find connectivity.
 */
#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"
#include "symmetric_eigen.hpp"

namespace qlap {

using vertex_t = std::uint32_t;

/// Undirected edge stored with u < v.
struct Edge {
    vertex_t u;
    vertex_t v;

    friend auto operator<=>(const Edge &, const Edge &) = default;
};

class Graph {
  public:
    Graph() = default;

    /// Edges may come in any order and orientation; duplicates collapse.
    Graph(std::size_t num_vertices, std::vector<Edge> edges,
          std::size_t ghost_count = 0)
        : num_vertices_(num_vertices), ghost_count_(ghost_count) {
        if (num_vertices == 0) {
            throw InvalidArgument("graph needs at least one vertex");
        }
        if (ghost_count >= num_vertices) {
            throw InvalidArgument("ghost_count must leave a real vertex");
        }
        for (auto &e : edges) {
            if (e.u == e.v) {
                throw InvalidArgument("self-loop on vertex " +
                                      std::to_string(e.u));
            }
            if (e.u > e.v) {
                std::swap(e.u, e.v);
            }
            if (e.v >= num_vertices) {
                throw InvalidArgument("edge endpoint " + std::to_string(e.v) +
                                      " out of range");
            }
            if (e.v >= num_vertices - ghost_count) {
                throw InvalidArgument("ghost vertices must be isolated");
            }
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        edges_ = std::move(edges);
    }

    [[nodiscard]] std::size_t num_vertices() const noexcept {
        return num_vertices_;
    }
    [[nodiscard]] std::size_t ghost_count() const noexcept {
        return ghost_count_;
    }
    /// Vertices that are not padding.
    [[nodiscard]] std::size_t real_vertices() const noexcept {
        return num_vertices_ - ghost_count_;
    }
    /// Sorted lexicographically, u < v within each edge.
    [[nodiscard]] const std::vector<Edge> &edges() const noexcept {
        return edges_;
    }

    [[nodiscard]] std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> deg(num_vertices_, 0);
        for (const auto &e : edges_) {
            ++deg[e.u];
            ++deg[e.v];
        }
        return deg;
    }

    [[nodiscard]] std::size_t max_degree() const {
        const auto deg = degrees();
        return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
    }

    [[nodiscard]] std::vector<std::vector<vertex_t>> adjacency() const {
        std::vector<std::vector<vertex_t>> adj(num_vertices_);
        for (const auto &e : edges_) {
            adj[e.u].push_back(e.v);
            adj[e.v].push_back(e.u);
        }
        for (auto &a : adj) {
            std::sort(a.begin(), a.end());
        }
        return adj;
    }

    friend bool operator==(const Graph &, const Graph &) = default;

  private:
    std::size_t num_vertices_ = 0;
    std::size_t ghost_count_ = 0;
    std::vector<Edge> edges_;
};

/// Vertex -> block assignment over the real (non-ghost) vertices.
struct Partition {
    std::vector<std::size_t> assignment;
    std::size_t num_blocks = 0;
    std::size_t cut_edges = 0;

    friend bool operator==(const Partition &, const Partition &) = default;
};

// --------------------------------------------------------------------------
// Edge-list parsing
// --------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n\v\f";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') {
            ++j;
        }
        if (j > i) {
            out.push_back(s.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

inline std::uint64_t parse_index(std::string_view tok, std::size_t line) {
    std::uint64_t value = 0;
    const auto *first = tok.data();
    const auto *last = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError(line, "expected a nonnegative integer, got '" +
                                   std::string(tok) + "'");
    }
    if (value > std::numeric_limits<vertex_t>::max() - 1) {
        throw ParseError(line, "vertex index too large");
    }
    return value;
}

} // namespace detail

/// Reads "u v" lines. `#` starts a comment, blank lines are skipped and a
/// leading "N <count>" header fixes the vertex count.
inline Graph parse_edge_list(std::istream &in) {
    std::vector<Edge> edges;
    std::size_t declared = 0;
    bool have_header = false;
    bool seen_content = false;
    std::uint64_t max_index = 0;
    bool any_edge = false;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto toks = detail::split_ws(line);
        if (!seen_content && toks.size() == 2 && toks[0] == "N") {
            declared = detail::parse_index(toks[1], line_no);
            if (declared == 0) {
                throw ParseError(line_no, "vertex count must be positive");
            }
            have_header = true;
            seen_content = true;
            continue;
        }
        seen_content = true;
        if (toks.size() != 2) {
            throw ParseError(line_no, "expected 'u v'");
        }
        const auto u = detail::parse_index(toks[0], line_no);
        const auto v = detail::parse_index(toks[1], line_no);
        if (u == v) {
            throw SelfLoopError(line_no);
        }
        if (have_header && std::max(u, v) >= declared) {
            throw ParseError(line_no, "endpoint " + std::to_string(std::max(u, v)) +
                                          " >= declared N " +
                                          std::to_string(declared));
        }
        max_index = std::max({max_index, u, v});
        any_edge = true;
        edges.push_back({static_cast<vertex_t>(u), static_cast<vertex_t>(v)});
    }
    std::size_t n = declared;
    if (!have_header) {
        if (!any_edge) {
            throw ParseError(line_no, "no edges and no 'N <count>' header");
        }
        n = static_cast<std::size_t>(max_index) + 1;
    }
    return Graph(n, std::move(edges));
}

inline Graph parse_edge_list(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_edge_list(in);
}

/// Serializes with an explicit header so isolated trailing vertices survive.
inline std::string to_edge_list(const Graph &g) {
    std::ostringstream os;
    os << "N " << g.real_vertices() << '\n';
    for (const auto &e : g.edges()) {
        os << e.u << ' ' << e.v << '\n';
    }
    return os.str();
}

// --------------------------------------------------------------------------
// Laplacian
// --------------------------------------------------------------------------

/// Symmetric Laplacian stored by row, optionally scaled by 1/divisor.
class LaplacianMatrix {
  public:
    struct Entry {
        std::size_t col;
        double value;
    };

    LaplacianMatrix() = default;
    LaplacianMatrix(std::vector<std::vector<Entry>> rows,
                    std::size_t max_degree, double divisor, bool normalized)
        : rows_(std::move(rows)), max_degree_(max_degree), divisor_(divisor),
          normalized_(normalized) {}

    [[nodiscard]] std::size_t dim() const noexcept { return rows_.size(); }
    [[nodiscard]] std::size_t max_degree() const noexcept {
        return max_degree_;
    }
    [[nodiscard]] double divisor() const noexcept { return divisor_; }
    [[nodiscard]] bool is_normalized() const noexcept { return normalized_; }
    [[nodiscard]] const std::vector<Entry> &row(std::size_t i) const {
        return rows_.at(i);
    }

    [[nodiscard]] double entry(std::size_t i, std::size_t j) const {
        for (const auto &e : rows_.at(i)) {
            if (e.col == j) {
                return e.value;
            }
        }
        return 0.0;
    }

    [[nodiscard]] RealMatrix to_dense() const {
        RealMatrix m(dim(), dim());
        for (std::size_t i = 0; i < dim(); ++i) {
            for (const auto &e : rows_[i]) {
                m(i, e.col) = e.value;
            }
        }
        return m;
    }

    [[nodiscard]] std::vector<double> apply(std::span<const double> x) const {
        if (x.size() != dim()) {
            throw InvalidArgument("Laplacian apply: dimension mismatch");
        }
        std::vector<double> y(dim(), 0.0);
        for (std::size_t i = 0; i < dim(); ++i) {
            for (const auto &e : rows_[i]) {
                y[i] += e.value * x[e.col];
            }
        }
        return y;
    }

    /// Off-diagonal couplings (i < j) with weight w = -entry(i, j), so the
    /// matrix equals the sum over these of w times the edge Laplacian.
    struct Coupling {
        std::size_t u;
        std::size_t v;
        double weight;
    };
    [[nodiscard]] std::vector<Coupling> couplings() const {
        std::vector<Coupling> out;
        for (std::size_t i = 0; i < dim(); ++i) {
            for (const auto &e : rows_[i]) {
                if (e.col > i && e.value != 0.0) {
                    out.push_back({i, e.col, -e.value});
                }
            }
        }
        return out;
    }

  private:
    std::vector<std::vector<Entry>> rows_;
    std::size_t max_degree_ = 0;
    double divisor_ = 1.0;
    bool normalized_ = false;
};

inline LaplacianMatrix build_laplacian(const Graph &g) {
    const std::size_t n = g.num_vertices();
    const auto adj = g.adjacency();
    std::vector<std::vector<LaplacianMatrix::Entry>> rows(n);
    std::size_t max_deg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t deg = adj[i].size();
        max_deg = std::max(max_deg, deg);
        auto &row = rows[i];
        row.reserve(deg + 1);
        bool diag_done = false;
        for (const auto j : adj[i]) {
            if (!diag_done && j > i) {
                row.push_back({i, static_cast<double>(deg)});
                diag_done = true;
            }
            row.push_back({j, -1.0});
        }
        if (!diag_done) {
            row.push_back({i, static_cast<double>(deg)});
        }
    }
    return {std::move(rows), max_deg, 1.0, false};
}

/// Smallest power of two >= n (n >= 1).
constexpr std::size_t next_power_of_two(std::size_t n) noexcept {
    return std::bit_ceil(n);
}

/// Qubits needed to index a padded dimension: log2(next_power_of_two(n)).
constexpr unsigned qubits_for(std::size_t n) noexcept {
    return static_cast<unsigned>(std::countr_zero(next_power_of_two(n)));
}

inline Graph pad_to_power_of_two(const Graph &g) {
    const std::size_t padded = next_power_of_two(g.num_vertices());
    if (padded == g.num_vertices()) {
        return g;
    }
    return Graph(padded, g.edges(),
                 g.ghost_count() + (padded - g.num_vertices()));
}

enum class NormMode { gershgorin_pow2, exact };

/// 2^ceil(log2(2*max_degree + 1)); 1 for an edgeless graph.
constexpr double gershgorin_pow2_divisor(std::size_t max_degree) noexcept {
    return static_cast<double>(next_power_of_two(2 * max_degree + 1));
}

/// Scales L so its spectrum lies in [0, 1) strictly. Eigenvalue 1 would alias
/// onto phase 0 under t = 2*pi, hence the strict bound.
inline LaplacianMatrix normalize_laplacian(const LaplacianMatrix &l,
                                           NormMode mode = NormMode::gershgorin_pow2) {
    if (l.is_normalized()) {
        throw InvalidArgument("Laplacian is already normalized");
    }
    double c = 1.0;
    if (mode == NormMode::gershgorin_pow2) {
        c = gershgorin_pow2_divisor(l.max_degree());
    } else {
        EigenOptions opts;
        opts.compute_vectors = false;
        const auto eig = symmetric_eigen(l.to_dense(), opts);
        const double top = eig.values.empty() ? 0.0 : eig.values.back();
        c = top > 0.0 ? top * (1.0 + 0x1.0p-20) : 1.0;
    }
    std::vector<std::vector<LaplacianMatrix::Entry>> rows(l.dim());
    for (std::size_t i = 0; i < l.dim(); ++i) {
        rows[i] = l.row(i);
        for (auto &e : rows[i]) {
            e.value /= c;
        }
    }
    return {std::move(rows), l.max_degree(), c, true};
}

// --------------------------------------------------------------------------
// Connectivity and cuts
// --------------------------------------------------------------------------

struct Components {
    std::size_t count = 0;            ///< components among real vertices
    std::vector<std::size_t> labels;  ///< per real vertex, 0..count-1
    std::size_t ghost_components = 0; ///< one per ghost vertex
};

class UnionFind {
  public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        if (rank_[a] < rank_[b]) {
            std::swap(a, b);
        }
        parent_[b] = a;
        if (rank_[a] == rank_[b]) {
            ++rank_[a];
        }
    }

  private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
};

/// Labels are assigned in order of each component's smallest vertex.
inline Components connected_components(const Graph &g) {
    const std::size_t real = g.real_vertices();
    UnionFind uf(real);
    for (const auto &e : g.edges()) {
        uf.unite(e.u, e.v);
    }
    Components out;
    out.labels.assign(real, 0);
    std::vector<std::size_t> root_label(real, SIZE_MAX);
    for (std::size_t i = 0; i < real; ++i) {
        const auto r = uf.find(i);
        if (root_label[r] == SIZE_MAX) {
            root_label[r] = out.count++;
        }
        out.labels[i] = root_label[r];
    }
    out.ghost_components = g.ghost_count();
    return out;
}

inline std::size_t cut_size(const Graph &g, std::span<const std::size_t> assignment,
                            std::size_t num_blocks) {
    if (assignment.size() != g.real_vertices()) {
        throw InvalidArgument("partition length " +
                              std::to_string(assignment.size()) +
                              " != real vertex count " +
                              std::to_string(g.real_vertices()));
    }
    for (const auto label : assignment) {
        if (label >= num_blocks) {
            throw InvalidArgument("block label " + std::to_string(label) +
                                  " out of range");
        }
    }
    std::size_t cut = 0;
    for (const auto &e : g.edges()) {
        if (assignment[e.u] != assignment[e.v]) {
            ++cut;
        }
    }
    return cut;
}

inline std::size_t cut_size(const Graph &g, const Partition &p) {
    return cut_size(g, p.assignment, p.num_blocks);
}

/// Builds a Partition from arbitrary integer labels: distinct labels are
/// renumbered 0..k-1 preserving their numeric order, and the cut is counted.
inline Partition make_partition(const Graph &g, std::vector<std::size_t> labels) {
    std::vector<std::size_t> distinct = labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    for (auto &l : labels) {
        l = static_cast<std::size_t>(
            std::lower_bound(distinct.begin(), distinct.end(), l) -
            distinct.begin());
    }
    Partition p;
    p.num_blocks = distinct.size();
    p.assignment = std::move(labels);
    p.cut_edges = cut_size(g, p);
    return p;
}

/// True when the assignments agree after some relabeling of blocks.
inline bool same_up_to_relabeling(const Partition &a, const Partition &b) {
    if (a.assignment.size() != b.assignment.size() ||
        a.num_blocks != b.num_blocks) {
        return false;
    }
    std::vector<std::size_t> fwd(a.num_blocks, SIZE_MAX);
    std::vector<std::size_t> bwd(b.num_blocks, SIZE_MAX);
    for (std::size_t i = 0; i < a.assignment.size(); ++i) {
        const auto x = a.assignment[i];
        const auto y = b.assignment[i];
        if (fwd[x] == SIZE_MAX && bwd[y] == SIZE_MAX) {
            fwd[x] = y;
            bwd[y] = x;
        } else if (fwd[x] != y || bwd[y] != x) {
            return false;
        }
    }
    return true;
}

/// Induced subgraph on `vertices` (sorted), relabeled 0..k-1.
inline Graph induced_subgraph(const Graph &g, std::span<const std::size_t> vertices) {
    std::vector<std::size_t> index(g.num_vertices(), SIZE_MAX);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        index[vertices[i]] = i;
    }
    std::vector<Edge> edges;
    for (const auto &e : g.edges()) {
        if (index[e.u] != SIZE_MAX && index[e.v] != SIZE_MAX) {
            edges.push_back({static_cast<vertex_t>(index[e.u]),
                             static_cast<vertex_t>(index[e.v])});
        }
    }
    return Graph(vertices.size(), std::move(edges));
}

} // namespace qlap
