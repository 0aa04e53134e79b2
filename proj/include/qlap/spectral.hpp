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
 * Classical spectral oracle: exact dense eigendecomposition of a Laplacian,
 * Fiedler pair extraction, sign bisection and recursive k-way bisection.
 * Deliberately O(N^3); it is the ground truth the quantum pipeline is
 * checked against.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "symmetric_eigen.hpp"

namespace qlap {

inline constexpr std::size_t kDefaultOracleCap = 4096;
inline constexpr double kDefaultZeroTol = 1e-8;
inline constexpr double kDefaultTieTol = 1e-9;

/// Dense oracle size cap; QLAP_ORACLE_CAP overrides the default.
inline std::size_t oracle_cap() {
    if (const char *env = std::getenv("QLAP_ORACLE_CAP")) {
        char *end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return kDefaultOracleCap;
}

struct SpectralResult {
    std::vector<double> eigenvalues; ///< ascending
    RealMatrix eigenvectors;         ///< orthonormal columns
    std::size_t num_zero = 0;        ///< eigenvalues below zero_tol
};

struct SpectralOptions {
    /// On the unnormalized scale; divided by the divisor for normalized input.
    double zero_tol = kDefaultZeroTol;
    std::size_t cap = 0; ///< 0 means oracle_cap()
};

inline SpectralResult eig_sym(const LaplacianMatrix &l,
                              const SpectralOptions &opts = {}) {
    const std::size_t cap = opts.cap ? opts.cap : oracle_cap();
    if (l.dim() > cap) {
        throw CapExceeded(l.dim(), cap);
    }
    auto eig = symmetric_eigen(l.to_dense());
    SpectralResult out;
    out.eigenvalues = std::move(eig.values);
    out.eigenvectors = std::move(eig.vectors);
    const double tol = opts.zero_tol / l.divisor();
    out.num_zero = static_cast<std::size_t>(
        std::count_if(out.eigenvalues.begin(), out.eigenvalues.end(),
                      [tol](double x) { return x < tol; }));
    return out;
}

struct FiedlerPair {
    double value = 0.0;
    std::vector<double> vector;
};

/// Second-smallest eigenpair. The vector's first nonzero entry is positive.
inline FiedlerPair fiedler(const SpectralResult &spec) {
    if (spec.num_zero != 1) {
        throw DisconnectedGraph(spec.num_zero);
    }
    if (spec.eigenvalues.size() < 2) {
        throw InvalidArgument("Fiedler pair needs at least two vertices");
    }
    return {spec.eigenvalues[1], spec.eigenvectors.column(1)};
}

inline FiedlerPair fiedler(const LaplacianMatrix &l,
                           const SpectralOptions &opts = {}) {
    return fiedler(eig_sym(l, opts));
}

/// 0 for v_i > -tie_tol (ties go to block 0), 1 for v_i < -tie_tol.
/// Only an empty block 0 triggers renumbering, so all-negative input is
/// reported as the single block 0.
inline std::vector<std::size_t> sign_labels(std::span<const double> v,
                                            double tie_tol = kDefaultTieTol) {
    std::vector<std::size_t> labels(v.size(), 0);
    bool any_zero_block = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < -tie_tol) {
            labels[i] = 1;
        } else {
            any_zero_block = true;
        }
    }
    if (!any_zero_block) {
        std::fill(labels.begin(), labels.end(), 0);
    }
    return labels;
}

/// Sign bisection of the real vertices of g. v may be longer than the real
/// vertex count (padded vectors); ghost entries are ignored.
inline Partition sign_bisect(const Graph &g, std::span<const double> v,
                             double tie_tol = kDefaultTieTol) {
    if (v.size() < g.real_vertices()) {
        throw InvalidArgument("sign_bisect: vector shorter than vertex count");
    }
    return make_partition(g, sign_labels(v.first(g.real_vertices()), tie_tol));
}

/// Columns are the n_c smallest-eigenvalue eigenvectors.
inline RealMatrix spectral_embed(const SpectralResult &spec, std::size_t n_c) {
    const std::size_t n = spec.eigenvalues.size();
    if (n_c < 1 || n_c > n) {
        throw InvalidArgument("spectral_embed: need 1 <= n_c <= N");
    }
    RealMatrix out(n, n_c);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n_c; ++c) {
            out(r, c) = spec.eigenvectors(r, c);
        }
    }
    return out;
}

inline RealMatrix spectral_embed(const LaplacianMatrix &l, std::size_t n_c,
                                 const SpectralOptions &opts = {}) {
    return spectral_embed(eig_sym(l, opts), n_c);
}

/// k-way partition by repeated bisection of the largest block.
///
/// Disconnected inputs start from their components (the smallest ones are
/// merged when there are more than k). A block whose induced subgraph is
/// disconnected is split into its first component and the rest; otherwise
/// it is sign-bisected by its Fiedler vector. Ties on block size go to the
/// block containing the lowest vertex. Final labels are numbered by each
/// block's lowest vertex.
inline Partition recursive_bisect(const Graph &g, std::size_t k,
                                  const SpectralOptions &opts = {}) {
    const std::size_t n = g.real_vertices();
    if (k < 1 || k > n) {
        throw InvalidArgument("recursive_bisect: need 1 <= k <= N (k=" +
                              std::to_string(k) + ", N=" + std::to_string(n) +
                              ")");
    }
    using Block = std::vector<std::size_t>; // sorted vertex ids
    std::vector<Block> blocks;
    if (k == 1) {
        Block all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        blocks.push_back(std::move(all));
    } else {
        const auto comps = connected_components(g);
        blocks.resize(comps.count);
        for (std::size_t i = 0; i < n; ++i) {
            blocks[comps.labels[i]].push_back(i);
        }
        while (blocks.size() > k) {
            // merge the two smallest (ties: later blocks first)
            std::stable_sort(blocks.begin(), blocks.end(),
                             [](const Block &a, const Block &b) {
                                 return a.size() > b.size();
                             });
            Block last = std::move(blocks.back());
            blocks.pop_back();
            auto &into = blocks.back();
            into.insert(into.end(), last.begin(), last.end());
            std::sort(into.begin(), into.end());
        }
    }

    auto block_order = [](const Block &a, const Block &b) {
        if (a.size() != b.size()) {
            return a.size() > b.size();
        }
        return a.front() < b.front();
    };

    while (blocks.size() < k) {
        auto it = std::min_element(blocks.begin(), blocks.end(), block_order);
        Block target = std::move(*it);
        blocks.erase(it);

        const Graph sub = induced_subgraph(g, target);
        const auto comps = connected_components(sub);
        Block left;
        Block right;
        if (comps.count > 1) {
            for (std::size_t i = 0; i < target.size(); ++i) {
                (comps.labels[i] == 0 ? left : right).push_back(target[i]);
            }
        } else {
            const auto pair = fiedler(build_laplacian(sub), opts);
            const auto labels = sign_labels(pair.vector);
            for (std::size_t i = 0; i < target.size(); ++i) {
                (labels[i] == 0 ? left : right).push_back(target[i]);
            }
        }
        blocks.push_back(std::move(left));
        blocks.push_back(std::move(right));
    }

    std::sort(blocks.begin(), blocks.end(),
              [](const Block &a, const Block &b) { return a.front() < b.front(); });
    std::vector<std::size_t> labels(n, 0);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (const auto v : blocks[b]) {
            labels[v] = b;
        }
    }
    return make_partition(g, std::move(labels));
}

} // namespace qlap
