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
 * Time evolution U = exp(i L t) under a normalized Laplacian.
 *
 * Two backends: an exact propagator built from the dense spectral oracle,
 * and a first-order or symmetric product over edge terms. The product uses
 * L = sum_e w_e L_e and the closed form exp(i theta L_e) = I + beta L_e with
 * beta = (exp(2 i theta) - 1) / 2, valid because L_e^2 = 2 L_e.
 *
 * In every controlled routine the system register is qubits 0..n-1 of the
 * state and the control is a qubit >= n.
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "qsim.hpp"
#include "spectral.hpp"
#include "symmetric_eigen.hpp"

namespace qlap {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class BackendKind { exact, trotter };
enum class TrotterOrder { first, symmetric };

struct EvolutionBackend {
    BackendKind kind = BackendKind::exact;
    std::size_t trotter_steps = 64; ///< r, steps for time t
    TrotterOrder trotter_order = TrotterOrder::first;
    double t = kTwoPi;
    double epsilon = 1e-3; ///< target operator error, informational
};

/// beta(theta) with exp(i theta L_e) = I + beta L_e.
inline complex_t edge_exponential(double theta) {
    return (std::polar(1.0, 2.0 * theta) - 1.0) / 2.0;
}

namespace detail {

inline void apply_edge(std::span<complex_t> block, std::size_t u, std::size_t v,
                       complex_t beta) {
    const complex_t au = block[u];
    const complex_t av = block[v];
    const complex_t diff = beta * (au - av);
    block[u] = au + diff;
    block[v] = av - diff;
}

/// One pass over the couplings in the given direction with angle scale tau.
inline void edge_sweep(std::span<complex_t> block,
                       const std::vector<LaplacianMatrix::Coupling> &couplings,
                       const std::vector<complex_t> &betas, bool reverse) {
    const std::size_t count = couplings.size();
    for (std::size_t idx = 0; idx < count; ++idx) {
        const std::size_t e = reverse ? count - 1 - idx : idx;
        apply_edge(block, couplings[e].u, couplings[e].v, betas[e]);
    }
}

inline void require_normalized(const LaplacianMatrix &l) {
    if (!l.is_normalized()) {
        throw InvalidArgument(
            "evolution needs a normalized Laplacian (phases would alias)");
    }
}

} // namespace detail

/// Applies the product formula for exp(i L t) with r steps to a system-sized
/// block of amplitudes.
inline void trotter_apply_block(std::span<complex_t> block, const LaplacianMatrix &l,
                                double t, std::size_t r, TrotterOrder order) {
    if (r < 1) {
        throw InvalidArgument("trotter steps must be >= 1");
    }
    const auto couplings = l.couplings();
    const double tau = t / static_cast<double>(r);
    std::vector<complex_t> betas(couplings.size());
    for (std::size_t e = 0; e < couplings.size(); ++e) {
        const double scale = order == TrotterOrder::first ? 1.0 : 0.5;
        betas[e] = edge_exponential(scale * tau * couplings[e].weight);
    }
    for (std::size_t step = 0; step < r; ++step) {
        detail::edge_sweep(block, couplings, betas, false);
        if (order == TrotterOrder::symmetric) {
            detail::edge_sweep(block, couplings, betas, true);
        }
    }
}

inline QuantumState trotter_propagator_apply(QuantumState s, const LaplacianMatrix &l,
                                             double t, std::size_t r,
                                             TrotterOrder order = TrotterOrder::first) {
    if (s.size() != l.dim()) {
        throw InvalidArgument("state dimension " + std::to_string(s.size()) +
                              " != Laplacian dimension " +
                              std::to_string(l.dim()));
    }
    trotter_apply_block(s.data(), l, t, r, order);
    return s;
}

/// Dense exp(i L t) = V diag(exp(i lambda t)) V^T.
inline ComplexMatrix exact_propagator(const SpectralResult &spec, double t) {
    const std::size_t n = spec.eigenvalues.size();
    ComplexMatrix u(n, n);
    std::vector<complex_t> phases(n);
    for (std::size_t j = 0; j < n; ++j) {
        phases[j] = std::polar(1.0, spec.eigenvalues[j] * t);
    }
    const auto &v = spec.eigenvectors;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            complex_t acc{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) {
                acc += v(a, j) * phases[j] * v(b, j);
            }
            u(a, b) = acc;
        }
    }
    return u;
}

inline ComplexMatrix exact_propagator(const LaplacianMatrix &l, double t) {
    detail::require_normalized(l);
    return exact_propagator(eig_sym(l), t);
}

/// Spectral norm via the largest eigenvalue of A^dagger A, embedded as a
/// real symmetric matrix of twice the size.
inline double spectral_norm(const ComplexMatrix &a) {
    const auto h = matmul(adjoint(a), a);
    const std::size_t n = h.rows();
    RealMatrix emb(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double re = h(i, j).real();
            const double im = h(i, j).imag();
            emb(i, j) = re;
            emb(i + n, j + n) = re;
            emb(i, j + n) = -im;
            emb(i + n, j) = im;
        }
    }
    EigenOptions opts;
    opts.compute_vectors = false;
    const auto eig = symmetric_eigen(emb, opts);
    return std::sqrt(std::max(0.0, eig.values.back()));
}

inline double operator_distance(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix d = a;
    for (std::size_t i = 0; i < d.data().size(); ++i) {
        d.data()[i] -= b.data()[i];
    }
    return spectral_norm(d);
}

/// Crude commutator-bound suggestion for r to reach error epsilon.
/// First order: eps ~ (t^2 / r) * sum over adjacent couplings of 4 w_a w_b.
/// Symmetric: eps ~ (t * sum 2 w_e)^3 / (12 r^2).
inline std::size_t suggest_trotter_steps(const LaplacianMatrix &l, double t,
                                         double epsilon, TrotterOrder order) {
    if (!(epsilon > 0.0)) {
        throw InvalidArgument("epsilon must be positive");
    }
    const auto cs = l.couplings();
    double bound = 0.0;
    if (order == TrotterOrder::first) {
        for (std::size_t a = 0; a < cs.size(); ++a) {
            for (std::size_t b = a + 1; b < cs.size(); ++b) {
                const bool adjacent = cs[a].u == cs[b].u || cs[a].u == cs[b].v ||
                                      cs[a].v == cs[b].u || cs[a].v == cs[b].v;
                if (adjacent) {
                    bound += 4.0 * cs[a].weight * cs[b].weight;
                }
            }
        }
        return std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(t * t * bound / epsilon)));
    }
    for (const auto &c : cs) {
        bound += 2.0 * c.weight;
    }
    const double cube = std::pow(t * bound, 3.0);
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::sqrt(cube / (12.0 * epsilon)))));
}

/// exp(i L t) for a fixed Laplacian and backend, with the spectral data
/// cached for the exact backend.
class EvolutionOperator {
  public:
    EvolutionOperator(LaplacianMatrix l, EvolutionBackend backend)
        : l_(std::move(l)), backend_(backend) {
        detail::require_normalized(l_);
        if (!std::has_single_bit(l_.dim())) {
            throw InvalidArgument("Laplacian dimension must be a power of two; "
                                  "pad the graph first");
        }
        if (backend_.kind == BackendKind::trotter && backend_.trotter_steps < 1) {
            throw InvalidArgument("trotter steps must be >= 1");
        }
        if (backend_.kind == BackendKind::exact) {
            spec_ = eig_sym(l_);
        }
    }

    [[nodiscard]] const LaplacianMatrix &laplacian() const noexcept { return l_; }
    [[nodiscard]] const EvolutionBackend &backend() const noexcept {
        return backend_;
    }
    [[nodiscard]] std::size_t dim() const noexcept { return l_.dim(); }
    [[nodiscard]] unsigned system_qubits() const noexcept {
        return static_cast<unsigned>(std::countr_zero(l_.dim()));
    }

    /// U^{2^j} on a system-only state.
    [[nodiscard]] QuantumState apply_power(QuantumState s, unsigned j = 0) const {
        if (s.size() != dim()) {
            throw InvalidArgument("system dimension mismatch");
        }
        apply_power_block(s.data(), j);
        return s;
    }

    /// Controlled U^{2^j}; system register is qubits 0..n-1.
    [[nodiscard]] QuantumState apply_controlled_power(QuantumState s, unsigned control,
                                                      unsigned j) const {
        const unsigned n = system_qubits();
        if (control < n || control >= s.num_qubits()) {
            throw InvalidArgument("control qubit must lie above the system register");
        }
        auto amps = s.data();
        const std::size_t bit = std::size_t{1} << control;
        for (std::size_t base = 0; base < amps.size(); base += dim()) {
            if (base & bit) {
                apply_power_block(amps.subspan(base, dim()), j);
            }
        }
        return s;
    }

    /// The full controlled ladder of phase estimation: controlled U^{2^j}
    /// conditioned on ancillas[j] for every j. For the exact backend the
    /// system register is rotated into the eigenbasis once, phases are
    /// applied, and rotated back; the intermediate V^T V pairs cancel.
    [[nodiscard]] QuantumState apply_controlled_ladder(
        QuantumState s, std::span<const unsigned> ancillas) const {
        const unsigned n = system_qubits();
        for (const auto a : ancillas) {
            if (a < n || a >= s.num_qubits()) {
                throw InvalidArgument("ancilla must lie above the system register");
            }
        }
        if (backend_.kind == BackendKind::trotter && powers_.size() < ancillas.size()) {
            for (std::size_t j = 0; j < ancillas.size(); ++j) {
                s = apply_controlled_power(std::move(s), ancillas[j],
                                           static_cast<unsigned>(j));
            }
            return s;
        }
        if (backend_.kind == BackendKind::trotter) {
            return apply_cached_ladder(std::move(s), ancillas);
        }
        const auto &v = spec_.eigenvectors;
        const std::size_t d = dim();
        std::vector<complex_t> tmp(d);
        auto amps = s.data();
        for (std::size_t base = 0; base < amps.size(); base += d) {
            auto block = amps.subspan(base, d);
            // to eigenbasis: c = V^T a
            for (std::size_t k = 0; k < d; ++k) {
                complex_t acc{0.0, 0.0};
                for (std::size_t r = 0; r < d; ++r) {
                    acc += v(r, k) * block[r];
                }
                tmp[k] = acc;
            }
            double power = 0.0; // sum of 2^j over ancillas set in this block
            for (std::size_t j = 0; j < ancillas.size(); ++j) {
                if (base & (std::size_t{1} << ancillas[j])) {
                    power += std::ldexp(1.0, static_cast<int>(j));
                }
            }
            if (power != 0.0) {
                for (std::size_t k = 0; k < d; ++k) {
                    tmp[k] *= std::polar(1.0, std::fmod(spec_.eigenvalues[k] * power *
                                                            backend_.t,
                                                        kTwoPi));
                }
            }
            for (std::size_t r = 0; r < d; ++r) {
                complex_t acc{0.0, 0.0};
                for (std::size_t k = 0; k < d; ++k) {
                    acc += v(r, k) * tmp[k];
                }
                block[r] = acc;
            }
        }
        return s;
    }

    /// Caches dense Trotter products U^{2^j} for j < count, so the ladder
    /// multiplies matrices instead of replaying r 2^j steps per block. Only
    /// worthwhile when the ladder has more controlled blocks than columns.
    void cache_trotter_powers(unsigned count) {
        if (backend_.kind != BackendKind::trotter) {
            return;
        }
        powers_.clear();
        for (unsigned j = 0; j < count; ++j) {
            powers_.push_back(dense(j));
        }
    }

    /// Dense matrix of U^{2^j}, column by column.
    [[nodiscard]] ComplexMatrix dense(unsigned j = 0) const {
        const std::size_t d = dim();
        ComplexMatrix u(d, d);
        std::vector<complex_t> col(d);
        for (std::size_t c = 0; c < d; ++c) {
            std::fill(col.begin(), col.end(), complex_t{0.0, 0.0});
            col[c] = 1.0;
            apply_power_block(col, j);
            for (std::size_t r = 0; r < d; ++r) {
                u(r, c) = col[r];
            }
        }
        return u;
    }

  private:
    QuantumState apply_cached_ladder(QuantumState s,
                                     std::span<const unsigned> ancillas) const {
        const std::size_t d = dim();
        std::vector<complex_t> tmp(d);
        auto amps = s.data();
        for (std::size_t base = 0; base < amps.size(); base += d) {
            auto block = amps.subspan(base, d);
            for (std::size_t j = 0; j < ancillas.size(); ++j) {
                if (!(base & (std::size_t{1} << ancillas[j]))) {
                    continue;
                }
                const auto &u = powers_[j];
                for (std::size_t r = 0; r < d; ++r) {
                    complex_t acc{0.0, 0.0};
                    for (std::size_t c = 0; c < d; ++c) {
                        acc += u(r, c) * block[c];
                    }
                    tmp[r] = acc;
                }
                std::copy(tmp.begin(), tmp.end(), block.begin());
            }
        }
        return s;
    }

    void apply_power_block(std::span<complex_t> block, unsigned j) const {
        const double scale = std::ldexp(1.0, static_cast<int>(j));
        if (backend_.kind == BackendKind::trotter) {
            const auto steps = backend_.trotter_steps << j;
            trotter_apply_block(block, l_, scale * backend_.t, steps,
                                backend_.trotter_order);
            return;
        }
        const auto &v = spec_.eigenvectors;
        const std::size_t d = dim();
        std::vector<complex_t> tmp(d);
        for (std::size_t k = 0; k < d; ++k) {
            complex_t acc{0.0, 0.0};
            for (std::size_t r = 0; r < d; ++r) {
                acc += v(r, k) * block[r];
            }
            tmp[k] = acc * std::polar(1.0, std::fmod(spec_.eigenvalues[k] * scale *
                                                         backend_.t,
                                                     kTwoPi));
        }
        for (std::size_t r = 0; r < d; ++r) {
            complex_t acc{0.0, 0.0};
            for (std::size_t k = 0; k < d; ++k) {
                acc += v(r, k) * tmp[k];
            }
            block[r] = acc;
        }
    }

    LaplacianMatrix l_;
    EvolutionBackend backend_;
    SpectralResult spec_;
    std::vector<ComplexMatrix> powers_;
};

/// Controlled U^{2^j} on `s` (system register = qubits 0..n-1).
inline QuantumState controlled_evolution_power(QuantumState s, unsigned control,
                                               const EvolutionBackend &backend,
                                               const LaplacianMatrix &l, unsigned j) {
    const EvolutionOperator op(l, backend);
    return op.apply_controlled_power(std::move(s), control, j);
}

} // namespace qlap
