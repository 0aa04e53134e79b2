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
 * Quantum phase estimation on a normalized graph Laplacian.
 *
 * Register layout: system qubits 0..n-1 (n = log2 of the padded vertex
 * count) and ancilla j at qubit n + j, where ancilla j controls U^{2^j}.
 * A measured ancilla value k estimates the phase theta = k / 2^m of
 * U = exp(i L t), i.e. the unnormalized eigenvalue k / 2^m * c * 2 pi / t.
 *
 * Preparations draw from counter-based streams so every result here is a
 * pure function of its inputs and the seed.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "graph.hpp"
#include "qsim.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace qlap {

/// Smallest k with 2^-k <= delta.
inline unsigned bits_for_precision(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InvalidArgument("delta must lie in (0, 1)");
    }
    unsigned k = 0;
    while (std::ldexp(1.0, -static_cast<int>(k)) > delta) {
        ++k;
    }
    return k;
}

/// Largest delta = 2^-k whose bins (with the default guard) keep the lowest
/// three distinct normalized eigenvalues at least eight bins apart, i.e.
/// delta <= gap / 2. Gaps below 1e-6 count as degeneracies. k is clamped to
/// [1, max_bits].
inline double resolving_delta(std::span<const double> normalized_eigenvalues,
                              unsigned max_bits = 16) {
    std::vector<double> distinct;
    for (const double x : normalized_eigenvalues) {
        if (distinct.empty() || x - distinct.back() > 1e-6) {
            distinct.push_back(x);
        }
        if (distinct.size() == 3) {
            break;
        }
    }
    double gap = 1.0;
    for (std::size_t i = 1; i < distinct.size(); ++i) {
        gap = std::min(gap, distinct[i] - distinct[i - 1]);
    }
    unsigned k = 1;
    while (k < max_bits && std::ldexp(1.0, -static_cast<int>(k)) > gap / 2.0) {
        ++k;
    }
    return std::ldexp(1.0, -static_cast<int>(k));
}

// --------------------------------------------------------------------------
// State preparation
// --------------------------------------------------------------------------

using Amplitudes = std::vector<complex_t>;

struct StatePrep {
    enum class Kind { basis, uniform, random_real, orthogonal_random, injected };

    Kind kind = Kind::uniform;
    std::size_t index = 0;      ///< basis
    std::vector<Amplitudes> avoid; ///< orthogonal_random
    Amplitudes vector;          ///< injected

    static StatePrep basis(std::size_t k) { return {Kind::basis, k, {}, {}}; }
    static StatePrep uniform() { return {Kind::uniform, 0, {}, {}}; }
    static StatePrep random_real() { return {Kind::random_real, 0, {}, {}}; }
    static StatePrep orthogonal_random(std::vector<Amplitudes> vs) {
        return {Kind::orthogonal_random, 0, std::move(vs), {}};
    }
    static StatePrep injected(Amplitudes v) {
        return {Kind::injected, 0, {}, std::move(v)};
    }
    static StatePrep injected(std::span<const double> v) {
        return injected(Amplitudes(v.begin(), v.end()));
    }

    /// Random strategies draw a fresh state per preparation.
    [[nodiscard]] bool is_random() const noexcept {
        return kind == Kind::random_real || kind == Kind::orthogonal_random;
    }
};

inline std::string to_string(StatePrep::Kind k) {
    switch (k) {
    case StatePrep::Kind::basis: return "basis";
    case StatePrep::Kind::uniform: return "uniform";
    case StatePrep::Kind::random_real: return "random_real";
    case StatePrep::Kind::orthogonal_random: return "orthogonal_random";
    case StatePrep::Kind::injected: return "injected";
    }
    return "unknown";
}

namespace detail {

inline complex_t dot(std::span<const complex_t> a, std::span<const complex_t> b) {
    complex_t acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

inline double norm2(std::span<const complex_t> a) {
    double acc = 0.0;
    for (const auto &x : a) {
        acc += std::norm(x);
    }
    return std::sqrt(acc);
}

/// Orthonormal basis for span(vs) by two-pass Gram-Schmidt.
inline std::vector<Amplitudes> orthonormalize(const std::vector<Amplitudes> &vs,
                                              double tol = 1e-10) {
    std::vector<Amplitudes> basis;
    for (auto v : vs) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &q : basis) {
                const auto c = dot(q, v);
                for (std::size_t i = 0; i < v.size(); ++i) {
                    v[i] -= c * q[i];
                }
            }
        }
        const double nv = norm2(v);
        if (nv > tol) {
            for (auto &x : v) {
                x /= nv;
            }
            basis.push_back(std::move(v));
        }
    }
    return basis;
}

/// v minus its projection on the orthonormal `basis` (two passes).
inline Amplitudes residual(Amplitudes v, const std::vector<Amplitudes> &basis) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto &q : basis) {
            const auto c = dot(q, v);
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] -= c * q[i];
            }
        }
    }
    return v;
}

inline Amplitudes gaussian_vector(std::size_t dim, RngStream &rng) {
    Amplitudes v(dim);
    for (auto &x : v) {
        x = rng.normal();
    }
    return v;
}

} // namespace detail

/// Residual norm below which orthogonal_random redraws.
inline constexpr double kRedrawTol = 1e-6;

inline QuantumState prepare_state(const StatePrep &prep, unsigned n, RngStream rng) {
    const std::size_t dim = std::size_t{1} << n;
    switch (prep.kind) {
    case StatePrep::Kind::basis:
        return basis_state(n, prep.index);
    case StatePrep::Kind::uniform: {
        QuantumState s(n);
        const auto h = gates::hadamard();
        for (unsigned q = 0; q < n; ++q) {
            s = apply_unitary(std::move(s), {q}, h);
        }
        return s;
    }
    case StatePrep::Kind::random_real: {
        auto v = detail::gaussian_vector(dim, rng);
        const double nv = detail::norm2(v);
        for (auto &x : v) {
            x /= nv;
        }
        return QuantumState::from_amplitudes(std::move(v));
    }
    case StatePrep::Kind::orthogonal_random: {
        for (const auto &a : prep.avoid) {
            if (a.size() != dim) {
                throw InvalidArgument("orthogonal_random: avoid-vector length mismatch");
            }
        }
        const auto basis = detail::orthonormalize(prep.avoid);
        if (basis.size() >= dim) {
            throw InvalidArgument("orthogonal_random: vectors span the full space");
        }
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto v = detail::residual(detail::gaussian_vector(dim, rng), basis);
            const double nv = detail::norm2(v);
            if (nv >= kRedrawTol) {
                for (auto &x : v) {
                    x /= nv;
                }
                return QuantumState::from_amplitudes(std::move(v));
            }
        }
        throw Error("orthogonal_random: could not draw a state off the avoided span");
    }
    case StatePrep::Kind::injected: {
        if (prep.vector.size() != dim) {
            throw InvalidArgument("injected vector length " +
                                  std::to_string(prep.vector.size()) + " != 2^n = " +
                                  std::to_string(dim));
        }
        if (std::abs(detail::norm2(prep.vector) - 1.0) > kNormTol) {
            throw InvalidArgument("injected vector is not unit norm");
        }
        return QuantumState::from_amplitudes(prep.vector);
    }
    }
    throw InvalidArgument("unknown state preparation");
}

// --------------------------------------------------------------------------
// Configuration and results
// --------------------------------------------------------------------------

enum class ReadoutMode { trace, sampling };

struct QpeConfig {
    double delta = 0.125;
    unsigned guard = 2;
    EvolutionBackend backend{};
    std::size_t shots = 1024;
    std::size_t n_samples = 1000;
    std::uint64_t seed = 0;
    StatePrep state_prep = StatePrep::uniform();
    ReadoutMode readout = ReadoutMode::trace;

    /// QPE attempts per degeneracy-counting round before it counts as a miss.
    std::size_t retry_budget = 32;
    /// Minimum Gram-Schmidt residual for a new zero-eigenvalue state.
    double rank_tol = 1e-6;
    /// Consecutive misses that end degeneracy counting; 0 means 4 * dim.
    std::size_t max_rounds = 0;
    /// Extra QPE passes on a collapsed state that must land in the same bin
    /// before it is accepted. Each pass damps components from other bins.
    unsigned projection_rounds = 3;
    /// Magnitude below which signs are reported unknown; 0 means
    /// 3 / sqrt(n_samples).
    double sign_floor = 0.0;
    /// Shot-level worker threads (results do not depend on this).
    unsigned threads = 1;

    [[nodiscard]] unsigned ancilla_bits() const {
        return bits_for_precision(delta) + guard;
    }

    void validate() const {
        const unsigned m = ancilla_bits();
        if (m < 1) {
            throw InvalidArgument("need at least one ancilla");
        }
        if (std::ldexp(1.0, -static_cast<int>(m)) > delta) {
            throw InvalidArgument("bin width exceeds delta");
        }
        if (shots < 1 || n_samples < 1) {
            throw InvalidArgument("shots and n_samples must be >= 1");
        }
    }

    [[nodiscard]] double effective_sign_floor() const {
        return sign_floor > 0.0 ? sign_floor
                                : 3.0 / std::sqrt(static_cast<double>(n_samples));
    }
};

struct EigHistogram {
    std::map<std::size_t, std::size_t> bin_counts;
    unsigned ancilla_bits = 0;
    double divisor = 1.0;
    double t = kTwoPi;
    std::size_t total_shots = 0;

    /// Unnormalized eigenvalue estimate for bin k.
    [[nodiscard]] double eigenvalue_of_bin(std::size_t k) const {
        return std::ldexp(static_cast<double>(k), -static_cast<int>(ancilla_bits)) *
               divisor * kTwoPi / t;
    }
    [[nodiscard]] std::size_t count(std::size_t k) const {
        const auto it = bin_counts.find(k);
        return it == bin_counts.end() ? 0 : it->second;
    }
    /// Bin with the most counts (lowest bin on ties).
    [[nodiscard]] std::size_t modal_bin() const {
        std::size_t best = 0;
        std::size_t best_count = 0;
        for (const auto &[bin, c] : bin_counts) {
            if (c > best_count) {
                best = bin;
                best_count = c;
            }
        }
        return best;
    }
};

/// A bin is signal when its count exceeds three standard deviations of
/// its own multinomial sampling noise.
inline bool above_noise_floor(std::size_t count, std::size_t shots) {
    if (count == 0 || shots == 0) {
        return false;
    }
    const double c = static_cast<double>(count);
    const double p = c / static_cast<double>(shots);
    return c > 3.0 * std::sqrt(c * (1.0 - p));
}

struct ReadoutResult {
    std::vector<double> magnitudes;
    std::vector<int> signs; ///< +1, -1, or 0 for unknown
    std::size_t samples_used = 0;
    std::size_t target_bin = 0;
    ReadoutMode mode = ReadoutMode::trace;

    /// sign * magnitude, with unknown signs contributing 0.
    [[nodiscard]] std::vector<double> signed_vector() const {
        std::vector<double> v(magnitudes.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = signs[i] * magnitudes[i];
        }
        return v;
    }
};

// --------------------------------------------------------------------------
// Circuit
// --------------------------------------------------------------------------

/// Phase estimation for one Laplacian and backend. Holds the evolution
/// operator so repeated runs reuse its spectral data.
class QpeEngine {
  public:
    QpeEngine(const LaplacianMatrix &l, const QpeConfig &cfg)
        : op_(l, cfg.backend), m_(cfg.ancilla_bits()) {
        cfg.validate();
        if (op_.system_qubits() + m_ > kMaxQubits) {
            throw InvalidArgument("QPE needs " +
                                  std::to_string(op_.system_qubits() + m_) +
                                  " qubits, above the " + std::to_string(kMaxQubits) +
                                  "-qubit cap; raise delta");
        }
        ancillas_.resize(m_);
        for (unsigned j = 0; j < m_; ++j) {
            ancillas_[j] = op_.system_qubits() + j;
        }
        // each power acts on 2^{m-1} blocks; building it densely costs dim
        if (m_ > 0 && op_.dim() <= (std::size_t{1} << (m_ - 1))) {
            op_.cache_trotter_powers(m_);
        }
    }

    [[nodiscard]] unsigned system_qubits() const noexcept { return op_.system_qubits(); }
    [[nodiscard]] unsigned ancilla_bits() const noexcept { return m_; }
    [[nodiscard]] unsigned total_qubits() const noexcept { return system_qubits() + m_; }
    [[nodiscard]] std::span<const unsigned> ancillas() const noexcept { return ancillas_; }
    [[nodiscard]] const EvolutionOperator &evolution() const noexcept { return op_; }

    /// Joint state before the ancilla measurement: Hadamards on the
    /// ancillas, the controlled-U^{2^j} ladder, then the inverse QFT.
    [[nodiscard]] QuantumState circuit(const QuantumState &psi0) const {
        if (psi0.num_qubits() != system_qubits()) {
            throw InvalidArgument("initial state has " +
                                  std::to_string(psi0.num_qubits()) +
                                  " qubits, system register has " +
                                  std::to_string(system_qubits()));
        }
        QuantumState joint(total_qubits());
        std::copy(psi0.amplitudes().begin(), psi0.amplitudes().end(),
                  joint.data().begin());
        const auto h = gates::hadamard();
        for (const auto a : ancillas_) {
            joint = apply_unitary(std::move(joint), {a}, h);
        }
        joint = op_.apply_controlled_ladder(std::move(joint), ancillas_);
        return inverse_qft(std::move(joint), ancillas_);
    }

  private:
    EvolutionOperator op_;
    unsigned m_;
    std::vector<unsigned> ancillas_;
};

/// Outcome model of one circuit execution: the ancilla distribution and the
/// conditional system state for each bin. Drawing from it is equivalent to
/// measuring the ancilla register of the joint state.
class QpeOutcome {
  public:
    QpeOutcome(const QpeEngine &engine, const QuantumState &psi0)
        : n_(engine.system_qubits()), joint_(engine.circuit(psi0)) {
        const std::size_t d = std::size_t{1} << n_;
        dist_.assign(std::size_t{1} << engine.ancilla_bits(), 0.0);
        const auto amps = joint_.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i) {
            dist_[i / d] += std::norm(amps[i]);
        }
    }

    [[nodiscard]] std::span<const double> distribution() const noexcept { return dist_; }
    [[nodiscard]] double probability(std::size_t bin) const { return dist_.at(bin); }
    [[nodiscard]] const QuantumState &joint() const noexcept { return joint_; }

    [[nodiscard]] std::size_t draw(RngStream &rng) const { return draw_index(dist_, rng); }

    /// Collapsed system register given ancilla value `bin`.
    [[nodiscard]] QuantumState post_system(std::size_t bin) const {
        if (dist_.at(bin) <= 0.0) {
            throw InvalidArgument("bin has zero probability");
        }
        const std::size_t d = std::size_t{1} << n_;
        const auto amps = joint_.amplitudes();
        std::vector<complex_t> block(amps.begin() + static_cast<std::ptrdiff_t>(bin * d),
                                     amps.begin() + static_cast<std::ptrdiff_t>((bin + 1) * d));
        const double scale = 1.0 / std::sqrt(dist_[bin]);
        for (auto &a : block) {
            a *= scale;
        }
        // renormalize exactly to absorb rounding in dist_
        const double nb = detail::norm2(block);
        for (auto &a : block) {
            a /= nb;
        }
        return QuantumState::from_amplitudes(std::move(block));
    }

  private:
    unsigned n_;
    QuantumState joint_;
    std::vector<double> dist_;
};

struct QpeRun {
    std::size_t bin;
    QuantumState post_system;
};

/// One phase-estimation run: circuit, then measurement of the ancillas.
inline QpeRun qpe_run(const QpeEngine &engine, const QuantumState &psi0, RngStream rng) {
    auto joint = engine.circuit(psi0);
    auto [bin, post] = measure_register(std::move(joint), engine.ancillas(), rng);
    const std::size_t d = std::size_t{1} << engine.system_qubits();
    std::vector<complex_t> block(post.amplitudes().begin() + static_cast<std::ptrdiff_t>(bin * d),
                                 post.amplitudes().begin() + static_cast<std::ptrdiff_t>((bin + 1) * d));
    const double nb = detail::norm2(block);
    for (auto &a : block) {
        a /= nb;
    }
    return {bin, QuantumState::from_amplitudes(std::move(block))};
}

inline QpeRun qpe_run(const LaplacianMatrix &l, const QuantumState &psi0,
                      const QpeConfig &cfg, RngStream rng) {
    return qpe_run(QpeEngine(l, cfg), psi0, rng);
}

// --------------------------------------------------------------------------
// Eigenvalue histogram
// --------------------------------------------------------------------------

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn &&fn) {
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += threads) {
                fn(i);
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
}

} // namespace detail

/// Shot i uses rng.split(i): child 0 prepares (random strategies only),
/// child 1 measures. Deterministic strategies simulate the circuit once.
inline EigHistogram eigenvalue_histogram(const QpeEngine &engine,
                                         const LaplacianMatrix &l,
                                         const QpeConfig &cfg, const RngStream &rng) {
    cfg.validate();
    std::vector<std::size_t> bins(cfg.shots);
    const unsigned n = engine.system_qubits();
    if (cfg.state_prep.is_random()) {
        detail::parallel_for(cfg.shots, cfg.threads, [&](std::size_t shot) {
            const auto stream = rng.split(shot);
            const auto psi0 = prepare_state(cfg.state_prep, n, stream.split(0));
            const QpeOutcome outcome(engine, psi0);
            auto measure = stream.split(1);
            bins[shot] = outcome.draw(measure);
        });
    } else {
        const auto psi0 = prepare_state(cfg.state_prep, n, rng.split(0));
        const QpeOutcome outcome(engine, psi0);
        for (std::size_t shot = 0; shot < cfg.shots; ++shot) {
            auto measure = rng.split(shot).split(1);
            bins[shot] = outcome.draw(measure);
        }
    }
    EigHistogram h;
    h.ancilla_bits = engine.ancilla_bits();
    h.divisor = l.divisor();
    h.t = cfg.backend.t;
    h.total_shots = cfg.shots;
    for (const auto b : bins) {
        ++h.bin_counts[b];
    }
    return h;
}

inline EigHistogram eigenvalue_histogram(const LaplacianMatrix &l, const QpeConfig &cfg,
                                         const RngStream &rng) {
    return eigenvalue_histogram(QpeEngine(l, cfg), l, cfg, rng);
}

// --------------------------------------------------------------------------
// Post-selection
// --------------------------------------------------------------------------

namespace detail {

/// The chain of outcome models for "run QPE, land in `bin`, then run it
/// again on the collapsed state `rounds` more times, landing in `bin`
/// every time". Stage s > 0 starts from stage s-1's collapsed state.
class PostSelectionChain {
  public:
    PostSelectionChain(const QpeEngine &engine, const QuantumState &psi0,
                       std::size_t bin, unsigned rounds)
        : engine_(engine), bin_(bin), rounds_(rounds) {
        stages_.emplace_back(engine, psi0);
    }

    /// Executes one attempt; returns true when every stage hit the bin.
    /// `runs` is incremented once per circuit execution.
    bool attempt(RngStream rng, std::size_t &runs) {
        for (unsigned s = 0; s <= rounds_; ++s) {
            ++runs;
            const auto &stage = stage_at(s);
            if (!stage) {
                return false;
            }
            auto stream = rng.split(s);
            if (stage->draw(stream) != bin_) {
                return false;
            }
        }
        return true;
    }

    /// Collapsed system state after a successful attempt.
    [[nodiscard]] QuantumState final_state() {
        return stage_at(rounds_)->post_system(bin_);
    }

  private:
    const QpeOutcome *stage_at(unsigned s) {
        while (stages_.size() <= s) {
            const auto &prev = stages_.back();
            if (prev.probability(bin_) <= 0.0) {
                return nullptr;
            }
            stages_.emplace_back(engine_, prev.post_system(bin_));
        }
        if (s > 0 && stages_[s - 1].probability(bin_) <= 0.0) {
            return nullptr;
        }
        return &stages_[s];
    }

    const QpeEngine &engine_;
    std::size_t bin_;
    unsigned rounds_;
    std::vector<QpeOutcome> stages_;
};

/// Index of the largest magnitude (first on ties).
inline std::size_t argmax_magnitude(std::span<const double> mags) {
    return static_cast<std::size_t>(std::max_element(mags.begin(), mags.end()) -
                                    mags.begin());
}

} // namespace detail

/// Relative signs from interference. For each vertex k above the sign floor,
/// post-selected runs apply a Hadamard on the {|k>, |r>} pair after
/// collapse (r = largest magnitude) and count outcome r, whose probability
/// is |a_r + a_k|^2 / 2. Above (|a_k|^2 + |a_r|^2) / 2 means the same sign.
///
/// rng.split(0) prepares the initial state exactly as readout_eigenvector
/// does; rng.split(2) drives the experiments.
inline std::vector<int> recover_signs(const QpeEngine &engine, const QpeConfig &cfg,
                                      std::size_t target_bin,
                                      std::span<const double> magnitudes,
                                      const RngStream &rng,
                                      std::size_t *runs_out = nullptr) {
    const unsigned n = engine.system_qubits();
    if (magnitudes.size() != (std::size_t{1} << n)) {
        throw InvalidArgument("recover_signs: magnitude vector length mismatch");
    }
    const auto psi0 = prepare_state(cfg.state_prep, n, rng.split(0));
    detail::PostSelectionChain chain(engine, psi0, target_bin, cfg.projection_rounds);
    const std::size_t ref = detail::argmax_magnitude(magnitudes);
    const double floor = cfg.effective_sign_floor();
    const std::size_t budget = 100 * cfg.n_samples;

    std::vector<int> signs(magnitudes.size(), 0);
    signs[ref] = +1;
    std::size_t runs = 0;
    for (std::size_t k = 0; k < magnitudes.size(); ++k) {
        if (k == ref || magnitudes[k] <= floor) {
            continue;
        }
        const auto experiments = rng.split(2).split(k);
        std::size_t accepted = 0;
        std::size_t hits = 0;
        std::size_t attempts = 0;
        while (accepted < cfg.n_samples) {
            if (attempts >= budget) {
                throw PostSelectionStarved(target_bin, attempts);
            }
            auto stream = experiments.split(attempts);
            ++attempts;
            if (!chain.attempt(stream.split(0), runs)) {
                continue;
            }
            // mix |k> and |r> on the collapsed state, then measure
            auto post = chain.final_state();
            auto amps = post.data();
            const complex_t ar = amps[ref];
            const complex_t ak = amps[k];
            amps[ref] = (ar + ak) / std::numbers::sqrt2;
            amps[k] = (ar - ak) / std::numbers::sqrt2;
            auto measure = stream.split(1);
            if (draw_index(post.probabilities(), measure) == ref) {
                ++hits;
            }
            ++accepted;
        }
        const double p = static_cast<double>(hits) / static_cast<double>(accepted);
        const double baseline =
            (magnitudes[k] * magnitudes[k] + magnitudes[ref] * magnitudes[ref]) / 2.0;
        signs[k] = p > baseline ? +1 : -1;
    }
    if (runs_out) {
        *runs_out += runs;
    }
    return signs;
}

inline std::vector<int> recover_signs(const LaplacianMatrix &l, const QpeConfig &cfg,
                                      std::size_t target_bin,
                                      std::span<const double> magnitudes,
                                      const RngStream &rng) {
    return recover_signs(QpeEngine(l, cfg), cfg, target_bin, magnitudes, rng);
}

/// Eigenvector readout at `target_bin`. The initial state is prepared once
/// (rng.split(0)) and the same preparation is repeated for every run.
///
/// trace: the first successful post-selection's amplitudes are read
/// directly (simulator-privileged), with the global phase fixed so the
/// largest-magnitude entry is real positive.
/// sampling: each accepted run yields one computational-basis sample;
/// magnitudes are sqrt(frequency) and signs come from recover_signs().
inline ReadoutResult readout_eigenvector(const QpeEngine &engine, const QpeConfig &cfg,
                                         std::size_t target_bin, const RngStream &rng,
                                         ReadoutMode mode) {
    cfg.validate();
    const unsigned n = engine.system_qubits();
    const std::size_t d = std::size_t{1} << n;
    const auto psi0 = prepare_state(cfg.state_prep, n, rng.split(0));
    detail::PostSelectionChain chain(engine, psi0, target_bin, cfg.projection_rounds);
    const std::size_t budget = 100 * cfg.n_samples;

    ReadoutResult out;
    out.target_bin = target_bin;
    out.mode = mode;
    const auto runs_stream = rng.split(1);

    if (mode == ReadoutMode::trace) {
        std::size_t attempts = 0;
        for (;;) {
            if (attempts >= budget) {
                throw PostSelectionStarved(target_bin, attempts);
            }
            auto stream = runs_stream.split(attempts);
            ++attempts;
            if (chain.attempt(stream, out.samples_used)) {
                break;
            }
        }
        const auto post = chain.final_state();
        const auto amps = post.amplitudes();
        std::size_t ref = 0;
        for (std::size_t k = 1; k < d; ++k) {
            if (std::abs(amps[k]) > std::abs(amps[ref])) {
                ref = k;
            }
        }
        const complex_t phase = std::conj(amps[ref]) / std::abs(amps[ref]);
        out.magnitudes.resize(d);
        out.signs.resize(d);
        for (std::size_t k = 0; k < d; ++k) {
            const complex_t a = amps[k] * phase;
            out.magnitudes[k] = std::abs(a);
            out.signs[k] = a.real() < -kDefaultTieTol ? -1 : +1;
        }
        return out;
    }

    std::vector<std::size_t> counts(d, 0);
    std::size_t accepted = 0;
    std::size_t attempts = 0;
    std::optional<std::vector<double>> system_probs;
    while (accepted < cfg.n_samples) {
        if (attempts >= budget) {
            throw PostSelectionStarved(target_bin, attempts);
        }
        auto stream = runs_stream.split(attempts);
        ++attempts;
        if (!chain.attempt(stream.split(0), out.samples_used)) {
            continue;
        }
        if (!system_probs) {
            system_probs = chain.final_state().probabilities();
        }
        auto measure = stream.split(1);
        ++counts[draw_index(*system_probs, measure)];
        ++accepted;
    }
    out.magnitudes.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        out.magnitudes[k] =
            std::sqrt(static_cast<double>(counts[k]) / static_cast<double>(accepted));
    }
    out.signs = recover_signs(engine, cfg, target_bin, out.magnitudes, rng,
                              &out.samples_used);
    return out;
}

inline ReadoutResult readout_eigenvector(const LaplacianMatrix &l, const QpeConfig &cfg,
                                         std::size_t target_bin, const RngStream &rng,
                                         ReadoutMode mode) {
    return readout_eigenvector(QpeEngine(l, cfg), cfg, target_bin, rng, mode);
}

// --------------------------------------------------------------------------
// Zero-eigenvalue degeneracy
// --------------------------------------------------------------------------

struct DegeneracyResult {
    std::size_t count = 0;          ///< accepted states minus ghosts
    std::size_t accepted = 0;       ///< raw size of the accepted set
    std::size_t ghost_count = 0;
    std::size_t rounds = 0;         ///< preparation rounds executed
    std::size_t qpe_runs = 0;       ///< circuit executions
};

/// Counts the multiplicity of eigenvalue 0. Each round prepares a random
/// state orthogonal to the states accepted so far and post-selects phase
/// bin 0 (up to retry_budget tries, then projection_rounds confirmations);
/// a collapsed state whose Gram-Schmidt residual exceeds rank_tol extends
/// the set. Stops after max_rounds consecutive rounds without growth.
/// Ghost vertices each contribute one zero mode, which is subtracted.
inline DegeneracyResult count_zero_degeneracy(const QpeEngine &engine,
                                              std::size_t ghost_count,
                                              const QpeConfig &cfg,
                                              const RngStream &rng) {
    cfg.validate();
    const unsigned n = engine.system_qubits();
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t max_misses = cfg.max_rounds ? cfg.max_rounds : 4 * dim;

    DegeneracyResult out;
    out.ghost_count = ghost_count;
    std::vector<Amplitudes> accepted;
    std::size_t misses = 0;
    while (misses < max_misses && accepted.size() < dim) {
        const auto round = rng.split(out.rounds);
        ++out.rounds;
        const auto psi0 =
            prepare_state(StatePrep::orthogonal_random(accepted), n, round.split(0));
        detail::PostSelectionChain chain(engine, psi0, 0, cfg.projection_rounds);
        bool hit = false;
        for (std::size_t attempt = 0; attempt < cfg.retry_budget && !hit; ++attempt) {
            hit = chain.attempt(round.split(1).split(attempt), out.qpe_runs);
        }
        if (!hit) {
            ++misses;
            continue;
        }
        const auto state = chain.final_state();
        auto r = detail::residual(
            Amplitudes(state.amplitudes().begin(), state.amplitudes().end()), accepted);
        const double rn = detail::norm2(r);
        if (rn > cfg.rank_tol) {
            for (auto &x : r) {
                x /= rn;
            }
            accepted.push_back(std::move(r));
            misses = 0;
        } else {
            ++misses;
        }
    }
    out.accepted = accepted.size();
    out.count = out.accepted > ghost_count ? out.accepted - ghost_count : 0;
    return out;
}

inline DegeneracyResult count_zero_degeneracy(const LaplacianMatrix &l,
                                              std::size_t ghost_count,
                                              const QpeConfig &cfg,
                                              const RngStream &rng) {
    return count_zero_degeneracy(QpeEngine(l, cfg), ghost_count, cfg, rng);
}

// --------------------------------------------------------------------------
// Fiedler partition
// --------------------------------------------------------------------------

struct OracleAgreement {
    double fiedler_value = 0.0;
    bool degenerate = false;  ///< Fiedler gap <= 1e-6
    Partition classical;
    bool agrees = false;      ///< up to block swap, or equal cuts if degenerate
};

struct FiedlerDiagnostics {
    EigHistogram histogram;
    std::size_t chosen_bin = 0;
    double lambda_hat = 0.0;
    std::size_t prep_basis_index = 0; ///< basis state used for readout
    std::size_t pilot_shots = 0;
    ReadoutResult readout;
    std::vector<double> signed_vector; ///< padded length, canonical sign
    std::size_t unknown_signs = 0;
    std::optional<OracleAgreement> oracle;
};

struct FiedlerPartitionResult {
    Partition partition;
    FiedlerDiagnostics diagnostics;
};

/// Tolerance for treating a read-out entry as zero: entries this small
/// follow the same tie rule as the classical path.
inline constexpr double kReadoutZeroTol = 1e-6;

/// Smallest Fiedler gap (lambda_3 - lambda_2) still treated as non-degenerate.
inline constexpr double kDegeneracyGap = 1e-6;

namespace detail {

/// Flips v so its first entry with |v| > tol is positive.
inline void canonical_sign(std::vector<double> &v, double tol) {
    for (const double x : v) {
        if (std::abs(x) > tol) {
            if (x < 0.0) {
                for (auto &y : v) {
                    y = -y;
                }
            }
            return;
        }
    }
}

/// Zero-mode basis known without measurement: the all-ones vector on the
/// real vertices and one indicator per ghost.
inline std::vector<Amplitudes> known_kernel(const Graph &padded) {
    const std::size_t n = padded.num_vertices();
    const std::size_t real = padded.real_vertices();
    std::vector<Amplitudes> vs;
    Amplitudes ones(n, 0.0);
    for (std::size_t i = 0; i < real; ++i) {
        ones[i] = 1.0;
    }
    vs.push_back(std::move(ones));
    for (std::size_t i = real; i < n; ++i) {
        Amplitudes e(n, 0.0);
        e[i] = 1.0;
        vs.push_back(std::move(e));
    }
    return vs;
}

} // namespace detail

/// Spectral bisection driven by phase estimation.
///
/// The histogram uses a fresh random state orthogonal to the known kernel
/// per shot, and the smallest nonzero bin above the noise floor is taken as
/// the Fiedler bin. Readout then scans basis states |0>, |1>, ... and uses
/// the first whose pilot run shows that bin above the noise floor, so in a
/// degenerate Fiedler space the vector read out is the projection of the
/// lowest such basis state (the same choice the classical eigensolver makes).
///
/// rng.split(0) drives the histogram, rng.split(1).split(k) the pilot for
/// basis state k and rng.split(2) the readout.
inline FiedlerPartitionResult quantum_fiedler_partition(const Graph &g,
                                                        const QpeConfig &cfg,
                                                        const RngStream &rng,
                                                        NormMode norm = NormMode::gershgorin_pow2) {
    cfg.validate();
    if (g.real_vertices() < 2) {
        throw InvalidArgument("partition needs at least two vertices");
    }
    const auto comps = connected_components(g);
    if (comps.count != 1) {
        throw DisconnectedGraph(comps.count);
    }
    const Graph padded = pad_to_power_of_two(g);
    const auto l = normalize_laplacian(build_laplacian(padded), norm);
    const QpeEngine engine(l, cfg);

    FiedlerPartitionResult out;
    auto &diag = out.diagnostics;

    QpeConfig hist_cfg = cfg;
    hist_cfg.state_prep = StatePrep::orthogonal_random(detail::known_kernel(padded));
    diag.histogram = eigenvalue_histogram(engine, l, hist_cfg, rng.split(0));
    bool found = false;
    for (const auto &[bin, count] : diag.histogram.bin_counts) {
        if (bin != 0 && above_noise_floor(count, cfg.shots)) {
            diag.chosen_bin = bin;
            found = true;
            break;
        }
    }
    if (!found) {
        throw PostSelectionStarved(0, cfg.shots);
    }
    // a non-dyadic eigenvalue leaks into neighbouring bins; climb to the peak
    while (diag.histogram.count(diag.chosen_bin + 1) > diag.histogram.count(diag.chosen_bin)) {
        ++diag.chosen_bin;
    }
    diag.lambda_hat = diag.histogram.eigenvalue_of_bin(diag.chosen_bin);

    // pilot scan for the readout preparation: the lowest vertex whose hit
    // count is within 3 sigma of the best one
    const unsigned n = engine.system_qubits();
    std::vector<std::size_t> hits(padded.real_vertices(), 0);
    for (std::size_t k = 0; k < hits.size(); ++k) {
        const QpeOutcome pilot(engine, basis_state(n, k));
        const auto stream = rng.split(1).split(k);
        for (std::size_t shot = 0; shot < cfg.shots; ++shot) {
            auto s = stream.split(shot);
            hits[k] += pilot.draw(s) == diag.chosen_bin ? 1 : 0;
        }
        diag.pilot_shots += cfg.shots;
    }
    const std::size_t best = *std::max_element(hits.begin(), hits.end());
    if (!above_noise_floor(best, cfg.shots)) {
        throw PostSelectionStarved(diag.chosen_bin, diag.pilot_shots);
    }
    const double b = static_cast<double>(best);
    const double slack = 3.0 * std::sqrt(b * (1.0 - b / static_cast<double>(cfg.shots)));
    for (std::size_t k = 0; k < hits.size(); ++k) {
        if (static_cast<double>(hits[k]) >= b - slack && above_noise_floor(hits[k], cfg.shots)) {
            diag.prep_basis_index = k;
            break;
        }
    }

    QpeConfig read_cfg = cfg;
    read_cfg.state_prep = StatePrep::basis(diag.prep_basis_index);
    diag.readout =
        readout_eigenvector(engine, read_cfg, diag.chosen_bin, rng.split(2), cfg.readout);

    // unknown signs: majority of signed neighbours, then block 0
    const auto &r = diag.readout;
    const auto adj = padded.adjacency();
    std::vector<double> v(r.magnitudes.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = r.signs[i] * r.magnitudes[i];
    }
    for (std::size_t i = 0; i < padded.real_vertices(); ++i) {
        if (r.signs[i] != 0) {
            continue;
        }
        ++diag.unknown_signs;
        int vote = 0;
        for (const auto j : adj[i]) {
            vote += r.signs[j];
        }
        v[i] = vote > 0 ? r.magnitudes[i] : vote < 0 ? -r.magnitudes[i] : 0.0;
    }
    for (std::size_t i = padded.real_vertices(); i < v.size(); ++i) {
        v[i] = 0.0;
    }
    detail::canonical_sign(v, kReadoutZeroTol);
    diag.signed_vector = v;
    out.partition = sign_bisect(g, v, kReadoutZeroTol);

    if (g.num_vertices() <= oracle_cap()) {
        const auto spec = eig_sym(build_laplacian(g));
        const auto f = fiedler(spec);
        OracleAgreement agree;
        agree.fiedler_value = f.value;
        agree.degenerate = spec.eigenvalues.size() > 2 &&
                           spec.eigenvalues[2] - spec.eigenvalues[1] <= kDegeneracyGap;
        agree.classical = sign_bisect(g, f.vector);
        agree.agrees = agree.degenerate
                           ? agree.classical.cut_edges == out.partition.cut_edges
                           : same_up_to_relabeling(agree.classical, out.partition);
        diag.oracle = agree;
    }
    return out;
}

} // namespace qlap
