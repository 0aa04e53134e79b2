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
 * Statevector simulator primitives.
 *
 * Bit convention: qubit 0 is the least significant bit of the basis index,
 * so for two qubits |q1 q0> the index is 2*q1 + q0. A register given as an
 * ordered qubit list {q_0, ..., q_{m-1}} reads as the integer
 * sum_j bit(q_j) 2^j.
 *
 * Operations take the state by value and return it; pass with std::move to
 * transform in place.
 */
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace qlap {

/// Desk-scale cap: 2^22 amplitudes.
inline constexpr unsigned kMaxQubits = 22;
inline constexpr double kNormTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-10;

class QuantumState {
  public:
    QuantumState() = default;

    /// |0...0> on n qubits.
    explicit QuantumState(unsigned num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits > kMaxQubits) {
            throw InvalidArgument("state of " + std::to_string(num_qubits) +
                                  " qubits exceeds the " +
                                  std::to_string(kMaxQubits) + "-qubit cap");
        }
        amps_.assign(std::size_t{1} << num_qubits, complex_t{0.0, 0.0});
        amps_[0] = 1.0;
    }

    /// Takes amplitudes verbatim; length must be a power of two and the norm
    /// must be 1 within kNormTol.
    static QuantumState from_amplitudes(std::vector<complex_t> amps) {
        if (amps.empty() || !std::has_single_bit(amps.size())) {
            throw InvalidArgument("amplitude count must be a power of two");
        }
        QuantumState s;
        s.num_qubits_ = static_cast<unsigned>(std::countr_zero(amps.size()));
        if (s.num_qubits_ > kMaxQubits) {
            throw InvalidArgument("state exceeds the qubit cap");
        }
        s.amps_ = std::move(amps);
        if (std::abs(s.norm() - 1.0) > kNormTol) {
            throw InvalidArgument("amplitudes are not unit norm");
        }
        return s;
    }

    static QuantumState from_real(std::span<const double> v) {
        std::vector<complex_t> amps(v.begin(), v.end());
        return from_amplitudes(std::move(amps));
    }

    [[nodiscard]] unsigned num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const complex_t> amplitudes() const noexcept {
        return amps_;
    }
    /// Mutable view for kernels in this library; keep the norm at 1.
    [[nodiscard]] std::span<complex_t> data() noexcept { return amps_; }
    [[nodiscard]] complex_t operator[](std::size_t k) const { return amps_[k]; }

    [[nodiscard]] double norm() const {
        double acc = 0.0;
        for (const auto &a : amps_) {
            acc += std::norm(a);
        }
        return std::sqrt(acc);
    }

    [[nodiscard]] std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        std::transform(amps_.begin(), amps_.end(), p.begin(),
                       [](complex_t a) { return std::norm(a); });
        return p;
    }

    friend bool operator==(const QuantumState &, const QuantumState &) = default;

  private:
    unsigned num_qubits_ = 0;
    std::vector<complex_t> amps_{complex_t{1.0, 0.0}};
};

inline QuantumState basis_state(unsigned n, std::size_t k) {
    QuantumState s(n);
    if (k >= s.size()) {
        throw InvalidArgument("basis index " + std::to_string(k) +
                              " out of range for " + std::to_string(n) +
                              " qubits");
    }
    s.data()[0] = 0.0;
    s.data()[k] = 1.0;
    return s;
}

inline complex_t inner_product(const QuantumState &a, const QuantumState &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw InvalidArgument("inner_product: qubit counts differ");
    }
    complex_t acc{0.0, 0.0};
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t k = 0; k < x.size(); ++k) {
        acc += std::conj(x[k]) * y[k];
    }
    return acc;
}

namespace gates {

inline ComplexMatrix hadamard() {
    const double r = 1.0 / std::numbers::sqrt2;
    ComplexMatrix h(2, 2);
    h(0, 0) = r;
    h(0, 1) = r;
    h(1, 0) = r;
    h(1, 1) = -r;
    return h;
}

inline ComplexMatrix pauli_x() {
    ComplexMatrix x(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    return x;
}

inline ComplexMatrix phase(double angle) {
    ComplexMatrix p(2, 2);
    p(0, 0) = 1.0;
    p(1, 1) = std::polar(1.0, angle);
    return p;
}

} // namespace gates

namespace detail {

inline void check_qubits(unsigned n, std::span<const unsigned> qubits) {
    std::uint64_t seen = 0;
    for (const auto q : qubits) {
        if (q >= n) {
            throw InvalidArgument("qubit " + std::to_string(q) +
                                  " out of range");
        }
        if (seen & (std::uint64_t{1} << q)) {
            throw InvalidArgument("qubit " + std::to_string(q) + " repeated");
        }
        seen |= std::uint64_t{1} << q;
    }
}

inline std::size_t mask_of(std::span<const unsigned> qubits) {
    std::size_t m = 0;
    for (const auto q : qubits) {
        m |= std::size_t{1} << q;
    }
    return m;
}

/// Register value of basis index `index` for the ordered qubit list.
inline std::size_t register_value(std::size_t index,
                                  std::span<const unsigned> qubits) {
    std::size_t v = 0;
    for (std::size_t j = 0; j < qubits.size(); ++j) {
        v |= ((index >> qubits[j]) & 1U) << j;
    }
    return v;
}

/// Applies u on `targets` for every basis block whose `control_mask` bits
/// are all set. No validation.
inline void apply_matrix(std::span<complex_t> amps,
                         std::span<const unsigned> targets,
                         const ComplexMatrix &u, std::size_t control_mask) {
    const std::size_t dim = std::size_t{1} << targets.size();
    std::vector<std::size_t> offsets(dim, 0);
    for (std::size_t s = 0; s < dim; ++s) {
        for (std::size_t j = 0; j < targets.size(); ++j) {
            if ((s >> j) & 1U) {
                offsets[s] |= std::size_t{1} << targets[j];
            }
        }
    }
    const std::size_t target_mask = mask_of(targets);
    std::vector<complex_t> in(dim);
    for (std::size_t base = 0; base < amps.size(); ++base) {
        if ((base & target_mask) != 0 || (base & control_mask) != control_mask) {
            continue;
        }
        for (std::size_t s = 0; s < dim; ++s) {
            in[s] = amps[base | offsets[s]];
        }
        for (std::size_t r = 0; r < dim; ++r) {
            complex_t acc{0.0, 0.0};
            const auto row = u.row(r);
            for (std::size_t c = 0; c < dim; ++c) {
                acc += row[c] * in[c];
            }
            amps[base | offsets[r]] = acc;
        }
    }
}

inline void apply_single(std::span<complex_t> amps, unsigned target,
                         const ComplexMatrix &u) {
    const std::size_t bit = std::size_t{1} << target;
    const complex_t u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & bit) {
            continue;
        }
        const complex_t a0 = amps[i];
        const complex_t a1 = amps[i | bit];
        amps[i] = u00 * a0 + u01 * a1;
        amps[i | bit] = u10 * a0 + u11 * a1;
    }
}

/// Multiplies by e^{i angle} wherever both qubits are 1.
inline void apply_controlled_phase(std::span<complex_t> amps, unsigned a,
                                   unsigned b, double angle) {
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    const complex_t ph = std::polar(1.0, angle);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & mask) == mask) {
            amps[i] *= ph;
        }
    }
}

inline void apply_swap(std::span<complex_t> amps, unsigned a, unsigned b) {
    if (a == b) {
        return;
    }
    const std::size_t ba = std::size_t{1} << a;
    const std::size_t bb = std::size_t{1} << b;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & ba) && !(i & bb)) {
            std::swap(amps[i], amps[(i & ~ba) | bb]);
        }
    }
}

inline void check_unitary(const ComplexMatrix &u, std::size_t expected_dim) {
    if (u.rows() != expected_dim || u.cols() != expected_dim) {
        throw InvalidArgument("matrix is " + std::to_string(u.rows()) + "x" +
                              std::to_string(u.cols()) + ", expected " +
                              std::to_string(expected_dim));
    }
    if (unitarity_defect(u) > kUnitaryTol) {
        throw InvalidArgument("matrix is not unitary");
    }
}

} // namespace detail

inline QuantumState apply_unitary(QuantumState s,
                                  std::span<const unsigned> targets,
                                  const ComplexMatrix &u) {
    detail::check_qubits(s.num_qubits(), targets);
    detail::check_unitary(u, std::size_t{1} << targets.size());
    if (targets.size() == 1) {
        detail::apply_single(s.data(), targets[0], u);
    } else {
        detail::apply_matrix(s.data(), targets, u, 0);
    }
    return s;
}

inline QuantumState apply_unitary(QuantumState s,
                                  std::initializer_list<unsigned> targets,
                                  const ComplexMatrix &u) {
    return apply_unitary(std::move(s), std::span<const unsigned>(targets.begin(), targets.size()), u);
}

inline QuantumState apply_controlled(QuantumState s, unsigned control,
                                     std::span<const unsigned> targets,
                                     const ComplexMatrix &u) {
    detail::check_qubits(s.num_qubits(), targets);
    if (control >= s.num_qubits()) {
        throw InvalidArgument("control qubit out of range");
    }
    if (std::find(targets.begin(), targets.end(), control) != targets.end()) {
        throw InvalidArgument("control qubit overlaps targets");
    }
    detail::check_unitary(u, std::size_t{1} << targets.size());
    detail::apply_matrix(s.data(), targets, u, std::size_t{1} << control);
    return s;
}

inline QuantumState apply_controlled(QuantumState s, unsigned control,
                                     std::initializer_list<unsigned> targets,
                                     const ComplexMatrix &u) {
    return apply_controlled(std::move(s), control, std::span<const unsigned>(targets.begin(), targets.size()), u);
}

/// |x> -> 2^{-m/2} sum_y e^{+2 pi i x y / 2^m} |y> on the register.
inline QuantumState qft(QuantumState s, std::span<const unsigned> qubits) {
    detail::check_qubits(s.num_qubits(), qubits);
    const std::size_t m = qubits.size();
    const auto h = gates::hadamard();
    auto amps = s.data();
    for (std::size_t j = m; j-- > 0;) {
        detail::apply_single(amps, qubits[j], h);
        for (std::size_t k = j; k-- > 0;) {
            const double angle =
                std::numbers::pi / static_cast<double>(std::size_t{1} << (j - k));
            detail::apply_controlled_phase(amps, qubits[k], qubits[j], angle);
        }
    }
    for (std::size_t i = 0; i < m / 2; ++i) {
        detail::apply_swap(amps, qubits[i], qubits[m - 1 - i]);
    }
    return s;
}

/// Inverse of qft(): |y> -> 2^{-m/2} sum_x e^{-2 pi i x y / 2^m} |x>, so a
/// register holding sum_x e^{2 pi i x theta}|x> reads as the binary
/// fraction theta.
inline QuantumState inverse_qft(QuantumState s, std::span<const unsigned> qubits) {
    detail::check_qubits(s.num_qubits(), qubits);
    const std::size_t m = qubits.size();
    const auto h = gates::hadamard();
    auto amps = s.data();
    for (std::size_t i = 0; i < m / 2; ++i) {
        detail::apply_swap(amps, qubits[i], qubits[m - 1 - i]);
    }
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            const double angle =
                -std::numbers::pi / static_cast<double>(std::size_t{1} << (j - k));
            detail::apply_controlled_phase(amps, qubits[k], qubits[j], angle);
        }
        detail::apply_single(amps, qubits[j], h);
    }
    return s;
}

/// Born probabilities of the register values (marginal over other qubits).
inline std::vector<double> register_distribution(const QuantumState &s,
                                                 std::span<const unsigned> qubits) {
    detail::check_qubits(s.num_qubits(), qubits);
    std::vector<double> p(std::size_t{1} << qubits.size(), 0.0);
    const auto amps = s.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        p[detail::register_value(i, qubits)] += std::norm(amps[i]);
    }
    return p;
}

/// Index drawn from the (unnormalized) weights with one uniform draw.
inline std::size_t draw_index(std::span<const double> weights, RngStream &rng) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) {
            last_nonzero = i;
        }
        acc += weights[i];
        if (target < acc) {
            return i;
        }
    }
    return last_nonzero;
}

/// Conditional state after the register was found holding `outcome`.
inline QuantumState collapse(QuantumState s, std::span<const unsigned> qubits,
                             std::size_t outcome) {
    detail::check_qubits(s.num_qubits(), qubits);
    auto amps = s.data();
    double kept = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (detail::register_value(i, qubits) != outcome) {
            amps[i] = 0.0;
        } else {
            kept += std::norm(amps[i]);
        }
    }
    if (kept <= 0.0) {
        throw InvalidArgument("collapse onto a zero-probability outcome");
    }
    const double scale = 1.0 / std::sqrt(kept);
    for (auto &a : amps) {
        a *= scale;
    }
    return s;
}

struct Measurement {
    std::size_t outcome;
    QuantumState post;
};

inline Measurement measure_register(QuantumState s,
                                    std::span<const unsigned> qubits,
                                    RngStream &rng) {
    const auto p = register_distribution(s, qubits);
    const auto outcome = draw_index(p, rng);
    return {outcome, collapse(std::move(s), qubits, outcome)};
}

using Histogram = std::map<std::size_t, std::size_t>;

/// Multinomial sample of basis indices; shot i draws from rng.split(i).
inline Histogram sample_counts(const QuantumState &s, std::size_t shots,
                               const RngStream &rng) {
    if (shots < 1) {
        throw InvalidArgument("shots must be >= 1");
    }
    const auto p = s.probabilities();
    std::vector<double> cumulative(p.size());
    std::partial_sum(p.begin(), p.end(), cumulative.begin());
    const double total = cumulative.back();
    Histogram h;
    for (std::size_t shot = 0; shot < shots; ++shot) {
        auto stream = rng.split(shot);
        const double target = stream.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        auto idx = static_cast<std::size_t>(it - cumulative.begin());
        if (idx >= p.size()) {
            idx = p.size() - 1;
        }
        while (p[idx] == 0.0 && idx > 0) {
            --idx;
        }
        ++h[idx];
    }
    return h;
}

} // namespace qlap
