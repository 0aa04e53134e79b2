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
 * JSON views of the result types (nlohmann::ordered_json, so key order is
 * stable). Field names are documented in docs/formats.md.
 */
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "graph.hpp"
#include "qpe.hpp"
#include "resources.hpp"
#include "spectral.hpp"

namespace qlap::json {

using ordered_json = nlohmann::ordered_json;

inline ordered_json graph_summary(const Graph &g) {
    return {{"num_vertices", g.num_vertices()},
            {"num_edges", g.edges().size()},
            {"max_degree", g.max_degree()}};
}

inline ordered_json partition(const Partition &p) {
    return {{"assignment", p.assignment},
            {"num_blocks", p.num_blocks},
            {"cut_edges", p.cut_edges}};
}

inline ordered_json spectrum(const SpectralResult &s, bool with_vectors = false) {
    ordered_json j{{"eigenvalues", s.eigenvalues}, {"num_zero", s.num_zero}};
    if (with_vectors) {
        ordered_json cols = ordered_json::array();
        for (std::size_t c = 0; c < s.eigenvectors.cols(); ++c) {
            cols.push_back(s.eigenvectors.column(c));
        }
        j["eigenvectors"] = std::move(cols);
    }
    return j;
}

inline ordered_json histogram(const EigHistogram &h) {
    ordered_json bins = ordered_json::array();
    for (const auto &[bin, count] : h.bin_counts) {
        bins.push_back({{"bin", bin},
                        {"count", count},
                        {"frequency", static_cast<double>(count) /
                                          static_cast<double>(h.total_shots)},
                        {"lambda_hat", h.eigenvalue_of_bin(bin)}});
    }
    return {{"ancilla_bits", h.ancilla_bits},
            {"divisor", h.divisor},
            {"t", h.t},
            {"total_shots", h.total_shots},
            {"bins", std::move(bins)}};
}

inline std::string to_string(ReadoutMode m) {
    return m == ReadoutMode::trace ? "trace" : "sampling";
}

inline ordered_json readout(const ReadoutResult &r) {
    ordered_json signs = ordered_json::array();
    for (const int s : r.signs) {
        signs.push_back(s > 0 ? ordered_json("+") : s < 0 ? ordered_json("-")
                                                           : ordered_json("unknown"));
    }
    return {{"mode", to_string(r.mode)},
            {"target_bin", r.target_bin},
            {"magnitudes", r.magnitudes},
            {"signs", std::move(signs)},
            {"samples_used", r.samples_used}};
}

inline ordered_json degeneracy(const DegeneracyResult &d) {
    return {{"count", d.count},
            {"accepted", d.accepted},
            {"ghost_count", d.ghost_count},
            {"rounds", d.rounds},
            {"qpe_runs", d.qpe_runs}};
}

inline ordered_json fiedler_diagnostics(const FiedlerDiagnostics &d) {
    ordered_json j{{"histogram", histogram(d.histogram)},
                   {"chosen_bin", d.chosen_bin},
                   {"lambda_hat_fiedler", d.lambda_hat},
                   {"prep_basis_index", d.prep_basis_index},
                   {"pilot_shots", d.pilot_shots},
                   {"readout", readout(d.readout)},
                   {"signed_vector", d.signed_vector},
                   {"unknown_signs", d.unknown_signs},
                   {"samples_used", d.readout.samples_used}};
    if (d.oracle) {
        j["oracle"] = {{"fiedler_value", d.oracle->fiedler_value},
                       {"degenerate", d.oracle->degenerate},
                       {"classical_partition", partition(d.oracle->classical)},
                       {"agreement", d.oracle->agrees}};
    } else {
        j["oracle"] = nullptr;
    }
    return j;
}

inline ordered_json resources(const ResourceEstimate &r) {
    return {{"num_vertices", r.num_vertices},
            {"padded_vertices", r.padded_vertices},
            {"max_degree", r.max_degree},
            {"delta", r.delta},
            {"epsilon", r.epsilon},
            {"t", r.t},
            {"n_system", r.n_system},
            {"m_ancilla", r.m_ancilla},
            {"total_qubits", r.total_qubits},
            {"controlled_u_applications", r.controlled_u_applications},
            {"oracle_calls_per_u", r.oracle_calls_per_u},
            {"oracle_calls_formula", r.oracle_calls_formula},
            {"runtime_class", r.runtime_class},
            {"runtime_value", r.runtime_value},
            {"classical_exact_class", r.classical_exact_class},
            {"classical_memory_class", r.classical_memory_class}};
}

} // namespace qlap::json
