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
// qlap: spectral graph partitioning with a classical eigensolver or with
// simulated quantum phase estimation.

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <qlap/json_io.hpp>
#include <qlap/qlap.hpp>

namespace {

using qlap::json::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitAlgorithm = 1;
constexpr int kExitUsage = 2;

/// An error reported to the user with a stable name and exit code.
class CliError : public std::runtime_error {
  public:
    CliError(std::string kind, const std::string &what, int code)
        : std::runtime_error(what), kind_(std::move(kind)), code_(code) {}
    [[nodiscard]] const std::string &kind() const noexcept { return kind_; }
    [[nodiscard]] int code() const noexcept { return code_; }

  private:
    std::string kind_;
    int code_;
};

struct Options {
    std::string graph_path;
    std::string engine = "classical";
    std::string backend = "exact";
    std::size_t trotter_steps = 64;
    std::string trotter_order = "first";
    std::optional<double> delta;
    double epsilon = 1e-3;
    unsigned guard = 2;
    std::size_t shots = 1024;
    std::size_t n_samples = 1000;
    std::string state_prep = "random";
    std::string readout = "trace";
    std::string norm = "gershgorin";
    std::size_t k = 2;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
    bool no_timestamp = false;
    bool force_json = false;
    std::string out_dir = "data/corpus";
};

qlap::Graph load_graph(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw CliError("IOError", "cannot open '" + path + "'", kExitUsage);
    }
    return qlap::parse_edge_list(in);
}

qlap::NormMode norm_mode(const Options &o) {
    return o.norm == "exact" ? qlap::NormMode::exact : qlap::NormMode::gershgorin_pow2;
}

qlap::StatePrep state_prep(const Options &o, std::size_t dim) {
    const auto &s = o.state_prep;
    if (s == "uniform") {
        return qlap::StatePrep::uniform();
    }
    if (s == "random") {
        return qlap::StatePrep::random_real();
    }
    if (s == "orthogonal") {
        return qlap::StatePrep::orthogonal_random({qlap::Amplitudes(dim, 1.0)});
    }
    if (s.rfind("basis:", 0) == 0) {
        std::size_t k = 0;
        const auto tail = std::string_view(s).substr(6);
        const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), k);
        if (ec != std::errc{} || ptr != tail.data() + tail.size() || k >= dim) {
            throw CliError("InvalidArgument", "bad basis index in '" + s + "'", kExitUsage);
        }
        return qlap::StatePrep::basis(k);
    }
    throw CliError("InvalidArgument", "unknown state preparation '" + s + "'", kExitUsage);
}

qlap::EvolutionBackend backend(const Options &o) {
    qlap::EvolutionBackend b;
    b.kind = o.backend == "trotter" ? qlap::BackendKind::trotter : qlap::BackendKind::exact;
    b.trotter_steps = o.trotter_steps;
    b.trotter_order =
        o.trotter_order == "symmetric" ? qlap::TrotterOrder::symmetric : qlap::TrotterOrder::first;
    b.epsilon = o.epsilon;
    return b;
}

/// Laplacian of the padded graph, normalized for phase estimation.
struct Prepared {
    qlap::Graph padded;
    qlap::LaplacianMatrix laplacian;
};

Prepared prepare(const qlap::Graph &g, const Options &o) {
    auto padded = qlap::pad_to_power_of_two(g);
    auto l = qlap::normalize_laplacian(qlap::build_laplacian(padded), norm_mode(o));
    return {std::move(padded), std::move(l)};
}

/// Explicit --delta, otherwise the resolving delta from the dense oracle
/// (when within the cap), otherwise 1 / c.
double choose_delta(const Options &o, const Prepared &p) {
    if (o.delta) {
        if (!(*o.delta > 0.0 && *o.delta < 1.0)) {
            throw CliError("InvalidArgument", "--delta must lie in (0, 1)", kExitUsage);
        }
        return *o.delta;
    }
    const unsigned n = static_cast<unsigned>(std::countr_zero(p.laplacian.dim()));
    const unsigned budget = qlap::kMaxQubits - 2 > n + o.guard ? qlap::kMaxQubits - 2 - n - o.guard : 1;
    if (p.laplacian.dim() <= qlap::oracle_cap()) {
        const auto spec = qlap::eig_sym(p.laplacian);
        return qlap::resolving_delta(spec.eigenvalues, std::max(1U, std::min(budget, 14U)));
    }
    const double c = p.laplacian.divisor();
    return c > 1.0 ? 1.0 / c : 0.5;
}

qlap::QpeConfig qpe_config(const Options &o, const Prepared &p) {
    qlap::QpeConfig cfg;
    cfg.delta = choose_delta(o, p);
    cfg.guard = o.guard;
    cfg.backend = backend(o);
    cfg.shots = o.shots;
    cfg.n_samples = o.n_samples;
    cfg.seed = o.seed;
    cfg.state_prep = state_prep(o, p.laplacian.dim());
    cfg.readout = o.readout == "sampling" ? qlap::ReadoutMode::sampling : qlap::ReadoutMode::trace;
    cfg.threads = o.threads;
    return cfg;
}

/// `engine` overrides the --engine value for commands that fix it.
ordered_json config_json(const Options &o, const std::optional<qlap::QpeConfig> &cfg,
                         const std::string &engine = {}) {
    ordered_json j{{"engine", engine.empty() ? o.engine : engine},
                   {"seed", o.seed},
                   {"norm", o.norm}};
    if (cfg) {
        j["backend"] = o.backend;
        if (o.backend == "trotter") {
            j["trotter_steps"] = o.trotter_steps;
            j["trotter_order"] = o.trotter_order;
        }
        j["delta"] = cfg->delta;
        j["guard"] = cfg->guard;
        j["ancilla_bits"] = cfg->ancilla_bits();
        j["shots"] = cfg->shots;
        j["n_samples"] = cfg->n_samples;
        j["state_prep"] = o.state_prep;
        j["readout"] = o.readout;
    }
    return j;
}

qlap::RngStream root_stream(const Options &o, std::uint64_t command_id) {
    return qlap::RngStream(o.seed, command_id);
}

// ---------------------------------------------------------------- commands

ordered_json cmd_spectrum(const Options &o) {
    const auto g = load_graph(o.graph_path);
    ordered_json out{{"command", "spectrum"}, {"graph", qlap::json::graph_summary(g)}};
    if (o.engine == "classical") {
        out["config"] = config_json(o, std::nullopt);
        out["spectrum"] = qlap::json::spectrum(qlap::eig_sym(qlap::build_laplacian(g)));
        return out;
    }
    const auto p = prepare(g, o);
    const auto cfg = qpe_config(o, p);
    out["config"] = config_json(o, cfg);
    out["divisor"] = p.laplacian.divisor();
    out["ghost_count"] = p.padded.ghost_count();
    out["histogram"] = qlap::json::histogram(
        qlap::eigenvalue_histogram(p.laplacian, cfg, root_stream(o, 1)));
    return out;
}

ordered_json cmd_partition(const Options &o) {
    const auto g = load_graph(o.graph_path);
    ordered_json out{{"command", "partition"}, {"graph", qlap::json::graph_summary(g)}};
    if (o.k < 1 || o.k > g.num_vertices()) {
        throw CliError("InvalidArgument", "--k must lie in [1, N]", kExitUsage);
    }
    if (o.engine == "classical") {
        out["config"] = config_json(o, std::nullopt);
        out["k"] = o.k;
        out["partition"] = qlap::json::partition(qlap::recursive_bisect(g, o.k));
        return out;
    }
    if (o.k != 2) {
        throw CliError("UnsupportedK", "the quantum engine supports k = 2 only", kExitUsage);
    }
    const auto comps = qlap::connected_components(g);
    if (comps.count != 1) {
        throw CliError("ComponentSplitAdvised",
                       "graph has " + std::to_string(comps.count) +
                           " components; partition each component separately",
                       kExitAlgorithm);
    }
    const auto p = prepare(g, o);
    const auto cfg = qpe_config(o, p);
    const auto r = qlap::quantum_fiedler_partition(g, cfg, root_stream(o, 2), norm_mode(o));
    out["config"] = config_json(o, cfg);
    out["k"] = 2;
    out["partition"] = qlap::json::partition(r.partition);
    out["diagnostics"] = qlap::json::fiedler_diagnostics(r.diagnostics);
    return out;
}

ordered_json cmd_components(const Options &o) {
    const auto g = load_graph(o.graph_path);
    const auto uf = qlap::connected_components(g);
    ordered_json out{{"command", "components"}, {"graph", qlap::json::graph_summary(g)}};
    std::optional<std::size_t> oracle;
    if (g.num_vertices() <= qlap::oracle_cap()) {
        oracle = qlap::eig_sym(qlap::build_laplacian(g)).num_zero;
    }
    const auto p = prepare(g, o);
    auto cfg = qpe_config(o, p);
    const auto deg =
        qlap::count_zero_degeneracy(p.laplacian, p.padded.ghost_count(), cfg, root_stream(o, 3));
    out["config"] = config_json(o, cfg, "quantum");
    out["union_find"] = uf.count;
    out["labels"] = uf.labels;
    out["oracle_num_zero"] = oracle ? ordered_json(*oracle) : ordered_json(nullptr);
    out["quantum"] = qlap::json::degeneracy(deg);
    out["agreement"] = {
        {"union_find_vs_oracle", oracle ? ordered_json(*oracle == uf.count) : ordered_json(nullptr)},
        {"union_find_vs_quantum", deg.count == uf.count}};
    return out;
}

ordered_json cmd_estimate(const Options &o) {
    std::ifstream in(o.graph_path);
    if (!in) {
        throw CliError("IOError", "cannot open '" + o.graph_path + "'", kExitUsage);
    }
    const auto summary = qlap::stream_degrees(in);
    const double delta = o.delta.value_or(0.125);
    const auto r = qlap::estimate_resources(summary.num_vertices, summary.max_degree, delta,
                                            o.epsilon, o.guard);
    return {{"command", "estimate"},
            {"edges_read", summary.edges_read},
            {"estimate", qlap::json::resources(r)}};
}

/// Largest distance from an observed lambda-hat to its nearest oracle value.
double max_deviation(const qlap::EigHistogram &h, const std::vector<double> &oracle) {
    double worst = 0.0;
    for (const auto &[bin, count] : h.bin_counts) {
        if (!qlap::above_noise_floor(count, h.total_shots)) {
            continue;
        }
        const double lam = h.eigenvalue_of_bin(bin);
        double best = std::numeric_limits<double>::infinity();
        for (const double x : oracle) {
            best = std::min(best, std::abs(lam - x));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

ordered_json cmd_compare(const Options &o, ordered_json &timing) {
    const auto g = load_graph(o.graph_path);
    if (g.num_vertices() > qlap::oracle_cap()) {
        throw qlap::CapExceeded(g.num_vertices(), qlap::oracle_cap());
    }
    using clock = std::chrono::steady_clock;
    ordered_json out{{"command", "compare"}, {"graph", qlap::json::graph_summary(g)}};

    const auto t0 = clock::now();
    const auto spec = qlap::eig_sym(qlap::build_laplacian(g));
    const bool connected = spec.num_zero == 1 && g.num_vertices() > 1;
    std::optional<qlap::Partition> classical;
    if (connected) {
        classical = qlap::sign_bisect(g, qlap::fiedler(spec).vector);
    }
    const auto t1 = clock::now();

    const auto p = prepare(g, o);
    const auto cfg = qpe_config(o, p);
    const auto rng = root_stream(o, 5);
    const auto hist = qlap::eigenvalue_histogram(p.laplacian, cfg, rng.split(0));
    std::optional<qlap::FiedlerPartitionResult> quantum;
    if (connected) {
        quantum = qlap::quantum_fiedler_partition(g, cfg, rng.split(1), norm_mode(o));
    }
    const auto t2 = clock::now();

    const double bin_width = p.laplacian.divisor() * std::ldexp(1.0, -static_cast<int>(cfg.ancilla_bits()));
    const double dev = max_deviation(hist, spec.eigenvalues);
    out["config"] = config_json(o, cfg, "classical+quantum");
    out["classical"] = qlap::json::spectrum(spec);
    out["quantum"] = qlap::json::histogram(hist);
    out["eigenvalue_deviation"] = {{"max_abs", dev},
                                   {"bound", bin_width},
                                   {"within_bound", dev <= bin_width}};
    if (cfg.backend.kind == qlap::BackendKind::trotter) {
        auto exact_cfg = cfg;
        exact_cfg.backend.kind = qlap::BackendKind::exact;
        const auto ref = qlap::eigenvalue_histogram(p.laplacian, exact_cfg, rng.split(0));
        out["modal_bin"] = {{"trotter", hist.modal_bin()},
                            {"exact", ref.modal_bin()},
                            {"match", hist.modal_bin() == ref.modal_bin()}};
    }
    if (connected) {
        const auto &diag = quantum->diagnostics;
        const bool degenerate = diag.oracle && diag.oracle->degenerate;
        out["partition"] = {
            {"classical", qlap::json::partition(*classical)},
            {"quantum", qlap::json::partition(quantum->partition)},
            {"fiedler_degenerate", degenerate},
            {"criterion", degenerate ? "cut_size" : "assignment_up_to_swap"},
            {"agreement", diag.oracle && diag.oracle->agrees},
            {"cut_size_delta", static_cast<long long>(quantum->partition.cut_edges) -
                                   static_cast<long long>(classical->cut_edges)}};
    } else {
        out["partition"] = {{"skipped", "graph is disconnected"}};
    }
    timing = {{"classical_s", std::chrono::duration<double>(t1 - t0).count()},
              {"quantum_s", std::chrono::duration<double>(t2 - t1).count()}};
    return out;
}

ordered_json cmd_corpus(const Options &o) {
    namespace fs = std::filesystem;
    fs::create_directories(o.out_dir);
    ordered_json index = ordered_json::array();
    for (const auto &ng : qlap::corpus::all_graphs()) {
        const auto file = ng.name + ".edges";
        std::ofstream f(fs::path(o.out_dir) / file);
        if (!f) {
            throw CliError("IOError", "cannot write " + file, kExitUsage);
        }
        f << "# " << ng.name << "\n" << qlap::to_edge_list(ng.graph);
        const auto comps = qlap::connected_components(ng.graph);
        index.push_back({{"name", ng.name},
                         {"file", file},
                         {"num_vertices", ng.graph.num_vertices()},
                         {"num_edges", ng.graph.edges().size()},
                         {"components", comps.count}});
    }
    std::ofstream idx(fs::path(o.out_dir) / "index.json");
    idx << index.dump(2) << "\n";
    return {{"command", "corpus"}, {"out_dir", o.out_dir}, {"graphs", index}};
}

// ------------------------------------------------------------------ output

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void render_table(const ordered_json &j, const std::string &prefix, std::ostream &os) {
    if (j.is_object()) {
        for (const auto &[key, value] : j.items()) {
            render_table(value, prefix.empty() ? key : prefix + "." + key, os);
        }
        return;
    }
    if (j.is_array() && !j.empty() && j.front().is_object()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            render_table(j[i], prefix + "[" + std::to_string(i) + "]", os);
        }
        return;
    }
    constexpr std::size_t width = 40;
    os << prefix;
    for (std::size_t pad = prefix.size(); pad < width; ++pad) {
        os << ' ';
    }
    os << ' ' << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
}

void emit(const ordered_json &result, const Options &o) {
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        if (!f) {
            throw CliError("IOError", "cannot write '" + o.out + "'", kExitUsage);
        }
        f << result.dump(2) << "\n";
        return;
    }
    if (!o.force_json && isatty(fileno(stdout))) {
        render_table(result, "", std::cout);
    } else {
        std::cout << result.dump(2) << "\n";
    }
}

int report_error(const std::string &kind, const std::string &what, int code) {
    const ordered_json err{{"error", kind}, {"message", what}, {"exit_code", code}};
    std::cerr << err.dump() << "\n";
    return code;
}

void add_common(CLI::App *sub, Options &o, bool quantum_flags) {
    sub->add_option("graph", o.graph_path, "Edge-list file")->required();
    sub->add_option("--seed", o.seed, "Root seed");
    sub->add_option("--out", o.out, "Write JSON here instead of stdout");
    sub->add_flag("--no-timestamp", o.no_timestamp, "Omit timestamp and wall-clock fields");
    sub->add_flag("--json", o.force_json, "JSON on stdout even on a terminal");
    if (!quantum_flags) {
        return;
    }
    sub->add_option("--engine", o.engine)->check(CLI::IsMember({"classical", "quantum"}));
    sub->add_option("--backend", o.backend)->check(CLI::IsMember({"exact", "trotter"}));
    sub->add_option("--trotter-steps", o.trotter_steps)->check(CLI::PositiveNumber);
    sub->add_option("--trotter-order", o.trotter_order)
        ->check(CLI::IsMember({"first", "symmetric"}));
    sub->add_option("--delta", o.delta, "Eigenvalue precision in normalized units");
    sub->add_option("--epsilon", o.epsilon, "Simulation accuracy");
    sub->add_option("--guard", o.guard, "Guard ancillas");
    sub->add_option("--shots", o.shots)->check(CLI::PositiveNumber);
    sub->add_option("--n-samples", o.n_samples)->check(CLI::PositiveNumber);
    sub->add_option("--state-prep", o.state_prep, "uniform | random | orthogonal | basis:K");
    sub->add_option("--readout", o.readout)->check(CLI::IsMember({"trace", "sampling"}));
    sub->add_option("--norm", o.norm)->check(CLI::IsMember({"gershgorin", "exact"}));
    sub->add_option("--threads", o.threads)->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Spectral graph partitioning: classical eigensolver or simulated phase estimation"};
    app.require_subcommand(1);
    Options o;

    auto *spectrum = app.add_subcommand("spectrum", "Laplacian spectrum or QPE eigenvalue histogram");
    add_common(spectrum, o, true);
    auto *partition = app.add_subcommand("partition", "Spectral bisection");
    add_common(partition, o, true);
    partition->add_option("--k", o.k, "Number of blocks")->check(CLI::PositiveNumber);
    auto *components = app.add_subcommand("components", "Connected components three ways");
    add_common(components, o, true);
    auto *estimate = app.add_subcommand("estimate", "QPE resource estimate (no simulation)");
    add_common(estimate, o, false);
    estimate->add_option("--delta", o.delta, "Eigenvalue precision in normalized units");
    estimate->add_option("--epsilon", o.epsilon, "Simulation accuracy");
    estimate->add_option("--guard", o.guard, "Guard ancillas");
    auto *compare = app.add_subcommand("compare", "Classical versus quantum engine");
    add_common(compare, o, true);
    auto *corpus = app.add_subcommand("corpus", "Write the built-in corpus");
    corpus->add_option("--out-dir", o.out_dir, "Target directory");
    corpus->add_flag("--no-timestamp", o.no_timestamp);
    corpus->add_flag("--json", o.force_json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    if (estimate->parsed() && o.delta && !(*o.delta > 0.0 && *o.delta < 1.0)) {
        return report_error("InvalidArgument", "--delta must lie in (0, 1)", kExitUsage);
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        ordered_json timing;
        ordered_json result;
        if (spectrum->parsed()) {
            result = cmd_spectrum(o);
        } else if (partition->parsed()) {
            result = cmd_partition(o);
        } else if (components->parsed()) {
            result = cmd_components(o);
        } else if (estimate->parsed()) {
            result = cmd_estimate(o);
        } else if (compare->parsed()) {
            result = cmd_compare(o, timing);
        } else {
            result = cmd_corpus(o);
        }
        if (!o.no_timestamp) {
            result["timestamp"] = utc_timestamp();
            result["wall_clock_s"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (!timing.is_null()) {
                result["engine_wall_clock_s"] = timing;
            }
        }
        emit(result, o);
        return kExitOk;
    } catch (const CliError &e) {
        return report_error(e.kind(), e.what(), e.code());
    } catch (const qlap::ParseError &e) {
        return report_error("ParseError", e.what(), kExitUsage);
    } catch (const qlap::InvalidArgument &e) {
        return report_error("InvalidArgument", e.what(), kExitUsage);
    } catch (const qlap::PostSelectionStarved &e) {
        return report_error("PostSelectionStarved", e.what(), kExitAlgorithm);
    } catch (const qlap::DisconnectedGraph &e) {
        return report_error("ComponentSplitAdvised", e.what(), kExitAlgorithm);
    } catch (const qlap::CapExceeded &e) {
        return report_error("CapExceeded", e.what(), kExitAlgorithm);
    } catch (const qlap::Error &e) {
        return report_error("Error", e.what(), kExitAlgorithm);
    } catch (const std::exception &e) {
        return report_error("InternalError", e.what(), kExitAlgorithm);
    }
}
