#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pentatrope/pentatrope.hpp"

namespace pt = pentatrope;

namespace {

constexpr int exit_failed_check = 1;
constexpr int exit_bad_input = 2;
constexpr int exit_singular = 3;

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw pt::configuration_error("cannot open " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw pt::configuration_error(path + ": " + e.what());
    }
}

/// Writes to `path`, or stdout when path is empty or "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) {
                throw pt::configuration_error("cannot write " + path);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

struct OrbitOptions {
    std::string map = "T";
    std::size_t n = 5;
    std::size_t steps = 10;
    std::optional<double> t;
    std::string init;
    std::uint64_t seed = pt::default_seed;
    std::string out;
    std::string format = "jsonl";
};

template <class State, class StepFn>
int emit_orbit(const OrbitOptions& o, State start, StepFn&& step) {
    Output out(o.out);
    auto& os = out.stream();
    if (o.format == "csv") {
        pt::write_csv_header(os);
    }
    const auto orb = pt::orbit<State>(std::forward<StepFn>(step), std::move(start), o.steps);
    for (std::size_t m = 0; m < orb.states.size(); ++m) {
        const auto rec = pt::make_record(m, orb.states[m]);
        if (o.format == "csv") {
            pt::write_csv(os, rec);
        } else {
            pt::write_jsonl(os, rec);
        }
    }
    if (orb.stopped) {
        std::cerr << "orbit stopped at step " << orb.stopped->step << ", index " << orb.stopped->index << ": "
                  << orb.stopped->message << '\n';
        return exit_singular;
    }
    return 0;
}

int run_orbit(const OrbitOptions& o) {
    std::optional<pt::OrbitRecord> init;
    if (!o.init.empty()) {
        init = pt::record_from_json(read_json_file(o.init));
    }
    auto rng = pt::trial_rng(o.seed, o.n, 0);
    const bool tropical_map = o.map == "phi" || o.map == "phi_t";
    if (init && (init->first_key == "x") != tropical_map) {
        throw pt::configuration_error("init file keys do not match --map " + o.map);
    }
    if (o.map == "T") {
        auto s = init ? pt::SignedState(init->first, init->second) : pt::random_quasiperiodic_state(o.n, rng);
        return emit_orbit(o, std::move(s), [](const pt::SignedState& v) { return pt::step_T(v); });
    }
    if (o.map == "F") {
        auto s = init ? pt::PositiveState(init->first, init->second) : pt::detail::random_positive_state(o.n, rng);
        return emit_orbit(o, std::move(s), [](const pt::PositiveState& v) { return pt::step_F(v); });
    }
    auto s = init ? pt::TropicalState<double>(init->first, init->second) : pt::random_real_state(o.n, rng, 10.0);
    if (o.map == "phi") {
        return emit_orbit(o, std::move(s), [](const pt::TropicalState<double>& v) { return pt::step_phi(v); });
    }
    if (!o.t) {
        throw pt::configuration_error("--map phi_t requires --t");
    }
    const pt::SemiringParam t(*o.t);
    return emit_orbit(o, std::move(s), [&t](const pt::TropicalState<double>& v) { return pt::step_phi_t(t, v); });
}

int run_invariants(const std::string& orbit_path, const std::string& out_path, const pt::RunConfig& cfg) {
    std::ifstream in(orbit_path);
    if (!in) {
        throw pt::configuration_error("cannot open " + orbit_path);
    }
    const auto orbit = pt::read_jsonl(in);
    if (orbit.empty()) {
        throw pt::configuration_error(orbit_path + " holds no orbit records");
    }
    Output out(out_path);
    pt::write_invariant_csv_header(out.stream());
    pt::write_invariant_rows(out.stream(), orbit, cfg.sign_convention.value_or(pt::SignConvention{}));
    return 0;
}

int run_polygon(const std::string& in_path, std::size_t steps, const std::string& out_path,
                const std::string& write_path) {
    auto poly = pt::polygon_from_json(read_json_file(in_path));
    Output out(out_path);
    pt::write_vertex_csv_header(out.stream());
    pt::write_vertex_csv(out.stream(), 0, poly);
    for (std::size_t m = 1; m <= steps; ++m) {
        poly = pt::geometric_pentagram_step(poly);
        pt::write_vertex_csv(out.stream(), m, poly);
    }
    if (!write_path.empty()) {
        std::ofstream f(write_path);
        f << pt::polygon_to_json(poly).dump(2) << '\n';
    }
    return 0;
}

struct VerifyOptions {
    std::string which = "all";
    std::vector<std::size_t> n;
    std::uint64_t seed = pt::default_seed;
    std::optional<std::size_t> trials;
    std::string report;
};

std::vector<pt::ExperimentReport> run_verify(const VerifyOptions& v, const pt::RunConfig& cfg) {
    const auto& tol = cfg.tolerances;
    auto ns = [&](std::vector<std::size_t> fallback) { return v.n.empty() ? fallback : v.n; };
    auto single_n = [&](std::size_t fallback) { return v.n.empty() ? fallback : v.n.front(); };
    auto trials = [&](std::size_t fallback) { return v.trials.value_or(fallback); };
    const std::vector<std::pair<std::string, std::function<pt::ExperimentReport()>>> runners{
        {"lemma21", [&] { return pt::run_lemma21(ns({5, 6, 7}), trials(1000), v.seed); }},
        {"thm22", [&] { return pt::run_thm22(single_n(5), single_n(5), {2.0, 4.0, 10.0}, trials(200), v.seed, tol); }},
        {"prop33", [&] { return pt::run_prop33(single_n(5), 12, {2.0, 10.0, 100.0}, trials(500), v.seed, tol); }},
        {"conjugacy", [&] { return pt::run_conjugacy(single_n(5), 10, 2.0, trials(200), v.seed, tol); }},
        {"conservation",
         [&] { return pt::run_conservation(ns({5, 6, 7, 8}), trials(50), 10, v.seed, tol, cfg.sign_convention); }},
        {"tropical", [&] { return pt::run_tropical_conservation(ns({5, 6, 7}), trials(200), 30, v.seed, tol); }},
        {"thm23", [&] { return pt::run_thm23(ns({5, 6, 7}), trials(200), v.seed, tol); }},
        {"crosschecks", [&] { return pt::run_crosschecks(ns({5, 6, 7, 8}), trials(100), v.seed, tol); }},
    };
    std::vector<pt::ExperimentReport> reports;
    for (const auto& [name, fn] : runners) {
        if (v.which == "all" || v.which == name) {
            reports.push_back(fn());
        }
    }
    return reports;
}

/// Appends to an existing JSON array in `path`, or starts a new one.
void append_reports(const std::string& path, const std::vector<pt::ExperimentReport>& reports) {
    nlohmann::json all = nlohmann::json::array();
    if (std::ifstream existing(path); existing && existing.peek() != std::ifstream::traits_type::eof()) {
        all = nlohmann::json::parse(existing);
        if (!all.is_array()) {
            throw pt::configuration_error(path + " exists and is not a JSON array of reports");
        }
    }
    for (const auto& r : reports) {
        all.push_back(pt::to_json(r));
    }
    std::ofstream out(path);
    if (!out) {
        throw pt::configuration_error("cannot write " + path);
    }
    out << all.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pentagram map, its tropicalization and their invariants"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file overriding tolerances and the sign convention")
        ->check(CLI::ExistingFile);

    OrbitOptions orbit_opts;
    auto* orbit_cmd = app.add_subcommand("orbit", "Iterate T, F, phi or phi_t and write the orbit");
    orbit_cmd->add_option("--map", orbit_opts.map)->required()->check(CLI::IsMember({"T", "F", "phi", "phi_t"}));
    orbit_cmd->add_option("--n", orbit_opts.n, "Polygon size for random initial states")->check(CLI::Range(5, 1 << 20));
    orbit_cmd->add_option("--steps", orbit_opts.steps);
    orbit_cmd->add_option("--t", orbit_opts.t, "Semiring parameter for phi_t (t > 1)");
    auto* init_opt = orbit_cmd->add_option("--init", orbit_opts.init, "JSON state with z/w or x/y arrays")
                         ->check(CLI::ExistingFile);
    orbit_cmd->add_option("--seed", orbit_opts.seed)->excludes(init_opt);
    orbit_cmd->add_option("--out", orbit_opts.out, "Output file (default stdout)");
    orbit_cmd->add_option("--format", orbit_opts.format)->check(CLI::IsMember({"jsonl", "csv"}));

    std::string inv_orbit, inv_out;
    auto* inv_cmd = app.add_subcommand("invariants", "Evaluate invariants along a JSON-lines orbit as CSV");
    inv_cmd->add_option("--orbit", inv_orbit)->required()->check(CLI::ExistingFile);
    inv_cmd->add_option("--out", inv_out, "Output file (default stdout)");

    std::string poly_in, poly_out, poly_write;
    std::size_t poly_steps = 1;
    auto* poly_cmd = app.add_subcommand("polygon", "Apply the geometric pentagram construction; vertex CSV");
    poly_cmd->add_option("--in", poly_in)->required()->check(CLI::ExistingFile);
    poly_cmd->add_option("--steps", poly_steps);
    poly_cmd->add_option("--out", poly_out, "Vertex CSV file (default stdout)");
    poly_cmd->add_option("--write", poly_write, "Write the final polygon as JSON");

    VerifyOptions verify_opts;
    auto* verify_cmd = app.add_subcommand("verify", "Run experiments and write a JSON report");
    verify_cmd->add_option("which", verify_opts.which)
        ->check(CLI::IsMember({"lemma21", "thm22", "prop33", "conjugacy", "conservation", "tropical", "thm23",
                               "crosschecks", "all"}));
    verify_cmd->add_option("--n", verify_opts.n, "Polygon sizes (first one for single-size experiments)")
        ->check(CLI::Range(5, 64));
    verify_cmd->add_option("--seed", verify_opts.seed);
    verify_cmd->add_option("--trials", verify_opts.trials);
    verify_cmd->add_option("--report", verify_opts.report)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_bad_input;
    }

    try {
        const pt::RunConfig cfg = config_path.empty() ? pt::RunConfig{} : pt::config_from_json(read_json_file(config_path));
        if (*orbit_cmd) {
            return run_orbit(orbit_opts);
        }
        if (*inv_cmd) {
            return run_invariants(inv_orbit, inv_out, cfg);
        }
        if (*poly_cmd) {
            return run_polygon(poly_in, poly_steps, poly_out, poly_write);
        }
        const auto reports = run_verify(verify_opts, cfg);
        append_reports(verify_opts.report, reports);
        bool ok = true;
        for (const auto& r : reports) {
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " max_observed=" << r.max_observed
                      << " bound=" << r.bound << " samples=" << r.samples << " runtime_ms=" << r.runtime_ms << '\n';
            ok = ok && r.pass;
        }
        return ok ? 0 : exit_failed_check;
    } catch (const pt::configuration_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_bad_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_bad_input;
    }
}
