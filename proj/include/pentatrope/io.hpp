#pragma once

// File formats: polygon JSON, orbit JSON-lines and CSV, vertex and invariant CSV, run config.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pentatrope/automaton.hpp"
#include "pentatrope/errors.hpp"
#include "pentatrope/experiments.hpp"
#include "pentatrope/invariants.hpp"
#include "pentatrope/pentagram_dynamics.hpp"
#include "pentatrope/projective_geometry.hpp"

namespace pentatrope {

// --- polygons ---

inline nlohmann::json polygon_to_json(const TwistedPolygon& poly) {
    nlohmann::json m = nlohmann::json::array();
    for (Eigen::Index i = 0; i < 3; ++i) {
        m.push_back({poly.monodromy()(i, 0), poly.monodromy()(i, 1), poly.monodromy()(i, 2)});
    }
    nlohmann::json v = nlohmann::json::array();
    for (const auto& p : poly.base_vertices()) {
        v.push_back({p.coords()(0), p.coords()(1), p.coords()(2)});
    }
    return {{"n", poly.size()}, {"monodromy", m}, {"vertices", v}};
}

inline TwistedPolygon polygon_from_json(const nlohmann::json& j) {
    try {
        const auto& verts = j.at("vertices");
        std::vector<ProjectivePoint> pts;
        for (const auto& h : verts) {
            if (h.size() != 3) {
                throw configuration_error("polygon vertex needs 3 homogeneous coordinates");
            }
            pts.emplace_back(h[0].get<double>(), h[1].get<double>(), h[2].get<double>());
        }
        if (j.contains("n") && j.at("n").get<std::size_t>() != pts.size()) {
            throw configuration_error("polygon n does not match the vertex count");
        }
        Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
        if (j.contains("monodromy")) {
            const auto& mj = j.at("monodromy");
            if (mj.size() != 3) {
                throw configuration_error("monodromy must be 3x3");
            }
            for (Eigen::Index r = 0; r < 3; ++r) {
                if (mj[static_cast<std::size_t>(r)].size() != 3) {
                    throw configuration_error("monodromy must be 3x3");
                }
                for (Eigen::Index c = 0; c < 3; ++c) {
                    m(r, c) = mj[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
                }
            }
        }
        return TwistedPolygon(std::move(pts), m);
    } catch (const nlohmann::json::exception& e) {
        throw configuration_error(std::string("malformed polygon JSON: ") + e.what());
    }
}

/// Rows step,i,x,y in the affine chart h2 = 1; vertices at infinity are written as nan.
inline void write_vertex_csv_header(std::ostream& os) { os << "step,i,x,y\n"; }

inline void write_vertex_csv(std::ostream& os, std::size_t step, const TwistedPolygon& poly) {
    std::size_t i = 0;
    for (const auto& p : poly.base_vertices()) {
        const auto& h = p.coords();
        const bool finite = std::abs(h(2)) > degeneracy_tol;
        os << step << ',' << i++ << ',';
        if (finite) {
            os << nlohmann::json(h(0) / h(2)).dump() << ',' << nlohmann::json(h(1) / h(2)).dump() << '\n';
        } else {
            os << "nan,nan\n";
        }
    }
}

// --- orbits ---

/// One orbit record with its block names: ("z", "w") for T/F states, ("x", "y") for automaton states.
struct OrbitRecord {
    std::size_t step = 0;
    std::string first_key = "z";
    std::string second_key = "w";
    std::vector<double> first;
    std::vector<double> second;
};

inline OrbitRecord make_record(std::size_t step, const SignedState& s) { return {step, "z", "w", s.z, s.w}; }

inline OrbitRecord make_record(std::size_t step, const PositiveState& s) { return {step, "z", "w", s.z(), s.w()}; }

inline OrbitRecord make_record(std::size_t step, const TropicalState<double>& s) {
    return {step, "x", "y", s.x, s.y};
}

inline void write_jsonl(std::ostream& os, const OrbitRecord& r) {
    os << nlohmann::json{{"step", r.step}, {r.first_key, r.first}, {r.second_key, r.second}}.dump() << '\n';
}

inline void write_csv_header(std::ostream& os) { os << "step,kind,index,value\n"; }

inline void write_csv(std::ostream& os, const OrbitRecord& r) {
    auto block = [&](const std::string& kind, const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            os << r.step << ',' << kind << ',' << i << ',' << nlohmann::json(v[i]).dump() << '\n';
        }
    };
    block(r.first_key, r.first);
    block(r.second_key, r.second);
}

inline OrbitRecord record_from_json(const nlohmann::json& j) {
    try {
        OrbitRecord r;
        r.step = j.value("step", std::size_t{0});
        if (j.contains("z") && j.contains("w")) {
            r.first = j.at("z").get<std::vector<double>>();
            r.second = j.at("w").get<std::vector<double>>();
        } else if (j.contains("x") && j.contains("y")) {
            r.first_key = "x";
            r.second_key = "y";
            r.first = j.at("x").get<std::vector<double>>();
            r.second = j.at("y").get<std::vector<double>>();
        } else {
            throw configuration_error("orbit record needs z/w or x/y arrays");
        }
        if (r.first.size() != r.second.size()) {
            throw dimension_error("orbit record blocks differ in length");
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw configuration_error(std::string("malformed orbit record: ") + e.what());
    }
}

inline std::vector<OrbitRecord> read_jsonl(std::istream& is) {
    std::vector<OrbitRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::parse_error& e) {
            throw configuration_error("orbit line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!out.empty()) {
        for (const auto& r : out) {
            if (r.first_key != out.front().first_key || r.first.size() != out.front().first.size()) {
                throw configuration_error("orbit records mix state kinds or sizes");
            }
        }
    }
    return out;
}

// --- invariants ---

inline void write_invariant_csv_header(std::ostream& os) { os << "step,name,value,drift\n"; }

/// Drift is |v - v0| / |v0| for real invariants (absolute when v0 = 0) and |v - v0| for tropical ones.
inline void write_invariant_rows(std::ostream& os, const std::vector<OrbitRecord>& orbit, const SignConvention& conv = {}) {
    if (orbit.empty()) {
        return;
    }
    const bool tropical = orbit.front().first_key == "x";
    const std::size_t n = orbit.front().first.size();
    std::vector<std::pair<std::string, std::vector<double>>> series;
    for (std::size_t k : invariant_weights(n)) {
        for (Family f : {Family::O, Family::E}) {
            const std::string base = f == Family::O ? "O_" : "E_";
            std::vector<double> values;
            for (const auto& rec : orbit) {
                if (tropical) {
                    const TropicalState<double> s(rec.first, rec.second);
                    values.push_back(f == Family::O ? tropical_O_k(s, k) : tropical_E_k(s, k));
                } else {
                    const SignedState s(rec.first, rec.second);
                    values.push_back(f == Family::O ? eval_O_k(s, k, conv) : eval_E_k(s, k, conv));
                }
            }
            series.emplace_back((tropical ? "trop_" : "") + base + std::to_string(k), std::move(values));
        }
    }
    for (std::size_t m = 0; m < orbit.size(); ++m) {
        for (const auto& [name, values] : series) {
            const double v0 = values.front();
            const double gap = std::abs(values[m] - v0);
            const double drift = tropical || v0 == 0.0 ? gap : gap / std::abs(v0);
            os << orbit[m].step << ',' << name << ',' << nlohmann::json(values[m]).dump() << ','
               << nlohmann::json(drift).dump() << '\n';
        }
    }
}

// --- run configuration ---

struct RunConfig {
    Tolerances tolerances;
    std::optional<SignConvention> sign_convention;
};

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            auto read = [&](const char* key, double& field) {
                if (t.contains(key)) {
                    field = t.at(key).get<double>();
                    if (!std::isfinite(field) || field < 0.0) {
                        throw configuration_error(std::string("tolerance ") + key + " must be finite and >= 0");
                    }
                }
            };
            read("conjugacy_rel", c.tolerances.conjugacy_rel);
            read("tf_conjugacy_rel", c.tolerances.tf_conjugacy_rel);
            read("conservation_rel", c.tolerances.conservation_rel);
            read("geometry_rel", c.tolerances.geometry_rel);
            read("projective_rel", c.tolerances.projective_rel);
            read("bound_slack", c.tolerances.bound_slack);
            read("log_crosscheck", c.tolerances.log_crosscheck);
            read("max_nongeneric_fraction", c.tolerances.max_nongeneric_fraction);
            read("max_rank_mismatch_fraction", c.tolerances.max_rank_mismatch_fraction);
            for (const auto& [key, value] : t.items()) {
                static const std::vector<std::string> known{
                    "conjugacy_rel",  "tf_conjugacy_rel", "conservation_rel",        "geometry_rel",
                    "projective_rel", "bound_slack",      "log_crosscheck",          "max_nongeneric_fraction",
                    "max_rank_mismatch_fraction"};
                if (std::find(known.begin(), known.end(), key) == known.end()) {
                    throw configuration_error("unknown tolerance: " + key);
                }
            }
        }
        if (j.contains("sign_convention")) {
            const auto& s = j.at("sign_convention");
            SignConvention conv;
            conv.o_signed = s.value("o_signed", conv.o_signed);
            conv.e_signed = s.value("e_signed", conv.e_signed);
            const std::string block = s.value("e_block", std::string("shifted"));
            if (block == "shifted") {
                conv.e_block = EBlock::shifted;
            } else if (block == "literal") {
                conv.e_block = EBlock::literal;
            } else {
                throw configuration_error("e_block must be \"shifted\" or \"literal\"");
            }
            c.sign_convention = conv;
        }
    } catch (const nlohmann::json::exception& e) {
        throw configuration_error(std::string("malformed config: ") + e.what());
    }
    return c;
}

}  // namespace pentatrope
