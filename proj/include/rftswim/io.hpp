#pragma once

// File formats: JSON run configuration, trajectory and coefficient CSVs,
// run manifests and study reports.

#include "rftswim/harness.hpp"
#include "rftswim/optimizer.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace rftswim {

inline constexpr const char* kConfigSchema = "rftswim-config/1";
inline constexpr const char* kManifestSchema = "rftswim-manifest/1";
inline constexpr const char* kReportSchema = "rftswim-report/1";
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::json;

/// Shortest decimal text that round-trips: 17 significant digits.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline double parse_double(const std::string& cell, const std::string& where) {
    double v = 0.0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && *b == ' ') ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\r')) --e;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) throw ConfigError(where + ": '" + cell + "' is not a number");
    return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    for (auto& c : out) {
        while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
        while (!c.empty() && c.front() == ' ') c.erase(c.begin());
    }
    return out;
}

inline std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    return in;
}

}  // namespace detail

// ---------------------------------------------------------------- trajectories

inline std::vector<std::string> trajectory_header(int n, bool with_method) {
    std::vector<std::string> h = {"t", "x0", "y0"};
    for (int i = 1; i <= n; ++i) h.push_back("theta_" + std::to_string(i));
    for (const char* c : {"U", "Wdot", "force_res", "torque_res"}) h.emplace_back(c);
    if (with_method) h.emplace_back("method");
    return h;
}

/// Header line, then one row per record. Node-scheme trajectories carry a
/// trailing method column. An empty trajectory writes a header with N = 0.
inline void write_trajectory(std::ostream& out, const Trajectory& tr) {
    const bool tagged = tr.method == 'b';
    const auto header = trajectory_header(tr.n_segments(), tagged);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& r : tr.records) {
        out << fmt17(r.state.time) << ',' << fmt17(r.state.x0.x()) << ',' << fmt17(r.state.x0.y());
        for (Eigen::Index i = 0; i < r.state.theta.size(); ++i) out << ',' << fmt17(r.state.theta[i]);
        out << ',' << fmt17(r.diag.speed) << ',' << fmt17(r.diag.work_rate) << ',' << fmt17(r.diag.force_residual)
            << ',' << fmt17(r.diag.torque_residual);
        if (tagged) out << ",b";
        out << '\n';
    }
}

inline void write_trajectory(const std::string& path, const Trajectory& tr) {
    auto out = detail::open_out(path);
    write_trajectory(out, tr);
}

inline Trajectory read_trajectory(std::istream& in, const std::string& name = "trajectory") {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(name + ": missing header");
    const auto header = detail::split_csv(line);
    const bool tagged = !header.empty() && header.back() == "method";
    const int n = static_cast<int>(header.size()) - 7 - (tagged ? 1 : 0);
    if (n < 0 || header != trajectory_header(n, tagged))
        throw ConfigError(name + ": header does not match the trajectory layout");
    Trajectory tr;
    tr.method = tagged ? 'b' : 'a';
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = detail::split_csv(line);
        const std::string where = name + " row " + std::to_string(row);
        if (cells.size() != header.size())
            throw ConfigError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                              std::to_string(cells.size()));
        if (n < kMinSegments) throw ConfigError(where + ": records need at least " + std::to_string(kMinSegments) + " angles");
        TrajectoryRecord rec;
        rec.state.time = detail::parse_double(cells[0], where);
        rec.state.x0 = Vec2(detail::parse_double(cells[1], where), detail::parse_double(cells[2], where));
        rec.state.theta.resize(n);
        for (int i = 0; i < n; ++i) rec.state.theta[i] = detail::parse_double(cells[3 + i], where);
        rec.diag.speed = detail::parse_double(cells[3 + n], where);
        rec.diag.work_rate = detail::parse_double(cells[4 + n], where);
        rec.diag.force_residual = detail::parse_double(cells[5 + n], where);
        rec.diag.torque_residual = detail::parse_double(cells[6 + n], where);
        if (tagged) {
            if (cells.back() != "a" && cells.back() != "b") throw ConfigError(where + ": method must be a or b");
            tr.method = cells.back()[0];
        }
        rec.diag.curvature = recover_curvature(rec.state);
        if (!tr.empty() && !(rec.state.time > tr.back().state.time))
            throw ConfigError(where + ": time is not strictly increasing");
        tr.push_back(std::move(rec));
    }
    return tr;
}

inline Trajectory read_trajectory(const std::string& path) {
    auto in = detail::open_in(path);
    return read_trajectory(in, path);
}

// ---------------------------------------------------------------- coefficients

inline void write_coefficients(std::ostream& out, const ModalCoeffs& c) {
    c.validate();
    out << "m,k,a,b\n";
    for (int m = 1; m <= c.m_max(); ++m)
        for (int k = 1; k <= c.k_max(); ++k)
            out << m << ',' << k << ',' << fmt17(c.a(m - 1, k - 1)) << ',' << fmt17(c.b(m - 1, k - 1)) << '\n';
}

inline void write_coefficients(const std::string& path, const ModalCoeffs& c) {
    auto out = detail::open_out(path);
    write_coefficients(out, c);
}

/// Reads m,k,a,b rows; missing (m,k) pairs are zero.
inline ModalCoeffs read_coefficients(std::istream& in, const std::string& name = "coefficients") {
    std::string line;
    if (!std::getline(in, line) || detail::split_csv(line) != std::vector<std::string>{"m", "k", "a", "b"})
        throw ConfigError(name + ": header must be m,k,a,b");
    struct Entry {
        int m, k;
        double a, b;
    };
    std::vector<Entry> rows;
    int m_max = 0, k_max = 0, row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = detail::split_csv(line);
        const std::string where = name + " row " + std::to_string(row);
        if (cells.size() != 4) throw ConfigError(where + ": expected 4 fields");
        const double m = detail::parse_double(cells[0], where), k = detail::parse_double(cells[1], where);
        if (m < 1 || k < 1 || m != std::floor(m) || k != std::floor(k))
            throw ConfigError(where + ": m and k must be positive integers");
        rows.push_back({static_cast<int>(m), static_cast<int>(k), detail::parse_double(cells[2], where),
                        detail::parse_double(cells[3], where)});
        m_max = std::max(m_max, rows.back().m);
        k_max = std::max(k_max, rows.back().k);
    }
    if (rows.empty()) throw ConfigError(name + ": no coefficient rows");
    ModalCoeffs c{MatrixX::Zero(m_max, k_max), MatrixX::Zero(m_max, k_max)};
    for (const auto& e : rows) {
        c.a(e.m - 1, e.k - 1) = e.a;
        c.b(e.m - 1, e.k - 1) = e.b;
    }
    return c;
}

inline ModalCoeffs read_coefficients(const std::string& path) {
    auto in = detail::open_in(path);
    return read_coefficients(in, path);
}

// ---------------------------------------------------------------- configuration

enum class InitialShape { Straight, Semicircle, Bent };

struct RunConfig {
    std::string schema = kConfigSchema;
    SimConfig sim;
    Method method = Method::Angle;
    double omega = 2 * kPi;
    std::string case_id;            // empty with no coefficients: zero forcing
    std::string coefficients_path;  // modal forcing from an m,k,a,b file
    double amplitude = 1.0;
    InitialShape initial = InitialShape::Straight;
    double initial_curvature = 0.0;
    StudyOptions study;
    OptProblem optimizer;
    Json source;  // the parsed document, for manifests
};

namespace detail {

class Fields {
public:
    Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    std::string at(const std::string& key) const { return path_ + "/" + key; }

    double number(const std::string& key, double def) {
        seen_.push_back(key);
        if (!j_.contains(key)) return def;
        if (!j_[key].is_number()) throw ConfigError(at(key) + ": expected a number");
        return j_[key].get<double>();
    }
    int integer(const std::string& key, int def) {
        seen_.push_back(key);
        if (!j_.contains(key)) return def;
        if (!j_[key].is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
        return j_[key].get<int>();
    }
    std::string string(const std::string& key, const std::string& def) {
        seen_.push_back(key);
        if (!j_.contains(key)) return def;
        if (!j_[key].is_string()) throw ConfigError(at(key) + ": expected a string");
        return j_[key].get<std::string>();
    }
    const Json* object(const std::string& key) {
        seen_.push_back(key);
        if (!j_.contains(key)) return nullptr;
        return &j_[key];
    }
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
                throw ConfigError(at(it.key()) + ": unknown field");
    }

private:
    const Json& j_;
    std::string path_;
    std::vector<std::string> seen_;
};

template <class F>
auto at_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind("/", 0) == 0) throw;
        throw ConfigError(path + ": " + msg);
    }
}

}  // namespace detail

/// Validates a configuration document. Unknown fields, wrong types and
/// out-of-range values are reported with their JSON path.
inline RunConfig parse_config(const Json& doc) {
    RunConfig rc;
    rc.source = doc;
    detail::Fields top(doc, "");
    rc.schema = top.string("schema", kConfigSchema);
    if (rc.schema != kConfigSchema)
        throw ConfigError("/schema: unsupported schema '" + rc.schema + "' (expected " + kConfigSchema + ")");
    rc.sim.gamma = top.number("gamma", 1.0);
    rc.omega = top.number("omega", 2 * kPi);
    if (!(rc.sim.gamma >= 0.0)) throw ConfigError("/gamma: must be non-negative");
    if (!(rc.omega > 0.0)) throw ConfigError("/omega: must be positive");
    rc.case_id = top.string("case", "");
    if (!rc.case_id.empty() && std::find(case_ids().begin(), case_ids().end(), rc.case_id) == case_ids().end())
        throw ConfigError("/case: unknown case id '" + rc.case_id + "'");
    rc.coefficients_path = top.string("coefficients", "");
    rc.amplitude = top.number("amplitude", 1.0);
    rc.method = detail::at_path("/method", [&] { return parse_method(top.string("method", "a")); });

    if (const Json* s = top.object("simulation")) {
        detail::Fields f(*s, "/simulation");
        rc.sim.n_segments = f.integer("n_segments", rc.sim.n_segments);
        rc.sim.dt = f.number("dt", rc.sim.dt);
        rc.sim.t_end = f.number("t_end", rc.sim.t_end);
        rc.sim.newton_tol = f.number("newton_tol", rc.sim.newton_tol);
        rc.sim.max_newton_iter = f.integer("max_newton_iter", rc.sim.max_newton_iter);
        rc.sim.max_halvings = f.integer("max_halvings", rc.sim.max_halvings);
        rc.sim.output_stride = f.integer("output_stride", rc.sim.output_stride);
        const auto scheme = f.string("scheme", "backward-euler");
        if (scheme == "backward-euler") rc.sim.scheme = TimeScheme::BackwardEuler;
        else if (scheme == "trapezoidal") rc.sim.scheme = TimeScheme::Trapezoidal;
        else throw ConfigError(f.at("scheme") + ": expected backward-euler or trapezoidal");
        const auto jac = f.string("jacobian", "frozen-mobility");
        if (jac == "frozen-mobility") rc.sim.jacobian = JacobianMode::FrozenMobility;
        else if (jac == "finite-difference") rc.sim.jacobian = JacobianMode::FiniteDifference;
        else throw ConfigError(f.at("jacobian") + ": expected frozen-mobility or finite-difference");
        const auto mid = f.string("midpoint_sum", "geometric");
        if (mid == "printed") rc.sim.midpoint_sum = MidpointSum::Printed;
        else if (mid == "geometric") rc.sim.midpoint_sum = MidpointSum::Geometric;
        else throw ConfigError(f.at("midpoint_sum") + ": expected printed or geometric");
        rc.sim.closure_segments = f.integer("closure_segments", 0);
        f.finish();
        if (rc.sim.n_segments < kMinSegments)
            throw ConfigError("/simulation/n_segments: must be at least " + std::to_string(kMinSegments) + ", got " +
                              std::to_string(rc.sim.n_segments));
    }
    detail::at_path("/simulation", [&] {
        rc.sim.validate();
        return 0;
    });

    if (const Json* s = top.object("initial")) {
        detail::Fields f(*s, "/initial");
        const auto shape = f.string("shape", "straight");
        if (shape == "straight") rc.initial = InitialShape::Straight;
        else if (shape == "semicircle") rc.initial = InitialShape::Semicircle;
        else if (shape == "bent") rc.initial = InitialShape::Bent;
        else throw ConfigError(f.at("shape") + ": expected straight, semicircle or bent");
        rc.initial_curvature = f.number("curvature", 0.0);
        f.finish();
    }

    auto& so = rc.study;
    so.gamma = rc.sim.gamma;
    so.omega = rc.omega;
    so.n_segments = rc.sim.n_segments;
    so.dt = rc.sim.dt;
    so.newton_tol = rc.sim.newton_tol;
    so.method = rc.method;
    if (!rc.case_id.empty()) so.cases = {rc.case_id};
    if (const Json* s = top.object("study")) {
        detail::Fields f(*s, "/study");
        if (const Json* m = f.object("meshes")) {
            if (!m->is_array() || m->size() < 3) throw ConfigError("/study/meshes: expected at least 3 integers");
            so.meshes.clear();
            for (const auto& v : *m) {
                if (!v.is_number_integer() || v.get<int>() < kMinSegments)
                    throw ConfigError("/study/meshes: entries must be integers >= " + std::to_string(kMinSegments));
                so.meshes.push_back(v.get<int>());
            }
        }
        if (const Json* c = f.object("cases")) {
            if (!c->is_array()) throw ConfigError("/study/cases: expected an array of case ids");
            so.cases.clear();
            for (const auto& v : *c) {
                if (!v.is_string() || std::find(case_ids().begin(), case_ids().end(), v.get<std::string>()) == case_ids().end())
                    throw ConfigError("/study/cases: unknown case id " + v.dump());
                so.cases.push_back(v.get<std::string>());
            }
        }
        so.relax_dt = f.number("relax_dt", so.relax_dt);
        so.relax_t = f.number("relax_t", so.relax_t);
        so.wave_dt = f.number("wave_dt", so.wave_dt);
        so.wave_t = f.number("wave_t", so.wave_t);
        so.window_start = f.number("window_start", so.window_start);
        so.window_end = f.number("window_end", so.window_end);
        so.catalog_t = f.number("catalog_t", so.catalog_t);
        so.coefficient_k_max = f.integer("coefficient_k_max", so.coefficient_k_max);
        so.seed = static_cast<std::uint64_t>(f.integer("seed", static_cast<int>(so.seed)));
        if (const Json* files = f.object("coefficient_files")) {
            detail::Fields cf(*files, "/study/coefficient_files");
            for (const char* id : {"case8", "case9"})
                if (cf.has(id)) so.coefficient_cases[id] = read_coefficients(cf.string(id, ""));
            cf.finish();
        }
        f.finish();
        if (!(so.window_end > so.window_start) || so.window_start < 0)
            throw ConfigError("/study: window_end must exceed window_start >= 0");
    }
    if (!rc.coefficients_path.empty() && (rc.case_id == "case8" || rc.case_id == "case9"))
        so.coefficient_cases[rc.case_id] = read_coefficients(rc.coefficients_path);

    auto& op = rc.optimizer;
    op.gamma = rc.sim.gamma;
    op.omega = rc.omega;
    if (const Json* s = top.object("optimizer")) {
        detail::Fields f(*s, "/optimizer");
        op.constraints = detail::at_path(f.at("problem"), [&] { return parse_constraint_set(f.string("problem", "work")); });
        op.m_max = f.integer("m_max", op.m_max);
        op.k_max = f.integer("k_max", op.k_max);
        op.restarts = f.integer("restarts", op.restarts);
        op.seed = static_cast<std::uint64_t>(f.integer("seed", static_cast<int>(op.seed)));
        op.work_target = f.number("work_target", op.work_target);
        f.finish();
    }
    detail::at_path("/optimizer", [&] {
        op.validate();
        return 0;
    });
    top.finish();
    return rc;
}

inline RunConfig parse_config_file(const std::string& path) {
    auto in = detail::open_in(path);
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path + ": malformed JSON: " + e.what());
    }
    return parse_config(doc);
}

/// Forcing described by a configuration, scaled by its amplitude.
inline ForcingSpec resolve_forcing(const RunConfig& rc) {
    ForcingSpec f;
    if (!rc.case_id.empty()) {
        f = resolve_case(rc.case_id, rc.study);
    } else if (!rc.coefficients_path.empty()) {
        const ModalCoeffs c = read_coefficients(rc.coefficients_path);
        auto basis = std::make_shared<const EigenBasis>(EigenBasis::build(c.k_max()));
        f = ForcingSpec::modal(rc.omega, c, basis);
    } else {
        f = ForcingSpec::zero(rc.omega);
    }
    return rc.amplitude == 1.0 ? f : f.scaled(rc.amplitude);
}

inline FilamentState initial_state(const RunConfig& rc) {
    switch (rc.initial) {
        case InitialShape::Straight: return FilamentState::straight(rc.sim.n_segments);
        case InitialShape::Semicircle: return FilamentState::semicircle(rc.sim.n_segments);
        case InitialShape::Bent: return uniformly_bent(rc.sim.n_segments, rc.initial_curvature);
    }
    return FilamentState::straight(rc.sim.n_segments);
}

/// Fully resolved configuration, with every default written out.
inline Json resolved_config(const RunConfig& rc) {
    Json j;
    j["schema"] = rc.schema;
    j["gamma"] = rc.sim.gamma;
    j["omega"] = rc.omega;
    j["method"] = std::string(1, method_tag(rc.method));
    j["case"] = rc.case_id;
    j["coefficients"] = rc.coefficients_path;
    j["amplitude"] = rc.amplitude;
    j["simulation"] = {{"n_segments", rc.sim.n_segments},
                       {"dt", rc.sim.dt},
                       {"t_end", rc.sim.t_end},
                       {"newton_tol", rc.sim.newton_tol},
                       {"max_newton_iter", rc.sim.max_newton_iter},
                       {"max_halvings", rc.sim.max_halvings},
                       {"output_stride", rc.sim.output_stride},
                       {"scheme", rc.sim.scheme == TimeScheme::BackwardEuler ? "backward-euler" : "trapezoidal"},
                       {"jacobian", rc.sim.jacobian == JacobianMode::FrozenMobility ? "frozen-mobility" : "finite-difference"},
                       {"midpoint_sum", rc.sim.midpoint_sum == MidpointSum::Printed ? "printed" : "geometric"},
                       {"closure_segments", rc.sim.closure_segments}};
    const char* shapes[] = {"straight", "semicircle", "bent"};
    j["initial"] = {{"shape", shapes[static_cast<int>(rc.initial)]}, {"curvature", rc.initial_curvature}};
    j["study"] = options_json(rc.study);
    j["optimizer"] = {{"problem", to_string(rc.optimizer.constraints)}, {"m_max", rc.optimizer.m_max},
                      {"k_max", rc.optimizer.k_max}, {"restarts", rc.optimizer.restarts},
                      {"seed", rc.optimizer.seed}, {"work_target", rc.optimizer.work_target}};
    return j;
}

// ---------------------------------------------------------------- manifests

inline std::string sha256_file(const std::string& path) {
    auto in = std::ifstream(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 15];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    char two[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(two, sizeof two, "%02x", md[i]);
        hex += two;
    }
    return hex;
}

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    Json config = Json::object();
    std::uint64_t seed = 0;
    std::map<std::string, std::string> input_digests;  // path -> sha256
    std::vector<std::string> outputs;

    void add_input(const std::string& path) { input_digests[path] = sha256_file(path); }

    Json to_json() const {
        Json j;
        j["schema"] = kManifestSchema;
        j["tool"] = "rftswim";
        j["version"] = kToolVersion;
        j["command"] = command;
        j["argv"] = argv;
        j["config"] = config;
        j["seed"] = seed;
        j["inputs"] = input_digests;
        j["outputs"] = outputs;
        return j;
    }

    void write(const std::string& path) const {
        auto out = detail::open_out(path);
        out << to_json().dump(2) << '\n';
    }
};

// ---------------------------------------------------------------- reports

inline void write_table_csv(const std::string& path, const StudyTable& t) {
    auto out = detail::open_out(path);
    if (!t.labels.empty()) out << "label,";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (!t.labels.empty()) out << t.labels[r] << ',';
        for (std::size_t i = 0; i < t.rows[r].size(); ++i) out << (i ? "," : "") << fmt17(t.rows[r][i]);
        out << '\n';
    }
}

inline Json report_json(const StudyReport& rep, const std::vector<std::string>& table_files) {
    Json j;
    j["schema"] = kReportSchema;
    j["study"] = rep.study;
    j["parameters"] = rep.parameters;
    j["slopes"] = rep.slopes;
    Json checks = Json::array();
    auto bound = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name}, {"value", std::isfinite(c.value) ? Json(c.value) : Json(nullptr)},
                          {"lo", bound(c.lo)}, {"hi", bound(c.hi)}, {"pass", c.pass}, {"note", c.note}});
    j["checks"] = checks;
    j["passed"] = rep.passed();
    Json tables = Json::array();
    for (std::size_t i = 0; i < rep.tables.size(); ++i) {
        Json t{{"name", rep.tables[i].name}, {"columns", rep.tables[i].columns}, {"rows", rep.tables[i].rows.size()}};
        if (i < table_files.size()) t["file"] = table_files[i];
        if (rep.tables[i].rows.size() <= 50) {
            t["data"] = rep.tables[i].rows;
            if (!rep.tables[i].labels.empty()) t["labels"] = rep.tables[i].labels;
        }
        tables.push_back(t);
    }
    j["tables"] = tables;
    j["trajectories"] = rep.trajectory_files;
    return j;
}

/// report.json plus one CSV per table in dir; returns the files written.
inline std::vector<std::string> write_report(const std::string& dir, const StudyReport& rep) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> files;
    for (const auto& t : rep.tables) {
        const std::string f = (std::filesystem::path(dir) / (rep.study + "_" + t.name + ".csv")).string();
        write_table_csv(f, t);
        files.push_back(f);
    }
    const std::string jf = (std::filesystem::path(dir) / (rep.study + "_report.json")).string();
    auto out = detail::open_out(jf);
    out << report_json(rep, files).dump(2) << '\n';
    files.push_back(jf);
    return files;
}

}  // namespace rftswim
