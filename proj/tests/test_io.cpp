#include "rftswim/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace rftswim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "rftswim_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

Trajectory sample_trajectory(char method) {
    Trajectory tr;
    tr.method = method;
    for (int k = 0; k < 3; ++k) {
        VectorX th(5);
        for (int i = 0; i < 5; ++i) th[i] = std::sin(0.1 * k + i) / 3.0;
        TrajectoryRecord r{FilamentState(Vec2(1.0 / 3 + k, -2.0 / 7), th, 0.1 * k + 1e-3), {}};
        r.diag.speed = -1.0 / 7 * k;
        r.diag.work_rate = 2.0 / 3;
        r.diag.force_residual = 1e-17;
        r.diag.torque_residual = 3.3e-5;
        tr.push_back(r);
    }
    return tr;
}

Json minimal() { return Json{{"case", "case6"}}; }

}  // namespace

TEST(Csv, SeventeenDigitsRoundTrip) {
    for (double v : {1.0 / 3, -2.0e-300, 6.02214076e23, 0.1 + 0.2}) EXPECT_EQ(std::stod(fmt17(v)), v);
}

TEST(Trajectory, RoundTripIsExact) {
    for (char m : {'a', 'b'}) {
        const auto tr = sample_trajectory(m);
        std::stringstream ss;
        write_trajectory(ss, tr);
        const auto back = read_trajectory(ss);
        ASSERT_EQ(back.size(), tr.size());
        EXPECT_EQ(back.method, m);
        for (std::size_t i = 0; i < tr.size(); ++i) {
            EXPECT_EQ(back.records[i].state.time, tr.records[i].state.time);
            EXPECT_EQ((back.records[i].state.x0 - tr.records[i].state.x0).norm(), 0.0);
            EXPECT_EQ((back.records[i].state.theta - tr.records[i].state.theta).cwiseAbs().maxCoeff(), 0.0);
            EXPECT_EQ(back.records[i].diag.speed, tr.records[i].diag.speed);
            EXPECT_EQ(back.records[i].diag.work_rate, tr.records[i].diag.work_rate);
            EXPECT_EQ(back.records[i].diag.torque_residual, tr.records[i].diag.torque_residual);
        }
    }
}

TEST(Trajectory, HeaderFollowsContract) {
    const auto h = trajectory_header(3, false);
    const std::vector<std::string> expect{"t", "x0", "y0", "theta_1", "theta_2", "theta_3",
                                          "U", "Wdot", "force_res", "torque_res"};
    EXPECT_EQ(h, expect);
    EXPECT_EQ(trajectory_header(3, true).back(), "method");
}

TEST(Trajectory, MalformedInputRejected) {
    std::stringstream bad_header("t,x0,y0\n0,0,0\n");
    EXPECT_THROW(read_trajectory(bad_header), ConfigError);

    std::stringstream ss;
    write_trajectory(ss, sample_trajectory('a'));
    std::string text = ss.str();
    const auto pos = text.rfind('\n', text.size() - 2);
    std::stringstream short_row(text.substr(0, pos + 1) + "0.5,1,2\n");
    EXPECT_THROW(read_trajectory(short_row), ConfigError);

    std::stringstream b;
    write_trajectory(b, sample_trajectory('b'));
    std::string tb = b.str();
    tb[tb.size() - 2] = 'z';  // method tag
    std::stringstream bad_tag(tb);
    EXPECT_THROW(read_trajectory(bad_tag), ConfigError);
}

TEST(Trajectory, FileRoundTrip) {
    const auto p = scratch("traj.csv").string();
    write_trajectory(p, sample_trajectory('b'));
    EXPECT_EQ(read_trajectory(p).size(), 3u);
    EXPECT_THROW(read_trajectory(scratch("missing.csv").string()), ConfigError);
}

TEST(Coefficients, RoundTripIsExact) {
    ModalCoeffs c{MatrixX(2, 3), MatrixX(2, 3)};
    c.a << 1.0 / 3, -0.5, 1e-20, 2, 3, 4;
    c.b << -1.0 / 7, 0, 0, 0.125, 9, -9;
    std::stringstream ss;
    write_coefficients(ss, c);
    EXPECT_EQ(ss.str().substr(0, 8), "m,k,a,b\n");
    const auto back = read_coefficients(ss);
    EXPECT_EQ((back.a - c.a).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((back.b - c.b).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Config, MinimalDocumentUsesDefaults) {
    const auto rc = parse_config(minimal());
    EXPECT_EQ(rc.case_id, "case6");
    EXPECT_EQ(rc.sim.gamma, 1.0);
    EXPECT_EQ(rc.omega, 2 * kPi);
    EXPECT_EQ(rc.sim.n_segments, 100);
    EXPECT_EQ(rc.method, Method::Angle);
    EXPECT_EQ(rc.schema, kConfigSchema);
    EXPECT_NEAR(resolve_forcing(rc).kappa0(1.0, 0.0), std::sqrt(2.0), 1e-12);
}

TEST(Config, ThreeSegmentsRejectedWithPath) {
    Json j = minimal();
    j["simulation"] = {{"n_segments", 3}};
    try {
        parse_config(j);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/simulation/n_segments"), std::string::npos);
    }
}

TEST(Config, UnknownFieldReportedWithPath) {
    Json j = minimal();
    j["simulation"] = {{"n_segmnets", 50}};
    try {
        parse_config(j);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/simulation/n_segmnets"), std::string::npos);
    }
}

TEST(Config, TypeAndValueErrors) {
    EXPECT_THROW(parse_config(Json{{"schema", "rftswim-config/0"}}), ConfigError);
    EXPECT_THROW(parse_config(Json{{"gamma", "one"}}), ConfigError);
    EXPECT_THROW(parse_config(Json{{"gamma", -1.0}}), ConfigError);
    EXPECT_THROW(parse_config(Json{{"case", "case42"}}), ConfigError);
    EXPECT_THROW(parse_config(Json{{"method", "c"}}), ConfigError);
    EXPECT_THROW(parse_config(Json{{"simulation", {{"dt", 0.0}}}}), ConfigError);
    EXPECT_THROW(parse_config(Json{{"optimizer", {{"k_max", 30}}}}), ConfigError);
    EXPECT_THROW(parse_config(Json{{"study", {{"meshes", {10, 20}}}}}), ConfigError);
    EXPECT_THROW(parse_config(Json{{"initial", {{"shape", "helix"}}}}), ConfigError);
}

TEST(Config, OptimizerCaseReadsCoefficientFile) {
    ModalCoeffs c{MatrixX::Zero(1, 4), MatrixX::Zero(1, 4)};
    c.a(0, 0) = 2.0;
    c.b(0, 1) = -3.0;
    const auto p = scratch("case8.csv").string();
    write_coefficients(p, c);
    Json j{{"case", "case8"}, {"coefficients", p}};
    const auto rc = parse_config(j);
    ASSERT_EQ(rc.study.coefficient_cases.count("case8"), 1u);
    const auto f = resolve_forcing(rc);
    // unit-normalized: A = psi_1, B = -psi_2
    const auto basis = EigenBasis::build(4);
    EXPECT_NEAR(f.kappa0(0.3, 0.0), basis.psi(1, 0.3), 1e-12);
    EXPECT_NEAR(f.kappa0(0.3, 0.25), basis.psi(2, 0.3), 1e-12);
}

TEST(Config, FileErrors) {
    const auto p = scratch("broken.json").string();
    {
        std::ofstream out(p);
        out << "{ \"case\": ";
    }
    EXPECT_THROW(parse_config_file(p), ConfigError);
    EXPECT_THROW(parse_config_file(scratch("absent.json").string()), ConfigError);
}

TEST(Manifest, RecordsDigestsAndSchema) {
    const auto p = scratch("abc.txt").string();
    {
        std::ofstream out(p, std::ios::binary);
        out << "abc";
    }
    // FIPS 180-2 test vector for "abc".
    EXPECT_EQ(sha256_file(p), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    RunManifest m;
    m.command = "simulate";
    m.seed = 7;
    m.add_input(p);
    m.outputs = {"out.csv"};
    const auto j = m.to_json();
    EXPECT_EQ(j["schema"], kManifestSchema);
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(j["inputs"][p], sha256_file(p));
}

TEST(Report, WritesTablesAndJson) {
    StudyReport rep;
    rep.study = "unit";
    rep.tables.push_back({"t1", {"x", "y"}, {{1.0, 2.0}, {3.0, 1.0 / 3}}, {}});
    rep.checks.push_back(make_check("y small", 0.5, 0.0, 1.0));
    const auto dir = scratch("report").string();
    const auto files = write_report(dir, rep);
    ASSERT_EQ(files.size(), 2u);
    std::ifstream in(files[1]);
    const Json j = Json::parse(in);
    EXPECT_EQ(j["schema"], kReportSchema);
    EXPECT_TRUE(j["passed"].get<bool>());
    std::ifstream csv(files[0]);
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    EXPECT_EQ(header, "x,y");
    EXPECT_EQ(row, "1,2");
}
