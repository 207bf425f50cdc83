#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "cpflow/angles.hpp"
#include "cpflow/cli.hpp"
#include "cpflow/curvature.hpp"
#include "cpflow/fixtures.hpp"
#include "cpflow/io.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

using namespace cpflow;
using nlohmann::json;

namespace
{

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test
{
protected:
    TempDir dir;

    Outcome run(std::vector<std::string> args)
    {
        args.insert(args.begin(), "cpflow");
        bool has_manifest = false;
        for (const auto& a : args) {
            has_manifest = has_manifest || a == "--manifest";
        }
        if (!has_manifest && args.size() > 1 && args[1].rfind("--", 0) != 0) {
            args.push_back("--manifest");
            args.push_back(dir.file("manifest.json"));
        }
        std::vector<const char*> argv;
        for (const auto& a : args) {
            argv.push_back(a.c_str());
        }
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return {code, out.str(), err.str()};
    }

    json manifest() { return io::read_json(dir.file("manifest.json")); }

    std::string write(const std::string& name, const json& doc)
    {
        io::write_json(dir.file(name), doc);
        return dir.file(name);
    }

    std::string surface(const SurfaceComplex& c, Background bg, const InversiveDistances& inv,
                        const std::optional<Eigen::VectorXd>& radii, const std::string& name = "surface.json")
    {
        io::SurfaceFile s{c, bg, inv, radii, false};
        return write(name, io::surface_to_json(s));
    }
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json tetrahedron_json()
{
    return json::parse(R"({"format": 1, "background": "euclidean",
        "faces": [[0,1,2],[0,3,1],[0,2,3],[1,3,2]], "inversive": 0, "radii": [1,1,1,1]})");
}

}  // namespace

TEST_F(CliTest, CurvatureTetrahedron)
{
    const auto path = write("tet.json", tetrahedron_json());
    const auto res = run({"curvature", path, "--json"});
    ASSERT_EQ(res.code, 0) << res.err;
    const json report = json::parse(res.out);
    for (const auto& k : report["curvature"]) {
        EXPECT_NEAR(k.get<double>(), oracle::kPi, 1e-14);
    }
    EXPECT_NEAR(report["gauss_bonnet_defect"].get<double>(), 0.0, 1e-12);
    EXPECT_TRUE(report["in_omega"].get<bool>());

    const auto table = run({"curvature", path});
    EXPECT_NE(table.out.find("3.14159265358979"), std::string::npos);
    EXPECT_NE(table.out.find("in_omega yes"), std::string::npos);
}

TEST_F(CliTest, CurvatureFlagsDegenerateFaces)
{
    json doc = tetrahedron_json();
    doc["radii"] = json::array({1e-8, 1, 1, 1});
    doc["inversive"] = json::parse(R"([{"edge": [1, 2], "value": 1.5}])");
    doc["inversive_default"] = 0.0;
    const auto path = write("deg.json", doc);
    const auto classical = run({"curvature", path});
    EXPECT_EQ(classical.code, 3);
    EXPECT_EQ(manifest()["status"], "domain_error");
    const auto res = run({"curvature", path, "--extended", "--json"});
    ASSERT_EQ(res.code, 0) << res.err;
    const json report = json::parse(res.out);
    EXPECT_FALSE(report["in_omega"].get<bool>());
    ASSERT_EQ(report["degenerate_faces"].size(), 1u);
    EXPECT_EQ(report["degenerate_faces"][0], 0);
    EXPECT_NEAR(report["gauss_bonnet_defect"].get<double>(), 0.0, 1e-12);
}

TEST_F(CliTest, MissingRadiiIsParseError)
{
    json doc = tetrahedron_json();
    doc.erase("radii");
    const auto res = run({"curvature", write("nor.json", doc)});
    EXPECT_EQ(res.code, 2);
    EXPECT_NE(res.err.find("radii"), std::string::npos);
    EXPECT_EQ(manifest()["status"], "usage_error");
}

TEST_F(CliTest, UsageErrors)
{
    EXPECT_EQ(run({"bogus"}).code, 2);
    const auto path = write("tet.json", tetrahedron_json());
    EXPECT_EQ(run({"flow", path, "--dt", "-1"}).code, 2);
    EXPECT_EQ(run({"flow", path, "--variant", "sideways"}).code, 2);
    EXPECT_EQ(run({"curvature", dir.file("missing.json")}).code, 2);
    EXPECT_EQ(run({"gb", "--help"}).code, 0);
}

TEST_F(CliTest, GaussBonnet)
{
    const auto res = run({"gb", write("tet.json", tetrahedron_json())});
    ASSERT_EQ(res.code, 0);
    EXPECT_LE(std::abs(std::stod(res.out)), 1e-12);
}

TEST_F(CliTest, FlowRigidityRoundTrip)
{
    const auto c = fixtures::octahedron();
    std::mt19937_64 rng(81);
    const auto inv = oracle::random_inversive(rng, c.edge_count(), 0.0, 1.0);
    const Eigen::VectorXd rbar = oracle::random_radii(rng, 6, 0.3, 2.0);
    const Eigen::VectorXd target = oracle::curvature(c, Background::hyperbolic, inv, rbar);
    const auto path = surface(c, Background::hyperbolic, inv, oracle::random_radii(rng, 6, 0.3, 3.0));
    const auto tpath = write("target.json", io::target_to_json(target));
    const auto res = run({"flow", path, "--variant", "prescribed", "--target-file", tpath, "--trace",
                          dir.file("trace.csv"), "--radii-out", dir.file("final.json")});
    ASSERT_EQ(res.code, 0) << res.err;
    const auto final_surface = io::load_surface(dir.file("final.json"));
    EXPECT_LE(oracle::max_abs_diff(*final_surface.radii, rbar), 1e-6);
    const json m = manifest();
    EXPECT_EQ(m["command"], "flow");
    EXPECT_EQ(m["status"], "ok");
    EXPECT_EQ(m["exit_code"], 0);
    EXPECT_EQ(m["tool_version"], kToolVersion);
    EXPECT_EQ(m["outputs"]["trace"], dir.file("trace.csv"));
    EXPECT_EQ(m["outputs"]["radii"], dir.file("final.json"));
    EXPECT_EQ(m["input_digest"], "sha256:" + io::sha256_file(path));
    EXPECT_EQ(m["config"]["variant"], "prescribed");

    std::ifstream csv(dir.file("trace.csv"));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "t,u0,u1,u2,u3,u4,u5,K0,K1,K2,K3,K4,K5,M,m,potential");
    std::string row;
    while (std::getline(csv, row)) {
        EXPECT_EQ(std::count(row.begin(), row.end(), ','), 15);
    }
}

TEST_F(CliTest, FlowClassicalLeavesOmega)
{
    const auto c = fixtures::tetrahedron();
    InversiveDistances inv(6, 0.0);
    inv[c.edge_index(1, 2)] = 3.0;
    Eigen::VectorXd r = Eigen::VectorXd::Ones(4);
    r[0] = degenerate_threshold_radius(1.0, 1.0, 0.0, 0.0, 3.0) * 1.05;
    const auto path = surface(c, Background::hyperbolic, inv, r);
    // target curvature of a metric on the far side of the degeneration threshold
    Eigen::VectorXd r_target = r;
    r_target[0] /= 2.1;
    const auto tpath = write(
        "target.json", io::target_to_json(extended_curvature(c, PackingMetric{Background::hyperbolic, inv, r_target}).values));
    const auto res = run({"flow", path, "--variant", "classical", "--dt", "0.01", "--target-file", tpath});
    EXPECT_EQ(res.code, 5) << res.err;
    const json m = manifest();
    EXPECT_EQ(m["flow_status"], "left_omega");
    ASSERT_TRUE(m.contains("exit_time"));
    EXPECT_GT(m["exit_time"].get<double>(), 0.0);
}

TEST_F(CliTest, FlowMaxTime)
{
    const auto c = fixtures::tetrahedron();
    const auto path = surface(c, Background::hyperbolic, InversiveDistances(6, 0.0), Eigen::VectorXd::Ones(4));
    const auto res = run({"flow", path, "--max-time", "0.5", "--no-potential"});
    EXPECT_EQ(res.code, 4);
    EXPECT_EQ(manifest()["status"], "incomplete");
}

TEST_F(CliTest, FlowPrescribedNeedsTarget)
{
    const auto path = write("tet.json", tetrahedron_json());
    const auto res = run({"flow", path, "--variant", "prescribed"});
    EXPECT_EQ(res.code, 2);
    EXPECT_NE(res.err.find("target"), std::string::npos);
}

TEST_F(CliTest, SolveExamples)
{
    const auto c = fixtures::genus_two();
    std::mt19937_64 rng(82);
    const auto inv = oracle::random_inversive(rng, c.edge_count(), 0.0, 1.0);
    const Eigen::VectorXd rbar = oracle::random_radii(rng, 15, 0.3, 2.0);
    const Eigen::VectorXd target = oracle::curvature(c, Background::hyperbolic, inv, rbar);
    const auto tpath = write("target.json", io::target_to_json(target));

    // recover a known metric
    const auto start = surface(c, Background::hyperbolic, inv, oracle::random_radii(rng, 15, 0.3, 3.0));
    auto res = run({"solve", start, "--target-file", tpath, "--tol", "1e-12", "--radii-out", dir.file("sol.json"),
                    "--report", dir.file("report.json")});
    ASSERT_EQ(res.code, 0) << res.err;
    EXPECT_LE(oracle::max_abs_diff(*io::load_surface(dir.file("sol.json")).radii, rbar), 1e-8);
    EXPECT_EQ(io::read_json(dir.file("report.json"))["status"], "converged");

    // start at the solution
    res = run({"solve", surface(c, Background::hyperbolic, inv, rbar, "at.json"), "--target-file", tpath, "--json"});
    ASSERT_EQ(res.code, 0);
    EXPECT_EQ(json::parse(res.out)["iterations"], 0);

    // inadmissible: zero curvature on the tetrahedron
    const auto tet = surface(fixtures::tetrahedron(), Background::hyperbolic, InversiveDistances(6, 0.0),
                             Eigen::VectorXd::Ones(4), "tet.json");
    res = run({"solve", tet, "--max-iter", "40"});
    EXPECT_TRUE(res.code == 4 || res.code == 5) << res.code;
    EXPECT_NE(manifest()["solve_status"], "converged");
}

TEST_F(CliTest, CheckExamples)
{
    const auto c = fixtures::tetrahedron();
    auto res = run({"check", surface(c, Background::hyperbolic, InversiveDistances(6, 0.0), Eigen::VectorXd::Ones(4))});
    ASSERT_EQ(res.code, 0) << res.err;
    json report = json::parse(res.out);
    ASSERT_EQ(report["reports"].size(), 3u);
    EXPECT_EQ(report["reports"][1]["kind"], "subset_curvature_lower_bound");
    EXPECT_TRUE(report["reports"][1]["verdict"].get<bool>());
    EXPECT_EQ(report["reports"][1]["records"].size(), 14u);

    // tangent circles: single vertices pass the zero-curvature condition
    res = run({"check", surface(c, Background::hyperbolic, InversiveDistances(6, 1.0), std::nullopt, "t1.json"),
               "--subset-cap", "1"});
    ASSERT_EQ(res.code, 0) << res.err;
    report = json::parse(res.out);
    ASSERT_EQ(report["reports"].size(), 1u);
    EXPECT_TRUE(report["reports"][0]["verdict"].get<bool>());
    EXPECT_EQ(report["reports"][0]["records"].size(), 4u);

    // explicit subset with empty link fails
    const auto oct = fixtures::octahedron();
    write("subsets.json", json::parse(R"({"format": 1, "subsets": [[0, 1, 2, 3, 4]]})"));
    res = run({"check", surface(oct, Background::hyperbolic, InversiveDistances(12, 0.2), std::nullopt, "o.json"),
               "--subsets-file", dir.file("subsets.json"), "--report", dir.file("check.json")});
    ASSERT_EQ(res.code, 0) << res.err;
    report = io::read_json(dir.file("check.json"));
    EXPECT_FALSE(report["reports"][0]["verdict"].get<bool>());
    EXPECT_EQ(report["reports"][0]["failures"], 1);
}

TEST_F(CliTest, EveryRunWritesOneManifest)
{
    const auto path = write("tet.json", tetrahedron_json());
    std::filesystem::remove(dir.file("manifest.json"));
    run({"gb", path});
    EXPECT_TRUE(std::filesystem::exists(dir.file("manifest.json")));
    std::filesystem::remove(dir.file("manifest.json"));
    run({"flow", path, "--variant", "nope"});
    EXPECT_EQ(manifest()["status"], "usage_error");
    run({"gb", path, "--manifest", dir.file("other.json")});
    EXPECT_EQ(io::read_json(dir.file("other.json"))["command"], "gb");
}

TEST_F(CliTest, BinaryTracesAreByteIdentical)
{
    const auto c = fixtures::octahedron();
    std::mt19937_64 rng(83);
    const auto inv = oracle::random_inversive(rng, c.edge_count(), 0.0, 1.0);
    const auto path = surface(c, Background::hyperbolic, inv, oracle::random_radii(rng, 6, 0.3, 3.0));
    const auto tpath = write("target.json", io::target_to_json(oracle::curvature(
                                                c, Background::hyperbolic, inv, oracle::random_radii(rng, 6, 0.3, 3.0))));
    std::string traces[2];
    for (int i = 0; i < 2; ++i) {
        const std::string trace = dir.file("trace" + std::to_string(i) + ".csv");
        const std::string cmd = std::string(CPFLOW_BINARY) + " flow " + path + " --variant prescribed --target-file " + tpath +
                                " --trace " + trace +
                                " --manifest " + dir.file("m.json") + " > /dev/null";
        ASSERT_EQ(std::system(cmd.c_str()), 0);
        traces[i] = slurp(trace);
    }
    EXPECT_FALSE(traces[0].empty());
    EXPECT_EQ(traces[0], traces[1]);
}
