#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the CLI with stdout captured and stderr diverted to a temp file.
Result run(const std::string& args) {
    static int counter = 0;
    const fs::path err = fs::temp_directory_path() /
                         ("cavity_gate_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".err");
    const std::string cmd = std::string(CAVITY_GATE_EXE) + " " + args + " 2>" + quote(err.string());
    Result r{-1, "", ""};
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read_file(err);
    fs::remove(err);
    return r;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("cavity_gate_cli_dir_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

fs::path write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

const char* yb_ini =
    "[cavity]\n"
    "gamma = 596 hz\n"
    "cooperativity = 50000\n"
    "g_over_kappa = 0.1\n"
    "[decoherence]\n"
    "t2 = 6.6 ms\n"
    "optical_dephasing = 9000 s_inv\n"
    "[scheme.simple]\n"
    "delta_eg = 0.2 ghz\n";

// A figure CSV: "# " header parsed as INI, then the column header and rows.
struct Csv {
    boost::property_tree::ptree header;
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

Csv read_csv(const fs::path& p) {
    Csv csv;
    std::ifstream in(p);
    std::string line, header;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            header += line.substr(2) + "\n";
        } else if (csv.names.empty()) {
            csv.names = split(line, ',');
        } else if (!line.empty()) {
            csv.rows.push_back(split(line, ','));
        }
    }
    std::istringstream hs(header);
    boost::property_tree::read_ini(hs, csv.header);
    return csv;
}

std::string axis_set(const Csv& csv, const std::string& axis, const std::string& value) {
    const auto& a = csv.header.get_child("axis");
    const std::string key = a.get<std::string>(axis + "_key");
    const std::string unit = a.get<std::string>(axis + "_unit", "");
    return quote(key + "=" + value + (unit.empty() ? "" : " " + unit));
}

void check_round_trip(const std::string& figure) {
    TempDir dir;
    const Result gen = run("figure " + figure + " --out " + quote(dir.str()));
    ASSERT_EQ(gen.code, 0) << gen.err;
    const fs::path path = dir.path() / (figure + ".csv");
    const Csv csv = read_csv(path);
    ASSERT_FALSE(csv.rows.empty());

    const auto& axis = csv.header.get_child("axis");
    std::vector<std::string> axes{"x"};
    if (axis.get_optional<std::string>("y")) axes.push_back("y");
    for (std::size_t i = 0; i < axes.size(); ++i) ASSERT_EQ(csv.names[i], axis.get<std::string>(axes[i]));

    const std::size_t n = csv.rows.size();
    std::vector<std::size_t> picks{0, n / 3, (2 * n) / 3, n - 1};
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    for (std::size_t r : picks) {
        const auto& row = csv.rows[r];
        ASSERT_EQ(row.size(), csv.names.size());
        std::string sets;
        for (std::size_t i = 0; i < axes.size(); ++i) sets += " " + axis_set(csv, axes[i], row[i]);
        for (std::size_t col = axes.size(); col < row.size(); ++col) {
            if (row[col] == "nan") continue;
            // "<scheme> <method> <field>[; key=value]..."
            const auto parts = split(csv.header.get<std::string>(
                                         boost::property_tree::ptree::path_type("columns/" + csv.names[col], '/')),
                                     ';');
            const auto words = split(trim(parts[0]), ' ');
            ASSERT_EQ(words.size(), 3u) << csv.names[col];
            std::string overrides;
            for (std::size_t k = 1; k < parts.size(); ++k) overrides += " " + quote(trim(parts[k]));
            const Result ev = run("evaluate --config " + quote(path.string()) + " --scheme " + words[0] + " --method " +
                               words[1] + " --set" + sets + overrides);
            ASSERT_EQ(ev.code, 0) << figure << " " << csv.names[col] << ": " << ev.err;
            const double expected = std::stod(row[col]);
            const double got = json::parse(ev.out).at(words[2]).get<double>();
            EXPECT_NEAR(got, expected, 1e-9 * std::max(1.0, std::abs(expected)))
                << figure << " row " << r << " " << csv.names[col];
        }
    }
}

} // namespace

class FigureRoundTrip : public ::testing::TestWithParam<std::string> {};

TEST_P(FigureRoundTrip, RowsReproduceThroughEvaluate) { check_round_trip(GetParam()); }

INSTANTIATE_TEST_SUITE_P(Figures, FigureRoundTrip,
                         ::testing::Values("fig2a", "fig2b", "fig2c", "fig4", "fig6a", "fig6b", "fig7", "fig8a",
                                           "fig8b"));

TEST(Evaluate, YbConfigPrintsJsonResult) {
    TempDir dir;
    const fs::path ini = write_text(dir.path() / "yb.ini", yb_ini);
    const Result r = run("evaluate --scheme simple --method max --config " + quote(ini.string()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.err.empty()) << r.err;
    const json j = json::parse(r.out);
    for (const char* key : {"config_hash", "fidelity", "gate_time_gamma", "gate_time_s", "method", "schema_version",
                            "scheme", "success_probability", "warnings"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["scheme"], "simple");
    EXPECT_NEAR(j["fidelity"].get<double>(), 0.952, 1e-3);
    EXPECT_NEAR(j["gate_time_s"].get<double>(), 7.5e-6, 0.05e-6);
}

TEST(Evaluate, NumericAndLindbladAgreeForExchange) {
    TempDir dir;
    const fs::path ini = write_text(dir.path() / "yb.ini", std::string(yb_ini) + "gate_time = 0.0281 gamma_inv\n");
    const auto fid = [&](const std::string& method) {
        const Result r = run("evaluate --scheme simple --method " + method + " --config " + quote(ini.string()));
        EXPECT_EQ(r.code, 0) << r.err;
        return json::parse(r.out)["fidelity"].get<double>();
    };
    const double numeric = fid("numeric");
    const double lindblad = fid("lindblad");
    EXPECT_GE(lindblad, numeric - 1e-9);
    EXPECT_LT(lindblad - numeric, 0.03);
}

TEST(Evaluate, SameConfigSameHash) {
    TempDir dir;
    const fs::path a = write_text(dir.path() / "a.ini", yb_ini);
    const fs::path b = write_text(dir.path() / "b.ini",
                                  "[scheme.simple]\ndelta_eg = 0.2 ghz\n[decoherence]\noptical_dephasing = 9000 "
                                  "s_inv\nt2 = 6.6 ms\n[cavity]\ng_over_kappa = 0.1\ncooperativity = 50000\ngamma = "
                                  "596 hz\n");
    const Result ra = run("evaluate --scheme simple --method max --config " + quote(a.string()));
    const Result rb = run("evaluate --scheme simple --method max --config " + quote(b.string()));
    ASSERT_EQ(ra.code, 0);
    ASSERT_EQ(rb.code, 0);
    EXPECT_EQ(ra.out, rb.out);
}

TEST(Errors, MalformedValueNamesKey) {
    TempDir dir;
    const fs::path ini = write_text(dir.path() / "bad.ini", std::string(yb_ini) + "Delta = abc\n");
    const Result r = run("evaluate --scheme simple --config " + quote(ini.string()));
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(r.err.find("scheme.simple/Delta"), std::string::npos) << r.err;
}

TEST(Errors, UnknownKeyNamesKey) {
    TempDir dir;
    const fs::path ini = write_text(dir.path() / "bad.ini", std::string(yb_ini) + "[cavity.extra]\nfoo = 1\n");
    const Result r = run("evaluate --scheme simple --config " + quote(ini.string()));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("cavity.extra"), std::string::npos) << r.err;
}

TEST(Errors, BadOverrideNamesKey) {
    TempDir dir;
    const fs::path ini = write_text(dir.path() / "yb.ini", yb_ini);
    const Result r = run("evaluate --scheme simple --config " + quote(ini.string()) + " --set 'cavity/gamma=5 parsecs'");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("cavity/gamma"), std::string::npos) << r.err;
}

TEST(Errors, MissingConfigFile) {
    const Result r = run("evaluate --scheme simple --config /nonexistent/cavity.ini");
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(r.out.empty());
}

TEST(Errors, UsageErrors) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("bogus").code, 1);
    EXPECT_EQ(run("evaluate --config x.ini").code, 1);
    EXPECT_EQ(run("figure fig7").code, 1);
}

TEST(Errors, ScatteringHasNoMasterEquation) {
    TempDir dir;
    const fs::path ini =
        write_text(dir.path() / "s.ini", std::string(yb_ini) + "[scheme.scattering]\ngate_time = 1 gamma_inv\n");
    const Result r = run("evaluate --scheme scattering --method lindblad --config " + quote(ini.string()));
    EXPECT_EQ(r.code, 3);
    EXPECT_TRUE(r.out.empty());
    EXPECT_FALSE(r.err.empty());
}

TEST(Errors, UnwritableOutputDirectory) {
    TempDir dir;
    const fs::path blocker = write_text(dir.path() / "file", "x");
    const Result r = run("figure fig7 --out " + quote((blocker / "sub").string()));
    EXPECT_EQ(r.code, 4);
    EXPECT_FALSE(r.err.empty());
}

TEST(Figure, ManifestListsOutputs) {
    TempDir dir;
    const Result r = run("figure fig7 fig8a --out " + quote(dir.str()));
    ASSERT_EQ(r.code, 0) << r.err;
    const json m = json::parse(read_file(dir.path() / "manifest.json"));
    EXPECT_EQ(m["schema_version"], 1);
    EXPECT_EQ(m["command"], "figure fig7 fig8a");
    EXPECT_EQ(m["config_hash"].get<std::string>().size(), 16u);
    EXPECT_TRUE(m.contains("version"));
    EXPECT_TRUE(m.contains("timestamp"));
    std::vector<std::string> outputs = m["outputs"];
    ASSERT_EQ(outputs.size(), 3u);
    for (const auto& o : outputs) EXPECT_TRUE(fs::exists(o)) << o;
}

TEST(Figure, OutputIndependentOfThreadCount) {
    TempDir one, two;
    ASSERT_EQ(run("figure fig4 fig6a --threads 1 --out " + quote(one.str())).code, 0);
    ASSERT_EQ(run("figure fig4 fig6a --threads 3 --out " + quote(two.str())).code, 0);
    for (const char* f : {"fig4.csv", "fig6a.csv"}) EXPECT_EQ(read_file(one.path() / f), read_file(two.path() / f)) << f;
}

TEST(Figure, StdoutCarriesNoData) {
    TempDir dir;
    const Result r = run("figure fig7 --out " + quote(dir.str()));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.find("e-0"), std::string::npos);
    EXPECT_EQ(r.err.find("e-0"), std::string::npos);
}

namespace {

std::map<std::string, double> casestudy_fidelities(const std::string& args) {
    const Result r = run("casestudy " + args);
    EXPECT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    std::map<std::string, double> f;
    for (const auto& [name, v] : j.at("schemes").items()) f[name] = v.at("fidelity").get<double>();
    EXPECT_EQ(f.size(), 3u);
    return f;
}

} // namespace

TEST(CaseStudy, QuotedValues) {
    const auto f = casestudy_fidelities("");
    EXPECT_NEAR(f.at("scattering"), 0.98, 0.001);
    EXPECT_NEAR(f.at("simple"), 0.952, 0.001);
    EXPECT_NEAR(f.at("raman"), 0.93, 0.001);
}

TEST(CaseStudy, LongerCoherenceHelpsEveryScheme) {
    const auto base = casestudy_fidelities("");
    const auto better = casestudy_fidelities("--T2 30");
    for (const auto& [name, f] : base) EXPECT_GT(better.at(name), f) << name;
}

TEST(CaseStudy, LowerCooperativityHurtsEveryScheme) {
    const auto base = casestudy_fidelities("");
    const auto worse = casestudy_fidelities("--cooperativity 1000");
    for (const auto& [name, f] : base) EXPECT_LT(worse.at(name), f) << name;
}

TEST(CaseStudy, WritesResultAndManifest) {
    TempDir dir;
    const Result r = run("casestudy --out " + quote(dir.str()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(read_file(dir.path() / "casestudy.json")), json::parse(r.out));
    EXPECT_EQ(json::parse(read_file(dir.path() / "manifest.json"))["command"], "casestudy");
}

TEST(Sweep, RefinedMaximumBeatsGrid) {
    TempDir dir;
    const fs::path ini = write_text(dir.path() / "c.ini",
                                    "[cavity]\ngamma = 1\ncooperativity = 8000\ng_over_kappa = 0.1\n");
    const Result r = run("sweep --scheme simple --method numeric --config " + quote(ini.string()) +
                      " --axis 'x=scheme.simple/Delta:10:1000:21:log:per_kappa' --refine --out " +
                      quote((dir.path() / "out").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    const Csv csv = read_csv(dir.path() / "out" / "sweep.csv");
    ASSERT_EQ(csv.rows.size(), 21u);
    double grid_max = 0.0;
    for (const auto& row : csv.rows) grid_max = std::max(grid_max, std::stod(row[1]));
    const json j = json::parse(r.out);
    EXPECT_GE(j["value"].get<double>(), grid_max);
    EXPECT_NEAR(j["coords"]["x"].get<double>(), 44.7, 0.05 * 44.7);
    EXPECT_TRUE(fs::exists(dir.path() / "out" / "manifest.json"));
}

TEST(Sweep, MalformedAxisIsUsageOrConfigError) {
    TempDir dir;
    const fs::path ini = write_text(dir.path() / "c.ini", "[cavity]\ngamma = 1\ncooperativity = 8000\ng_over_kappa = 0.1\n");
    const Result r = run("sweep --scheme simple --config " + quote(ini.string()) + " --axis 'x=scheme.simple/Delta:10' --out " +
                      quote((dir.path() / "out").string()));
    EXPECT_TRUE(r.code == 1 || r.code == 2) << r.code;
    EXPECT_FALSE(r.err.empty());
}
