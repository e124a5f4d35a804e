// End-to-end checks of the bgreg command-line surface. The binary path comes
// in through the BGREG_CLI_PATH compile definition.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <json.hpp>

#include "bgreg/eval.hpp"
#include "bgreg/field_ops.hpp"
#include "bgreg/metaimage.hpp"
#include "bgreg/svf_exp.hpp"
#include "bgreg/synth.hpp"
#include "support/helpers.hpp"

using namespace bgreg;
using namespace bgreg::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("bgreg_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string &args) {
    const std::string cmd = std::string(BGREG_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

}  // namespace

TEST_CASE("register with identical inputs reports zero legs") {
    TempDir tmp;
    const ScalarImage img = make_synthetic_base(make_grid({32, 32}));
    const std::string p = (tmp.path / "img.mha").string();
    write_metaimage(p, img);
    const fs::path out = tmp.path / "run";
    CHECK(run("register " + p + " " + p + " --out " + out.string()) == 0);

    const json report = json::parse(slurp(out / "report.json"));
    CHECK(report["legs"].size() == 0);
    CHECK(report["total_length"].get<double>() == 0.0);
    CHECK(fs::exists(out / "manifest.json"));
    // the manifest names only files that exist
    const json manifest = json::parse(slurp(out / "manifest.json"));
    for (const auto &o : manifest["outputs"]) CHECK(fs::exists(o.get<std::string>()));
}

TEST_CASE("register on a synth pair succeeds and metric reads back the length") {
    TempDir tmp;
    const ScalarImage base = make_synthetic_base(make_grid({48, 48}));
    SynthSpec spec;
    spec.n_control_points = 5;
    spec.degree = 3;
    spec.seed = 9;
    spec.amplitude_scale = 1.0;
    const SynthPair pair = make_pair(base, spec);
    const std::string mp = (tmp.path / "moving.mha").string();
    const std::string fp = (tmp.path / "fixed.mha").string();
    write_metaimage(mp, pair.moving);
    write_metaimage(fp, pair.fixed);

    // single-level fine-scale legs resolve these small bumps quickly
    const std::string cfgp = (tmp.path / "cfg.json").string();
    std::ofstream(cfgp) << R"({"iterations_per_level": 50, "pyramid_levels": 1,
                               "sigma_fluid": 0.5, "sigma_diffusion": 0.5,
                               "max_legs": 4})";

    const fs::path out = tmp.path / "run";
    CHECK(run("register " + mp + " " + fp + " --config " + cfgp + " --out " +
              out.string()) == 0);

    const json report = json::parse(slurp(out / "report.json"));
    CHECK(report["legs"].size() >= 1);
    CHECK(report["final_energy"].get<double>() <
          0.5 * report["initial_energy"].get<double>());

    // metric subcommand agrees with the report
    const std::string metric_out = (tmp.path / "metric.txt").string();
    const std::string cmd = std::string(BGREG_CLI_PATH) + " metric " +
                            (out / "report.json").string() + " > " + metric_out;
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(std::stod(slurp(metric_out)) ==
          doctest::Approx(report["total_length"].get<double>()));
}

TEST_CASE("register with mismatched dims exits 3") {
    TempDir tmp;
    const std::string a = (tmp.path / "a.mha").string();
    const std::string b = (tmp.path / "b.mha").string();
    write_metaimage(a, make_synthetic_base(make_grid({16, 16})));
    write_metaimage(b, make_synthetic_base(make_grid({16, 18})));
    CHECK(run("register " + a + " " + b + " --out " + (tmp.path / "o").string()) == 3);
}

TEST_CASE("register with a malformed input exits 2") {
    TempDir tmp;
    const std::string bad = (tmp.path / "bad.mha").string();
    std::ofstream(bad) << "not a metaimage";
    CHECK(run("register " + bad + " " + bad + " --out " + (tmp.path / "o").string()) == 2);
}

TEST_CASE("apply with the identity transform is byte-identical payload") {
    TempDir tmp;
    const ScalarImage img = make_synthetic_base(make_grid({24, 24}));
    const std::string ip = (tmp.path / "img.mha").string();
    write_metaimage(ip, img);
    const std::string tp = (tmp.path / "id.mha").string();
    write_metaimage(tp, identity_transform(img.grid).disp);
    const std::string op = (tmp.path / "out.mha").string();
    CHECK(run("apply " + ip + " " + tp + " -o " + op) == 0);
    CHECK(slurp(ip) == slurp(op));
}

TEST_CASE("apply then apply the inverse is close to a roundtrip") {
    TempDir tmp;
    const GridInfo g = make_grid({48, 48});
    const ScalarImage img = make_synthetic_base(g);
    const VectorField v = smooth_random_field(g, 3.0, 2.0, 3);
    const std::string ip = (tmp.path / "img.mha").string();
    const std::string vp = (tmp.path / "svf.mha").string();
    write_metaimage(ip, img);
    write_metaimage(vp, v);

    // forward displacement from the SVF, inverse via the invert subcommand
    const std::string fwd = (tmp.path / "fwd.mha").string();
    write_metaimage(fwd, exp_svf(v).disp);
    const std::string inv = (tmp.path / "inv.mha").string();
    CHECK(run("invert " + vp + " -o " + inv) == 0);

    const std::string w1 = (tmp.path / "w1.mha").string();
    const std::string w2 = (tmp.path / "w2.mha").string();
    CHECK(run("apply " + ip + " " + fwd + " -o " + w1) == 0);
    CHECK(run("apply " + w1 + " " + inv + " -o " + w2) == 0);

    const ScalarImage roundtrip = read_scalar_metaimage(w2);
    double range = 0.0;
    for (double d : img.data) range = std::max(range, std::abs(d));
    CHECK(mse(roundtrip, img) < 1e-3 * range * range);
}

TEST_CASE("apply --labels rejects a non-integer image") {
    TempDir tmp;
    const GridInfo g = make_grid({8, 8});
    const std::string ip = (tmp.path / "img.mha").string();
    write_metaimage(ip, make_synthetic_base(g));  // fractional intensities
    const std::string tp = (tmp.path / "id.mha").string();
    write_metaimage(tp, identity_transform(g).disp);
    CHECK(run("apply " + ip + " " + tp + " --labels -o " +
              (tmp.path / "o.mha").string()) == 2);
}

TEST_CASE("synth with a fixed seed is reproducible byte-for-byte") {
    TempDir tmp;
    const std::string spec = (tmp.path / "spec.json").string();
    std::ofstream(spec) << R"({"n_control_points": 6, "degree": 3, "seed": 5})";
    const fs::path o1 = tmp.path / "s1";
    const fs::path o2 = tmp.path / "s2";
    CHECK(run("synth --spec " + spec + " --out " + o1.string()) == 0);
    CHECK(run("synth --spec " + spec + " --out " + o2.string()) == 0);
    CHECK(slurp(o1 / "fixed.mha") == slurp(o2 / "fixed.mha"));
    CHECK(slurp(o1 / "truth_svf.mha") == slurp(o2 / "truth_svf.mha"));
}

TEST_CASE("metric on an empty-legs report prints 0") {
    TempDir tmp;
    const std::string rp = (tmp.path / "report.json").string();
    std::ofstream(rp) << R"({"legs": [], "leg_lengths": []})";
    const std::string out = (tmp.path / "m.txt").string();
    const std::string cmd =
        std::string(BGREG_CLI_PATH) + " metric " + rp + " > " + out;
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(std::stod(slurp(out)) == 0.0);
}

TEST_CASE("evaluate on a registered synth pair writes the pinned report schema") {
    TempDir tmp;
    const ScalarImage base = make_synthetic_base(make_grid({48, 48}));
    SynthSpec spec;
    spec.n_control_points = 5;
    spec.degree = 3;
    spec.seed = 13;
    spec.amplitude_scale = 1.0;
    const SynthPair pair = make_pair(base, spec);
    const std::string mp = (tmp.path / "moving.mha").string();
    const std::string fp = (tmp.path / "fixed.mha").string();
    write_metaimage(mp, pair.moving);
    write_metaimage(fp, pair.fixed);
    const std::string cfgp = (tmp.path / "cfg.json").string();
    std::ofstream(cfgp) << R"({"iterations_per_level": 50, "pyramid_levels": 1,
                               "sigma_fluid": 0.5, "sigma_diffusion": 0.5,
                               "max_legs": 3})";
    const fs::path out = tmp.path / "run";
    REQUIRE(run("register " + mp + " " + fp + " --config " + cfgp + " --out " +
                out.string()) == 0);

    const std::string ep = (tmp.path / "eval.json").string();
    CHECK(run("evaluate --moving " + mp + " --fixed " + fp + " --report " +
              (out / "report.json").string() + " -o " + ep) == 0);
    const json rep = json::parse(slurp(ep));
    for (const char *key : {"mse_before", "mse_after", "dice_per_label", "jac_min",
                            "jac_mean", "jac_negative_fraction",
                            "roundtrip_max_disp", "metric"})
        CHECK(rep.contains(key));
    CHECK(rep["mse_after"].get<double>() < rep["mse_before"].get<double>());
    CHECK(rep["jac_negative_fraction"].get<double>() == 0.0);
}
