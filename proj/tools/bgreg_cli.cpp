// bgreg command-line tool: register image pairs along a broken geodesic,
// apply and invert transforms, compute the path-length metric, generate
// controlled synthetic deformations and evaluate registrations.
//
// Exit codes: 0 success, 2 malformed input, 3 dims mismatch,
// 4 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bgreg/broken_geodesic.hpp"
#include "bgreg/config.hpp"
#include "bgreg/eval.hpp"
#include "bgreg/field_ops.hpp"
#include "bgreg/metaimage.hpp"
#include "bgreg/parallel.hpp"
#include "bgreg/svf_exp.hpp"
#include "bgreg/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bgreg;

namespace {

constexpr const char *kVersion = "bgreg 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitMalformed = 2;
constexpr int kExitDimsMismatch = 3;
constexpr int kExitNumerical = 4;

struct DimsMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool g_verbose = false;

void vlog(const std::string &msg) {
    if (g_verbose) std::cerr << "[bgreg] " << msg << "\n";
}

void require_same_grid(const GridInfo &a, const GridInfo &b,
                       const std::string &what) {
    if (!a.same_grid(b)) throw DimsMismatch("dims/spacing mismatch: " + what);
}

// Written atomically at run end; names every output the command produced.
void write_manifest(const fs::path &dir, const std::string &command,
                    const json &config_echo, const std::vector<std::string> &inputs,
                    const std::vector<std::string> &outputs, double wall_s) {
    json m{{"command", command}, {"config", config_echo},
           {"inputs", inputs},   {"outputs", outputs},
           {"version", kVersion}, {"wall_time_s", wall_s},
           {"exit_status", 0}};
    const fs::path tmp = dir / "manifest.json.tmp";
    save_json_file(tmp.string(), m);
    fs::rename(tmp, dir / "manifest.json");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int cmd_register(const std::string &moving_path, const std::string &fixed_path,
                 const std::string &config_path, const std::string &out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const ScalarImage moving = read_scalar_metaimage(moving_path);
    const ScalarImage fixed = read_scalar_metaimage(fixed_path);
    require_same_grid(moving.grid, fixed.grid, moving_path + " vs " + fixed_path);
    DriverConfig cfg;
    if (!config_path.empty()) cfg = driver_config_from_json(load_json_file(config_path));

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    vlog("registering " + moving_path + " -> " + fixed_path);
    const BrokenGeodesic g = run_broken_geodesic(moving, fixed, cfg);
    vlog("accepted " + std::to_string(g.n_legs()) + " legs, metric " +
         fmt_double(g.total_length));

    std::vector<std::string> outputs;
    std::vector<std::string> leg_paths;
    for (int i = 0; i < g.n_legs(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "leg_%03d_svf.mha", i + 1);
        const std::string p = (dir / name).string();
        write_metaimage(p, g.legs[i]);
        leg_paths.push_back(p);
        outputs.push_back(p);
    }
    const std::string composed_path = (dir / "composed_disp.mha").string();
    write_metaimage(composed_path, g.composed.disp);
    outputs.push_back(composed_path);

    const std::string warped_path = (dir / "warped.mha").string();
    write_metaimage(warped_path, warp(moving, g.composed));
    outputs.push_back(warped_path);

    json report{{"legs", leg_paths},
                {"leg_lengths", g.leg_lengths},
                {"total_length", g.total_length},
                {"energy_history", g.energy_history},
                {"initial_energy", g.initial_energy},
                {"final_energy", g.final_energy},
                {"leg_wall_times_s", g.leg_wall_times_s},
                {"composed", composed_path},
                {"config", to_json(cfg)}};
    const std::string report_path = (dir / "report.json").string();
    save_json_file(report_path, report);
    outputs.push_back(report_path);

    std::ofstream csv(dir / "energy.csv");
    csv << "leg_index,leg_length,energy\n";
    for (int i = 0; i < g.n_legs(); ++i)
        csv << (i + 1) << "," << fmt_double(g.leg_lengths[i]) << ","
            << fmt_double(g.energy_history[i]) << "\n";
    outputs.push_back((dir / "energy.csv").string());

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, "register", to_json(cfg), {moving_path, fixed_path}, outputs,
                   wall);
    std::cout << "n_legs " << g.n_legs() << " metric " << fmt_double(g.total_length)
              << " final_mse " << fmt_double(g.final_energy) << "\n";
    return kExitOk;
}

int cmd_apply(const std::string &image_path, const std::string &transform_path,
              const std::string &scheme_flag, bool labels,
              const std::string &out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const VectorField disp = read_vector_metaimage(transform_path);
    const DisplacementTransform t{disp, TransformProvenance::Composed};

    if (labels) {
        const ScalarImage img = read_scalar_metaimage(image_path);
        require_same_grid(img.grid, disp.grid, image_path + " vs " + transform_path);
        LabelImage lab(img.grid);
        for (std::size_t i = 0; i < img.data.size(); ++i) {
            const double v = img.data[i];
            if (v < 0.0 || v != std::floor(v))
                throw IoError("--labels requires a non-negative integer-valued image: " +
                              image_path);
            lab.data[i] = static_cast<int>(v);
        }
        const LabelImage out = transfer_labels(lab, t);
        ScalarImage out_img(img.grid);
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out_img.data[i] = out.data[i];
        write_metaimage(out_path, out_img);
    } else {
        const ScalarImage img = read_scalar_metaimage(image_path);
        require_same_grid(img.grid, disp.grid, image_path + " vs " + transform_path);
        const Interp scheme = scheme_flag == "cubic" ? Interp::Cubic : Interp::Linear;
        write_metaimage(out_path, warp(img, t, scheme));
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(fs::path(out_path).parent_path().empty()
                       ? fs::path(".")
                       : fs::path(out_path).parent_path(),
                   "apply", json{{"scheme", scheme_flag}, {"labels", labels}},
                   {image_path, transform_path}, {out_path}, wall);
    return kExitOk;
}

int cmd_invert(const std::string &svf_path, const std::string &out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const VectorField v = read_vector_metaimage(svf_path);
    const DisplacementTransform inv = inverse_transform(v);
    write_metaimage(out_path, inv.disp);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(fs::path(out_path).parent_path().empty()
                       ? fs::path(".")
                       : fs::path(out_path).parent_path(),
                   "invert", json::object(), {svf_path}, {out_path}, wall);
    return kExitOk;
}

int cmd_metric(const std::string &report_path) {
    const json report = load_json_file(report_path);
    double total = 0.0;
    if (report.contains("leg_lengths"))
        for (const auto &l : report["leg_lengths"]) total += l.get<double>();
    std::cout << fmt_double(total) << "\n";
    return kExitOk;
}

int cmd_synth(const std::string &image_path, const std::string &spec_path,
              const std::string &out_dir, bool sweep, int sweep_seeds,
              const std::string &config_path) {
    const auto t0 = std::chrono::steady_clock::now();
    SynthSpec spec;
    if (!spec_path.empty()) spec = synth_spec_from_json(load_json_file(spec_path));

    ScalarImage base;
    if (image_path.empty()) {
        base = make_synthetic_base(make_grid({128, 128}));
        vlog("no base image given, generated a 128x128 synthetic base");
    } else {
        base = read_scalar_metaimage(image_path);
    }

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    std::vector<std::string> outputs;

    if (sweep) {
        DriverConfig cfg;
        if (!config_path.empty())
            cfg = driver_config_from_json(load_json_file(config_path));
        std::vector<int> degrees;
        for (int k = 1; k <= 10; ++k) degrees.push_back(k);
        const auto rows = metric_vs_degree(base, degrees, sweep_seeds, cfg, spec);
        const std::string csv_path = (dir / "sweep.csv").string();
        std::ofstream csv(csv_path);
        csv << sweep_to_csv(rows);
        outputs.push_back(csv_path);
    } else {
        const SynthPair pair = make_pair(base, spec);
        const std::string moving_path = (dir / "moving.mha").string();
        write_metaimage(moving_path, pair.moving);
        outputs.push_back(moving_path);
        const std::string fixed_path = (dir / "fixed.mha").string();
        write_metaimage(fixed_path, pair.fixed);
        outputs.push_back(fixed_path);
        const std::string svf_path = (dir / "truth_svf.mha").string();
        write_metaimage(svf_path, pair.ground_truth_svf);
        outputs.push_back(svf_path);
        const std::string disp_path = (dir / "truth_disp.mha").string();
        write_metaimage(disp_path, pair.ground_truth.disp);
        outputs.push_back(disp_path);
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, "synth", to_json(spec),
                   image_path.empty() ? std::vector<std::string>{}
                                      : std::vector<std::string>{image_path},
                   outputs, wall);
    return kExitOk;
}

// Rebuild a BrokenGeodesic from a register report: leg SVFs are the source
// of truth, the composed field is recomputed.
BrokenGeodesic load_geodesic(const json &report, const GridInfo &grid) {
    BrokenGeodesic g;
    g.composed = identity_transform(grid);
    for (const auto &p : report.at("legs")) {
        VectorField v = read_vector_metaimage(p.get<std::string>());
        require_same_grid(v.grid, grid, p.get<std::string>());
        g.composed = compose(g.composed, exp_svf(v));
        g.leg_lengths.push_back(v_norm(v));
        g.total_length += g.leg_lengths.back();
        g.legs.push_back(std::move(v));
    }
    if (report.contains("energy_history"))
        g.energy_history = report["energy_history"].get<std::vector<double>>();
    return g;
}

LabelImage load_labels(const std::string &path) {
    const ScalarImage img = read_scalar_metaimage(path);
    LabelImage lab(img.grid);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double v = img.data[i];
        if (v < 0.0 || v != std::floor(v))
            throw IoError("label image must be non-negative integer-valued: " + path);
        lab.data[i] = static_cast<int>(v);
    }
    return lab;
}

int cmd_evaluate(const std::string &moving_path, const std::string &fixed_path,
                 const std::string &report_path, const std::string &labels_moving_path,
                 const std::string &labels_fixed_path, const std::string &out_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const ScalarImage moving = read_scalar_metaimage(moving_path);
    const ScalarImage fixed = read_scalar_metaimage(fixed_path);
    require_same_grid(moving.grid, fixed.grid, moving_path + " vs " + fixed_path);
    const BrokenGeodesic g = load_geodesic(load_json_file(report_path), moving.grid);

    std::optional<LabelImage> lm, lf;
    if (!labels_moving_path.empty()) lm = load_labels(labels_moving_path);
    if (!labels_fixed_path.empty()) lf = load_labels(labels_fixed_path);

    const EvalReport rep = evaluate_pair(moving, fixed, lm, lf, g);
    json dice_j = json::object();
    for (const auto &[label, d] : rep.dice_per_label)
        dice_j[std::to_string(label)] = d;
    const json out{{"mse_before", rep.mse_before},
                   {"mse_after", rep.mse_after},
                   {"dice_per_label", dice_j},
                   {"jac_min", rep.jac_min},
                   {"jac_mean", rep.jac_mean},
                   {"jac_negative_fraction", rep.jac_negative_fraction},
                   {"roundtrip_max_disp", rep.roundtrip_max_disp},
                   {"metric", rep.metric}};
    save_json_file(out_path, out);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(fs::path(out_path).parent_path().empty()
                       ? fs::path(".")
                       : fs::path(out_path).parent_path(),
                   "evaluate", json::object(),
                   {moving_path, fixed_path, report_path}, {out_path}, wall);
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Broken-geodesic diffeomorphic registration toolkit"};
    app.set_version_flag("--version", kVersion);

    int threads = 1;
    app.add_option("--threads", threads, "max worker threads")->capture_default_str();
    app.add_flag("--verbose", g_verbose, "log progress to stderr");

    std::string moving, fixed, config, out_dir, image, transform, scheme = "linear";
    std::string out_path, report, svf, spec_path, labels_moving, labels_fixed;
    bool labels = false, sweep = false;
    int sweep_seeds = 10;

    auto *reg = app.add_subcommand("register", "register moving to fixed");
    reg->add_option("moving", moving)->required();
    reg->add_option("fixed", fixed)->required();
    reg->add_option("--config", config, "driver config JSON");
    reg->add_option("--out", out_dir, "output directory")->required();

    auto *apply = app.add_subcommand("apply", "apply a displacement transform");
    apply->add_option("image", image)->required();
    apply->add_option("transform", transform)->required();
    apply->add_option("--scheme", scheme)->check(CLI::IsMember({"linear", "cubic"}));
    apply->add_flag("--labels", labels, "nearest-neighbor label transfer");
    apply->add_option("-o,--out", out_path)->required();

    auto *invert = app.add_subcommand("invert", "exp(-v) of an SVF");
    invert->add_option("svf", svf)->required();
    invert->add_option("-o,--out", out_path)->required();

    auto *metric = app.add_subcommand("metric", "print the path-length metric");
    metric->add_option("report", report)->required();

    auto *synth = app.add_subcommand("synth", "controlled synthetic deformations");
    synth->add_option("--image", image, "base image (generated when omitted)");
    synth->add_option("--spec", spec_path, "SynthSpec JSON");
    synth->add_option("--out", out_dir)->required();
    synth->add_flag("--sweep", sweep, "run the metric-vs-degree sweep");
    synth->add_option("--seeds", sweep_seeds, "seeds for --sweep");
    synth->add_option("--config", config, "driver config JSON for --sweep");

    auto *eval_cmd = app.add_subcommand("evaluate", "evaluate a registration run");
    eval_cmd->add_option("--moving", moving)->required();
    eval_cmd->add_option("--fixed", fixed)->required();
    eval_cmd->add_option("--report", report)->required();
    eval_cmd->add_option("--labels-moving", labels_moving);
    eval_cmd->add_option("--labels-fixed", labels_fixed);
    eval_cmd->add_option("-o,--out", out_path)->required();

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);
    set_max_threads(threads);

    try {
        if (reg->parsed()) return cmd_register(moving, fixed, config, out_dir);
        if (apply->parsed()) return cmd_apply(image, transform, scheme, labels, out_path);
        if (invert->parsed()) return cmd_invert(svf, out_path);
        if (metric->parsed()) return cmd_metric(report);
        if (synth->parsed())
            return cmd_synth(image, spec_path, out_dir, sweep, sweep_seeds, config);
        if (eval_cmd->parsed())
            return cmd_evaluate(moving, fixed, report, labels_moving, labels_fixed,
                                out_path);
    } catch (const DimsMismatch &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDimsMismatch;
    } catch (const NumericalError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformed;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformed;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformed;
    }
    return kExitOk;
}
