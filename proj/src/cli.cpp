#include "decern/cli.hpp"

#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "decern/config.hpp"
#include "decern/error.hpp"
#include "decern/harness.hpp"
#include "decern/report.hpp"

namespace decern {

namespace {

namespace fs = std::filesystem;

struct GenerateArgs {
    std::string spec_file;
    std::string out;
    std::optional<std::size_t> classes, per_class, dim;
    std::optional<double> spread, noise, overlap;
    std::optional<std::uint64_t> seed;
};

struct RunArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::size_t jobs = 1;
    int verbosity = 0;
};

struct ReportArgs {
    std::string report;
    std::string out_dir;
};

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
}

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
    SyntheticSpec spec;
    if (!args.spec_file.empty()) {
        ConfigMap cfg = load_config_file(args.spec_file);
        cfg["dataset.source"] = "synthetic";
        spec = resolve_config(cfg).dataset.synthetic;
    }
    if (args.classes) spec.num_classes = *args.classes;
    if (args.per_class) spec.per_class = *args.per_class;
    if (args.dim) spec.dim = *args.dim;
    if (args.spread) spec.spread = *args.spread;
    if (args.noise) spec.noise = *args.noise;
    if (args.overlap) spec.overlap = *args.overlap;
    if (args.seed) spec.seed = *args.seed;
    spec.validate();

    const LabeledSamples samples = generate_samples(spec);
    const fs::path path = args.out;
    fs::path tmp = path;
    tmp += ".tmp";
    try {
        write_samples_binary(tmp, samples, spec.num_classes);
    } catch (const Error&) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw Error("cannot write dataset to " + path.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error("cannot write dataset to " + path.string());

    nlohmann::ordered_json side;
    side["format"] = "DCRNDATA";
    side["version"] = kDataVersion;
    side["samples"] = samples.size();
    side["dim"] = spec.dim;
    side["classes"] = spec.num_classes;
    side["spec"] = {{"per_class", spec.per_class}, {"spread", spec.spread}, {"noise", spec.noise},
                    {"overlap", spec.overlap},     {"seed", spec.seed}};
    fs::path side_path = path;
    side_path += ".json";
    write_file_atomic(side_path, side.dump(2) + "\n");
    out << "wrote " << samples.size() << " samples (" << spec.num_classes << " classes, d = " << spec.dim << ") to "
        << path.string() << "\n";
    return kExitOk;
}

void write_outputs(const RunConfig& rc, const Report& report) {
    ensure_dir(rc.output_dir);
    write_file_atomic(rc.output_dir / "report.json", report_to_json(report));
    write_file_atomic(rc.output_dir / "curves.csv", curves_csv(report.result));
    if (!rc.dump_scores) return;
    const fs::path dir = rc.output_dir / "scores";
    ensure_dir(dir);
    for (const SeedRun& r : report.result.runs) {
        for (const CycleReport& c : r.cycles) {
            if (!c.score_table) continue;
            const std::string name = std::string(to_string(r.strategy)) + "_seed" + std::to_string(r.seed) + "_cycle" +
                                     std::to_string(c.cycle) + ".csv";
            write_file_atomic(dir / name, score_dump_csv(c));
        }
    }
}

int cmd_run(const RunArgs& args, bool sweep, std::ostream& out, std::ostream& err) {
    ConfigMap cfg = load_config_file(args.config);
    for (const auto& o : args.overrides) apply_override(cfg, o);
    if (!args.out_dir.empty()) cfg["output.dir"] = args.out_dir;
    RunConfig rc = resolve_config(cfg);
    if (sweep) {
        if (rc.sweep.size() < 2) throw Error("sweep needs at least 2 strategies in 'strategies'");
    } else {
        rc.sweep.clear();
    }
    rc.jobs = args.jobs;

    const FeatureDataset dataset = load_dataset(rc.dataset);
    if (args.verbosity > 0) {
        err << "dataset: " << dataset.train.size() << " train, " << dataset.test.size() << " test, "
            << dataset.num_classes << " classes, d = " << dataset.dim() << "\n";
    }
    Report report{echo_config(rc), run_experiment(rc, dataset)};
    write_outputs(rc, report);
    out << summary_table(report.result);
    if (sweep) out << "\n" << comparison_table(report.result);
    if (args.verbosity > 0) err << "outputs in " << rc.output_dir.string() << "\n";
    return kExitOk;
}

int cmd_report(const ReportArgs& args, std::ostream& out) {
    const Report report = report_from_json(read_file(args.report));
    if (!args.out_dir.empty()) {
        ensure_dir(args.out_dir);
        write_file_atomic(fs::path(args.out_dir) / "curves.csv", curves_csv(report.result));
    }
    out << summary_table(report.result);
    if (strategies_in(report.result).size() > 1) out << "\n" << comparison_table(report.result);
    return kExitOk;
}

void add_run_options(CLI::App* cmd, RunArgs& args) {
    cmd->add_option("-c,--config", args.config, "config file")->required();
    cmd->add_option("--set", args.overrides, "override, key=value (repeatable)")->allow_extra_args(false);
    cmd->add_option("-o,--out", args.out_dir, "output directory (overrides output.dir)");
    cmd->add_option("-j,--jobs", args.jobs, "seed/strategy jobs in flight")->check(CLI::PositiveNumber);
    cmd->add_flag("-v,--verbose", args.verbosity, "progress on stderr");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"decern: batch active-learning selection on embedding features"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "write a synthetic DCRNDATA dataset");
    generate->add_option("--spec", gen.spec_file, "config file with dataset.* keys");
    generate->add_option("--out", gen.out, "output file")->required();
    generate->add_option("--classes", gen.classes, "number of classes");
    generate->add_option("--per-class", gen.per_class, "samples per class");
    generate->add_option("--dim", gen.dim, "embedding dimension");
    generate->add_option("--spread", gen.spread, "class center radius");
    generate->add_option("--noise", gen.noise, "per-dimension noise std");
    generate->add_option("--overlap", gen.overlap, "center shrink factor in [0, 1)");
    generate->add_option("--seed", gen.seed, "generator seed");

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "run one strategy over all seeds");
    add_run_options(run, run_args);
    RunArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "run every strategy in 'strategies' and compare");
    add_run_options(sweep, sweep_args);

    ReportArgs rep;
    auto* report = app.add_subcommand("report", "re-emit curves.csv and tables from report.json");
    report->add_option("report", rep.report, "report.json")->required();
    report->add_option("-o,--out", rep.out_dir, "directory for curves.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*generate) return cmd_generate(gen, out);
        if (*run) return cmd_run(run_args, false, out, err);
        if (*sweep) return cmd_run(sweep_args, true, out, err);
        return cmd_report(rep, out);
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace decern
