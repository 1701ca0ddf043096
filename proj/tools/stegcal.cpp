// stegcal: corpus generation, sensitivity reports, features, training,
// cross-validation and diagnostics for calibrated audio steganalysis.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "stegcal/cli/commands.hpp"
#include "stegcal/cli/csv.hpp"
#include "stegcal/error.hpp"

namespace fs = std::filesystem;
using namespace stegcal;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

void report_error(std::string_view code, const std::string& message) {
  nlohmann::ordered_json j;
  j["level"] = "error";
  j["error"] = std::string(code);
  j["message"] = message;
  std::cerr << j.dump() << '\n';
}

// Inline JSON, or @path to read it from a file.
std::string json_arg(const std::string& value) {
  if (!value.empty() && value[0] == '@') return csv::read_file(value.substr(1));
  return value;
}

std::string param_label(const EmbedderSpec& spec) {
  char buf[64];
  switch (spec.kind) {
    case EmbedderKind::CoxDct:
      std::snprintf(buf, sizeof buf, "alpha=%g", spec.alpha);
      break;
    case EmbedderKind::SsDctAdd:
    case EmbedderKind::SsTimeAdd:
      std::snprintf(buf, sizeof buf, "a=%g", spec.alpha);
      break;
    default:
      std::snprintf(buf, sizeof buf, "C=%g", spec.capacity_bps);
  }
  return buf;
}

void emit(const fs::path& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
  } else {
    csv::write_file_atomic(out, content);
  }
}

// Shared flags. Values land in a RunConfig only when given on the command
// line, so --config file values survive unless explicitly overridden.
struct Flags {
  std::string config_file;
  bool print_config = false;
  fs::path out;

  std::uint64_t seed = 0, calib_seed = 0;
  unsigned jobs = 0;
  std::string feature_set, spectrum, calibration, reembedder, kernel, ga_scope;
  std::size_t filters = 0, frame_len = 0, hop = 0, folds = 0, population = 0, generations = 0;
  bool double_log = false, use_ga = false;
  double gamma = 0.0, c = 0.0, mutation = 0.0;

  void add_common(CLI::App* app) {
    app->add_option("--config", config_file, "JSON run config; flags override its values");
    app->add_flag("--print-config", print_config, "Print the resolved run config and exit");
    app->add_option("--out", out, "Output file or directory");
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  }

  void add_features(CLI::App* app) {
    app->add_option("--feature-set", feature_set, "proposed|rmel-energy|mfcc|d2-mfcc|r-mfcc");
    app->add_option("--filters", filters, "Filters per bank (M)");
    app->add_option("--frame-len", frame_len, "Frame length in samples");
    app->add_option("--hop", hop, "Hop in samples");
    app->add_option("--spectrum", spectrum, "power|magnitude");
    app->add_flag("--double-log", double_log, "Apply the second logarithm in cepstra");
    app->add_option("--calibration", calibration, "universal|targeted");
    app->add_option("--reembedder", reembedder, "Targeted re-embedder spec (JSON or @file)");
    app->add_option("--calib-seed", calib_seed, "Fixed calibration message seed (default: content hash)");
  }

  void add_classifier(CLI::App* app) {
    app->add_option("--kernel", kernel, "rbf|linear");
    app->add_option("--gamma", gamma, "RBF gamma (<= 0 selects 1/d)");
    app->add_option("--c", c, "Soft-margin C");
    app->add_option("--folds", folds, "Cross-validation folds");
    app->add_flag("--ga", use_ga, "Run GA feature selection");
    app->add_option("--ga-scope", ga_scope, "per-fold|global");
    app->add_option("--population", population, "GA population");
    app->add_option("--generations", generations, "GA generations");
    app->add_option("--mutation", mutation, "GA per-bit mutation rate");
  }

  cli::RunConfig resolve(const CLI::App* sub) const {
    auto given = [sub](const char* name) {
      const auto* o = sub->get_option_no_throw(name);
      return o != nullptr && o->count() > 0;
    };
    cli::RunConfig cfg;
    if (!config_file.empty()) cfg = cli::RunConfig::from_json(csv::read_file(config_file));
    if (given("--seed")) cfg.seed = seed;
    if (given("--jobs")) cfg.jobs = jobs;
    if (given("--feature-set")) cfg.features.set = parse_feature_set(feature_set);
    if (given("--filters")) cfg.features.filters = filters;
    if (given("--frame-len")) cfg.features.frame_len = frame_len;
    if (given("--hop")) cfg.features.hop = hop;
    if (given("--spectrum")) {
      if (spectrum == "power") {
        cfg.features.spectrum = SpectrumMode::Power;
      } else if (spectrum == "magnitude") {
        cfg.features.spectrum = SpectrumMode::Magnitude;
      } else {
        throw Error(Errc::ParseError, "--spectrum must be power or magnitude");
      }
    }
    if (given("--double-log")) cfg.features.double_log = double_log;
    if (given("--calibration")) {
      if (calibration == "universal") {
        cfg.features.calibration.mode = CalibrationMode::Universal;
      } else if (calibration == "targeted") {
        cfg.features.calibration.mode = CalibrationMode::Targeted;
      } else {
        throw Error(Errc::ParseError, "--calibration must be universal or targeted");
      }
    }
    if (given("--reembedder")) cfg.features.calibration.reembedder = EmbedderSpec::from_json(json_arg(reembedder));
    if (given("--calib-seed")) cfg.features.calibration.seed_override = calib_seed;
    if (given("--kernel")) {
      if (kernel == "rbf") {
        cfg.svm.kernel = ml::KernelKind::Rbf;
      } else if (kernel == "linear") {
        cfg.svm.kernel = ml::KernelKind::Linear;
      } else {
        throw Error(Errc::ParseError, "--kernel must be rbf or linear");
      }
    }
    if (given("--gamma")) cfg.svm.gamma = gamma;
    if (given("--c")) cfg.svm.c = c;
    if (given("--folds")) cfg.folds = folds;
    if (given("--ga")) cfg.use_ga = use_ga;
    if (given("--ga-scope")) {
      if (ga_scope == "per-fold") {
        cfg.ga_scope = cli::GaScope::PerFold;
      } else if (ga_scope == "global") {
        cfg.ga_scope = cli::GaScope::Global;
      } else {
        throw Error(Errc::ParseError, "--ga-scope must be per-fold or global");
      }
    }
    if (given("--population")) cfg.ga.population = population;
    if (given("--generations")) cfg.ga.generations = generations;
    if (given("--mutation")) cfg.ga.mutation_rate = mutation;
    cfg.validate();
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrated audio steganalysis toolkit"};
  app.require_subcommand(1);

  Flags f;

  // gen-synthetic
  std::size_t syn_count = 200;
  double syn_duration = 5.0;
  std::uint32_t syn_rate = 44100;
  auto* gen_syn = app.add_subcommand("gen-synthetic", "Write band-limited synthetic cover WAVs");
  gen_syn->add_option("--count", syn_count, "Number of covers");
  gen_syn->add_option("--duration", syn_duration, "Seconds per cover");
  gen_syn->add_option("--rate", syn_rate, "Sample rate in Hz");

  // gen-corpus
  fs::path covers_dir;
  std::string grid_arg = "[]";
  auto* gen_corpus = app.add_subcommand("gen-corpus", "Embed every cover with every grid spec");
  gen_corpus->add_option("--covers", covers_dir, "Directory of cover WAVs")->required();
  gen_corpus->add_option("--grid", grid_arg, "Embedder spec or array of specs (JSON or @file)");

  // sense
  fs::path sense_input;
  std::string embedder_arg;
  int planes = 6;
  std::string sense_label;
  auto* sense = app.add_subcommand("sense", "Bit-plane sensitivity report");
  sense->add_option("--input", sense_input, "Manifest CSV or cover directory")->required();
  sense->add_option("--embedder", embedder_arg, "Embedder spec (JSON or @file)")->required();
  sense->add_option("--planes", planes, "Number of bit planes");
  sense->add_option("--label", sense_label, "Row label in the CSV");

  // features
  fs::path manifest;
  auto* features = app.add_subcommand("features", "Extract a feature CSV in manifest order");
  features->add_option("--manifest", manifest, "Corpus manifest CSV")->required();

  // train / cv / ga
  fs::path features_csv;
  auto* train = app.add_subcommand("train", "Train an SVM model from a feature CSV");
  train->add_option("--features", features_csv, "Feature CSV")->required();
  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
  cv->add_option("--features", features_csv, "Feature CSV")->required();
  std::string cv_json;
  cv->add_option("--json", cv_json, "Also write the JSON report here");
  auto* ga = app.add_subcommand("ga", "Genetic-algorithm feature selection");
  ga->add_option("--features", features_csv, "Feature CSV")->required();

  // scan
  fs::path model_file;
  std::vector<fs::path> scan_wavs;
  auto* scan = app.add_subcommand("scan", "Classify WAV files with a trained model");
  scan->add_option("--model", model_file, "Model JSON")->required();
  scan->add_option("wavs", scan_wavs, "WAV files")->required();

  // noise-pmf / psd
  std::vector<fs::path> diag_wavs;
  auto* pmf = app.add_subcommand("noise-pmf", "Stego-noise PMF pooled over covers");
  pmf->add_option("--embedder", embedder_arg, "Embedder spec (JSON or @file)")->required();
  pmf->add_option("wavs", diag_wavs, "Cover WAV files")->required();
  std::size_t seg_len = 1024, seg_hop = 512;
  auto* psd = app.add_subcommand("psd", "Welch PSD of a clip and optionally its stego");
  psd->add_option("--embedder", embedder_arg, "Embedder spec (JSON or @file)");
  psd->add_option("--seg-len", seg_len, "Segment length (power of two)");
  psd->add_option("--seg-hop", seg_hop, "Segment hop");
  psd->add_option("wav", diag_wavs, "Cover WAV file")->required()->expected(1);

  for (auto* sub : {gen_syn, gen_corpus, sense, features, train, cv, ga, scan, pmf, psd}) {
    f.add_common(sub);
  }
  for (auto* sub : {features, train, cv, ga}) f.add_features(sub);
  for (auto* sub : {train, cv, ga}) f.add_classifier(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("UsageError", e.what());
    return kExitValidation;
  }

  try {
    const cli::RunConfig cfg = f.resolve(app.get_subcommands().front());
    if (f.print_config) {
      std::cout << cfg.to_json();
      return 0;
    }

    if (gen_syn->parsed()) {
      if (f.out.empty()) throw Error(Errc::InvalidSpec, "gen-synthetic needs --out DIR");
      const auto paths = cli::cmd_gen_synthetic(syn_count, syn_duration, syn_rate, f.out, cfg.seed, cfg.jobs);
      std::cout << "wrote " << paths.size() << " covers to " << f.out.string() << '\n';
    } else if (gen_corpus->parsed()) {
      if (f.out.empty()) throw Error(Errc::InvalidSpec, "gen-corpus needs --out DIR");
      const auto grid = cli::parse_embedder_grid(json_arg(grid_arg));
      const auto m = cli::cmd_gen_corpus(covers_dir, grid, f.out, cfg.seed, cfg.jobs);
      std::cout << "manifest with " << m.rows.size() << " rows: " << (f.out / "manifest.csv").string()
                << '\n';
    } else if (sense->parsed()) {
      const auto spec = EmbedderSpec::from_json(json_arg(embedder_arg));
      const auto covers = cli::load_covers(sense_input);
      const auto report = cli::cmd_sense(covers, spec, planes, cfg.jobs);
      const std::string label = sense_label.empty() ? param_label(spec) : sense_label;
      if (f.out.empty()) {
        std::cout << report.to_csv(label);
      } else {
        csv::write_file_atomic(f.out, report.to_csv(label));
        auto json_out = f.out;
        json_out.replace_extension(".json");
        csv::write_file_atomic(json_out, report.to_json());
      }
      for (std::size_t k = 0; k < report.planes.size(); ++k) {
        if (report.sensitivity[k] <= 1.0) continue;
        nlohmann::ordered_json j;
        j["level"] = "warning";
        j["error"] = "AnomalousPlane";
        j["plane"] = report.planes[k];
        j["sensitivity"] = report.sensitivity[k];
        std::cerr << j.dump() << '\n';
      }
    } else if (features->parsed()) {
      if (f.out.empty()) throw Error(Errc::InvalidSpec, "features needs --out FILE");
      const auto ds = cli::cmd_features(manifest, cfg, f.out);
      std::cout << ds.size() << " rows x " << ds.dims() << " features -> " << f.out.string() << '\n';
    } else if (train->parsed()) {
      if (f.out.empty()) throw Error(Errc::InvalidSpec, "train needs --out FILE");
      const auto model = cli::cmd_train(features_csv, cfg, f.out);
      std::cout << model.support_vectors.rows() << " support vectors -> " << f.out.string() << '\n';
    } else if (cv->parsed()) {
      const auto report = cli::cmd_cv(cli::load_features(features_csv), cfg);
      std::cout << cli::format_cv_table(report);
      if (!f.out.empty()) csv::write_file_atomic(f.out, report.to_csv());
      if (!cv_json.empty()) csv::write_file_atomic(cv_json, report.to_json());
    } else if (ga->parsed()) {
      const auto result = cli::cmd_ga(cli::load_features(features_csv), cfg);
      emit(f.out, cli::ga_result_to_json(result));
    } else if (scan->parsed()) {
      emit(f.out, cli::scan_to_csv(cli::cmd_scan(model_file, scan_wavs, cfg.jobs)));
    } else if (pmf->parsed()) {
      const auto spec = EmbedderSpec::from_json(json_arg(embedder_arg));
      std::vector<AudioClip> covers;
      for (const auto& p : diag_wavs) covers.push_back(cli::load_mono(p));
      emit(f.out, cli::cmd_noise_pmf(covers, spec));
    } else if (psd->parsed()) {
      std::optional<EmbedderSpec> spec;
      if (!embedder_arg.empty()) spec = EmbedderSpec::from_json(json_arg(embedder_arg));
      emit(f.out, cli::cmd_psd(cli::load_mono(diag_wavs.at(0)), spec, seg_len, seg_hop));
    }
  } catch (const Error& e) {
    report_error(errc_name(e.code()), e.what());
    return is_io_error(e.code()) ? kExitIo : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    report_error("IoError", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return kExitValidation;
  }
  return 0;
}
