#include "stegcal/cli/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "stegcal/cli/csv.hpp"
#include "stegcal/error.hpp"
#include "stegcal/parallel.hpp"
#include "stegcal/rng.hpp"

namespace stegcal::cli {

using json = nlohmann::ordered_json;

namespace {

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string(what) + ": " + e.what());
  }
}

json feature_config_json(const FeatureConfig& cfg) {
  json j;
  j["feature_set"] = std::string(feature_set_name(cfg.set));
  j["filters"] = cfg.filters;
  j["frame_len"] = cfg.frame_len;
  j["hop"] = cfg.hop;
  j["spectrum"] = cfg.spectrum == SpectrumMode::Power ? "power" : "magnitude";
  j["double_log"] = cfg.double_log;
  json cal;
  cal["mode"] = cfg.calibration.mode == CalibrationMode::Universal ? "universal" : "targeted";
  cal["reembedder"] = json::parse(cfg.calibration.reembedder.to_json());
  if (cfg.calibration.seed_override) {
    cal["seed_override"] = *cfg.calibration.seed_override;
  } else {
    cal["seed_override"] = nullptr;
  }
  j["calibration"] = cal;
  return j;
}

FeatureConfig feature_config_from(const json& j) {
  FeatureConfig cfg;
  if (!j.is_object()) throw Error(Errc::ParseError, "feature config must be a JSON object");
  try {
    if (j.contains("feature_set")) cfg.set = parse_feature_set(j["feature_set"].get<std::string>());
    cfg.filters = j.value("filters", cfg.filters);
    cfg.frame_len = j.value("frame_len", cfg.frame_len);
    cfg.hop = j.value("hop", cfg.hop);
    if (j.contains("spectrum")) {
      const auto s = j["spectrum"].get<std::string>();
      if (s == "power") {
        cfg.spectrum = SpectrumMode::Power;
      } else if (s == "magnitude") {
        cfg.spectrum = SpectrumMode::Magnitude;
      } else {
        throw Error(Errc::ParseError, "spectrum must be 'power' or 'magnitude'");
      }
    }
    cfg.double_log = j.value("double_log", cfg.double_log);
    if (j.contains("calibration")) {
      const auto& cal = j["calibration"];
      const auto mode = cal.value("mode", std::string("universal"));
      if (mode == "universal") {
        cfg.calibration.mode = CalibrationMode::Universal;
      } else if (mode == "targeted") {
        cfg.calibration.mode = CalibrationMode::Targeted;
      } else {
        throw Error(Errc::ParseError, "calibration mode must be 'universal' or 'targeted'");
      }
      if (cal.contains("reembedder")) {
        cfg.calibration.reembedder = EmbedderSpec::from_json(cal["reembedder"].dump());
      }
      if (cal.contains("seed_override") && !cal["seed_override"].is_null()) {
        cfg.calibration.seed_override = cal["seed_override"].get<std::uint64_t>();
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("feature config: ") + e.what());
  }
  return cfg;
}

std::string kernel_name(ml::KernelKind k) { return k == ml::KernelKind::Rbf ? "rbf" : "linear"; }

ml::KernelKind parse_kernel(const std::string& s) {
  if (s == "rbf") return ml::KernelKind::Rbf;
  if (s == "linear") return ml::KernelKind::Linear;
  throw Error(Errc::ParseError, "kernel must be 'rbf' or 'linear'");
}

void log_warning(const std::string& clip, const Error& e) {
  json j;
  j["level"] = "warning";
  j["clip"] = clip;
  j["error"] = std::string(errc_name(e.code()));
  j["message"] = e.what();
  std::cerr << j.dump() << '\n';
}

ml::GaConfig ga_config(const RunConfig& cfg, std::uint64_t stream) {
  ml::GaConfig g = cfg.ga;
  g.seed = derive_seed(cfg.seed, stream);
  g.svm = cfg.svm;
  return g;
}

}  // namespace

std::string RunConfig::to_json() const {
  json j;
  j["features"] = feature_config_json(features);
  j["svm"] = {{"kernel", kernel_name(svm.kernel)},
              {"gamma", svm.gamma},
              {"c", svm.c},
              {"tolerance", svm.tolerance},
              {"max_iterations", svm.max_iterations}};
  j["ga"] = {{"population", ga.population},
             {"generations", ga.generations},
             {"crossover_rate", ga.crossover_rate},
             {"mutation_rate", ga.mutation_rate},
             {"elitism", ga.elitism},
             {"tournament", ga.tournament},
             {"inner_folds", ga.inner_folds}};
  j["folds"] = folds;
  j["use_ga"] = use_ga;
  j["ga_scope"] = ga_scope == GaScope::PerFold ? "per-fold" : "global";
  j["seed"] = seed;
  j["jobs"] = jobs;
  return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(const std::string& text) {
  const json j = parse_json(text, "run config");
  if (!j.is_object()) throw Error(Errc::ParseError, "run config must be a JSON object");
  RunConfig cfg;
  try {
    if (j.contains("features")) cfg.features = feature_config_from(j["features"]);
    if (j.contains("svm")) {
      const auto& s = j["svm"];
      if (s.contains("kernel")) cfg.svm.kernel = parse_kernel(s["kernel"].get<std::string>());
      cfg.svm.gamma = s.value("gamma", cfg.svm.gamma);
      cfg.svm.c = s.value("c", cfg.svm.c);
      cfg.svm.tolerance = s.value("tolerance", cfg.svm.tolerance);
      cfg.svm.max_iterations = s.value("max_iterations", cfg.svm.max_iterations);
    }
    if (j.contains("ga")) {
      const auto& g = j["ga"];
      cfg.ga.population = g.value("population", cfg.ga.population);
      cfg.ga.generations = g.value("generations", cfg.ga.generations);
      cfg.ga.crossover_rate = g.value("crossover_rate", cfg.ga.crossover_rate);
      cfg.ga.mutation_rate = g.value("mutation_rate", cfg.ga.mutation_rate);
      cfg.ga.elitism = g.value("elitism", cfg.ga.elitism);
      cfg.ga.tournament = g.value("tournament", cfg.ga.tournament);
      cfg.ga.inner_folds = g.value("inner_folds", cfg.ga.inner_folds);
    }
    cfg.folds = j.value("folds", cfg.folds);
    cfg.use_ga = j.value("use_ga", cfg.use_ga);
    if (j.contains("ga_scope")) {
      const auto s = j["ga_scope"].get<std::string>();
      if (s == "per-fold") {
        cfg.ga_scope = GaScope::PerFold;
      } else if (s == "global") {
        cfg.ga_scope = GaScope::Global;
      } else {
        throw Error(Errc::ParseError, "ga_scope must be 'per-fold' or 'global'");
      }
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.jobs = j.value("jobs", cfg.jobs);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("run config: ") + e.what());
  }
  return cfg;
}

void RunConfig::validate() const {
  if (features.filters == 0) throw Error(Errc::OutOfRange, "filters must be positive");
  if (features.frame_len == 0 || features.hop == 0)
    throw Error(Errc::OutOfRange, "frame_len and hop must be positive");
  features.calibration.reembedder.validate();
  if (!(svm.c > 0.0)) throw Error(Errc::OutOfRange, "SVM C must be positive");
  if (!(svm.tolerance > 0.0)) throw Error(Errc::OutOfRange, "SVM tolerance must be positive");
  if (folds < 2) throw Error(Errc::OutOfRange, "cross-validation needs at least 2 folds");
  ga.validate();
}

std::string feature_config_to_json(const FeatureConfig& cfg) {
  return feature_config_json(cfg).dump();
}

FeatureConfig feature_config_from_json(const std::string& text) {
  return feature_config_from(parse_json(text, "feature config"));
}

std::string features_to_csv(const ml::Dataset& ds) {
  std::string out = "clip_id,label";
  char name[16];
  for (std::size_t c = 0; c < ds.dims(); ++c) {
    std::snprintf(name, sizeof name, ",f%03zu", c + 1);
    out += name;
  }
  out += '\n';
  for (std::size_t r = 0; r < ds.size(); ++r) {
    out += csv::escape(ds.ids[r]);
    out += ds.y[r] == ml::Label::Stego ? ",1" : ",0";
    for (double v : ds.x.row(r)) {
      out += ',';
      out += csv::number(v);
    }
    out += '\n';
  }
  return out;
}

ml::Dataset features_from_csv(const std::string& text) {
  const auto table = csv::parse(text);
  if (table.empty()) throw Error(Errc::ParseError, "empty features CSV");
  const auto& header = table[0];
  if (header.size() < 3 || header[0] != "clip_id" || header[1] != "label")
    throw Error(Errc::ParseError, "features CSV header must start with clip_id,label,f001");
  const std::size_t dims = header.size() - 2;
  ml::Dataset ds;
  ds.x = ml::Matrix(0, dims);
  std::vector<double> row(dims);
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& f = table[i];
    if (f.size() != header.size())
      throw Error(Errc::ParseError, "features row " + std::to_string(i) + " has wrong field count");
    ml::Label label;
    if (f[1] == "0") {
      label = ml::Label::Cover;
    } else if (f[1] == "1") {
      label = ml::Label::Stego;
    } else {
      throw Error(Errc::ParseError, "label must be 0 or 1 in features row " + std::to_string(i));
    }
    for (std::size_t c = 0; c < dims; ++c) {
      try {
        std::size_t pos = 0;
        row[c] = std::stod(f[c + 2], &pos);
        if (pos != f[c + 2].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error(Errc::ParseError, "bad number '" + f[c + 2] + "' in features row " +
                                          std::to_string(i));
      }
    }
    ds.x.append_row(row);
    ds.y.push_back(label);
    ds.ids.push_back(f[0]);
  }
  ds.validate();
  return ds;
}

ml::Dataset load_features(const fs::path& file) { return features_from_csv(csv::read_file(file)); }

fs::path meta_path(const fs::path& features_csv) {
  auto p = features_csv;
  p += ".meta.json";
  return p;
}

AudioClip load_mono(const fs::path& wav) {
  AudioClip clip = read_wav(wav);
  return clip.channel_count == 1 ? clip : downmix_mono(clip);
}

std::vector<fs::path> cmd_gen_synthetic(std::size_t count, double duration_s,
                                        std::uint32_t sample_rate, const fs::path& out_dir,
                                        std::uint64_t seed, unsigned jobs) {
  if (count == 0) throw Error(Errc::OutOfRange, "count must be positive");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  const auto samples = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  if (!(duration_s > 0.0)) throw Error(Errc::OutOfRange, "duration must be positive");
  std::vector<fs::path> paths(count);
  char name[32];
  for (std::size_t i = 0; i < count; ++i) {
    std::snprintf(name, sizeof name, "cover_%04zu.wav", i);
    paths[i] = out_dir / name;
  }
  parallel_for(count, jobs, [&](std::size_t i) {
    const auto clip = synth_cover(sample_rate, samples, derive_seed(seed, i));
    const auto bytes = encode_wav(clip);
    csv::write_file_atomic(paths[i], std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                                      bytes.size()));
  });
  return paths;
}

std::vector<EmbedderSpec> parse_embedder_grid(const std::string& json_text) {
  const json j = parse_json(json_text, "embedder grid");
  std::vector<EmbedderSpec> grid;
  if (j.is_array()) {
    for (const auto& e : j) grid.push_back(EmbedderSpec::from_json(e.dump()));
  } else {
    grid.push_back(EmbedderSpec::from_json(j.dump()));
  }
  return grid;
}

CorpusManifest cmd_gen_corpus(const fs::path& cover_dir, const std::vector<EmbedderSpec>& grid,
                              const fs::path& out_dir, std::uint64_t seed, unsigned jobs) {
  const auto covers = list_wavs(cover_dir);
  if (covers.empty()) throw Error(Errc::EmptyCorpus, "no WAV files in " + cover_dir.string());
  for (const auto& g : grid) g.validate();

  std::error_code ec;
  fs::create_directories(out_dir / "stego", ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  const fs::path abs_out = fs::absolute(out_dir);

  const std::size_t g_count = grid.size();
  std::vector<std::vector<ManifestRow>> per_clip(covers.size());
  std::vector<bool> ok(covers.size(), false);
  parallel_for(covers.size(), jobs, [&](std::size_t i) {
    const std::string id = covers[i].stem().string();
    std::vector<ManifestRow> rows;
    try {
      const AudioClip cover = load_mono(covers[i]);
      ManifestRow c;
      c.clip_id = id;
      c.path = fs::absolute(covers[i]).lexically_relative(abs_out).generic_string();
      if (c.path.empty()) c.path = fs::absolute(covers[i]).generic_string();
      c.role = ml::Label::Cover;
      rows.push_back(c);
      for (std::size_t g = 0; g < g_count; ++g) {
        EmbedderSpec spec = grid[g];
        spec.seed = derive_seed(seed, i * g_count + g);
        char suffix[24];
        std::snprintf(suffix, sizeof suffix, "__g%02zu", g);
        ManifestRow s;
        s.clip_id = id + suffix;
        s.path = "stego/" + s.clip_id + ".wav";
        s.role = ml::Label::Stego;
        s.embedder = spec;
        s.seed = spec.seed;
        const auto bytes = encode_wav(embed(cover, spec));
        csv::write_file_atomic(out_dir / s.path,
                               std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                                bytes.size()));
        rows.push_back(std::move(s));
      }
      per_clip[i] = std::move(rows);
      ok[i] = true;
    } catch (const Error& e) {
      log_warning(id, e);
    }
  });

  CorpusManifest m;
  for (std::size_t i = 0; i < covers.size(); ++i) {
    if (!ok[i]) continue;
    for (auto& r : per_clip[i]) m.rows.push_back(std::move(r));
  }
  if (m.rows.empty()) throw Error(Errc::EmptyCorpus, "every cover failed; no manifest written");
  m.validate();
  csv::write_file_atomic(out_dir / "manifest.csv", m.to_csv());
  return m;
}

std::vector<AudioClip> load_covers(const fs::path& manifest_or_dir) {
  std::vector<AudioClip> covers;
  if (fs::is_directory(manifest_or_dir)) {
    for (const auto& p : list_wavs(manifest_or_dir)) covers.push_back(load_mono(p));
  } else {
    const auto m = CorpusManifest::load(manifest_or_dir);
    const auto dir = manifest_or_dir.parent_path();
    for (const auto& r : m.rows) {
      if (r.role == ml::Label::Cover) covers.push_back(load_mono(m.resolve(r, dir)));
    }
  }
  if (covers.empty()) throw Error(Errc::EmptyCorpus, "no covers in " + manifest_or_dir.string());
  return covers;
}

SensitivityReport cmd_sense(const std::vector<AudioClip>& covers, const EmbedderSpec& spec,
                            int planes, unsigned jobs) {
  return sensitivity_report(covers, spec, planes, jobs);
}

ml::Dataset cmd_features(const fs::path& manifest, const RunConfig& cfg, const fs::path& out_csv) {
  cfg.validate();
  const auto m = CorpusManifest::load(manifest);
  if (m.rows.empty()) throw Error(Errc::EmptyCorpus, "manifest has no rows");
  const auto dir = manifest.parent_path();
  std::vector<FeatureVector> feats(m.rows.size());
  parallel_for(m.rows.size(), cfg.jobs, [&](std::size_t i) {
    feats[i] = extract_features(load_mono(m.resolve(m.rows[i], dir)), cfg.features);
  });
  ml::Dataset ds;
  ds.x = ml::Matrix(0, cfg.features.dimension());
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    ds.x.append_row(feats[i].values);
    ds.y.push_back(m.rows[i].role);
    ds.ids.push_back(m.rows[i].clip_id);
  }
  ds.validate();
  if (!out_csv.empty()) {
    csv::write_file_atomic(out_csv, features_to_csv(ds));
    csv::write_file_atomic(meta_path(out_csv), feature_config_json(cfg.features).dump(2) + "\n");
  }
  return ds;
}

ml::SvmModel cmd_train(const fs::path& features_csv, const RunConfig& cfg,
                       const fs::path& out_model) {
  cfg.validate();
  const auto ds = load_features(features_csv);
  std::string extractor = feature_config_to_json(cfg.features);
  const auto meta = meta_path(features_csv);
  if (fs::exists(meta)) extractor = feature_config_to_json(feature_config_from_json(csv::read_file(meta)));
  if (feature_config_from_json(extractor).dimension() != ds.dims()) {
    throw Error(Errc::DimensionMismatch, "features CSV has " + std::to_string(ds.dims()) +
                                             " columns but the extractor produces " +
                                             std::to_string(feature_config_from_json(extractor).dimension()));
  }
  std::vector<bool> mask;
  if (cfg.use_ga) mask = ml::ga_select(ds, ga_config(cfg, 1), cfg.jobs).mask;
  ml::SvmParams params = cfg.svm;
  params.seed = cfg.seed;
  auto model = ml::svm_train_normalized(ds, params, mask);
  if (!out_model.empty()) csv::write_file_atomic(out_model, ml::model_to_json(model, extractor));
  return model;
}

ml::CvReport cmd_cv(const ml::Dataset& ds, const RunConfig& cfg) {
  cfg.validate();
  ml::SvmParams params = cfg.svm;
  params.seed = cfg.seed;
  ml::FoldSelector selector;
  if (cfg.use_ga) {
    if (cfg.ga_scope == GaScope::Global) {
      const auto mask = ml::ga_select(ds, ga_config(cfg, 1), cfg.jobs).mask;
      selector = [mask](const ml::Dataset&, std::size_t) { return mask; };
    } else {
      selector = [&cfg](const ml::Dataset& train, std::size_t fold) {
        return ml::ga_select(train, ga_config(cfg, 100 + fold), 1).mask;
      };
    }
  }
  return ml::kfold_cv(ds, cfg.folds, params, cfg.seed, selector, cfg.jobs);
}

std::string format_cv_table(const ml::CvReport& report) {
  std::ostringstream os;
  os << "fold    Se(%)   Sp(%)  Acc(%)  features\n";
  char line[128];
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const auto& r = report.folds[f];
    std::snprintf(line, sizeof line, "%4zu  %7.1f %7.1f %7.1f  %8zu\n", f + 1, 100 * r.sensitivity,
                  100 * r.specificity, 100 * r.accuracy, r.selected_features);
    os << line;
  }
  std::snprintf(line, sizeof line, "mean  %7.1f %7.1f %7.1f\n", 100 * report.mean_sensitivity,
                100 * report.mean_specificity, 100 * report.mean_accuracy);
  os << line;
  return os.str();
}

ml::GaResult cmd_ga(const ml::Dataset& ds, const RunConfig& cfg) {
  cfg.validate();
  return ml::ga_select(ds, ga_config(cfg, 1), cfg.jobs);
}

std::string ga_result_to_json(const ml::GaResult& r) {
  json j;
  j["fitness"] = r.fitness;
  auto selected = json::array();
  for (std::size_t i = 0; i < r.mask.size(); ++i) {
    if (r.mask[i]) selected.push_back(i + 1);
  }
  j["selected"] = selected;
  std::string bits;
  for (bool b : r.mask) bits += b ? '1' : '0';
  j["mask"] = bits;
  j["trace"] = r.trace;
  return j.dump(2) + "\n";
}

std::vector<ScanVerdict> cmd_scan(const fs::path& model_file, const std::vector<fs::path>& wavs,
                                  unsigned jobs) {
  std::string extractor;
  const auto model = ml::model_from_json(csv::read_file(model_file), &extractor);
  const auto fcfg = feature_config_from_json(extractor);
  if (fcfg.dimension() != model.input_dims()) {
    throw Error(Errc::DimensionMismatch,
                "model expects " + std::to_string(model.input_dims()) +
                    " features but its extractor produces " + std::to_string(fcfg.dimension()));
  }
  std::vector<ScanVerdict> out(wavs.size());
  parallel_for(wavs.size(), jobs, [&](std::size_t i) {
    const auto fv = extract_features(load_mono(wavs[i]), fcfg);
    const auto p = model.predict(fv.values);
    out[i] = {wavs[i].string(), p.label, p.margin};
  });
  return out;
}

std::string scan_to_csv(const std::vector<ScanVerdict>& verdicts) {
  std::string out = "path,verdict,margin\n";
  for (const auto& v : verdicts) {
    out += csv::escape(v.path);
    out += v.label == ml::Label::Stego ? ",stego," : ",cover,";
    out += csv::number(v.margin);
    out += '\n';
  }
  return out;
}

std::string cmd_noise_pmf(const std::vector<AudioClip>& covers, const EmbedderSpec& spec) {
  std::vector<int> pooled;
  for (std::size_t i = 0; i < covers.size(); ++i) {
    EmbedderSpec s = spec;
    s.seed = derive_seed(spec.seed, i);
    const auto n = steg_noise(covers[i], embed(covers[i], s));
    pooled.insert(pooled.end(), n.begin(), n.end());
  }
  const auto pmf = noise_pmf(pooled);
  std::string out = "value,probability\n";
  for (std::size_t k = 0; k < pmf.support.size(); ++k) {
    out += std::to_string(pmf.support[k]);
    out += ',';
    out += csv::number(pmf.probs[k]);
    out += '\n';
  }
  return out;
}

std::string cmd_psd(const AudioClip& clip, const std::optional<EmbedderSpec>& spec,
                    std::size_t seg_len, std::size_t hop) {
  const auto cover = psd_welch(to_real(clip.samples), seg_len, hop, clip.sample_rate);
  std::optional<PowerSpectrum> stego;
  if (spec) stego = psd_welch(to_real(embed(clip, *spec).samples), seg_len, hop, clip.sample_rate);
  std::string out = stego ? "freq_hz,cover,stego\n" : "freq_hz,cover\n";
  const double df = static_cast<double>(clip.sample_rate) / static_cast<double>(cover.nfft);
  for (std::size_t k = 0; k < cover.bins.size(); ++k) {
    out += csv::number(df * static_cast<double>(k));
    out += ',';
    out += csv::number(cover.bins[k]);
    if (stego) {
      out += ',';
      out += csv::number(stego->bins[k]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace stegcal::cli
