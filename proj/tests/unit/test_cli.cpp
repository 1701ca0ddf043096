#include <algorithm>

#include "stegcal/cli/commands.hpp"
#include "stegcal/cli/csv.hpp"
#include "support.hpp"

using namespace stegcal;
namespace fs = std::filesystem;

namespace {

EmbedderSpec lsb_match(double c) {
  EmbedderSpec s;
  s.kind = EmbedderKind::LsbMatch;
  s.capacity_bps = c;
  return s;
}

std::string bytes(const fs::path& p) { return csv::read_file(p); }

}  // namespace

TEST_CASE("csv escape and parse") {
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const auto t = csv::parse("a,\"b,c\",\"d\"\"e\"\r\n1,,3\n\"multi\nline\",x,y");
  REQUIRE(t.size() == 3);
  CHECK(t[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(t[1] == std::vector<std::string>{"1", "", "3"});
  CHECK(t[2][0] == "multi\nline");
  CHECK_ERRC(csv::parse("\"open"), Errc::ParseError);
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0}) {
    CHECK(std::stod(csv::number(v)) == v);
  }
}

TEST_CASE("manifest round trip") {
  CorpusManifest m;
  m.rows.push_back({"c0", "covers/c0.wav", ml::Label::Cover, std::nullopt, 0});
  auto spec = lsb_match(0.5);
  spec.seed = 99;
  m.rows.push_back({"c0__g00", "stego/c0__g00.wav", ml::Label::Stego, spec, 99});
  const auto text = m.to_csv();
  CHECK(text.rfind("clip_id,path,role,embedder,seed\n", 0) == 0);
  const auto back = CorpusManifest::from_csv(text);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[1].embedder == spec);
  CHECK(back.to_csv() == text);
  CHECK_ERRC(CorpusManifest::from_csv("clip_id,path,role,embedder,seed\na,p,WHAT,-,0\n"),
             Errc::ParseError);
  CHECK_ERRC(CorpusManifest::from_csv("clip_id,path,role,embedder,seed\na,p,COVER,-,0\na,q,COVER,-,0\n"),
             Errc::ParseError);
  CHECK_ERRC(CorpusManifest::from_csv("clip_id,path,role,embedder,seed\na,p,STEGO,-,0\n"),
             Errc::InvalidSpec);
}

TEST_CASE("features csv round trip") {
  ml::Dataset ds;
  ds.x = ml::Matrix(0, 3);
  ds.x.append_row(std::vector<double>{0.1, -1.0 / 3.0, 1e-17});
  ds.x.append_row(std::vector<double>{2, 3, 4});
  ds.y = {ml::Label::Cover, ml::Label::Stego};
  ds.ids = {"a,b", "c"};
  const auto text = cli::features_to_csv(ds);
  CHECK(text.rfind("clip_id,label,f001,f002,f003\n", 0) == 0);
  const auto back = cli::features_from_csv(text);
  CHECK(back.x == ds.x);
  CHECK(back.y == ds.y);
  CHECK(back.ids == ds.ids);
  CHECK_ERRC(cli::features_from_csv("clip_id,label,f001\nx,0,nan\n"), Errc::OutOfRange);
}

TEST_CASE("run config json round trip") {
  cli::RunConfig cfg;
  cfg.features.set = FeatureSet::Mfcc;
  cfg.features.filters = 20;
  cfg.features.double_log = true;
  cfg.svm.c = 3.5;
  cfg.ga.population = 10;
  cfg.use_ga = true;
  cfg.ga_scope = cli::GaScope::Global;
  cfg.seed = 1234567890123ULL;
  cfg.folds = 5;
  const auto back = cli::RunConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  const auto partial = cli::RunConfig::from_json(R"({"folds": 4})");
  CHECK(partial.folds == 4);
  CHECK(partial.features.filters == 29);
  cli::RunConfig bad;
  bad.folds = 1;
  CHECK_THROWS_AS(bad.validate(), stegcal::Error);
}

TEST_CASE("corpus generation and pipeline") {
  const auto dir = testing::scratch_dir("cli");
  const auto covers = cli::cmd_gen_synthetic(10, 0.25, 44100, dir / "covers", 7, 1);
  REQUIRE(covers.size() == 10);
  CHECK(covers[0].filename() == "cover_0000.wav");
  CHECK(read_wav(covers[3]).samples.size() == 11025);

  const auto grid = cli::parse_embedder_grid(
      R"([{"kind":"lsb_match","capacity_bps":0.5},{"kind":"lsb_replace","planes":1},)"
      R"({"kind":"ss_time_add","alpha":2}])");
  REQUIRE(grid.size() == 3);
  const auto m = cli::cmd_gen_corpus(dir / "covers", grid, dir / "corpus", 11, 1);
  CHECK(m.rows.size() == 40);
  CHECK(std::count_if(m.rows.begin(), m.rows.end(),
                      [](const ManifestRow& r) { return r.role == ml::Label::Stego; }) == 30);
  CHECK(fs::exists(dir / "corpus" / "manifest.csv"));

  const auto again = cli::cmd_gen_corpus(dir / "covers", grid, dir / "corpus2", 11, 1);
  CHECK(bytes(dir / "corpus" / "manifest.csv") == bytes(dir / "corpus2" / "manifest.csv"));
  for (const auto& r : m.rows) {
    if (r.role != ml::Label::Stego) continue;
    CHECK(bytes(dir / "corpus" / r.path) == bytes(dir / "corpus2" / r.path));
  }

  const auto only = cli::cmd_gen_corpus(dir / "covers", {}, dir / "covers_only", 11, 1);
  CHECK(only.rows.size() == 10);
  CHECK(cli::load_covers(dir / "covers_only" / "manifest.csv").size() == 10);
  CHECK(cli::load_covers(dir / "covers").size() == 10);

  cli::RunConfig cfg;
  cfg.jobs = 1;
  const auto feats = cli::cmd_features(dir / "corpus" / "manifest.csv", cfg, dir / "f.csv");
  CHECK(feats.size() == 40);
  CHECK(feats.dims() == 116);
  const auto header = csv::parse(bytes(dir / "f.csv"))[0];
  CHECK(header.size() == 118);
  CHECK(fs::exists(cli::meta_path(dir / "f.csv")));
  cfg.jobs = 3;
  cli::cmd_features(dir / "corpus" / "manifest.csv", cfg, dir / "f3.csv");
  CHECK(bytes(dir / "f.csv") == bytes(dir / "f3.csv"));

  cli::cmd_features(dir / "covers_only" / "manifest.csv", cfg, dir / "fc.csv");
  CHECK_ERRC(cli::cmd_train(dir / "fc.csv", cfg, dir / "bad.json"), Errc::SingleClass);

  cli::cmd_train(dir / "f.csv", cfg, dir / "model.json");
  const auto verdicts = cli::cmd_scan(dir / "model.json", {covers[0], covers[1]}, 1);
  CHECK(verdicts.size() == 2);
  CHECK(cli::scan_to_csv(verdicts).rfind("path,verdict,margin\n", 0) == 0);

  cli::RunConfig small = cfg;
  small.features.filters = 12;
  cli::cmd_features(dir / "corpus" / "manifest.csv", small, dir / "f12.csv");
  fs::remove(cli::meta_path(dir / "f12.csv"));
  CHECK_ERRC(cli::cmd_train(dir / "f12.csv", cfg, dir / "m.json"), Errc::DimensionMismatch);
  const auto m12 = cli::cmd_train(dir / "f12.csv", small, dir / "m12.json");
  CHECK(cli::cmd_scan(dir / "m12.json", {covers[0]}, 1).size() == 1);
  csv::write_file_atomic(dir / "m12bad.json",
                         ml::model_to_json(m12, cli::feature_config_to_json(cfg.features)));
  CHECK_ERRC(cli::cmd_scan(dir / "m12bad.json", {covers[0]}, 1), Errc::DimensionMismatch);

  const auto pmf = cli::cmd_noise_pmf(cli::load_covers(dir / "covers"), lsb_match(1.0));
  CHECK(pmf.rfind("value,probability\n", 0) == 0);
  const auto psd = cli::cmd_psd(read_wav(covers[0]), lsb_match(1.0), 1024, 512);
  CHECK(psd.rfind("freq_hz,cover,stego\n", 0) == 0);
  CHECK(std::count(psd.begin(), psd.end(), '\n') == 514);
}
