#include <cmath>
#include <random>

#include "stegcal/embedders.hpp"
#include "stegcal/steg_analysis.hpp"
#include "support.hpp"

using namespace stegcal;

namespace {

EmbedderSpec spec_of(EmbedderKind kind, double cap, int planes = 1, double alpha = 0.0) {
  EmbedderSpec s;
  s.kind = kind;
  s.capacity_bps = cap;
  s.planes = planes;
  s.alpha = alpha;
  s.seed = 11;
  return s;
}

std::vector<AudioClip> corpus(std::size_t clips, std::size_t len) {
  std::vector<AudioClip> out;
  for (std::size_t c = 0; c < clips; ++c) out.push_back(testing::random_clip(len, 500 + c, -12000, 12000));
  return out;
}

}  // namespace

TEST_CASE("steg noise and pmf") {
  const auto cover = testing::random_clip(1000000, 1);
  CHECK(noise_pmf(steg_noise(cover, cover)).support == std::vector<int>{0});
  auto other = cover;
  other.samples.pop_back();
  CHECK_ERRC(steg_noise(cover, other), Errc::LengthMismatch);
  CHECK_ERRC(noise_pmf(std::vector<int>{}), Errc::Empty);

  const auto pmf = noise_pmf(steg_noise(cover, embed(cover, spec_of(EmbedderKind::LsbReplace, 1))));
  REQUIRE(pmf.support == std::vector<int>{-1, 0, 1});
  CHECK(std::abs(pmf.probs[0] - 0.25) < 0.005);
  CHECK(std::abs(pmf.probs[1] - 0.50) < 0.005);
  CHECK(std::abs(pmf.probs[2] - 0.25) < 0.005);
  double sum = 0;
  for (double p : pmf.probs) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

  const auto pmf4 = noise_pmf(steg_noise(cover, embed(cover, spec_of(EmbedderKind::LsbReplace, 4, 4))));
  CHECK(pmf4.support.front() >= -15);
  CHECK(pmf4.support.back() <= 15);

  const auto cox0 = steg_noise(cover, embed(cover, spec_of(EmbedderKind::CoxDct, 0, 1, 0.0)));
  for (int v : cox0) CHECK(std::abs(v) <= 1);
}

TEST_CASE("bit planes and ber") {
  AudioClip c{{0, 1, 2, 3}, 8000, 1};
  CHECK(bitplane(c, 1) == std::vector<std::uint8_t>{0, 1, 0, 1});
  AudioClip neg{{-1}, 8000, 1};
  for (int i = 1; i <= 16; ++i) CHECK(bitplane(neg, i) == std::vector<std::uint8_t>{1});
  AudioClip ext{{32767, -32768}, 8000, 1};
  CHECK(bitplane(ext, 16) == std::vector<std::uint8_t>{0, 1});
  CHECK_ERRC(bitplane(c, 0), Errc::BadPlane);
  CHECK_ERRC(bitplane(c, 17), Errc::BadPlane);

  std::vector<std::uint8_t> a{0, 1, 1, 0}, b{1, 0, 0, 1};
  CHECK(ber(a, a) == 0.0);
  CHECK(ber(a, b) == 1.0);
  CHECK_ERRC(ber(a, std::vector<std::uint8_t>{1}), Errc::LengthMismatch);
  CHECK_ERRC(ber(std::vector<std::uint8_t>{}, std::vector<std::uint8_t>{}), Errc::Empty);

  std::mt19937_64 gen(3);
  std::vector<std::uint8_t> u(1000000), v(1000000);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = gen() & 1;
    v[i] = gen() & 1;
  }
  CHECK(std::abs(ber(u, v) - 0.5) < 0.002);
}

TEST_CASE("sensitivity basics") {
  const auto cover = testing::random_clip(200000, 2);
  for (int i = 1; i <= 16; ++i) CHECK(sensitivity(cover, cover, i) == 0.0);
  const auto st = embed(cover, spec_of(EmbedderKind::LsbReplace, 1));
  CHECK(std::abs(sensitivity(cover, st, 1) - 1.0) < 0.01);
  for (int i = 2; i <= 16; ++i) CHECK(sensitivity(cover, st, i) == 0.0);
  for (int i = 1; i <= 6; ++i) CHECK(sensitivity(cover, st, i) == sensitivity(st, cover, i));
  const auto m = embed(cover, spec_of(EmbedderKind::LsbMatch, 0.12));
  CHECK(std::abs(sensitivity(cover, m, 1) - 0.12) < 0.01);
}

TEST_CASE("sensitivity reports pool over the corpus") {
  const auto covers = corpus(50, 100000);
  CHECK_ERRC(sensitivity_report(std::span<const AudioClip>{}, spec_of(EmbedderKind::LsbMatch, 0.5)),
             Errc::EmptyCorpus);

  const auto zero = sensitivity_report(covers, spec_of(EmbedderKind::LsbMatch, 0.0));
  for (double s : zero.sensitivity) CHECK(s == 0.0);
  CHECK(zero.n_clips == 50);
  CHECK(zero.n_samples == 5000000);

  for (double c : {0.5, 0.25, 0.12, 0.06}) {
    const auto r = sensitivity_report(covers, spec_of(EmbedderKind::LsbMatch, c), 6, 2);
    for (int i = 1; i <= 6; ++i) {
      CHECK(std::abs(r.sensitivity[i - 1] - c / std::pow(2.0, i - 1)) <= 0.02);
    }
  }

  const auto r2 = sensitivity_report(covers, spec_of(EmbedderKind::LsbReplace, 2, 2));
  CHECK(r2.sensitivity[0] >= 0.99);
  CHECK(r2.sensitivity[1] >= 0.99);
  for (int i = 3; i <= 6; ++i) CHECK(r2.sensitivity[i - 1] <= 0.005);

  // Jobs never change the numbers.
  const auto serial = sensitivity_report(covers, spec_of(EmbedderKind::LsbMatch, 0.25), 6, 1);
  const auto threaded = sensitivity_report(covers, spec_of(EmbedderKind::LsbMatch, 0.25), 6, 4);
  CHECK(serial.sensitivity == threaded.sensitivity);

  const auto json = r2.to_json();
  CHECK(json.find("\"pooling\"") != std::string::npos);
  const auto csv = r2.to_csv("C=2");
  CHECK(csv.rfind("method,param,1,2,3,4,5,6\n", 0) == 0);
  CHECK(csv.find("\nlsb_replace,C=2,") != std::string::npos);
}

TEST_CASE("anomalous planes are flagged, not clamped") {
  SensitivityReport r;
  r.planes = {1, 2, 3};
  r.sensitivity = {1.2, 0.5, 1.0};
  CHECK(r.anomalous_planes() == std::vector<int>{1});
}
