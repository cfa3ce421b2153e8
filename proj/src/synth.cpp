#include "overdx/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "overdx/csv.hpp"
#include "overdx/error.hpp"

namespace overdx {

namespace {

// draws built from raw mt19937_64 words only, so output is identical on any
// standard library
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  std::uint64_t below(std::uint64_t n) {
    return engine_() % n;  // tiny bias is irrelevant here
  }
  bool bernoulli(double p) { return uniform() < p; }
  double normal(double mean, double sd) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + sd * spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return mean + sd * r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

int draw_sofa(Rng& rng, const OutcomeDistribution& dist) {
  double v = std::round(rng.normal(dist.sofa_mean, dist.sofa_sd));
  return static_cast<int>(std::clamp(v, 0.0, 24.0));
}

void validate(const SynthConfig& config) {
  if (config.families.empty()) throw ConfigError("synth: no families");
  for (const auto& fam : config.families) {
    if (fam.sequence.empty()) throw ConfigError("synth: empty family template");
    if (fam.n_pos < 0 || fam.n_neg < 0)
      throw ConfigError("synth: negative case count");
  }
  if (config.noise_rate < 0.0 || config.noise_rate > 1.0)
    throw ConfigError("synth: noise_rate must be in [0,1]");
  if (config.planted.family < 0 ||
      config.planted.family >= static_cast<int>(config.families.size()))
    throw ConfigError("synth: planted family index out of range");
  const auto& planted = config.families[config.planted.family];
  if (config.planted.n_tp_cases < 0 ||
      config.planted.n_tp_cases > planted.n_pos)
    throw ConfigError("synth: n_tp_cases exceeds planted family positives");
  if (planted.n_pos >= planted.n_neg)
    throw ConfigError("synth: planted family must be negative-dominated");
}

}  // namespace

SynthConfig default_synth_config(std::uint64_t seed) {
  SynthConfig config;
  config.seed = seed;
  config.noise_rate = 0.05;
  config.families = {
      // planted: negative-dominated, early vasopressor trajectory
      {{"lactate", "fluids crystalloids", "norepinephrine", "vancomycin",
        "cefepime"},
       25, 280},
      // negative-dominated with genuinely sicker positives
      {{"fluids crystalloids", "lactate", "vasopressin", "dopamine",
        "ceftriaxone", "other antibiotics"},
       40, 260},
      // positive-dominated, antibiotics-first trajectory
      {{"vancomycin", "piperacillin-tazobactam", "lactate",
        "fluids crystalloids"},
       210, 90},
      // negatives only
      {{"lactate", "dobutamine", "epinephrine", "cefazolin",
        "fluids crystalloids"},
       0, 300},
  };
  config.planted = PlantedOverdx{0, 25};
  return config;
}

SynthOutput generate(const SynthConfig& config) {
  validate(config);
  Rng rng(config.seed);
  const auto& vocab = default_vocabulary();

  SynthOutput out;
  out.log.vocabulary.insert(vocab.begin(), vocab.end());
  for (const auto& fam : config.families)
    out.log.vocabulary.insert(fam.sequence.begin(), fam.sequence.end());

  const Timestamp base = 1672531200;  // 2023-01-01T00:00:00Z
  std::int64_t case_index = 0;

  for (int f = 0; f < static_cast<int>(config.families.size()); ++f) {
    const FamilyTemplate& fam = config.families[f];
    const std::int64_t total = fam.n_pos + fam.n_neg;
    for (std::int64_t c = 0; c < total; ++c) {
      const bool positive = c < fam.n_pos;
      const bool planted = positive && f == config.planted.family &&
                           c < config.planted.n_tp_cases;

      char buf[24];
      std::snprintf(buf, sizeof(buf), "c%05lld",
                    static_cast<long long>(++case_index));
      std::string cid(buf);

      std::vector<std::string> acts(fam.sequence);
      if (rng.bernoulli(config.noise_rate)) {
        if (rng.bernoulli(0.5)) {
          std::size_t pos = rng.below(acts.size() + 1);
          acts.insert(acts.begin() + pos, vocab[rng.below(vocab.size())]);
        } else if (acts.size() >= 2) {
          std::size_t pos = rng.below(acts.size() - 1);
          std::swap(acts[pos], acts[pos + 1]);
        }
      }

      Trace trace;
      trace.case_id = cid;
      trace.activities = acts;
      for (std::size_t i = 0; i < acts.size(); ++i) {
        out.events.push_back(Event{
            cid, acts[i], base + static_cast<Timestamp>(i) * 3600});
      }
      out.log.traces.push_back(std::move(trace));

      const OutcomeDistribution& dist =
          (positive && !planted) ? config.positive_outcomes
                                 : config.negative_outcomes;
      CaseAttributes attr;
      attr.case_id = cid;
      attr.y_true = positive ? 1 : 0;
      attr.y_pred = attr.y_true;  // the audit runs on TP/TN only
      attr.sofa_24h = draw_sofa(rng, dist);
      attr.died = rng.bernoulli(dist.mortality) ? 1 : 0;
      attr.discharge_location =
          attr.died ? "died"
                    : (rng.bernoulli(0.25) ? "snf"
                                           : (rng.bernoulli(0.2) ? "rehab"
                                                                 : "home"));
      out.attrs.emplace(cid, std::move(attr));

      out.truth.family_of[cid] = f;
      if (planted) out.truth.overdiagnosed_case_ids.insert(cid);
    }
  }
  return out;
}

void write_truth_csv(const PlantedTruth& truth, std::ostream& out) {
  out << "case_id,family,overdiagnosed\n";
  for (const auto& [cid, fam] : truth.family_of) {
    out << csv::join({cid, std::to_string(fam),
                      truth.overdiagnosed_case_ids.count(cid) ? "1" : "0"})
        << "\n";
  }
}

}  // namespace overdx
