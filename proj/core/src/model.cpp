#include "underlay/model.hpp"

#include <cmath>

namespace underlay {

namespace {

bool finite(double v) { return std::isfinite(v); }

void check_tier(const std::string& prefix, const TierParams& t,
                ValidationReport& report) {
  if (!finite(t.density) || t.density < 0.0) {
    report.errors.push_back({prefix + ".density", "must be finite and >= 0"});
  }
  if (!finite(t.power) || t.power <= 0.0) {
    report.errors.push_back({prefix + ".power", "must be finite and > 0"});
  }
  if (!finite(t.access_prob) || t.access_prob < 0.0 || t.access_prob > 1.0) {
    report.errors.push_back({prefix + ".access_prob", "must be in [0, 1]"});
  }
  if (!finite(t.sinr_threshold) || t.sinr_threshold <= 0.0) {
    report.errors.push_back(
        {prefix + ".sinr_threshold", "must be finite and > 0"});
  }
}

void check_weight(const std::string& field, double w,
                  ValidationReport& report) {
  if (!finite(w) || w < 0.0 || w > 1.0) {
    report.errors.push_back({field, "must be in [0, 1]"});
  }
}

}  // namespace

ValidationReport validate(const Scenario& sc, Use use) {
  ValidationReport report;

  const double eta = sc.channel.eta;
  if (!finite(eta)) {
    report.errors.push_back({"channel.eta", "must be finite"});
  } else if (use == Use::analytic) {
    if (eta <= 2.0) {
      report.errors.push_back(
          {"channel.eta", "must exceed 2 for analytic evaluation"});
    } else if (eta < 2.05) {
      report.warnings.push_back(
          {"channel.eta",
           "values this close to 2 make the closed forms ill-conditioned"});
    }
  } else {
    if (eta < 2.0) {
      report.errors.push_back({"channel.eta", "must be at least 2"});
    } else if (eta == 2.0) {
      report.warnings.push_back(
          {"channel.eta",
           "mean interference diverges at eta = 2; estimates will not "
           "stabilize as the window grows"});
    }
  }

  if (!finite(sc.channel.epsilon) || sc.channel.epsilon < 0.0) {
    report.errors.push_back({"channel.epsilon", "must be finite and >= 0"});
  }
  if (!finite(sc.channel.noise) || sc.channel.noise < 0.0) {
    report.errors.push_back({"channel.noise", "must be finite and >= 0"});
  }

  check_tier("primary", sc.primary, report);
  check_tier("secondary", sc.secondary, report);

  check_weight("weights.aa", sc.weights.aa, report);
  check_weight("weights.ab", sc.weights.ab, report);
  check_weight("weights.ba", sc.weights.ba, report);
  check_weight("weights.bb", sc.weights.bb, report);

  if (!finite(sc.qos.pairing_range) || sc.qos.pairing_range <= 0.0) {
    report.errors.push_back({"qos.pairing_range", "must be finite and > 0"});
  }
  if (!finite(sc.qos.min_connection_prob) ||
      sc.qos.min_connection_prob <= 0.0 || sc.qos.min_connection_prob > 1.0) {
    report.errors.push_back(
        {"qos.min_connection_prob", "must be in (0, 1]"});
  }

  if (!finite(sc.bounds.lo) || sc.bounds.lo < 0.0) {
    report.errors.push_back({"bounds.lo", "must be finite and >= 0"});
  }
  if (!finite(sc.bounds.hi) || sc.bounds.hi <= 0.0) {
    report.errors.push_back({"bounds.hi", "must be finite and > 0"});
  }
  if (finite(sc.bounds.lo) && finite(sc.bounds.hi) &&
      sc.bounds.lo > sc.bounds.hi) {
    report.errors.push_back({"bounds.lo", "must not exceed bounds.hi"});
  }

  return report;
}

const TierParams& tier_params(const Scenario& sc, Tier tier) {
  return tier == Tier::primary ? sc.primary : sc.secondary;
}

double same_tier_weight(const InterferenceWeights& w, Tier receiver) {
  return receiver == Tier::primary ? w.aa : w.bb;
}

double cross_tier_weight(const InterferenceWeights& w, Tier receiver) {
  return receiver == Tier::primary ? w.ba : w.ab;
}

Scenario apply_strategy(Scenario sc, const Strategy& st) {
  sc.secondary.power = st.power;
  sc.secondary.access_prob = st.access_prob;
  return sc;
}

}  // namespace underlay
