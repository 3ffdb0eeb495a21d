#include "dpbandit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dpbandit/text.hpp"

namespace dpbandit {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

ParetoModel::ParetoModel(double alpha, double lam) : alpha_(alpha), lam_(lam) {
  require(std::isfinite(alpha) && alpha > 1.0,
          "Pareto shape must exceed 1 for a finite mean");
  require(std::isfinite(lam) && lam > 0.0, "Pareto scale must be positive");
}

FiniteSupportModel::FiniteSupportModel(std::vector<Atom> atoms) {
  require(!atoms.empty(), "finite-support model needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    require(std::isfinite(a.value), "atom value must be finite");
    require(std::isfinite(a.prob) && a.prob >= 0.0,
            "atom probability must be nonnegative");
    total += a.prob;
  }
  require(std::abs(total - 1.0) <= 1e-12, "atom probabilities must sum to 1");

  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.value < y.value; });
  for (const auto& a : atoms) {
    if (a.prob == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().value == a.value) {
      atoms_.back().prob += a.prob;
    } else {
      atoms_.push_back(a);
    }
  }
  double acc = 0.0;
  cumulative_.reserve(atoms_.size());
  for (const auto& a : atoms_) {
    acc += a.prob;
    cumulative_.push_back(acc);
  }
}

double FiniteSupportModel::quantile(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(
      static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
  return atoms_[idx].value;
}

double pareto_quantile(double alpha, double lam, double u) {
  return lam * std::pow(1.0 - u, -1.0 / alpha);
}

double sample(const RewardModel& model, RandomStream& rng) {
  const double u = rng.uniform_open();
  return std::visit(
      Overloaded{
          [u](const ParetoModel& m) {
            return pareto_quantile(m.alpha(), m.lam(), u);
          },
          [u](const FiniteSupportModel& m) { return m.quantile(u); },
      },
      model);
}

double mean(const RewardModel& model) {
  return std::visit(
      Overloaded{
          [](const ParetoModel& m) {
            return m.alpha() * m.lam() / (m.alpha() - 1.0);
          },
          [](const FiniteSupportModel& m) {
            double s = 0.0;
            for (const auto& a : m.atoms()) s += a.prob * a.value;
            return s;
          },
      },
      model);
}

double moment_bound(const RewardModel& model, double v) {
  return std::visit(
      Overloaded{
          [v](const ParetoModel& m) {
            if (!(m.alpha() > 1.0 + v)) {
              throw std::domain_error(
                  "Pareto (1+v)-th moment is infinite for alpha <= 1+v");
            }
            return m.alpha() * std::pow(m.lam(), 1.0 + v) /
                   (m.alpha() - (1.0 + v));
          },
          [v](const FiniteSupportModel& m) {
            double s = 0.0;
            for (const auto& a : m.atoms()) {
              s += a.prob * std::pow(std::abs(a.value), 1.0 + v);
            }
            return s;
          },
      },
      model);
}

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::kS1:
      return "S1";
    case Setting::kS2:
      return "S2";
    case Setting::kS3:
      return "S3";
  }
  return "?";
}

Setting parse_setting(std::string_view name) {
  if (name == "S1") return Setting::kS1;
  if (name == "S2") return Setting::kS2;
  if (name == "S3") return Setting::kS3;
  throw std::invalid_argument("unknown Pareto setting '" + std::string(name) +
                              "'");
}

BanditInstance::BanditInstance(std::string name, std::vector<RewardModel> arms,
                               double v)
    : name_(std::move(name)), arms_(std::move(arms)), v_(v) {
  require(!arms_.empty(), "instance needs at least one arm");
  require(v > 0.0 && v <= 1.0, "moment parameter v must lie in (0, 1]");
  means_.reserve(arms_.size());
  for (const auto& arm : arms_) {
    means_.push_back(mean(arm));
    u_ = std::max(u_, moment_bound(arm, v));
  }
  const auto best = std::max_element(means_.begin(), means_.end());
  best_arm_ = static_cast<std::size_t>(best - means_.begin());
  gaps_.reserve(arms_.size());
  for (double m : means_) gaps_.push_back(*best - m);
}

std::vector<double> setting_means(Setting setting) {
  if (setting == Setting::kS1) return {0.9, 0.7, 0.5, 0.3, 0.1};
  std::vector<double> means;
  for (int a = 1; a <= 5; ++a) {
    switch (setting) {
      case Setting::kS1:
        break;
      case Setting::kS2:
        means.push_back(0.05 * (a - 5) * (a - 5) + 0.1);
        break;
      case Setting::kS3:
        means.push_back(-0.05 * (a - 1) * (a - 1) + 0.9);
        break;
    }
  }
  return means;
}

BanditInstance make_pareto_instance(Setting setting, double v) {
  require(v > 0.0 && v <= 1.0, "moment parameter v must lie in (0, 1]");
  const double alpha = 1.05 + v;
  std::vector<RewardModel> arms;
  for (double mu : setting_means(setting)) {
    arms.emplace_back(ParetoModel(alpha, (alpha - 1.0) * mu / alpha));
  }
  return BanditInstance(std::string(to_string(setting)), std::move(arms), v);
}

BanditInstance make_central_hard_instance(std::span<const double> means,
                                          double v) {
  require(v > 0.0 && v <= 1.0, "moment parameter v must lie in (0, 1]");
  require(!means.empty(), "hard instance needs at least one arm");
  std::vector<RewardModel> arms;
  for (std::size_t a = 0; a < means.size(); ++a) {
    const double mu = means[a];
    require(mu > 0.0 && mu <= 0.5, "hard-instance means must lie in (0, 1/2]");
    require(a == 0 || mu <= means[a - 1],
            "hard-instance means must be nonincreasing");
    const double s = std::pow(2.0 * mu, 1.0 / v);
    const double p = std::pow(s, 1.0 + v) / 2.0;
    require(p <= 1.0, "hard-instance atom mass exceeds 1");
    arms.emplace_back(FiniteSupportModel({{0.0, 1.0 - p}, {1.0 / s, p}}));
  }
  return BanditInstance("k_arm_hard", std::move(arms), v);
}

FiniteSupportModel make_central_shifted_arm(double mu, double delta, double v) {
  require(v > 0.0 && v <= 1.0, "moment parameter v must lie in (0, 1]");
  require(mu > 0.0 && std::pow(mu, 1.0 + v) <= 1.0 / 6.0,
          "shifted arm requires 0 < mu and mu^(1+v) <= 1/6");
  require(delta >= 0.0 && std::pow(delta, 1.0 + v) <= 1.0 / 12.0,
          "shifted arm requires 0 <= delta and delta^(1+v) <= 1/12");
  const double s = std::pow(2.0 * mu, 1.0 / v);
  const double p_s = std::pow(s, 1.0 + v) / 2.0;
  if (delta == 0.0) {
    return FiniteSupportModel({{0.0, 1.0 - p_s}, {1.0 / s, p_s}});
  }
  const double gamma = std::pow(4.0 * delta, 1.0 / v);
  const double p_g = 2.0 * delta * gamma;
  return FiniteSupportModel(
      {{0.0, 1.0 - p_s - p_g}, {1.0 / s, p_s}, {1.0 / gamma, p_g}});
}

BanditInstance make_two_arm_hard_instance(double delta, double v,
                                          HardFlavor flavor) {
  require(v > 0.0 && v <= 1.0, "moment parameter v must lie in (0, 1]");
  require(delta > 0.0 && delta < 0.2, "two-arm gap must lie in (0, 1/5)");
  const double gamma = std::pow(5.0 * delta, 1.0 / v);
  const double base = std::pow(gamma, 1.0 + v) / 2.0;
  const double shift = delta * gamma;
  const double p2 = flavor == HardFlavor::kPBar ? base - shift : base + shift;
  std::vector<RewardModel> arms;
  arms.emplace_back(FiniteSupportModel({{0.0, 1.0 - base}, {1.0 / gamma, base}}));
  arms.emplace_back(FiniteSupportModel({{0.0, 1.0 - p2}, {1.0 / gamma, p2}}));
  return BanditInstance(
      flavor == HardFlavor::kPBar ? "two_arm_hard_P" : "two_arm_hard_Q",
      std::move(arms), v);
}

std::string to_key_value(const BanditInstance& instance) {
  using text::format_double;
  std::ostringstream out;
  out << "name=" << instance.name() << '\n'
      << "K=" << instance.size() << '\n'
      << "v=" << format_double(instance.v()) << '\n'
      << "u=" << format_double(instance.u()) << '\n';
  for (std::size_t a = 0; a < instance.size(); ++a) {
    const std::string key = "arm." + std::to_string(a + 1) + ".";
    std::visit(Overloaded{
                   [&](const ParetoModel& m) {
                     out << key << "model=pareto\n"
                         << key << "alpha=" << format_double(m.alpha()) << '\n'
                         << key << "lambda=" << format_double(m.lam()) << '\n';
                   },
                   [&](const FiniteSupportModel& m) {
                     out << key << "model=finite\n" << key << "atoms=";
                     bool first = true;
                     for (const auto& atom : m.atoms()) {
                       if (!first) out << ',';
                       first = false;
                       out << format_double(atom.value) << ':'
                           << format_double(atom.prob);
                     }
                     out << '\n';
                   },
               },
               instance.arm(a));
    out << key << "mean=" << format_double(instance.means()[a]) << '\n'
        << key << "gap=" << format_double(instance.gaps()[a]) << '\n';
  }
  return out.str();
}

BanditInstance instance_from_key_value(std::string_view body) {
  std::map<std::string, std::string, std::less<>> kv;
  for (auto line : text::split(body, '\n')) {
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("malformed line '" + std::string(line) + "'");
    }
    kv[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing key '" + key + "'");
    return it->second;
  };

  const auto k = text::parse_u64(get("K"));
  const double v = text::parse_double(get("v"));
  std::vector<RewardModel> arms;
  for (std::uint64_t a = 1; a <= k; ++a) {
    const std::string key = "arm." + std::to_string(a) + ".";
    const auto& model = get(key + "model");
    if (model == "pareto") {
      arms.emplace_back(ParetoModel(text::parse_double(get(key + "alpha")),
                                    text::parse_double(get(key + "lambda"))));
    } else if (model == "finite") {
      std::vector<Atom> atoms;
      for (auto item : text::split(get(key + "atoms"), ',')) {
        const auto parts = text::split(item, ':');
        if (parts.size() != 2) {
          throw std::invalid_argument("malformed atom '" + std::string(item) +
                                      "'");
        }
        atoms.push_back(
            {text::parse_double(parts[0]), text::parse_double(parts[1])});
      }
      arms.emplace_back(FiniteSupportModel(std::move(atoms)));
    } else {
      throw std::invalid_argument("unknown arm model '" + model + "'");
    }
  }
  return BanditInstance(get("name"), std::move(arms), v);
}

}  // namespace dpbandit
