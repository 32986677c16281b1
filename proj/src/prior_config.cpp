#include "ccmsel/prior_config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ccmsel/errors.hpp"

namespace ccmsel {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double parse_number(std::string_view s, long line) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError("line " + std::to_string(line) + ": expected a number, got '" + t + "'", line);
  }
  return v;
}

std::vector<double> parse_list(std::string_view s, std::size_t expected, long line) {
  std::string t = trim(s);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw ParseError("line " + std::to_string(line) + ": unclosed '['", line);
    t = t.substr(1, t.size() - 2);
  }
  std::vector<double> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, line));
  if (out.size() != expected) {
    throw ParseError("line " + std::to_string(line) + ": expected " + std::to_string(expected) +
                         " comma-separated values, got " + std::to_string(out.size()),
                     line);
  }
  return out;
}

void fmt(std::ostream& os, double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  os.write(buf.data(), ptr - buf.data());
}

}  // namespace

ModelSpec PriorConfig::spec(ModelId id) const {
  auto it = specs.find(id);
  if (it != specs.end()) return it->second;
  ModelSpec s;
  s.id = id;
  return s;
}

PriorConfig parse_prior_config(std::string_view text) {
  PriorConfig cfg;
  ModelSpec* cur = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  long line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("line " + std::to_string(line) + ": bad section header", line);
      ModelId id;
      try {
        id = model_id_from_string(trim(std::string_view(s).substr(1, s.size() - 2)));
      } catch (const DomainError& e) {
        throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
      }
      cur = &cfg.specs[id];
      cur->id = id;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(line) + ": expected key = value", line);
    if (!cur) throw ParseError("line " + std::to_string(line) + ": key outside a [model] section", line);
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string_view val = std::string_view(s).substr(eq + 1);
    auto bad_key = [&] {
      return ParseError("line " + std::to_string(line) + ": unknown key '" + key + "' for " +
                            std::string(to_string(cur->id)),
                        line);
    };
    if (key == "prior_model_prob") {
      cur->prior_model_prob = parse_number(val, line);
      cfg.explicit_model_prob.insert(cur->id);
      continue;
    }
    switch (cur->id) {
      case ModelId::M1: throw bad_key();
      case ModelId::M2:
        if (key == "alpha") cur->beta_prior.alpha = parse_number(val, line);
        else if (key == "beta") cur->beta_prior.beta = parse_number(val, line);
        else throw bad_key();
        break;
      case ModelId::M3:
        if (key == "mu") cur->lambda_prior.mu = parse_number(val, line);
        else if (key == "sigma") cur->lambda_prior.sigma = parse_number(val, line);
        else throw bad_key();
        break;
      case ModelId::M4: {
        static const char* names[3] = {"pp", "ps", "ss"};
        bool hit = false;
        for (std::size_t b = 0; b < 3; ++b) {
          if (key == std::string("alpha_") + names[b]) {
            cur->block_priors[b].alpha = parse_number(val, line);
            hit = true;
          } else if (key == std::string("beta_") + names[b]) {
            cur->block_priors[b].beta = parse_number(val, line);
            hit = true;
          }
        }
        if (!hit) throw bad_key();
        break;
      }
      case ModelId::M5:
        if (key == "mean") {
          const auto v = parse_list(val, 3, line);
          cur->mvn_prior.mean = Eigen::Vector3d(v[0], v[1], v[2]);
        } else if (key == "cov") {
          const auto v = parse_list(val, 9, line);
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cur->mvn_prior.cov(i, j) = v[static_cast<std::size_t>(3 * i + j)];
        } else {
          throw bad_key();
        }
        break;
    }
  }
  for (const auto& [id, spec] : cfg.specs) spec.validate();
  return cfg;
}

PriorConfig read_prior_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open prior config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_prior_config(ss.str());
}

std::string format_prior_config(const PriorConfig& config) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [id, s] : config.specs) {
    if (!first) os << '\n';
    first = false;
    os << '[' << to_string(id) << "]\n";
    switch (id) {
      case ModelId::M1: break;
      case ModelId::M2:
        os << "alpha = "; fmt(os, s.beta_prior.alpha); os << '\n';
        os << "beta = "; fmt(os, s.beta_prior.beta); os << '\n';
        break;
      case ModelId::M3:
        os << "mu = "; fmt(os, s.lambda_prior.mu); os << '\n';
        os << "sigma = "; fmt(os, s.lambda_prior.sigma); os << '\n';
        break;
      case ModelId::M4: {
        static const char* names[3] = {"pp", "ps", "ss"};
        for (std::size_t b = 0; b < 3; ++b) {
          os << "alpha_" << names[b] << " = "; fmt(os, s.block_priors[b].alpha); os << '\n';
          os << "beta_" << names[b] << " = "; fmt(os, s.block_priors[b].beta); os << '\n';
        }
        break;
      }
      case ModelId::M5:
        os << "mean = ";
        for (int i = 0; i < 3; ++i) {
          if (i) os << ", ";
          fmt(os, s.mvn_prior.mean[i]);
        }
        os << "\ncov = ";
        for (int i = 0; i < 9; ++i) {
          if (i) os << ", ";
          fmt(os, s.mvn_prior.cov(i / 3, i % 3));
        }
        os << '\n';
        break;
    }
    if (config.explicit_model_prob.count(id)) {
      os << "prior_model_prob = "; fmt(os, s.prior_model_prob); os << '\n';
    }
  }
  return os.str();
}

}  // namespace ccmsel
