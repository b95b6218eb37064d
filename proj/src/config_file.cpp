#include "poua/config_file.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace poua {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key);
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), end};
}

double parse_double(std::string_view key, std::string_view text) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ConfigError(std::string(key) + ": not a number: " + std::string(text));
  }
  return x;
}

std::int64_t parse_int(std::string_view key, std::string_view text) {
  std::int64_t x = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ConfigError(std::string(key) + ": not an integer: " + std::string(text));
  }
  return x;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(std::string(key) + ": not a boolean: " + std::string(text));
}

bool apply_param(ProtocolParams& p, std::string_view key, std::string_view value) {
  auto d = [&](double& field) { field = parse_double(key, value); return true; };
  auto i = [&](std::int64_t& field) { field = parse_int(key, value); return true; };
  if (key == "r_min") return d(p.r_min);
  if (key == "r_max") return d(p.r_max);
  if (key == "eta") return d(p.eta);
  if (key == "lambda") return d(p.lambda);
  if (key == "epoch_length") return i(p.epoch_length);
  if (key == "alpha") return d(p.alpha);
  if (key == "beta") return d(p.beta);
  if (key == "tau_burn") return d(p.tau_burn);
  if (key == "burn_destination") {
    try {
      p.burn_destination = parse_burn_destination(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    return true;
  }
  if (key == "g_max") return d(p.g_max);
  if (key == "t_warmup") return i(p.t_warmup);
  if (key == "t_ramp") return i(p.t_ramp);
  if (key == "t_unbond") return i(p.t_unbond);
  if (key == "fee_min") return d(p.fee_min);
  if (key == "severity_a1") return d(p.severities.a1);
  if (key == "severity_a2") return d(p.severities.a2);
  if (key == "severity_a3") return d(p.severities.a3);
  if (key == "severity_eq") return d(p.severity_eq);
  if (key == "graph_distance_d") {
    p.graph_distance_d = static_cast<int>(parse_int(key, value));
    return true;
  }
  if (key == "rho_gov") return d(p.rho_gov);
  return false;
}

ProtocolParams params_from_key_values(const KeyValues& kv, ProtocolParams base) {
  for (const auto& [key, value] : kv) {
    if (key.rfind("scenario.", 0) == 0) continue;
    if (!apply_param(base, key, value)) throw ConfigError("unknown key: " + key);
  }
  return base;
}

std::string format_params(const ProtocolParams& p) {
  std::ostringstream out;
  auto line = [&](const char* k, const std::string& v) { out << k << " = " << v << '\n'; };
  line("r_min", format_double(p.r_min));
  line("r_max", format_double(p.r_max));
  line("eta", format_double(p.eta));
  line("lambda", format_double(p.lambda));
  line("epoch_length", std::to_string(p.epoch_length));
  line("alpha", format_double(p.alpha));
  line("beta", format_double(p.beta));
  line("tau_burn", format_double(p.tau_burn));
  line("burn_destination", std::string(to_string(p.burn_destination)));
  line("g_max", format_double(p.g_max));
  line("t_warmup", std::to_string(p.t_warmup));
  line("t_ramp", std::to_string(p.t_ramp));
  line("t_unbond", std::to_string(p.t_unbond));
  line("fee_min", format_double(p.fee_min));
  line("severity_a1", format_double(p.severities.a1));
  line("severity_a2", format_double(p.severities.a2));
  line("severity_a3", format_double(p.severities.a3));
  line("severity_eq", format_double(p.severity_eq));
  line("graph_distance_d", std::to_string(p.graph_distance_d));
  line("rho_gov", format_double(p.rho_gov));
  return out.str();
}

ProtocolParams parse_params(std::string_view text, ProtocolParams base) {
  return params_from_key_values(parse_key_values(text), std::move(base));
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace poua
