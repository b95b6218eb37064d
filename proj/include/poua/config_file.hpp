#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "poua/params.hpp"

namespace poua {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat "key = value" document. '#' starts a comment; blank lines are ignored.
// Order is preserved and duplicate keys are rejected.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(std::string_view text);

// Shortest decimal text that parses back to the identical double.
std::string format_double(double x);
double parse_double(std::string_view key, std::string_view text);
std::int64_t parse_int(std::string_view key, std::string_view text);
bool parse_bool(std::string_view key, std::string_view text);

// Applies one parameter key. Returns false if the key is not a parameter.
bool apply_param(ProtocolParams& p, std::string_view key, std::string_view value);

// Builds params from `base`, applying every parameter key in `kv`. Keys under
// the "scenario." prefix are left for the scenario loader; any other unknown
// key raises ConfigError.
ProtocolParams params_from_key_values(const KeyValues& kv, ProtocolParams base);

std::string format_params(const ProtocolParams& p);
ProtocolParams parse_params(std::string_view text, ProtocolParams base = {});

std::uint64_t fnv1a64(std::string_view text);

}  // namespace poua
