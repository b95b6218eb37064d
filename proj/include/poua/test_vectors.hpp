#pragma once

#include <string>

#include "json.hpp"
#include "poua/params.hpp"

namespace poua {

// Cross-implementation vectors; the field layout is documented in
// docs/test_vectors.md.
nlohmann::json alpha_eff_vectors(const ProtocolParams& p);
nlohmann::json lemma1_vectors(const ProtocolParams& p);

// Recomputes every entry; returns the number of mismatching entries.
int verify_alpha_eff_vectors(const nlohmann::json& doc);
int verify_lemma1_vectors(const nlohmann::json& doc);

}  // namespace poua
