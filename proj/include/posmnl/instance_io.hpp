#pragma once

#include <iosfwd>
#include <string>

#include "posmnl/model.hpp"

namespace posmnl {

// JSON instance format:
//   {
//     "name": "example-1",
//     "N": 3, "K": 2,
//     "revenues": [0.8, 0.75, 0.5],
//     "model": {"type": "multiplicative", "v": [...], "theta": [...]}
//   }
// or "model": {"type": "general", "V": [[...], ...]}.
// Indices in files are 1-based; unknown keys are ignored on load.  Numbers are
// written in shortest round-trip form, so save(load(f)) reproduces f byte for
// byte when f was produced by save_instance.

std::string instance_to_json(const Instance& instance);
void save_instance(const Instance& instance, const std::string& path);

// Errors name the offending field (e.g. "model.v[2]") or carry the parser's
// line/byte location for malformed JSON.
Instance instance_from_json(const std::string& text, const std::string& context = "instance");
Instance load_instance(const std::string& path);

}  // namespace posmnl
