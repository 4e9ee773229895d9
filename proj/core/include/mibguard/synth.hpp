#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mibguard/dataset.hpp"

namespace mibguard {

// Per-attribute truncated-at-zero normal parameters.
struct AttrDistribution {
  double mean = 0.0;
  double stddev = 0.0;
};

struct SynthClass {
  ClassLabel label = ClassLabel::Normal;
  std::size_t count = 0;
  std::vector<AttrDistribution> attrs;  // aligned to SynthSpec::schema
};

struct SynthSpec {
  AttributeSchema schema;
  std::vector<SynthClass> classes;
  std::uint32_t seed = 0;
};

// Parses {"classes": [{"label", "count", "attrs": {name: {"mean","stddev"}}}],
// "seed": n}. Attribute order comes from the first class entry; every class
// must cover the same attribute set.
SynthSpec parse_synth_spec(const std::string& json_text);
std::string synth_spec_to_json(const SynthSpec& spec);

// Deterministic given the seed; label distribution matches the spec exactly.
// Values are drawn from per-(class, attribute) normals truncated at zero.
Dataset synth_generate(const SynthSpec& spec);
Dataset synth_generate(const SynthSpec& spec, std::uint32_t seed_override);

}  // namespace mibguard
