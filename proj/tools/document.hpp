#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coherence_kit.h"
#include "json.hpp"

namespace cktool {

using Json = nlohmann::ordered_json;

inline constexpr const char* kFormatVersion = "1";

struct DocumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Locale-independent, 17 significant digits.
std::string format_double(double v);

// Pretty JSON with every float rendered by format_double.
void write_json(std::ostream& os, const Json& j);

Json complex_json(ck_complex c);
Json matrix_json(const ck_matrix& m);
Json state_json(const ck_state& s);

struct ChannelDocument {
  std::vector<ck_matrix> kraus;
  Json metadata = Json::object();  // label, source, target, solution, mixture
};

Json to_json(const ChannelDocument& doc);
// Throws DocumentError on any schema violation.
ChannelDocument parse_document(std::string_view text);
ChannelDocument read_document(const std::string& path);

// "z,r" or "z,r,theta". Returns nullopt on malformed text.
std::optional<ck_state> parse_state_text(std::string_view text);

}  // namespace cktool
