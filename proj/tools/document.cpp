#include "document.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cktool {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) v = 0.0;  // "-0" would come back as integer 0
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

void emit(std::ostream& os, const Json& j, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        emit(os, it.value(), depth + 1);
      }
      os << '\n' << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Scalars and [re, im] pairs stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
        return e.is_primitive() ||
               (e.is_array() && std::all_of(e.begin(), e.end(), [](const Json& x) { return x.is_primitive(); }));
      });
      os << '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (flat ? ", " : ",");
        first = false;
        if (!flat) os << '\n' << pad;
        emit(os, e, flat ? depth : depth + 1);
      }
      if (!flat) os << '\n' << close;
      os << ']';
      return;
    }
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

double number_at(const Json& j, const char* what) {
  if (!j.is_number()) throw DocumentError(std::string(what) + " must be a number");
  return j.get<double>();
}

ck_matrix parse_matrix(const Json& j, std::size_t index) {
  const std::string where = "kraus[" + std::to_string(index) + "]";
  if (!j.is_array() || j.size() != 2) throw DocumentError(where + " must be a 2x2 matrix");
  ck_matrix m{};
  for (int r = 0; r < 2; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || row.size() != 2) throw DocumentError(where + " must be a 2x2 matrix");
    for (int c = 0; c < 2; ++c) {
      const Json& e = row[c];
      if (!e.is_array() || e.size() != 2) throw DocumentError(where + " entries must be [re, im] pairs");
      m.m[r][c] = {number_at(e[0], "matrix entry"), number_at(e[1], "matrix entry")};
    }
  }
  return m;
}

}  // namespace

void write_json(std::ostream& os, const Json& j) {
  emit(os, j, 0);
  os << '\n';
}

Json complex_json(ck_complex c) { return Json::array({c.re, c.im}); }

Json matrix_json(const ck_matrix& m) {
  Json out = Json::array();
  for (const auto& row : m.m) out.push_back(Json::array({complex_json(row[0]), complex_json(row[1])}));
  return out;
}

Json state_json(const ck_state& s) { return Json::array({s.z, s.r, s.theta}); }

Json to_json(const ChannelDocument& doc) {
  Json out = Json::object();
  out["format_version"] = kFormatVersion;
  for (auto it = doc.metadata.begin(); it != doc.metadata.end(); ++it) out[it.key()] = it.value();
  Json kraus = Json::array();
  for (const auto& m : doc.kraus) kraus.push_back(matrix_json(m));
  out["kraus"] = std::move(kraus);
  return out;
}

ChannelDocument parse_document(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DocumentError(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DocumentError("document must be a JSON object");
  if (!j.contains("format_version") || !j["format_version"].is_string()) {
    throw DocumentError("missing format_version");
  }
  if (j["format_version"].get<std::string>() != kFormatVersion) {
    throw DocumentError("unsupported format_version " + j["format_version"].get<std::string>());
  }
  if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty()) {
    throw DocumentError("kraus must be a non-empty list of matrices");
  }
  ChannelDocument doc;
  for (std::size_t i = 0; i < j["kraus"].size(); ++i) doc.kraus.push_back(parse_matrix(j["kraus"][i], i));
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "format_version" && it.key() != "kraus") doc.metadata[it.key()] = it.value();
  }
  return doc;
}

ChannelDocument read_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DocumentError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

std::optional<ck_state> parse_state_text(std::string_view text) {
  double v[3] = {0.0, 0.0, 0.0};
  int count = 0;
  std::size_t pos = 0;
  while (true) {
    if (count == 3) return std::nullopt;
    const std::size_t comma = text.find(',', pos);
    const std::string_view field = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, v[count]);
    if (field.empty() || res.ec != std::errc() || res.ptr != last) return std::nullopt;
    ++count;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (count < 2) return std::nullopt;
  return ck_state{v[0], v[1], v[2]};
}

}  // namespace cktool
