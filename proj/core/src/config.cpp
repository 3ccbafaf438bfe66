#include "underlay/config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace underlay {

namespace {

double* field_ptr(Scenario& sc, std::string_view key) {
  if (key == "channel.eta") return &sc.channel.eta;
  if (key == "channel.epsilon") return &sc.channel.epsilon;
  if (key == "channel.noise") return &sc.channel.noise;
  if (key == "primary.density") return &sc.primary.density;
  if (key == "primary.power") return &sc.primary.power;
  if (key == "primary.access_prob") return &sc.primary.access_prob;
  if (key == "primary.sinr_threshold") return &sc.primary.sinr_threshold;
  if (key == "secondary.density") return &sc.secondary.density;
  if (key == "secondary.power") return &sc.secondary.power;
  if (key == "secondary.access_prob") return &sc.secondary.access_prob;
  if (key == "secondary.sinr_threshold") return &sc.secondary.sinr_threshold;
  if (key == "weights.aa") return &sc.weights.aa;
  if (key == "weights.ab") return &sc.weights.ab;
  if (key == "weights.ba") return &sc.weights.ba;
  if (key == "weights.bb") return &sc.weights.bb;
  if (key == "qos.pairing_range") return &sc.qos.pairing_range;
  if (key == "qos.min_connection_prob") return &sc.qos.min_connection_prob;
  if (key == "bounds.lo") return &sc.bounds.lo;
  if (key == "bounds.hi") return &sc.bounds.hi;
  return nullptr;
}

bool db_allowed(std::string_view key) {
  return key == "channel.noise" || key == "primary.power" ||
         key == "secondary.power" || key == "primary.sinr_threshold" ||
         key == "secondary.sinr_threshold";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_value(std::string_view raw, std::string_view key, int line) {
  std::string_view text = raw;
  bool db = false;
  if (text.size() >= 2) {
    std::string_view suffix = text.substr(text.size() - 2);
    if ((suffix[0] == 'd' || suffix[0] == 'D') &&
        (suffix[1] == 'b' || suffix[1] == 'B')) {
      db = true;
      text = trim(text.substr(0, text.size() - 2));
    }
  }
  if (text.empty()) fail(line, "missing value");

  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    fail(line, "cannot parse number '" + std::string(raw) + "'");
  }
  if (db) {
    if (!db_allowed(key)) {
      fail(line, "'" + std::string(key) + "' does not accept dB values");
    }
    value = std::pow(10.0, value / 10.0);
  }
  return value;
}

void append_number(std::string& out, double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::unordered_set<std::string> seen;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos
                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    std::string_view body = line;
    if (std::size_t hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) continue;

    std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) {
      fail(line_no, "expected 'key = value'");
    }
    std::string_view key = trim(body.substr(0, eq));
    std::string_view value = trim(body.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");

    double* slot = field_ptr(sc, key);
    if (slot == nullptr) {
      fail(line_no, "unknown key '" + std::string(key) + "'");
    }
    if (!seen.insert(std::string(key)).second) {
      fail(line_no, "duplicate key '" + std::string(key) + "'");
    }
    *slot = parse_value(value, key, line_no);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw ConfigError("error reading config file '" + path + "'");
  }
  return parse_scenario(buf.str());
}

std::string canonical_config(const Scenario& sc) {
  static constexpr std::string_view keys[] = {
      "channel.eta",         "channel.epsilon",
      "channel.noise",       "primary.density",
      "primary.power",       "primary.access_prob",
      "primary.sinr_threshold", "secondary.density",
      "secondary.power",     "secondary.access_prob",
      "secondary.sinr_threshold", "weights.aa",
      "weights.ab",          "weights.ba",
      "weights.bb",          "qos.pairing_range",
      "qos.min_connection_prob", "bounds.lo",
      "bounds.hi",
  };
  Scenario copy = sc;
  std::string out;
  out.reserve(512);
  for (std::string_view key : keys) {
    out.append(key);
    out.append(" = ");
    append_number(out, *field_ptr(copy, key));
    out.push_back('\n');
  }
  return out;
}

std::string scenario_hash(const Scenario& sc) {
  const std::string canon = canonical_config(sc);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::string hex(16, '0');
  static constexpr char digits[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    hex[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return hex;
}

}  // namespace underlay
