#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "carpetperc/cli.hpp"
#include "carpetperc/error.hpp"

namespace carpetperc::cli {

using nlohmann::json;

#define CARPET_CONFIG_FIELDS(X)                                                                                \
  X(subcommand, "subcommand") X(seed, "seed") X(out, "out") X(format, "format") X(workers, "workers")          \
  X(max_level, "max_level") X(generator, "generator") X(n, "n") X(cols, "cols") X(rows, "rows") X(p, "p")      \
  X(samples, "samples") X(event, "event") X(dual_overlay, "dual_overlay") X(x, "x") X(y, "y") X(m0, "m0")      \
  X(p_grid, "p_grid") X(n_list, "n_list") X(coupled, "coupled") X(tol, "tol")              \
  X(dual, "dual") X(h, "h") X(budget, "budget") X(conditional, "conditional") X(table, "table") X(k, "k")     \
  X(grid, "grid") X(big_n, "N") X(m, "m") X(audit, "audit") X(sample, "sample")

std::string config_to_json(const RunConfig& c) {
  json j = json::object();
#define X(field, key) j[key] = c.field;
  CARPET_CONFIG_FIELDS(X)
#undef X
  return j.dump(2) + "\n";
}

namespace {

std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

RunConfig from_object(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "config must be a JSON object");
  RunConfig c;
  std::size_t used = 0;
#define X(field, key)                                                                                  \
  if (j.contains(key)) {                                                                               \
    try {                                                                                              \
      c.field = j.at(key).get<decltype(c.field)>();                                                    \
    } catch (const json::exception&) {                                                                 \
      throw Error(ErrorKind::Parse, std::string("config key '") + key + "' has the wrong type");       \
    }                                                                                                  \
    ++used;                                                                                            \
  }
  CARPET_CONFIG_FIELDS(X)
#undef X
  if (used != j.size()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
#define X(field, name) known = known || it.key() == name;
      CARPET_CONFIG_FIELDS(X)
#undef X
      if (!known) throw Error(ErrorKind::Parse, "unknown config key '" + it.key() + "'");
    }
  }
  return c;
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, "invalid JSON at " + position(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (j.is_object() && j.contains("config") && j.contains("artifacts")) return from_object(j.at("config"));
  return from_object(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return config_from_json(s.str());
}

void save_config(const RunConfig& c, const std::string& path) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw Error(ErrorKind::Io, "cannot write " + path);
  o << config_to_json(c);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw Error(ErrorKind::Parse, "not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw Error(ErrorKind::Parse, "grid '" + text + "' must be start:stop:step");
    const double a = to_double(parts[0]), b = to_double(parts[1]), step = to_double(parts[2]);
    if (!(step > 0) || b < a) throw Error(ErrorKind::Parse, "grid '" + text + "' needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
    if (count > 1000000) throw Error(ErrorKind::Parse, "grid '" + text + "' is too fine");
    std::vector<double> out;
    for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(to_double(s));
  if (out.empty()) throw Error(ErrorKind::Parse, "empty grid");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : split(text, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) throw Error(ErrorKind::Parse, "not an integer: '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::Parse, "empty integer list");
  return out;
}

}  // namespace carpetperc::cli
