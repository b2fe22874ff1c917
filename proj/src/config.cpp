#include "revshell/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace revshell {

ConfigError::ConfigError(int line, const std::string& field, const std::string& what)
    : ValidationError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                      (field.empty() ? std::string() : field + ": ") + what),
      line_(line),
      field_(field) {}

namespace {

// Syntax tree: a block is a list of entries, an entry is either key = value
// or key { ... }.
struct Node {
  std::string key;
  std::string value;
  int line = 0;
  bool block = false;
  std::vector<Node> children;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  std::vector<Node> parse() {
    auto nodes = parse_entries(false);
    return nodes;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;

  bool done() const { return i_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[i_]; }

  void skip_separators() {
    while (!done()) {
      const char c = s_[i_];
      if (c == '\n') {
        ++line_;
        ++i_;
      } else if (c == ';' || std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '#') {
        while (!done() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  void skip_blanks() {
    while (!done() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r')) ++i_;
  }

  std::vector<Node> parse_entries(bool nested) {
    std::vector<Node> out;
    const int open_line = line_;
    while (true) {
      skip_separators();
      if (done()) {
        if (nested) throw ConfigError(open_line, "", "unterminated block, missing '}'");
        return out;
      }
      if (peek() == '}') {
        if (!nested) throw ConfigError(line_, "", "unexpected '}'");
        ++i_;
        return out;
      }
      Node node;
      node.line = line_;
      const std::size_t start = i_;
      while (!done() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' ||
                         s_[i_] == '-' || s_[i_] == '.')) {
        ++i_;
      }
      node.key = s_.substr(start, i_ - start);
      if (node.key.empty()) {
        throw ConfigError(line_, "", std::string("unexpected character '") + peek() + "'");
      }
      skip_blanks();
      if (peek() == '{') {
        ++i_;
        node.block = true;
        node.children = parse_entries(true);
      } else if (peek() == '=') {
        ++i_;
        const std::size_t vstart = i_;
        while (!done() && s_[i_] != '\n' && s_[i_] != ';' && s_[i_] != '}' && s_[i_] != '#') ++i_;
        node.value = s_.substr(vstart, i_ - vstart);
        const auto b = node.value.find_first_not_of(" \t\r");
        const auto e = node.value.find_last_not_of(" \t\r");
        node.value = b == std::string::npos ? std::string() : node.value.substr(b, e - b + 1);
        if (node.value.empty()) throw ConfigError(node.line, node.key, "missing value");
      } else {
        throw ConfigError(line_, node.key, "expected '=' or '{'");
      }
      out.push_back(std::move(node));
    }
  }
};

enum class Dim { none, length, pressure, time, density, accel };

const char* dim_name(Dim d) {
  switch (d) {
    case Dim::none: return "dimensionless";
    case Dim::length: return "length";
    case Dim::pressure: return "pressure";
    case Dim::time: return "time";
    case Dim::density: return "density";
    case Dim::accel: return "acceleration";
  }
  return "?";
}

struct Unit {
  Dim dim;
  double factor;
};

const std::map<std::string, Unit>& unit_table() {
  static const std::map<std::string, Unit> table{
      {"m", {Dim::length, 1.0}},          {"cm", {Dim::length, 1e-2}},
      {"mm", {Dim::length, 1e-3}},        {"Pa", {Dim::pressure, 1.0}},
      {"kPa", {Dim::pressure, 1e3}},      {"MPa", {Dim::pressure, 1e6}},
      {"GPa", {Dim::pressure, 1e9}},      {"s", {Dim::time, 1.0}},
      {"ms", {Dim::time, 1e-3}},          {"us", {Dim::time, 1e-6}},
      {"kg/m3", {Dim::density, 1.0}},     {"kg/m^3", {Dim::density, 1.0}},
      {"m/s2", {Dim::accel, 1.0}},        {"m/s^2", {Dim::accel, 1.0}},
  };
  return table;
}

std::vector<std::string> split_words(const std::string& v) {
  std::istringstream in(v);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

bool to_double(const std::string& w, double& out) {
  const char* b = w.data();
  const char* e = b + w.size();
  if (b != e && *b == '+') ++b;
  const auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

// "x [y ...] [unit]": every number scaled by the trailing unit.
std::vector<double> numbers(const Node& n, const std::string& field, Dim dim) {
  auto words = split_words(n.value);
  double scale = 1.0;
  double probe;
  if (!words.empty() && !to_double(words.back(), probe)) {
    const auto it = unit_table().find(words.back());
    if (it == unit_table().end()) throw ConfigError(n.line, field, "unknown unit '" + words.back() + "'");
    if (it->second.dim != dim) {
      throw ConfigError(n.line, field, "unit '" + words.back() + "' is not a " + dim_name(dim) + " unit");
    }
    scale = it->second.factor;
    words.pop_back();
  }
  std::vector<double> out;
  for (const auto& w : words) {
    double x;
    if (!to_double(w, x)) throw ConfigError(n.line, field, "'" + w + "' is not a number");
    out.push_back(x * scale);
  }
  return out;
}

double number(const Node& n, const std::string& field, Dim dim) {
  const auto v = numbers(n, field, dim);
  if (v.size() != 1) throw ConfigError(n.line, field, "expected one number");
  return v[0];
}

int integer(const Node& n, const std::string& field) {
  int x = 0;
  const char* b = n.value.data();
  const char* e = b + n.value.size();
  const auto r = std::from_chars(b, e, x);
  if (r.ec != std::errc() || r.ptr != e) throw ConfigError(n.line, field, "expected an integer");
  return x;
}

MeridianPoint point(const Node& n, const std::string& field) {
  const auto v = numbers(n, field, Dim::length);
  if (v.size() != 2) throw ConfigError(n.line, field, "expected two coordinates r z");
  return {v[0], v[1]};
}

// Dispatches the entries of a block to handlers, rejecting unknown and
// repeated keys.
using Handler = std::function<void(const Node&)>;

void visit(const std::vector<Node>& nodes, const std::string& prefix,
           const std::map<std::string, Handler>& handlers, const std::set<std::string>& repeatable = {}) {
  std::set<std::string> seen;
  for (const auto& n : nodes) {
    const std::string field = prefix.empty() ? n.key : prefix + "." + n.key;
    const auto it = handlers.find(n.key);
    if (it == handlers.end()) throw ConfigError(n.line, field, "unknown field");
    if (!repeatable.count(n.key) && !seen.insert(n.key).second) {
      throw ConfigError(n.line, field, "given more than once");
    }
    it->second(n);
  }
}

void need_value(const Node& n, const std::string& field) {
  if (n.block) throw ConfigError(n.line, field, "expected a value, found a block");
}

void need_block(const Node& n, const std::string& field) {
  if (!n.block) throw ConfigError(n.line, field, "expected a block");
}

SegmentSpec parse_segment(const Node& blk) {
  SegmentSpec s;
  bool has_from = false, has_to = false, has_center = false;
  std::string kind = "line";
  const std::string p = "geometry.segment";
  visit(blk.children, p,
        {{"kind", [&](const Node& n) { need_value(n, p + ".kind"); kind = n.value; }},
         {"from", [&](const Node& n) { s.from = point(n, p + ".from"); has_from = true; }},
         {"to", [&](const Node& n) { s.to = point(n, p + ".to"); has_to = true; }},
         {"center", [&](const Node& n) { s.center = point(n, p + ".center"); has_center = true; }},
         {"sense", [&](const Node& n) {
            if (n.value == "ccw") s.ccw = true;
            else if (n.value == "cw") s.ccw = false;
            else throw ConfigError(n.line, p + ".sense", "expected ccw or cw");
          }}});
  if (kind == "line") s.kind = SegmentKind::line;
  else if (kind == "arc") s.kind = SegmentKind::arc;
  else throw ConfigError(blk.line, p + ".kind", "expected line or arc, got '" + kind + "'");
  if (!has_from || !has_to) throw ConfigError(blk.line, p, "segment needs from and to");
  if (s.kind == SegmentKind::arc && !has_center) throw ConfigError(blk.line, p, "arc segment needs a center");
  if (s.kind == SegmentKind::line) {
    s.center = {};
    s.ccw = true;
  }
  return s;
}

void check(bool ok, const Node& n, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(n.line, field, what);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  const auto tree = Parser(text).parse();
  RunConfig cfg;
  bool has_geometry = false, has_material = false;
  int geometry_line = 0, analysis_line = 0;

  auto material_block = [&](const Node& blk) {
    need_block(blk, "material");
    has_material = true;
    MaterialSpec& m = cfg.material;
    bool e = false, nu = false, rho = false, h = false;
    visit(blk.children, "material",
          {{"E", [&](const Node& n) { m.E = number(n, "material.E", Dim::pressure); e = true;
                check(m.E > 0, n, "material.E", "must be positive"); }},
           {"nu", [&](const Node& n) { m.nu = number(n, "material.nu", Dim::none); nu = true;
                check(m.nu >= 0.0 && m.nu < 0.5, n, "material.nu",
                      "Poisson ratio " + fmt(m.nu) + " outside the range [0, 0.5)"); }},
           {"rho", [&](const Node& n) { m.rho = number(n, "material.rho", Dim::density); rho = true;
                check(m.rho > 0, n, "material.rho", "must be positive"); }},
           {"h", [&](const Node& n) { m.h = number(n, "material.h", Dim::length); h = true;
                check(m.h > 0, n, "material.h", "must be positive"); }},
           {"yield", [&](const Node& n) { m.yield_point = number(n, "material.yield", Dim::pressure);
                check(m.yield_point >= 0, n, "material.yield", "must not be negative"); }}});
    if (!e || !nu || !rho || !h) throw ConfigError(blk.line, "material", "E, nu, rho and h are required");
  };

  visit(tree, "",
        {{"analysis", [&](const Node& n) {
            need_value(n, "analysis");
            analysis_line = n.line;
            try {
              cfg.analysis = parse_analysis_class(n.value);
            } catch (const ValidationError& e) {
              throw ConfigError(n.line, "analysis", e.what());
            }
          }},
         {"output", [&](const Node& n) { need_value(n, "output"); cfg.output = n.value; }},
         {"support", [&](const Node& n) {
            need_value(n, "support");
            try {
              cfg.support = parse_boundary_condition(n.value);
            } catch (const ValidationError& e) {
              throw ConfigError(n.line, "support", e.what());
            }
          }},
         {"geometry", [&](const Node& blk) {
            need_block(blk, "geometry");
            has_geometry = true;
            geometry_line = blk.line;
            visit(blk.children, "geometry",
                  {{"fill", [&](const Node& n) { cfg.fill = number(n, "geometry.fill", Dim::length); }},
                   {"segment", [&](const Node& n) {
                      need_block(n, "geometry.segment");
                      cfg.segments.push_back(parse_segment(n));
                    }}},
                  {"segment"});
            if (cfg.segments.empty()) throw ConfigError(blk.line, "geometry", "at least one segment required");
          }},
         {"material", material_block},
         {"liquid", [&](const Node& blk) {
            need_block(blk, "liquid");
            LiquidSpec l;
            visit(blk.children, "liquid",
                  {{"rho", [&](const Node& n) { l.rho = number(n, "liquid.rho", Dim::density);
                      check(l.rho >= 0, n, "liquid.rho", "must not be negative"); }},
                   {"g", [&](const Node& n) { l.g = number(n, "liquid.g", Dim::accel);
                      check(l.g >= 0, n, "liquid.g", "must not be negative"); }}});
            cfg.liquid = l;
          }},
         {"discretization", [&](const Node& blk) {
            need_block(blk, "discretization");
            auto& d = cfg.discretization;
            const std::string p = "discretization";
            visit(blk.children, p,
                  {{"n", [&](const Node& n) { d.n = integer(n, p + ".n");
                      check(d.n >= 4, n, p + ".n", "must be at least 4"); }},
                   {"m_max", [&](const Node& n) { d.m_max = integer(n, p + ".m_max");
                      check(d.m_max >= 0, n, p + ".m_max", "must not be negative"); }},
                   {"modes", [&](const Node& n) { d.modes = integer(n, p + ".modes");
                      check(d.modes >= 1, n, p + ".modes", "must be at least 1"); }},
                   {"degree", [&](const Node& n) { d.degree = integer(n, p + ".degree");
                      check(d.degree >= 3, n, p + ".degree", "must be at least 3"); }},
                   {"dt", [&](const Node& n) { d.dt = number(n, p + ".dt", Dim::time);
                      check(d.dt >= 0, n, p + ".dt", "must not be negative (0 selects automatically)"); }},
                   {"t_end", [&](const Node& n) { d.t_end = number(n, p + ".t_end", Dim::time);
                      check(d.t_end > 0, n, p + ".t_end", "must be positive"); }},
                   {"damping", [&](const Node& n) { d.damping = number(n, p + ".damping", Dim::none);
                      check(d.damping >= 0 && d.damping < 1, n, p + ".damping", "must lie in [0, 1)"); }}});
          }},
         {"load", [&](const Node& blk) {
            need_block(blk, "load");
            LoadSpec l;
            bool q0 = false, tau = false;
            visit(blk.children, "load",
                  {{"q0", [&](const Node& n) { l.q0 = number(n, "load.q0", Dim::pressure); q0 = true; }},
                   {"tau", [&](const Node& n) { l.tau = number(n, "load.tau", Dim::time); tau = true;
                      check(l.tau > 0, n, "load.tau", "must be positive"); }},
                   {"footprint", [&](const Node& n) {
                      need_value(n, "load.footprint");
                      l.footprint.clear();
                      if (n.value == "all") return;
                      for (const auto& w : split_words(n.value)) {
                        int k = 0;
                        const auto r = std::from_chars(w.data(), w.data() + w.size(), k);
                        if (r.ec != std::errc() || r.ptr != w.data() + w.size() || k < 0) {
                          throw ConfigError(n.line, "load.footprint", "expected 'all' or segment indices");
                        }
                        l.footprint.push_back(k);
                      }
                    }}});
            if (!q0 || !tau) throw ConfigError(blk.line, "load", "q0 and tau are required");
            cfg.load = l;
          }},
         {"probes", [&](const Node& blk) {
            need_block(blk, "probes");
            std::set<std::string> names;
            for (const auto& n : blk.children) {
              const std::string field = "probes." + n.key;
              need_value(n, field);
              if (!names.insert(n.key).second) throw ConfigError(n.line, field, "duplicate probe name");
              ProbeSpec p;
              p.name = n.key;
              auto words = split_words(n.value);
              if (!words.empty() && words[0] == "s") {
                Node rest = n;
                rest.value = n.value.substr(n.value.find('s') + 1);
                p.arclength = number(rest, field, Dim::length);
                check(*p.arclength >= 0, n, field, "arclength must not be negative");
              } else {
                p.point = point(n, field);
                check(p.point->r >= 0, n, field, "r must not be negative");
              }
              cfg.probes.push_back(p);
            }
          }}});

  if (!has_geometry) throw ConfigError(0, "geometry", "geometry block required");
  if (!has_material) throw ConfigError(0, "material", "material block required");
  if (needs_liquid(cfg.analysis)) {
    if (!cfg.liquid) throw ConfigError(analysis_line, "liquid", "liquid block required for this analysis class");
    if (!cfg.fill) throw ConfigError(geometry_line, "geometry.fill", "fill level required for this analysis class");
    if (!(cfg.liquid->rho >= 0)) throw ConfigError(analysis_line, "liquid.rho", "must not be negative");
  }
  if (needs_load(cfg.analysis) && !cfg.load) {
    throw ConfigError(analysis_line, "load", "load block required for this analysis class");
  }
  if (cfg.load) {
    for (int k : cfg.load->footprint) {
      if (k >= static_cast<int>(cfg.segments.size())) {
        throw ConfigError(0, "load.footprint", "segment index " + std::to_string(k) + " out of range");
      }
    }
  }
  try {
    (void)build_meridian(cfg);
  } catch (const ValidationError& e) {
    throw ConfigError(geometry_line, "geometry", e.what());
  } catch (const DomainError& e) {
    throw ConfigError(geometry_line, "geometry", e.what());
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open configuration file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

Meridian build_meridian(const RunConfig& config) {
  const bool liquid = needs_liquid(config.analysis) || (config.fill && config.liquid);
  return build_meridian(config.segments, liquid ? config.fill : std::nullopt);
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream o;
  o << "# resolved configuration, SI units\n";
  o << "analysis = " << to_string(c.analysis) << "\n";
  o << "output = " << c.output << "\n";
  o << "support = "
    << (c.support == BoundaryCondition::top_bottom_fixed ? "a"
        : c.support == BoundaryCondition::bottom_fixed   ? "b"
                                                         : "none")
    << "\n";
  o << "geometry {\n";
  if (c.fill) o << "  fill = " << fmt(*c.fill) << "\n";
  for (const auto& s : c.segments) {
    o << "  segment { kind = " << (s.kind == SegmentKind::line ? "line" : "arc") << "; from = " << fmt(s.from.r)
      << " " << fmt(s.from.z) << "; to = " << fmt(s.to.r) << " " << fmt(s.to.z);
    if (s.kind == SegmentKind::arc) {
      o << "; center = " << fmt(s.center.r) << " " << fmt(s.center.z) << "; sense = " << (s.ccw ? "ccw" : "cw");
    }
    o << " }\n";
  }
  o << "}\n";
  const auto& m = c.material;
  o << "material { E = " << fmt(m.E) << "; nu = " << fmt(m.nu) << "; rho = " << fmt(m.rho) << "; h = " << fmt(m.h)
    << "; yield = " << fmt(m.yield_point) << " }\n";
  if (c.liquid) o << "liquid { rho = " << fmt(c.liquid->rho) << "; g = " << fmt(c.liquid->g) << " }\n";
  const auto& d = c.discretization;
  o << "discretization { n = " << d.n << "; m_max = " << d.m_max << "; modes = " << d.modes << "; degree = "
    << d.degree << "; dt = " << fmt(d.dt) << "; t_end = " << fmt(d.t_end) << "; damping = " << fmt(d.damping)
    << " }\n";
  if (c.load) {
    o << "load { q0 = " << fmt(c.load->q0) << "; tau = " << fmt(c.load->tau) << "; footprint =";
    if (c.load->footprint.empty()) o << " all";
    for (int k : c.load->footprint) o << " " << k;
    o << " }\n";
  }
  if (!c.probes.empty()) {
    o << "probes {\n";
    for (const auto& p : c.probes) {
      if (p.point) o << "  " << p.name << " = " << fmt(p.point->r) << " " << fmt(p.point->z) << "\n";
      else o << "  " << p.name << " = s " << fmt(*p.arclength) << "\n";
    }
    o << "}\n";
  }
  return o.str();
}

}  // namespace revshell
