#include "biochar/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "biochar/format.hpp"

namespace biochar {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

bool parse_number(std::string_view token, double& out) {
  std::string buf(token);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && !buf.empty();
}

int require_species(const Mechanism& m, std::string_view name, int line) {
  int idx = m.species_index(name);
  if (idx < 0) throw ParseError(line, "unknown species '" + std::string(name) + "'");
  return idx;
}

// Parses one side of a reaction into a coefficient map; terms are separated
// by '+', each term is "[coeff] Name".
std::map<int, double> parse_side(const Mechanism& m, std::string_view side, int line) {
  std::map<int, double> coeffs;
  side = trim(side);
  if (side.empty()) return coeffs;
  for (std::string_view term : split_on(side, '+')) {
    term = trim(term);
    if (term.empty()) throw ParseError(line, "empty reaction term");
    auto tokens = split_ws(term);
    double coeff = 1.0;
    std::string_view name;
    if (tokens.size() == 1) {
      name = tokens[0];
    } else if (tokens.size() == 2) {
      if (!parse_number(tokens[0], coeff)) {
        throw ParseError(line, "bad coefficient '" + std::string(tokens[0]) + "'");
      }
      name = tokens[1];
    } else {
      throw ParseError(line, "malformed term '" + std::string(term) + "'");
    }
    if (coeff < 0.0) {
      throw ParseError(line, "negative coefficient '" + std::string(tokens[0]) + "'");
    }
    int idx = require_species(m, name, line);
    if (coeff != 0.0) coeffs[idx] += coeff;
  }
  return coeffs;
}

// Parses a trailing "@rate(name[, arg=Species])" clause.
void parse_rate_clause(const Mechanism& m, std::string_view clause, Reaction& rx,
                       const std::map<std::string, RateLaw>& rate_laws, int line) {
  if (clause.substr(0, 6) != "@rate(" || clause.back() != ')') {
    throw ParseError(line, "malformed rate clause '" + std::string(clause) + "'");
  }
  std::string_view inner = clause.substr(6, clause.size() - 7);
  auto parts = split_on(inner, ',');
  if (parts.empty() || parts.size() > 2) {
    throw ParseError(line, "malformed rate clause '" + std::string(clause) + "'");
  }
  std::string_view name = trim(parts[0]);
  if (!is_identifier(name)) {
    throw ParseError(line, "bad rate-law name '" + std::string(name) + "'");
  }
  rx.rate_name = std::string(name);
  if (auto it = rate_laws.find(rx.rate_name); it != rate_laws.end()) {
    rx.rate = it->second;
  }
  if (parts.size() == 2) {
    std::string_view arg = trim(parts[1]);
    if (arg.substr(0, 4) != "arg=") {
      throw ParseError(line, "expected 'arg=Species' in rate clause");
    }
    rx.rate_argument = require_species(m, trim(arg.substr(4)), line);
  }
}

}  // namespace

Mechanism parse_mechanism(std::string_view text,
                          const std::map<std::string, RateLaw>& rate_laws) {
  Mechanism m;
  int line_no = 0;
  for (std::string_view raw : split_on(text, '\n')) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    std::string_view line = trim(raw);
    if (line.empty()) continue;

    auto tokens = split_ws(line);
    if (tokens[0] == "species") {
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (!is_identifier(tokens[i])) {
          throw ParseError(line_no, "bad species name '" + std::string(tokens[i]) + "'");
        }
        if (m.species_index(tokens[i]) >= 0) {
          throw ParseError(line_no, "duplicate species '" + std::string(tokens[i]) + "'");
        }
        m.species.push_back({std::string(tokens[i]), static_cast<int>(m.species.size())});
      }
      continue;
    }

    if (tokens[0] == "source") {
      // source Name = value
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'source Name = value'");
      auto head = split_ws(line.substr(0, eq));
      if (head.size() != 2) throw ParseError(line_no, "expected 'source Name = value'");
      int idx = require_species(m, head[1], line_no);
      double value = 0.0;
      if (!parse_number(trim(line.substr(eq + 1)), value)) {
        throw ParseError(line_no, "bad source value");
      }
      if (value < 0.0) throw ParseError(line_no, "negative source value");
      if (m.sources.count(idx)) {
        throw ParseError(line_no, "duplicate source for '" + std::string(head[1]) + "'");
      }
      m.sources[idx] = value;
      continue;
    }

    // Reaction line.
    Reaction rx;
    std::string_view body = line;
    if (auto at = body.find('@'); at != std::string_view::npos) {
      parse_rate_clause(m, trim(body.substr(at)), rx, rate_laws, line_no);
      body = trim(body.substr(0, at));
    }
    auto arrow = body.find("->");
    if (arrow == std::string_view::npos) throw ParseError(line_no, "missing '->'");
    if (body.find("->", arrow + 2) != std::string_view::npos) {
      throw ParseError(line_no, "more than one '->'");
    }
    rx.reactant_coeffs = parse_side(m, body.substr(0, arrow), line_no);
    rx.product_coeffs = parse_side(m, body.substr(arrow + 2), line_no);
    if (rx.reactant_coeffs.empty() && rx.product_coeffs.empty()) {
      throw ParseError(line_no, "reaction has no species");
    }
    m.reactions.push_back(std::move(rx));
  }
  return m;
}

namespace {

void print_side(std::ostringstream& out, const Mechanism& m,
                const std::map<int, double>& coeffs) {
  bool first = true;
  for (const auto& [idx, coeff] : coeffs) {
    if (!first) out << " + ";
    first = false;
    if (coeff != 1.0) out << format_double(coeff) << ' ';
    out << m.species[idx].name;
  }
}

}  // namespace

std::string print_mechanism(const Mechanism& m) {
  std::ostringstream out;
  out << "species";
  for (const Species& s : m.species) out << ' ' << s.name;
  out << '\n';
  for (const Reaction& rx : m.reactions) {
    std::ostringstream line;
    print_side(line, m, rx.reactant_coeffs);
    line << " ->";
    if (!rx.product_coeffs.empty()) {
      line << ' ';
      print_side(line, m, rx.product_coeffs);
    }
    if (!rx.rate_name.empty()) {
      line << " @rate(" << rx.rate_name;
      if (rx.rate_argument) line << ", arg=" << m.species[*rx.rate_argument].name;
      line << ')';
    }
    out << trim(line.str()) << '\n';
  }
  for (const auto& [idx, value] : m.sources) {
    out << "source " << m.species[idx].name << " = " << format_double(value) << '\n';
  }
  return out.str();
}

}  // namespace biochar
