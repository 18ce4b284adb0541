#include "symlift/model_io.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

#include "symlift/errors.hpp"

namespace symlift {

namespace {

struct Token {
  std::string_view text;
  std::size_t column; // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    if (i >= line.size() || line[i] == '#')
      break;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
           line[i] != '#')
      ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

class LineParser {
public:
  LineParser(std::size_t line_no, std::vector<Token> tokens)
      : line_(line_no), tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  std::size_t remaining() const { return tokens_.size() - pos_; }

  [[noreturn]] void fail(const std::string &what) const {
    const auto col = pos_ < tokens_.size() ? tokens_[pos_].column
                     : tokens_.empty()     ? 1
                                           : tokens_.back().column + tokens_.back().text.size();
    throw ParseError(line_, col, what);
  }
  [[noreturn]] void fail_at(std::size_t index, const std::string &what) const {
    throw ParseError(line_, tokens_[index].column, what);
  }

  std::size_t index() const { return pos_; }
  std::string_view peek() const { return done() ? std::string_view{} : tokens_[pos_].text; }

  std::string_view word(const char *expected) {
    if (done())
      fail(std::string("expected ") + expected);
    return tokens_[pos_++].text;
  }

  long long integer(const char *expected) {
    if (done())
      fail(std::string("expected ") + expected);
    const auto t = tokens_[pos_].text;
    long long v = 0;
    const char *first = t.data();
    if (!t.empty() && t[0] == '+')
      ++first;
    auto [p, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || first == t.data() + t.size())
      fail(std::string("expected ") + expected + ", got '" + std::string(t) + "'");
    ++pos_;
    return v;
  }

  double real(const char *expected) {
    if (done())
      fail(std::string("expected ") + expected);
    const auto t = tokens_[pos_].text;
    double v = 0;
    const char *first = t.data();
    if (!t.empty() && t[0] == '+')
      ++first;
    auto [p, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
      fail(std::string("expected finite ") + expected + ", got '" + std::string(t) + "'");
    ++pos_;
    return v;
  }

  VarId variable(std::size_t num_vars) {
    const auto v = integer("variable");
    if (v < 1 || static_cast<std::size_t>(v) > num_vars)
      fail_at(pos_ - 1, "variable " + std::to_string(v) + " out of range 1.." +
                            std::to_string(num_vars));
    return static_cast<VarId>(v - 1);
  }

private:
  std::size_t line_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

} // namespace

Model parse_model(std::string_view text) {
  std::optional<std::size_t> num_vars;
  std::vector<WeightedClause> clauses;
  std::vector<SymFactor> factors;
  std::optional<Evidence> evidence;
  std::size_t line_no = 0, last_line = 1;

  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    LineParser lp(line_no, tokenize(line));
    if (lp.done())
      continue;
    last_line = line_no;
    const auto directive = lp.word("directive");

    if (directive == "vars") {
      if (num_vars)
        lp.fail_at(0, "duplicate vars line");
      const auto n = lp.integer("variable count");
      if (n < 1)
        lp.fail_at(1, "variable count must be positive");
      num_vars = static_cast<std::size_t>(n);
    } else if (!num_vars) {
      lp.fail_at(0, "'vars' must come first");
    } else if (directive == "clause") {
      WeightedClause c{Weight::hard(), {}};
      if (lp.done())
        lp.fail("expected weight");
      if (lp.peek() == "hard")
        lp.word("weight");
      else
        c.weight = Weight::finite(lp.real("weight"));
      if (lp.done())
        lp.fail("clause needs at least one literal");
      std::vector<std::uint8_t> seen(*num_vars, 0);
      while (!lp.done()) {
        const auto at = lp.index();
        const auto lit = lp.integer("literal");
        const auto v = lit < 0 ? -lit : lit;
        if (lit == 0 || static_cast<std::size_t>(v) > *num_vars)
          lp.fail_at(at, "literal " + std::to_string(lit) + " out of range");
        if (seen[v - 1])
          lp.fail_at(at, "duplicate literal on variable " + std::to_string(v));
        seen[v - 1] = 1;
        c.literals.push_back({static_cast<VarId>(v - 1), lit > 0});
      }
      clauses.push_back(std::move(c));
    } else if (directive == "factor") {
      const auto k = lp.integer("factor arity");
      if (k < 1)
        lp.fail_at(1, "factor arity must be positive");
      if (lp.remaining() != static_cast<std::size_t>(2 * k + 1))
        lp.fail("factor of arity " + std::to_string(k) + " needs " + std::to_string(k) +
                " variables and " + std::to_string(k + 1) + " table entries");
      SymFactor f;
      std::vector<std::uint8_t> seen(*num_vars, 0);
      for (long long i = 0; i < k; ++i) {
        const auto at = lp.index();
        const auto v = lp.variable(*num_vars);
        if (seen[v])
          lp.fail_at(at, "duplicate variable in factor scope");
        seen[v] = 1;
        f.scope.push_back(v);
      }
      for (long long i = 0; i <= k; ++i)
        f.count_table.push_back(lp.real("table entry"));
      factors.push_back(std::move(f));
    } else if (directive == "evidence") {
      if (evidence)
        lp.fail_at(0, "duplicate evidence line");
      const auto kind = lp.word("'true' or 'card'");
      if (kind == "true") {
        evidence = Evidence::always();
      } else if (kind == "card") {
        const auto cmp_at = lp.index();
        const auto cmp_word = lp.word("comparator");
        Comparator cmp;
        if (cmp_word == "eq")
          cmp = Comparator::Eq;
        else if (cmp_word == "le")
          cmp = Comparator::Le;
        else if (cmp_word == "ge")
          cmp = Comparator::Ge;
        else
          lp.fail_at(cmp_at, "comparator must be eq, le or ge");
        const auto bound_at = lp.index();
        const auto bound = lp.integer("bound");
        if (bound < 0)
          lp.fail_at(bound_at, "bound must be non-negative");
        std::vector<VarId> subset;
        std::vector<std::uint8_t> seen(*num_vars, 0);
        while (!lp.done()) {
          const auto at = lp.index();
          const auto v = lp.variable(*num_vars);
          if (seen[v])
            lp.fail_at(at, "duplicate variable in evidence subset");
          seen[v] = 1;
          subset.push_back(v);
        }
        if (static_cast<std::size_t>(bound) > subset.size())
          lp.fail_at(bound_at, "bound exceeds subset size");
        evidence = Evidence::cardinality(std::move(subset), cmp, static_cast<std::size_t>(bound));
      } else {
        lp.fail_at(1, "evidence must be 'true' or 'card'");
      }
    } else {
      lp.fail_at(0, "unknown directive '" + std::string(directive) + "'");
    }
    if (!lp.done())
      lp.fail("unexpected trailing token");
  }

  if (!num_vars)
    throw ParseError(line_no == 0 ? 1 : line_no, 1, "missing 'vars' line");
  try {
    return Model(*num_vars, std::move(clauses), std::move(factors),
                 evidence.value_or(Evidence::always()));
  } catch (const StructuralError &e) {
    throw ParseError(last_line, 1, e.what());
  }
}

std::string serialize_model(const Model &m) {
  std::string out = "vars " + std::to_string(m.num_vars()) + "\n";
  for (const auto &c : m.clauses()) {
    out += "clause ";
    out += c.weight.is_hard() ? std::string("hard") : format_double(c.weight.value());
    for (const auto &lit : c.literals) {
      out += ' ';
      if (!lit.positive)
        out += '-';
      out += std::to_string(lit.var + 1);
    }
    out += '\n';
  }
  for (const auto &f : m.factors()) {
    out += "factor " + std::to_string(f.scope.size());
    for (auto v : f.scope)
      out += ' ' + std::to_string(v + 1);
    for (double t : f.count_table)
      out += ' ' + format_double(t);
    out += '\n';
  }
  const auto &e = m.evidence();
  if (e.kind == Evidence::Kind::True) {
    out += "evidence true\n";
  } else {
    out += "evidence card ";
    out += e.comparator == Comparator::Eq ? "eq" : e.comparator == Comparator::Le ? "le" : "ge";
    out += ' ' + std::to_string(e.bound);
    for (auto v : e.subset)
      out += ' ' + std::to_string(v + 1);
    out += '\n';
  }
  return out;
}

} // namespace symlift
