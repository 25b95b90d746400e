#include "adi/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

namespace adi {

namespace {

std::string num(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string terms_text(const LinearProgram& lp, const Terms& terms) {
  std::string s;
  for (auto [j, a] : terms) {
    s += a < 0 ? " - " : " + ";
    s += num(std::abs(a)) + " " + lp.variables[j].name;
  }
  return s;
}

const char* rel_text(Relation r) {
  switch (r) {
    case Relation::LessEqual: return "<=";
    case Relation::GreaterEqual: return ">=";
    case Relation::Equal: return "=";
  }
  return "=";
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Token {
  enum Kind { Name, Number, Op, Colon } kind;
  std::string text;
  double value = 0.0;
};

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' || c == ']' ||
         c == '#' || c == '$' || c == '!' || c == '&' || c == '~' || c == '\'' || c == '"' || c == '{' ||
         c == '}' || c == '@' || c == '?' || c == '/' || c == '|' || c == '(' || c == ')' || c == ',';
}

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ':') {
      out.push_back({Token::Colon, ":"});
      ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      std::string op(1, c);
      ++i;
      if (i < line.size() && line[i] == '=') ++i;
      if (op == "<") op = "<=";
      if (op == ">") op = ">=";
      out.push_back({Token::Op, op});
    } else if (c == '+' || c == '-') {
      out.push_back({Token::Op, std::string(1, c)});
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
      std::size_t used = 0;
      const double v = std::stod(std::string(line.substr(i)), &used);
      out.push_back({Token::Number, std::string(line.substr(i, used)), v});
      i += used;
    } else if (name_char(c)) {
      std::size_t j = i;
      while (j < line.size() && name_char(line[j])) ++j;
      std::string word(line.substr(i, j - i));
      const std::string lw = lower(word);
      if (lw == "inf" || lw == "infinity")
        out.push_back({Token::Number, word, kInf});
      else
        out.push_back({Token::Name, word});
      i = j;
    } else {
      throw std::invalid_argument(std::string("unexpected character '") + c + "' in LP text");
    }
  }
  return out;
}

class Reader {
 public:
  LinearProgram lp;

  int var(const std::string& name) {
    auto [it, fresh] = index_.emplace(name, static_cast<int>(lp.variables.size()));
    if (fresh) lp.add_variable(name, 0.0, kInf);
    return it->second;
  }

  // [name :] terms [rel rhs]
  void expression(const std::vector<Token>& toks, std::string* name, Terms& terms, std::string* rel, double* rhs) {
    std::size_t i = 0;
    if (toks.size() >= 2 && toks[0].kind == Token::Name && toks[1].kind == Token::Colon) {
      if (name) *name = toks[0].text;
      i = 2;
    }
    double sign = 1.0, coef = 1.0;
    bool have_coef = false;
    for (; i < toks.size(); ++i) {
      const Token& t = toks[i];
      if (t.kind == Token::Op && (t.text == "+" || t.text == "-")) {
        if (t.text == "-") sign = -sign;
      } else if (t.kind == Token::Number) {
        coef = t.value;
        have_coef = true;
      } else if (t.kind == Token::Name) {
        terms.push_back({var(t.text), sign * (have_coef ? coef : 1.0)});
        sign = 1.0;
        have_coef = false;
      } else if (t.kind == Token::Op) {
        if (!rel) throw std::invalid_argument("relation in objective");
        *rel = t.text;
        double s = 1.0;
        std::size_t k = i + 1;
        for (; k < toks.size() && toks[k].kind == Token::Op && (toks[k].text == "+" || toks[k].text == "-"); ++k)
          if (toks[k].text == "-") s = -s;
        if (k + 1 != toks.size() || toks[k].kind != Token::Number)
          throw std::invalid_argument("constraint needs a numeric right-hand side");
        *rhs = s * toks[k].value;
        return;
      } else {
        throw std::invalid_argument("malformed expression");
      }
    }
    if (have_coef) throw std::invalid_argument("constant terms are not supported");
  }

  void bound(const std::vector<Token>& toks) {
    // forms: x free | x rel v | v rel x | v rel x rel v
    auto signed_num = [&](std::size_t& i) {
      double s = 1.0;
      while (i < toks.size() && toks[i].kind == Token::Op && (toks[i].text == "+" || toks[i].text == "-")) {
        if (toks[i].text == "-") s = -s;
        ++i;
      }
      if (i >= toks.size() || toks[i].kind != Token::Number) throw std::invalid_argument("bad bound");
      return s * toks[i++].value;
    };
    if (toks.size() == 2 && toks[0].kind == Token::Name && lower(toks[1].text) == "free") {
      auto& v = lp.variables[var(toks[0].text)];
      v.lower = -kInf;
      v.upper = kInf;
      return;
    }
    std::size_t i = 0;
    if (toks[0].kind == Token::Name) {
      auto& v = lp.variables[var(toks[0].text)];
      i = 1;
      if (i >= toks.size() || toks[i].kind != Token::Op) throw std::invalid_argument("bad bound");
      const std::string op = toks[i++].text;
      const double x = signed_num(i);
      if (op == "<=") v.upper = x;
      else if (op == ">=") v.lower = x;
      else if (op == "=") v.lower = v.upper = x;
      else throw std::invalid_argument("bad bound");
      return;
    }
    const double a = signed_num(i);
    if (i + 1 >= toks.size() || toks[i].kind != Token::Op || toks[i + 1].kind != Token::Name)
      throw std::invalid_argument("bad bound");
    const std::string op1 = toks[i].text;
    auto& v = lp.variables[var(toks[i + 1].text)];
    i += 2;
    if (op1 == "<=") v.lower = a;
    else if (op1 == ">=") v.upper = a;
    else if (op1 == "=") v.lower = v.upper = a;
    if (i < toks.size()) {
      const std::string op2 = toks[i++].text;
      const double b = signed_num(i);
      if (op2 == "<=") v.upper = b;
      else if (op2 == ">=") v.lower = b;
      else throw std::invalid_argument("bad bound");
    }
  }

 private:
  std::unordered_map<std::string, int> index_;
};

}  // namespace

std::string write_lp(const LinearProgram& lp) {
  lp.check();
  std::string s = lp.sense == Sense::Minimize ? "Minimize\n" : "Maximize\n";
  s += " obj:" + terms_text(lp, lp.objective) + "\n";
  s += "Subject To\n";
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const Constraint& c = lp.constraints[i];
    const std::string name = c.name.empty() ? "c" + std::to_string(i) : c.name;
    s += " " + name + ":" + terms_text(lp, c.terms) + " " + rel_text(c.relation) + " " + num(c.rhs) + "\n";
  }
  s += "Bounds\n";
  for (const Variable& v : lp.variables) {
    if (v.type == VarType::Binary && v.lower == 0.0 && v.upper == 1.0) continue;
    if (v.lower == -kInf && v.upper == kInf)
      s += " " + v.name + " free\n";
    else if (v.lower == v.upper)
      s += " " + v.name + " = " + num(v.lower) + "\n";
    else
      s += " " + num(v.lower) + " <= " + v.name + " <= " + num(v.upper) + "\n";
  }
  bool header = false;
  for (const Variable& v : lp.variables) {
    if (v.type != VarType::Binary) continue;
    if (!header) s += "Binary\n";
    header = true;
    s += " " + v.name + "\n";
  }
  s += "End\n";
  return s;
}

LinearProgram parse_lp(std::string_view text) {
  Reader r;
  enum class Section { None, Objective, Constraints, Bounds, Binary, End } sec = Section::None;
  bool saw_objective = false;
  std::size_t pos = 0;
  while (pos <= text.size() && sec != Section::End) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (auto c = line.find('\\'); c != std::string_view::npos) line = line.substr(0, c);
    const std::string key = lower(line);
    std::string trimmed;
    for (char ch : key)
      if (!std::isspace(static_cast<unsigned char>(ch))) trimmed += ch;
    if (trimmed.empty()) continue;
    if (trimmed == "minimize" || trimmed == "minimise" || trimmed == "min") {
      r.lp.sense = Sense::Minimize;
      sec = Section::Objective;
      saw_objective = true;
      continue;
    }
    if (trimmed == "maximize" || trimmed == "maximise" || trimmed == "max") {
      r.lp.sense = Sense::Maximize;
      sec = Section::Objective;
      saw_objective = true;
      continue;
    }
    if (trimmed == "subjectto" || trimmed == "st" || trimmed == "s.t." || trimmed == "such that") {
      sec = Section::Constraints;
      continue;
    }
    if (trimmed == "bounds" || trimmed == "bound") {
      sec = Section::Bounds;
      continue;
    }
    if (trimmed == "binary" || trimmed == "binaries" || trimmed == "bin") {
      sec = Section::Binary;
      continue;
    }
    if (trimmed == "general" || trimmed == "generals" || trimmed == "gen")
      throw std::invalid_argument("general integer variables are not supported");
    if (trimmed == "end") {
      sec = Section::End;
      continue;
    }
    const auto toks = tokenize(line);
    switch (sec) {
      case Section::Objective:
        r.expression(toks, nullptr, r.lp.objective, nullptr, nullptr);
        break;
      case Section::Constraints: {
        Constraint c;
        std::string rel;
        r.expression(toks, &c.name, c.terms, &rel, &c.rhs);
        if (rel.empty()) throw std::invalid_argument("constraint without relation");
        c.relation = rel == "<=" ? Relation::LessEqual : rel == ">=" ? Relation::GreaterEqual : Relation::Equal;
        if (c.name.empty()) c.name = "c" + std::to_string(r.lp.constraints.size());
        r.lp.constraints.push_back(std::move(c));
        break;
      }
      case Section::Bounds:
        r.bound(toks);
        break;
      case Section::Binary:
        for (const Token& t : toks) {
          if (t.kind != Token::Name) throw std::invalid_argument("bad binary section");
          auto& v = r.lp.variables[r.var(t.text)];
          v.type = VarType::Binary;
          v.lower = std::max(v.lower, 0.0);
          v.upper = std::min(v.upper, 1.0);
        }
        break;
      default:
        throw std::invalid_argument("LP text outside any section");
    }
  }
  if (!saw_objective) throw std::invalid_argument("LP text has no objective section");
  r.lp.check();
  return r.lp;
}

}  // namespace adi
