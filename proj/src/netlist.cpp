#include "dekit/netlist.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace dekit {

ParseError::ParseError(const std::string& msg, int line, int col)
    : std::runtime_error(msg + " at line " + std::to_string(line) +
                         ", column " + std::to_string(col)),
      line(line),
      col(col) {}

namespace {

struct Token {
  enum Kind { LParen, RParen, Symbol, End } kind;
  std::string text;  // folded to upper case
  int line;
  int col;
};

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws();
    int line = line_, col = col_;
    if (pos_ >= text_.size()) return {Token::End, "", line, col};
    char c = text_[pos_];
    if (c == '(') {
      advance();
      return {Token::LParen, "(", line, col};
    }
    if (c == ')') {
      advance();
      return {Token::RParen, ")", line, col};
    }
    if (!name_char(c)) throw ParseError("unexpected character", line, col);
    std::string sym;
    while (pos_ < text_.size() && name_char(text_[pos_])) {
      sym.push_back(
          static_cast<char>(std::toupper(static_cast<unsigned char>(text_[pos_]))));
      advance();
    }
    return {Token::Symbol, sym, line, col};
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { bump(); }

  Netlist parse() {
    Netlist n;
    while (tok_.kind != Token::End) n.modules.push_back(parse_module());
    return n;
  }

 private:
  void bump() { tok_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& msg) {
    if (tok_.kind == Token::End)
      throw ParseError("unbalanced parentheses", tok_.line, tok_.col);
    throw ParseError(msg, tok_.line, tok_.col);
  }

  void expect_lparen(const char* what) {
    if (tok_.kind != Token::LParen)
      fail(std::string("expected '(' to open ") + what);
    bump();
  }

  void expect_rparen(const char* what) {
    if (tok_.kind != Token::RParen)
      fail(std::string("expected ')' to close ") + what);
    bump();
  }

  std::string symbol(const char* what) {
    if (tok_.kind != Token::Symbol)
      fail(std::string("expected ") + what);
    std::string s = tok_.text;
    bump();
    return s;
  }

  std::vector<std::string> name_list(const char* what) {
    expect_lparen(what);
    std::vector<std::string> names;
    while (tok_.kind == Token::Symbol) {
      names.push_back(tok_.text);
      bump();
    }
    expect_rparen(what);
    return names;
  }

  unsigned nat(const char* what) {
    Token t = tok_;
    std::string s = symbol(what);
    unsigned long v = 0;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw ParseError(std::string("expected a number for ") + what, t.line,
                         t.col);
      v = v * 10 + static_cast<unsigned long>(c - '0');
      if (v > 1'000'000)
        throw ParseError(std::string(what) + " out of range", t.line, t.col);
    }
    return static_cast<unsigned>(v);
  }

  Ref parse_ref() {
    if (tok_.kind == Token::LParen) {
      Token open = tok_;
      bump();
      std::string kind_name = symbol("memory kind");
      auto kind = mem_kind_by_name(kind_name);
      if (!kind)
        throw ParseError("unknown memory kind '" + kind_name + "'", open.line,
                         open.col);
      unsigned depth = nat("memory depth");
      unsigned width = nat("memory width");
      if (depth > kMaxMemDepth)
        throw ParseError("memory depth exceeds tool limit", open.line,
                         open.col);
      if (width < 1 || width > kMaxMemWidth)
        throw ParseError("memory width out of tool limits", open.line,
                         open.col);
      expect_rparen("memory reference");
      return MemRef{*kind, depth, width};
    }
    std::string name = symbol("reference name");
    if (name == "FF") return FfRef{};
    if (auto g = gate_by_name(name)) return *g;
    return name;
  }

  Occurrence parse_occurrence() {
    expect_lparen("occurrence");
    Occurrence occ;
    occ.name = symbol("occurrence name");
    occ.outputs = name_list("occurrence outputs");
    if (occ.outputs.empty())
      fail("occurrence must drive at least one output");
    occ.ref = parse_ref();
    occ.inputs = name_list("occurrence inputs");
    expect_rparen("occurrence");
    return occ;
  }

  ModuleDef parse_module() {
    expect_lparen("module");
    ModuleDef m;
    m.name = symbol("module name");
    m.inputs = name_list("module inputs");
    m.outputs = name_list("module outputs");
    expect_lparen("occurrence list");
    while (tok_.kind == Token::LParen)
      m.occurrences.push_back(parse_occurrence());
    expect_rparen("occurrence list");
    expect_rparen("module");
    return m;
  }

  Lexer lex_;
  Token tok_;
};

void print_names(std::ostream& os, const std::vector<std::string>& names) {
  os << '(';
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) os << ' ';
    os << names[i];
  }
  os << ')';
}

void print_ref(std::ostream& os, const Ref& ref) {
  if (const auto* g = std::get_if<GateId>(&ref)) {
    os << gate_name(*g);
  } else if (std::holds_alternative<FfRef>(ref)) {
    os << "FF";
  } else if (const auto* m = std::get_if<MemRef>(&ref)) {
    os << '(' << mem_kind_name(m->kind) << ' ' << m->depth << ' ' << m->width
       << ')';
  } else {
    os << std::get<std::string>(ref);
  }
}

}  // namespace

Netlist parse_netlist(std::string_view text) { return Parser(text).parse(); }

std::string print_netlist(const Netlist& n) {
  std::ostringstream os;
  for (const ModuleDef& m : n.modules) {
    os << '(' << m.name << ' ';
    print_names(os, m.inputs);
    os << ' ';
    print_names(os, m.outputs);
    os << "\n  (";
    for (size_t i = 0; i < m.occurrences.size(); ++i) {
      const Occurrence& occ = m.occurrences[i];
      if (i) os << "\n   ";
      os << '(' << occ.name << ' ';
      print_names(os, occ.outputs);
      os << ' ';
      print_ref(os, occ.ref);
      os << ' ';
      print_names(os, occ.inputs);
      os << ')';
    }
    os << "))\n";
  }
  return os.str();
}

std::string_view wf_class_name(WfClass c) {
  switch (c) {
    case WfClass::DuplicateModule: return "duplicate-module";
    case WfClass::DuplicateOccurrence: return "duplicate-occurrence";
    case WfClass::DuplicateWire: return "duplicate-wire";
    case WfClass::UseBeforeDef: return "use-before-def";
    case WfClass::ArityMismatch: return "arity-mismatch";
    case WfClass::UnresolvedRef: return "unresolved-ref";
    case WfClass::BackwardRef: return "forward-reference-violation";
    case WfClass::UndefinedOutput: return "undefined-output";
    case WfClass::BadName: return "bad-name";
  }
  return "?";
}

std::optional<size_t> lookup(const Netlist& n, size_t from,
                             std::string_view name) {
  for (size_t i = from + 1; i < n.modules.size(); ++i)
    if (n.modules[i].name == name) return i;
  return std::nullopt;
}

std::optional<size_t> find_module(const Netlist& n, std::string_view name) {
  for (size_t i = 0; i < n.modules.size(); ++i)
    if (n.modules[i].name == name) return i;
  return std::nullopt;
}

bool module_stateful(const Netlist& n, size_t at) {
  for (const Occurrence& occ : n.modules[at].occurrences) {
    if (std::holds_alternative<FfRef>(occ.ref) ||
        std::holds_alternative<MemRef>(occ.ref))
      return true;
    if (const auto* name = std::get_if<std::string>(&occ.ref)) {
      auto sub = lookup(n, at, *name);
      if (sub && module_stateful(n, *sub)) return true;
    }
  }
  return false;
}

std::optional<RefArity> ref_arity(const Netlist& n, size_t from,
                                  const Ref& ref) {
  if (const auto* g = std::get_if<GateId>(&ref))
    return RefArity{gate_arity(*g), 1, false};
  if (std::holds_alternative<FfRef>(ref)) return RefArity{1, 1, true};
  if (const auto* m = std::get_if<MemRef>(&ref))
    return RefArity{1 + m->depth + m->width, m->width, true};
  const std::string& name = std::get<std::string>(ref);
  auto at = lookup(n, from, name);
  if (!at) return std::nullopt;
  const ModuleDef& sub = n.modules[*at];
  return RefArity{static_cast<unsigned>(sub.inputs.size()),
                  static_cast<unsigned>(sub.outputs.size()),
                  module_stateful(n, *at)};
}

namespace {

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!name_char(c)) return false;
  return true;
}

}  // namespace

std::vector<WfViolation> check_wf(const Netlist& n) {
  std::vector<WfViolation> report;
  auto add = [&](WfClass cls, const std::string& module,
                 const std::string& where, std::string msg) {
    report.push_back({cls, module, where, std::move(msg)});
  };

  std::set<std::string> module_names;
  for (const ModuleDef& m : n.modules)
    if (!module_names.insert(m.name).second)
      add(WfClass::DuplicateModule, m.name, m.name,
          "module name defined more than once");

  for (size_t mi = 0; mi < n.modules.size(); ++mi) {
    const ModuleDef& m = n.modules[mi];
    if (!valid_name(m.name))
      add(WfClass::BadName, m.name, m.name, "invalid module name");

    std::set<std::string> defined;
    for (const std::string& in : m.inputs) {
      if (!valid_name(in))
        add(WfClass::BadName, m.name, in, "invalid wire name");
      if (!defined.insert(in).second)
        add(WfClass::DuplicateWire, m.name, in,
            "formal input '" + in + "' repeated");
    }

    std::set<std::string> occ_names;
    std::vector<std::pair<std::string, std::string>> deferred;
    for (const Occurrence& occ : m.occurrences) {
      if (!valid_name(occ.name))
        add(WfClass::BadName, m.name, occ.name, "invalid occurrence name");
      if (!occ_names.insert(occ.name).second)
        add(WfClass::DuplicateOccurrence, m.name, occ.name,
            "occurrence '" + occ.name + "' repeated");

      // FF data and MEM we/din are consumed after the combinational pass,
      // so they only need to be defined somewhere in the module. Everything
      // else (including MEM addresses) must be defined before use.
      for (size_t ii = 0; ii < occ.inputs.size(); ++ii) {
        bool deferrable = false;
        if (std::holds_alternative<FfRef>(occ.ref)) {
          deferrable = true;
        } else if (const auto* mem = std::get_if<MemRef>(&occ.ref)) {
          deferrable = (ii == 0) || (ii > mem->depth);
        }
        const std::string& in = occ.inputs[ii];
        if (deferrable)
          deferred.emplace_back(in, occ.name);
        else if (!defined.count(in))
          add(WfClass::UseBeforeDef, m.name, occ.name,
              "wire '" + in + "' read before definition");
      }

      auto arity = ref_arity(n, mi, occ.ref);
      if (!arity) {
        const std::string& name = std::get<std::string>(occ.ref);
        if (find_module(n, name) && !lookup(n, mi, name))
          add(WfClass::BackwardRef, m.name, occ.name,
              "reference to '" + name + "' does not resolve forward");
        else
          add(WfClass::UnresolvedRef, m.name, occ.name,
              "reference to unknown module '" + name + "'");
      } else {
        if (occ.inputs.size() != arity->in || occ.outputs.size() != arity->out)
          add(WfClass::ArityMismatch, m.name, occ.name,
              "expected " + std::to_string(arity->in) + " inputs / " +
                  std::to_string(arity->out) + " outputs, got " +
                  std::to_string(occ.inputs.size()) + " / " +
                  std::to_string(occ.outputs.size()));
      }

      for (const std::string& out : occ.outputs) {
        if (!valid_name(out))
          add(WfClass::BadName, m.name, out, "invalid wire name");
        if (!defined.insert(out).second)
          add(WfClass::DuplicateWire, m.name, out,
              "wire '" + out + "' defined more than once");
      }
    }

    for (const auto& [in, occ_name] : deferred)
      if (!defined.count(in))
        add(WfClass::UseBeforeDef, m.name, occ_name,
            "wire '" + in + "' never defined");

    for (const std::string& out : m.outputs)
      if (!defined.count(out))
        add(WfClass::UndefinedOutput, m.name, out,
            "formal output '" + out + "' never defined");
  }
  return report;
}

}  // namespace dekit
