#include "defimc/property_parser.hpp"

#include <cctype>
#include <optional>

namespace defimc {

namespace {

struct Token {
  enum Kind { Ident, Int_, Punct, End } kind = End;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(&s) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t pos) const {
    throw PropertyParseError("property:" + std::to_string(pos + 1) + ": " + msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, tok_.pos); }

 private:
  void advance() {
    const std::string& s = *s_;
    while (i_ < s.size() && std::isspace(static_cast<unsigned char>(s[i_]))) ++i_;
    tok_ = {Token::End, "", i_};
    if (i_ >= s.size()) return;
    char c = s[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      tok_ = {Token::Ident, s.substr(i_, j - i_), i_};
      i_ = j;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      tok_ = {Token::Int_, s.substr(i_, j - i_), i_};
      i_ = j;
      return;
    }
    for (const char* op : {"==", "!=", "<=", ">=", "&&", "||", "->"}) {
      if (s.compare(i_, 2, op) == 0) {
        tok_ = {Token::Punct, op, i_};
        i_ += 2;
        return;
      }
    }
    tok_ = {Token::Punct, std::string(1, c), i_};
    i_ += 1;
  }

  const std::string* s_;
  std::size_t i_ = 0;
  Token tok_;
};

// Closest declared name, for "unknown identifier" diagnostics.
std::string suggest(const std::string& unknown, const StoreSchema& schema) {
  auto dist = [](const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      cur[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j) {
        std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
        cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      }
      std::swap(prev, cur);
    }
    return prev[b.size()];
  };
  std::string best;
  std::size_t best_d = 4;  // only offer close misses
  for (const std::string& n : schema.all_names()) {
    std::size_t d = dist(unknown, n);
    if (d < best_d) {
      best_d = d;
      best = n;
    }
  }
  return best;
}

class Parser {
 public:
  Parser(const std::string& text, const StoreSchema& schema) : lex_(text), schema_(schema) {}

  PropertySpec parse(const std::string& name) {
    PropertySpec p;
    p.name = name;
    Token head = lex_.take();
    if (head.kind == Token::Ident && head.text == "G") {
      parse_globally(p);
    } else if (head.kind == Token::Ident && (head.text == "max" || head.text == "min")) {
      p.kind = PropertyKind::ReachExtremum;
      p.dir = head.text == "max" ? ExtremumDir::Max : ExtremumDir::Min;
      p.expr = parse_expr();
    } else {
      lex_.fail("expected 'G', 'max' or 'min'", head.pos);
    }
    if (lex_.peek().kind != Token::End) lex_.fail("trailing input after formula");
    return p;
  }

  ExprPtr parse_bare_expr() {
    ExprPtr e = parse_expr();
    if (lex_.peek().kind != Token::End) lex_.fail("trailing input after expression");
    return e;
  }

 private:
  void parse_globally(PropertySpec& p) {
    expect_punct("(");
    if (auto ev = try_event_arrow_g()) {
      p.kind = PropertyKind::AfterEventAlways;
      p.event = *ev;
      p.pred = parse_expr();
      expect_punct(")");
      return;
    }
    ExprPtr first = parse_expr();
    if (lex_.peek().kind == Token::Punct && lex_.peek().text == "->") {
      lex_.take();
      Token t = lex_.take();
      if (t.kind != Token::Ident || t.text != "F")
        lex_.fail("expected 'F' after '->' (events need '-> G')", t.pos);
      p.kind = PropertyKind::Response;
      p.trigger = first;
      p.pred = parse_expr();
      expect_punct(")");
      return;
    }
    expect_punct(")");
    p.kind = PropertyKind::GlobalInvariant;
    p.pred = first;
  }

  // Lookahead for `<event> -> G`: a dotted name followed by the arrow and
  // 'G'. Event names must not collide with declared store names.
  std::optional<std::string> try_event_arrow_g() {
    Lexer save = lex_;
    if (lex_.peek().kind != Token::Ident) return std::nullopt;
    std::size_t pos = lex_.peek().pos;
    std::string name = lex_.take().text;
    while (lex_.peek().kind == Token::Punct && lex_.peek().text == ".") {
      lex_.take();
      Token part = lex_.take();
      if (part.kind != Token::Ident) {
        lex_ = save;
        return std::nullopt;
      }
      name += "." + part.text;
    }
    if (lex_.peek().kind == Token::Punct && lex_.peek().text == "->") {
      Lexer at_arrow = lex_;
      lex_.take();
      if (lex_.peek().kind == Token::Ident && lex_.peek().text == "G") {
        lex_.take();
        if (schema_.has_name(name))
          lex_.fail("'" + name + "' is a store name, expected an event before '-> G'", pos);
        return name;
      }
      lex_ = at_arrow;
    }
    lex_ = save;
    return std::nullopt;
  }

  void expect_punct(const std::string& p) {
    Token t = lex_.take();
    if (t.kind != Token::Punct || t.text != p) lex_.fail("expected '" + p + "'", t.pos);
  }

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (lex_.peek().kind == Token::Punct && lex_.peek().text == "||") {
      lex_.take();
      e = Expr::binary(Expr::Op::Or, e, parse_and());
    }
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (lex_.peek().kind == Token::Punct && lex_.peek().text == "&&") {
      lex_.take();
      e = Expr::binary(Expr::Op::And, e, parse_cmp());
    }
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    const Token& t = lex_.peek();
    if (t.kind == Token::Punct) {
      Expr::Op op;
      if (t.text == "==") op = Expr::Op::Eq;
      else if (t.text == "!=") op = Expr::Op::Ne;
      else if (t.text == "<=") op = Expr::Op::Le;
      else if (t.text == ">=") op = Expr::Op::Ge;
      else if (t.text == "<") op = Expr::Op::Lt;
      else if (t.text == ">") op = Expr::Op::Gt;
      else return e;
      lex_.take();
      return Expr::binary(op, e, parse_add());
    }
    return e;
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (lex_.peek().kind == Token::Punct &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      Expr::Op op = lex_.take().text == "+" ? Expr::Op::Add : Expr::Op::Sub;
      e = Expr::binary(op, e, parse_mul());
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (lex_.peek().kind == Token::Punct &&
           (lex_.peek().text == "*" || lex_.peek().text == "/")) {
      Expr::Op op = lex_.take().text == "*" ? Expr::Op::Mul : Expr::Op::Div;
      e = Expr::binary(op, e, parse_unary());
    }
    return e;
  }

  ExprPtr parse_unary() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Punct && t.text == "!") {
      lex_.take();
      return Expr::negate(parse_unary());
    }
    if (t.kind == Token::Punct && t.text == "-") {
      lex_.take();
      return Expr::binary(Expr::Op::Sub, Expr::num(0), parse_unary());
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    Token t = lex_.take();
    if (t.kind == Token::Int_) {
      std::string digits;
      for (char c : t.text)
        if (c != '_') digits += c;
      return Expr::num(std::stoll(digits));
    }
    if (t.kind == Token::Punct && t.text == "(") {
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (t.kind == Token::Ident) {
      if (t.text == "true") return Expr::num(1);
      if (t.text == "false") return Expr::num(0);
      if (t.text == "sum") {
        expect_punct("(");
        Token arr = lex_.take();
        if (arr.kind != Token::Ident) lex_.fail("expected array name in sum()", arr.pos);
        ArrayId id = schema_.find_array(arr.text);
        if (!id.valid()) fail_unknown(arr.text, arr.pos);
        expect_punct(")");
        return Expr::sum_ref(id);
      }
      CellId id = schema_.find_cell(t.text);
      if (!id.valid()) fail_unknown(t.text, t.pos);
      return Expr::cell_ref(id);
    }
    lex_.fail("expected expression", t.pos);
  }

  [[noreturn]] void fail_unknown(const std::string& name, std::size_t pos) {
    std::string s = suggest(name, schema_);
    std::string msg = "unknown identifier '" + name + "'";
    if (!s.empty()) msg += ", did you mean '" + s + "'?";
    lex_.fail(msg, pos);
  }

  Lexer lex_;
  const StoreSchema& schema_;
};

}  // namespace

PropertySpec parse_property(const std::string& name, const std::string& text,
                            const StoreSchema& schema) {
  Parser p(text, schema);
  PropertySpec spec = p.parse(name);
  spec.text = text;
  return spec;
}

ExprPtr parse_expression(const std::string& text, const StoreSchema& schema) {
  Parser p(text, schema);
  return p.parse_bare_expr();
}

}  // namespace defimc
