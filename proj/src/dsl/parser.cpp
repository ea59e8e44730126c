#include "psense/dsl/parser.hpp"

#include "psense/dsl/affine.hpp"

#include <cctype>
#include <set>
#include <unordered_set>

namespace psense::dsl {

namespace {

std::string render(const std::string& source, SourceSpan span, const std::string& message) {
  return source + ":" + std::to_string(span.line) + ":" + std::to_string(span.column) + ": error: " + message;
}

}  // namespace

SyntaxError::SyntaxError(const std::string& source, SourceSpan span, const std::string& message)
    : std::runtime_error(render(source, span, message)), span_(span), detail_(message) {}

namespace {

enum class Tok {
  End,
  Ident,
  Number,
  Assign,     // :=
  Semicolon,
  Comma,
  Colon,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Tilde,
  Plus,
  Minus,
  Star,
  Slash,
  Le,
  Lt,
  Ge,
  Gt,
  AndAnd,
  OrOr,
  Bang,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

const std::unordered_set<std::string> kKeywords = {"while", "do",  "od",  "if",   "then", "else", "fi",
                                                   "skip",  "prob", "and", "or", "not",  "true", "false"};

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& source) : text_(text), source_(source) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token tok;
      tok.span = {line_, column_};
      if (pos_ >= text_.size()) {
        tok.kind = Tok::End;
        out.push_back(tok);
        return out;
      }
      char ch = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          advance();
        while (pos_ < text_.size() && text_[pos_] == '\'') advance();
        tok.kind = Tok::Ident;
        tok.text = std::string(text_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(ch)) ||
                 (ch == '.' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
        if (pos_ < text_.size() && text_[pos_] == '.') {
          advance();
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
          std::size_t save = pos_;
          int save_col = column_;
          advance();
          if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
          if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
          } else {
            pos_ = save;
            column_ = save_col;
          }
        }
        tok.kind = Tok::Number;
        tok.text = std::string(text_.substr(start, pos_ - start));
      } else {
        tok.kind = symbol(tok.text);
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char ch = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else if (ch == '#' || (ch == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/')) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Tok symbol(std::string& text) {
    SourceSpan here{line_, column_};
    char ch = text_[pos_];
    char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    auto two = [&](Tok kind) {
      text = std::string(text_.substr(pos_, 2));
      advance();
      advance();
      return kind;
    };
    auto one = [&](Tok kind) {
      text = std::string(1, ch);
      advance();
      return kind;
    };
    switch (ch) {
      case ':': return next == '=' ? two(Tok::Assign) : one(Tok::Colon);
      case ';': return one(Tok::Semicolon);
      case ',': return one(Tok::Comma);
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case '{': return one(Tok::LBrace);
      case '}': return one(Tok::RBrace);
      case '~': return one(Tok::Tilde);
      case '+': return one(Tok::Plus);
      case '-': return one(Tok::Minus);
      case '*': return one(Tok::Star);
      case '/': return one(Tok::Slash);
      case '<': return next == '=' ? two(Tok::Le) : one(Tok::Lt);
      case '>': return next == '=' ? two(Tok::Ge) : one(Tok::Gt);
      case '&':
        if (next == '&') return two(Tok::AndAnd);
        break;
      case '|':
        if (next == '|') return two(Tok::OrOr);
        break;
      case '!': return one(Tok::Bang);
      default: break;
    }
    throw SyntaxError(source_, here, std::string("unexpected character '") + ch + "'");
  }

  std::string_view text_;
  const std::string& source_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string source) : tokens_(std::move(tokens)), source_(std::move(source)) {}

  Program program() {
    Program prog;
    prog.source_name = source_;
    while (at_declaration()) {
      declaration_group(prog);
      while (peek().kind == Tok::Semicolon || peek().kind == Tok::Comma) ++pos_;
    }
    program_ = &prog;
    prog.statements = sequence();
    if (peek().kind != Tok::End) fail(peek(), "expected end of input, found " + describe(peek()));
    return prog;
  }

  ExprPtr standalone_expression() {
    ExprPtr e = expression();
    if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()) + " after expression");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[idx];
  }

  bool is_keyword(const Token& tok, const char* word) const { return tok.kind == Tok::Ident && tok.text == word; }

  bool is_identifier(const Token& tok) const { return tok.kind == Tok::Ident && kKeywords.count(tok.text) == 0; }

  [[noreturn]] void fail(const Token& tok, const std::string& message) const {
    throw SyntaxError(source_, tok.span, message);
  }

  static std::string describe(const Token& tok) {
    if (tok.kind == Tok::End) return "end of input";
    return "'" + tok.text + "'";
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return tokens_[pos_++];
  }

  void expect_keyword(const char* word) {
    if (!is_keyword(peek(), word)) fail(peek(), std::string("expected '") + word + "', found " + describe(peek()));
    ++pos_;
  }

  bool at_declaration() const {
    std::size_t i = 0;
    if (!is_identifier(peek(i))) return false;
    ++i;
    while (peek(i).kind == Tok::Comma && is_identifier(peek(i + 1))) i += 2;
    return peek(i).kind == Tok::Tilde;
  }

  void declaration_group(Program& prog) {
    std::vector<Token> names;
    names.push_back(tokens_[pos_++]);
    while (peek().kind == Tok::Comma) {
      ++pos_;
      names.push_back(expect(Tok::Ident, "sampling variable name"));
    }
    expect(Tok::Tilde, "'~'");
    DistributionSpec spec = distribution();
    for (const auto& name : names) {
      if (prog.find_declaration(name.text) != nullptr)
        throw DuplicateDeclaration(source_, name.span, "sampling variable '" + name.text + "' declared twice");
      prog.declarations.push_back({name.text, spec, name.span});
    }
  }

  Rational constant(const char* what) {
    const Token& start = peek();
    ExprPtr e = expression();
    auto value = constant_value(*e);
    if (!value) fail(start, std::string(what) + " must be a constant");
    return *value;
  }

  DistributionSpec distribution() {
    const Token& head = expect(Tok::Ident, "distribution name");
    try {
      if (head.text == "unif") {
        expect(Tok::LParen, "'('");
        Rational lo = constant("uniform bound");
        expect(Tok::Comma, "','");
        Rational hi = constant("uniform bound");
        expect(Tok::RParen, "')'");
        return make_uniform(lo, hi);
      }
      if (head.text == "bern" || head.text == "dirac") {
        expect(Tok::LParen, "'('");
        Rational arg = constant("distribution parameter");
        expect(Tok::RParen, "')'");
        return head.text == "bern" ? make_bernoulli(arg) : make_dirac(arg);
      }
      if (head.text == "discrete") {
        expect(Tok::LBrace, "'{'");
        std::vector<std::pair<Rational, Rational>> atoms;
        do {
          Rational value = constant("discrete value");
          expect(Tok::Colon, "':'");
          Rational prob = constant("discrete probability");
          atoms.emplace_back(value, prob);
        } while (peek().kind == Tok::Comma && (++pos_, true));
        expect(Tok::RBrace, "'}'");
        return make_discrete(std::move(atoms));
      }
    } catch (const std::invalid_argument& err) {
      fail(head, err.what());
    }
    fail(head, "unknown distribution '" + head.text + "' (expected unif, bern, dirac or discrete)");
  }

  bool at_sequence_end() const {
    const Token& tok = peek();
    return tok.kind == Tok::End || is_keyword(tok, "od") || is_keyword(tok, "fi") || is_keyword(tok, "else");
  }

  Block sequence() {
    Block block;
    if (at_sequence_end()) fail(peek(), "expected statement, found " + describe(peek()));
    block.push_back(statement());
    while (peek().kind == Tok::Semicolon) {
      ++pos_;
      if (at_sequence_end()) break;
      block.push_back(statement());
    }
    return block;
  }

  Stmt statement() {
    const Token& tok = peek();
    Stmt stmt;
    stmt.span = tok.span;
    if (is_keyword(tok, "skip")) {
      ++pos_;
      stmt.node = SkipStmt{};
    } else if (is_keyword(tok, "while")) {
      ++pos_;
      WhileStmt loop;
      loop.guard = boolean();
      expect_keyword("do");
      loop.body = sequence();
      expect_keyword("od");
      stmt.node = std::move(loop);
    } else if (is_keyword(tok, "if")) {
      ++pos_;
      if (is_keyword(peek(), "prob")) {
        ++pos_;
        ProbStmt branch;
        expect(Tok::LParen, "'('");
        const Token& at = peek();
        ExprPtr p = expression();
        auto value = constant_value(*p);
        if (!value) fail(at, "branch probability must be a constant");
        if (*value < 0 || *value > 1) fail(at, "branch probability " + psense::to_string(*value) + " is outside [0, 1]");
        branch.probability = p;
        branch.value = *value;
        expect(Tok::RParen, "')'");
        expect_keyword("then");
        branch.then_body = sequence();
        if (is_keyword(peek(), "else")) {
          ++pos_;
          branch.else_body = sequence();
        } else {
          branch.else_body = {Stmt{SkipStmt{}, peek().span}};
        }
        expect_keyword("fi");
        stmt.node = std::move(branch);
      } else {
        IfStmt branch;
        branch.condition = boolean();
        expect_keyword("then");
        branch.then_body = sequence();
        if (is_keyword(peek(), "else")) {
          ++pos_;
          branch.else_body = sequence();
        } else {
          branch.else_body = {Stmt{SkipStmt{}, peek().span}};
        }
        expect_keyword("fi");
        stmt.node = std::move(branch);
      }
    } else if (tok.kind == Tok::LParen) {
      ++pos_;
      AssignStmt assign;
      std::vector<Token> targets;
      do {
        targets.push_back(target());
      } while (peek().kind == Tok::Comma && (++pos_, true));
      expect(Tok::RParen, "')'");
      expect(Tok::Assign, "':='");
      expect(Tok::LParen, "'('");
      do {
        assign.values.push_back(expression());
      } while (peek().kind == Tok::Comma && (++pos_, true));
      expect(Tok::RParen, "')'");
      if (assign.values.size() != targets.size())
        fail(tok, "simultaneous assignment has " + std::to_string(targets.size()) + " targets but " +
                      std::to_string(assign.values.size()) + " values");
      std::set<std::string> seen;
      for (const auto& t : targets) {
        if (!seen.insert(t.text).second) fail(t, "variable '" + t.text + "' assigned twice in one statement");
        assign.targets.push_back(t.text);
      }
      stmt.node = std::move(assign);
    } else if (is_identifier(tok)) {
      AssignStmt assign;
      assign.targets.push_back(target().text);
      expect(Tok::Assign, "':='");
      assign.values.push_back(expression());
      stmt.node = std::move(assign);
    } else {
      fail(tok, "expected statement, found " + describe(tok));
    }
    return stmt;
  }

  Token target() {
    const Token& tok = peek();
    if (!is_identifier(tok)) fail(tok, "expected variable name, found " + describe(tok));
    if (program_ != nullptr && program_->is_sampling_variable(tok.text))
      fail(tok, "cannot assign to sampling variable '" + tok.text + "'");
    return tokens_[pos_++];
  }

  BoolPtr boolean() {
    BoolPtr left = conjunction();
    while (is_keyword(peek(), "or") || peek().kind == Tok::OrOr) {
      SourceSpan span = peek().span;
      ++pos_;
      left = make_logic(BoolExpr::Kind::Or, left, conjunction(), span);
    }
    return left;
  }

  BoolPtr conjunction() {
    BoolPtr left = negation();
    while (is_keyword(peek(), "and") || peek().kind == Tok::AndAnd) {
      SourceSpan span = peek().span;
      ++pos_;
      left = make_logic(BoolExpr::Kind::And, left, negation(), span);
    }
    return left;
  }

  BoolPtr negation() {
    if (is_keyword(peek(), "not") || peek().kind == Tok::Bang) {
      SourceSpan span = peek().span;
      ++pos_;
      return make_logic(BoolExpr::Kind::Not, negation(), nullptr, span);
    }
    return bool_atom();
  }

  BoolPtr bool_atom() {
    const Token& tok = peek();
    if (is_keyword(tok, "true") || is_keyword(tok, "false")) {
      ++pos_;
      return make_bool_constant(tok.text == "true", tok.span);
    }
    if (tok.kind == Tok::LParen) {
      std::size_t save = pos_;
      try {
        ++pos_;
        BoolPtr inner = boolean();
        expect(Tok::RParen, "')'");
        if (!is_comparison(peek().kind) && !is_arith_continuation(peek().kind)) return inner;
      } catch (const SyntaxError&) {
      }
      pos_ = save;
    }
    return comparison_chain();
  }

  static bool is_comparison(Tok kind) { return kind == Tok::Le || kind == Tok::Lt || kind == Tok::Ge || kind == Tok::Gt; }
  static bool is_arith_continuation(Tok kind) {
    return kind == Tok::Plus || kind == Tok::Minus || kind == Tok::Star || kind == Tok::Slash;
  }

  BoolPtr comparison_chain() {
    SourceSpan span = peek().span;
    ExprPtr left = expression();
    if (!is_comparison(peek().kind)) fail(peek(), "expected comparison operator, found " + describe(peek()));
    BoolPtr result;
    while (is_comparison(peek().kind)) {
      Tok kind = tokens_[pos_++].kind;
      CompareOp op = kind == Tok::Le ? CompareOp::Le : kind == Tok::Lt ? CompareOp::Lt : kind == Tok::Ge ? CompareOp::Ge : CompareOp::Gt;
      ExprPtr right = expression();
      BoolPtr atom = make_compare(op, left, right, span);
      result = result ? make_logic(BoolExpr::Kind::And, result, atom, span) : atom;
      left = right;
    }
    return result;
  }

  ExprPtr expression() {
    ExprPtr left = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token& op = tokens_[pos_++];
      left = make_binary(op.kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub, left, term(), op.span);
    }
    return left;
  }

  ExprPtr term() {
    ExprPtr left = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Token& op = tokens_[pos_++];
      left = make_binary(op.kind == Tok::Star ? Expr::Kind::Mul : Expr::Kind::Div, left, unary(), op.span);
    }
    return left;
  }

  ExprPtr unary() {
    if (peek().kind == Tok::Minus) {
      SourceSpan span = peek().span;
      ++pos_;
      return make_unary(unary(), span);
    }
    if (peek().kind == Tok::Plus) {
      ++pos_;
      return unary();
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& tok = peek();
    if (tok.kind == Tok::Number) {
      ++pos_;
      return make_number(parse_rational(tok.text), tok.span);
    }
    if (is_identifier(tok)) {
      ++pos_;
      return make_variable(tok.text, tok.span);
    }
    if (tok.kind == Tok::LParen) {
      ++pos_;
      ExprPtr inner = expression();
      expect(Tok::RParen, "')'");
      return inner;
    }
    fail(tok, "expected expression, found " + describe(tok));
  }

  std::vector<Token> tokens_;
  std::string source_;
  std::size_t pos_ = 0;
  const Program* program_ = nullptr;
};

}  // namespace

Program parse(std::string_view text, const std::string& source_name) {
  Lexer lexer(text, source_name);
  Parser parser(lexer.run(), source_name);
  return parser.program();
}

ExprPtr parse_expression(std::string_view text) {
  Lexer lexer(text, "<expression>");
  Parser parser(lexer.run(), "<expression>");
  return parser.standalone_expression();
}

}  // namespace psense::dsl
