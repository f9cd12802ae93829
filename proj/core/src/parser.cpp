#include "epikit/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace epikit {

DeductiveSystem::DeductiveSystem(Signature sig, std::vector<Rule> rules)
    : sig_(std::move(sig)), rules_(std::move(rules)) {
  if (!sig_.algebraic())
    throw Error("deductive system signature must be algebraic (no relations)");
  std::set<std::string> seen;
  auto note = [&](const Term& t) {
    check_well_formed(t, sig_);
    for (const auto& v : vars(t))
      if (seen.insert(v).second) variables_.push_back(v);
  };
  for (const auto& r : rules_) {
    for (const auto& p : r.premises) note(p);
    note(r.conclusion);
  }
  // keep a deterministic order independent of rule layout
  std::sort(variables_.begin(), variables_.end());
}

namespace {

enum class TokKind { Ident, Number, LParen, RParen, Comma, Equals, ArrowLeft, Implies, End };

struct Token {
  TokKind kind;
  std::string text;
  long value = 0;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (text[i + j] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += k;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      tok.kind = TokKind::Ident;
      tok.text = text.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      tok.kind = TokKind::Number;
      tok.text = text.substr(i, j - i);
      tok.value = std::stol(tok.text);
      advance(j - i);
    } else if (c == '(') {
      tok.kind = TokKind::LParen;
      advance(1);
    } else if (c == ')') {
      tok.kind = TokKind::RParen;
      advance(1);
    } else if (c == ',') {
      tok.kind = TokKind::Comma;
      advance(1);
    } else if (c == '=') {
      tok.kind = TokKind::Equals;
      advance(1);
    } else if (c == '<' && i + 1 < text.size() && text[i + 1] == '=') {
      tok.kind = TokKind::Implies;
      advance(2);
    } else if (c == '<' && i + 1 < text.size() && text[i + 1] == '-') {
      tok.kind = TokKind::ArrowLeft;
      advance(2);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = TokKind::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

struct Cursor {
  const std::vector<Token>& toks;
  std::size_t pos = 0;

  const Token& peek() const { return toks[pos]; }
  const Token& get() { return toks[pos++]; }
  bool at_keyword(const char* kw) const {
    return peek().kind == TokKind::Ident && peek().text == kw;
  }
  void expect_keyword(const char* kw) {
    if (!at_keyword(kw))
      throw ParseError(std::string("expected '") + kw + "'", peek().line, peek().column);
    get();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().column);
  }
};

Term parse_term_at(Cursor& cur, const Signature& sig) {
  const Token& head = cur.peek();
  if (head.kind != TokKind::Ident) cur.fail("expected term");
  cur.get();
  if (cur.peek().kind == TokKind::LParen) {
    cur.get();
    std::vector<Term> args;
    if (cur.peek().kind != TokKind::RParen) {
      args.push_back(parse_term_at(cur, sig));
      while (cur.peek().kind == TokKind::Comma) {
        cur.get();
        args.push_back(parse_term_at(cur, sig));
      }
    }
    if (cur.peek().kind != TokKind::RParen) cur.fail("expected ')'");
    cur.get();
    auto arity = sig.op_arity(head.text);
    if (!arity)
      throw ParseError("unknown operation symbol: " + head.text, head.line, head.column);
    if (static_cast<std::size_t>(*arity) != args.size())
      throw ParseError("arity mismatch for " + head.text + ": expected " +
                           std::to_string(*arity) + " arguments, got " +
                           std::to_string(args.size()),
                       head.line, head.column);
    return Term::app(head.text, std::move(args));
  }
  auto arity = sig.op_arity(head.text);
  if (arity) {
    if (*arity != 0)
      throw ParseError("operation " + head.text + " expects arguments", head.line,
                       head.column);
    return Term::app(head.text, {});
  }
  if (sig.rel_index(head.text) >= 0)
    throw ParseError("relation symbol used as a term: " + head.text, head.line,
                     head.column);
  return Term::var(head.text);
}

AtomicFormula parse_atom_at(Cursor& cur, const Signature& sig) {
  const Token& head = cur.peek();
  if (head.kind == TokKind::Ident && sig.rel_index(head.text) >= 0) {
    cur.get();
    if (cur.peek().kind != TokKind::LParen) cur.fail("expected '(' after relation symbol");
    cur.get();
    std::vector<Term> args;
    if (cur.peek().kind != TokKind::RParen) {
      args.push_back(parse_term_at(cur, sig));
      while (cur.peek().kind == TokKind::Comma) {
        cur.get();
        args.push_back(parse_term_at(cur, sig));
      }
    }
    if (cur.peek().kind != TokKind::RParen) cur.fail("expected ')'");
    cur.get();
    int arity = *sig.rel_arity(head.text);
    if (static_cast<std::size_t>(arity) != args.size())
      throw ParseError("arity mismatch for " + head.text + ": expected " +
                           std::to_string(arity) + " arguments, got " +
                           std::to_string(args.size()),
                       head.line, head.column);
    return AtomicFormula::relation(head.text, std::move(args));
  }
  Term lhs = parse_term_at(cur, sig);
  if (cur.peek().kind != TokKind::Equals) cur.fail("expected '=' in equation");
  cur.get();
  Term rhs = parse_term_at(cur, sig);
  return AtomicFormula::equation(std::move(lhs), std::move(rhs));
}

Implication parse_implication_at(Cursor& cur, const Signature& sig) {
  AtomicFormula conclusion = parse_atom_at(cur, sig);
  std::vector<AtomicFormula> premises;
  if (cur.peek().kind == TokKind::Implies) {
    cur.get();
    premises.push_back(parse_atom_at(cur, sig));
    while (cur.peek().kind == TokKind::Comma) {
      cur.get();
      premises.push_back(parse_atom_at(cur, sig));
    }
  }
  return Implication(std::move(premises), std::move(conclusion));
}

Signature parse_sig_block(Cursor& cur, bool relations_allowed) {
  cur.expect_keyword("sig");
  std::vector<OpSymbol> ops;
  std::vector<RelSymbol> rels;
  while (!cur.at_keyword("end")) {
    if (cur.at_keyword("op")) {
      cur.get();
      const Token& name = cur.get();
      if (name.kind != TokKind::Ident)
        throw ParseError("expected operation name", name.line, name.column);
      const Token& arity = cur.get();
      if (arity.kind != TokKind::Number)
        throw ParseError("expected arity", arity.line, arity.column);
      ops.push_back({name.text, static_cast<int>(arity.value)});
    } else if (cur.at_keyword("rel")) {
      const Token& kw = cur.get();
      if (!relations_allowed)
        throw ParseError("relations are not allowed here", kw.line, kw.column);
      const Token& name = cur.get();
      if (name.kind != TokKind::Ident)
        throw ParseError("expected relation name", name.line, name.column);
      const Token& arity = cur.get();
      if (arity.kind != TokKind::Number)
        throw ParseError("expected arity", arity.line, arity.column);
      if (arity.value < 1)
        throw ParseError("relation arity must be >= 1", arity.line, arity.column);
      rels.push_back({name.text, static_cast<int>(arity.value)});
    } else {
      cur.fail("expected 'op', 'rel' or 'end'");
    }
  }
  cur.expect_keyword("end");
  try {
    return Signature(std::move(ops), std::move(rels));
  } catch (const Error& e) {
    throw ParseError(e.what(), cur.peek().line, cur.peek().column);
  }
}

}  // namespace

Theory parse_theory(const std::string& text) {
  auto toks = tokenize(text);
  Cursor cur{toks};
  Signature sig = parse_sig_block(cur, /*relations_allowed=*/true);
  cur.expect_keyword("axioms");
  std::vector<Implication> axioms;
  int last_line = -1;
  while (!cur.at_keyword("end")) {
    if (cur.peek().kind == TokKind::End) cur.fail("missing 'end' of axioms block");
    int start_line = cur.peek().line;
    if (start_line == last_line)
      cur.fail("expected one implication per line");
    try {
      axioms.push_back(parse_implication_at(cur, sig));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), cur.peek().line, cur.peek().column);
    }
    last_line = toks[cur.pos - 1].line;
  }
  cur.expect_keyword("end");
  if (cur.peek().kind != TokKind::End) cur.fail("unexpected trailing input");
  return Theory(std::move(sig), std::move(axioms));
}

Term parse_term(const std::string& text, const Signature& sig) {
  auto toks = tokenize(text);
  Cursor cur{toks};
  Term t = parse_term_at(cur, sig);
  if (cur.peek().kind != TokKind::End) cur.fail("unexpected trailing input");
  return t;
}

AtomicFormula parse_atom(const std::string& text, const Signature& sig) {
  auto toks = tokenize(text);
  Cursor cur{toks};
  AtomicFormula a = parse_atom_at(cur, sig);
  if (cur.peek().kind != TokKind::End) cur.fail("unexpected trailing input");
  return a;
}

Implication parse_implication(const std::string& text, const Signature& sig) {
  auto toks = tokenize(text);
  Cursor cur{toks};
  Implication imp = parse_implication_at(cur, sig);
  if (cur.peek().kind != TokKind::End) cur.fail("unexpected trailing input");
  return imp;
}

std::vector<AtomicFormula> parse_atom_list(const std::string& text, const Signature& sig) {
  auto toks = tokenize(text);
  Cursor cur{toks};
  std::vector<AtomicFormula> out;
  while (cur.peek().kind != TokKind::End) out.push_back(parse_atom_at(cur, sig));
  return out;
}

std::vector<Term> parse_term_list(const std::string& text, const Signature& sig) {
  auto toks = tokenize(text);
  Cursor cur{toks};
  std::vector<Term> out;
  while (cur.peek().kind != TokKind::End) out.push_back(parse_term_at(cur, sig));
  return out;
}

DeductiveSystem parse_deductive_system(const std::string& text) {
  auto toks = tokenize(text);
  Cursor cur{toks};
  Signature sig = parse_sig_block(cur, /*relations_allowed=*/false);
  cur.expect_keyword("rules");
  std::vector<Rule> rules;
  int last_line = -1;
  while (!cur.at_keyword("end")) {
    if (cur.peek().kind == TokKind::End) cur.fail("missing 'end' of rules block");
    int start_line = cur.peek().line;
    if (start_line == last_line) cur.fail("expected one rule per line");
    Rule rule{{}, parse_term_at(cur, sig)};
    if (cur.peek().kind == TokKind::ArrowLeft) {
      int arrow_line = cur.get().line;
      // premises, if any, continue on the arrow's line
      if (cur.peek().kind == TokKind::Ident && cur.peek().line == arrow_line &&
          !cur.at_keyword("end")) {
        rule.premises.push_back(parse_term_at(cur, sig));
        while (cur.peek().kind == TokKind::Comma) {
          cur.get();
          rule.premises.push_back(parse_term_at(cur, sig));
        }
      }
    }
    rules.push_back(std::move(rule));
    last_line = toks[cur.pos - 1].line;
  }
  cur.expect_keyword("end");
  if (cur.peek().kind != TokKind::End) cur.fail("unexpected trailing input");
  return DeductiveSystem(std::move(sig), std::move(rules));
}

Structure parse_structure(const std::string& text, const Signature* expected) {
  auto toks = tokenize(text);
  Cursor cur{toks};
  cur.expect_keyword("structure");
  cur.expect_keyword("size");
  const Token& size_tok = cur.get();
  if (size_tok.kind != TokKind::Number)
    throw ParseError("expected structure size", size_tok.line, size_tok.column);
  int n = static_cast<int>(size_tok.value);
  if (n < 1) throw ParseError("structure size must be >= 1", size_tok.line, size_tok.column);

  struct OpBlock {
    std::string name;
    int arity;
    std::vector<int> table;
  };
  struct RelBlock {
    std::string name;
    int arity;
    std::vector<std::vector<int>> tuples;
  };
  std::vector<OpBlock> op_blocks;
  std::vector<RelBlock> rel_blocks;

  auto read_numbers = [&](std::vector<long>& out) {
    while (cur.peek().kind == TokKind::Number) out.push_back(cur.get().value);
  };

  while (!cur.at_keyword("end")) {
    if (cur.at_keyword("op")) {
      cur.get();
      const Token& name = cur.get();
      if (name.kind != TokKind::Ident)
        throw ParseError("expected operation name", name.line, name.column);
      int arity = -1;
      // an explicit arity is a number on the same line as the name
      if (cur.peek().kind == TokKind::Number && cur.peek().line == name.line) {
        arity = static_cast<int>(cur.get().value);
      } else if (expected) {
        auto a = expected->op_arity(name.text);
        if (!a)
          throw ParseError("operation not in signature: " + name.text, name.line,
                           name.column);
        arity = *a;
      }
      std::vector<long> numbers;
      read_numbers(numbers);
      if (arity < 0) {
        // infer: smallest k with n^k == entry count
        std::size_t want = numbers.size();
        std::size_t acc = 1;
        arity = 0;
        while (acc < want && arity <= 8) {
          acc *= static_cast<std::size_t>(n);
          ++arity;
        }
        if (acc != want)
          throw ParseError("cannot infer arity of " + name.text + " from " +
                               std::to_string(want) + " entries",
                           name.line, name.column);
      }
      std::size_t want = 1;
      for (int i = 0; i < arity; ++i) want *= static_cast<std::size_t>(n);
      if (numbers.size() != want)
        throw ParseError("operation table for " + name.text + " has " +
                             std::to_string(numbers.size()) + " entries, expected " +
                             std::to_string(want),
                         name.line, name.column);
      OpBlock blk{name.text, arity, {}};
      for (long v : numbers) {
        if (v < 0 || v >= n)
          throw ParseError("table entry out of range in " + name.text, name.line,
                           name.column);
        blk.table.push_back(static_cast<int>(v));
      }
      op_blocks.push_back(std::move(blk));
    } else if (cur.at_keyword("rel")) {
      cur.get();
      const Token& name = cur.get();
      if (name.kind != TokKind::Ident)
        throw ParseError("expected relation name", name.line, name.column);
      int arity = -1;
      if (cur.peek().kind == TokKind::Number && cur.peek().line == name.line) {
        arity = static_cast<int>(cur.get().value);
      } else if (expected) {
        auto a = expected->rel_arity(name.text);
        if (!a)
          throw ParseError("relation not in signature: " + name.text, name.line,
                           name.column);
        arity = *a;
      }
      RelBlock blk{name.text, arity, {}};
      // one tuple per line
      while (cur.peek().kind == TokKind::Number) {
        int line = cur.peek().line;
        std::vector<int> tuple;
        while (cur.peek().kind == TokKind::Number && cur.peek().line == line) {
          long v = cur.get().value;
          if (v < 0 || v >= n)
            throw ParseError("tuple entry out of range in " + name.text, name.line,
                             name.column);
          tuple.push_back(static_cast<int>(v));
        }
        if (blk.arity < 0) blk.arity = static_cast<int>(tuple.size());
        if (static_cast<int>(tuple.size()) != blk.arity)
          throw ParseError("tuple arity mismatch in " + name.text, name.line, name.column);
        blk.tuples.push_back(std::move(tuple));
      }
      if (blk.arity < 0)
        throw ParseError("cannot infer arity of empty relation " + name.text +
                             " (give it explicitly: rel NAME ARITY)",
                         name.line, name.column);
      rel_blocks.push_back(std::move(blk));
    } else {
      cur.fail("expected 'op', 'rel' or 'end'");
    }
  }
  cur.expect_keyword("end");
  if (cur.peek().kind != TokKind::End) cur.fail("unexpected trailing input");

  Signature sig;
  if (expected) {
    sig = *expected;
  } else {
    std::vector<OpSymbol> ops;
    std::vector<RelSymbol> rels;
    for (const auto& b : op_blocks) ops.push_back({b.name, b.arity});
    for (const auto& b : rel_blocks) rels.push_back({b.name, b.arity});
    sig = Signature(std::move(ops), std::move(rels));
  }

  Structure s(sig, n);
  for (auto& b : op_blocks) s.set_op_table(b.name, std::move(b.table));
  for (const auto& b : rel_blocks)
    for (const auto& tuple : b.tuples) s.add_rel_tuple(b.name, tuple);
  s.validate();
  return s;
}

}  // namespace epikit
