#include "support.hpp"

#include "psense/dsl/parser.hpp"
#include "psense/model/guard.hpp"
#include "psense/model/loop_model.hpp"

#include <doctest.h>

#include <filesystem>
#include <map>

using namespace psense;
using namespace psense::model;
using testsupport::Rng;

namespace {

GuardDnf dnf_of(const std::string& guard, const std::vector<std::string>& vars) {
  dsl::Program p = dsl::parse("while " + guard + " do skip od");
  return guard_to_dnf(*std::get<dsl::WhileStmt>(p.statements[0].node).guard, vars);
}

// Direct AST interpreter for one loop-body pass with fixed branch choices
// (`path`, consumed left to right) and fixed values for each sampling read.
class BodyInterpreter {
 public:
  BodyInterpreter(const dsl::Program& program, const std::string& path,
                  const std::map<std::pair<int, int>, Rational>& reads)
      : program_(program), path_(path), reads_(reads) {}

  std::map<std::string, Rational> run(const dsl::Block& body, std::map<std::string, Rational> state) {
    state_ = std::move(state);
    exec(body);
    CHECK(cursor_ == path_.size());
    return state_;
  }

 private:
  Rational eval(const dsl::Expr& e) {
    using K = dsl::Expr::Kind;
    switch (e.kind) {
      case K::Number: return e.value;
      case K::Variable:
        if (program_.is_sampling_variable(e.name)) return reads_.at({e.span.line, e.span.column});
        return state_.count(e.name) ? state_.at(e.name) : Rational(0);
      case K::Negate: return -eval(*e.lhs);
      case K::Add: return eval(*e.lhs) + eval(*e.rhs);
      case K::Sub: return eval(*e.lhs) - eval(*e.rhs);
      case K::Mul: return eval(*e.lhs) * eval(*e.rhs);
      case K::Div: return eval(*e.lhs) / eval(*e.rhs);
    }
    return 0;
  }

  void exec(const dsl::Block& block) {
    for (const auto& stmt : block) {
      if (const auto* a = std::get_if<dsl::AssignStmt>(&stmt.node)) {
        std::vector<Rational> values;
        for (const auto& v : a->values) values.push_back(eval(*v));
        for (std::size_t i = 0; i < a->targets.size(); ++i) state_[a->targets[i]] = values[i];
      } else if (const auto* p = std::get_if<dsl::ProbStmt>(&stmt.node)) {
        REQUIRE(cursor_ < path_.size());
        char choice = path_[cursor_++];
        exec(choice == 'L' ? p->then_body : p->else_body);
      } else {
        REQUIRE(std::holds_alternative<dsl::SkipStmt>(stmt.node));
      }
    }
  }

  const dsl::Program& program_;
  std::string path_;
  std::size_t cursor_ = 0;
  const std::map<std::pair<int, int>, Rational>& reads_;
  std::map<std::string, Rational> state_;
};

std::vector<std::string> corpus_files() {
  std::vector<std::string> files;
  for (const auto& dir : {std::string(PSENSE_CORPUS_DIR), std::string(PSENSE_CORPUS_DIR) + "/misc"})
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.path().extension() == ".pprog") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

TEST_CASE("guard to DNF: conjunction") {
  GuardDnf g = dnf_of("x >= 1 and w >= 0", {"x", "w"});
  REQUIRE(g.disjuncts.size() == 1);
  const auto& rows = g.disjuncts[0].rows;
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].coeffs == RationalVector{-1, 0});
  CHECK(rows[0].bound == -1);
  CHECK(rows[1].coeffs == RationalVector{0, -1});
  CHECK(rows[1].bound == 0);
}

TEST_CASE("guard to DNF: disjunction") {
  CHECK(dnf_of("x <= 0 or x >= 10", {"x"}).disjuncts.size() == 2);
}

TEST_CASE("guard to DNF: negated atom keeps a strict row") {
  GuardDnf g = dnf_of("not (x <= 1000)", {"x"});
  REQUIRE(g.disjuncts.size() == 1);
  REQUIRE(g.disjuncts[0].rows.size() == 1);
  const auto& row = g.disjuncts[0].rows[0];
  CHECK(row.coeffs == RationalVector{-1});
  CHECK(row.bound == -1000);
  CHECK(row.strict);
  // The closure is x >= 1000; the set itself excludes 1000.
  CHECK(!g.contains({Rational(1000)}));
  CHECK(g.contains({Rational(1001)}));
}

TEST_CASE("negation of x >= 1") {
  GuardDnf neg = negate_guard(dnf_of("x >= 1", {"x"}));
  REQUIRE(neg.disjuncts.size() == 1);
  CHECK(neg.disjuncts[0].rows[0].coeffs == RationalVector{1});
  CHECK(neg.disjuncts[0].rows[0].bound == 1);
  for (Rational x : {Rational(0), Rational(1, 2), Rational(2)}) CHECK(neg.contains({x}) == !(x >= 1));
}

TEST_CASE("negation of a band splits in two") {
  GuardDnf neg = negate_guard(dnf_of("0 <= x <= 20", {"x"}));
  CHECK(neg.disjuncts.size() == 2);
  for (int x = -5; x <= 25; ++x) CHECK(neg.contains({Rational(x)}) == (x < 0 || x > 20));
}

TEST_CASE("negation of the whole space is empty") {
  GuardDnf everything;
  everything.dimension = 1;
  everything.disjuncts.push_back(Polyhedron{});
  CHECK(negate_guard(everything).is_false());
}

TEST_CASE("negated guard is the complement on grid samples") {
  const std::vector<std::string> vars = {"x", "y"};
  for (const std::string guard : {"x <= 3 and y >= -2", "x + y <= 4 or x - y > 1", "not (x < 0 and y < 0)",
                                  "-1 <= x <= 1 and -1 <= y <= 1"}) {
    INFO(guard);
    GuardDnf g = dnf_of(guard, vars);
    GuardDnf neg = negate_guard(g);
    for (int i = -8; i <= 8; ++i)
      for (int j = -8; j <= 8; ++j) {
        RationalVector v{Rational(i, 2), Rational(j, 2)};
        CHECK(g.contains(v) != neg.contains(v));
      }
  }
}

TEST_CASE("running example has one resolution x + r") {
  auto models = testsupport::models_from_text("r ~ unif(0, 1)\nwhile x <= 1000 do x := x + r od");
  REQUIRE(models.size() == 1);
  const auto& m = models[0];
  REQUIRE(m.resolutions.size() == 1);
  CHECK(m.resolutions[0].probability == 1);
  CHECK(m.resolutions[0].update.B == RationalMatrix{{1}});
  CHECK(m.resolutions[0].update.C == RationalMatrix{{1}});
  CHECK(m.resolutions[0].update.offset == RationalVector{0});
}

TEST_CASE("mini-roulette resolution probabilities") {
  auto m = testsupport::corpus_model("mini-roulette.pprog");
  REQUIRE(m.resolutions.size() == 6);
  // Products of the nested branch probabilities along each path.
  Rational remaining = 1;
  std::vector<Rational> expected;
  for (Rational p : {Rational(6, 65), Rational(4, 59), Rational(3, 55), Rational(2, 52), Rational(1, 50)}) {
    expected.push_back(remaining * p);
    remaining *= 1 - p;
  }
  expected.push_back(remaining);
  CHECK(expected == std::vector<Rational>{Rational(6, 65), Rational(4, 65), Rational(3, 65), Rational(2, 65),
                                          Rational(1, 65), Rational(49, 65)});
  std::vector<Rational> got;
  for (const auto& r : m.resolutions) got.push_back(r.probability);
  CHECK(got == expected);
}

TEST_CASE("skip body is the identity") {
  auto m = testsupport::models_from_text("while x >= 0 do skip od").at(0);
  REQUIRE(m.resolutions.size() == 1);
  CHECK(m.resolutions[0].update.B == RationalMatrix{{1}});
  CHECK(m.resolutions[0].update.offset == RationalVector{0});
}

TEST_CASE("each sampling read is its own column") {
  auto m = testsupport::models_from_text("r ~ unif(0, 1)\nwhile x <= 10 do x := x + r; y := y + r od").at(0);
  CHECK(m.columns.size() == 2);
  CHECK(m.resolutions[0].columns_used == std::vector<std::size_t>{0, 1});
}

TEST_CASE("resolution cap") {
  std::string body;
  for (int i = 0; i < 13; ++i) body += "if prob(0.5) then x := x + 1 else x := x - 1 fi; ";
  body += "skip";
  CHECK_THROWS_AS(testsupport::models_from_text("while x <= 10 do " + body + " od"), ResolutionBlowup);
}

TEST_CASE("corpus: probabilities are positive and sum to one") {
  for (const auto& f : corpus_files()) {
    INFO(f);
    dsl::Program program = dsl::parse(testsupport::read_text(f), f);
    for (const auto& m : extract_models(program)) {
      Rational total = 0;
      for (const auto& r : m.resolutions) {
        total += r.probability;
        CHECK(r.probability > 0);
      }
      CHECK(total == 1);
    }
  }
}

TEST_CASE("corpus: model updates agree with direct interpretation") {
  Rng rng(7);
  for (const auto& f : corpus_files()) {
    INFO(f);
    dsl::Program program = dsl::parse(testsupport::read_text(f), f);
    auto models = extract_models(program);
    std::size_t loop_no = 0;
    for (const auto& stmt : program.statements) {
      const auto* loop = std::get_if<dsl::WhileStmt>(&stmt.node);
      if (!loop) continue;
      const LoopModel& m = models.at(loop_no++);
      for (int trial = 0; trial < 100; ++trial) {
        RationalVector v;
        std::map<std::string, Rational> state;
        for (const auto& name : m.program_variables) {
          v.push_back(rng.rational(-50, 50, 8));
          state[name] = v.back();
        }
        RationalVector r;
        std::map<std::pair<int, int>, Rational> reads;
        for (const auto& col : m.columns) {
          r.push_back(rng.rational(-5, 5, 4));
          reads[{col.span.line, col.span.column}] = r.back();
        }
        const auto& res = m.resolutions[static_cast<std::size_t>(rng.integer(0, (long)m.resolutions.size() - 1))];
        BodyInterpreter interp(program, res.path, reads);
        auto after = interp.run(loop->body, state);
        RationalVector expected = res.update.apply(v, r);
        for (std::size_t z = 0; z < m.dimension(); ++z) CHECK(after[m.program_variables[z]] == expected[z]);
      }
    }
  }
}

TEST_CASE("model JSON has resolutions and columns") {
  auto m = testsupport::corpus_model("prdwalk.pprog");
  auto json = to_json(m);
  CHECK(json["resolutions"].size() == 2);
  CHECK(json["columns"].size() == 2);
}
