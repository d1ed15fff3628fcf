#include <algorithm>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "scj2/appmodel/compile.hpp"

using namespace scj2;
using app::Expr;
using app::Stmt;

namespace {

bool has_code(const std::vector<app::Diagnostic>& ds, const std::string& code) {
  return std::any_of(ds.begin(), ds.end(), [&](const auto& d) { return d.code == code; });
}

std::vector<app::Diagnostic> diagnose(const std::string& text) {
  auto r = app::parse_program(text);
  auto ds = r.diagnostics;
  if (r.spec) {
    auto more = app::validate_program(*r.spec);
    ds.insert(ds.end(), more.begin(), more.end());
  }
  return ds;
}

const char* kHeader = R"(
safelet App { sequencer = Seq; }
sequencer Seq { missions = [M]; }
)";

std::string with_header(const std::string& body) { return std::string(kHeader) + body; }

// Random ASTs for the printer/parser round trip.
class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  Expr int_expr(int depth) {
    Expr e;
    int c = depth <= 0 ? pick(2) : pick(5);
    if (c == 0) {
      e.kind = Expr::Kind::Int;
      e.value = pick(8);
    } else if (c == 1) {
      e.kind = Expr::Kind::Name;
      e.name = pick(2) ? "x" : "y";
    } else if (c == 2) {
      e.kind = Expr::Kind::Unary;
      e.op = kernel::Op::Neg;
      e.args.push_back(name_expr());
    } else {
      static const kernel::Op ops[] = {kernel::Op::Add, kernel::Op::Sub, kernel::Op::Mul,
                                       kernel::Op::Div, kernel::Op::Mod};
      e.kind = Expr::Kind::Binary;
      e.op = ops[pick(5)];
      e.args.push_back(int_expr(depth - 1));
      e.args.push_back(int_expr(depth - 1));
    }
    return e;
  }

  Expr bool_expr(int depth) {
    Expr e;
    int c = depth <= 0 ? 0 : pick(4);
    if (c == 0) {
      e.kind = Expr::Kind::Bool;
      e.value = pick(2);
    } else if (c == 1) {
      e.kind = Expr::Kind::Unary;
      e.op = kernel::Op::Not;
      e.args.push_back(bool_expr(depth - 1));
    } else if (c == 2) {
      static const kernel::Op ops[] = {kernel::Op::Eq, kernel::Op::Ne, kernel::Op::Lt,
                                       kernel::Op::Le, kernel::Op::Gt, kernel::Op::Ge};
      e.kind = Expr::Kind::Binary;
      e.op = ops[pick(6)];
      e.args.push_back(int_expr(depth - 1));
      e.args.push_back(int_expr(depth - 1));
    } else {
      e.kind = Expr::Kind::Binary;
      e.op = pick(2) ? kernel::Op::And : kernel::Op::Or;
      e.args.push_back(bool_expr(depth - 1));
      e.args.push_back(bool_expr(depth - 1));
    }
    return e;
  }

  std::vector<Stmt> block(int depth) {
    std::vector<Stmt> out;
    int n = 1 + pick(3);
    for (int i = 0; i < n; ++i) out.push_back(stmt(depth));
    return out;
  }

  Stmt stmt(int depth) {
    Stmt s;
    int c = depth <= 0 ? pick(5) : pick(8);
    switch (c) {
      case 0:
        s.kind = Stmt::Kind::Assign;
        s.name = "x";
        s.expr = int_expr(2);
        break;
      case 1:
        s.kind = Stmt::Kind::Sleep;
        s.value = 1 + pick(3);
        break;
      case 2:
        s.kind = Stmt::Kind::Probe;
        s.name = "p" + std::to_string(pick(3));
        break;
      case 3:
        s.kind = Stmt::Kind::Call;
        s.expr = call();
        break;
      case 4:
        s.kind = Stmt::Kind::Assign;
        s.name = "y";
        s.expr = call();
        break;
      case 5:
        s.kind = Stmt::Kind::If;
        s.expr = bool_expr(2);
        s.body = block(depth - 1);
        if (pick(2)) s.else_body = block(depth - 1);
        break;
      default:
        s.kind = Stmt::Kind::While;
        s.expr = bool_expr(2);
        s.body = block(depth - 1);
        break;
    }
    return s;
  }

 private:
  Expr name_expr() {
    Expr e;
    e.kind = Expr::Kind::Name;
    e.name = "x";
    return e;
  }

  Expr call() {
    Expr e;
    e.kind = Expr::Kind::Call;
    e.object = "M";
    e.name = "put";
    e.args.push_back(int_expr(1));
    return e;
  }

  std::mt19937 rng_;
};

app::AppSpec random_program(Gen& g) {
  app::AppSpec spec;
  app::SafeletDecl s;
  s.name = "App";
  s.sequencer = app::Name{"Seq", {}};
  spec.safelets.push_back(s);
  app::SequencerDecl q;
  q.name = "Seq";
  q.missions.push_back({"M", {}});
  spec.sequencers.push_back(q);

  app::MissionDecl m;
  m.object.name = "M";
  if (g.pick(2)) m.object.ceiling = 1 + g.pick(9);
  m.object.vars.push_back({"v", app::Type::Int, g.int_expr(0), {}});
  m.registers.push_back({"T", {}});
  app::Method put;
  put.name = "put";
  put.sync = g.pick(2);
  put.params.push_back({"a", app::Type::Int});
  put.ret = app::Type::Int;
  Stmt w;
  w.kind = Stmt::Kind::While;
  w.expr = g.bool_expr(1);
  Stmt wait;
  wait.kind = Stmt::Kind::Wait;
  w.body.push_back(wait);
  put.body.push_back(w);
  Stmt n;
  n.kind = g.pick(2) ? Stmt::Kind::Notify : Stmt::Kind::NotifyAll;
  put.body.push_back(n);
  Stmt ret;
  ret.kind = Stmt::Kind::Return;
  ret.expr = g.int_expr(2);
  put.body.push_back(ret);
  m.object.methods.push_back(put);
  if (g.pick(2)) m.cleanup = g.block(1);
  spec.missions.push_back(m);

  app::SchedDecl t;
  t.kind = app::SchedKind::Thread;
  t.name = "T";
  t.priority = 1 + g.pick(9);
  t.vars.push_back({"x", app::Type::Int, g.int_expr(0), {}});
  t.vars.push_back({"y", app::Type::Int, g.int_expr(0), {}});
  t.body = g.block(2);
  Stmt rt;
  rt.kind = Stmt::Kind::RequestTermination;
  rt.name = "M";
  t.body.push_back(rt);
  spec.schedulables.push_back(t);

  app::SchedDecl p;
  p.kind = app::SchedKind::Periodic;
  p.name = "P";
  p.priority = 1 + g.pick(9);
  p.period = 1 + g.pick(7);
  if (g.pick(2)) p.offset = g.pick(4);
  if (g.pick(2)) p.deadline = 1 + g.pick(7);
  p.body = g.block(1);
  spec.schedulables.push_back(p);
  return spec;
}

}  // namespace

TEST_CASE("flatbuffer parses into the expected structure") {
  auto spec = testutil::parse_ok(testutil::read_file("programs/flatbuffer.scj2"));
  REQUIRE(spec.safelets.size() == 1);
  REQUIRE(spec.safelets[0].sequencer);
  CHECK(spec.safelets[0].sequencer->text == "FlatBufferSequencer");
  REQUIRE(spec.missions.size() == 1);
  const auto& m = spec.missions[0];
  CHECK(m.object.name == "FlatBufferMission");
  REQUIRE(m.registers.size() == 2);
  CHECK(m.registers[0].text == "Reader");
  CHECK(m.registers[1].text == "Writer");
  REQUIRE(m.object.methods.size() == 3);
  CHECK_FALSE(m.object.methods[0].sync);
  CHECK(m.object.methods[1].sync);
  CHECK(m.object.methods[2].sync);
  REQUIRE(spec.schedulables.size() == 2);
  for (const auto& s : spec.schedulables) {
    CHECK(s.kind == app::SchedKind::Thread);
    CHECK(s.priority == 5);
  }
  CHECK(app::validate_program(spec).empty());
}

TEST_CASE("empty input reports a missing safelet") {
  for (const char* text : {"", "   \n// only a comment\n"}) {
    auto r = app::parse_program(text);
    CHECK_FALSE(r.spec);
    CHECK(has_code(r.diagnostics, app::codes::kMissingSafelet));
  }
}

TEST_CASE("wait on another object is rejected by the parser") {
  auto r = app::parse_program(with_header(R"(
mission M { registers = [T]; sync method f() { wait(O); } }
object O { vars { a: int = 0; } }
thread T priority=1 { run { M.f(); } }
)"));
  CHECK_FALSE(r.spec);
  CHECK(has_code(r.diagnostics, app::codes::kWaitNotOnThis));
}

TEST_CASE("syntax errors carry a position") {
  auto r = app::parse_program("safelet A { sequencer = ; }");
  REQUIRE_FALSE(r.diagnostics.empty());
  CHECK(r.diagnostics[0].code == app::codes::kSyntax);
  CHECK(r.diagnostics[0].loc.line == 1);
  CHECK(r.diagnostics[0].str().find("error[E001]") != std::string::npos);
}

TEST_CASE("validator codes") {
  SUBCASE("undeclared registration") {
    auto ds = diagnose(with_header("mission M { registers = [Ghost]; }"));
    CHECK(has_code(ds, app::codes::kUndeclared));
  }
  SUBCASE("duplicate declaration") {
    auto ds = diagnose(with_header(R"(
mission M { registers = [T]; }
thread T priority=1 { run { requestTermination(M); } }
thread T priority=2 { run { requestTermination(M); } }
)"));
    CHECK(has_code(ds, app::codes::kDuplicate));
  }
  SUBCASE("bad parameter") {
    auto ds = diagnose(with_header(R"(
mission M { registers = [P]; }
periodic P priority=1 period=0 { handle { probe(a); } }
)"));
    CHECK(has_code(ds, app::codes::kBadParameter));
  }
  SUBCASE("kind mismatch") {
    auto ds = diagnose(with_header(R"(
mission M { registers = [T]; }
thread T priority=1 { run { fire(T); } }
)"));
    CHECK(has_code(ds, app::codes::kKindMismatch));
  }
  SUBCASE("multiple safelets") {
    auto ds = diagnose(with_header(R"(
safelet Other { sequencer = null; }
mission M { registers = []; }
)"));
    CHECK(has_code(ds, app::codes::kMultipleSafelets));
  }
  SUBCASE("void variable") {
    auto ds = diagnose(with_header(R"(
mission M { vars { a: void = 0; } registers = []; }
)"));
    CHECK(has_code(ds, app::codes::kType));
  }
  SUBCASE("sleep out of range") {
    auto ds = diagnose(with_header(R"(
mission M { registers = [T]; }
thread T priority=1 { run { sleep(100); } }
)"));
    CHECK(has_code(ds, app::codes::kRange));
  }
  SUBCASE("wait outside a method") {
    auto r = app::parse_program(with_header(R"(
mission M { registers = [T]; }
thread T priority=1 { run { wait(M); } }
)"));
    auto ds = r.diagnostics;
    if (r.spec) {
      auto more = app::validate_program(*r.spec);
      ds.insert(ds.end(), more.begin(), more.end());
    }
    CHECK(app::has_errors(ds));
  }
  SUBCASE("double registration is only a warning") {
    auto ds = diagnose(testutil::read_file("tests/programs/double_registration.scj2"));
    CHECK(has_code(ds, app::codes::kDoubleRegistration));
    CHECK_FALSE(app::has_errors(ds));
  }
  SUBCASE("unregistered schedulable") {
    auto ds = diagnose(with_header(R"(
mission M { registers = []; }
thread T priority=1 { run { probe(a); } }
)"));
    CHECK(has_code(ds, app::codes::kUnreachable));
    CHECK_FALSE(app::has_errors(ds));
  }
}

TEST_CASE("bundled programs round-trip through the printer") {
  namespace fs = std::filesystem;
  int seen = 0;
  for (const char* dir : {"programs", "programs/corpus", "tests/programs"}) {
    for (const auto& entry : fs::directory_iterator(testutil::source_path(dir))) {
      if (entry.path().extension() != ".scj2") continue;
      std::string rel = std::string(dir) + "/" + entry.path().filename().string();
      CAPTURE(rel);
      auto spec = testutil::parse_ok(testutil::read_file(rel));
      std::string printed = app::print_program(spec);
      auto again = testutil::parse_ok(printed);
      CHECK(again == spec);
      CHECK(app::print_program(again) == printed);
      ++seen;
    }
  }
  CHECK(seen >= 19);
}

TEST_CASE("random programs round-trip through the printer") {
  Gen g(20261018);
  for (int i = 0; i < 300; ++i) {
    auto spec = random_program(g);
    std::string printed = app::print_program(spec);
    CAPTURE(printed);
    auto r = app::parse_program(printed);
    REQUIRE(r.spec);
    CHECK(*r.spec == spec);
  }
}

TEST_CASE("flatbuffer compiles to the expected components and shared state") {
  auto spec = testutil::parse_ok(testutil::read_file("programs/flatbuffer.scj2"));
  auto prog = app::compile_program(spec);
  CHECK(prog.monitors.size() == 1);
  CHECK(prog.threads.size() == 2);
  CHECK(prog.shared.size() == 1);
  CHECK(prog.shared.get(intern("FlatBufferMission.buffer")) == Value::integer(0));
  const auto* mission = spec.find_object("FlatBufferMission");
  REQUIRE(mission);
  CHECK(app::is_pure(spec, *mission, mission->methods[0]));
  CHECK_FALSE(app::is_pure(spec, *mission, mission->methods[1]));
  CHECK_FALSE(app::is_pure(spec, *mission, mission->methods[2]));
}

TEST_CASE("flatbuffer event behaviour") {
  auto comp = testutil::assemble_file("programs/flatbuffer.scj2");
  auto g = testutil::explore_all(comp);
  REQUIRE_FALSE(g.partial);
  auto events = testutil::all_events(g);

  SUBCASE("pure methods produce no events") {
    for (const auto& e : events) CHECK(e.find("bufferEmpty") == std::string::npos);
  }

  SUBCASE("Reader is registered before Writer") {
    auto v = testutil::find_violation(g, [](int q, const std::string& ev) -> std::optional<int> {
      if (ev == "register(Reader,FlatBufferMission)") return q == 0 ? std::optional<int>(1) : std::nullopt;
      if (ev == "register(Writer,FlatBufferMission)") return q == 1 ? std::optional<int>(2) : std::nullopt;
      return q;
    });
    CHECK_FALSE(v);
  }

  SUBCASE("every read by Reader follows the synchronized method skeleton") {
    // 0 outside, 1 called, 2 inside before notify, 3 inside after notify,
    // 4 left the monitor
    auto is = [](const std::string& ev, const char* ch) {
      return testutil::starts_with(ev, std::string(ch) + "(FlatBufferMission,Reader");
    };
    auto v = testutil::find_violation(g, [&](int q, const std::string& ev) -> std::optional<int> {
      if (is(ev, "readCall")) return q == 0 ? std::optional<int>(1) : std::nullopt;
      if (is(ev, "startSyncMeth")) return q == 1 ? std::optional<int>(2) : std::nullopt;
      if (is(ev, "waitCall") || is(ev, "waitRet")) return q == 2 ? std::optional<int>(2) : std::nullopt;
      if (is(ev, "lockAcquired")) return q == 2 ? std::optional<int>(2) : std::nullopt;
      if (is(ev, "notify")) return q == 2 ? std::optional<int>(3) : std::nullopt;
      if (is(ev, "endSyncMeth")) return q == 3 ? std::optional<int>(4) : std::nullopt;
      if (is(ev, "readRet")) return q == 4 ? std::optional<int>(0) : std::nullopt;
      return q;
    });
    if (v) {
      std::string path;
      for (const auto& e : *v) path += e + " ";
      FAIL_CHECK(path);
    }
    CHECK(events.count("readCall(FlatBufferMission,Reader)") == 1);
    CHECK(events.count("waitCall(FlatBufferMission,Reader)") == 1);
  }
}

TEST_CASE("derived interests cover the channels of each application term") {
  auto spec = testutil::parse_ok(testutil::read_file("programs/flatbuffer.scj2"));
  auto prog = app::compile_program(spec);
  int terms = 0;
  for (const auto& c : prog.components) {
    if (!c.term) continue;
    ++terms;
    auto derived = app::derive_interests(c.term);
    CHECK_FALSE(derived.empty());
    for (const auto& d : derived) {
      bool covered = std::any_of(c.interests.begin(), c.interests.end(),
                                 [&](const auto& i) { return i.channel == d.channel; });
      CAPTURE(sym_name(d.channel));
      CHECK(covered);
    }
  }
  CHECK(terms > 0);
}

TEST_CASE("derived interests fix literal output fields") {
  auto spec = testutil::parse_ok(testutil::read_file("programs/flatbuffer.scj2"));
  auto prog = app::compile_program(spec);
  const Sym reader = intern("Reader");
  for (const auto& c : prog.components) {
    if (c.id != reader || !c.term) continue;
    for (const auto& d : app::derive_interests(c.term)) {
      if (sym_name(d.channel) != "readCall") continue;
      REQUIRE(d.fields.size() >= 2);
      CHECK(d.fields[1] == Value::id(reader));
    }
  }
}
