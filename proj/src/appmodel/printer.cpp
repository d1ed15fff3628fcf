#include <sstream>

#include "scj2/appmodel/program.hpp"

namespace scj2::app {

namespace {

const char* op_text(kernel::Op op) {
  using kernel::Op;
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "%";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Not: return "!";
    case Op::Neg: return "-";
    default: return "?";
  }
}

class Printer {
 public:
  std::string take() { return out_.str(); }

  void expr(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Int:
        out_ << e.value;
        break;
      case Expr::Kind::Bool:
        out_ << (e.value ? "true" : "false");
        break;
      case Expr::Kind::Null:
        out_ << "null";
        break;
      case Expr::Kind::Name:
        out_ << e.name;
        break;
      case Expr::Kind::Unary:
        out_ << op_text(e.op) << "(";
        expr(e.args.at(0));
        out_ << ")";
        break;
      case Expr::Kind::Binary:
        out_ << "(";
        expr(e.args.at(0));
        out_ << " " << op_text(e.op) << " ";
        expr(e.args.at(1));
        out_ << ")";
        break;
      case Expr::Kind::Call:
        if (!e.object.empty()) out_ << e.object << ".";
        out_ << e.name << "(";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
          if (i) out_ << ", ";
          expr(e.args[i]);
        }
        out_ << ")";
        break;
    }
  }

  void block(const std::vector<Stmt>& body, int depth) {
    out_ << "{\n";
    for (const auto& s : body) stmt(s, depth + 1);
    indent(depth);
    out_ << "}";
  }

  void stmt(const Stmt& s, int depth) {
    indent(depth);
    switch (s.kind) {
      case Stmt::Kind::VarDecl:
        out_ << "var " << s.name << ": " << type_name(s.type) << " = ";
        expr(*s.expr);
        out_ << ";";
        break;
      case Stmt::Kind::Assign:
        out_ << s.name << " = ";
        expr(*s.expr);
        out_ << ";";
        break;
      case Stmt::Kind::Call:
        expr(*s.expr);
        out_ << ";";
        break;
      case Stmt::Kind::If:
        out_ << "if (";
        expr(*s.expr);
        out_ << ") ";
        block(s.body, depth);
        if (!s.else_body.empty()) {
          out_ << " else ";
          block(s.else_body, depth);
        }
        break;
      case Stmt::Kind::While:
        out_ << "while (";
        expr(*s.expr);
        out_ << ") ";
        block(s.body, depth);
        break;
      case Stmt::Kind::Wait:
        out_ << "wait();";
        break;
      case Stmt::Kind::Notify:
        out_ << "notify();";
        break;
      case Stmt::Kind::NotifyAll:
        out_ << "notifyAll();";
        break;
      case Stmt::Kind::RequestTermination:
        out_ << "requestTermination(" << s.name << ");";
        break;
      case Stmt::Kind::Fire:
        out_ << "fire(" << s.name << ");";
        break;
      case Stmt::Kind::Interrupt:
        out_ << "interrupt();";
        break;
      case Stmt::Kind::Sleep:
        out_ << "sleep(" << s.value << ");";
        break;
      case Stmt::Kind::Return:
        out_ << "return";
        if (s.expr) {
          out_ << " ";
          expr(*s.expr);
        }
        out_ << ";";
        break;
      case Stmt::Kind::Probe:
        out_ << "probe(" << s.name << ");";
        break;
    }
    out_ << "\n";
  }

  void vars(const std::vector<VarDecl>& vs, int depth) {
    if (vs.empty()) return;
    indent(depth);
    out_ << "vars {\n";
    for (const auto& v : vs) {
      indent(depth + 1);
      out_ << v.name << ": " << type_name(v.type) << " = ";
      expr(v.init);
      out_ << ";\n";
    }
    indent(depth);
    out_ << "}\n";
  }

  void names(const std::vector<Name>& ns) {
    out_ << "[";
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (i) out_ << ", ";
      out_ << ns[i].text;
    }
    out_ << "]";
  }

  void method(const Method& m) {
    indent(1);
    if (m.sync) out_ << "sync ";
    out_ << "method " << m.name << "(";
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      if (i) out_ << ", ";
      out_ << m.params[i].name << ": " << type_name(m.params[i].type);
    }
    out_ << ")";
    if (m.ret != Type::Void) out_ << ": " << type_name(m.ret);
    out_ << " ";
    block(m.body, 1);
    out_ << "\n";
  }

  void object(const char* kw, const ObjectDecl& o, const MissionDecl* m) {
    out_ << kw << " " << o.name;
    if (o.ceiling) out_ << " ceiling=" << *o.ceiling;
    out_ << " {\n";
    vars(o.vars, 1);
    if (m) {
      indent(1);
      out_ << "registers = ";
      names(m->registers);
      out_ << ";\n";
    }
    for (const auto& meth : o.methods) method(meth);
    if (m && m->cleanup) {
      indent(1);
      out_ << "cleanup ";
      block(*m->cleanup, 1);
      out_ << "\n";
    }
    out_ << "}\n\n";
  }

  void schedulable(const SchedDecl& s) {
    out_ << sched_keyword(s.kind) << " " << s.name;
    if (s.priority) out_ << " priority=" << s.priority;
    if (s.period) out_ << " period=" << s.period;
    if (s.offset) out_ << " offset=" << s.offset;
    if (s.deadline) out_ << " deadline=" << *s.deadline;
    out_ << " {\n";
    if (s.kind == SchedKind::Sequencer) {
      indent(1);
      out_ << "missions = ";
      names(s.missions);
      out_ << ";\n";
    } else {
      vars(s.vars, 1);
      indent(1);
      out_ << (s.kind == SchedKind::Thread ? "run " : "handle ");
      block(s.body, 1);
      out_ << "\n";
    }
    out_ << "}\n\n";
  }

  void program(const AppSpec& spec) {
    if (spec.config) {
      const Config& c = *spec.config;
      out_ << "config {\n  ints = " << c.int_lo << ".." << c.int_hi
           << ";\n  priorities = " << c.prio_lo << ".." << c.prio_hi << ";\n}\n\n";
    }
    for (const auto& s : spec.safelets) {
      out_ << "safelet " << s.name << " {\n  sequencer = "
           << (s.sequencer ? s.sequencer->text : "null") << ";\n}\n\n";
    }
    for (const auto& q : spec.sequencers) {
      out_ << "sequencer " << q.name << " {\n  missions = ";
      names(q.missions);
      out_ << ";\n}\n\n";
    }
    for (const auto& m : spec.missions) object("mission", m.object, &m);
    for (const auto& o : spec.objects) object("object", o, nullptr);
    for (const auto& s : spec.schedulables) schedulable(s);
  }

 private:
  void indent(int depth) {
    for (int i = 0; i < depth; ++i) out_ << "  ";
  }

  std::ostringstream out_;
};

}  // namespace

std::string print_program(const AppSpec& spec) {
  Printer p;
  p.program(spec);
  return p.take();
}

}  // namespace scj2::app
