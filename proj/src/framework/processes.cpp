#include "scj2/framework/processes.hpp"

#include <algorithm>

#include "scj2/sync/monitor.hpp"
#include "scj2/sync/protocol.hpp"

namespace scj2::framework {

using namespace kernel;

namespace {

FieldPattern out(ExprPtr e) { return FieldPattern::out(std::move(e)); }
FieldPattern in(Sym v) { return FieldPattern::in(v); }

TermPtr on(Sym ch, std::vector<FieldPattern> fields, TermPtr k) {
  return prefix(EventPattern{ch, std::move(fields)}, std::move(k));
}

TermPtr emit(Sym ch, std::vector<ExprPtr> values, TermPtr k) {
  std::vector<FieldPattern> fields;
  for (auto& v : values) fields.push_back(out(std::move(v)));
  return on(ch, std::move(fields), std::move(k));
}

TermPtr raise(sync::ExceptionKind k) {
  return emit(sync::sync_channels().throw_,
              {id_lit(intern(sync::exception_name(k)))}, chaos());
}

/// Framework processes stay alive until the safelet ends the program.
TermPtr until_end(TermPtr body) {
  return interrupt(seq(std::move(body), stop()),
                   EventPattern{sync::sync_channels().end_of_program, {}});
}

Sym qualified(const char* prefix, Sym s) {
  return intern(std::string(prefix) + "." + sym_name(s));
}

struct Builder {
  Component c;

  Builder(const char* kind, Sym id) { c.id = qualified(kind, id); }

  Sym var(const std::string& name, Domain d, Value init) {
    Sym v = intern(name);
    c.store.set(v, init);
    c.domains[v] = std::move(d);
    return v;
  }
  Sym flag(const std::string& name) {
    return var(name, Domain::booleans(), Value::boolean(false));
  }
  void wants(Sym ch, std::vector<std::optional<Value>> fields = {}) {
    c.interests.push_back(Interest{ch, std::move(fields)});
  }
  /// Accepts whatever value the application side offers.
  void listens(Sym ch, std::vector<std::optional<Value>> fields = {}) {
    c.interests.push_back(Interest{ch, std::move(fields), true});
  }
  Component finish(TermPtr body) {
    c.term = until_end(std::move(body));
    c.timed = mentions_time(*c.term);
    wants(sync::sync_channels().end_of_program);
    return std::move(c);
  }
};

ExprPtr v(Sym s) { return var(s); }
ExprPtr tt() { return bool_lit(true); }
ExprPtr ff() { return bool_lit(false); }

ExprPtr none_of(const std::vector<Sym>& flags) {
  ExprPtr e = tt();
  for (Sym f : flags) e = and_(e, not_(var(f)));
  return e;
}

std::vector<Sym> dedup(std::vector<Sym> v) {
  std::vector<Sym> out;
  for (Sym s : v) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

IntRange timing_range(const ReleaseParams& p) {
  int hi = std::max({7, p.period, p.offset, p.deadline.value_or(0) + 1});
  return IntRange{0, hi};
}

/// One tick of release-time accounting: counts ticks since releaseStart and
/// reports a deadline miss when the count reaches the deadline.
TermPtr deadline_tick(const ReleaseParams& p, Sym since, Sym h, TermPtr k) {
  const auto& c = channels();
  auto bumped = assign(since,
                       binary(Op::Add, var(since), int_lit(1)),
                       if_then_else(eq(var(since), int_lit(*p.deadline)),
                                    emit(c.deadline_miss, {id_lit(h)}, k), k));
  // past the deadline the counter stays at deadline + 1
  return if_then_else(binary(Op::Le, var(since), int_lit(*p.deadline)), bumped, k);
}

}  // namespace

Component safelet_fw(const Universe& u) {
  const auto& c = channels();
  Builder b("SafeletFW", intern("safelet"));
  Sym seqv = b.var("seq", u.sequencer_ids(true), Value::null());
  Sym X = intern("Registry");

  std::vector<TermPtr> alts;
  for (Sym s : u.schedulables) {
    Sym reg = b.flag("reg." + sym_name(s));
    for (Sym m : u.missions) {
      auto check = [&](bool ok) {
        return emit(c.check_schedulable, {id_lit(m), bool_lit(ok)}, recvar(X));
      };
      alts.push_back(emit(c.register_, {id_lit(s), id_lit(m)},
                          if_then_else(v(reg), check(false), assign(reg, tt(), check(true)))));
    }
  }
  alts.push_back(emit(c.sequencer_done, {v(seqv)},
                      emit(sync::sync_channels().end_of_program, {}, skip())));

  auto body = emit(
      c.get_sequencer_call, {},
      on(c.get_sequencer_ret, {in(seqv)},
         if_then_else(eq(v(seqv), null_lit()), raise(sync::ExceptionKind::IllegalArgument),
                      emit(c.start_sequencer, {v(seqv)}, rec(X, choice(alts))))));

  b.wants(c.get_sequencer_call);
  b.listens(c.get_sequencer_ret);
  b.wants(c.start_sequencer);
  b.wants(c.sequencer_done);
  b.wants(c.register_);
  b.wants(c.check_schedulable);
  b.wants(sync::sync_channels().end_of_program);
  b.c.term = body;  // the safelet itself ends the program
  return std::move(b.c);
}

Component top_sequencer_fw(Sym id, const std::vector<Sym>& missions, const Universe& u) {
  const auto& c = channels();
  Builder b("SequencerFW", id);
  Sym m = b.var("m", u.mission_ids(true), Value::null());
  Sym X = intern("Sequence");
  auto q = id_lit(id);
  auto body = emit(
      c.start_sequencer, {q},
      rec(X, emit(c.get_next_mission_call, {q},
                  on(c.get_next_mission_ret, {out(q), in(m)},
                     if_then_else(eq(v(m), null_lit()),
                                  emit(c.sequencer_done, {q}, skip()),
                                  emit(c.start_mission, {v(m), q},
                                       emit(c.mission_done, {v(m)}, recvar(X))))))));
  const Value qv = Value::id(id);
  b.wants(c.start_sequencer, {qv});
  b.wants(c.get_next_mission_call, {qv});
  b.listens(c.get_next_mission_ret, {qv});
  b.wants(c.start_mission, {std::nullopt, qv});
  for (Sym mi : dedup(missions)) b.wants(c.mission_done, {Value::id(mi)});
  b.wants(c.sequencer_done, {qv});
  return b.finish(body);
}

Component sched_sequencer_fw(Sym id, const std::vector<Sym>& missions, int priority,
                             const Universe& u) {
  const auto& c = channels();
  Builder b("SequencerFW", id);
  Sym m = b.var("m", u.mission_ids(true), Value::null());
  Sym stopping = b.flag("stopping");
  Sym X = intern("Sequence");
  auto q = id_lit(id);

  auto finish = emit(c.done, {q}, skip());
  auto stop_req = [&](TermPtr k) {
    return emit(c.stop, {q}, assign(stopping, tt(), k));
  };
  auto running = choice(
      emit(c.mission_done, {v(m)}, recvar(X)),
      guard(not_(v(stopping)),
            stop_req(choice(emit(c.request_termination, {v(m), q},
                                 emit(c.mission_done, {v(m)}, recvar(X))),
                            emit(c.mission_done, {v(m)}, recvar(X))))));
  auto next = emit(c.get_next_mission_call, {q},
                   on(c.get_next_mission_ret, {out(q), in(m)},
                      if_then_else(eq(v(m), null_lit()), finish,
                                   emit(c.start_mission, {v(m), q}, running))));
  auto body = emit(c.start_schedulable, {q},
                   rec(X, if_then_else(v(stopping), finish,
                                       choice(next, stop_req(recvar(X))))));
  const Value qv = Value::id(id);
  b.listens(c.start_schedulable, {qv});
  b.listens(c.stop, {qv});
  b.wants(c.done, {qv});
  b.wants(c.get_next_mission_call, {qv});
  b.listens(c.get_next_mission_ret, {qv});
  b.wants(c.start_mission, {std::nullopt, qv});
  for (Sym mi : dedup(missions)) {
    b.wants(c.mission_done, {Value::id(mi)});
    b.wants(c.request_termination, {Value::id(mi), qv});
  }
  b.c.priority = priority;
  return b.finish(body);
}

Component mission_fw(Sym id, const std::vector<Sym>& registers, const Universe& u) {
  const auto& c = channels();
  Builder b("MissionFW", id);
  auto M = id_lit(id);
  Sym q = b.var("q", u.sequencer_ids(), u.sequencer_ids().minimum());
  Sym chk = b.flag("chk");
  auto sched = dedup(registers);
  std::vector<Sym> reg, active, stopped;
  for (Sym s : sched) {
    reg.push_back(b.flag("reg." + sym_name(s)));
    active.push_back(b.flag("active." + sym_name(s)));
    stopped.push_back(b.flag("stopped." + sym_name(s)));
  }
  Sym L = intern("Mission"), R = intern("Initialize"), E = intern("Execute"),
      T = intern("Terminate");

  // (1) initialisation
  std::vector<TermPtr> init_alts;
  for (std::size_t i = 0; i < sched.size(); ++i) {
    init_alts.push_back(emit(
        c.register_, {id_lit(sched[i]), M},
        on(c.check_schedulable, {out(M), in(chk)},
           if_then_else(v(chk), assign(reg[i], tt(), recvar(R)),
                        raise(sync::ExceptionKind::IllegalState)))));
  }

  // (2) atomic start, then execution
  std::vector<TermPtr> starts;
  for (std::size_t i = 0; i < sched.size(); ++i) {
    starts.push_back(if_then_else(
        v(reg[i]), emit(c.start_schedulable, {id_lit(sched[i])}, assign(active[i], tt(), skip())),
        skip()));
  }
  auto any_caller = EventPattern{c.request_termination, {out(M), FieldPattern::any()}};

  // stops go out one at a time in registration order
  std::vector<TermPtr> term_alts;
  ExprPtr earlier_pending = ff();
  for (std::size_t i = 0; i < sched.size(); ++i) {
    auto s = id_lit(sched[i]);
    auto pending = and_(v(active[i]), not_(v(stopped[i])));
    term_alts.push_back(guard(and_(pending, not_(earlier_pending)),
                              emit(c.stop, {s}, assign(stopped[i], tt(), recvar(T)))));
    earlier_pending = or_(earlier_pending, pending);
    term_alts.push_back(guard(v(active[i]),
                              emit(c.done, {s}, assign(active[i], ff(),
                                                       assign(stopped[i], ff(), recvar(T))))));
  }
  term_alts.push_back(prefix(any_caller, recvar(T)));
  auto terminate = rec(T, if_then_else(none_of(active), skip(), choice(term_alts)));

  std::vector<TermPtr> run_alts;
  for (std::size_t i = 0; i < sched.size(); ++i) {
    run_alts.push_back(guard(v(active[i]), emit(c.done, {id_lit(sched[i])},
                                                assign(active[i], ff(), recvar(E)))));
  }
  run_alts.push_back(prefix(any_caller, terminate));
  auto execute = rec(E, if_then_else(none_of(active), skip(), choice(run_alts)));

  // (3) cleanup, reset, and wait for the next start
  std::vector<TermPtr> tail = {emit(c.mission_cleanup_call, {M}, skip()),
                               emit(c.mission_cleanup_ret, {M}, skip()),
                               emit(c.mission_done, {M}, skip())};
  TermPtr reset = recvar(L);
  for (std::size_t i = sched.size(); i-- > 0;) reset = assign(reg[i], ff(), reset);
  reset = assign(chk, ff(), reset);
  tail.push_back(reset);

  init_alts.push_back(emit(c.initialize_ret, {M},
                           seq({atomic(seq(starts)), execute, seq(tail)})));
  auto body = rec(L, on(c.start_mission, {out(M), in(q)},
                        emit(c.initialize_call, {M}, rec(R, choice(init_alts)))));

  const Value mv = Value::id(id);
  b.listens(c.start_mission, {mv});
  b.wants(c.initialize_call, {mv});
  b.wants(c.initialize_ret, {mv});
  b.wants(c.register_, {std::nullopt, mv});
  b.wants(c.check_schedulable, {mv});
  for (Sym s : sched) {
    b.wants(c.start_schedulable, {Value::id(s)});
    b.wants(c.stop, {Value::id(s)});
    b.wants(c.done, {Value::id(s)});
  }
  b.listens(c.request_termination, {mv});
  b.wants(c.mission_cleanup_call, {mv});
  b.wants(c.mission_cleanup_ret, {mv});
  b.wants(c.mission_done, {mv});
  return b.finish(body);
}

namespace {

void release_interests(Builder& b, Sym id, bool periodic_events) {
  const auto& c = channels();
  const Value h = Value::id(id);
  b.listens(c.start_schedulable, {h});
  b.listens(c.stop, {h});
  for (Sym ch : {c.done, c.release_start, c.release_end, c.handle_event_call,
                 c.handle_event_ret, c.deadline_miss}) {
    b.wants(ch, {h});
  }
  if (periodic_events) b.wants(c.overrun, {h});
}

}  // namespace

Component periodic_fw(Sym id, const ReleaseParams& p, int priority, const Universe&) {
  const auto& c = channels();
  Builder b("PeriodicFW", id);
  auto h = id_lit(id);
  Sym phase = b.var("phase", Domain::ints(0, p.period), Value::integer(0));
  Sym stopping = b.flag("stopping");
  std::optional<Sym> since;
  if (p.deadline) {
    since = b.var("since", Domain::ints(0, *p.deadline + 1), Value::integer(0));
  }
  Sym L = intern("Release"), R = intern("Running"), I = intern("Idle");

  auto finish = emit(c.done, {h}, skip());
  auto stop_req = [&](TermPtr k) { return emit(c.stop, {h}, assign(stopping, tt(), k)); };
  auto plus1 = [](Sym x) { return binary(Op::Add, var(x), int_lit(1)); };

  // A tick during a release: the period boundary while still running is an
  // overrun; the boundary restarts the phase.
  TermPtr after_tick = assign(
      phase, plus1(phase),
      if_then_else(eq(v(phase), int_lit(p.period)),
                   emit(c.overrun, {h}, assign(phase, int_lit(0), recvar(R))), recvar(R)));
  if (since) after_tick = deadline_tick(p, *since, id, after_tick);

  auto idle = rec(
      I, if_then_else(
             v(stopping), finish,
             if_then_else(eq(v(phase), int_lit(p.period)), assign(phase, int_lit(0), recvar(L)),
                          choice(seq(wait(1), assign(phase, plus1(phase), recvar(I))),
                                 guard(not_(v(stopping)), stop_req(recvar(I)))))));
  auto running = rec(
      R, choice({emit(c.handle_event_ret, {h}, emit(c.release_end, {h}, idle)),
                 guard(not_(v(stopping)), stop_req(recvar(R))), seq(wait(1), after_tick)}));
  TermPtr start = emit(c.handle_event_call, {h}, running);
  if (since) start = assign(*since, int_lit(0), start);
  auto body = emit(c.start_schedulable, {h},
                   rec(L, if_then_else(v(stopping), finish,
                                       emit(c.release_start, {h}, start))));
  release_interests(b, id, true);
  b.c.priority = priority;
  b.c.range = timing_range(p);
  return b.finish(body);
}

Component aperiodic_fw(Sym id, const ReleaseParams& p, int priority, const Universe&) {
  const auto& c = channels();
  Builder b("AperiodicFW", id);
  auto h = id_lit(id);
  Sym pending = b.flag("pending");
  Sym stopping = b.flag("stopping");
  std::optional<Sym> since;
  if (p.deadline) {
    since = b.var("since", Domain::ints(0, *p.deadline + 1), Value::integer(0));
  }
  Sym A = intern("Await"), R = intern("Running"), Z = intern("Finished");
  auto any_release = EventPattern{c.release, {out(h), FieldPattern::any()}};

  auto finish = emit(c.done, {h}, rec(Z, prefix(any_release, recvar(Z))));
  auto stop_req = [&](TermPtr k) { return emit(c.stop, {h}, assign(stopping, tt(), k)); };

  std::vector<TermPtr> running_alts = {
      emit(c.handle_event_ret, {h},
           emit(c.release_end, {h}, if_then_else(v(stopping), finish, recvar(A)))),
      prefix(any_release, assign(pending, tt(), recvar(R))),
      guard(not_(v(stopping)), stop_req(recvar(R)))};
  if (since) running_alts.push_back(seq(wait(1), deadline_tick(p, *since, id, recvar(R))));
  TermPtr release = emit(c.handle_event_call, {h}, rec(R, choice(running_alts)));
  if (since) release = assign(*since, int_lit(0), release);
  release = emit(c.release_start, {h}, release);

  auto body = emit(
      c.start_schedulable, {h},
      rec(A, if_then_else(v(pending), assign(pending, ff(), release),
                          choice(prefix(any_release, release),
                                 emit(c.stop, {h}, assign(stopping, tt(), finish))))));
  release_interests(b, id, false);
  b.listens(c.release, {Value::id(id)});
  b.c.priority = priority;
  b.c.range = timing_range(p);
  return b.finish(body);
}

Component oneshot_fw(Sym id, const ReleaseParams& p, int priority, const Universe&) {
  const auto& c = channels();
  Builder b("OneShotFW", id);
  auto h = id_lit(id);
  Sym cnt = b.var("cnt", Domain::ints(0, p.offset), Value::integer(0));
  Sym stopping = b.flag("stopping");
  std::optional<Sym> since;
  if (p.deadline) {
    since = b.var("since", Domain::ints(0, *p.deadline + 1), Value::integer(0));
  }
  Sym W = intern("Offset"), R = intern("Running");
  auto finish = emit(c.done, {h}, skip());

  std::vector<TermPtr> running_alts = {
      emit(c.handle_event_ret, {h}, emit(c.release_end, {h}, finish)),
      guard(not_(v(stopping)), emit(c.stop, {h}, assign(stopping, tt(), recvar(R))))};
  if (since) running_alts.push_back(seq(wait(1), deadline_tick(p, *since, id, recvar(R))));
  TermPtr release = emit(c.handle_event_call, {h}, rec(R, choice(running_alts)));
  if (since) release = assign(*since, int_lit(0), release);
  release = emit(c.release_start, {h}, release);

  auto body = emit(
      c.start_schedulable, {h},
      rec(W, if_then_else(eq(v(cnt), int_lit(p.offset)), release,
                          choice(seq(wait(1), assign(cnt, binary(Op::Add, var(cnt), int_lit(1)),
                                                     recvar(W))),
                                 emit(c.stop, {h}, finish)))));
  release_interests(b, id, false);
  b.c.priority = priority;
  b.c.range = timing_range(p);
  return b.finish(body);
}

Component managed_thread_fw(Sym id, int priority, const Universe&) {
  const auto& c = channels();
  Builder b("ThreadFW", id);
  b.c.id = qualified("ManagedThreadFW", id);
  auto t = id_lit(id);
  Sym stopping = b.flag("stopping");
  Sym R = intern("Running");
  auto body = emit(
      c.start_schedulable, {t},
      emit(c.release_start, {t},
           emit(c.run_call, {t},
                rec(R, choice(emit(c.run_ret, {t}, emit(c.release_end, {t}, emit(c.done, {t}, skip()))),
                              guard(not_(v(stopping)),
                                    emit(c.stop, {t}, assign(stopping, tt(), recvar(R)))))))));
  const Value tv = Value::id(id);
  b.listens(c.start_schedulable, {tv});
  b.listens(c.stop, {tv});
  for (Sym ch : {c.done, c.release_start, c.release_end, c.run_call, c.run_ret}) {
    b.wants(ch, {tv});
  }
  b.c.priority = priority;
  return b.finish(body);
}

}  // namespace scj2::framework
