#include "defimc/kernel.hpp"

#include <sstream>

namespace defimc {

std::string Event::str() const {
  std::ostringstream os;
  os << name;
  for (Int v : payload) os << "." << v;
  return os.str();
}

namespace term {

TermPtr skip() { return std::make_shared<Term>(Term{Term::Skip{}}); }
TermPtr stop() { return std::make_shared<Term>(Term{Term::Stop{}}); }

TermPtr prefix(EventFn event, Block block, TermPtr next) {
  return std::make_shared<Term>(Term{Term::Prefix{std::move(event), std::move(block), std::move(next)}});
}

TermPtr prefix(Event event, Block block, TermPtr next) {
  return prefix([e = std::move(event)](const Store&) { return e; }, std::move(block), std::move(next));
}

TermPtr tau(Block block, TermPtr next) {
  return std::make_shared<Term>(Term{Term::Prefix{std::nullopt, std::move(block), std::move(next)}});
}

TermPtr tau(Block block) { return tau(std::move(block), skip()); }

TermPtr seq(TermPtr first, TermPtr second) {
  return std::make_shared<Term>(Term{Term::Seq{std::move(first), std::move(second)}});
}

TermPtr branch(Pred pred, TermPtr then_t, TermPtr else_t) {
  return std::make_shared<Term>(Term{Term::If{std::move(pred), std::move(then_t), std::move(else_t)}});
}

TermPtr atomic(TermPtr body) { return std::make_shared<Term>(Term{Term::Atomic{std::move(body)}}); }

TermPtr interleave(std::vector<TermPtr> parts) {
  return std::make_shared<Term>(Term{Term::Interleave{std::move(parts)}});
}

TermPtr call(std::string name, std::vector<Int> args) {
  return std::make_shared<Term>(Term{Term::Call{std::move(name), std::move(args)}});
}

TermPtr revert() { return std::make_shared<Term>(Term{Term::Revert{}}); }

}  // namespace term

void ProcessRegistry::define(const std::string& name, Builder b) {
  if (defs_.count(name)) throw ConfigError("process '" + name + "' already defined");
  defs_[name] = std::move(b);
}

TermPtr ProcessRegistry::instantiate(const std::string& name, std::span<const Int> args) const {
  auto it = defs_.find(name);
  if (it == defs_.end()) throw ConfigError("unknown process '" + name + "'");
  return it->second(args);
}

namespace {

// Signals that the interpreter hit Stop: the transaction ends successfully
// but pending continuations are discarded.
struct StopSignal {};

}  // namespace

void ExecCtx::run_term(const TermPtr& t) {
  // Explicit continuation stack; Seq pushes, Skip pops.
  std::vector<TermPtr> cont;
  TermPtr cur = t;
  while (true) {
    if (!cur) throw ConfigError("null term");
    if (std::holds_alternative<Term::Skip>(cur->node)) {
      if (cont.empty()) return;
      cur = cont.back();
      cont.pop_back();
    } else if (std::holds_alternative<Term::Stop>(cur->node)) {
      throw StopSignal{};
    } else if (auto* p = std::get_if<Term::Prefix>(&cur->node)) {
      std::optional<Event> ev;
      if (p->event) ev = (*p->event)(store_);
      if (p->block) p->block(*this);
      if (ev) events_.push_back(std::move(*ev));
      cur = p->next;
    } else if (auto* s = std::get_if<Term::Seq>(&cur->node)) {
      cont.push_back(s->second);
      cur = s->first;
    } else if (auto* i = std::get_if<Term::If>(&cur->node)) {
      // Guards read the live, partially updated store.
      cur = i->pred(store_) ? i->then_branch : i->else_branch;
    } else if (auto* a = std::get_if<Term::Atomic>(&cur->node)) {
      // Nested atomics flatten into the enclosing transaction.
      cur = a->body;
    } else if (std::holds_alternative<Term::Interleave>(cur->node)) {
      throw ConfigError("Interleave inside an atomic body");
    } else if (auto* c = std::get_if<Term::Call>(&cur->node)) {
      if (!registry_) throw ConfigError("process call '" + c->name + "' without a registry");
      cur = registry_->instantiate(c->name, c->args);
    } else if (std::holds_alternative<Term::Revert>(cur->node)) {
      throw RevertSignal{};
    }
  }
}

bool ExecCtx::attempt(const std::function<void(ExecCtx&)>& f) {
  Store snapshot = store_;
  std::size_t n_events = events_.size();
  try {
    f(*this);
    return true;
  } catch (const RevertSignal&) {
    store_ = snapshot;
    events_.resize(n_events);
    events_.push_back({kRevertEvent, {}});
    return false;
  }
}

AtomicOutcome run_atomic(Store& store, const TermPtr& body, const ProcessRegistry* registry) {
  Store snapshot = store;
  ExecCtx ctx(store, registry);
  try {
    ctx.run_term(body);
  } catch (const StopSignal&) {
    // Stop ends the transaction; writes so far stand.
  } catch (const RevertSignal&) {
    store = snapshot;
    return {false, {{kRevertEvent, {}}}};
  }
  return {true, ctx.events()};
}

}  // namespace defimc
