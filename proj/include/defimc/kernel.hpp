#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "defimc/store.hpp"

namespace defimc {

/// A labeled occurrence with fixed-arity integer payload,
/// e.g. transfer.USDC with payload (from, to, value).
struct Event {
  std::string name;
  std::vector<Int> payload;

  std::string str() const;
  bool operator==(const Event&) const = default;
};

inline constexpr const char* kRevertEvent = "REVERT";

/// In-model transaction failure. Thrown by protocol code, caught by the
/// atomic interpreter which rolls the store back to its entry snapshot.
struct RevertSignal {};

class ExecCtx;

using Block = std::function<void(ExecCtx&)>;
using Pred = std::function<bool(const Store&)>;
using EventFn = std::function<Event(const Store&)>;

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Process-term syntax. User behavior and protocol bodies are built from
/// these nodes; `run_atomic` interprets a term single-threadedly.
struct Term {
  struct Skip {};
  struct Stop {};
  struct Prefix {
    std::optional<EventFn> event;  // absent = internal (tau) step
    Block block;                   // may be empty
    TermPtr next;
  };
  struct Seq { TermPtr first, second; };
  struct If { Pred pred; TermPtr then_branch, else_branch; };
  struct Atomic { TermPtr body; };
  struct Interleave { std::vector<TermPtr> parts; };
  struct Call { std::string name; std::vector<Int> args; };
  struct Revert {};

  std::variant<Skip, Stop, Prefix, Seq, If, Atomic, Interleave, Call, Revert> node;
};

namespace term {
TermPtr skip();
TermPtr stop();
TermPtr prefix(EventFn event, Block block, TermPtr next);
TermPtr prefix(Event event, Block block, TermPtr next);
TermPtr tau(Block block, TermPtr next);
TermPtr tau(Block block);  // tau{...} -> Skip
TermPtr seq(TermPtr first, TermPtr second);
TermPtr branch(Pred pred, TermPtr then_t, TermPtr else_t);
TermPtr atomic(TermPtr body);
TermPtr interleave(std::vector<TermPtr> parts);
TermPtr call(std::string name, std::vector<Int> args = {});
TermPtr revert();
}  // namespace term

/// Named process definitions: name + integer arguments -> term.
class ProcessRegistry {
 public:
  using Builder = std::function<TermPtr(std::span<const Int>)>;
  void define(const std::string& name, Builder b);
  bool has(const std::string& name) const { return defs_.count(name) > 0; }
  TermPtr instantiate(const std::string& name, std::span<const Int> args) const;

 private:
  std::map<std::string, Builder> defs_;
};

/// Execution context of one atomic body: the live store, the event log,
/// and sub-transaction support for instrumentation that must observe
/// failures without losing its own writes.
class ExecCtx {
 public:
  ExecCtx(Store& store, const ProcessRegistry* registry)
      : store_(store), registry_(registry) {}

  Store& store() { return store_; }
  const Store& store() const { return store_; }

  void emit(Event e) { events_.push_back(std::move(e)); }
  void emit(std::string name, std::vector<Int> payload = {}) {
    events_.push_back({std::move(name), std::move(payload)});
  }

  [[noreturn]] void revert() { throw RevertSignal{}; }
  void require_or_revert(bool cond) { if (!cond) throw RevertSignal{}; }

  /// Runs `f` as a nested transaction. On RevertSignal the store is
  /// restored to the attempt's entry state, events emitted inside the
  /// attempt are discarded, a REVERT event is logged, and false is
  /// returned. Writes made after a failed attempt stick.
  bool attempt(const std::function<void(ExecCtx&)>& f);

  /// Interprets a term within this atomic (used by Call and by nested
  /// Atomic nodes, which flatten into the enclosing transaction).
  void run_term(const TermPtr& t);

  const std::vector<Event>& events() const { return events_; }

 private:
  Store& store_;
  const ProcessRegistry* registry_;
  std::vector<Event> events_;
};

/// Result of one atomic execution. On revert the caller's store has
/// already been restored to the pre-atomic snapshot.
struct AtomicOutcome {
  bool committed = false;
  std::vector<Event> events;
};

/// Runs `body` to completion with no interleaving. The store is mutated
/// in place on commit and restored bit-exactly on revert. `body` must not
/// contain an Interleave node.
AtomicOutcome run_atomic(Store& store, const TermPtr& body,
                         const ProcessRegistry* registry = nullptr);

}  // namespace defimc
