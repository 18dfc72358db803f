#pragma once

// Big-step call-by-name evaluation of closed ground terms, in two modes:
// seeded sampling (one derivation) and exhaustive distribution enumeration
// (all derivations up to depth and mass budgets). The only branch point is
// the measurement rule; enumeration explores the choice tree by replaying
// evaluation with prescribed outcome prefixes, so deterministic evaluation
// between measurements stays a single iterative path.
//
// Terms must be type-checked first: evaluation reads the resolved-index
// slots of size and dmeas nodes and treats every stuck configuration as an
// internal error, which the progress property makes unreachable for
// well-typed inputs. A missing big-step premise (pred of 0) has no
// derivation at all and is reported as divergence, not as an error.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpcf/ast.hpp"
#include "qpcf/circuit.hpp"
#include "qpcf/gates.hpp"
#include "qpcf/index.hpp"
#include "qpcf/qsim.hpp"

namespace qpcf {

struct EvalError : Error {
    using Error::Error;
};

// --- values -----------------------------------------------------------------

struct Value {
    std::variant<Nat, CircPtr> v;

    bool is_num() const { return std::holds_alternative<Nat>(v); }
    const Nat& num() const { return std::get<Nat>(v); }
    const CircPtr& circ() const { return std::get<CircPtr>(v); }
};

inline Value value_num(Nat n) { return {std::move(n)}; }
inline Value value_circ(CircPtr c) { return {std::move(c)}; }

inline bool value_eq(const Value& a, const Value& b) {
    if (a.is_num() != b.is_num()) return false;
    return a.is_num() ? a.num() == b.num() : circuit_eq(a.circ(), b.circ());
}

inline std::string to_string(const Value& v) {
    return v.is_num() ? v.num().str() : to_string(v.circ());
}

// numerals sort before circuits, numerals by value, circuits structurally
struct ValueLess {
    bool operator()(const Value& a, const Value& b) const {
        if (a.is_num() != b.is_num()) return a.is_num();
        if (a.is_num()) return a.num() < b.num();
        return circuit_sort_key(a.circ()) < circuit_sort_key(b.circ());
    }
};

struct EvalOutcome {
    Value value;
    double probability = 1.0;  // product of measurement-branch probabilities
};

struct Distribution {
    std::vector<std::pair<Value, double>> outcomes;  // sorted by value
    double residual = 0;  // divergence and budget-cut mass

    double mass_of(const Value& v) const {
        for (const auto& [val, p] : outcomes)
            if (value_eq(val, v)) return p;
        return 0;
    }

    double total_mass() const {
        double m = 0;
        for (const auto& [_, p] : outcomes) m += p;
        return m;
    }
};

// --- bit operations of get/set ------------------------------------------------

// bit n (0 = rightmost) of m
inline Nat get_bit(const Nat& m, const Nat& n) {
    if (n >= Nat(std::numeric_limits<unsigned>::max())) return 0;
    unsigned pos = n.convert_to<unsigned>();
    if (Nat(m >> pos) == 0) return 0;
    return boost::multiprecision::bit_test(m, pos) ? 1 : 0;
}

// the numeral positions set/get can address are unbounded in principle; this
// cap only protects the process from absurd allocations
inline constexpr unsigned kMaxBitPosition = 1u << 26;

// m with bit n forced to 1 (set-to-one, not toggle)
inline Nat set_bit(const Nat& m, const Nat& n) {
    if (n >= Nat(kMaxBitPosition))
        throw EvalError("set: bit position " + n.str() + " exceeds the supported range");
    Nat out = m;
    boost::multiprecision::bit_set(out, n.convert_to<unsigned>());
    return out;
}

// --- configuration ------------------------------------------------------------

struct EvalConfig {
    long long fuel = 1'000'000;  // deterministic step budget per branch
    unsigned max_wires = kDefaultMaxWires;
};

struct DistConfig {
    long long fuel = 1'000'000;
    unsigned max_wires = kDefaultMaxWires;
    unsigned max_branch_depth = 64;  // dmeas applications per branch
    double mass_eps = 1e-12;         // branches below this mass are cut
};

namespace detail {

struct PathEnded {};  // branch died: fuel, missing premise, depth or mass cut

class PathRun {
  public:
    // sample mode
    PathRun(const GateRegistry& reg, const EvalConfig& cfg, Rng& rng)
        : reg_(reg),
          fuel_(cfg.fuel),
          max_wires_(cfg.max_wires),
          rng_(&rng),
          max_depth_(std::numeric_limits<unsigned>::max()),
          mass_eps_(0) {}

    // enumeration mode: replays `prefix`, extends with first outcomes, and
    // enqueues sibling prefixes for the driver
    PathRun(const GateRegistry& reg, const DistConfig& cfg, const std::vector<std::size_t>& prefix,
            std::vector<std::vector<std::size_t>>& work, double& residual)
        : reg_(reg),
          fuel_(cfg.fuel),
          max_wires_(cfg.max_wires),
          prefix_(&prefix),
          work_(&work),
          residual_(&residual),
          max_depth_(cfg.max_branch_depth),
          mass_eps_(cfg.mass_eps) {}

    EvalOutcome run(const TermPtr& t) {
        Value v = eval(t);
        return {std::move(v), prob_};
    }

  private:
    const GateRegistry& reg_;
    long long fuel_;
    unsigned max_wires_;
    double prob_ = 1.0;
    unsigned depth_ = 0;

    Rng* rng_ = nullptr;  // sample mode when set

    const std::vector<std::size_t>* prefix_ = nullptr;
    std::vector<std::size_t> choices_;
    std::vector<std::vector<std::size_t>>* work_ = nullptr;
    double* residual_ = nullptr;
    unsigned max_depth_;
    double mass_eps_;

    [[noreturn]] void die() {
        if (residual_) *residual_ += prob_;
        throw PathEnded{};
    }

    void spend(long long steps = 1) {
        if (fuel_ < steps) die();
        fuel_ -= steps;
    }

    Nat eval_num(const TermPtr& t) {
        Value v = eval(t);
        if (!v.is_num()) throw InternalError("expected a numeral value");
        return std::move(std::get<Nat>(v.v));
    }

    CircPtr eval_circ(const TermPtr& t) {
        Value v = eval(t);
        if (!v.is_num()) return std::move(std::get<CircPtr>(v.v));
        throw InternalError("expected a circuit value");
    }

    static TermPtr rebuild(TermPtr head, const std::vector<TermPtr>& args, std::size_t from) {
        for (std::size_t i = from; i < args.size(); ++i) head = app(head, args[i]);
        return head;
    }

    Value eval(TermPtr t) {
        for (;;) {
            spend();
            std::vector<TermPtr> args;
            TermPtr head = t;
            while (const App* a = as_app(head)) {
                args.push_back(a->arg);
                head = a->fn;
            }
            std::reverse(args.begin(), args.end());

            // structural operators carry their own operands
            if (const IdxBin* b = std::get_if<IdxBin>(&head->node)) {
                Nat l = eval_num(b->lhs);
                Nat r = eval_num(b->rhs);
                return value_num(b->op == '+' ? Nat(l + r) : Nat(l * r));
            }
            if (const SizeOf* s = std::get_if<SizeOf>(&head->node)) {
                if (!s->resolved) throw InternalError("size node without resolved index");
                t = s->resolved;  // the circuit argument is never evaluated
                continue;
            }
            if (const Meas* m = std::get_if<Meas>(&head->node)) return measure(*m);

            if (const Num* n = as_num(head)) {
                if (!args.empty()) throw InternalError("numeral applied to arguments");
                return value_num(n->value);
            }
            if (const GateRef* g = std::get_if<GateRef>(&head->node)) {
                if (!args.empty()) throw InternalError("gate applied to arguments");
                return value_circ(c_gate(reg_, g->name));
            }
            if (const Lam* l = as_lam(head)) {
                if (args.empty()) throw InternalError("abstraction has no ground type");
                t = rebuild(subst_term(l->body, l->name, args[0]), args, 1);
                continue;
            }
            if (const FixOp* f = std::get_if<FixOp>(&head->node)) {
                if (args.empty()) throw InternalError("fix has no ground type");
                t = rebuild(app(args[0], app(fix_op(f->ann), args[0])), args, 1);
                continue;
            }
            if (std::holds_alternative<SuccOp>(head->node)) {
                expect_args(args, 1, "succ");
                return value_num(eval_num(args[0]) + 1);
            }
            if (std::holds_alternative<PredOp>(head->node)) {
                expect_args(args, 1, "pred");
                Nat n = eval_num(args[0]);
                if (n == 0) die();  // no derivation exists
                return value_num(n - 1);
            }
            if (std::holds_alternative<IfOp>(head->node)) {
                expect_args(args, 3, "if");
                Nat n = eval_num(args[0]);
                t = n == 0 ? args[1] : args[2];
                continue;
            }
            if (std::holds_alternative<GetOp>(head->node)) {
                expect_args(args, 2, "get");
                Nat m = eval_num(args[0]);
                return value_num(get_bit(m, eval_num(args[1])));
            }
            if (std::holds_alternative<SetOp>(head->node)) {
                expect_args(args, 2, "set");
                Nat m = eval_num(args[0]);
                return value_num(set_bit(m, eval_num(args[1])));
            }
            if (std::holds_alternative<SeqOp>(head->node)) {
                expect_args(args, 2, "';'");
                CircPtr first = eval_circ(args[0]);
                return value_circ(c_seq(std::move(first), eval_circ(args[1])));
            }
            if (std::holds_alternative<ParOp>(head->node)) {
                // the value swaps the operands: M0 || M1 evaluates to C1 || C0
                expect_args(args, 2, "'||'");
                CircPtr c0 = eval_circ(args[0]);
                CircPtr c1 = eval_circ(args[1]);
                return value_circ(c_par(std::move(c1), std::move(c0)));
            }
            if (std::holds_alternative<IterOp>(head->node)) {
                // n copies of the second circuit in parallel on top of the first
                expect_args(args, 3, "iter");
                Nat n = eval_num(args[0]);
                CircPtr c0 = eval_circ(args[1]);
                CircPtr c1 = eval_circ(args[2]);
                if (n > Nat(fuel_)) die();
                std::size_t count = n.convert_to<std::size_t>();
                spend(static_cast<long long>(count));
                CircPtr acc = std::move(c0);
                for (std::size_t i = 0; i < count; ++i) acc = c_par(c1, std::move(acc));
                return value_circ(std::move(acc));
            }
            if (std::holds_alternative<RevOp>(head->node)) {
                expect_args(args, 1, "reverse");
                CircPtr c = eval_circ(args[0]);
                spend(static_cast<long long>(circuit_size(c)));
                return value_circ(reverse_circuit(reg_, c));
            }
            throw InternalError("stuck term reached the evaluator");
        }
    }

    static void expect_args(const std::vector<TermPtr>& args, std::size_t n, const char* what) {
        if (args.size() != n)
            throw InternalError(std::string(what) + " reached the evaluator partially applied");
    }

    Value measure(const Meas& m) {
        Nat state = eval_num(m.state);
        CircPtr circ = eval_circ(m.circ);
        if (!m.resolved) throw InternalError("dmeas node without resolved index");
        Nat k_num = eval_num(m.resolved);
        unsigned k = k_num.convert_to<unsigned>();
        if (circ->wires != k + 1)
            throw InternalError("dmeas circuit wire count disagrees with its resolved index");

        // restriction of the initial state to the circuit's register
        Nat mask = (Nat(1) << (k + 1)) - 1;
        std::uint64_t x = Nat(state & mask).convert_to<std::uint64_t>();

        if (depth_ + 1 > max_depth_) die();
        ++depth_;
        MeasureDistribution dist = circuit_eval(reg_, k, x, circ, max_wires_);

        std::size_t idx;
        double p;
        if (rng_) {
            auto [outcome, prob] = sample_measure(dist, *rng_);
            prob_ *= prob;
            return value_num(Nat(outcome));
        }
        if (choices_.size() < prefix_->size()) {
            idx = (*prefix_)[choices_.size()];
        } else {
            idx = 0;
            for (std::size_t sibling = 1; sibling < dist.size(); ++sibling) {
                std::vector<std::size_t> alt = choices_;
                alt.push_back(sibling);
                work_->push_back(std::move(alt));
            }
        }
        choices_.push_back(idx);
        auto it = dist.begin();
        std::advance(it, static_cast<long>(idx));
        p = it->second;
        if (prob_ * p < mass_eps_) {
            prob_ *= p;
            die();
        }
        prob_ *= p;
        return value_num(Nat(it->first));
    }
};

}  // namespace detail

// One seeded derivation; nullopt reports divergence (fuel cutoff or a
// configuration with no applicable rule).
inline std::optional<EvalOutcome> eval_sample(const TermPtr& t, Rng& rng, const GateRegistry& reg,
                                              const EvalConfig& cfg = {}) {
    detail::PathRun run(reg, cfg, rng);
    try {
        return run.run(t);
    } catch (const detail::PathEnded&) {
        return std::nullopt;
    }
}

// Every derivation up to the budgets; measurement branches are explored in
// ascending outcome order, so the result is deterministic.
inline Distribution eval_dist(const TermPtr& t, const GateRegistry& reg,
                              const DistConfig& cfg = {}) {
    Distribution out;
    std::map<Value, double, ValueLess> acc;
    std::vector<std::vector<std::size_t>> work;
    work.push_back({});
    while (!work.empty()) {
        std::vector<std::size_t> prefix = std::move(work.back());
        work.pop_back();
        detail::PathRun run(reg, cfg, prefix, work, out.residual);
        try {
            EvalOutcome o = run.run(t);
            acc[o.value] += o.probability;
        } catch (const detail::PathEnded&) {
            // mass already accounted in residual
        }
    }
    out.outcomes.assign(acc.begin(), acc.end());
    return out;
}

}  // namespace qpcf
