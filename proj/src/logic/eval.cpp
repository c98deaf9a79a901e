#include "softhard/logic/eval.hpp"

#include "softhard/common/error.hpp"
#include "softhard/common/overloaded.hpp"

namespace softhard::logic {

namespace {

using Counts = std::vector<std::int64_t>;

struct Evaluator {
  std::string_view w;
  const PredicateRegistry& registry;
  std::int64_t n = static_cast<std::int64_t>(w.size());

  std::vector<bool> formula(const Formula& f) {
    return std::visit(
        overloaded{
            [&](const AtomQ& x) {
              std::vector<bool> out(n);
              for (std::int64_t i = 0; i < n; ++i) out[i] = w[i] == x.symbol;
              return out;
            },
            [&](const Not& x) {
              auto out = formula(*x.arg);
              out.flip();
              return out;
            },
            [&](const And& x) {
              auto a = formula(*x.lhs);
              auto b = formula(*x.rhs);
              for (std::int64_t i = 0; i < n; ++i) a[i] = a[i] && b[i];
              return a;
            },
            [&](const Or& x) {
              auto a = formula(*x.lhs);
              auto b = formula(*x.rhs);
              for (std::int64_t i = 0; i < n; ++i) a[i] = a[i] || b[i];
              return a;
            },
            [&](const Prev& x) {
              auto a = formula(*x.arg);
              std::vector<bool> out(n, false);
              for (std::int64_t i = 1; i < n; ++i) out[i] = a[i - 1];
              return out;
            },
            [&](const Next& x) {
              auto a = formula(*x.arg);
              std::vector<bool> out(n, false);
              for (std::int64_t i = 0; i + 1 < n; ++i) out[i] = a[i + 1];
              return out;
            },
            [&](const Since& x) {
              // exists j <= i with rhs at j and lhs on all of [j, i].
              auto a = formula(*x.lhs);
              auto b = formula(*x.rhs);
              std::vector<bool> out(n, false);
              for (std::int64_t i = 0; i < n; ++i) {
                for (std::int64_t j = i; j >= 0 && a[j]; --j) {
                  if (b[j]) {
                    out[i] = true;
                    break;
                  }
                }
              }
              return out;
            },
            [&](const Until& x) {
              auto a = formula(*x.lhs);
              auto b = formula(*x.rhs);
              std::vector<bool> out(n, false);
              for (std::int64_t i = 0; i < n; ++i) {
                for (std::int64_t j = i; j < n && a[j]; ++j) {
                  if (b[j]) {
                    out[i] = true;
                    break;
                  }
                }
              }
              return out;
            },
            [&](const PredAtPos& x) {
              std::vector<bool> out(n);
              for (std::int64_t i = 0; i < n; ++i) out[i] = registry.evaluate(x.pred, n, i + 1);
              return out;
            },
            [&](const PredOfCount& x) {
              auto k = term(*x.count);
              std::vector<bool> out(n);
              for (std::int64_t i = 0; i < n; ++i) {
                // theta_n(0) is taken to be false.
                out[i] = k[i] >= 1 && k[i] <= n && registry.evaluate(x.pred, n, k[i]);
              }
              return out;
            },
            [&](const Compare& x) {
              auto a = term(*x.lhs);
              auto b = term(*x.rhs);
              std::vector<bool> out(n);
              for (std::int64_t i = 0; i < n; ++i) out[i] = a[i] <= b[i];
              return out;
            },
        },
        f.node);
  }

  Counts term(const CountTerm& t) {
    return std::visit(
        overloaded{
            [&](const CountLeft& x) {
              auto a = formula(*x.arg);
              Counts out(n);
              for (std::int64_t i = 0; i < n; ++i) {
                std::int64_t c = 0;
                for (std::int64_t j = 0; j <= i; ++j) c += a[j];
                out[i] = c;
              }
              return out;
            },
            [&](const CountRight& x) {
              auto a = formula(*x.arg);
              Counts out(n);
              for (std::int64_t i = 0; i < n; ++i) {
                std::int64_t c = 0;
                for (std::int64_t j = i; j < n; ++j) c += a[j];
                out[i] = c;
              }
              return out;
            },
            [&](const Sum& x) {
              auto a = term(*x.lhs);
              auto b = term(*x.rhs);
              for (std::int64_t i = 0; i < n; ++i) a[i] += b[i];
              return a;
            },
            [&](const Diff& x) {
              auto a = term(*x.lhs);
              auto b = term(*x.rhs);
              for (std::int64_t i = 0; i < n; ++i) a[i] -= b[i];
              return a;
            },
            [&](const One&) { return Counts(n, 1); },
        },
        t.node);
  }
};

}  // namespace

std::vector<bool> eval_formula(const Formula& f, std::string_view w,
                               const PredicateRegistry& registry) {
  if (w.empty()) throw PreconditionError("eval_formula on the empty string");
  return Evaluator{w, registry}.formula(f);
}

std::int64_t eval_count_term(const CountTerm& t, std::string_view w, std::int64_t i,
                             const PredicateRegistry& registry) {
  if (i < 1 || i > static_cast<std::int64_t>(w.size())) {
    throw PreconditionError("position " + std::to_string(i) + " outside the string");
  }
  return Evaluator{w, registry}.term(t)[static_cast<std::size_t>(i - 1)];
}

}  // namespace softhard::logic
