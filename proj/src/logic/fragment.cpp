#include "softhard/logic/fragment.hpp"

#include <array>

#include "softhard/common/overloaded.hpp"

namespace softhard::logic {

namespace {

void collect(const Formula& f, OperatorSet& ops);

void collect(const CountTerm& t, OperatorSet& ops) {
  std::visit(overloaded{
                 [&](const CountLeft& x) {
                   ops.count_left = true;
                   collect(*x.arg, ops);
                 },
                 [&](const CountRight& x) {
                   ops.count_right = true;
                   collect(*x.arg, ops);
                 },
                 [&](const Sum& x) {
                   collect(*x.lhs, ops);
                   collect(*x.rhs, ops);
                 },
                 [&](const Diff& x) {
                   collect(*x.lhs, ops);
                   collect(*x.rhs, ops);
                 },
                 [&](const One&) {},
             },
             t.node);
}

void collect(const Formula& f, OperatorSet& ops) {
  std::visit(overloaded{
                 [&](const AtomQ&) {},
                 [&](const Not& x) { collect(*x.arg, ops); },
                 [&](const And& x) {
                   collect(*x.lhs, ops);
                   collect(*x.rhs, ops);
                 },
                 [&](const Or& x) {
                   collect(*x.lhs, ops);
                   collect(*x.rhs, ops);
                 },
                 [&](const Prev& x) {
                   ops.prev = true;
                   collect(*x.arg, ops);
                 },
                 [&](const Next& x) {
                   ops.next = true;
                   collect(*x.arg, ops);
                 },
                 [&](const Since& x) {
                   ops.since = true;
                   collect(*x.lhs, ops);
                   collect(*x.rhs, ops);
                 },
                 [&](const Until& x) {
                   ops.until = true;
                   collect(*x.lhs, ops);
                   collect(*x.rhs, ops);
                 },
                 [&](const PredAtPos&) { ops.numeric = true; },
                 [&](const PredOfCount& x) {
                   ops.numeric = true;
                   collect(*x.count, ops);
                 },
                 [&](const Compare& x) {
                   ops.numeric = true;
                   collect(*x.lhs, ops);
                   collect(*x.rhs, ops);
                 },
             },
             f.node);
}

OperatorSet allowed(Fragment f) {
  OperatorSet s;
  switch (f) {
    case Fragment::Prev:
      s.prev = true;
      break;
    case Fragment::PrevNext:
      s.prev = s.next = true;
      break;
    case Fragment::Since:
      s.since = true;
      break;
    case Fragment::SinceUntil:
      s.since = s.until = true;
      break;
    case Fragment::PrevSince:
      s.prev = s.since = true;
      break;
    case Fragment::Ltl:
      s.prev = s.next = s.since = s.until = true;
      break;
    case Fragment::CountLeft:
      s.count_left = s.numeric = true;
      break;
    case Fragment::Count:
      s.count_left = s.count_right = s.numeric = true;
      break;
    case Fragment::PrevSinceCountLeft:
      s.prev = s.since = s.count_left = s.numeric = true;
      break;
    case Fragment::LtlCount:
      s.prev = s.next = s.since = s.until = true;
      s.count_left = s.count_right = s.numeric = true;
      break;
  }
  return s;
}

constexpr std::array kOrder = {
    Fragment::Prev,      Fragment::PrevNext, Fragment::Since,
    Fragment::SinceUntil, Fragment::PrevSince, Fragment::Ltl,
    Fragment::CountLeft, Fragment::Count,    Fragment::PrevSinceCountLeft,
    Fragment::LtlCount,
};

}  // namespace

OperatorSet operators_used(const Formula& f) {
  OperatorSet ops;
  collect(f, ops);
  return ops;
}

bool fragment_contains(Fragment fragment, const OperatorSet& ops) {
  OperatorSet a = allowed(fragment);
  return (!ops.prev || a.prev) && (!ops.next || a.next) && (!ops.since || a.since) &&
         (!ops.until || a.until) && (!ops.count_left || a.count_left) &&
         (!ops.count_right || a.count_right) && (!ops.numeric || a.numeric);
}

FragmentInfo classify_fragment(const Formula& f) {
  OperatorSet ops = operators_used(f);
  FragmentInfo info{Fragment::LtlCount, ops, !ops.next && !ops.until && !ops.count_right};
  for (Fragment candidate : kOrder) {
    if (fragment_contains(candidate, ops)) {
      info.fragment = candidate;
      break;
    }
  }
  return info;
}

std::string fragment_name(Fragment f) {
  switch (f) {
    case Fragment::Prev: return "TL[prev]";
    case Fragment::PrevNext: return "TL[prev,next]";
    case Fragment::Since: return "TL[since]";
    case Fragment::SinceUntil: return "TL[since,until]";
    case Fragment::PrevSince: return "TL[prev,since]";
    case Fragment::Ltl: return "LTL";
    case Fragment::CountLeft: return "TL[#L,+,Mon]";
    case Fragment::Count: return "TL[#L,#R,+,Mon]";
    case Fragment::PrevSinceCountLeft: return "TL[prev,since,#L,+,Mon]";
    case Fragment::LtlCount: return "LTL[#L,#R,+,Mon]";
  }
  return "?";
}

}  // namespace softhard::logic
