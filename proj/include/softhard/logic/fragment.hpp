#pragma once

#include <string>

#include "softhard/logic/formula.hpp"

namespace softhard::logic {

enum class Fragment {
  Prev,                 // TL[prev]
  PrevNext,             // TL[prev,next]
  Since,                // TL[since]
  SinceUntil,           // TL[since,until]
  PrevSince,            // TL[prev,since]
  Ltl,                  // LTL
  CountLeft,            // TL[#L,+,Mon]
  Count,                // TL[#L,#R,+,Mon]
  PrevSinceCountLeft,   // TL[prev,since,#L,+,Mon]
  LtlCount,             // LTL[#L,#R,+,Mon]
};

struct OperatorSet {
  bool prev = false;
  bool next = false;
  bool since = false;
  bool until = false;
  bool count_left = false;
  bool count_right = false;
  // Numerical predicates or comparisons of terms.
  bool numeric = false;
};

struct FragmentInfo {
  Fragment fragment;
  OperatorSet ops;
  // Uses only prev, since, #L (plus Booleans and numerical predicates), so
  // it can be compiled with future masking alone.
  bool future_masked_compilable;
};

OperatorSet operators_used(const Formula& f);

// Smallest fragment (in the enum's order) whose operator set covers f.
FragmentInfo classify_fragment(const Formula& f);

// Whether every operator of `ops` is available in `fragment`.
bool fragment_contains(Fragment fragment, const OperatorSet& ops);

std::string fragment_name(Fragment f);

}  // namespace softhard::logic
