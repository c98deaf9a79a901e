#pragma once

namespace softhard {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace softhard
