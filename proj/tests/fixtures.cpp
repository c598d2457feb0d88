#include "fixtures.hpp"

#include <functional>

#include "lmx/combiner.hpp"
#include "lmx/generators.hpp"

namespace fixtures {

std::vector<lmx::BigInt> big(const std::vector<int>& v) {
  return {v.begin(), v.end()};
}

namespace {

std::string join(const std::vector<int>& v) {
  std::string s;
  for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

}  // namespace

std::vector<Named> first_type_family(int max_levels, int max_entry) {
  std::vector<Named> out;
  std::vector<int> m;
  std::function<void(int)> grow = [&](int lo) {
    if (!m.empty()) out.push_back({"first(" + join(m) + ")", lmx::gen_first_type(big(m))});
    if (static_cast<int>(m.size()) == max_levels) return;
    for (int v = lo; v <= max_entry; ++v) {
      m.push_back(v);
      grow(v);
      m.pop_back();
    }
  };
  grow(1);
  return out;
}

std::vector<Named> first_prime_family() {
  std::vector<Named> out;
  const std::vector<int> full{1, 1, 2};
  for (std::size_t l = 1; l <= full.size(); ++l) {
    std::vector<int> m(full.begin(), full.begin() + static_cast<long>(l));
    out.push_back({"first-prime(" + join(m) + ")", lmx::gen_first_type_prime(big(m)).first});
  }
  return out;
}

std::vector<Named> second_type_family() {
  std::vector<Named> out;
  for (std::size_t l = 1; l <= 2; ++l) {
    out.push_back({"second(2,2,2;l=" + std::to_string(l) + ")",
                   lmx::gen_second_type(lmx::synth_second_type(2, 2, 2, l))});
  }
  for (std::size_t l = 1; l <= 2; ++l) {
    out.push_back({"second-prime(2,2;l=" + std::to_string(l) + ")",
                   lmx::synth_and_gen_second_type_prime(2, 2, l).first});
  }
  return out;
}

std::vector<Named> combined_family() {
  const std::vector<Named> parts{
      {"first(1,2)", lmx::gen_first_type(big({1, 2}))},
      {"first-prime(1,1)", lmx::gen_first_type_prime(big({1, 1})).first},
      {"second(2,2,2;l=1)", lmx::gen_second_type(lmx::synth_second_type(2, 2, 2, 1))},
  };
  std::vector<Named> out;
  std::vector<lmx::FiniteSpace> spaces;
  std::string name;
  for (const auto& p : parts) {
    spaces.push_back(p.space);
    name += (name.empty() ? "" : "+") + p.name;
    out.push_back({"combined[" + name + "]", lmx::combine(spaces)});
  }
  return out;
}

std::vector<Named> oracle_family() {
  std::vector<Named> out = first_type_family(4, 4);
  for (auto* fam : {&first_prime_family, &second_type_family, &combined_family}) {
    auto more = (*fam)();
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

}  // namespace fixtures
