#include "ocshuffle/coins.hpp"

#include "ocshuffle/params.hpp"

namespace ocs {

std::vector<Coin> coins_from_string(const std::string& s) {
  std::vector<Coin> out;
  out.reserve(s.size());
  for (char ch : s) {
    if (ch == 'H' || ch == 'h') out.push_back(Coin::Heads);
    else if (ch == 'T' || ch == 't') out.push_back(Coin::Tails);
    else throw InvalidArgument(std::string("coin string may only hold H/T, got '") + ch + "'");
  }
  return out;
}

std::string coins_to_string(const std::vector<Coin>& coins) {
  std::string s;
  s.reserve(coins.size());
  for (Coin c : coins) s.push_back(to_char(c));
  return s;
}

std::string to_string(PoolLabel label) {
  std::string who;
  const char names[3] = {'i', 'j', 'k'};
  for (int q = 0; q < 3; ++q)
    if (label.members & (1U << q)) who.push_back(names[q]);
  auto sup = [&](const char* base) {
    return who.size() <= 1 ? std::string(base) + "^" + who : std::string(base) + "^{" + who + "}";
  };
  switch (label.kind) {
    case PoolKind::Free: return "free";
    case PoolKind::Main: return "main";
    case PoolKind::B: return sup("B");
    case PoolKind::S: return sup("S");
    case PoolKind::X: return sup("X");
    case PoolKind::Y: return sup("Y");
    case PoolKind::Z: return sup("Z");
    case PoolKind::Kappa: return sup("kappa");
  }
  return "?";
}

std::vector<Coin> uniform_coins(std::uint64_t seed, std::size_t count) {
  CoinStream s(seed, PoolLabel{PoolKind::Main, 0});
  std::vector<Coin> out(count);
  for (auto& c : out) c = s.next();
  return out;
}

}  // namespace ocs
