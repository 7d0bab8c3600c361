#include "unigraph/doublets.hpp"

#include <algorithm>
#include <numeric>

#include "unigraph/errors.hpp"

namespace unigraph {

std::vector<double> DoubletSet::normalized_splittings() const {
  std::vector<double> out;
  out.reserve(doublets.size());
  for (const auto& d : doublets) out.push_back(d.splitting_hz / mean_splitting_hz);
  return out;
}

namespace {

void finish(DoubletSet& set) {
  std::sort(set.doublets.begin(), set.doublets.end(),
            [](const Doublet& a, const Doublet& b) { return a.nu_low_hz < b.nu_low_hz; });
  std::sort(set.unpaired.begin(), set.unpaired.end());
  std::sort(set.flagged.begin(), set.flagged.end());
  double sum = 0.0;
  for (const auto& d : set.doublets) sum += d.splitting_hz;
  set.mean_splitting_hz = set.doublets.empty() ? 0.0 : sum / static_cast<double>(set.doublets.size());
}

}  // namespace

DoubletSet pair_doublets(const SpectrumResult& spectrum, const SolverConfig& config) {
  const auto nu = spectrum.frequencies();
  if (!std::is_sorted(nu.begin(), nu.end())) throw ContractError("pair_doublets needs a sorted spectrum");
  DoubletSet set;
  if (nu.empty()) return set;

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i + 1 < nu.size(); ++i)
    if (nu[i + 1] - nu[i] < config.pair_threshold_hz) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return nu[a + 1] - nu[a] < nu[b + 1] - nu[b]; });

  std::vector<bool> used(nu.size(), false);
  std::vector<bool> contested(nu.size(), false);
  for (const auto i : order) {
    if (used[i] || used[i + 1]) {
      // the loser of a smallest-gap-first contest
      contested[used[i] ? i + 1 : i] = true;
      continue;
    }
    used[i] = used[i + 1] = true;
    // exact coincidences (eigenphase solver on symmetric graphs) pair with zero splitting
    set.doublets.push_back({nu[i], nu[i + 1], nu[i + 1] - nu[i]});
  }
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (used[i]) continue;
    set.unpaired.push_back(nu[i]);
    if (contested[i]) set.flagged.push_back(nu[i]);
  }
  finish(set);
  return set;
}

DoubletSet pool_doublets(const std::vector<DoubletSet>& sets) {
  DoubletSet out;
  for (const auto& s : sets) {
    out.doublets.insert(out.doublets.end(), s.doublets.begin(), s.doublets.end());
    out.unpaired.insert(out.unpaired.end(), s.unpaired.begin(), s.unpaired.end());
    out.flagged.insert(out.flagged.end(), s.flagged.begin(), s.flagged.end());
  }
  double sum = 0.0;
  for (const auto& d : out.doublets) sum += d.splitting_hz;
  out.mean_splitting_hz = out.doublets.empty() ? 0.0 : sum / static_cast<double>(out.doublets.size());
  return out;
}

SpectrumResult merge_unresolved(const SpectrumResult& spectrum, double resolution_hz) {
  if (!(resolution_hz >= 0.0)) throw ParameterError("resolution must be non-negative");
  SpectrumResult out = spectrum;
  out.resonances.clear();
  const auto& in = spectrum.resonances;
  std::size_t start = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const bool last = i + 1 == in.size() || !(in[i + 1].frequency_hz - in[i].frequency_hz < resolution_hz);
    if (!last) continue;
    const auto count = static_cast<double>(i - start + 1);
    double nu = 0.0, width = 0.0;
    for (std::size_t j = start; j <= i; ++j) {
      nu += in[j].frequency_hz;
      width += in[j].width_hz;
    }
    out.resonances.push_back({i == start ? in[i].frequency_hz : nu / count, width / count});
    start = i + 1;
  }
  return out;
}

}  // namespace unigraph
